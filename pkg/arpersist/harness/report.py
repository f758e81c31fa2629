import json
import pathlib
from typing import TextIO

from loguru import logger

from .models import ResultRecord


def write_csv(record: ResultRecord, path: str | pathlib.Path | TextIO) -> None:
    """Write the metric rows with columns ``experiment,n,observed,reference,ratio,std_err,pass``."""
    record.to_pandas().to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    logger.info(f"Wrote {len(record.rows)} rows of {record.experiment} to {path}")


def write_json(record: ResultRecord, path: str | pathlib.Path) -> None:
    """Write the full record, parameter echo included, as sorted JSON."""
    with pathlib.Path(path).open("w") as file:
        json.dump(record.to_dict(), file, sort_keys=True, indent=2)
        file.write("\n")


def read_json(path: str | pathlib.Path) -> ResultRecord:
    with pathlib.Path(path).open("r") as file:
        return ResultRecord.from_dict(json.load(file))
