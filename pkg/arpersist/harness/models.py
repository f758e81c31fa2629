import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any

import ibis
import pandas as pd

from arpersist.innovations import InnovationModel, format_model, parse_model

MIN_MC_REPLICATES = 1000


class ExperimentName(Enum):
    """Named verification experiments; values double as CLI names."""

    THM2 = "thm2"
    THM4 = "thm4"
    THM5 = "thm5"
    ZLAW = "zlaw"
    FUNC_LIMIT = "funclimit"
    SANDWICH = "sandwich"
    ORACLE = "oracle"


MONTE_CARLO_EXPERIMENTS = frozenset(
    {
        ExperimentName.THM5,
        ExperimentName.ZLAW,
        ExperimentName.FUNC_LIMIT,
        ExperimentName.SANDWICH,
        ExperimentName.ORACLE,
    }
)


class ResultColumns(Enum):
    EXPERIMENT = "experiment"
    N = "n"
    OBSERVED = "observed"
    REFERENCE = "reference"
    RATIO = "ratio"
    STD_ERR = "std_err"
    PASS = "pass"


@dataclass(frozen=True)
class ExperimentSpec:
    """Parameters of one verification experiment.

    Attributes:
        name: Experiment.
        model: Innovation model.
        x0: Threshold on the log scale.
        A: Base of the logarithmic scale.
        start: Starting point on the log scale.
        n_grid: Increasing steps at which asymptotics are checked.
        replicates: Monte Carlo replicates.
        seed: Master seed.
        tol: Experiment tolerance (final ratio deviation or KS bound).
    """

    name: ExperimentName
    model: InnovationModel
    x0: float
    A: float = 2.0
    start: float = 2.0
    n_grid: tuple[int, ...] = ()
    replicates: int = 10_000
    seed: int = 0
    tol: float = 0.25

    def __post_init__(self) -> None:
        if not self.n_grid:
            raise ValueError("Expected a non-empty n_grid.")
        if any(a >= b for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValueError(f"Expected n_grid sorted ascending but got {self.n_grid}.")
        if self.name in MONTE_CARLO_EXPERIMENTS and self.replicates < MIN_MC_REPLICATES:
            raise ValueError(
                f"Expected at least {MIN_MC_REPLICATES} replicates for {self.name.value} "
                f"but got {self.replicates}."
            )
        if not self.start > self.x0:
            raise ValueError(f"Expected start > x0 but got start={self.start}, x0={self.x0}.")
        if not self.tol > 0:
            raise ValueError(f"Expected positive tol but got {self.tol}.")

    def to_params(self) -> dict[str, Any]:
        """Parameter echo stored in result records."""
        return {
            "model": format_model(self.model),
            "x0": self.x0,
            "A": self.A,
            "start": self.start,
            "n_grid": list(self.n_grid),
            "replicates": self.replicates,
            "seed": self.seed,
            "tol": self.tol,
        }

    @classmethod
    def from_params(cls, name: ExperimentName | str, params: dict[str, Any]) -> "ExperimentSpec":
        """Rebuild a spec from its parameter echo."""
        return cls(
            name=ExperimentName(name),
            model=parse_model(params["model"]),
            x0=float(params["x0"]),
            A=float(params["A"]),
            start=float(params["start"]),
            n_grid=tuple(int(n) for n in params["n_grid"]),
            replicates=int(params["replicates"]),
            seed=int(params["seed"]),
            tol=float(params["tol"]),
        )


@dataclass(frozen=True)
class MetricRow:
    """One checked quantity: observed against reference at index ``n``.

    Attributes:
        criterion: Short name of the check.
        n: Step, sample size or case index the row refers to.
        observed: Computed value.
        reference: Value it is checked against.
        ratio: ``observed / reference`` (``nan`` when the reference is zero).
        std_err: Standard error of ``observed``, zero for exact quantities.
        passed: Verdict of the row.
        cause: Error message when the check could not be computed.
    """

    criterion: str
    n: int
    observed: float
    reference: float
    ratio: float
    std_err: float
    passed: bool
    cause: str = ""

    @classmethod
    def of(
        cls,
        criterion: str,
        n: int,
        observed: float,
        reference: float,
        passed: bool,
        std_err: float = 0.0,
    ) -> "MetricRow":
        ratio = observed / reference if reference != 0 else math.nan
        return cls(
            criterion=criterion,
            n=int(n),
            observed=float(observed),
            reference=float(reference),
            ratio=float(ratio),
            std_err=float(std_err),
            passed=bool(passed),
        )

    @classmethod
    def failed(cls, criterion: str, cause: str) -> "MetricRow":
        return cls(
            criterion=criterion,
            n=0,
            observed=math.nan,
            reference=math.nan,
            ratio=math.nan,
            std_err=math.nan,
            passed=False,
            cause=cause,
        )


@dataclass(frozen=True)
class ResultRecord:
    """Outcome of an experiment together with everything needed to rerun it."""

    experiment: str
    params: dict[str, Any]
    rows: tuple[MetricRow, ...] = field(default_factory=tuple)
    seed: int = 0

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def to_pandas(self) -> pd.DataFrame:
        columns = [col.value for col in ResultColumns]
        return pd.DataFrame(
            [
                [self.experiment, r.n, r.observed, r.reference, r.ratio, r.std_err, r.passed]
                for r in self.rows
            ],
            columns=columns,
        )

    def to_ibis(self) -> ibis.Table:
        """Metric rows as a table with the CSV columns."""
        return ibis.memtable(self.to_pandas())

    def to_dict(self) -> dict[str, Any]:
        return {
            "experiment": self.experiment,
            "params": self.params,
            "rows": [asdict(row) for row in self.rows],
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ResultRecord":
        return cls(
            experiment=data["experiment"],
            params=data["params"],
            rows=tuple(MetricRow(**row) for row in data["rows"]),
            seed=int(data["seed"]),
        )
