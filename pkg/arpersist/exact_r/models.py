import pathlib
from dataclasses import dataclass
from enum import Enum
from typing import TextIO

import ibis
import numpy as np
import pandas as pd

from arpersist.innovations import InnovationModel


class TableColumns(Enum):
    """Column names of the exported exact tables."""

    N = "n"
    V_N = "v_n"
    G_N = "G_n"


def _write_frame(frame: pd.DataFrame, path: str | pathlib.Path | TextIO) -> None:
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")


@dataclass(frozen=True, eq=False)
class CdfGrid:
    """Distribution function of the innovations on the unit lattice above ``x0``.

    Attributes:
        model: Innovation model the grid was built from.
        x0: Threshold.
        p: ``p[k] = P(eta <= x0 + k)`` for ``k = 0..kmax``.
        sf: ``sf[k] = P(eta > x0 + k)``, kept separately so that differences of
            ``p`` close to one do not cancel.
    """

    model: InnovationModel
    x0: float
    p: np.ndarray
    sf: np.ndarray

    @property
    def kmax(self) -> int:
        return len(self.p) - 1

    @property
    def products(self) -> np.ndarray:
        """``products[j] = prod_{k<j} p[k]`` for ``j = 0..kmax+1``."""
        return np.concatenate(([1.0], np.cumprod(self.p)))


@dataclass(frozen=True, eq=False)
class TailTable:
    """Exact tails ``v[n] = P_{x0+1}(T > n)`` of the random exchange recurrence time.

    Attributes:
        grid: The lattice distribution function.
        v: ``v[n]`` for ``n = 0..nmax``.
        d: ``d[m] = prod_{j<m} p[j] - prod_{j<=m} p[j]``.
        c_seq: ``c_seq[n] = P(eta > x0 + n - 1)``.
    """

    grid: CdfGrid
    v: np.ndarray
    d: np.ndarray
    c_seq: np.ndarray

    @property
    def nmax(self) -> int:
        return len(self.v) - 1

    def to_pandas(self) -> pd.DataFrame:
        """Frame with columns ``n`` and ``v_n``."""
        return pd.DataFrame(
            {TableColumns.N.value: np.arange(self.nmax + 1), TableColumns.V_N.value: self.v}
        )

    def to_ibis(self) -> ibis.Table:
        return ibis.memtable(self.to_pandas())

    def write_csv(self, path: str | pathlib.Path | TextIO) -> None:
        _write_frame(self.to_pandas(), path)


@dataclass(frozen=True, eq=False)
class HarmonicTable:
    """Values of the harmonic function of the killed random exchange chain.

    Attributes:
        grid: The lattice distribution function.
        G: ``G[n]`` is the value on ``(x0 + n, x0 + n + 1]``, normalized by ``G[0] = 1``.
    """

    grid: CdfGrid
    G: np.ndarray

    @property
    def nmax(self) -> int:
        return len(self.G) - 1

    def to_pandas(self) -> pd.DataFrame:
        """Frame with columns ``n`` and ``G_n``."""
        return pd.DataFrame(
            {TableColumns.N.value: np.arange(self.nmax + 1), TableColumns.G_N.value: self.G}
        )

    def to_ibis(self) -> ibis.Table:
        return ibis.memtable(self.to_pandas())

    def write_csv(self, path: str | pathlib.Path | TextIO) -> None:
        _write_frame(self.to_pandas(), path)
