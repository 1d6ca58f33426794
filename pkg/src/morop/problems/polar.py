"""Airfoil polar tables: loading, validation and linear interpolation."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from ..core import ModelError

HEADER = ("alpha_deg", "cl", "cd")
REQUIRED_RANGE = (-10.0, 25.0)


class PolarError(ModelError):
    pass


class PolarOutOfRange(PolarError):
    code = "polar-out-of-range"


@dataclass(frozen=True)
class PolarTable:
    alpha: np.ndarray
    cl: np.ndarray
    cd: np.ndarray
    name: str = ""

    def __post_init__(self):
        a, cl, cd = (np.asarray(v, dtype=float) for v in (self.alpha, self.cl, self.cd))
        if not (a.ndim == cl.ndim == cd.ndim == 1 and a.shape == cl.shape == cd.shape):
            raise PolarError("alpha, cl and cd must be 1-D arrays of equal length")
        if len(a) < 2:
            raise PolarError("a polar needs at least two rows")
        if not np.all(np.isfinite(a)) or not np.all(np.isfinite(cl)) or not np.all(np.isfinite(cd)):
            raise PolarError("polar contains non-finite values")
        if np.any(np.diff(a) <= 0.0):
            raise PolarError("angle of attack must be strictly increasing")
        if np.any(cd < 0.0):
            raise PolarError("drag coefficient must be >= 0")
        for arr in (a, cl, cd):
            arr.setflags(write=False)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "cl", cl)
        object.__setattr__(self, "cd", cd)

    @property
    def range(self) -> tuple[float, float]:
        return float(self.alpha[0]), float(self.alpha[-1])

    def covers(self, alpha_deg) -> np.ndarray:
        a = np.asarray(alpha_deg, dtype=float)
        return (a >= self.alpha[0]) & (a <= self.alpha[-1])

    def lookup(self, alpha_deg):
        """Interpolated (cl, cd) at ``alpha_deg``; raises outside the table."""
        if not np.all(self.covers(alpha_deg)):
            raise PolarOutOfRange(
                f"angle of attack {alpha_deg} outside table range {self.range}"
            )
        return self.lookup_clamped(alpha_deg)

    def lookup_clamped(self, alpha_deg):
        a = np.asarray(alpha_deg, dtype=float)
        cl = np.interp(a, self.alpha, self.cl)
        cd = np.interp(a, self.alpha, self.cd)
        if a.ndim == 0:
            return float(cl), float(cd)
        return cl, cd


def parse_polar(text: str, name: str = "", require_range=REQUIRED_RANGE) -> PolarTable:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise PolarError(f"{name or 'polar'}: no data")
    reader = csv.reader(io.StringIO("\n".join(lines)))
    header = tuple(h.strip() for h in next(reader))
    if header != HEADER:
        raise PolarError(f"{name or 'polar'}: expected header {','.join(HEADER)}, got {','.join(header)}")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != 3:
            raise PolarError(f"{name or 'polar'}: malformed row {lineno}: {row}")
        try:
            rows.append(tuple(float(v) for v in row))
        except ValueError:
            raise PolarError(f"{name or 'polar'}: malformed row {lineno}: {row}") from None
    if len(rows) < 2:
        raise PolarError(f"{name or 'polar'}: a polar needs at least two rows")
    arr = np.array(rows)
    if np.any(np.diff(arr[:, 0]) <= 0.0):
        raise PolarError(f"{name or 'polar'}: non-monotone angle of attack")
    table = PolarTable(arr[:, 0], arr[:, 1], arr[:, 2], name=name)
    if require_range is not None:
        lo, hi = require_range
        if table.range[0] > lo or table.range[1] < hi:
            raise PolarError(f"{name or 'polar'}: table range {table.range} does not cover [{lo}, {hi}] deg")
    return table


def load_polar(path, require_range=REQUIRED_RANGE) -> PolarTable:
    path = Path(path)
    return parse_polar(path.read_text(), name=path.name, require_range=require_range)


def default_polar() -> PolarTable:
    """The bundled S809 table."""
    text = resources.files("morop").joinpath("data/s809.csv").read_text()
    return parse_polar(text, name="s809.csv")
