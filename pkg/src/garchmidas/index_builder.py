"""
Global uncertainty index from a panel of country-level monthly indexes,
taken as the first principal component of the (standardised) panel.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from garchmidas.data import LowFrequencySeries
from garchmidas.errors import ConvergenceFailure, DegeneratePanel, MalformedRow

__all__ = ["GlobalIndex", "IndexPanel", "build_global_index", "load_index_panel"]


@dataclass(frozen=True, eq=False)
class IndexPanel:
    """
    Complete-case panel of monthly country indexes.

    Construct with :meth:`from_raw` to drop months with any missing
    country; ``n_dropped`` records how many were removed.
    """

    months: np.ndarray
    countries: tuple
    matrix: np.ndarray
    n_dropped: int = 0

    def __post_init__(self):
        if self.matrix.shape != (self.months.size, len(self.countries)):
            raise ValueError("matrix must be months x countries")
        if np.isnan(self.matrix).any():
            raise ValueError("panel has missing cells; build it with IndexPanel.from_raw")
        if len(self.countries) < 2:
            raise DegeneratePanel("need at least 2 countries")
        if self.months.size < 3:
            raise DegeneratePanel("need at least 3 complete months")

    @classmethod
    def from_raw(cls, months, countries, matrix) -> "IndexPanel":
        months = np.asarray(months, dtype="datetime64[M]")
        matrix = np.asarray(matrix, dtype=float)
        complete = ~np.isnan(matrix).any(axis=1)
        return cls(months[complete], tuple(countries), matrix[complete],
                   int((~complete).sum()))


@dataclass(frozen=True, eq=False)
class GlobalIndex:
    series: LowFrequencySeries
    loadings: np.ndarray
    explained_variance_ratio: float
    countries: tuple
    scaling: str
    n_dropped: int

    def sidecar(self) -> dict:
        return {
            "label": self.series.label,
            "scaling": self.scaling,
            "countries": list(self.countries),
            "loadings": [float(v) for v in self.loadings],
            "explained_variance_ratio": float(self.explained_variance_ratio),
            "dropped_months": self.n_dropped,
        }

    def sidecar_json(self) -> str:
        return json.dumps(self.sidecar(), indent=2) + "\n"


def load_index_panel(path) -> IndexPanel:
    """Read a wide ``month,COUNTRY1,COUNTRY2,...`` CSV; empty cells are missing."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0].strip() != "month":
            raise MalformedRow(f"{path}: header must start with 'month'", line=1)
        countries = [h.strip() for h in header[1:]]
        months, rows = [], []
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            line = reader.line_num
            if len(row) != len(header):
                raise MalformedRow(f"{path}: expected {len(header)} fields", line=line)
            try:
                months.append(np.datetime64(row[0].strip(), "M"))
                rows.append([float(c) if c.strip() else np.nan for c in row[1:]])
            except ValueError:
                raise MalformedRow(f"{path}: unparseable row {row}", line=line) from None
    if not rows:
        raise MalformedRow(f"{path}: no data rows", line=2)
    months = np.array(months, dtype="datetime64[M]")
    order = np.argsort(months, kind="stable")
    return IndexPanel.from_raw(months[order], countries, np.array(rows)[order])


def build_global_index(panel: IndexPanel, scaling: str = "standardize",
                       label: str = "GEPU") -> GlobalIndex:
    """
    First-principal-component index of ``panel``.

    Columns are centred (``center_only``) or centred and scaled to unit
    variance (``standardize``), and the leading eigenvector of their
    covariance matrix gives the loadings. The sign is fixed so the mean
    loading is positive; when it is zero up to rounding, the first country
    with a non-zero loading is made positive. The component scores are then
    rescaled to the mean and standard deviation of the cross-country
    average, so the index is on the same scale as the inputs.
    """
    if scaling not in ("standardize", "center_only"):
        raise ValueError("scaling must be 'standardize' or 'center_only'")
    X = panel.matrix
    sd = X.std(axis=0, ddof=1)
    if np.any(sd == 0):
        flat = [c for c, s in zip(panel.countries, sd) if s == 0]
        raise DegeneratePanel(f"zero-variance columns: {flat}")
    Z = X - X.mean(axis=0)
    if scaling == "standardize":
        Z = Z / sd
    cov = Z.T @ Z / (Z.shape[0] - 1)
    try:
        eigval, eigvec = np.linalg.eigh(cov)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"eigen-decomposition failed: {exc}") from exc
    eigval = np.clip(eigval, 0.0, None)
    loadings = eigvec[:, -1]
    mean_loading = loadings.mean()
    if abs(mean_loading) <= 1e-12 * np.abs(loadings).max():
        # balanced loadings (e.g. x and -x): make the first country positive
        if loadings[np.flatnonzero(loadings)[0]] < 0:
            loadings = -loadings
    elif mean_loading < 0:
        loadings = -loadings
    ratio = float(eigval[-1] / eigval.sum())

    scores = Z @ loadings
    avg = X.mean(axis=1)
    s_sd = scores.std(ddof=1)
    if s_sd > 0:
        index = avg.mean() + (scores - scores.mean()) / s_sd * avg.std(ddof=1)
    else:
        index = np.full_like(avg, avg.mean())
    series = LowFrequencySeries(panel.months, index, label)
    return GlobalIndex(series, loadings, ratio, panel.countries, scaling, panel.n_dropped)
