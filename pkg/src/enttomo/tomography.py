"""Bond-additive entropy model: S = S0 + sum_j omega_j n_j.

The crossed-bond counts of one (L, n0) slice are linearly dependent
(they sum to n0 (L - n0)), so the regression truncates at j = L/2 - 1;
the last count stays in the data files for audit but never enters the
design matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from .bipartitions import RepresentativeSet
from .errors import ParameterError


def build_design_matrix(rep_set: RepresentativeSet) -> np.ndarray:
    """Rows [1, n_1, ..., n_{L/2-1}], one per representative bipartition."""
    if len(rep_set) == 0:
        raise ParameterError("empty representative set")
    geometry = rep_set.geometry[:, :-1].astype(float)
    return np.column_stack([np.ones(len(rep_set)), geometry])


class BondTensionRegression(BaseEstimator, RegressorMixin):
    """Least-squares fit of entropies to the bond-additive ansatz.

    fit expects X as the raw crossed-bond count matrix (columns n_1..n_{L/2});
    the linearly dependent last column is dropped internally and an intercept
    is prepended. Attributes follow the usual estimator convention:
    intercept_ (S0, bits), coef_ (omega_1..omega_{L/2-1}, bits per crossed
    bond), r2_, residuals_, rank_deficient_.
    """

    def fit(self, X: np.ndarray, y: np.ndarray) -> "BondTensionRegression":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if X.ndim != 2 or len(X) != len(y):
            raise ParameterError("X must be 2-d with one row per y value")
        design = np.column_stack([np.ones(len(X)), X[:, :-1]])
        solution, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
        predicted = design @ solution
        residuals = y - predicted
        ss_res = float(residuals @ residuals)
        centered = y - y.mean()
        ss_tot = float(centered @ centered)
        self.intercept_ = float(solution[0])
        self.coef_ = solution[1:]
        self.rank_deficient_ = bool(rank < design.shape[1])
        self.residuals_ = residuals
        if ss_tot == 0.0:
            # constant data: a fit that reproduces it is perfect
            perfect = ss_res <= 1e-24 * max(1.0, float(y @ y))
            self.r2_ = 1.0 if perfect else -np.inf
        else:
            self.r2_ = 1.0 - ss_res / ss_tot
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return self.intercept_ + X[:, :-1] @ self.coef_


@dataclass
class FitResult:
    """One fitted (protocol, time, n0) slice, ready for serialization."""

    L: int
    n0: int
    protocol: str
    time: float
    S0: float
    omega: list[float]
    r2: float
    rank_flag: bool
    residuals: np.ndarray = field(repr=False)
    predicted: np.ndarray = field(repr=False)

    @property
    def hierarchy(self) -> float:
        """omega_1 over the largest |omega_j| beyond j=1 (inf when none)."""
        if len(self.omega) < 2:
            return float("inf")
        tail = max(abs(w) for w in self.omega[1:])
        return float("inf") if tail == 0.0 else self.omega[0] / tail

    def to_record(self) -> dict:
        return {"L": self.L, "n0": self.n0, "protocol": self.protocol, "time": self.time,
                "S0": self.S0, "omega": list(self.omega), "r2": self.r2,
                "rank_flag": self.rank_flag}


def fit_geometry(geometry: np.ndarray, mean_entropies: np.ndarray, L: int, n0: int,
                 protocol: str = "", time: float = 0.0) -> FitResult:
    """Fit one slice given its raw crossed-bond count matrix (columns n_1..n_{L/2})."""
    geometry = np.asarray(geometry, dtype=float)
    y = np.asarray(mean_entropies, dtype=float)
    if len(y) != len(geometry):
        raise ParameterError(
            f"expected {len(geometry)} entropies for (L={L}, n0={n0}), got {len(y)}")
    model = BondTensionRegression().fit(geometry, y)
    return FitResult(L=L, n0=n0, protocol=protocol, time=time,
                     S0=model.intercept_, omega=[float(w) for w in model.coef_],
                     r2=float(model.r2_), rank_flag=model.rank_deficient_,
                     residuals=model.residuals_,
                     predicted=model.predict(geometry))


def fit_bond_tensions(rep_set: RepresentativeSet, mean_entropies: np.ndarray,
                      protocol: str = "", time: float = 0.0) -> FitResult:
    """Fit one slice of per-representative mean entropies."""
    return fit_geometry(rep_set.geometry, mean_entropies, L=rep_set.L, n0=rep_set.n0,
                        protocol=protocol, time=time)


def predict_entropy(fit: FitResult, geometry) -> float:
    """S0 + sum_j omega_j n_j for one crossed-bond vector."""
    geometry = np.asarray(geometry, dtype=float)
    return float(fit.S0 + geometry[: len(fit.omega)] @ np.asarray(fit.omega))
