"""Computational bases for spin-1/2 chains and initial-state sampling.

Site i of a chain of even length L maps to bit i of an integer mask;
bit value 1 means spin up. The chain is periodic: the neighbor of site
L-1 is site 0. A fixed-magnetization (particle-number) sector holds the
C(L, n_up) masks of Hamming weight n_up in ascending order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import BasisMismatchError, ParameterError

MIN_L = 4
MAX_L = 16


def _check_chain_length(L: int) -> None:
    if L % 2 or not MIN_L <= L <= MAX_L:
        raise ParameterError(f"chain length must be even with {MIN_L} <= L <= {MAX_L}, got {L}")


def popcount(mask: int) -> int:
    """Number of set bits (up spins) in a basis mask."""
    return int(mask).bit_count()


@dataclass(frozen=True)
class SectorBasis:
    """All basis masks of fixed Hamming weight, ascending, with inverse lookup."""

    L: int
    n_up: int
    states: np.ndarray
    # lookup[mask] = position in states, -1 outside the sector
    lookup: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    def index_of(self, mask: int) -> int:
        k = int(self.lookup[mask])
        if k < 0:
            raise ParameterError(f"mask {mask:#x} is not in the n_up={self.n_up} sector")
        return k


@lru_cache(maxsize=64)
def build_sector_basis(L: int, n_up: int) -> SectorBasis:
    """Enumerate the fixed-magnetization sector of n_up up spins.

    Cached per (L, n_up); the returned arrays are read-only and shared.
    """
    _check_chain_length(L)
    if not 0 <= n_up <= L:
        raise ParameterError(f"n_up must lie in [0, {L}], got {n_up}")
    all_masks = np.arange(1 << L, dtype=np.int64)
    weights = np.zeros(1 << L, dtype=np.int64)
    for i in range(L):
        weights += (all_masks >> i) & 1
    states = all_masks[weights == n_up]
    lookup = np.full(1 << L, -1, dtype=np.int64)
    lookup[states] = np.arange(len(states))
    states.setflags(write=False)
    lookup.setflags(write=False)
    return SectorBasis(L=L, n_up=n_up, states=states, lookup=lookup)


@dataclass
class StateVector:
    """Complex amplitudes over the full 2^L space (basis=None) or a sector."""

    L: int
    amplitudes: np.ndarray
    basis: SectorBasis | None = None

    @property
    def dim(self) -> int:
        return len(self.amplitudes)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.L, self.amplitudes.copy(), self.basis)

    def to_full_array(self) -> np.ndarray:
        """Amplitudes over the full 2^L space, embedding sector states."""
        if self.basis is None:
            return self.amplitudes
        full = np.zeros(1 << self.L, dtype=complex)
        full[self.basis.states] = self.amplitudes
        return full


def same_basis(a: StateVector | None, b: StateVector) -> None:
    if a is None:
        return
    if a.L != b.L or (a.basis is None) != (b.basis is None):
        raise BasisMismatchError("states live in different bases")
    if a.basis is not None and b.basis is not None and a.basis.n_up != b.basis.n_up:
        raise BasisMismatchError(
            f"sector mismatch: n_up={a.basis.n_up} vs n_up={b.basis.n_up}"
        )


def embed_sector_state(v: StateVector) -> StateVector:
    """Lift a sector state to the full 2^L space (norm preserved exactly)."""
    if v.basis is None:
        return v.copy()
    return StateVector(v.L, v.to_full_array(), basis=None)


def project_full_state(v: StateVector, basis: SectorBasis) -> StateVector:
    """Restrict a full-space state to a sector (left inverse of embed)."""
    if v.basis is not None:
        raise BasisMismatchError("state is already sector-resident")
    return StateVector(v.L, v.amplitudes[basis.states].copy(), basis)


def sample_half_filling_state(L: int, rng: np.random.Generator) -> StateVector:
    """Uniformly random half-filling basis product state, sector-resident."""
    _check_chain_length(L)
    basis = build_sector_basis(L, L // 2)
    amplitudes = np.zeros(basis.dim, dtype=complex)
    amplitudes[rng.integers(basis.dim)] = 1.0
    return StateVector(L, amplitudes, basis)


def sample_random_product_state(L: int, rng: np.random.Generator) -> StateVector:
    """Product of single-spin states drawn uniformly on the Bloch sphere.

    Each spin is cos(theta/2)|up> + e^{i phi} sin(theta/2)|down> with
    cos(theta) ~ U[-1, 1] and phi ~ U[0, 2pi). Full-space vector, unit norm.
    """
    _check_chain_length(L)
    cos_theta = rng.uniform(-1.0, 1.0, L)
    phi = rng.uniform(0.0, 2.0 * np.pi, L)
    half = np.arccos(cos_theta) / 2.0
    up = np.cos(half)
    down = np.exp(1j * phi) * np.sin(half)
    # Kronecker growth over sites: bit i of the amplitude index is the high
    # bit added at step i, value 1 meaning spin up.
    amplitudes = np.ones(1, dtype=complex)
    for i in range(L):
        block = np.empty(2 * len(amplitudes), dtype=complex)
        block[: len(amplitudes)] = down[i] * amplitudes
        block[len(amplitudes):] = up[i] * amplitudes
        amplitudes = block
    return StateVector(L, amplitudes, basis=None)
