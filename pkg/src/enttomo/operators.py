"""Hamiltonian builders for the disordered spin-1/2 chain.

Spin operators are S^a = sigma^a / 2, so nearest-neighbor exchange has
off-diagonal amplitude 1/2, an aligned/anti-aligned ZZ pair contributes
+-Jz/4, and a longitudinal field contributes +-h_i/2. All chains are
periodic; Hamiltonian bond sums run over i = 0..L-1 at every distance,
which is double-count-free only for L > 2*distance (hence L >= 6 for the
next-nearest-neighbor model).

Operators are stored sparsely as the upper triangle (row <= col, each
entry once, real diagonal); matrix-vector products and densification
expand the lower triangle symmetrically.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import SectorBasis, _check_chain_length
from .errors import ParameterError


@dataclass(frozen=True)
class CouplingParams:
    """Model couplings; defaults match the thermal working point."""

    Jz: float = 0.5
    gamma: float = 24.0 / 25.0
    W: float = 0.5
    W_g: float = 0.5
    T0: float = 1.0
    T1: float = 2.5


@dataclass(frozen=True)
class DisorderRealization:
    """One draw of the random longitudinal (and optional transverse) fields."""

    h: np.ndarray
    g: np.ndarray | None = None


def sample_disorder(W: float, L: int, rng: np.random.Generator,
                    W_g: float | None = None) -> DisorderRealization:
    """Uniform i.i.d. fields h_i in [-W, W], plus g_i in [-W_g, W_g] if requested."""
    if W < 0 or (W_g is not None and W_g < 0):
        raise ParameterError("disorder strengths must be nonnegative")
    h = rng.uniform(-W, W, L)
    g = rng.uniform(-W_g, W_g, L) if W_g is not None else None
    return DisorderRealization(h=h, g=g)


class SparseHermitianOperator:
    """Hermitian matrix stored as its upper triangle within one basis.

    rows/cols/vals list each entry once with row <= col; diagonal values
    are real. The implied matrix is Hermitian by construction, which the
    constructor asserts structurally (triangle ordering, real diagonal,
    no duplicate coordinates).
    """

    def __init__(self, dim: int, rows: np.ndarray, cols: np.ndarray, vals: np.ndarray,
                 L: int, basis: SectorBasis | None):
        rows = np.asarray(rows, dtype=np.intp)
        cols = np.asarray(cols, dtype=np.intp)
        vals = np.asarray(vals)
        if np.any(rows > cols):
            raise ParameterError("upper-triangle storage violated: found row > col")
        diagonal = rows == cols
        if np.iscomplexobj(vals) and np.any(vals[diagonal].imag != 0):
            raise ParameterError("diagonal entries must be real")
        flat = rows * dim + cols
        if len(np.unique(flat)) != len(flat):
            raise ParameterError("duplicate (row, col) entries")
        self.dim = dim
        self.rows = rows
        self.cols = cols
        self.vals = vals
        self.L = L
        self.basis = basis
        self._off = rows < cols

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.vals) or bool(np.all(self.vals.imag == 0))

    def to_dense(self) -> np.ndarray:
        dtype = float if self.is_real else complex
        dense = np.zeros((self.dim, self.dim), dtype=dtype)
        vals = self.vals.real if dtype is float else self.vals
        dense[self.rows, self.cols] = vals
        off = self._off
        dense[self.cols[off], self.rows[off]] = np.conj(vals[off])
        return dense

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = np.zeros(self.dim, dtype=np.result_type(self.vals.dtype, v.dtype, float))
        np.add.at(out, self.rows, self.vals * v[self.cols])
        off = self._off
        np.add.at(out, self.cols[off], np.conj(self.vals[off]) * v[self.rows[off]])
        return out

    def norm_bound(self) -> float:
        """Gershgorin upper bound on the spectral norm."""
        row_sums = np.zeros(self.dim)
        np.add.at(row_sums, self.rows, np.abs(self.vals))
        off = self._off
        np.add.at(row_sums, self.cols[off], np.abs(self.vals[off]))
        return float(row_sums.max())


def _basis_arrays(L: int, basis: SectorBasis | None):
    """(states, lookup) where lookup maps a mask to its position, -1 outside."""
    if basis is None:
        states = np.arange(1 << L, dtype=np.int64)
        return states, states
    if basis.L != L:
        raise ParameterError(f"basis built for L={basis.L}, requested L={L}")
    return basis.states, basis.lookup


def _bit_matrix(states: np.ndarray, L: int) -> np.ndarray:
    return ((states[:, None] >> np.arange(L)) & 1).astype(np.int8)


def _exchange_entries(states, lookup, bits, L, distance, amplitude):
    """Upper-triangle hop entries for one interaction distance."""
    rows, cols = [], []
    for i in range(L):
        j = (i + distance) % L
        movable = np.nonzero(bits[:, i] != bits[:, j])[0]
        targets = lookup[states[movable] ^ ((1 << i) | (1 << j))]
        keep = movable < targets
        rows.append(movable[keep])
        cols.append(targets[keep])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    return rows, cols, np.full(len(rows), amplitude)


def _zz_diagonal(bits, L, distance):
    sz = bits.astype(float) - 0.5
    total = np.zeros(len(bits))
    for i in range(L):
        total += sz[:, i] * sz[:, (i + distance) % L]
    return total


def _field_diagonal(bits, h):
    return (bits.astype(float) - 0.5) @ np.asarray(h, dtype=float)


def _assemble(dim, diag, hop_parts, L, basis):
    rows = [np.arange(dim, dtype=np.intp)]
    cols = [np.arange(dim, dtype=np.intp)]
    vals = [diag]
    for r, c, v in hop_parts:
        rows.append(r)
        cols.append(c)
        vals.append(v)
    return SparseHermitianOperator(dim, np.concatenate(rows), np.concatenate(cols),
                                   np.concatenate(vals), L=L, basis=basis)


def build_h_nn(L: int, params: CouplingParams, disorder: DisorderRealization,
               basis: SectorBasis | None = None) -> SparseHermitianOperator:
    """Disordered XXZ chain with nearest-neighbor couplings."""
    _check_chain_length(L)
    states, lookup = _basis_arrays(L, basis)
    bits = _bit_matrix(states, L)
    diag = params.Jz * _zz_diagonal(bits, L, 1) + _field_diagonal(bits, disorder.h)
    hops = [_exchange_entries(states, lookup, bits, L, 1, 0.5)]
    return _assemble(len(states), diag, hops, L, basis)


def build_h_nnn(L: int, params: CouplingParams, disorder: DisorderRealization,
                basis: SectorBasis | None = None) -> SparseHermitianOperator:
    """XXZ chain with an additional gamma-weighted next-nearest-neighbor term.

    The distance-2 sum visits each pair twice at L=4, so L >= 6 is required.
    The random fields enter once, through the nearest-neighbor part.
    """
    _check_chain_length(L)
    if L < 6:
        raise ParameterError("next-nearest-neighbor couplings need L >= 6 on a ring")
    states, lookup = _basis_arrays(L, basis)
    bits = _bit_matrix(states, L)
    diag = (params.Jz * _zz_diagonal(bits, L, 1)
            + params.gamma * params.Jz * _zz_diagonal(bits, L, 2)
            + _field_diagonal(bits, disorder.h))
    hops = [_exchange_entries(states, lookup, bits, L, 1, 0.5),
            _exchange_entries(states, lookup, bits, L, 2, params.gamma * 0.5)]
    return _assemble(len(states), diag, hops, L, basis)


def build_h_mf(L: int, params: CouplingParams, disorder: DisorderRealization,
               basis: SectorBasis | None = None) -> SparseHermitianOperator:
    """Mixed-field chain: XXZ plus a disordered transverse field.

    The transverse term flips single spins, so magnetization is not
    conserved and the operator only exists in the full 2^L basis.
    """
    _check_chain_length(L)
    if basis is not None:
        raise ParameterError("transverse fields leave any fixed-magnetization sector")
    if disorder.g is None:
        raise ParameterError("mixed-field model needs a transverse disorder draw g")
    states, lookup = _basis_arrays(L, None)
    bits = _bit_matrix(states, L)
    diag = params.Jz * _zz_diagonal(bits, L, 1) + _field_diagonal(bits, disorder.h)
    hops = [_exchange_entries(states, lookup, bits, L, 1, 0.5)]
    for i in range(L):
        # S^x flips site i with amplitude g_i/2; row has bit i clear
        low = np.nonzero(bits[:, i] == 0)[0]
        hops.append((low.astype(np.intp), (states[low] | (1 << i)).astype(np.intp),
                     np.full(len(low), disorder.g[i] / 2.0)))
    return _assemble(len(states), diag, hops, L, basis)


def build_floquet_parts(L: int, disorder: DisorderRealization,
                        basis: SectorBasis | None = None
                        ) -> tuple[SparseHermitianOperator, SparseHermitianOperator]:
    """Kicked-chain pieces: diagonal ZZ-plus-fields H0 and pure-hopping H1."""
    _check_chain_length(L)
    states, lookup = _basis_arrays(L, basis)
    bits = _bit_matrix(states, L)
    h0 = _assemble(len(states), _zz_diagonal(bits, L, 1) + _field_diagonal(bits, disorder.h),
                   [], L, basis)
    h1 = _assemble(len(states), np.zeros(len(states)),
                   [_exchange_entries(states, lookup, bits, L, 1, 0.5)], L, basis)
    return h0, h1
