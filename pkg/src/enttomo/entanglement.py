"""Schmidt spectra, von Neumann entropy, mutual information, Haar references.

All entropies are in bits (log base 2). States enter as full-space
amplitude arrays of length 2^L; sector states are embedded first
(see basis.StateVector.to_full_array).
"""
from __future__ import annotations

import numpy as np
from scipy.special import digamma

from .basis import build_sector_basis, popcount
from .errors import ParameterError

# squared Schmidt coefficients below this floor are dropped before the log,
# so numerically negative singular values cannot produce NaN
EIGENVALUE_FLOOR = 1e-12

_LN2 = float(np.log(2.0))


def _subsystem_sites(mask: int, L: int) -> tuple[list[int], list[int]]:
    inside = [i for i in range(L) if (mask >> i) & 1]
    outside = [i for i in range(L) if not (mask >> i) & 1]
    return inside, outside


def _gather_matrix(mask: int, L: int) -> np.ndarray:
    """Index matrix routing subsystem bits to rows: psi[idx] is the 2^n0 x 2^(L-n0) amplitude matrix."""
    inside, outside = _subsystem_sites(mask, L)
    row = np.zeros(1 << len(inside), dtype=np.intp)
    for k, site in enumerate(inside):
        row |= ((np.arange(len(row)) >> k) & 1) << site
    col = np.zeros(1 << len(outside), dtype=np.intp)
    for k, site in enumerate(outside):
        col |= ((np.arange(len(col)) >> k) & 1) << site
    return row[:, None] | col[None, :]


def _check_mask(mask: int, L: int) -> None:
    if not 0 < mask < (1 << L) - 1:
        raise ParameterError(f"mask {mask:#x} leaves an empty subsystem at L={L}")


def schmidt_spectrum(psi: np.ndarray, mask: int, L: int) -> np.ndarray:
    """Nonincreasing squared Schmidt coefficients of the cut given by mask."""
    _check_mask(mask, L)
    matrix = np.asarray(psi, dtype=complex)[_gather_matrix(mask, L)]
    singular = np.linalg.svd(matrix, compute_uv=False)
    return singular ** 2


def entropy_bits(lambdas: np.ndarray) -> float:
    """Von Neumann entropy -sum(lam log2 lam) with the small-eigenvalue floor."""
    lam = np.asarray(lambdas, dtype=float)
    lam = lam[lam > EIGENVALUE_FLOOR]
    return float(-(lam * np.log2(lam)).sum())


def entropy_of_mask(psi: np.ndarray, mask: int, L: int) -> float:
    return entropy_bits(schmidt_spectrum(psi, mask, L))


def _batched_entropies(stack: np.ndarray) -> np.ndarray:
    """Entropies of a (batch, dA, dB) stack of amplitude matrices."""
    try:
        singular = np.linalg.svd(stack, compute_uv=False)
    except np.linalg.LinAlgError:
        # gesdd can fail to converge on rare inputs; fall back per item
        from scipy.linalg import svd as scipy_svd

        singular = np.stack([
            scipy_svd(m, compute_uv=False, lapack_driver="gesvd") for m in stack
        ])
    lam = singular ** 2
    logs = np.where(lam > EIGENVALUE_FLOOR, np.log2(np.maximum(lam, EIGENVALUE_FLOOR)), 0.0)
    return -(np.where(lam > EIGENVALUE_FLOOR, lam, 0.0) * logs).sum(axis=-1)


class MaskEntropyEvaluator:
    """Entropies of one state across a fixed mask list, batched by subsystem size.

    Masks of equal popcount share a matrix shape and go through a single
    batched SVD. Gather indices are precomputed and kept when they fit the
    cache budget (they are the dominant per-call cost for repeated
    evaluation over an ensemble), otherwise rebuilt chunk by chunk.
    """

    def __init__(self, masks, L: int, chunk_bytes: int = 1 << 26,
                 cache_bytes: int = 1 << 27):
        self.L = L
        self.masks = [int(m) for m in masks]
        order: dict[int, list[int]] = {}
        for pos, mask in enumerate(self.masks):
            _check_mask(mask, L)
            order.setdefault(popcount(mask), []).append(pos)
        bytes_per_matrix = 16 * (1 << L)
        chunk = max(1, chunk_bytes // bytes_per_matrix)
        self._blocks: list[list[int]] = []
        for positions in order.values():
            for start in range(0, len(positions), chunk):
                self._blocks.append(positions[start:start + chunk])
        index_bytes = 8 * (1 << L) * len(self.masks)
        self._cached = None
        if index_bytes <= cache_bytes:
            self._cached = [self._index_stack(block) for block in self._blocks]

    def _index_stack(self, block: list[int]) -> np.ndarray:
        return np.stack([_gather_matrix(self.masks[p], self.L) for p in block])

    def __call__(self, psi: np.ndarray) -> np.ndarray:
        psi = np.asarray(psi, dtype=complex)
        out = np.empty(len(self.masks))
        for k, block in enumerate(self._blocks):
            idx = self._cached[k] if self._cached is not None else self._index_stack(block)
            out[block] = _batched_entropies(psi[idx])
        return out


def entropies_for_masks(psi: np.ndarray, masks, L: int,
                        chunk_bytes: int = 1 << 26) -> np.ndarray:
    """One-shot evaluation across many cuts; see MaskEntropyEvaluator."""
    return MaskEntropyEvaluator(masks, L, chunk_bytes=chunk_bytes, cache_bytes=0)(psi)


def mutual_information(psi: np.ndarray, j: int, L: int) -> float:
    """Two-point mutual information I_j = S({0}) + S({j}) - S({0, j})."""
    if not 1 <= j <= L // 2:
        raise ParameterError(f"separation j must lie in [1, L/2], got {j}")
    s = entropies_for_masks(psi, [1, 1 << j, 1 | (1 << j)], L)
    return float(s[0] + s[1] - s[2])


def page_entropy_bits(dim_a: int, dim_b: int) -> float:
    """Mean entanglement entropy of a Haar-random pure state, in bits."""
    if dim_a < 1 or dim_b < 1:
        raise ParameterError("subsystem dimensions must be positive")
    if dim_a > dim_b:
        dim_a, dim_b = dim_b, dim_a
    harmonic_tail = digamma(dim_a * dim_b + 1) - digamma(dim_b + 1)
    return float((harmonic_tail - (dim_a - 1) / (2.0 * dim_b)) / _LN2)


def haar_sector_entropy_mc(L: int, n_up: int | None, mask: int, n_samples: int,
                           rng: np.random.Generator, batch: int = 256) -> tuple[float, float]:
    """Monte Carlo mean and stderr of the cut entropy of Haar-random states.

    n_up selects a fixed-magnetization sector (amplitudes i.i.d. complex
    Gaussian over the sector, normalized, embedded); None means the full
    2^L space.
    """
    if n_samples < 100:
        raise ParameterError(f"need at least 100 samples for a stable stderr, got {n_samples}")
    _check_mask(mask, L)
    if n_up is None:
        support = np.arange(1 << L)
    else:
        support = build_sector_basis(L, n_up).states
    idx = _gather_matrix(mask, L)
    values = np.empty(n_samples)
    done = 0
    while done < n_samples:
        count = min(batch, n_samples - done)
        amp = rng.standard_normal((count, len(support))) + 1j * rng.standard_normal((count, len(support)))
        amp /= np.linalg.norm(amp, axis=1, keepdims=True)
        full = np.zeros((count, 1 << L), dtype=complex)
        full[:, support] = amp
        values[done:done + count] = _batched_entropies(full[:, idx])
        done += count
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / np.sqrt(n_samples))
    return mean, stderr
