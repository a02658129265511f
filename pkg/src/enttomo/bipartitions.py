"""Bipartition geometry on the periodic chain.

A bipartition is the subset A of sites given by an L-bit mask. Its
crossed-bond vector (n_1, ..., n_{L/2}) counts, for each ring distance j,
the unordered site pairs with exactly one endpoint in A. Masks related by
rotation, reflection, or (at half size) complementation carry identical
entropy statistics, so enumeration reduces to one canonical representative
per symmetry orbit.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .basis import popcount
from .errors import ParameterError


def rotate_mask(mask: int, k: int, L: int) -> int:
    """Cyclic left shift of the site labels by k."""
    k %= L
    full = (1 << L) - 1
    return ((mask << k) | (mask >> (L - k))) & full


def reflect_mask(mask: int, L: int) -> int:
    """Mirror the chain: site i -> L-1-i."""
    out = 0
    for i in range(L):
        if (mask >> i) & 1:
            out |= 1 << (L - 1 - i)
    return out


def canonicalize(mask: int, L: int) -> int:
    """Smallest mask over the dihedral orbit, and over complementation at half size."""
    full = (1 << L) - 1
    if not 0 <= mask <= full:
        raise ParameterError(f"mask {mask:#x} out of range for L={L}")
    seeds = [mask, reflect_mask(mask, L)]
    if 2 * popcount(mask) == L:
        comp = mask ^ full
        seeds += [comp, reflect_mask(comp, L)]
    best = full
    for seed in seeds:
        for k in range(L):
            rotated = rotate_mask(seed, k, L)
            if rotated < best:
                best = rotated
    return best


def crossed_bond_vector(mask: int, L: int) -> tuple[int, ...]:
    """Counts of boundary-crossing pairs per ring distance j = 1..L/2.

    Antipodal pairs (distance L/2) exist once each, so that the total obeys
    sum_j n_j = n0 (L - n0).
    """
    counts = []
    for j in range(1, L // 2 + 1):
        origins = range(L) if j < L // 2 else range(L // 2)
        counts.append(sum(((mask >> i) & 1) ^ ((mask >> ((i + j) % L)) & 1) for i in origins))
    return tuple(counts)


@dataclass(frozen=True)
class RepresentativeSet:
    """Canonical bipartitions of one (L, n0) slice with their geometry."""

    L: int
    n0: int
    reps: tuple[int, ...]
    geometry: np.ndarray           # shape (len(reps), L/2), row i belongs to reps[i]
    orbits: tuple[np.ndarray, ...]  # all masks equivalent to each representative

    def __len__(self) -> int:
        return len(self.reps)

    @property
    def n_unique_geometries(self) -> int:
        return len({tuple(row) for row in self.geometry})


def enumerate_representatives(L: int, n0: int) -> RepresentativeSet:
    """One canonical representative per symmetry orbit of size-n0 subsets."""
    if not 1 <= n0 <= L // 2:
        raise ParameterError(f"n0 must lie in [1, L/2], got n0={n0} at L={L}")
    orbits: dict[int, list[int]] = {}
    for combo in itertools.combinations(range(L), n0):
        mask = 0
        for i in combo:
            mask |= 1 << i
        orbits.setdefault(canonicalize(mask, L), []).append(mask)
    # complement-extended orbits at n0 = L/2 keep only the size-n0 members,
    # which still visit every mask of the slice exactly once
    reps = tuple(sorted(orbits))
    geometry = np.array([crossed_bond_vector(r, L) for r in reps], dtype=np.int64)
    orbit_arrays = tuple(np.array(sorted(orbits[r]), dtype=np.int64) for r in reps)
    return RepresentativeSet(L=L, n0=n0, reps=reps, geometry=geometry, orbits=orbit_arrays)


def geometry_degeneracy(rep_set: RepresentativeSet) -> int:
    """Largest number of representatives sharing one crossed-bond vector."""
    seen: dict[tuple[int, ...], int] = {}
    for row in rep_set.geometry:
        key = tuple(int(x) for x in row)
        seen[key] = seen.get(key, 0) + 1
    return max(seen.values())


def representative_table(L: int, n0_values: list[int] | None = None):
    """(n0, N, M, max degeneracy) rows for a chain, as plain tuples."""
    rows = []
    for n0 in n0_values or range(1, L // 2 + 1):
        rep_set = enumerate_representatives(L, n0)
        rows.append((n0, len(rep_set), rep_set.n_unique_geometries, geometry_degeneracy(rep_set)))
    return rows
