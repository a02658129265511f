"""Hamiltonian builders against dense matrix oracles and hand values."""
import numpy as np
import pytest

from enttomo.basis import build_sector_basis
from enttomo.errors import ParameterError
from enttomo.operators import (
    CouplingParams,
    DisorderRealization,
    SparseHermitianOperator,
    build_floquet_parts,
    build_h_mf,
    build_h_nn,
    build_h_nnn,
    sample_disorder,
)


def zero_disorder(L: int, with_g: bool = False) -> DisorderRealization:
    return DisorderRealization(h=np.zeros(L), g=np.zeros(L) if with_g else None)


def random_disorder(L: int, seed: int, with_g: bool = False) -> DisorderRealization:
    rng = np.random.default_rng(seed)
    return sample_disorder(5.0, L, rng, W_g=0.5 if with_g else None)


def total_sz_diagonal(L: int) -> np.ndarray:
    masks = np.arange(1 << L)
    bits = (masks[:, None] >> np.arange(L)) & 1
    return bits.sum(axis=1) - L / 2.0


def test_coupling_defaults():
    p = CouplingParams()
    assert p.Jz == 0.5
    assert p.gamma == pytest.approx(24.0 / 25.0)
    assert p.W == 0.5 and p.W_g == 0.5
    assert p.T0 == 1.0 and p.T1 == 2.5


def test_sample_disorder_bounds_and_moments():
    rng = np.random.default_rng(41)
    n = 20000
    hs = np.concatenate([sample_disorder(5.0, 10, rng).h for _ in range(n // 10)])
    assert np.all(np.abs(hs) <= 5.0)
    assert abs(hs.mean()) < 3 * 5.0 / np.sqrt(3 * n)
    assert hs.var() == pytest.approx(25.0 / 3.0, rel=0.05)
    d = sample_disorder(0.0, 8, rng, W_g=0.5)
    assert np.all(d.h == 0)
    assert d.g is not None and np.all(np.abs(d.g) <= 0.5)
    assert sample_disorder(1.0, 8, rng).g is None
    with pytest.raises(ParameterError):
        sample_disorder(-1.0, 8, rng)


def test_sparse_constructor_invariants():
    with pytest.raises(ParameterError):
        SparseHermitianOperator(4, [2], [1], [1.0], L=2, basis=None)
    with pytest.raises(ParameterError):
        SparseHermitianOperator(4, [1], [1], [1.0 + 1j], L=2, basis=None)
    with pytest.raises(ParameterError):
        SparseHermitianOperator(4, [0, 0], [1, 1], [1.0, 2.0], L=2, basis=None)


def test_sparse_dense_matvec_and_norm_bound():
    rng = np.random.default_rng(42)
    ops = [
        build_h_nn(6, CouplingParams(), random_disorder(6, 1)),
        build_h_nnn(8, CouplingParams(), random_disorder(8, 2)),
        build_h_mf(6, CouplingParams(), random_disorder(6, 3, with_g=True)),
        build_h_nn(8, CouplingParams(), random_disorder(8, 4), build_sector_basis(8, 4)),
    ]
    for op in ops:
        dense = op.to_dense()
        np.testing.assert_allclose(dense, dense.conj().T, atol=1e-14)
        v = rng.standard_normal(op.dim) + 1j * rng.standard_normal(op.dim)
        np.testing.assert_allclose(op.matvec(v), dense @ v, atol=1e-12)
        top = np.abs(np.linalg.eigvalsh(dense)).max()
        assert op.norm_bound() >= top - 1e-12


def test_nn_all_up_diagonal_and_fields():
    # aligned ZZ on every bond: L bonds x Jz/4; fields add sum(h)/2
    L = 4
    op = build_h_nn(L, CouplingParams(Jz=0.5), zero_disorder(L))
    dense = op.to_dense()
    all_up = (1 << L) - 1
    assert dense[all_up, all_up] == pytest.approx(0.5)
    h = np.array([0.3, -0.1, 0.7, 0.2])
    op_h = build_h_nn(L, CouplingParams(Jz=0.5), DisorderRealization(h=h))
    assert op_h.to_dense()[all_up, all_up] == pytest.approx(0.5 + h.sum() / 2)
    assert op_h.to_dense()[0, 0] == pytest.approx(0.5 - h.sum() / 2)


def test_nn_hop_matrix_element():
    # exchange between neighboring up/down: amplitude 1/2
    op = build_h_nn(4, CouplingParams(), zero_disorder(4))
    dense = op.to_dense()
    assert dense[0b0101, 0b0110] == pytest.approx(0.5)
    assert dense[0b0101, 0b1001] == pytest.approx(0.5)
    # distance-2 exchange absent in the nearest-neighbor model
    assert dense[0b0001, 0b0100] == 0.0


def test_nn_conserves_magnetization():
    L = 6
    op = build_h_nn(L, CouplingParams(), random_disorder(L, 5))
    dense = op.to_dense()
    sz = total_sz_diagonal(L)
    comm = dense * (sz[None, :] - sz[:, None])
    assert np.abs(comm).max() == 0.0


def test_sector_block_equals_full_restriction():
    L = 6
    params = CouplingParams()
    disorder = random_disorder(L, 6)
    basis = build_sector_basis(L, 3)
    for builder in (build_h_nn, build_h_nnn):
        full = builder(L, params, disorder).to_dense()
        block = builder(L, params, disorder, basis).to_dense()
        np.testing.assert_allclose(block, full[np.ix_(basis.states, basis.states)],
                                   atol=1e-14)


def test_nnn_reduces_to_nn_at_zero_gamma():
    L = 6
    disorder = random_disorder(L, 7)
    a = build_h_nnn(L, CouplingParams(gamma=0.0), disorder).to_dense()
    b = build_h_nn(L, CouplingParams(gamma=0.0), disorder).to_dense()
    np.testing.assert_allclose(a, b, atol=1e-15)


def test_nnn_all_up_diagonal_and_length_floor():
    L, gamma = 6, 24.0 / 25.0
    op = build_h_nnn(L, CouplingParams(Jz=0.5, gamma=gamma), zero_disorder(L))
    all_up = (1 << L) - 1
    assert op.to_dense()[all_up, all_up] == pytest.approx(0.5 * (L / 4) * (1 + gamma))
    dense = op.to_dense()
    # distance-2 exchange now present with amplitude gamma/2
    assert dense[0b000101, 0b000110] == pytest.approx(0.5)
    assert dense[0b001001, 0b000011] == pytest.approx(gamma / 2)
    with pytest.raises(ParameterError):
        build_h_nnn(4, CouplingParams(), zero_disorder(4))


def test_mixed_field_limits_and_structure():
    L = 6
    disorder = random_disorder(L, 8, with_g=True)
    no_g = DisorderRealization(h=disorder.h, g=np.zeros(L))
    np.testing.assert_allclose(
        build_h_mf(L, CouplingParams(), no_g).to_dense(),
        build_h_nn(L, CouplingParams(), DisorderRealization(h=disorder.h)).to_dense(),
        atol=1e-15)
    with pytest.raises(ParameterError):
        build_h_mf(L, CouplingParams(), disorder, build_sector_basis(L, 3))
    with pytest.raises(ParameterError):
        build_h_mf(L, CouplingParams(), DisorderRealization(h=disorder.h))


def test_mixed_field_spin_flip_elements_break_conservation():
    L = 4
    g = np.array([0.4, -0.2, 0.1, 0.3])
    disorder = DisorderRealization(h=np.zeros(L), g=g)
    dense = build_h_mf(L, CouplingParams(), disorder).to_dense()
    # <mask with bit i set| H |mask with bit i clear> = g_i / 2
    assert dense[0b0000, 0b0001] == pytest.approx(g[0] / 2)
    assert dense[0b0101, 0b1101] == pytest.approx(g[3] / 2)
    sz = total_sz_diagonal(L)
    comm = dense * (sz[None, :] - sz[:, None])
    assert np.abs(comm).max() > 0.01


def test_floquet_parts_structure():
    L = 6
    disorder = random_disorder(L, 9)
    h0, h1 = build_floquet_parts(L, disorder)
    assert np.all(h0.rows == h0.cols)
    d1 = h1.to_dense()
    assert np.all(np.diag(d1) == 0)
    # H0 carries no Jz factor: aligned all-up diagonal is L/4 plus fields
    all_up = (1 << L) - 1
    assert h0.to_dense()[all_up, all_up] == pytest.approx(L / 4 + disorder.h.sum() / 2)
    # H1 is the bare hopping of the nearest-neighbor model
    nn = build_h_nn(L, CouplingParams(Jz=0.0), zero_disorder(L)).to_dense()
    np.testing.assert_allclose(d1, nn, atol=1e-15)
    # both conserve magnetization; the sector blocks agree with restrictions
    basis = build_sector_basis(L, 3)
    b0, b1 = build_floquet_parts(L, disorder, basis)
    np.testing.assert_allclose(b0.to_dense(),
                               h0.to_dense()[np.ix_(basis.states, basis.states)],
                               atol=1e-15)
    np.testing.assert_allclose(b1.to_dense(),
                               d1[np.ix_(basis.states, basis.states)], atol=1e-15)
