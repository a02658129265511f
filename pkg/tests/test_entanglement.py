"""Entanglement entropy kernels against dense density-matrix oracles."""
import numpy as np
import pytest
from scipy.special import digamma

from enttomo.basis import popcount, sample_random_product_state
from enttomo.entanglement import (
    EIGENVALUE_FLOOR,
    MaskEntropyEvaluator,
    entropies_for_masks,
    entropy_bits,
    entropy_of_mask,
    haar_sector_entropy_mc,
    mutual_information,
    page_entropy_bits,
    schmidt_spectrum,
)
from enttomo.errors import ParameterError


def dense_entropy_bits(psi: np.ndarray, mask: int, L: int) -> float:
    """Oracle: reduced density matrix by tensor transpose, then eigvalsh.

    Axis k of psi.reshape((2,)*L) is site L-1-k, independent of the
    index-gather used by the production path.
    """
    inside = [L - 1 - s for s in range(L) if (mask >> s) & 1]
    outside = [L - 1 - s for s in range(L) if not (mask >> s) & 1]
    matrix = psi.reshape((2,) * L).transpose(inside + outside)
    matrix = matrix.reshape(1 << len(inside), 1 << len(outside))
    rho = matrix @ matrix.conj().T
    lam = np.linalg.eigvalsh(rho)
    lam = lam[lam > EIGENVALUE_FLOOR]
    return float(-(lam * np.log2(lam)).sum())


def random_state(L: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.standard_normal(1 << L) + 1j * rng.standard_normal(1 << L)
    return psi / np.linalg.norm(psi)


def bell_pair_state(L: int, i: int, j: int) -> np.ndarray:
    """(|up_i down_j> + |down_i up_j>)/sqrt(2), all other sites down."""
    psi = np.zeros(1 << L, dtype=complex)
    psi[1 << i] = psi[1 << j] = 1.0 / np.sqrt(2.0)
    return psi


def test_entropy_bits_hand_values():
    assert entropy_bits(np.array([1.0])) == 0.0
    assert entropy_bits(np.array([0.5, 0.5])) == pytest.approx(1.0)
    assert entropy_bits(np.array([0.25] * 4)) == pytest.approx(2.0)
    # floored eigenvalues are silently dropped instead of producing NaN
    assert entropy_bits(np.array([1.0, 1e-18, -1e-15])) == 0.0


def test_product_state_has_zero_entropy_everywhere():
    rng = np.random.default_rng(21)
    psi = sample_random_product_state(6, rng).amplitudes
    for mask in range(1, (1 << 6) - 1):
        assert entropy_of_mask(psi, mask, 6) < 1e-10


def test_bell_pair_entropies():
    psi = bell_pair_state(4, 0, 1)
    assert entropy_of_mask(psi, 0b0001, 4) == pytest.approx(1.0)
    assert entropy_of_mask(psi, 0b0011, 4) == pytest.approx(0.0, abs=1e-12)
    assert entropy_of_mask(psi, 0b0101, 4) == pytest.approx(1.0)


def test_maximally_entangled_two_site_cut():
    # sum_a |a>_{01} |a>_{23} / 2 carries exactly two bits across the cut
    psi = np.zeros(16, dtype=complex)
    for a in range(4):
        psi[a | (a << 2)] = 0.5
    assert entropy_of_mask(psi, 0b0011, 4) == pytest.approx(2.0)


def test_schmidt_spectrum_properties():
    rng = np.random.default_rng(22)
    psi = random_state(6, rng)
    lam = schmidt_spectrum(psi, 0b000111, 6)
    assert np.all(np.diff(lam) <= 1e-12)
    assert lam.sum() == pytest.approx(1.0)
    assert lam.shape == (8,)


def test_svd_path_matches_dense_partial_trace():
    rng = np.random.default_rng(23)
    L = 6
    for _ in range(20):
        psi = random_state(L, rng)
        for mask in range(1, (1 << L) - 1):
            assert entropy_of_mask(psi, mask, L) == pytest.approx(
                dense_entropy_bits(psi, mask, L), abs=1e-10)


def test_entropy_symmetric_under_complement():
    rng = np.random.default_rng(24)
    L = 8
    psi = random_state(L, rng)
    full = (1 << L) - 1
    masks = list(range(1, full))
    ent = entropies_for_masks(psi, masks, L)
    for m, s in zip(masks, ent):
        assert s == pytest.approx(ent[(m ^ full) - 1], abs=1e-10)


def test_entropy_bounded_by_subsystem_size():
    rng = np.random.default_rng(25)
    L = 8
    psi = random_state(L, rng)
    for mask in (0b1, 0b11, 0b10101, 0b1111):
        n = popcount(mask)
        s = entropy_of_mask(psi, mask, L)
        assert -1e-12 <= s <= min(n, L - n) + 1e-12


def test_trivial_masks_rejected():
    psi = np.zeros(16, dtype=complex)
    psi[0] = 1.0
    for mask in (0, 0b1111):
        with pytest.raises(ParameterError):
            entropy_of_mask(psi, mask, 4)
        with pytest.raises(ParameterError):
            schmidt_spectrum(psi, mask, 4)


def test_batched_evaluator_matches_single_mask_path():
    rng = np.random.default_rng(26)
    L = 8
    psi = random_state(L, rng)
    masks = [0b1, 0b11, 0b101, 0b1111, 0b10111, 0b1010101, 37, 91]
    expected = np.array([entropy_of_mask(psi, m, L) for m in masks])
    np.testing.assert_allclose(entropies_for_masks(psi, masks, L), expected, atol=1e-12)
    cached = MaskEntropyEvaluator(masks, L)
    np.testing.assert_allclose(cached(psi), expected, atol=1e-12)
    uncached = MaskEntropyEvaluator(masks, L, cache_bytes=0)
    np.testing.assert_allclose(uncached(psi), expected, atol=1e-12)
    # tiny chunk budget forces many blocks without changing values
    chunked = MaskEntropyEvaluator(masks, L, chunk_bytes=1)
    np.testing.assert_allclose(chunked(psi), expected, atol=1e-12)


def test_mutual_information_product_and_bell():
    rng = np.random.default_rng(27)
    psi = sample_random_product_state(8, rng).amplitudes
    for j in range(1, 5):
        assert abs(mutual_information(psi, j, 8)) < 1e-10
    for j in (1, 2, 3):
        bell = bell_pair_state(6, 0, j)
        assert mutual_information(bell, j, 6) == pytest.approx(2.0)


def test_mutual_information_nonnegative_and_range_checked():
    rng = np.random.default_rng(28)
    psi = random_state(8, rng)
    for j in range(1, 5):
        assert mutual_information(psi, j, 8) >= -1e-9
    for j in (0, 5, -1):
        with pytest.raises(ParameterError):
            mutual_information(psi, j, 8)


def test_page_entropy_closed_forms():
    assert page_entropy_bits(1, 64) == 0.0
    # dims (2, 2): 1/3 nats
    assert page_entropy_bits(2, 2) == pytest.approx((1.0 / 3.0) / np.log(2.0))
    assert page_entropy_bits(2, 8) == page_entropy_bits(8, 2)
    # harmonic-sum form for small dims
    m, n = 4, 8
    harmonic = sum(1.0 / k for k in range(n + 1, m * n + 1))
    expected = (harmonic - (m - 1) / (2.0 * n)) / np.log(2.0)
    assert page_entropy_bits(m, n) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ParameterError):
        page_entropy_bits(0, 4)


def test_haar_full_space_matches_page_mean():
    rng = np.random.default_rng(29)
    mean, stderr = haar_sector_entropy_mc(6, None, 0b000111, 3000, rng)
    assert stderr > 0
    assert abs(mean - page_entropy_bits(8, 8)) < 3 * stderr


def test_haar_sector_single_site_analytic():
    # (L=4, n_up=1), one-site cut: p_up ~ Beta(1, 3), mean entropy
    # <-p log p - (1-p) log(1-p)> = [psi(5)-psi(2)]/4 + 3[psi(5)-psi(4)]/4 nats
    rng = np.random.default_rng(30)
    expected = (
        (digamma(5) - digamma(2)) / 4.0 + 3.0 * (digamma(5) - digamma(4)) / 4.0
    ) / np.log(2.0)
    mean, stderr = haar_sector_entropy_mc(4, 1, 0b0001, 4000, rng)
    assert abs(mean - expected) < 3.5 * stderr


def test_haar_sector_mean_depends_only_on_subsystem_size():
    rng = np.random.default_rng(31)
    m1, s1 = haar_sector_entropy_mc(6, 3, 0b000011, 2000, rng)
    m2, s2 = haar_sector_entropy_mc(6, 3, 0b010010, 2000, rng)
    assert abs(m1 - m2) < 3 * np.hypot(s1, s2)


def test_haar_stderr_scaling_and_minimum_samples():
    rng = np.random.default_rng(32)
    _, s_small = haar_sector_entropy_mc(6, 3, 0b000111, 400, rng)
    _, s_big = haar_sector_entropy_mc(6, 3, 0b000111, 6400, rng)
    assert 2.0 < s_small / s_big < 8.0
    with pytest.raises(ParameterError):
        haar_sector_entropy_mc(6, 3, 0b000111, 99, rng)
