import math

import mpmath as mp
import numpy as np
import pytest

from twirlsim import (
    CompoundPoisson,
    Dirac,
    DistributionError,
    FiniteMixture,
    Gaussian,
    LevyTriplet,
    TruncatedGaussian,
    char_minus,
    levy_psi,
    mean_abs,
    sample_law,
    scale_triplet,
)

rng = np.random.default_rng(12)

mp.mp.dps = 30


def quad_char(density, lo, hi, omega):
    """Independent characteristic-function oracle by high-precision quadrature."""
    num = mp.quad(lambda s: density(s) * mp.e ** (-1j * omega * s), [lo, 0, hi])
    den = mp.quad(density, [lo, 0, hi])
    return complex(num / den)


def test_gaussian_char_closed_form_and_quadrature():
    dist = Gaussian(variance=1.0)
    assert abs(char_minus(dist, 2.0) - math.exp(-2.0)) < 1e-15
    oracle = quad_char(lambda s: mp.e ** (-s ** 2 / 2), -40, 40, 1.3)
    assert abs(char_minus(dist, 1.3) - oracle) < 1e-12


def test_dirac_and_mixture_char():
    assert abs(char_minus(Dirac(0.7), 2.0) - np.exp(-1.4j)) < 1e-15
    mix = FiniteMixture(atoms=((1.0, 0.5), (-1.0, 0.5)))
    # symmetric two-atom law has a cosine characteristic function
    for w in (0.0, 0.5, 2.0):
        assert abs(char_minus(mix, w) - math.cos(w)) < 1e-15


def test_compound_poisson_char_frozen_value():
    # base N(0, 1), rate 1, gap 2: exp(exp(-2) - 1) = 0.42119274782353533
    dist = CompoundPoisson(rate=1.0, base=Gaussian(variance=1.0))
    value = char_minus(dist, 2.0)
    assert abs(value - math.exp(math.exp(-2.0) - 1.0)) < 1e-15
    assert abs(value - 0.42119274782353533) < 1e-15


def test_truncated_gaussian_char_against_quadrature_oracle():
    t, s_cut = 1.0, math.sqrt(2.0 * math.log(400.0))
    dist = TruncatedGaussian(variance=t, cutoff=s_cut)
    for w in (0.0, 0.5, 2.0, 3.0):
        oracle = quad_char(lambda s: mp.e ** (-s ** 2 / (2 * t)), -s_cut, s_cut, w)
        assert abs(char_minus(dist, w) - oracle) < 1e-12
    # char(0) is exactly 1 because numerator and denominator share nodes
    assert char_minus(dist, 0.0) == 1.0


def test_char_minus_vectorized_and_conjugate_symmetric():
    gaps = np.array([[0.0, -2.0], [2.0, 0.0]])
    for dist in (Gaussian(0.7), Dirac(1.2), FiniteMixture(atoms=((0.5, 0.3), (-1.0, 0.7))),
                 TruncatedGaussian(1.0, 2.5), CompoundPoisson(2.0, Dirac(0.4)),
                 LevyTriplet(0.3, -0.2, atoms=((1.5, 0.8),), compensated=True)):
        m = char_minus(dist, gaps)
        assert m.shape == (2, 2)
        assert np.abs(m - m.conj().T).max() < 1e-12
        assert np.abs(np.diag(m) - 1.0).max() < 1e-12
        scalar = char_minus(dist, 2.0)
        assert abs(m[1, 0] - scalar) < 1e-15


def test_levy_psi_drift_and_zero():
    trip = LevyTriplet(sigma2=0.0, gamma=1.0, atoms=())
    for w in (-2.0, 0.3, 1.0):
        assert abs(levy_psi(trip, w) - (-1j * w)) < 1e-15
    assert levy_psi(trip, 0.0) == 0.0


def test_levy_psi_single_atom_uncompensated():
    trip = LevyTriplet(sigma2=0.0, gamma=0.0, atoms=((2.0, 1.0),))
    expected = np.exp(-2.0j) - 1.0
    assert abs(levy_psi(trip, 1.0) - expected) < 1e-15
    # matches the compound Poisson characteristic function with Dirac base
    cp = CompoundPoisson(rate=1.0, base=Dirac(2.0))
    for w in (0.5, 1.0, 3.0):
        assert abs(np.exp(levy_psi(trip, w)) - char_minus(cp, w)) < 1e-14


def test_levy_psi_nonpositive_real_part():
    for _ in range(20):
        trip = LevyTriplet(
            sigma2=float(rng.uniform(0, 2)),
            gamma=float(rng.uniform(-2, 2)),
            atoms=((float(rng.uniform(0.1, 3)), float(rng.uniform(0.1, 2))),
                   (float(-rng.uniform(0.1, 3)), float(rng.uniform(0.1, 2)))),
            compensated=bool(rng.random() < 0.5),
        )
        w = rng.uniform(-5, 5, size=7)
        psi = levy_psi(trip, w)
        assert np.all(psi.real <= 1e-15)
        assert abs(levy_psi(trip, 0.0)) == 0.0


def test_levy_compensated_small_jump_term():
    trip = LevyTriplet(sigma2=0.0, gamma=0.0, atoms=((0.5, 2.0),), compensated=True)
    w = 1.7
    expected = 2.0 * (np.exp(-1j * w * 0.5) - 1.0 + 1j * w * 0.5)
    assert abs(levy_psi(trip, w) - expected) < 1e-15
    # a large jump is never compensated
    trip_big = LevyTriplet(sigma2=0.0, gamma=0.0, atoms=((1.5, 2.0),), compensated=True)
    expected_big = 2.0 * (np.exp(-1j * w * 1.5) - 1.0)
    assert abs(levy_psi(trip_big, w) - expected_big) < 1e-15


def test_scale_triplet_scales_exponent_linearly():
    trip = LevyTriplet(sigma2=0.4, gamma=-0.3, atoms=((1.2, 0.5),), compensated=True)
    w = np.linspace(-3, 3, 11)
    direct = 2.5 * levy_psi(trip, w)
    scaled = levy_psi(scale_triplet(trip, 2.5), w)
    assert np.abs(direct - scaled).max() < 1e-14


def test_validation_errors():
    with pytest.raises(DistributionError):
        Gaussian(variance=-0.1)
    with pytest.raises(DistributionError):
        TruncatedGaussian(variance=1.0, cutoff=0.0)
    with pytest.raises(DistributionError):
        FiniteMixture(atoms=((1.0, 0.4), (2.0, 0.4)))  # sums to 0.8
    with pytest.raises(DistributionError):
        FiniteMixture(atoms=())
    with pytest.raises(DistributionError):
        CompoundPoisson(rate=1.0, base=Dirac(0.0))
    with pytest.raises(DistributionError):
        CompoundPoisson(rate=1.0, base=FiniteMixture(atoms=((0.0, 0.5), (1.0, 0.5))))
    with pytest.raises(DistributionError):
        CompoundPoisson(rate=1.0, base=Gaussian(variance=0.0))
    with pytest.raises(DistributionError):
        CompoundPoisson(rate=-1.0, base=Dirac(1.0))
    with pytest.raises(DistributionError):
        LevyTriplet(sigma2=-1.0, gamma=0.0)
    with pytest.raises(DistributionError):
        LevyTriplet(sigma2=0.0, gamma=0.0, atoms=((0.0, 1.0),))
    with pytest.raises(DistributionError):
        LevyTriplet(sigma2=0.0, gamma=0.0, atoms=((1.0, -1.0),))


def test_sample_law_moments():
    g = np.random.default_rng(3)
    xs = sample_law(Gaussian(variance=4.0), g, size=200_000)
    assert abs(xs.mean()) < 0.02
    assert abs(xs.var() - 4.0) < 0.05
    assert sample_law(Dirac(1.5), g) == 1.5
    mix = FiniteMixture(atoms=((2.0, 0.25), (-1.0, 0.75)))
    ys = sample_law(mix, g, size=200_000)
    assert abs(ys.mean() - (2.0 * 0.25 - 1.0 * 0.75)) < 0.01
    assert set(np.unique(ys)) == {2.0, -1.0}


def test_mean_abs():
    assert abs(mean_abs(Gaussian(variance=1.0)) - math.sqrt(2.0 / math.pi)) < 1e-15
    assert mean_abs(Dirac(-2.5)) == 2.5
    assert abs(mean_abs(FiniteMixture(atoms=((2.0, 0.25), (-1.0, 0.75)))) - 1.25) < 1e-15
