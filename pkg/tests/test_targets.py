import numpy as np
import pytest
from hypothesis import given, strategies as st

from debroglie.core import make_grid
from debroglie.errors import ConfigurationError, DegenerateError
from debroglie.targets import (LithoPattern, TargetState, double_hump_pattern, load_profile,
                               make_double_gaussian, make_from_samples, make_gaussian_target,
                               momentum_representation, pixelate, shipped_pattern_path)


@pytest.fixture
def grid():
    return make_grid(1024.0, 4096)


def test_gaussian_norm(grid):
    t = make_gaussian_target(grid, sigma_z=4.0)
    assert t.norm == pytest.approx(1.0, abs=1e-10)


def test_gaussian_density_std(grid):
    t = make_gaussian_target(grid, z0=3.0, sigma_z=4.0)
    d = np.abs(t.amplitude)**2 * grid.dz
    mean = np.sum(grid.z * d)
    assert mean == pytest.approx(3.0, abs=1e-10)
    assert np.sqrt(np.sum((grid.z - mean)**2 * d)) == pytest.approx(4.0, rel=1e-10)


def test_gaussian_fourier_pair(grid):
    # phi(z) = (2 pi s^2)^(-1/4) exp(-z^2/4s^2)  <->
    # phi(p) = (2 pi sp^2)^(-1/4) exp(-p^2/4sp^2), sp = hbar / (2 s)   (unitary)
    s = 4.0
    sp = grid.hbar / (2 * s)
    phi = momentum_representation(make_gaussian_target(grid, sigma_z=s), grid)
    ref = (2 * np.pi * sp**2) ** -0.25 * np.exp(-grid.p**2 / (4 * sp**2))
    np.testing.assert_allclose(phi, ref, atol=1e-12)


def test_spike_has_flat_momentum_content():
    g = make_grid(64.0, 256)
    amp = np.zeros(256)
    amp[128] = 1.0
    phi = np.abs(momentum_representation(TargetState(g, amp)))
    central = np.abs(g.p) <= g.p_max / 2
    assert np.ptp(phi[central]) <= 0.01 * phi[central].mean()


def test_parseval(grid):
    t = make_double_gaussian(grid, p_c=0.7, relative_phase=1.0)
    phi = momentum_representation(t)
    assert np.sum(np.abs(phi)**2) * grid.dp == pytest.approx(1.0, abs=1e-10)


def test_double_gaussian_maxima(grid):
    t = make_double_gaussian(grid, separation=16.0, sigma_z=2.0)
    d = np.abs(t.amplitude)**2
    left = grid.z[np.argmax(np.where(grid.z < 0, d, 0))]
    right = grid.z[np.argmax(np.where(grid.z > 0, d, 0))]
    assert abs(left + 8.0) <= grid.dz
    assert abs(right - 8.0) <= grid.dz


def test_boost_translates_momentum_on_lattice():
    g = make_grid(128.0, 512)
    k = 7
    plain = np.abs(momentum_representation(make_gaussian_target(g, sigma_z=3.0)))
    boosted = np.abs(momentum_representation(make_gaussian_target(g, sigma_z=3.0, p_c=k * g.dp)))
    np.testing.assert_allclose(boosted, np.roll(plain, k), atol=1e-13)


@given(st.integers(0, 2**32 - 1))
def test_momentum_round_trip(seed):
    g = make_grid(32.0, 128)
    rng = np.random.default_rng(seed)
    t = TargetState(g, rng.normal(size=128) + 1j * rng.normal(size=128))
    back = g.to_position(momentum_representation(t))
    assert np.linalg.norm(back - t.amplitude) <= 1e-12 * np.linalg.norm(t.amplitude)


def test_off_lattice_amplitude_agrees_with_lattice(grid):
    t = make_gaussian_target(grid, z0=-5.0, sigma_z=4.0, p_c=0.4)
    lattice = momentum_representation(t)
    idx = np.argsort(np.abs(lattice))[-20:]
    np.testing.assert_allclose(t(grid.p[idx]), lattice[idx], atol=1e-12)


def test_zero_target_is_degenerate(grid):
    with pytest.raises(DegenerateError):
        TargetState(grid, np.zeros(grid.num_points))


def test_target_shape_check(grid):
    with pytest.raises(ConfigurationError):
        TargetState(grid, np.ones(10))


def test_bad_widths(grid):
    with pytest.raises(ConfigurationError):
        make_gaussian_target(grid, sigma_z=0.0)
    with pytest.raises(ConfigurationError):
        make_double_gaussian(grid, sigma_z=-1.0)


def test_pattern_normalised_to_max():
    p = LithoPattern([-1.0, 0.0, 1.0], [1.0, 4.0, 2.0])
    np.testing.assert_allclose(p.density, [0.25, 1.0, 0.5])
    assert p.pixels[0] == pytest.approx(1.0) and p.pixels[1] == 1


def test_pattern_rejects_negative():
    with pytest.raises(ConfigurationError):
        LithoPattern([0.0, 1.0], [1.0, -0.1])
    with pytest.raises(DegenerateError):
        LithoPattern([0.0, 1.0], [0.0, 0.0])


def test_shipped_pattern_loads_with_63_pixels():
    pat = make_from_samples(shipped_pattern_path(), "pattern")
    dz, N, values = pat.pixels
    assert N == 63 and pat.z.size == 127
    assert dz == pytest.approx(3.7, rel=1e-9)
    np.testing.assert_allclose(values, double_hump_pattern().density, atol=1e-9)


def test_pixelate_uniform():
    comb = pixelate(LithoPattern([-1.0, 0.0, 1.0], [1.0, 1.0, 1.0]), 1.0, 1)
    np.testing.assert_allclose(comb.weights, [1.0, 1.0, 1.0])


def test_pixelate_cosine_squared():
    dz = 2.5
    z = dz * np.arange(-1, 2)
    comb = pixelate(LithoPattern(z, np.cos(np.pi * z / (4 * dz))**2), dz, 1)
    np.testing.assert_allclose(comb.weights, [np.sqrt(0.5), 1.0, np.sqrt(0.5)], atol=1e-12)


def test_pixelate_shipped_profile_reproduces_sqrt_sigma():
    z, v = load_profile(shipped_pattern_path())
    comb = pixelate(LithoPattern(z, v), 3.7, 63, V0=0.5)
    np.testing.assert_allclose(comb.weights, np.sqrt(v / v.max()), atol=1e-12)
    assert comb.base_amplitude_V0 == 0.5


def test_pixelate_support_overflow():
    with pytest.raises(ConfigurationError):
        pixelate(LithoPattern([-5.0, 0.0, 5.0], [1.0, 1.0, 1.0]), 1.0, 2)


def test_profile_loader_comments_and_order(tmp_path):
    f = tmp_path / "p.txt"
    f.write_text("# z value\n1 0.5\n-1 0.5\n0 1\n")
    z, v = load_profile(f)
    np.testing.assert_array_equal(z, [-1, 0, 1])
    np.testing.assert_array_equal(v, [0.5, 1, 0.5])


def test_target_from_samples(tmp_path, grid):
    f = tmp_path / "t.txt"
    zs = np.linspace(-20, 20, 81)
    np.savetxt(f, np.column_stack([zs, np.exp(-zs**2 / 16)]))
    t = make_from_samples(f, "target", grid)
    assert t.norm == pytest.approx(1.0, abs=1e-10)
    assert abs(grid.z[np.argmax(np.abs(t.amplitude))]) <= grid.dz
    with pytest.raises(ConfigurationError):
        make_from_samples(f, "target")
