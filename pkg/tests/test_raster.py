import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lktrack import raster
from lktrack.errors import DimensionError
from lktrack.raster import Box, Patch

from oracles import bilinear_point


def test_sample_integer_coordinate_is_exact(backend):
    img = np.zeros((5, 6))
    img[2, 3] = 0.7
    assert raster.sample_bilinear(img, 3.0, 2.0) == 0.7


def test_sample_centre_of_2x2_is_mean(backend):
    img = np.array([[0.0, 1.0], [2.0, 3.0]]) / 3.0
    assert raster.sample_bilinear(img, 0.5, 0.5) == pytest.approx(img.mean(), abs=1e-15)


def test_sample_reproduces_plane(backend):
    # f(x, y) = x + 2y laid out as [row y][col x]
    img = np.array([[0.0, 1.0], [2.0, 3.0]])
    assert raster.sample_bilinear(img, 0.25, 0.75) == pytest.approx(1.75, abs=1e-15)


def test_sample_clamps_out_of_range(backend):
    img = np.array([[0.1, 0.2], [0.3, 0.4]])
    assert raster.sample_bilinear(img, -5.0, -3.0) == 0.1
    assert raster.sample_bilinear(img, 9.0, 0.0) == 0.2
    assert raster.sample_bilinear(img, 1.0, 1e6) == 0.4


@settings(max_examples=80, deadline=None)
@given(a=st.floats(-1, 1), b=st.floats(-1, 1), c=st.floats(-1, 1),
       x=st.floats(0, 9), y=st.floats(0, 7))
def test_sample_reproduces_affine_fields(a, b, c, x, y):
    yy, xx = np.mgrid[0:8, 0:10].astype(float)
    img = a + b * xx + c * yy
    assert raster.sample_bilinear(img, x, y) == pytest.approx(a + b * x + c * y, abs=1e-12)


def test_sample_matches_scalar_oracle(backend, rng):
    img = rng.random((9, 11))
    for x, y in rng.uniform(-1, 12, size=(200, 2)):
        assert raster.sample_bilinear(img, x, y) == pytest.approx(bilinear_point(img, x, y), abs=1e-14)


def test_gradient_of_ramp(backend):
    f = 0.1 * np.tile(np.arange(7.0), (6, 1))
    g = raster.gradient(f)
    np.testing.assert_allclose(g.gx[1:-1, 1:-1], 0.1, atol=1e-15)
    np.testing.assert_allclose(g.gy[1:-1, 1:-1], 0.0, atol=1e-15)


def test_gradient_of_constant(backend):
    g = raster.gradient(np.full((4, 5), 0.3))
    assert not g.gx.any() and not g.gy.any()


def test_gradient_matches_bilinear_finite_differences(backend, rng):
    f = rng.random((8, 8))
    g = raster.gradient(f)
    h = 0.25  # stays inside the two cells adjacent to each grid point
    for i in range(1, 7):
        for j in range(1, 7):
            fdx = (bilinear_point(f, j + h, i) - bilinear_point(f, j - h, i)) / (2 * h)
            fdy = (bilinear_point(f, j, i + h) - bilinear_point(f, j, i - h)) / (2 * h)
            assert g.gx[i, j] == pytest.approx(fdx, abs=1e-9)
            assert g.gy[i, j] == pytest.approx(fdy, abs=1e-9)


def test_gradient_one_sided_at_rim(backend):
    f = np.arange(12.0).reshape(3, 4) ** 2 / 121.0
    g = raster.gradient(f)
    assert g.gx[0, 0] == f[0, 1] - f[0, 0]
    assert g.gy[2, 3] == f[2, 3] - f[1, 3]


@pytest.mark.parametrize("shape", [(2, 5), (5, 2), (1, 1)])
def test_gradient_rejects_small_patches(shape):
    with pytest.raises(DimensionError):
        raster.gradient(np.zeros(shape))


def test_second_derivatives_of_x_squared(backend):
    xx = np.tile(np.arange(9.0), (8, 1))
    sd = raster.second_derivatives(xx ** 2)
    np.testing.assert_allclose(sd.ixx[2:-2, 2:-2], 2.0, atol=1e-12)
    np.testing.assert_allclose(sd.iyy[2:-2, 2:-2], 0.0, atol=1e-12)
    np.testing.assert_allclose(sd.ixy[2:-2, 2:-2], 0.0, atol=1e-12)


def test_second_derivatives_of_xy(backend):
    yy, xx = np.mgrid[0:8, 0:9].astype(float)
    sd = raster.second_derivatives(xx * yy)
    np.testing.assert_allclose(sd.ixy[2:-2, 2:-2], 1.0, atol=1e-12)
    np.testing.assert_allclose(sd.iyx[2:-2, 2:-2], 1.0, atol=1e-12)


def test_mixed_derivatives_agree_everywhere(backend, rng):
    for _ in range(20):
        sd = raster.second_derivatives(rng.random((rng.integers(5, 15), rng.integers(5, 15))))
        np.testing.assert_allclose(sd.ixy, sd.iyx, rtol=0, atol=1e-9)


def test_second_derivatives_reject_small_patch():
    with pytest.raises(DimensionError):
        raster.second_derivatives(np.zeros((4, 9)))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31), alpha=st.floats(-3, 3), beta=st.floats(-3, 3))
def test_derivatives_are_linear(seed, alpha, beta):
    r = np.random.default_rng(seed)
    f, g = r.random((7, 8)), r.random((7, 8))
    mix = alpha * f + beta * g
    for a, b, c in zip(raster.gradient(mix), raster.gradient(f), raster.gradient(g)):
        np.testing.assert_allclose(a, alpha * b + beta * c, atol=1e-12)
    for a, b, c in zip(raster.second_derivatives(mix), raster.second_derivatives(f), raster.second_derivatives(g)):
        np.testing.assert_allclose(a, alpha * b + beta * c, atol=1e-12)


def test_identity_warp_is_bit_identical_copy(backend, rng):
    img = rng.random((30, 40))
    box = Box(7, 5, 12, 9)
    patch = raster.extract_warped_patch(img, box, (0.0, 0.0))
    np.testing.assert_array_equal(patch.values, img[5:14, 7:19])
    assert patch.origin == (7.0, 5.0)


def test_unit_shift_recovers_source(backend, rng):
    img = rng.random((30, 40))
    shifted = np.roll(img, 1, axis=1)
    box = Box(7, 5, 12, 9)
    a = raster.extract_warped_patch(img, box).values
    b = raster.extract_warped_patch(shifted, box, (1.0, 0.0)).values
    np.testing.assert_array_equal(a, b)


def test_half_pixel_warp_is_average(backend, rng):
    img = rng.random((30, 40))
    box = Box(7, 5, 12, 9)
    p0 = raster.extract_warped_patch(img, box, (0.0, 0.0)).values
    p1 = raster.extract_warped_patch(img, box, (1.0, 0.0)).values
    half = raster.extract_warped_patch(img, box, (0.5, 0.0)).values
    np.testing.assert_allclose(half, 0.5 * (p0 + p1), atol=1e-15)


def test_margin_grows_window(backend, rng):
    img = rng.random((30, 40))
    patch = raster.extract_warped_patch(img, Box(7, 5, 12, 9), margin=2)
    np.testing.assert_array_equal(patch.values, img[3:16, 5:21])


def test_salt_pepper_density_zero_is_identity(rng):
    img = rng.random((20, 20))
    np.testing.assert_array_equal(raster.add_salt_pepper(img, 0.0, rng), img)


def test_salt_pepper_density_one_is_binary(rng):
    out = raster.add_salt_pepper(np.full((20, 20), 0.5), 1.0, rng)
    assert set(np.unique(out)) <= {0.0, 1.0}


def test_salt_pepper_count_at_one_percent():
    # binomial(40000, 0.01): mean 400, sd ~19.9; [300, 500] is a 5-sigma band
    img = np.full((200, 200), 0.5)
    for seed in range(5):
        out = raster.add_salt_pepper(img, 0.01, np.random.default_rng(seed))
        assert 300 <= int((out != 0.5).sum()) <= 500


def test_salt_pepper_is_seeded_and_pure():
    img = np.full((50, 50), 0.5)
    a = raster.add_salt_pepper(img, 0.1, np.random.default_rng(3))
    b = raster.add_salt_pepper(img, 0.1, np.random.default_rng(3))
    np.testing.assert_array_equal(a, b)
    assert (img == 0.5).all()


@pytest.mark.parametrize("density", [-0.1, 1.5])
def test_salt_pepper_rejects_bad_density(density, rng):
    with pytest.raises(ValueError):
        raster.add_salt_pepper(np.zeros((3, 3)), density, rng)


def test_as_image_validates():
    assert raster.as_image([[0, 1], [0.5, 0.25]]).dtype == np.float64
    with pytest.raises(ValueError):
        raster.as_image([[0, 2.0]])
    with pytest.raises(DimensionError):
        raster.as_image(np.zeros(4))


def test_box_and_patch_basics():
    with pytest.raises(ValueError):
        Box(0, 0, 0, 3)
    b = Box(2, 3, 4, 6)
    assert b.center == (4.0, 6.0)
    assert b.inside(6, 9) and not b.inside(5, 9)
    p = Patch((0.0, 0.0), np.zeros((3, 5)))
    assert (p.width, p.height) == (5, 3)


@pytest.mark.parametrize("v, expected", [(0.5, 1), (-0.5, -1), (1.49, 1), (-2.5, -3), (0.0, 0)])
def test_round_half_away(v, expected):
    assert raster.round_half_away(v) == expected
