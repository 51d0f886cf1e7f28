import numpy as np
import pytest

from hybridscan.errors import DomainError, SamplingError
from hybridscan.optics.fields import (
    FieldGrid,
    Plane,
    Window,
    flattop_field,
    fourier_pitch,
    full_dft,
    gaussian_field,
    lens_fourier,
    lens_inverse,
    windowed_dft,
)

F, LAM = 23e-3, 459e-9


def random_field(rng, n, window=None):
    shape = (window.rows, window.cols) if window else (n, n)
    s = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return FieldGrid(s, 2e-6, Plane.SLM, n, window)


def test_parseval_100_random_fields(rng):
    worst = 0.0
    for i in range(100):
        n = 2 ** int(rng.integers(4, 8))
        win = None
        if i % 2:
            size = int(rng.integers(2, n // 2))
            win = Window(int(rng.integers(0, n - size)), int(rng.integers(0, n - size)), size, size)
        f = random_field(rng, n, win)
        out = lens_fourier(f, F, LAM)
        worst = max(worst, abs(out.power() / f.power() - 1))
        assert out.plane is Plane.ARRAY
    assert worst < 1e-10


def test_output_pitch_and_inverse(rng):
    f = random_field(rng, 64)
    out = lens_fourier(f, F, LAM)
    assert out.pitch == pytest.approx(LAM * F / (64 * 2e-6))
    back = lens_inverse(out, F, LAM)
    assert back.plane is Plane.SLM
    assert np.allclose(back.samples, f.samples, atol=1e-12 * np.abs(f.samples).max())


def test_gaussian_basics():
    g = gaussian_field(256, 1e-6, 20e-6, center=(5e-6, -10e-6))
    assert g.power() == pytest.approx(1.0, rel=1e-9)
    y, x = g.coords()
    a = np.abs(g.samples)
    i0 = np.argmin(np.abs(y - 5e-6))
    j0 = np.argmin(np.abs(x + 10e-6))
    j1 = np.argmin(np.abs(x - 10e-6))
    assert a[i0, j1] / a[i0, j0] == pytest.approx(np.exp(-1), rel=0.01)
    with pytest.raises(SamplingError):
        gaussian_field(256, 1e-6, 1.5e-6)
    with pytest.raises(DomainError):
        gaussian_field(256, 1e-6, 10e-6, center=(1e-3, 0))


def second_moment_waist(field):
    i = np.abs(field.samples) ** 2
    _, x = field.coords()
    px = i.sum(axis=0) / i.sum()
    mu = np.sum(px * x)
    return 2 * np.sqrt(np.sum(px * (x - mu) ** 2))


@pytest.mark.parametrize("w", [40e-6, 80e-6, 160e-6])
def test_gaussian_focus_waist(w):
    n = 1024
    dx = 8 * w / 200
    g = gaussian_field(n, dx, w)
    out = lens_fourier(g, F, LAM)
    assert second_moment_waist(out) == pytest.approx(LAM * F / (np.pi * w), rel=0.01)


@pytest.mark.parametrize("v", range(1, 11))
def test_ramp_shift(v):
    n, dx, p = 512, 2e-6, 128
    win = Window.centered(n, p)
    g = gaussian_field(n, dx, p * dx / 5, window=win)
    length = p * dx
    _, x = g.coords()
    ramp = np.exp(2j * np.pi * v * (x - x[0]) / length)[None, :]
    out = lens_fourier(FieldGrid(g.samples * ramp, dx, Plane.SLM, n, win), F, LAM)
    i = np.abs(out.samples) ** 2
    peak = np.unravel_index(np.argmax(i), i.shape)
    expected_shift = v * LAM * F / length
    assert abs((peak[1] - n // 2) * out.pitch - expected_shift) <= out.pitch
    assert peak[0] == n // 2


def test_flattop_basics():
    n, dx = 512, 1e-6
    f = flattop_field(n, dx, 40e-6)
    assert f.power() == pytest.approx(1.0, rel=1e-9)
    a = np.abs(f.samples)
    c = n // 2
    assert a[c, c] == pytest.approx(a[c + 18, c - 18], rel=1e-12)
    with pytest.raises(SamplingError):
        flattop_field(n, dx, 3e-6)
    with pytest.raises(DomainError):
        flattop_field(n, dx, 600e-6)


def test_flattop_sinc_zero():
    n, dx, side = 1024, 1e-6, 32e-6
    f = flattop_field(n, dx, side)
    out = lens_fourier(f, F, LAM)
    cut = np.abs(out.samples[n // 2, n // 2:])
    first_min = int(np.argmax(np.diff(cut) > 0))
    expected = LAM * F / side / out.pitch
    assert abs(first_min - expected) <= 1


def test_cross_correlation_peak():
    n, dx = 128, 1.0
    d = (7, -4)
    a = np.abs(gaussian_field(n, dx, 6.0).samples)
    b = np.abs(gaussian_field(n, dx, 6.0, center=(float(d[0]), float(d[1]))).samples)
    best, arg = -1.0, None
    for sy in range(-12, 13):
        for sx in range(-12, 13):
            c = np.sum(np.roll(a, (sy, sx), axis=(0, 1)) * b)
            if c > best:
                best, arg = c, (sy, sx)
    assert arg == d


def test_windowed_dft_matches_fft(rng):
    n = 256
    win = Window(100, 90, 40, 30)
    f = random_field(rng, n, win)
    out_win = Window(10, 200, 25, 50)
    via_fft = full_dft(f.embedded())[out_win.slices]
    via_mat = windowed_dft(f.samples, n, win, out_win)
    assert np.max(np.abs(via_fft - via_mat)) < 1e-10 * np.max(np.abs(via_fft))
    inv = windowed_dft(f.samples, n, win, out_win, inverse=True)
    assert np.max(np.abs(full_dft(f.embedded(), inverse=True)[out_win.slices] - inv)) < 1e-10 * np.max(np.abs(inv))


def test_windowed_dft_matches_fft_large_grid(rng):
    n = 2**12
    win = Window.centered(n, 256)
    f = random_field(rng, n, win)
    out_win = Window(2086, 2086, 64, 64)
    a = lens_fourier(f, F, LAM, window=out_win).samples
    full = FieldGrid(f.embedded(), f.pitch, f.plane, n)
    b = lens_fourier(full, F, LAM, window=out_win).samples
    assert np.max(np.abs(a - b)) < 1e-9 * np.max(np.abs(b))


def test_grid_validation():
    with pytest.raises(DomainError):
        FieldGrid(np.zeros((6, 6)), 1.0)
    with pytest.raises(DomainError):
        FieldGrid(np.zeros((4, 4)), 1.0, n=8, window=Window(6, 0, 4, 4))
    with pytest.raises(DomainError):
        FieldGrid(np.zeros((4, 4)), 0.0)
    with pytest.raises(DomainError):
        FieldGrid(np.zeros((4, 4)), 1.0).normalized()
    with pytest.raises(DomainError):
        Window.covering(64, 1.0, (0, 40), (0, 10))


def test_cropped_and_embedded(rng):
    f = random_field(rng, 32, Window(4, 4, 8, 8))
    c = f.cropped(Window(0, 0, 10, 10))
    assert np.array_equal(c.samples[4:, 4:], f.samples[:6, :6])
    assert np.array_equal(c.embedded()[4:10, 4:10], f.embedded()[4:10, 4:10])
    assert fourier_pitch(32, 1e-6, F, LAM) == pytest.approx(LAM * F / 32e-6)
