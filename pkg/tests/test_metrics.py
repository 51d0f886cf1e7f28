import numpy as np
import pytest

from hybridscan.errors import DomainError
from hybridscan.optics.hologram import PhaseMask
from hybridscan.optics.metrics import TargetSpec, accuracy, target_field
from hybridscan.optics.simulate import SimulationSettings, build_patch, run_patch

DESK = SimulationSettings()


def test_zero_mask_on_axis():
    m = build_patch(DESK.with_(array_offset=0.0), 64, [(0, 0)])
    met = m.measure(PhaseMask(np.zeros((64, 64)), DESK.sim_per_slm, 10))
    assert met.efficiency > 0.95
    assert met.accuracy < 0.1


@pytest.mark.parametrize("px, sites", [(32, [(3, 3)]), (66, [(0, 0), (3, 1), (1, 3)]), (80, [(0, 0), (3, 1), (1, 3), (3, 3)])])
def test_power_bookkeeping(px, sites):
    met = run_patch(DESK, px, sites)
    assert 0 <= met.efficiency <= 1 and met.crosstalk >= 0
    assert met.efficiency + met.crosstalk <= 1
    assert met.efficiency + met.crosstalk + met.out_of_array == pytest.approx(1.0, abs=1e-6)
    assert len(met.site_efficiency) == len(sites)
    assert met.accuracy_samples > 0


def test_determinism():
    a = run_patch(DESK, 48, [(0, 0), (3, 3)])
    b = run_patch(DESK, 48, [(0, 0), (3, 3)])
    assert a == b


def test_perfect_output_scores_zero():
    m = build_patch(DESK, 64, [(0, 0), (3, 3)])
    eps, n = accuracy(m.target.scaled(0.3), m.target, m.spec)
    assert eps == pytest.approx(0.0, abs=1e-12) and n > 0


def test_accuracy_is_per_site_normalised():
    m = build_patch(DESK, 64, [(0, 0), (3, 3)])
    t = m.target
    y, _ = t.coords()
    half = y < np.mean(y)
    out = t.samples.copy()
    out[half, :] *= 3.0
    eps, _ = accuracy(type(t)(out, t.pitch, t.plane, t.n, t.window), t, m.spec)
    assert eps == pytest.approx(0.0, abs=1e-12)


def test_spec_validation():
    with pytest.raises(DomainError):
        TargetSpec([(4, 0)], 1e-6)
    with pytest.raises(DomainError):
        TargetSpec([(0, 0)], 1e-6, spacing_ratio=0)
    with pytest.raises(DomainError):
        TargetSpec([(0, 0)], 1e-6, shape="hexagon")
    assert TargetSpec([(0, 0)], 1e-6, shape="flattop").side == 2e-6


def test_target_outside_view():
    spec = TargetSpec([(3, 3)], 10e-6, offset=100.0)
    with pytest.raises(DomainError):
        target_field(spec, 256, 1e-6)


def test_target_field_equal_power():
    spec = TargetSpec([(0, 0), (2, 1)], 8e-6)
    t = target_field(spec, 1024, 1e-6)
    assert t.power() == pytest.approx(1.0)
    i = t.intensity()
    y, x = t.coords()
    left = i[:, x < np.mean([spec.position((0, 0))[1], spec.position((2, 1))[1]])].sum()
    assert left == pytest.approx(0.5, abs=2e-3)
