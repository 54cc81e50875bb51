import pytest

from builders import at
from iotscheduler.campaign.PassSynthesizer import riot_eligible_count, satellite_ids, synth_passes
from iotscheduler.core.CampaignConfig import SynthParams
from iotscheduler.core.Exceptions import ConfigurationError

WINDOW = (at("00:00"), at("00:00", day=3))


def test_same_seed_same_catalog():
    assert synth_passes(11, 4, WINDOW) == synth_passes(11, 4, WINDOW)


def test_different_seed_differs():
    assert synth_passes(11, 4, WINDOW) != synth_passes(12, 4, WINDOW)


def test_passes_respect_window_and_params():
    params = SynthParams()
    catalog = synth_passes(5, 3, WINDOW, params)
    assert catalog.satellites == satellite_ids(3)
    for p in catalog.passes:
        assert WINDOW[0] <= p.t_start < p.t_max < p.t_end <= WINDOW[1]
        minutes = p.duration / 60
        assert params.pass_minutes_min - 1 <= minutes <= params.pass_minutes_max + 1
        assert params.theta_max_range[0] <= p.theta_max <= 90.0


def test_low_edge_satellites_come_first():
    params = SynthParams(riot_fraction=0.5)
    catalog = synth_passes(2, 4, WINDOW, params)
    by_sat = catalog.by_satellite()
    for sat in satellite_ids(4)[:2]:
        assert all(p.theta_start <= 5.0 and p.theta_end <= 5.0 for p in by_sat[sat])
    for sat in satellite_ids(4)[2:]:
        assert all(p.theta_start > 5.0 and p.theta_end > 5.0 for p in by_sat[sat])


def test_passes_of_one_satellite_do_not_overlap():
    catalog = synth_passes(9, 2, WINDOW)
    for passes in catalog.by_satellite().values():
        for a, b in zip(passes, passes[1:]):
            assert a.t_end <= b.t_start


@pytest.mark.parametrize("n, frac, expected", [(6, 0.5, 3), (6, 2 / 6, 2), (3, 0.5, 2), (4, 0.0, 0)])
def test_riot_eligible_count(n, frac, expected):
    assert riot_eligible_count(n, frac) == expected


def test_rejects_zero_satellites_and_short_window():
    with pytest.raises(ConfigurationError):
        synth_passes(1, 0, WINDOW)
    with pytest.raises(ConfigurationError, match="shorter than one synthetic pass"):
        synth_passes(1, 2, (at("00:00"), at("01:00")))


def test_params_validation():
    with pytest.raises(ValueError):
        SynthParams(pass_minutes_min=300, pass_minutes_max=200)
    with pytest.raises(ValueError):
        SynthParams(period_hours=2.0)
