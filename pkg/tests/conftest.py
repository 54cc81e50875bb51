import pytest

from iotscheduler.campaign.ScenarioFactory import build_synthetic_campaign, build_synthetic_scenario
from iotscheduler.core.CampaignConfig import SlottingPolicy


@pytest.fixture
def policy():
    return SlottingPolicy()


@pytest.fixture(scope="session")
def small_scenario():
    """3 satellites over 2 days, SQM for all and RIOT for the first."""
    return build_synthetic_scenario(seed=3, n_sats=3, days=2.0, riot_sats=1)


@pytest.fixture(scope="session")
def exp_scenario():
    """6 satellites over 3 days, SQM for all and RIOT for two."""
    return build_synthetic_scenario(seed=7, n_sats=6, days=3.0, riot_sats=2)


@pytest.fixture
def scenario_files(tmp_path):
    """A synthetic campaign written to disk the way `iotsched synth` does."""
    from iotscheduler.controllers.CampaignController import CampaignController

    passes, scenario, _ = CampaignController().synth(tmp_path / "scn", seed=3, n_sats=3, days=2.0,
                                                     riot_sats=1)
    return passes, scenario


@pytest.fixture
def synthetic_campaign():
    return build_synthetic_campaign(seed=5, n_sats=4, days=2.0, riot_sats=2)
