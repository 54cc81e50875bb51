# if a script does "from iotscheduler.controllers import *", only
# names in this __all__ will be imported.
# CampaignController is resolved lazily: the optimizers import logging_utils
# from this package, so an eager import here would be circular.

__all__ = [
    "CampaignController",
]


def __getattr__(name):
    if name == "CampaignController":
        from .CampaignController import CampaignController
        return CampaignController
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
