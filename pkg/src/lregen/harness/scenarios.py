"""Builtin scenarios reproducing the simulation campaigns."""
from __future__ import annotations

from ..regen import ConfigurationError
from ..signals import FeedbackAlpha, ThetaProfile
from .config import ScenarioConfig

_CATALOG = {
    "fig2": ScenarioConfig(name="fig2", delta="delta1"),
    "fig3": ScenarioConfig(name="fig3", delta="delta2"),
    "fig4": ScenarioConfig(name="fig4", delta="delta3",
                           alpha=FeedbackAlpha(alpha0_scale=1.0, alpha0_rate=0.1, k=0.1)),
    "noise": ScenarioConfig(name="noise", delta="delta2", noise_snr_db=20.0, seed=0),
    "alertness": ScenarioConfig(name="alertness", delta="delta4",
                                theta=ThetaProfile(((0.0, -5.0), (10.0, -4.0)))),
    "counterexample-l2": ScenarioConfig(name="counterexample-l2", kind="counterexample",
                                        horizon=1000.0, theta=ThetaProfile.constant(1.0),
                                        forcing="inverse"),
    "counterexample-sin": ScenarioConfig(name="counterexample-sin", kind="counterexample",
                                         horizon=1000.0, theta=ThetaProfile.constant(1.0),
                                         forcing="sin"),
}


class UnknownScenario(ConfigurationError):
    pass


def list_scenarios() -> list:
    return list(_CATALOG)


def get_scenario(name: str) -> ScenarioConfig:
    try:
        return _CATALOG[name]
    except KeyError:
        raise UnknownScenario(f"unknown scenario {name!r}; valid names: {', '.join(_CATALOG)}") from None
