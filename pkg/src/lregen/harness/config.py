"""Scenario configuration and its INI-style text form."""
from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from ..regen import ConfigurationError
from ..signals import (AlphaPolicy, ConstantAlpha, ThetaProfile, format_alpha, get_signal,
                       parse_alpha)

KINDS = ("generator", "counterexample")
FORCINGS = {
    "inverse": lambda t: 1.0 / (np.asarray(t, dtype=float) + 1.0),
    "sin": lambda t: np.sin(t) / (np.asarray(t, dtype=float) + 1.0),
}


@dataclass(frozen=True)
class DremSettings:
    """Synthetic vector front-end; psi_j(t) = sin((1 + j//2) t + (j%2) pi/2)."""

    kind: str = "delay"
    params: Tuple[float, ...] = (0.0, 1.571)
    theta: Tuple[float, ...] = (5.0, -3.0)
    component: int = 0

    def __post_init__(self):
        if self.kind not in ("delay", "filter"):
            raise ConfigurationError(f"drem kind must be 'delay' or 'filter', got {self.kind!r}")
        if len(self.params) != len(self.theta):
            raise ConfigurationError("drem needs one pole/delay per parameter")
        if not 0 <= self.component < len(self.theta):
            raise ConfigurationError("drem component out of range")

    @staticmethod
    def parse(text: str) -> "DremSettings":
        """``delay:0,1.571`` or ``filter:1,2``; theta and component via other keys."""
        kind, _, params = text.partition(":")
        values = tuple(float(v) for v in params.split(",")) if params else DremSettings.params
        theta = DremSettings.theta if len(values) == 2 else tuple(float(i + 1) for i in range(len(values)))
        return DremSettings(kind=kind, params=values, theta=theta)


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    kind: str = "generator"
    dt: float = 1e-3
    horizon: float = 30.0
    beta: float = 0.4
    gamma: float = 2.0
    delta: str = "delta1"
    alpha: AlphaPolicy = ConstantAlpha(1.0)
    theta: ThetaProfile = ThetaProfile.constant(-5.0)
    noise_snr_db: Optional[float] = None
    noise_period: float = 0.01
    seed: int = 0
    drem: Optional[DremSettings] = None
    forcing: str = "inverse"
    out: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"kind must be one of {KINDS}")
        if not self.dt > 0:
            raise ConfigurationError("dt must be positive")
        if not self.horizon > 0:
            raise ConfigurationError("horizon must be positive")
        if not 0.0 < self.beta < 0.5:
            raise ConfigurationError(f"beta must lie in (0, 1/2), got {self.beta}")
        if not self.gamma > 0:
            raise ConfigurationError("gamma must be positive")
        if self.kind == "generator" and self.drem is None:
            get_signal(self.delta)
        if self.forcing not in FORCINGS:
            raise ConfigurationError(f"forcing must be one of {sorted(FORCINGS)}")
        on_grid = lambda v, step: abs(v / step - round(v / step)) < 1e-6
        for start, _ in self.theta.pieces:
            if not on_grid(start, self.dt):
                raise ConfigurationError(f"theta breakpoint {start} is not on the dt grid")
        if self.noise_snr_db is not None and not on_grid(self.noise_period, self.dt):
            raise ConfigurationError("noise sample period must be a multiple of dt")

    def override(self, **changes) -> "ScenarioConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    # --- text form ---------------------------------------------------------

    def to_ini(self) -> str:
        cp = configparser.ConfigParser()
        cp["scenario"] = {
            "name": self.name, "kind": self.kind, "dt": repr(self.dt), "horizon": repr(self.horizon),
            "beta": repr(self.beta), "gamma": repr(self.gamma), "seed": str(self.seed),
        }
        cp["signals"] = {
            "delta": self.delta, "alpha": format_alpha(self.alpha), "theta": str(self.theta),
            "forcing": self.forcing,
        }
        cp["noise"] = {"snr_db": "none" if self.noise_snr_db is None else repr(self.noise_snr_db),
                       "sample_period": repr(self.noise_period)}
        if self.drem is not None:
            cp["drem"] = {
                "kind": self.drem.kind,
                "params": ",".join(repr(p) for p in self.drem.params),
                "theta": ",".join(repr(p) for p in self.drem.theta),
                "component": str(self.drem.component),
            }
        if self.out is not None:
            cp["output"] = {"csv": self.out}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_ini(cls, text: str) -> "ScenarioConfig":
        cp = configparser.ConfigParser()
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigurationError(f"malformed config: {exc}") from None
        known = {"scenario", "signals", "noise", "drem", "output"}
        unknown = set(cp.sections()) - known
        if unknown:
            raise ConfigurationError(f"unknown config sections: {sorted(unknown)}")
        sc = cp["scenario"] if cp.has_section("scenario") else {}
        sig = cp["signals"] if cp.has_section("signals") else {}
        noise = cp["noise"] if cp.has_section("noise") else {}
        kw = {}
        try:
            kw["name"] = sc.get("name", "custom")
            for key in ("kind",):
                if key in sc:
                    kw[key] = sc[key]
            for key in ("dt", "horizon", "beta", "gamma"):
                if key in sc:
                    kw[key] = float(sc[key])
            if "seed" in sc:
                kw["seed"] = int(sc["seed"])
            if "delta" in sig:
                kw["delta"] = sig["delta"]
            if "alpha" in sig:
                kw["alpha"] = parse_alpha(sig["alpha"])
            if "theta" in sig:
                kw["theta"] = ThetaProfile.parse(sig["theta"])
            if "forcing" in sig:
                kw["forcing"] = sig["forcing"]
            snr = noise.get("snr_db", "none")
            kw["noise_snr_db"] = None if snr.strip().lower() == "none" else float(snr)
            if "sample_period" in noise:
                kw["noise_period"] = float(noise["sample_period"])
            if cp.has_section("drem"):
                d = cp["drem"]
                kw["drem"] = DremSettings(
                    kind=d.get("kind", "delay"),
                    params=tuple(float(v) for v in d["params"].split(",")),
                    theta=tuple(float(v) for v in d["theta"].split(",")),
                    component=int(d.get("component", "0")),
                )
            if cp.has_section("output"):
                kw["out"] = cp["output"].get("csv")
        except (KeyError, ValueError) as exc:
            if isinstance(exc, ConfigurationError):
                raise
            raise ConfigurationError(f"bad config value: {exc}") from None
        return cls(**kw)
