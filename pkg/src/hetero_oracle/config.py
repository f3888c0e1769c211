"""Experiment configuration: flat key = value sections, one per scenario.

The format is deliberately unprogrammable; reproducibility beats
flexibility here.  A file looks like::

    [scenario:sine-budget]
    signal = sine
    volatility = budget
    c0 = 1.0
    c1 = 1.0
    c2 = 1.0
    noise = gaussian
    n_list = 101, 201
    replications = 200
    seed = 1234
    mode = estimated

Unknown keys are rejected; diagnostics name the offending field.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .audit import Scenario
from .errors import ConfigError
from .signals import NoiseSpec, VolatilitySpec, make_signal

_KNOWN_KEYS = {
    "signal",
    "signal_k",
    "signal_scale",
    "signal_value",
    "volatility",
    "c0",
    "c1",
    "c2",
    "sigma2",
    "noise",
    "n_list",
    "rho",
    "epsilon",
    "k_star",
    "m_n",
    "replications",
    "seed",
    "mode",
    "include_all_ones",
}

_MODES = ("estimated", "known")


@dataclass(frozen=True)
class ExperimentConfig:
    """One scenario's fully resolved settings."""

    name: str
    signal_id: str = "sine"
    signal_params: dict = field(default_factory=dict)
    volatility_kind: str = "budget"
    c0: float = 1.0
    c1: float = 1.0
    c2: float = 1.0
    sigma2: float = 1.0
    noise_id: str = "gaussian"
    n_list: tuple = (101,)
    rho: Optional[float] = None
    epsilon: Optional[float] = None
    k_star: Optional[int] = None
    m_n: Optional[int] = None
    replications: int = 200
    seed: int = 1234
    mode: str = "estimated"
    include_all_ones: bool = False

    def validate(self) -> None:
        for n in self.n_list:
            if n % 2 == 0:
                raise ConfigError(
                    f"field 'n_list': every n must be odd, got {n}; "
                    "refusing to auto-adjust"
                )
            if n < 3:
                raise ConfigError(f"field 'n_list': every n must be >= 3, got {n}")
        if self.replications < 1:
            raise ConfigError(
                f"field 'replications': must be >= 1, got {self.replications}"
            )
        if self.rho is not None and not 0.0 < self.rho < 1.0 / 3.0:
            raise ConfigError(f"field 'rho': must lie in (0, 1/3), got {self.rho}")
        if self.mode not in _MODES:
            raise ConfigError(f"field 'mode': must be one of {_MODES}, got {self.mode!r}")

    def build_volatility(self) -> VolatilitySpec:
        if self.volatility_kind == "budget":
            return VolatilitySpec.budget(self.c0, self.c1, self.c2)
        if self.volatility_kind == "constant":
            return VolatilitySpec.constant(self.sigma2)
        raise ConfigError(
            f"field 'volatility': must be 'budget' or 'constant', got {self.volatility_kind!r}"
        )

    def build_scenario(self, n: int) -> Scenario:
        try:
            signal = make_signal(self.signal_id, **self.signal_params)
        except TypeError as exc:
            raise ConfigError(f"field 'signal': {exc}") from exc
        except ValueError as exc:
            raise ConfigError(f"field 'signal': {exc}") from exc
        try:
            noise = NoiseSpec.named(self.noise_id)
        except ValueError as exc:
            raise ConfigError(f"field 'noise': {exc}") from exc
        return Scenario(
            name=self.name,
            signal=signal,
            volatility=self.build_volatility(),
            noise=noise,
            n=n,
            rho=self.rho,
            epsilon=self.epsilon,
            k_star=self.k_star,
            tail_cutoff=self.m_n,
            include_all_ones=self.include_all_ones,
        )


def _get(parser, section, key, conv, default):
    raw = parser.get(section, key, fallback=None)
    if raw is None or raw.strip() == "":
        return default
    try:
        return conv(raw.strip())
    except ValueError as exc:
        raise ConfigError(f"field '{key}' in [{section}]: {exc}") from exc


def _parse_bool(raw: str) -> bool:
    val = raw.strip().lower()
    if val in ("1", "true", "yes", "on"):
        return True
    if val in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_n_list(raw: str) -> tuple:
    try:
        return tuple(int(part.strip()) for part in raw.split(",") if part.strip())
    except ValueError as exc:
        raise ValueError(f"not a comma-separated integer list: {raw!r}") from exc


def parse_config(path) -> list[ExperimentConfig]:
    """Parse every [scenario:*] section of a config file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"field 'config': no such file: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"field 'config': {exc}") from exc

    scenarios = []
    for section in parser.sections():
        if not section.startswith("scenario:"):
            raise ConfigError(
                f"field 'section': unknown section [{section}]; "
                "scenario sections must be named [scenario:<name>]"
            )
        for key in parser.options(section):
            if key not in _KNOWN_KEYS and key not in parser.defaults():
                raise ConfigError(f"field '{key}' in [{section}]: unknown key")
        name = section.split(":", 1)[1].strip() or "scenario"

        signal_id = _get(parser, section, "signal", str, "sine")
        signal_params = {}
        sig_k = _get(parser, section, "signal_k", int, None)
        if sig_k is not None:
            signal_params["k"] = sig_k
        sig_scale = _get(parser, section, "signal_scale", float, None)
        if sig_scale is not None:
            signal_params["scale"] = sig_scale
        sig_value = _get(parser, section, "signal_value", float, None)
        if sig_value is not None:
            signal_params["value"] = sig_value

        cfg = ExperimentConfig(
            name=name,
            signal_id=signal_id,
            signal_params=signal_params,
            volatility_kind=_get(parser, section, "volatility", str, "budget"),
            c0=_get(parser, section, "c0", float, 1.0),
            c1=_get(parser, section, "c1", float, 1.0),
            c2=_get(parser, section, "c2", float, 1.0),
            sigma2=_get(parser, section, "sigma2", float, 1.0),
            noise_id=_get(parser, section, "noise", str, "gaussian"),
            n_list=_get(parser, section, "n_list", _parse_n_list, (101,)),
            rho=_get(parser, section, "rho", float, None),
            epsilon=_get(parser, section, "epsilon", float, None),
            k_star=_get(parser, section, "k_star", int, None),
            m_n=_get(parser, section, "m_n", int, None),
            replications=_get(parser, section, "replications", int, 200),
            seed=_get(parser, section, "seed", int, 1234),
            mode=_get(parser, section, "mode", str, "estimated"),
            include_all_ones=_get(parser, section, "include_all_ones", _parse_bool, False),
        )
        cfg.validate()
        scenarios.append(cfg)
    if not scenarios:
        raise ConfigError("field 'config': no [scenario:*] sections found")
    return scenarios


def default_config() -> ExperimentConfig:
    """Built-in scenario used when no config file is given."""
    cfg = ExperimentConfig(name="default")
    cfg.validate()
    return cfg
