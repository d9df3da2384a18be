"""Pipeline configuration.

All tunables of the multiscale construction live in one frozen dataclass so a
run is fully described by (input, seed, Config).  Field names double as the
keys accepted in config files (JSON or ``key=value`` lines) and are echoed
verbatim into every report.
"""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass

from .errors import InputError

__all__ = ["Config", "load_config", "parse_config_text"]


@dataclass(frozen=True)
class Config:
    # Scale padding for density screening and representative balls (2^-n-N0).
    N0: int = 5
    # Density threshold: a point is dense at scale m if mu(B(x, 2^-m)) >= delta*2^-m.
    # Kept small enough that C1*delta stays below typical mass/diameter ratios;
    # otherwise the coarsest net point stops before the cascade can refine.
    delta: float = 0.005
    # Stopping threshold multiplier: stop when residual mass <= C1*delta*2^-n.
    C1: float = 32.0
    # Replacement radius factor, must stay in (1/4, 1/3).
    theta: float = 0.29
    # Order-strengthening parameter used by the hypothesis checkers.
    phi1: float = 0.9
    # Ball exponents for the hypothesis checkers and step classification.
    M1: int = 16
    M2: int = 3
    N1: int = 11
    # Comparability constant for the curvature energy (max/min pairwise < K).
    K: float = 10.0
    # Annulus radii factors for the representative objective.
    r1: float = 1.0 / 16.0
    R1: float = 8.0
    # Flatness gate: total energy should not exceed eps0 * diameter.
    eps0: float = 0.1
    # Local energy screen threshold: c2(x, r)/r <= eps1.
    eps1: float = 10.0
    # Length slack: final curve length <= (1 + tau0) * diameter.
    tau0: float = 0.1
    # Mass gate: total mass >= mu0 * diameter.
    mu0: float = 0.5
    # Linear growth gate: mu(B(x, r)) <= C0 * r on the dyadic grid.
    C0: float = 3.0
    # Finest scale; None selects the smallest n with 2^-n below half the
    # minimum positive nearest-neighbor distance.
    n_max: int | None = None
    # Density screening index used when advancing to scale n+1: False keeps
    # the lagged index n, True aligns it to n+1.  Reports record the variant.
    density_index_aligned: bool = False

    def __post_init__(self) -> None:
        problems = []
        if self.N0 < 2:
            problems.append("N0 must be an integer >= 2")
        if not (self.delta > 0):
            problems.append("delta must be positive")
        if self.C1 < 32:
            problems.append("C1 must be >= 32")
        if not (0.25 < self.theta < 1.0 / 3.0):
            problems.append("theta must lie strictly between 1/4 and 1/3")
        if not (0 < self.phi1 < 1):
            problems.append("phi1 must lie in (0, 1)")
        if self.M1 < 9:
            problems.append("M1 must be >= 9")
        if self.M1 < self.N1 + self.M2 + 2:
            problems.append("M1 must be >= N1 + M2 + 2")
        if self.N1 <= 10:
            problems.append("N1 must be an integer > 10")
        if not (self.K >= 1):
            problems.append("K must be >= 1 (math.inf allowed)")
        if not (0 < self.r1 < self.R1):
            problems.append("r1 must satisfy 0 < r1 < R1")
        for name in ("eps0", "eps1", "tau0", "mu0", "C0"):
            if not (getattr(self, name) > 0):
                problems.append(f"{name} must be positive")
        if problems:
            raise InputError("invalid configuration: " + "; ".join(problems))

    def to_json_dict(self) -> dict:
        out = dataclasses.asdict(self)
        if math.isinf(out["K"]):
            out["K"] = "inf"
        return out


_INT_FIELDS = {"N0", "M1", "M2", "N1", "n_max"}
_FLOAT_FIELDS = {"delta", "C1", "theta", "phi1", "K", "r1", "R1",
                 "eps0", "eps1", "tau0", "mu0", "C0"}
_BOOL_FIELDS = {"density_index_aligned"}


def _coerce(key: str, value):
    if key in _INT_FIELDS:
        if value is None:
            return None
        if isinstance(value, bool):
            raise InputError(f"config key {key!r}: expected integer")
        return int(value)
    if key in _FLOAT_FIELDS:
        if isinstance(value, str):
            if value.strip().lower() in {"inf", "infinity"}:
                return math.inf
            return float(value)
        return float(value)
    if key in _BOOL_FIELDS:
        if isinstance(value, bool):
            return value
        if isinstance(value, str):
            if value.strip().lower() in {"true", "1", "yes"}:
                return True
            if value.strip().lower() in {"false", "0", "no"}:
                return False
        raise InputError(f"config key {key!r}: expected a boolean")
    raise InputError(f"unknown config key {key!r}")


def parse_config_text(text: str) -> Config:
    """Build a Config from JSON or from ``key=value`` lines (# comments allowed)."""
    stripped = text.lstrip()
    raw: dict = {}
    if stripped.startswith("{"):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"config is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise InputError("config JSON must be an object")
    else:
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InputError(f"config line {lineno}: expected key=value")
            key, _, value = line.partition("=")
            raw[key.strip()] = value.strip()
    fields = {}
    for key, value in raw.items():
        if key == "n_max" and (value is None or (isinstance(value, str) and value.lower() == "none")):
            fields[key] = None
            continue
        fields[key] = _coerce(key, value)
    try:
        return Config(**fields)
    except TypeError as exc:
        raise InputError(f"bad config: {exc}") from None


def load_config(path: str | None) -> Config:
    if path is None:
        return Config()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read config file {path}: {exc}") from None
    return parse_config_text(text)
