"""Server configuration file: JSON, validated field by field."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, ValidationError, field_validator

from ..layout import GainMode, GainPolicy


class ConfigError(Exception):
    pass


class GainPolicyConfig(BaseModel):
    mode: Literal["RankTable", "InverseSquare"] = "RankTable"
    rank_table: list[float] = [1.0, 0.25, 0.1]

    def to_policy(self) -> GainPolicy:
        return GainPolicy(GainMode(self.mode), tuple(self.rank_table))


class ServerConfig(BaseModel):
    listen_addr: str = "127.0.0.1:8700"
    room_cap: int = Field(default=16, ge=1)
    idle_timeout_s: float = Field(default=300.0, gt=0)
    calibration_profile: str
    gain_policy: GainPolicyConfig = GainPolicyConfig()
    gesture_map: dict[str, str] = {"Right": "Forward", "Left": "Backward"}
    event_log: str | None = None

    @field_validator("listen_addr")
    @classmethod
    def _addr_has_port(cls, v: str) -> str:
        host, _, port = v.rpartition(":")
        if not host or not port.isdigit() or not 0 <= int(port) <= 65535:
            raise ValueError("must be host:port")
        return v

    @field_validator("gesture_map")
    @classmethod
    def _gesture_map_valid(cls, v: dict[str, str]) -> dict[str, str]:
        for key, val in v.items():
            if key not in ("Left", "Right"):
                raise ValueError(f"wave direction must be Left or Right, got {key!r}")
            if val not in ("Forward", "Backward"):
                raise ValueError(f"rotation must be Forward or Backward, got {val!r}")
        return v

    def host_port(self) -> tuple[str, int]:
        host, _, port = self.listen_addr.rpartition(":")
        return host, int(port)


def _format_validation_error(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(piece) for piece in err["loc"]) or "config"
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)


def load_config(path) -> ServerConfig:
    """Load and validate; errors name the offending field."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except ValueError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    try:
        return ServerConfig.model_validate(doc)
    except ValidationError as exc:
        raise ConfigError(_format_validation_error(exc)) from exc
