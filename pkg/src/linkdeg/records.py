"""Uniform JSON records and the persisted orientation calibration."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1
CONFIG_ENV = "LINKDEG_CONFIG"


def _plain(obj):
    """Convert numpy scalars/arrays (recursively) into JSON-ready Python values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj


def config_hash(command: str, inputs: dict) -> str:
    payload = json.dumps({"command": command, "inputs": _plain(inputs)}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass
class ResultRecord:
    command: str
    inputs: dict
    value: float | int | None
    residual: float | None = None
    provenance: list = field(default_factory=list)
    wall_time_ms: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def config_hash(self) -> str:
        return config_hash(self.command, self.inputs)

    def to_dict(self) -> dict:
        return _plain(
            {
                "schema": SCHEMA_VERSION,
                "command": self.command,
                "inputs": self.inputs,
                "value": self.value,
                "residual": self.residual,
                "provenance": self.provenance,
                "wall_time_ms": int(self.wall_time_ms),
                "config_hash": self.config_hash,
                **self.extra,
            }
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False, separators=(",", ":"))


# ---------------------------------------------------------------------------
# calibration


def default_config_path() -> Path:
    env = os.environ.get(CONFIG_ENV)
    if env:
        return Path(env)
    return Path.home() / ".config" / "linkdeg" / "calibration.json"


@dataclass
class CalibrationState:
    """Per-dimension sign making the base torus pair report linking +1."""

    signs: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    REFERENCE_DIM = 4

    @property
    def global_sign(self) -> int | None:
        """Sign of the reference pipeline (n = 4), or None before calibration."""
        return self.sign_for(self.REFERENCE_DIM) if self.fixed(self.REFERENCE_DIM) else None

    def fixed(self, n: int) -> bool:
        return str(n) in self.signs

    def sign_for(self, n: int) -> int:
        return int(self.signs[str(n)])

    def fix(self, n: int, raw_value: float) -> int:
        if self.fixed(n):
            return self.sign_for(n)
        sign = 1 if raw_value > 0 else -1
        self.signs[str(n)] = sign
        self.raw[str(n)] = float(raw_value)
        return sign

    def to_dict(self) -> dict:
        return {"schema": SCHEMA_VERSION, "global_sign": self.global_sign, "signs": dict(sorted(self.signs.items())), "raw": dict(sorted(self.raw.items()))}

    @classmethod
    def load(cls, path: Path | None = None) -> "CalibrationState":
        path = Path(path) if path is not None else default_config_path()
        if not path.exists():
            return cls()
        data = json.loads(path.read_text())
        return cls(dict(data.get("signs", {})), dict(data.get("raw", {})))

    def save(self, path: Path | None = None) -> Path:
        """Write atomically: temp file in the same directory, then rename."""
        path = Path(path) if path is not None else default_config_path()
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".calib-", suffix=".json")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
                fh.write("\n")
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return path
