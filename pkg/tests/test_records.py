import json

import numpy as np
import pytest

from linkdeg.records import CalibrationState, ResultRecord, config_hash


def test_record_schema():
    rec = ResultRecord("link", {"n": 4, "x": np.array([0.1, 0.2])}, np.int64(1), 1e-4, ["gauss_map"], 12)
    data = json.loads(rec.to_json())
    assert data["schema"] == 1
    assert data["value"] == 1 and data["inputs"]["x"] == [0.1, 0.2]
    assert set(data) >= {"command", "inputs", "value", "residual", "provenance", "wall_time_ms", "config_hash"}


def test_config_hash_ignores_key_order():
    assert config_hash("c", {"a": 1, "b": 2}) == config_hash("c", {"b": 2, "a": 1})
    assert config_hash("c", {"a": 1}) != config_hash("d", {"a": 1})
    assert len(config_hash("c", {})) == 16


def test_calibration_is_fixed_once(tmp_path):
    state = CalibrationState()
    assert state.global_sign is None
    assert state.fix(4, -0.9999) == -1
    assert state.fix(4, 0.9999) == -1
    assert state.global_sign == -1
    path = state.save(tmp_path / "sub" / "calib.json")
    back = CalibrationState.load(path)
    assert back.signs == {"4": -1}
    assert back.raw["4"] == pytest.approx(-0.9999)


def test_missing_file_is_uncalibrated(tmp_path):
    assert CalibrationState.load(tmp_path / "none.json").signs == {}
