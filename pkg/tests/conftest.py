import json

import pytest

from linkdeg import cli


@pytest.fixture
def config_path(tmp_path, monkeypatch):
    """Calibration file isolated per test."""
    path = tmp_path / "calibration.json"
    monkeypatch.setenv("LINKDEG_CONFIG", str(path))
    return path


@pytest.fixture
def run_cli(capsys, config_path):
    def run(*argv):
        code = cli.main([str(a) for a in argv])
        out, err = capsys.readouterr()
        records = [json.loads(line) for line in out.splitlines() if line.strip()]
        return code, records, err

    return run
