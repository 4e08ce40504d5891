import os
from pathlib import Path

import numpy as np
import pytest

REPO = Path(__file__).resolve().parents[1]
DATA_DIR = Path(os.environ.get("DEEPDEFECT_DATA_DIR", REPO / "data" / "nasa"))

_criteria = []


def dataset_path(name):
    """Path of ``<name>.arff`` in the data directory, or None when absent."""
    p = DATA_DIR / f"{name}.arff"
    return p if p.exists() else None


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def write_smoke_arff(path, n=10, seed=0):
    """Small two-class ARFF file: class 1 rows are shifted up by 2."""
    r = np.random.default_rng(seed)
    lines = ["@relation smoke", "@attribute a numeric", "@attribute b numeric",
             "@attribute c numeric", "@attribute defects {false,true}", "@data"]
    for i in range(n):
        label = i % 2
        x = r.normal(2.0 * label, 1.0, 3)
        lines.append(",".join(f"{v:.6f}" for v in x) + ("," + ("true" if label else "false")))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def smoke_arff(tmp_path):
    return write_smoke_arff(tmp_path / "smoke.arff")


@pytest.fixture(scope="session")
def criteria_log():
    return _criteria


def pytest_terminal_summary(terminalreporter):
    if _criteria:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_criteria, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
