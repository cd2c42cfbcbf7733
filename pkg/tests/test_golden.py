import os
import shutil
from pathlib import Path

import pytest

from runner import parse_config, run

GOLDEN_DIR = Path(__file__).parent / "golden"
GOLDEN_NAME = "trace_czsd_run0_seed7.csv"
UPDATE_ENV = "CZSD_UPDATE_GOLDEN"

GOLDEN_CONFIG = {
    "problem": {"problem": "logistic", "n": 5, "p": 4, "m": 20, "seed": 2},
    "topology": {"kind": "ring"},
    "compressor": {"kind": "dithered", "bits": 2},
    "schedule": {"regime": "table1"},
    "iterations": 40,
    "cadence": 5,
    "eval_batch": 8,
    "seeds": [7],
    "x0": "normal",
    "lyapunov": True,
    "timing": False,
}


def test_trace_matches_golden_file(tmp_path):
    run(parse_config(GOLDEN_CONFIG), tmp_path)
    produced = tmp_path / GOLDEN_NAME
    golden = GOLDEN_DIR / GOLDEN_NAME

    if os.environ.get(UPDATE_ENV) == "1":
        GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(produced, golden)
        pytest.skip(f"golden trace written to {golden}")

    if not golden.exists():
        pytest.fail(f"golden trace {golden} is missing; regenerate it with {UPDATE_ENV}=1")
    assert produced.read_bytes() == golden.read_bytes()
