"""The jit-compiled and pure-numpy kernel backends must agree exactly."""

import os
import subprocess
import sys

import pytest

SCRIPT = """
import sys
from geomquad import SimConfig, build_case1
from geomquad.sim import run
from geomquad.trace_io import trace_to_csv_text

res = run(build_case1(), SimConfig(duration=1.0), with_report=False)
sys.stdout.write(trace_to_csv_text(res.records))
"""


def run_backend(numba_flag: str) -> str:
    env = dict(os.environ, GEOMQUAD_NUMBA=numba_flag)
    proc = subprocess.run(
        [sys.executable, "-c", SCRIPT],
        env=env,
        capture_output=True,
        text=True,
        timeout=300,
    )
    assert proc.returncode == 0, proc.stderr
    return proc.stdout


@pytest.mark.slow
def test_backends_bit_identical():
    assert run_backend("1") == run_backend("0")


def test_backend_flag_detected():
    env = dict(os.environ, GEOMQUAD_NUMBA="0")
    proc = subprocess.run(
        [sys.executable, "-c", "import geomquad._kernels as k; print(k.USE_NUMBA)"],
        env=env,
        capture_output=True,
        text=True,
    )
    assert proc.stdout.strip() == "False"
