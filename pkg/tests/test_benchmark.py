import importlib.util
from pathlib import Path

import pytest

from yarnvision import _accel

BENCH = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"


@pytest.mark.skipif(not _accel.HAS_NUMBA, reason="numba not installed")
def test_benchmark_runs_and_backends_agree():
    spec = importlib.util.spec_from_file_location("bench_kernels", BENCH)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    rows = mod.run(size=48, repeat=1)
    assert {r["kernel"] for r in rows} == {"window_median", "window_median_mad", "box_sum", "label", "zhang_suen"}
    assert all(r["numba_ms"] >= 0 and r["numpy_ms"] >= 0 for r in rows)
