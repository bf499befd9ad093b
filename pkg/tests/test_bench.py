import runpy
from pathlib import Path

BENCH = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_reduce.py"


def test_benchmark_runs_and_backends_agree(capsys):
    mod = runpy.run_path(str(BENCH))
    mod["main"](["--points", "12", "20", "--repeat", "1"])
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split()[0] == "points" and len(lines) == 3
