"""
Batch pipeline through the command line
=======================================

Write a scenario file, simulate it, probe the trace and print the summary,
the same steps as running ``puwbench`` from a shell.
"""

import tempfile
from pathlib import Path

from puwbench.cli import main

SCENARIO = """\
# three miners, one stubborn, with up to a minute of propagation delay
task_class = cryptopuzzle
seed = 17
retarget_window = 64
initial_difficulty = 4
duration_blocks = 600
delay = uniform:0,60
normalize_power = true
miner.0.power = 2
miner.1.power = 3
miner.2.power = 1
miner.2.strategy = stubborn
"""

with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp)
    (out / "net.txt").write_text(SCENARIO)
    main(["simulate", "--scenario", str(out / "net.txt"), "--out", str(out / "run")])
    print((out / "run" / "trace.csv").read_text().splitlines()[0])
    main(["probe", "--probes", "interblock,fork_rate,common_prefix,chain_quality,chain_growth",
          "--trace", str(out / "run"), "--out", str(out / "report")])
    main(["probe", "--probes", "variability,switchability", "--class", "cryptopuzzle",
          "--param", "nonce_bits=12", "--out", str(out / "tasks")])
    main(["bench-task", "--class", "kov", "--trials", "10", "--param", "n=128", "--out", str(out / "bench")])
