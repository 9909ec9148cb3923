"""
Forks, fairness and retargeting
===============================

The simulator runs miners over a delayed network.  Longer delays let
competing blocks appear before the news arrives, so forks grow with delay.
"""

from puwbench.probes import probe_fairness, probe_fork_rate, probe_retarget
from puwbench import TaskClass
from puwbench.sim import MinerSpec, NetworkSpec, Scenario, SupplySpec, run_scenario
from puwbench.sim.trace import reward_tally


def scenario(*powers, delay=0.0, blocks=500, seed=1, **kw):
    miners = tuple(MinerSpec(i, float(p)) for i, p in enumerate(powers))
    kw.setdefault("retarget", False)
    return Scenario(miners=miners, network=NetworkSpec.constant(delay), duration_blocks=blocks, seed=seed,
                    normalize_power=True, **kw)


print("delay  orphans/block")
for delay in (0, 30, 120, 300):
    r = probe_fork_rate(run_scenario(scenario(1, 1, 1, 1, delay=delay)))
    print(f"{delay:5d}  {r.value:.3f}")

# %%
# Reward share against power share, log-log.  A slope of 1 means proportional rewards.
trace = run_scenario(scenario(1, 2, 4, blocks=3000, seed=5))
fair = probe_fairness(trace)
print(f"slope {fair.value:.3f} +- {fair.dispersion:.3f}; shares", fair.details["shares"])

# %%
# Double the power at height 320 and watch difficulty catch up, 64-block windows.
s = scenario(1, 1, blocks=768, seed=0, retarget=True, retarget_window=64, initial_difficulty=16.0,
             power_schedule=((320, 2.0),))
r = probe_retarget(run_scenario(s), change_height=320)
print("window means after change:", [round(m) for m in r.details["window_means"]])
print(f"back within 10% after {r.value:g} window(s): {r.verdict.value}")

# %%
# A deterministic useful-work task hands every block to the fastest miner.
kov = Scenario(miners=tuple(MinerSpec(i, float(p)) for i, p in enumerate((1, 2, 4))), task_class=TaskClass.KOV,
               duration_blocks=50, seed=1, supply=SupplySpec(count=60, n=16, d=16))
print("k-OV blocks per miner:", reward_tally(run_scenario(kov)))
