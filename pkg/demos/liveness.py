"""Accepting-cycle synthesis and why the parameter cap matters.

The loop on l0 needs y to stay below p while x keeps resetting, which only
works for a bounded number of rounds. Once y is abstracted above its bound the
search sees a cycle that no real run can follow. Capping p removes it.
"""

from pzone import cycle_synth, load_fixture, select_mode

a = load_fixture("shrinking_loop")
bounds, report = select_mode(a, "auto")
print(f"parameter bound {report.lp_hat}, clock bounds {report.bounds.as_dict()}")

raw, _ = cycle_synth(a, ["l0"], bounds, report=report, correct=False)
print(f"without the cap: {raw}")

fixed, stats = cycle_synth(a, ["l0"], bounds, report=report)
print(f"with the cap:    {fixed} ({stats.status.value})")
