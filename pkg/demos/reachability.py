"""Synthesize the parameters that reach a location, with and without clock extrapolation.

Run with ``python3 demos/reachability.py``.
"""

from pzone import Caps, Property, eef, load_fixture, select_mode, validate

a = load_fixture("bounded_loop")
print("model: bounded_loop, target l1")

# without extrapolation the reset loop yields a new zone every iteration
_, stats = eef(a, ["l1"], None, Caps(max_states=500))
print(f"no extrapolation: {stats.status.value} after {stats.states_explored} states")

bounds, report = select_mode(a, "auto")
print(f"class {report.cls}, mode {report.mode}, clock bounds {report.bounds.as_dict()}")
result, stats = eef(a, ["l1"], bounds)
print(f"auto: {stats.status.value} after {stats.states_explored} states, result {result}")

check = validate(a, result, Property.reach(["l1"]))
print(f"oracle: {check['agreements']}/{check['samples']} sampled valuations agree")
