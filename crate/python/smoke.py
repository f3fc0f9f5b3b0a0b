"""Smoke test for the stlnn_py extension.

Build and install first:  pip install --no-build-isolation ./crates/py
Run from the repository root:  python3 python/smoke.py
"""

import os
import sys

import stlnn_py as s

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CONFIGS = os.path.join(ROOT, "configs")

RA = """variables: x y
predicates:
  g1 = x - 4
  g2 = 0.5 - (x - 2.5)^2 - (y - 2.5)^2
formula:
  F[0,18](g1) & G[0,6](!g2)
"""


def main():
    spec = s.Spec(RA)
    assert spec.predicates == ["g1", "g2"]
    assert spec.horizon == 18.0
    clauses = spec.clauses()
    assert len(clauses) == 3, clauses
    print("clauses:", *clauses, sep="\n  ")

    ta = spec.automaton()
    print("automaton: %d states, %d transitions" % (ta.num_states, ta.num_transitions))
    word = [(0, 0.0), (0, 5.0), (1, 10.0)]
    assert ta.accepts(word) == spec.satisfied_by(word) == True
    bad = [(2, 0.0)]
    assert ta.accepts(bad) == spec.satisfied_by(bad) == False
    assert ta.to_dot().startswith("digraph")

    m = s.Abstraction(spec, [0.0, 0.0], [5.0, 5.0])
    d = m.region_of([4.5, 1.0])
    assert m.label(d) == spec.label([4.5, 1.0]) == 0b01
    print("abstraction: %d regions, impure %.4f" % (m.num_regions, m.impure_fraction))

    di = s.Dynamics("double_integrator")
    pts = di.simulate([0.0, 0.0], [([1.0], 1.0)])
    t, x = pts[-1]
    assert abs(t - 1.0) < 1e-12 and abs(x[0] - 0.5) < 1e-9 and abs(x[1] - 1.0) < 1e-9

    cfg = s.Config.load(os.path.join(CONFIGS, "reach_avoid.cfg"))
    sol = cfg.synthesize(seed=3)
    assert sol is not None
    rep = sol.check(cfg.spec)
    assert rep["passed"], rep
    again = s.Solution.parse(sol.to_text())
    assert again.controls == sol.controls
    print("reach-avoid: %d vertices, ends at t = %.3f" % (len(sol), sol.times[-1]))

    b = cfg.bench(trials=3)
    assert b["trials"] == 3 and all(r["verified"] for r in b["rows"] if r["success"])
    print("bench: %d/%d solved" % (b["successes"], b["trials"]))

    try:
        s.Spec("variables: x\nformula:\n  F[0,1](G[0,1](x))\n")
    except ValueError as e:
        print("rejected nested formula:", e)
    else:
        sys.exit("nested formula was accepted")
    print("ok")


if __name__ == "__main__":
    main()
