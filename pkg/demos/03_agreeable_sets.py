"""Agreeable sets through the Kneser solvers, and back.

Forward: agents with additive utilities become a coloring; a monochromatic
edge yields a small set every agent likes at least as much as the rest.
Backward: a hard coloring becomes 0/1 utilities; an agreeable set is peeled
down to an edge.
"""

import numpy as np

from kneser import agreeable as ag
from kneser.oracles import make_hard_instance, verify_edge

rng = np.random.default_rng(2)
profile = ag.random_additive_profile(10, 3, rng)
for strategy in ("brute", "schrijver", "fpt"):
    sol = ag.solve_agreeable(profile, strategy, seed=0)
    print(f"{strategy:>9}: S={sorted(sol.S)} size={sol.size} bound={sol.bound} "
          f"margins={[str(v) for v in sol.margins.values()]}")

inst = make_hard_instance(8, 2, seed=4)
derived = ag.reduce_kneser_to_agreeable(inst)
sol = ag.search_agreeable_exhaustive(derived)
peel = ag.map_agreeable_solution_back(inst, sol.S)
print(f"derived profile: {derived.ell} agents over {derived.m} items; smallest agreeable set {sorted(sol.S)}")
print(f"peeled to A={peel.A} B={peel.B} color={peel.color} after {peel.removals} removals, "
      f"valid={verify_edge(inst, peel.A, peel.B)}")
