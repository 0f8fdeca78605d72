"""Walk through one hard instance.

A hard instance starts from the proper coloring by minimum element and
squeezes the last class into the legal palette, so every monochromatic edge
touches one of the few recolored vertices. We look at that structure, then
let each solver find an edge.
"""

from kneser import make_hard_instance, solve_bruteforce, solve_fpt, solve_schrijver, verify_edge
from kneser.combinatorics import binomial, schrijver_vertex_count
from kneser.elimination import EliminationParams
from kneser.solvers import SolverParams, enumerate_monochromatic_edges

# Small enough to list every edge.
inst = make_hard_instance(10, 2, seed=3)
recolored = inst.oracle.recolored_vertices()
print("recolored vertices:", recolored, [inst.color(A) for A in recolored])
edges = enumerate_monochromatic_edges(inst)
print(f"{len(edges)} monochromatic edges, e.g. {edges[:3]}")

for name, res in [
    ("brute", solve_bruteforce(inst)),
    ("schrijver", solve_schrijver(inst)),
    ("fpt", solve_fpt(inst, seed=0)),
]:
    print(f"{name:>9}: {res.serialize()}  valid={verify_edge(inst, res.A, res.B)}")
print(f"schrijver queried {schrijver_vertex_count(10, 2)} of {binomial(10, 2)} vertices")

# Past n_stop = 8k^4 = 128 the randomized solver runs elimination rounds.
# With m = n^3 samples per round the first round almost always sees an edge.
big = make_hard_instance(132, 2, seed=7)
sampling = SolverParams(elimination=EliminationParams(exhaustive_small_k=False))
res = solve_fpt(big, seed=1, params=sampling)
print("n=132:", res.serialize(), f"elapsed={res.elapsed:.2f}s")
