"""What a single elimination round reports.

With the full n^3 samples a round on a hard instance finds an edge. Starving
it of samples shows the other branch: the most frequent color and the element
most common on it, which the solver would then strip from the instance.
"""

import numpy as np

from kneser.elimination import EliminationParams, PopularPair, eliminate, verify_popular_pair
from kneser.oracles import make_canonical_coloring, make_hard_instance

n, k = 128, 2
X, C = list(range(1, n + 1)), list(range(1, n - 2 * k + 2))
few = EliminationParams(sample_count_override=n, exhaustive_small_k=False)

for seed in range(12):
    inst = make_hard_instance(n, k, seed)
    outcome, stats = eliminate(n, k, X, C, inst.oracle, np.random.default_rng(seed), few)
    line = f"seed {seed:>2}: {type(outcome).__name__}"
    if isinstance(outcome, PopularPair):
        i, j = outcome.i_star, outcome.j_star
        p = verify_popular_pair(n, k, X, inst.oracle, i, j)
        line += f" color={i} element={j} alpha~={stats.alpha_tilde[i]} min Pr={p} (>= 1/{16 * n}: {p >= 1 / (16 * n)})"
    print(line)

# The proper coloring uses one color outside the palette; a round spots it.
canon = make_canonical_coloring(20, 3)
outcome, _ = eliminate(20, 3, range(1, 21), range(1, 16), canon.oracle, np.random.default_rng(0),
                       EliminationParams(relax_size_threshold=True))
print("canonical (20,3):", outcome)
