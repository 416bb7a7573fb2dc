# Renyi and von Neumann entropies against anisotropy
import math

from qvbs import entropy_large_S, renyi_dsl, vn_dsl

print(" q     S=1      S=2      S=5      S=10")
for q in (0.05, 0.2, 0.4, 0.6, 0.8, 1.0):
    print(f"{q:4.2f}", "  ".join(f"{vn_dsl(S, q):7.4f}" for S in (1, 2, 5, 10)))

print("bound 2 ln(S+1):", [round(2 * math.log(S + 1), 4) for S in (1, 2, 5, 10)])

q = 0.5
print("alpha=2 at q=0.5:", [round(renyi_dsl(S, 2.0, q), 6) for S in (1, 10, 100, 200)])
print("large-S limit:   ", round(entropy_large_S(q, 2.0), 6))
