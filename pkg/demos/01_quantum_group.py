# q-numbers, q-Clebsch-Gordan tables and recoupling symbols
import numpy as np

from qvbs import q6j, q_number, qcg

q = 0.5
print("[n] at q=0.5:", [round(q_number(n, q), 6) for n in range(1, 6)])
print("[n] at q=1:  ", [q_number(n, 1.0) for n in range(1, 6)])

# spins are doubled: two_j = 2 is spin 1
t = qcg(2, 2, q)
for (m1, m2, J, M), v in t.items():
    if J == 0:
        print(f"<1 {m1/2:+.0f}; 1 {m2/2:+.0f} | 0 0>_q = {v:+.6f}")

# the coupled basis is orthonormal
R = t.matrix()
print("max |R R^T - 1| =", np.abs(R @ R.T - np.eye(9)).max())

# recoupling symbol {S j S/2; S/2 S/2 S/2} for S=2 as q varies
for q in (0.2, 0.5, 1.0):
    print(f"q={q}:", [round(q6j(4, 2 * j, 2, 2, 2, 2, q), 6) for j in range(3)])
