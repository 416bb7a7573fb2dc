# transfer-matrix spectrum and correlation length
import numpy as np

from qvbs import correlation_length, transfer_matrix, transfer_spectrum

S = 2
for q in (0.2, 0.6, 1.0):
    spec = transfer_spectrum(S, q)
    print(f"q={q}  ratios:", [round(spec.ratio(tj), 6) for tj, _, _ in spec.lambdas],
          f" xi={correlation_length(S, q):.6f}")

# compare with a dense diagonalization
G = transfer_matrix(S, 0.6).matrix
ev = np.linalg.eigvals(G)
ev = ev[np.argsort(-np.abs(ev))]
print("numerical |lambda|:", np.round(np.abs(ev), 6))
print("analytic residual:", transfer_spectrum(S, 0.6).residual)
