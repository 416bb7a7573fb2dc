# brute-force checks on small rings
from qvbs import build_vbs_state, crosscheck_rdm, hamiltonian_annihilation_check, partial_trace

for S, L in ((1, 6), (2, 4), (3, 3)):
    res = hamiltonian_annihilation_check(S, L, 0.7)
    print(f"S={S} L={L}: max |Pi_s psi| / |psi| = {res:.1e}")

state = build_vbs_state(1, 8, 0.4)
rho = partial_trace(state, 3)
print("rho_3 shape", rho.shape, "trace", round(rho.trace().real, 12))

for l in (1, 2, 3):
    print(f"l={l}: deviation from transfer-matrix spectrum {crosscheck_rdm(1, l, 8, 0.4):.1e}")
