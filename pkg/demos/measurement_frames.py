"""The measurement frames and their Gram fingerprints.

Three readout constructions, three geometries. Basis projectors are
orthogonal and make the fixed-operator optimum exact. Simplex frames are
the maximally spread unit vectors: every pairwise inner product equals
-1/(K-1), the same value the class means converge to when the loss also
shapes the operators. The qubit SIC set is the 4-outcome symmetric
measurement whose states all overlap equally.
"""

import numpy as np

from qcrisk import (
    basis_measurements,
    mean_subtracted_gram,
    qubit_sic_povm,
    simplex_etf_operators,
    simplex_frame,
    validate_set,
)


def main():
    print("simplex frame pairwise inner products (target -1/(K-1)):")
    for k in range(2, 7):
        frame = simplex_frame(k)
        gram = frame.T @ frame
        off = gram[~np.eye(k, dtype=bool)]
        print(f"  K={k}: {off.mean():+.6f} (target {-1.0 / (k - 1):+.6f}, "
              f"spread {np.ptp(off):.1e})")

    print("\nmean-subtracted Gram of orthogonal class means (target -1/K):")
    for k in range(2, 7):
        means = np.zeros((k, 8, 8), dtype=complex)
        for i in range(k):
            means[i, i, i] = 1.0
        off = mean_subtracted_gram(means)[~np.eye(k, dtype=bool)]
        print(f"  K={k}: {off.mean():+.6f} (target {-1.0 / k:+.6f})")

    print("\nvalidation summaries:")
    for name, ms in (
        ("basis projectors (K=2, D=1)", basis_measurements(2, 1)),
        ("simplex frame operators (K=3, D=2)", simplex_etf_operators(3, 2)),
        ("qubit SIC set", qubit_sic_povm()),
    ):
        checks = validate_set(ms)
        flags = ", ".join(
            f"{key}={checks[key]}"
            for key in ("n_operators", "d_qubits", "fitted_ortho_constant",
                        "norm_bound", "spans_full_space", "passed")
        )
        print(f"  {name}: {flags}")

    sic = qubit_sic_povm()
    print("\nqubit SIC set resolves the identity:")
    print(np.array_str(sic.operators.sum(axis=0).real, precision=6,
                       suppress_small=True))
    traces = np.einsum("kij,lji->kl", sic.operators, sic.operators).real
    overlaps = np.sqrt(4.0 * traces)
    print(f"state overlaps off the diagonal: {overlaps[0, 1]:.6f} "
          f"(target 1/sqrt(3) = {1.0 / np.sqrt(3.0):.6f})")


if __name__ == "__main__":
    main()
