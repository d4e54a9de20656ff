"""Sample random-circuit outputs and compare their spread to the bounds.

Two quantities concentrate as the register grows: the overlap between two
independently drawn random-parameter states (around 1/2^N) and the
expectation of a fixed observable on the reduced output state (around
Tr(o)/2^D). The deviation bounds hold with probability 1 - delta; the
empirical violation rate should sit well under delta, and it does, since
the bounds come from a variance argument that is loose at the tails.
"""

import numpy as np

from qcrisk import verify_ansatz_concentration, verify_encoder_concentration

PAULI_Z = np.diag([1.0, -1.0]).astype(complex)


def main():
    delta = 0.1
    trials = 1000
    print(f"{trials} trials per row, delta = {delta}\n")
    print(f"{'quantity':>15} {'N':>3} {'depth':>6} {'mean':>9} "
          f"{'reference':>10} {'bound':>8} {'violations':>11}")
    for n_qubits in (2, 3, 4):
        depth = 2 * n_qubits
        enc = verify_encoder_concentration(n_qubits, depth, trials, delta, seed=1)
        print(f"{'state overlap':>15} {n_qubits:>3} {depth:>6} {enc.mean:>9.5f} "
              f"{enc.reference:>10.5f} {enc.bound:>8.4f} "
              f"{enc.violation_rate:>11.4f}")
        ans = verify_ansatz_concentration(
            n_qubits, 1, depth, trials, delta, PAULI_Z, seed=2)
        print(f"{'Z expectation':>15} {n_qubits:>3} {depth:>6} {ans.mean:>9.5f} "
              f"{ans.reference:>10.5f} {ans.bound:>8.4f} "
              f"{ans.violation_rate:>11.4f}")

    print("\nshallow circuits have not converged to the random-state average;")
    print("depth around twice the wire count is where the spread settles:")
    print(f"{'depth':>6} {'variance':>10}")
    for depth in (1, 2, 4, 8, 16):
        enc = verify_encoder_concentration(4, depth, trials, delta, seed=3)
        print(f"{depth:>6} {enc.variance:>10.2e}")


if __name__ == "__main__":
    main()
