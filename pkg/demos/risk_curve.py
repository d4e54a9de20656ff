"""Sweep the parameter count on a small parity task and fit the risk curve.

Four-wire parity keeps each run cheap: layer counts 1 through 6 give 12 to
72 trainable angles. Test loss falls while capacity is the bottleneck,
then creeps back up once the circuit can overfit the 12-example training
set, and a low-degree polynomial fit locates the basin between the two
regimes. The full-size version of this sweep lives behind
`qcrisk riskcurve`.
"""

from qcrisk import (
    EncoderSpec,
    SweepPlan,
    aggregate_points,
    basis_measurements,
    choose_fit,
    evaluate_fit,
    gen_parity,
    run_sweep,
    split,
    with_basin,
)


def main():
    full = gen_parity(4)
    train, test = split(full, 0.75, seed=5)
    plan = SweepPlan(
        tuples=tuple((train.n, 12 * layers, 40) for layers in range(1, 7)),
        seeds=(0, 1, 2),
        kind="qc",
        batch_size=4,
        qc_learning_rate=0.5,
        encoder=EncoderSpec("basis", 4),
        measurements=basis_measurements(2, 1),
    )
    records = run_sweep(train, test, plan)

    points = aggregate_points(records, tail_window=5)
    print(f"{'N_t':>5} {'mean test loss':>15} {'std':>9}")
    for n_params, mean, std in points:
        print(f"{int(n_params):>5} {mean:>15.4f} {std:>9.4f}")

    fit = with_basin(choose_fit(points))
    print(f"\ndegree {fit.degree} fit, residual {fit.residual:.3e}")
    basin = fit.basin
    kind = "boundary" if basin.at_boundary else "interior"
    print(f"{kind} minimum at N_t = {basin.x_star:.1f}, "
          f"fitted loss {basin.value:.4f}")

    print("\nfitted curve:")
    for n_params in range(12, 73, 12):
        print(f"  N_t {n_params:>3}: {float(evaluate_fit(fit, n_params)):.4f}")


if __name__ == "__main__":
    main()
