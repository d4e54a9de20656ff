import re
import time

import pytest

from qcrisk.classifier import TrainConfig, train_qc
from qcrisk.core import EncoderSpec
from qcrisk.data import gen_parity, split
from qcrisk.measurements import basis_measurements

PARITY_SEEDS = (0, 1, 2)
PARITY_SPLIT_SEED = 11

CRITERIA = {
    1: "parity training reaches perfect train and test accuracy in budget",
    2: "class features collapse during parity training",
    3: "risk curve over parameter count has an interior basin",
    4: "Monte-Carlo moments match the closed-form oracles",
    5: "random-circuit outputs concentrate within their bounds",
    6: "constructed optimum hits its analytic risk and alignment",
    7: "simplex frame Gram values and SIC resolution of identity",
    8: "covering numbers, bound monotonicity, occupied-cell count",
    9: "shift-rule and backprop gradients match finite differences",
    10: "image ingestion contract and wide-register smoke run",
}

_verdicts = {}


@pytest.fixture(scope="session")
def parity_runs():
    """The reference parity experiment shared by several acceptance checks:
    6 wires, 3 layers, 3 seeds, 50 epochs each."""
    full = gen_parity(6)
    train, test = split(full, 0.75, PARITY_SPLIT_SEED)
    encoder = EncoderSpec("basis", 6)
    ms = basis_measurements(2, 1)
    records = []
    start = time.perf_counter()
    for seed in PARITY_SEEDS:
        config = TrainConfig(
            n_layers=3,
            epochs=50,
            learning_rate=0.5,
            batch_size=4,
            seed=seed,
            encoder=encoder,
            measurements=ms,
        )
        records.append(train_qc(train, test, config))
    elapsed = time.perf_counter() - start
    return {
        "records": records,
        "train": train,
        "test": test,
        "encoder": encoder,
        "measurements": ms,
        "elapsed": elapsed,
    }


def pytest_runtest_logreport(report):
    match = re.search(r"test_criterion_(\d+)", report.nodeid)
    if match is None:
        return
    num = int(match.group(1))
    if report.when == "call":
        _verdicts[num] = _verdicts.get(num, True) and report.passed
    elif report.failed:  # setup or teardown error
        _verdicts[num] = False


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_verdicts):
        verdict = "PASS" if _verdicts[num] else "FAIL"
        terminalreporter.write_line(f"criterion {num:2d}: {verdict} - {CRITERIA[num]}")
