import numpy as np
import pytest

from qcrisk.core import FeatureState
from qcrisk.geometry import (
    GeometryReport,
    alignment_matrix,
    as_matrices,
    bloch_vector,
    bloch_vectors,
    class_means,
    discrimination_lower_bound,
    geometry_report,
    mean_overlap_matrix,
    mean_subtracted_gram,
    report_to_dict,
    within_class_spread,
)
from qcrisk.measurements import basis_measurements


def orthogonal_pure_means(k, dim):
    means = np.zeros((k, dim, dim), dtype=complex)
    for i in range(k):
        means[i, i, i] = 1.0
    return means


def random_states(rng, n, d_qubits):
    out = []
    for _ in range(n):
        v = rng.normal(size=2**d_qubits) + 1j * rng.normal(size=2**d_qubits)
        v /= np.linalg.norm(v)
        out.append(np.outer(v, v.conj()))
    return np.array(out)


def test_as_matrices_accepts_arrays_states_and_lists():
    arr = random_states(np.random.default_rng(0), 3, 1)
    assert as_matrices(arr) is not None
    states = [FeatureState(1, m) for m in arr]
    assert np.allclose(as_matrices(states), arr)
    assert np.allclose(as_matrices(list(arr)), arr)


def test_class_means_averages_per_class():
    feats = np.array([np.diag([1.0, 0.0]), np.diag([0.0, 1.0]), np.diag([1.0, 0.0])])
    means = class_means(feats, [0, 0, 1], 2)
    assert np.allclose(means[0], np.eye(2) / 2)
    assert np.allclose(means[1], np.diag([1.0, 0.0]))
    with pytest.raises(ValueError, match="no examples"):
        class_means(feats, [0, 0, 0], 2)
    with pytest.raises(ValueError, match="length"):
        class_means(feats, [0, 0], 2)


def test_spread_of_two_opposite_projectors_is_sqrt2():
    # both sit at Frobenius distance 1/sqrt(2) from their mean I/2
    feats = np.array([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    spread = within_class_spread(feats, [0, 0], 1)
    assert spread[0] == pytest.approx(np.sqrt(2.0))


def test_spread_is_zero_only_for_collapsed_classes():
    rng = np.random.default_rng(1)
    feats = random_states(rng, 4, 1)
    feats[2] = feats[0]
    feats[3] = feats[1]
    spread = within_class_spread(feats[[0, 2, 1, 3]], [0, 0, 1, 1], 2)
    assert np.allclose(spread, 0.0, atol=1e-12)
    spread = within_class_spread(feats[[0, 1, 2, 3]], [0, 0, 1, 1], 2)
    assert spread[0] > 0.1


def test_mean_overlap_matrix_diagonal_is_purity():
    rng = np.random.default_rng(2)
    feats = random_states(rng, 3, 2)
    m2 = mean_overlap_matrix(feats)
    assert np.allclose(np.diag(m2), 1.0, atol=1e-12)  # pure states
    assert np.allclose(m2, m2.T, atol=1e-12)
    assert np.all(m2 >= -1e-12)
    ortho = orthogonal_pure_means(3, 4)
    assert np.allclose(mean_overlap_matrix(ortho), np.eye(3), atol=1e-12)


def test_alignment_matrix_against_projectors():
    means = orthogonal_pure_means(2, 2)
    ms = basis_measurements(2, 1)
    assert np.allclose(alignment_matrix(means, ms), np.eye(2), atol=1e-12)
    assert np.allclose(alignment_matrix(means, ms.operators), np.eye(2))
    with pytest.raises(ValueError, match="dimension"):
        alignment_matrix(orthogonal_pure_means(2, 4), ms)


def test_mean_subtracted_gram_orthogonal_means():
    for k in range(2, 7):
        gram = mean_subtracted_gram(orthogonal_pure_means(k, 8))
        off = gram[~np.eye(k, dtype=bool)]
        assert np.allclose(off, -1.0 / k, atol=1e-12)
        assert np.allclose(gram.sum(axis=1), 0.0, atol=1e-12)


def test_mean_subtracted_gram_antipodal_pair():
    # two Bloch-antipodal pure states: centered gram off-diagonal -1/2
    feats = np.array([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    gram = mean_subtracted_gram(feats)
    assert gram[0, 1] == pytest.approx(-0.5)
    assert gram[0, 0] == pytest.approx(0.5)


def test_mean_subtracted_gram_identical_means_is_zero():
    feats = np.array([np.eye(2) / 2, np.eye(2) / 2])
    assert np.allclose(mean_subtracted_gram(feats), 0.0, atol=1e-15)


def test_discrimination_bound_values():
    assert discrimination_lower_bound(3, 0.0, 2) == 0.0
    # K=4 with squared overlap 1/3 and two copies: 3/8 * 1/3 = 1/8
    assert discrimination_lower_bound(4, 1.0 / 3.0, 2) == pytest.approx(1.0 / 8.0)
    # one copy uses the amplitude overlap, the square root of fidelity
    assert discrimination_lower_bound(2, 0.25, 1) == pytest.approx(0.125)
    assert discrimination_lower_bound(2, 1.0, 7) == pytest.approx(0.25)


def test_discrimination_bound_monotone_in_copies():
    values = [discrimination_lower_bound(3, 0.5, m) for m in range(1, 6)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_discrimination_bound_validation():
    with pytest.raises(ValueError, match="two classes"):
        discrimination_lower_bound(1, 0.5, 1)
    with pytest.raises(ValueError, match="fidelity"):
        discrimination_lower_bound(2, 1.5, 1)
    with pytest.raises(ValueError, match="n_copies"):
        discrimination_lower_bound(2, 0.5, 0)


def test_bloch_vector_cardinal_states():
    assert np.allclose(bloch_vector(np.diag([1.0, 0.0])), [0, 0, 1])
    assert np.allclose(bloch_vector(np.diag([0.5, 0.5])), [0, 0, 0])
    plus = np.full((2, 2), 0.5, dtype=complex)
    assert np.allclose(bloch_vector(plus), [1, 0, 0])
    with pytest.raises(ValueError, match="2x2"):
        bloch_vector(np.eye(4))


def test_bloch_vectors_norm_is_purity_radius():
    rng = np.random.default_rng(3)
    feats = random_states(rng, 5, 1)
    vecs = bloch_vectors(feats)
    assert vecs.shape == (5, 3)
    assert np.allclose(np.linalg.norm(vecs, axis=1), 1.0, atol=1e-10)


def test_geometry_report_roundtrip():
    rng = np.random.default_rng(4)
    feats = random_states(rng, 6, 1)
    labels = np.array([0, 0, 0, 1, 1, 1])
    report = geometry_report(feats, labels, 2, ms=basis_measurements(2, 1))
    assert isinstance(report, GeometryReport)
    assert report.spread_per_class.shape == (2,)
    assert report.alignment.shape == (2, 2)
    assert np.all(report.mean_purities <= 1.0 + 1e-12)
    doc = report_to_dict(report)
    assert doc["n_classes"] == 2
    assert np.allclose(doc["gram_mean_subtracted"], report.gram_mean_subtracted)
    bare = geometry_report(feats, labels, 2)
    assert bare.alignment is None
    assert report_to_dict(bare)["alignment"] is None
