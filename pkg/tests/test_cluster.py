import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.spatial.distance import cdist

from headclust.cluster import (
    assign,
    compute_inertia,
    dense_distance,
    elbow_curve,
    fit_best,
    kmeans_fit,
    kmedian_fit,
    kmedoids_fit,
    medoid_of,
    minibatch_kmeans_fit,
    pairwise,
    update_means,
    update_medians,
)
from headclust.cluster._core import _repair_empty
from oracles import brute_force_medoid, brute_force_sql2, random_binary, set_partitions

SCIPY_METRIC = {"sql2": "sqeuclidean", "l2": "euclidean", "l1": "cityblock", "cosine": "cosine"}
KINDS = list(SCIPY_METRIC)


# -- distances ---------------------------------------------------------------

@pytest.mark.parametrize("kind", KINDS)
def test_pairwise_matches_scipy(kind):
    rng = np.random.default_rng(3)
    X = random_binary(rng, 40, 12, 0.3)
    X[X.sum(axis=1) == 0, 0] = 1  # cosine is undefined for zero rows in scipy
    C = rng.random((5, 12))
    np.testing.assert_allclose(pairwise(sp.csr_matrix(X), C, kind), cdist(X, C, SCIPY_METRIC[kind]),
                               atol=1e-12)


@pytest.mark.parametrize("kind", KINDS)
def test_pairwise_nonbinary_rows(kind):
    rng = np.random.default_rng(4)
    X = rng.normal(size=(10, 6)) * (rng.random((10, 6)) < 0.5)
    X[:, 0] += 3.0
    C = rng.normal(size=(3, 6))
    np.testing.assert_allclose(pairwise(sp.csr_matrix(X), C, kind), cdist(X, C, SCIPY_METRIC[kind]),
                               atol=1e-10)


def test_cosine_zero_row_is_distance_one():
    X = sp.csr_matrix(np.array([[0.0, 0.0], [1.0, 0.0]]))
    D = pairwise(X, np.array([[1.0, 1.0], [0.0, 0.0]]), "cosine")
    assert D[0, 0] == 1.0 and D[0, 1] == 1.0 and D[1, 1] == 1.0


@pytest.mark.parametrize("kind", KINDS)
def test_dense_distance_matches_scipy(kind):
    a, b = np.array([1.0, 0, 1, 1]), np.array([0.5, 0.5, 0, 1])
    assert dense_distance(a, b, kind) == pytest.approx(cdist([a], [b], SCIPY_METRIC[kind])[0, 0])


def test_pairwise_block_split_invariant(monkeypatch):
    from headclust.cluster import _distance

    rng = np.random.default_rng(5)
    X = sp.csr_matrix(random_binary(rng, 300, 20, 0.2))
    C = rng.random((4, 20))
    ref = pairwise(X, C, "l1")
    monkeypatch.setattr(_distance, "BLOCK_ROWS", 7)
    for t in (1, 2, 8):
        assert np.array_equal(pairwise(X, C, "l1", n_threads=t), ref)
        assert np.array_equal(pairwise(X, C, "sql2", n_threads=t), pairwise(X, C, "sql2"))


# -- elementary steps ----------------------------------------------------------

def test_inertia_zero_when_each_point_is_its_centroid(four_rows):
    assert compute_inertia(four_rows, [0, 1, 2, 3], four_rows) == 0.0


def test_inertia_hand_sum(four_rows):
    C = [[1, 0.5, 0], [0, 0.5, 1]]
    assert compute_inertia(four_rows, [0, 0, 1, 1], C, "sql2") == pytest.approx(1.0, abs=1e-12)


def test_inertia_single_row():
    assert compute_inertia([[1, 0, 1]], [0], [[1, 0, 1]], "l2") == 0.0


@pytest.mark.parametrize("kind", KINDS)
def test_inertia_matches_definition(kind, four_rows):
    C = np.array([[1, 0.5, 0], [0, 0.5, 1]])
    a = np.array([0, 1, 1, 0])
    expected = sum(cdist(four_rows[i:i + 1], C[a[i]:a[i] + 1], SCIPY_METRIC[kind])[0, 0] for i in range(4))
    assert compute_inertia(four_rows, a, C, kind) == pytest.approx(expected, rel=1e-12)


def test_inertia_dimension_mismatch(four_rows):
    with pytest.raises(ValueError):
        compute_inertia(four_rows, [0, 0, 0, 0], [[1, 0]])
    with pytest.raises(ValueError):
        compute_inertia(four_rows, [0, 0, 0], [[1, 0, 0]])


def test_assign_tie_goes_to_lowest_index():
    assert list(assign([[1, 0]], [[0, 0], [5, 5], [1, 1]], "sql2")) == [0]


@pytest.mark.parametrize("kind", KINDS)
def test_assign_exact_matches(kind):
    X = [[1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 1], [0, 0, 1, 1]]
    assert list(assign(X, [[1, 1, 0, 0], [0, 0, 1, 1]], kind)) == [0, 0, 1, 1]


def test_assign_four_rows(four_rows):
    C = [[1, 0.5, 0], [0, 0.5, 1]]
    D = cdist(four_rows, C, "sqeuclidean")
    assert list(assign(four_rows, C)) == list(D.argmin(axis=1)) == [0, 0, 1, 1]


def test_update_means():
    C = update_means([[1, 1, 0], [1, 0, 0], [0, 1, 1]], [0, 0, 1], 2)
    np.testing.assert_array_equal(C, [[1, 0.5, 0], [0, 1, 1]])


def test_update_means_duplicates():
    np.testing.assert_array_equal(update_means([[1, 0, 1]] * 3, [0, 0, 0], 1), [[1, 0, 1]])


def test_update_means_empty_cluster_keeps_previous():
    C = update_means([[1, 0]], [0], 2, previous=[[0, 0], [0.3, 0.7]])
    np.testing.assert_array_equal(C, [[1, 0], [0.3, 0.7]])


def test_update_medians():
    np.testing.assert_array_equal(update_medians([[1, 1, 0], [1, 0, 0], [1, 0, 0]], [0, 0, 0], 1), [[1, 0, 0]])
    np.testing.assert_array_equal(update_medians([[1, 0], [0, 1]], [0, 0], 1), [[0, 0]])
    np.testing.assert_array_equal(update_medians([[1, 0, 1]], [0], 1), [[1, 0, 1]])


def test_update_medians_nonbinary():
    X = [[3.0, -1.0], [1.0, 2.0], [2.0, 0.0], [5.0, 5.0]]
    np.testing.assert_array_equal(update_medians(X, [0, 0, 0, 0], 1), [[2.0, 0.0]])


@pytest.mark.parametrize("kind", KINDS)
def test_medoid_matches_enumeration(kind):
    X = np.array([[1, 1, 0], [1, 0, 0], [1, 0, 1]], dtype=float)
    dist = lambda a, b: cdist([a], [b], SCIPY_METRIC[kind])[0, 0]  # noqa: E731
    assert medoid_of(sp.csr_matrix(X), np.arange(3), kind) == brute_force_medoid(X, [0, 1, 2], dist)


def test_medoid_l1_example():
    X = sp.csr_matrix(np.array([[1, 1, 0], [1, 0, 0], [1, 0, 1]], dtype=float))
    assert medoid_of(X, np.arange(3), "l1") == 1


def test_medoid_duplicate_rows_lowest_index():
    X = sp.csr_matrix(np.array([[0, 1], [1, 0], [1, 0]], dtype=float))
    assert medoid_of(X, np.array([2, 1]), "l1") == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(KINDS))
def test_medoid_fast_paths_match_enumeration(seed, kind):
    rng = np.random.default_rng(seed)
    X = random_binary(rng, int(rng.integers(1, 9)), 5, 0.4)
    members = list(range(len(X)))
    dist = lambda a, b: dense_distance(a, b, kind)  # noqa: E731
    costs = [sum(dist(X[h], X[j]) for j in members) for h in members]
    got = medoid_of(sp.csr_matrix(X), np.arange(len(X)), kind)
    assert costs[got] == pytest.approx(min(costs), abs=1e-9)


def test_repair_moves_farthest_point():
    a = np.array([0, 0, 0, 1])
    d = np.array([0.1, 0.9, 0.5, 3.0])
    fixed, moved = _repair_empty(a, d, 3)
    # row 3 is alone in its cluster, so row 1 is the farthest eligible point
    assert moved == [1]
    assert list(fixed) == [0, 2, 0, 1]


# -- fits -------------------------------------------------------------------------

def test_k_equal_one_gives_corpus_mean(four_rows):
    r = kmeans_fit(four_rows, 1, seed=0)
    np.testing.assert_allclose(r.centroids[0], four_rows.mean(axis=0))
    mean = four_rows.mean(axis=0)
    assert r.inertia == pytest.approx(((four_rows - mean) ** 2).sum())


def test_four_rows_optimum(four_rows):
    assert brute_force_sql2(four_rows, 2) == pytest.approx(1.0)
    r = fit_best(four_rows, 2, restarts=10, seed=0)
    assert r.inertia == pytest.approx(1.0)
    assert r.assignments[0] == r.assignments[1] != r.assignments[2] == r.assignments[3]


@pytest.mark.parametrize("init", ["kpp", "random", "firstk"])
def test_k_equals_m_zero_inertia(four_rows, init):
    assert kmeans_fit(four_rows, 4, init=init, seed=3).inertia == 0.0


def test_k_bounds(four_rows):
    with pytest.raises(ValueError):
        kmeans_fit(four_rows, 5)
    with pytest.raises(ValueError):
        kmeans_fit(four_rows, 0)
    with pytest.raises(ValueError):
        kmeans_fit(four_rows, 2, max_iter=0)
    with pytest.raises(ValueError):
        kmeans_fit(four_rows, 2, distance="hamming")
    with pytest.raises(ValueError):
        kmeans_fit(four_rows, 2, init="spectral")


def test_firstk_init_is_deterministic_without_seed(four_rows):
    a = kmeans_fit(four_rows, 2, init="firstk", seed=1)
    b = kmeans_fit(four_rows, 2, init="firstk", seed=2)
    assert np.array_equal(a.assignments, b.assignments)


def test_kmedoids_singleton_and_duplicates():
    X = np.array([[1, 0, 0], [1, 0, 0], [0, 1, 1]], dtype=float)
    r = kmedoids_fit(X, 2, distance="l1", seed=0)
    assert set(r.medoid_indices) == {0, 2}


def test_kmedian_examples():
    r = kmedian_fit(np.array([[1, 1, 0], [1, 0, 0], [1, 0, 0]], dtype=float), 1, seed=0)
    np.testing.assert_array_equal(r.centroids, [[1, 0, 0]])
    r = kmedian_fit(np.array([[1, 0], [0, 1]], dtype=float), 1, seed=0)
    np.testing.assert_array_equal(r.centroids, [[0, 0]])


def test_minibatch_zero_batches(four_rows):
    r = minibatch_kmeans_fit(four_rows, 2, batch_size=2, n_batches=0, init="firstk", seed=0)
    np.testing.assert_array_equal(r.centroids, four_rows[:2])
    assert r.iterations_run == 0 and r.inertia_trace == ()
    np.testing.assert_array_equal(r.assignments, assign(four_rows, four_rows[:2]))


def test_minibatch_k_equals_rows(four_rows):
    r = minibatch_kmeans_fit(four_rows, 4, batch_size=4, n_batches=20, seed=0)
    assert r.inertia == 0.0


def test_minibatch_running_mean():
    # one batch of everything from a first-k start: each center becomes its members' mean
    X = np.array([[1, 1, 0], [0, 0, 1], [1, 0, 0], [0, 1, 1]], dtype=float)
    r = minibatch_kmeans_fit(X, 2, batch_size=4, n_batches=1, init="firstk", seed=0)
    a = assign(X, X[:2])
    np.testing.assert_allclose(r.centroids, update_means(X, a, 2))


def test_minibatch_batch_size_bounds(four_rows):
    with pytest.raises(ValueError):
        minibatch_kmeans_fit(four_rows, 2, batch_size=5)
    with pytest.raises(ValueError):
        minibatch_kmeans_fit(four_rows, 2, batch_size=0)


def test_minibatch_close_to_full_on_blobs(blobs):
    X, _ = blobs
    mb = np.mean([minibatch_kmeans_fit(X, 3, batch_size=300, n_batches=50, seed=s).inertia for s in range(5)])
    full = np.mean([kmeans_fit(X, 3, seed=s).inertia for s in range(5)])
    assert mb <= 1.05 * full


def test_cosine_zero_rows_flagged():
    X = np.array([[0, 0], [1, 0], [0, 1]], dtype=float)
    r = kmeans_fit(X, 2, distance="cosine", seed=0)
    assert r.zero_rows == (0,)


def test_empty_cluster_repair_keeps_k():
    # three identical rows + one distinct: firstk seeds two equal centroids
    X = np.array([[1, 0], [1, 0], [1, 0], [0, 1]], dtype=float)
    r = kmeans_fit(X, 3, init="firstk", seed=0)
    assert len(set(r.assignments.tolist())) == 3


# -- elbow ----------------------------------------------------------------------

def test_elbow_single_point(four_rows):
    curve = elbow_curve(four_rows, 2, 2, restarts=3)
    assert curve.ks == [2] and len(curve.seeds[2]) == 3


def test_elbow_tiny_instance_against_brute_force():
    X = np.array([[1, 1, 0, 0], [1, 0, 0, 0], [1, 1, 1, 0], [0, 0, 1, 1], [0, 0, 0, 1], [0, 1, 1, 1]],
                 dtype=float)
    curve = elbow_curve(X, 1, 6, restarts=20, seed=0)
    j = curve.inertias
    assert all(b <= a + 1e-12 for a, b in zip(j, j[1:]))
    for k in (1, 2, 3):
        assert j[k - 1] == pytest.approx(brute_force_sql2(X, k), rel=1e-9)
    assert j[-1] == 0.0


def test_elbow_prefix_stable(four_rows):
    a = elbow_curve(four_rows, 1, 2, restarts=2, seed=9)
    b = elbow_curve(four_rows, 1, 4, restarts=2, seed=9)
    assert b.points[:2] == a.points


def test_elbow_bounds(four_rows):
    with pytest.raises(ValueError):
        elbow_curve(four_rows, 3, 2)
    with pytest.raises(ValueError):
        elbow_curve(four_rows, 0, 2)
    with pytest.raises(ValueError):
        elbow_curve(four_rows, 1, 5)


# -- properties --------------------------------------------------------------------

VARIANT_FITS = {
    "means": lambda X, k, kind, s: kmeans_fit(X, k, distance=kind, seed=s),
    "medoids": lambda X, k, kind, s: kmedoids_fit(X, k, distance=kind, seed=s),
    "median": lambda X, k, kind, s: kmedian_fit(X, k, distance=kind, seed=s),
    "minibatch": lambda X, k, kind, s: minibatch_kmeans_fit(X, k, distance=kind, seed=s,
                                                            batch_size=max(1, len(X) // 2), n_batches=5),
}

instances = st.tuples(st.integers(0, 100_000), st.integers(2, 12), st.integers(1, 7),
                      st.floats(0.1, 0.9))


def _instance(params):
    seed, m, d, p = params
    rng = np.random.default_rng(seed)
    return random_binary(rng, m, d, p), int(rng.integers(1, m + 1)), seed


@settings(max_examples=80, deadline=None)
@given(instances, st.sampled_from(list(VARIANT_FITS)), st.sampled_from(KINDS))
def test_result_invariants(params, variant, kind):
    X, k, seed = _instance(params)
    r = VARIANT_FITS[variant](X, k, kind, seed)
    assert r.assignments.shape == (len(X),)
    assert r.assignments.min() >= 0 and r.assignments.max() < k
    assert len(r.inertia_trace) == r.iterations_run
    recomputed = sum(dense_distance(X[i], r.centroids[c], kind) for i, c in enumerate(r.assignments))
    assert r.inertia == pytest.approx(recomputed, rel=1e-9, abs=1e-12)
    assert compute_inertia(X, r.assignments, r.centroids, kind) == pytest.approx(r.inertia, rel=1e-9, abs=1e-12)
    if variant == "medoids":
        for c, m in enumerate(r.medoid_indices):
            np.testing.assert_array_equal(r.centroids[c], X[m])
    if variant == "median":
        assert set(np.unique(r.centroids)) <= {0.0, 1.0}
    if variant == "means":
        assert r.centroids.min() >= 0 and r.centroids.max() <= 1


@settings(max_examples=80, deadline=None)
@given(instances)
def test_sql2_trace_monotone(params):
    X, k, seed = _instance(params)
    for init in ("kpp", "random", "firstk"):
        trace = kmeans_fit(X, k, init=init, seed=seed, tol=0.0).inertia_trace
        assert all(b <= a + 1e-9 for a, b in zip(trace, trace[1:]))


@settings(max_examples=80, deadline=None)
@given(instances, st.sampled_from(KINDS))
def test_assignment_step_never_increases_inertia(params, kind):
    X, k, seed = _instance(params)
    rng = np.random.default_rng(seed)
    C = rng.random((k, X.shape[1]))
    before = rng.integers(0, k, size=len(X))
    after = assign(X, C, kind)
    assert compute_inertia(X, after, C, kind) <= compute_inertia(X, before, C, kind) + 1e-12


@settings(max_examples=40, deadline=None)
@given(instances, st.sampled_from(list(VARIANT_FITS)))
def test_deterministic_given_seed(params, variant):
    X, k, seed = _instance(params)
    a = VARIANT_FITS[variant](X, k, "sql2", seed)
    b = VARIANT_FITS[variant](X, k, "sql2", seed)
    assert a.same_as(b)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 8), st.integers(1, 5)), elements=st.sampled_from([0.0, 1.0])))
def test_k_equals_m_on_unique_rows(X):
    X = np.unique(X, axis=0)
    assert kmeans_fit(X, len(X), seed=0).inertia == 0.0


def test_partitions_enumeration_counts():
    # Stirling numbers of the second kind
    assert len(list(set_partitions(4, 2))) == 7
    assert len(list(set_partitions(5, 3))) == 25
    assert len(list(set_partitions(8, 3))) == 966
