import csv
import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _support import (ball_points, column_space_angle, euclidean_trivial_basis, exact_euclidean_rank,
                      fd_constraint_rows, random_edges, random_framework, spherical_framework)
from rigiscope.framework import Framework
from rigiscope.geometry import GeometrySpec
from rigiscope.rigidity import (decompose, matrix_to_csv, motion_space, numeric_rank,
                                restricted_trivial_matrix, rigidity_matrix, rigidity_matrix_ambient,
                                rigidity_matrix_euclidean, rigidity_matrix_projective, rigidity_verdict,
                                stress_space, trivial_generators, trivial_motion_space)
from rigiscope.transfer import transfer_framework

E2 = GeometrySpec.euclidean(2)


def _fw(pts, edges, geo=E2, coords=None):
    return Framework.create(np.asarray(pts, float), edges, geo, coords)


def test_triangle_is_isostatic():
    v = rigidity_verdict(_fw([[0, 0], [1, 0], [0.3, 0.8]], [(0, 1), (1, 2), (0, 2)]))
    assert v.verdict == "RIGID"
    assert (v.rank, v.trivial_dimension, v.stress_dimension) == (3, 3, 0)
    assert v.isostatic and v.isostatic_rank == 3


def test_square_has_one_flex():
    v = rigidity_verdict(_fw([[0, 0], [1, 0], [1, 1], [0, 1]], [(0, 1), (1, 2), (2, 3), (0, 3)]))
    assert v.verdict == "FLEXIBLE"
    assert v.internal_dimension == 1


def test_braced_square_has_stress():
    edges = [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2), (1, 3)]
    v = rigidity_verdict(_fw([[0, 0], [1, 0], [1, 1], [0, 1]], edges))
    assert v.rigid and v.stress_dimension == 1 and not v.isostatic


def test_collinear_triangle_flexes():
    v = rigidity_verdict(_fw([[-0.4, 0.1], [0.1, 0.1], [0.5, 0.1]], [(0, 1), (1, 2), (0, 2)]))
    assert v.verdict == "FLEXIBLE"
    assert (v.rank, v.spanning, v.isostatic_rank) == (2, False, None)


@pytest.mark.parametrize("seed", range(25))
def test_numeric_rank_matches_exact_rank(seed):
    rng = np.random.default_rng(seed)
    fw = random_framework(rng, v=int(rng.integers(3, 8)))
    assert numeric_rank(rigidity_matrix_euclidean(fw)) == exact_euclidean_rank(fw)


def test_numeric_rank_matches_exact_rank_on_special_position():
    # a planar framework placed in space: rank drops below the generic count
    pts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0], [0.5, 0.3, 0]], float)
    edges = [(i, j) for i in range(5) for j in range(i + 1, 5)]
    fw = _fw(pts, edges, GeometrySpec.euclidean(3))
    assert numeric_rank(rigidity_matrix_euclidean(fw)) == exact_euclidean_rank(fw) == 7


@pytest.mark.parametrize("K", [1, -1])
@pytest.mark.parametrize("seed", range(6))
def test_projective_rows_are_distance_gradients(K, seed):
    rng = np.random.default_rng(100 + seed)
    n = 2 + seed % 2
    v = 5
    pts = ball_points(rng, v, n, 0.8)
    edges = random_edges(rng, v, 0.7) or [(0, 1)]
    R = rigidity_matrix_projective(_fw(pts, edges, GeometrySpec.euclidean(n)), K).matrix
    G = fd_constraint_rows(K, pts, edges)
    for r, g in zip(R, G):
        cos = abs(r @ g) / (np.linalg.norm(r) * np.linalg.norm(g))
        assert cos == pytest.approx(1.0, abs=1e-8)


def test_euclidean_trivial_space_matches_hand_basis():
    rng = np.random.default_rng(3)
    for n in (2, 3):
        pts = ball_points(rng, 6, n)
        ts = trivial_motion_space(_fw(pts, [], GeometrySpec.euclidean(n)))
        assert ts.dimension == n * (n + 1) // 2
        assert column_space_angle(ts.basis, euclidean_trivial_basis(pts)) < 1e-10


@pytest.mark.parametrize("coeffs", [[1, 1, 0], [1, 1, 1], [1, 1, -1], [1, 1, 1, -1], [1, -1, -1, 1]])
def test_generators_preserve_the_form(coeffs):
    D = np.diag(np.asarray(coeffs, float))
    gens = trivial_generators(coeffs)
    m = len(coeffs)
    expected = m * (m - 1) // 2
    assert len(gens) == expected
    if coeffs[-1] == 0:
        return
    for A in gens:
        assert np.allclose(A.T @ D + D @ A, 0.0)
    assert np.linalg.matrix_rank(gens.reshape(len(gens), -1)) == expected


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(["euclidean", "proj_sphere", "proj_hyperbolic",
                                                       "sphere_ambient"]))
def test_trivial_motions_lie_in_the_kernel(seed, model):
    fw = random_framework(np.random.default_rng(seed), p=0.7)
    fw = transfer_framework(fw, GeometrySpec.for_model(model, fw.dimension))
    M = rigidity_matrix(fw)
    T = trivial_motion_space(fw).basis
    if M.matrix.size and T.size:
        assert np.abs(M.matrix @ T).max() < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_rank_invariant_under_relabeling(seed):
    rng = np.random.default_rng(seed)
    fw = random_framework(rng)
    perm = rng.permutation(fw.vertex_count)
    inv = np.argsort(perm)
    moved = Framework.create(fw.points[perm], [(inv[i], inv[j]) for i, j in fw.edges], fw.geometry)
    assert numeric_rank(rigidity_matrix_euclidean(fw)) == numeric_rank(rigidity_matrix_euclidean(moved))
    for K in (1, -1):
        assert numeric_rank(rigidity_matrix_projective(fw, K)) == \
            numeric_rank(rigidity_matrix_projective(moved, K))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0, 2 * np.pi))
def test_euclidean_rank_invariant_under_congruence(seed, theta):
    fw = random_framework(np.random.default_rng(seed), n=2)
    c, s = np.cos(theta), np.sin(theta)
    moved = fw.with_points(fw.points @ np.array([[c, -s], [s, c]]) + [3.0, -1.5])
    assert rigidity_verdict(moved).to_dict()["rank"] == rigidity_verdict(fw).rank


def test_ambient_kernel_matches_model_kernel():
    rng = np.random.default_rng(11)
    for _ in range(20):
        fw = spherical_framework(rng)
        model = transfer_framework(fw, GeometrySpec.proj_sphere(fw.dimension), "model")
        assert motion_space(rigidity_matrix_ambient(fw)).dimension == \
            motion_space(rigidity_matrix(model)).dimension


def test_motion_and_stress_bases_are_orthonormal_kernels():
    fw = _fw([[0, 0], [1, 0], [1, 1], [0, 1]], [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2), (1, 3)])
    M = rigidity_matrix(fw)
    ms, ss = motion_space(M), stress_space(M)
    assert ms.dimension == 3 and ms.internal_dimension == 0
    assert np.allclose(M.matrix @ ms.basis, 0, atol=1e-12)
    assert np.allclose(ss.basis.T @ M.matrix, 0, atol=1e-12)
    assert np.allclose(ms.basis.T @ ms.basis, np.eye(3), atol=1e-12)
    assert ss.row_labels == M.row_labels


def test_labels_and_csv():
    fw = _fw([[0, 0], [1, 0], [0, 1]], [(0, 1), (1, 2)])
    M = rigidity_matrix(fw)
    assert M.row_labels == ("e(0,1)", "e(1,2)")
    assert M.column_labels[:3] == ("v0.x0", "v0.x1", "v1.x0")
    rows = list(csv.reader(io.StringIO(matrix_to_csv(M))))
    assert rows[0][:3] == ["row", "v0.x0", "v0.x1"]
    assert rows[1] == ["e(0,1)", "-1.0", "0.0", "1.0", "0.0", "0.0", "0.0"]
    A = rigidity_matrix_ambient(transfer_framework(fw, GeometrySpec.sphere(2)))
    assert A.row_labels[-3:] == ("t(0)", "t(1)", "t(2)")


def test_decompose_edge_cases():
    empty = decompose(np.zeros((0, 4)))
    assert empty.rank == 0
    with pytest.raises(ValueError):
        decompose(np.array([[1.0, np.nan]]))
    assert numeric_rank(np.diag([1.0, 1e-14])) == 1


def test_restriction_of_lifted_model_points():
    pts = np.array([[0.1, 0.2], [0.3, -0.4], [-0.2, 0.5]])
    R = restricted_trivial_matrix(pts, "model", [1.0, 1.0, -1.0])
    assert R.shape == (6, 3)
    assert np.linalg.matrix_rank(R) == 3


def test_degenerate_edge_reported():
    fw = _fw([[0, 0], [0, 0], [1, 0]], [(0, 1), (1, 2)])
    assert rigidity_verdict(fw).degenerate_edges == (0,)
