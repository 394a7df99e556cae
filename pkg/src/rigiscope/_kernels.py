"""Matrix-assembly kernels.

Each kernel has a numba ``@njit`` implementation (``*_nb``) and a vectorized
numpy twin (``*_np``) with identical semantics.  The public names dispatch on
``USE_NUMBA``, which is on when numba imports and the environment variable
``RIGISCOPE_DISABLE_JIT`` is unset or "0".
"""
import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def _env_disabled() -> bool:
    return os.environ.get("RIGISCOPE_DISABLE_JIT", "0").strip().lower() not in ("", "0", "false", "no")


USE_NUMBA = HAVE_NUMBA and not _env_disabled()


# --------------------------------------------------------------------------
# projective / Euclidean rows: row {i,j} = [.. k_ij .. k_ji ..]
#   k_ij = ((1 + K p_i.p_j) / (1 + K p_i.p_i)) p_i - p_j ; K = 0 gives R_E
# --------------------------------------------------------------------------

@njit(cache=True)
def projective_rows_nb(points, edges, K):
    v, n = points.shape
    m = edges.shape[0]
    out = np.zeros((m, n * v))
    for r in range(m):
        i = edges[r, 0]
        j = edges[r, 1]
        pij = 0.0
        pii = 0.0
        pjj = 0.0
        for c in range(n):
            pij += points[i, c] * points[j, c]
            pii += points[i, c] * points[i, c]
            pjj += points[j, c] * points[j, c]
        fi = (1.0 + K * pij) / (1.0 + K * pii)
        fj = (1.0 + K * pij) / (1.0 + K * pjj)
        for c in range(n):
            out[r, i * n + c] = fi * points[i, c] - points[j, c]
            out[r, j * n + c] = fj * points[j, c] - points[i, c]
    return out


def projective_rows_np(points, edges, K):
    v, n = points.shape
    m = edges.shape[0]
    out = np.zeros((m, n * v))
    if m == 0:
        return out
    pi = points[edges[:, 0]]
    pj = points[edges[:, 1]]
    pij = np.einsum("ij,ij->i", pi, pj)
    fi = (1.0 + K * pij) / (1.0 + K * np.einsum("ij,ij->i", pi, pi))
    fj = (1.0 + K * pij) / (1.0 + K * np.einsum("ij,ij->i", pj, pj))
    rows = np.arange(m)[:, None]
    cols = np.arange(n)[None, :]
    out[rows, edges[:, :1] * n + cols] = fi[:, None] * pi - pj
    out[rows, edges[:, 1:] * n + cols] = fj[:, None] * pj - pi
    return out


# --------------------------------------------------------------------------
# ambient rows: edge rows then one tangency row per vertex
#   form:      edge {i,j} -> D p_j in block i, D p_i in block j ; tangency D p_k
#   euclidean: edge {i,j} -> p_i - p_j, p_j - p_i            ; tangency e
# --------------------------------------------------------------------------

@njit(cache=True)
def ambient_rows_nb(points, edges, coeffs, euclidean):
    v, m1 = points.shape
    m = edges.shape[0]
    out = np.zeros((m + v, m1 * v))
    for r in range(m):
        i = edges[r, 0]
        j = edges[r, 1]
        for c in range(m1):
            if euclidean:
                d = points[i, c] - points[j, c]
                out[r, i * m1 + c] = d
                out[r, j * m1 + c] = -d
            else:
                out[r, i * m1 + c] = coeffs[c] * points[j, c]
                out[r, j * m1 + c] = coeffs[c] * points[i, c]
    for k in range(v):
        if euclidean:
            out[m + k, k * m1 + m1 - 1] = 1.0
        else:
            for c in range(m1):
                out[m + k, k * m1 + c] = coeffs[c] * points[k, c]
    return out


def ambient_rows_np(points, edges, coeffs, euclidean):
    v, m1 = points.shape
    m = edges.shape[0]
    out = np.zeros((m + v, m1 * v))
    cols = np.arange(m1)[None, :]
    if m:
        rows = np.arange(m)[:, None]
        pi = points[edges[:, 0]]
        pj = points[edges[:, 1]]
        if euclidean:
            out[rows, edges[:, :1] * m1 + cols] = pi - pj
            out[rows, edges[:, 1:] * m1 + cols] = pj - pi
        else:
            out[rows, edges[:, :1] * m1 + cols] = coeffs * pj
            out[rows, edges[:, 1:] * m1 + cols] = coeffs * pi
    ks = np.arange(v)
    if euclidean:
        out[m + ks, ks * m1 + m1 - 1] = 1.0
    else:
        out[(m + ks)[:, None], ks[:, None] * m1 + cols] = coeffs * points
    return out


# --------------------------------------------------------------------------
# transfer blocks T_p = I + K p p^T, stacked (v, n, n)
# --------------------------------------------------------------------------

@njit(cache=True)
def transfer_blocks_nb(points, K):
    v, n = points.shape
    out = np.zeros((v, n, n))
    for k in range(v):
        for a in range(n):
            for b in range(n):
                out[k, a, b] = K * points[k, a] * points[k, b]
            out[k, a, a] += 1.0
    return out


def transfer_blocks_np(points, K):
    v, n = points.shape
    return np.eye(n)[None, :, :] + K * np.einsum("ka,kb->kab", points, points)


# --------------------------------------------------------------------------
# restriction of linear generators u(x) = A x to vertices: column g holds
# (A_g p_1, ..., A_g p_v) stacked
# --------------------------------------------------------------------------

@njit(cache=True)
def restrict_generators_nb(generators, points):
    g, m1, _ = generators.shape
    v = points.shape[0]
    out = np.zeros((v * m1, g))
    for t in range(g):
        for k in range(v):
            for a in range(m1):
                acc = 0.0
                for b in range(m1):
                    acc += generators[t, a, b] * points[k, b]
                out[k * m1 + a, t] = acc
    return out


def restrict_generators_np(generators, points):
    g = generators.shape[0]
    return np.einsum("gab,kb->kag", generators, points).reshape(-1, g)


def _edge_array(edges):
    arr = np.asarray(edges, dtype=np.int64)
    return arr.reshape(-1, 2)


def projective_rows(points, edges, K):
    points = np.ascontiguousarray(points, dtype=float)
    edges = _edge_array(edges)
    if USE_NUMBA:
        return projective_rows_nb(points, edges, float(K))
    return projective_rows_np(points, edges, float(K))


def ambient_rows(points, edges, coeffs, euclidean):
    points = np.ascontiguousarray(points, dtype=float)
    edges = _edge_array(edges)
    coeffs = np.ascontiguousarray(coeffs, dtype=float)
    if USE_NUMBA:
        return ambient_rows_nb(points, edges, coeffs, bool(euclidean))
    return ambient_rows_np(points, edges, coeffs, bool(euclidean))


def transfer_blocks(points, K):
    points = np.ascontiguousarray(points, dtype=float)
    if USE_NUMBA:
        return transfer_blocks_nb(points, float(K))
    return transfer_blocks_np(points, float(K))


def restrict_generators(generators, points):
    generators = np.ascontiguousarray(generators, dtype=float)
    points = np.ascontiguousarray(points, dtype=float)
    if USE_NUMBA:
        return restrict_generators_nb(generators, points)
    return restrict_generators_np(generators, points)


def warmup():
    """Trigger JIT compilation of every kernel on tiny inputs."""
    if not USE_NUMBA:
        return
    p = np.array([[0.1, 0.2], [0.3, -0.1]])
    e = np.array([[0, 1]], dtype=np.int64)
    projective_rows_nb(p, e, 1.0)
    ambient_rows_nb(np.hstack([p, np.ones((2, 1))]), e, np.ones(3), False)
    transfer_blocks_nb(p, -1.0)
    restrict_generators_nb(np.zeros((1, 3, 3)), np.ones((2, 3)))
