"""Pairwise-interaction hot loops, compiled with numba when available.

Every kernel exists twice: a streaming loop flavor decorated with
``@njit`` (no pairwise matrices are ever materialized), and a vectorized
numpy flavor that builds the distance matrix.  `:func:select` returns the
flavor the process is configured for; arithmetic between the two flavors
agrees to roundoff reordering, which the kernel test pins down.

Sign convention: phi(t) = |t|^(p-2) t, with phi(0) = 0 for every p > 1.
"""

import numpy as np

from ._accel import USE_NUMBA, njit

__all__ = ["select", "KERNELS_NUMBA", "KERNELS_NUMPY"]


# ---------------------------------------------------------------------------
# numba flavor

@njit(cache=True)
def _plap_1d_nb(u, h, q, p, tail):
    n = u.shape[0]
    out = np.empty(n)
    for i in range(n):
        acc = 0.0
        ui = u[i]
        for j in range(n):
            if j == i:
                continue
            d = ui - u[j]
            if d != 0.0:
                r = h * abs(i - j)
                acc += np.sign(d) * abs(d) ** (p - 1.0) * r ** (-q)
        ti = abs(ui) ** (p - 1.0) * np.sign(ui) * tail[i] if ui != 0.0 else 0.0
        out[i] = h * acc + ti
    return out


@njit(cache=True)
def _plap_2d_nb(u, xs, h, q, p, tail):
    # u flattened row-major over (x, y) nodes, xs the 1d axis
    n = xs.shape[0]
    m = n * n
    out = np.empty(m)
    for a in range(m):
        i1 = a // n
        j1 = a % n
        ua = u[a]
        acc = 0.0
        for b in range(m):
            if b == a:
                continue
            d = ua - u[b]
            if d != 0.0:
                i2 = b // n
                j2 = b % n
                dx = xs[i1] - xs[i2]
                dy = xs[j1] - xs[j2]
                r = (dx * dx + dy * dy) ** 0.5
                acc += np.sign(d) * abs(d) ** (p - 1.0) * r ** (-q)
        ta = abs(ua) ** (p - 1.0) * np.sign(ua) * tail[a] if ua != 0.0 else 0.0
        out[a] = h * h * acc + ta
    return out


@njit(cache=True)
def _seminorm_nb(u, coords, q, p, cell):
    # coords: (k, dim) selected node positions; cell = h^(2 dim)
    k = u.shape[0]
    dim = coords.shape[1]
    acc = 0.0
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            d = u[i] - u[j]
            if d == 0.0:
                continue
            r2 = 0.0
            for c in range(dim):
                dd = coords[i, c] - coords[j, c]
                r2 += dd * dd
            acc += abs(d) ** p * r2 ** (-0.5 * q)
    return acc * cell


@njit(cache=True)
def _pairing_nb(u, coords, q, p, cell):
    k = u.shape[0]
    dim = coords.shape[1]
    acc = 0.0
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            d = u[i] - u[j]
            if d == 0.0:
                continue
            r2 = 0.0
            for c in range(dim):
                dd = coords[i, c] - coords[j, c]
                r2 += dd * dd
            acc += np.sign(d) * abs(d) ** (p - 1.0) * u[i] * r2 ** (-0.5 * q)
    return acc * cell


@njit(cache=True)
def _absdiff_transform_nb(u, coords, q, cell):
    # sum_j |u_i - u_j| |x_i - x_j|^(-q) * cell, for every i
    k = u.shape[0]
    dim = coords.shape[1]
    out = np.empty(k)
    for i in range(k):
        acc = 0.0
        for j in range(k):
            if j == i:
                continue
            r2 = 0.0
            for c in range(dim):
                dd = coords[i, c] - coords[j, c]
                r2 += dd * dd
            acc += abs(u[i] - u[j]) * r2 ** (-0.5 * q)
        out[i] = acc * cell
    return out


# ---------------------------------------------------------------------------
# numpy flavor
#
# Pairwise matrices are built in row blocks so peak memory stays bounded
# on two-dimensional grids (block x all-nodes instead of all x all).

_BLOCK = 1024


def _weight_block(coords, lo, hi, q):
    R2 = np.zeros((hi - lo, coords.shape[0]))
    for c in range(coords.shape[1]):
        dd = coords[lo:hi, c][:, None] - coords[:, c][None, :]
        R2 += dd * dd
    for i in range(lo, hi):
        R2[i - lo, i] = 1.0
    W = R2 ** (-0.5 * q)
    for i in range(lo, hi):
        W[i - lo, i] = 0.0
    return W


def _plap_core_np(u, coords, q, p, cell_n, tail):
    m = u.shape[0]
    out = np.empty(m)
    for lo in range(0, m, _BLOCK):
        hi = min(lo + _BLOCK, m)
        W = _weight_block(coords, lo, hi, q)
        D = u[lo:hi, None] - u[None, :]
        if p == 2.0:
            M = D * W
        else:
            M = np.sign(D) * np.abs(D) ** (p - 1.0) * W
        out[lo:hi] = M.sum(axis=1)
    return cell_n * out + np.sign(u) * np.abs(u) ** (p - 1.0) * tail


def _plap_1d_np(u, h, q, p, tail):
    coords = (np.arange(u.shape[0], dtype=float) * h)[:, None]
    return _plap_core_np(u, coords, q, p, h, tail)


def _plap_2d_np(u, xs, h, q, p, tail):
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    coords = np.column_stack([X.ravel(), Y.ravel()])
    return _plap_core_np(u, coords, q, p, h * h, tail)


def _seminorm_np(u, coords, q, p, cell):
    m = u.shape[0]
    acc = 0.0
    for lo in range(0, m, _BLOCK):
        hi = min(lo + _BLOCK, m)
        W = _weight_block(coords, lo, hi, q)
        D = u[lo:hi, None] - u[None, :]
        acc += float(np.sum(np.abs(D) ** p * W))
    return acc * cell


def _pairing_np(u, coords, q, p, cell):
    m = u.shape[0]
    acc = 0.0
    for lo in range(0, m, _BLOCK):
        hi = min(lo + _BLOCK, m)
        W = _weight_block(coords, lo, hi, q)
        D = u[lo:hi, None] - u[None, :]
        if p == 2.0:
            M = D * W
        else:
            M = np.sign(D) * np.abs(D) ** (p - 1.0) * W
        acc += float(np.sum(M * u[lo:hi, None]))
    return acc * cell


def _absdiff_transform_np(u, coords, q, cell):
    m = u.shape[0]
    out = np.empty(m)
    for lo in range(0, m, _BLOCK):
        hi = min(lo + _BLOCK, m)
        W = _weight_block(coords, lo, hi, q)
        D = np.abs(u[lo:hi, None] - u[None, :])
        out[lo:hi] = (D * W).sum(axis=1)
    return out * cell


KERNELS_NUMBA = {
    "plap_1d": _plap_1d_nb,
    "plap_2d": _plap_2d_nb,
    "seminorm": _seminorm_nb,
    "pairing": _pairing_nb,
    "absdiff_transform": _absdiff_transform_nb,
}

KERNELS_NUMPY = {
    "plap_1d": _plap_1d_np,
    "plap_2d": _plap_2d_np,
    "seminorm": _seminorm_np,
    "pairing": _pairing_np,
    "absdiff_transform": _absdiff_transform_np,
}


def select(name):
    """Return the configured flavor of the named kernel."""
    return (KERNELS_NUMBA if USE_NUMBA else KERNELS_NUMPY)[name]
