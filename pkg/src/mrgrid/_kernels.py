"""Hot numeric kernels.

Every kernel exists twice: a numba ``@njit`` version and a pure numpy (or
plain Python, for the graph walks) fallback with identical results.  The
fallback is selected when numba is missing or when the environment variable
``MRGRID_DISABLE_NUMBA`` is set to a truthy value before import.

Field elements are carried as ``int64`` (degree <= 32, so products reduced
after every shift never leave 33 bits).  Erasure patterns on an ``m x n``
grid are carried as ``int64`` bit masks, cell ``(i, j)`` at bit ``i*n + j``.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLE = os.environ.get("MRGRID_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLE:
        raise ImportError
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and not _DISABLE


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numpy paths (always importable; also used directly by callers that want
# vectorised field products)
# ---------------------------------------------------------------------------


def gf_mul_array(a, b, poly: int, degree: int) -> np.ndarray:
    """Elementwise product in GF(2^degree), broadcasting like ``a * b``."""
    a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
    a = a.copy()
    out = np.zeros(a.shape, dtype=np.int64)
    poly = np.int64(poly)
    for bit in range(degree):
        out ^= np.where((b >> bit) & 1, a, 0)
        a <<= 1
        a ^= ((a >> degree) & 1) * poly
    return out


def gf_inv_scalar(x: int, poly: int, degree: int) -> int:
    """x^(2^d - 2); the caller guarantees x != 0."""
    result = 1
    base = int(x)
    e = (1 << degree) - 2
    while e:
        if e & 1:
            result = _mul_py(result, base, poly, degree)
        base = _mul_py(base, base, poly, degree)
        e >>= 1
    return result


def _mul_py(a: int, b: int, poly: int, degree: int) -> int:
    r = 0
    top = 1 << degree
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= poly
    return r


def _rref_np(A, poly, degree):
    R = np.array(A, dtype=np.int64, copy=True)
    rows, cols = R.shape
    pivots = []
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        nz = np.nonzero(R[rank:, c])[0]
        if nz.size == 0:
            continue
        p = rank + int(nz[0])
        if p != rank:
            R[[rank, p]] = R[[p, rank]]
        inv = gf_inv_scalar(int(R[rank, c]), poly, degree)
        R[rank] = gf_mul_array(R[rank], inv, poly, degree)
        factors = R[:, c].copy()
        factors[rank] = 0
        hit = np.nonzero(factors)[0]
        if hit.size:
            R[hit] ^= gf_mul_array(factors[hit, None], R[rank][None, :], poly, degree)
        pivots.append(c)
        rank += 1
    return R, np.asarray(pivots, dtype=np.int64)


def _bits_to_columns(masks, ncols, k):
    """(B,) masks each with exactly k set bits -> (B, k) ascending column indices."""
    bits = ((masks[:, None] >> np.arange(ncols, dtype=np.int64)[None, :]) & 1).astype(bool)
    return np.nonzero(bits)[1].reshape(masks.shape[0], k)


def _rank_columns_np(H, masks, poly, degree):
    H = np.asarray(H, dtype=np.int64)
    masks = np.asarray(masks, dtype=np.int64)
    nrows, ncols = H.shape
    out = np.zeros(masks.shape[0], dtype=np.int64)
    weights = _popcount_np(masks)
    for k in np.unique(weights):
        k = int(k)
        sel = np.nonzero(weights == k)[0]
        if k == 0 or nrows == 0:
            continue
        cols = _bits_to_columns(masks[sel], ncols, k)
        A = np.transpose(H[:, cols], (1, 0, 2)).copy()  # (B, rows, k)
        out[sel] = _batched_rank(A, poly, degree)
    return out


def _batched_rank(A, poly, degree):
    """Fraction-free elimination of a stack of matrices, one rank per slice."""
    B, r, k = A.shape
    rank = np.zeros(B, dtype=np.int64)
    ridx = np.arange(r)
    for c in range(k):
        live = rank < r
        cand = (A[:, :, c] != 0) & (ridx[None, :] >= rank[:, None]) & live[:, None]
        has = cand.any(axis=1)
        if not has.any():
            continue
        bi = np.nonzero(has)[0]
        p = np.argmax(cand[bi], axis=1)
        rk = rank[bi]
        top = A[bi, rk].copy()
        A[bi, rk] = A[bi, p]
        A[bi, p] = top
        sub = A[bi]
        prow = sub[np.arange(bi.size), rk]  # (b, k)
        piv = prow[:, c]
        fac = sub[:, :, c]
        below = ridx[None, :] > rk[:, None]
        upd = gf_mul_array(sub, piv[:, None, None], poly, degree) ^ gf_mul_array(
            fac[:, :, None], prow[:, None, :], poly, degree
        )
        A[bi] = np.where(below[:, :, None], upd, sub)
        rank[bi] += 1
    return rank


_PC16 = np.array([bin(i).count("1") for i in range(1 << 16)], dtype=np.int64)


def _popcount_np(x):
    x = np.asarray(x, dtype=np.int64)
    out = np.zeros(x.shape, dtype=np.int64)
    for shift in range(0, 64, 16):
        out += _PC16[(x >> shift) & 0xFFFF]
    return out


def _irregular_np(row_masks, n, a, b):
    row_masks = np.asarray(row_masks, dtype=np.int64)
    B = row_masks.shape[0]
    bad = np.zeros(B, dtype=bool)
    for V in range(1, 1 << n):
        v = bin(V).count("1")
        gain = _popcount_np(row_masks & V) - b
        pos = np.where(gain > 0, gain, 0).sum(axis=1)
        best = np.where(pos > 0, pos, gain.max(axis=1))
        bad |= best > a * (v - b)
    return ~bad


def _t11h_np(masks, m, n, h):
    masks = np.asarray(masks, dtype=np.int64)
    B = masks.shape[0]
    shifts = np.arange(m * n, dtype=np.int64)
    X = (((masks[:, None] >> shifts[None, :]) & 1).astype(bool)).reshape(B, m, n)
    while True:
        rdeg = X.sum(axis=2)
        cdeg = X.sum(axis=1)
        drop = (rdeg == 1)[:, :, None] | (cdeg == 1)[:, None, :]
        nxt = X & ~drop
        if np.array_equal(nxt, X):
            break
        X = nxt
    e = X.sum(axis=(1, 2))
    rows_alive = X.any(axis=2)
    cols_alive = X.any(axis=1)
    ell = rows_alive.sum(axis=1)
    r = cols_alive.sum(axis=1)
    # label propagation over the bipartite core; rows 0..m-1, cols m..m+n-1
    big = m + n
    lab_r = np.where(rows_alive, np.arange(m)[None, :], big)
    lab_c = np.where(cols_alive, m + np.arange(n)[None, :], big)
    for _ in range(m + n):
        via_r = np.where(X, lab_r[:, :, None], big).min(axis=1)
        new_c = np.minimum(lab_c, via_r)
        via_c = np.where(X, new_c[:, None, :], big).min(axis=2)
        new_r = np.minimum(lab_r, via_c)
        if np.array_equal(new_r, lab_r) and np.array_equal(new_c, lab_c):
            break
        lab_r, lab_c = new_r, new_c
    comps = (rows_alive & (lab_r == np.arange(m)[None, :])).sum(axis=1) + (
        cols_alive & (lab_c == m + np.arange(n)[None, :])
    ).sum(axis=1)
    return (e == 0) | (e <= h + ell + r - comps)


def iter_cycles_py(n_left, n_right, max_len):
    """Yield every simple cycle of K_{n_left,n_right} once, canonical form.

    Vertices are ``0..n_left-1`` (left) and ``n_left..`` (right).  A cycle is
    reported starting at its smallest vertex, oriented so that the second
    vertex is smaller than the last.
    """
    nv = n_left + n_right
    on = [False] * nv
    path = []

    def extend(s):
        u = path[-1]
        if u >= n_left:
            if len(path) >= 4 and path[1] < u:
                yield tuple(path)
            if len(path) + 1 > max_len:
                return
            candidates = range(s + 1, n_left)
        else:
            if len(path) + 1 > max_len:
                return
            candidates = range(n_left, nv)
        for w in candidates:
            if on[w]:
                continue
            on[w] = True
            path.append(w)
            yield from extend(s)
            path.pop()
            on[w] = False

    for s in range(n_left):
        on[s] = True
        path.append(s)
        yield from extend(s)
        path.pop()
        on[s] = False


def _scan_cycles_py(labels, max_len, stop_at_zero):
    n_left, n_right = labels.shape
    count = 0
    for cyc in iter_cycles_py(n_left, n_right, max_len):
        acc = 0
        L = len(cyc)
        for t in range(L):
            u, w = cyc[t], cyc[(t + 1) % L]
            i, j = (u, w - n_left) if u < n_left else (w, u - n_left)
            acc ^= int(labels[i, j])
        count += 1
        if acc == 0 and stop_at_zero:
            return count, np.asarray(cyc, dtype=np.int64)
    return count, np.zeros(0, dtype=np.int64)


# ---------------------------------------------------------------------------
# numba paths
# ---------------------------------------------------------------------------

if HAS_NUMBA:

    @njit(cache=True)
    def _mul_nb(a, b, poly, degree):
        r = np.int64(0)
        top = np.int64(1) << degree
        while b:
            if b & 1:
                r ^= a
            b >>= 1
            a <<= 1
            if a & top:
                a ^= poly
        return r

    @njit(cache=True)
    def _inv_nb(x, poly, degree):
        result = np.int64(1)
        base = x
        e = (np.int64(1) << degree) - 2
        while e:
            if e & 1:
                result = _mul_nb(result, base, poly, degree)
            base = _mul_nb(base, base, poly, degree)
            e >>= 1
        return result

    @njit(cache=True)
    def _rref_nb(A, poly, degree):
        R = A.copy()
        rows, cols = R.shape
        pivots = np.empty(min(rows, cols), dtype=np.int64)
        rank = 0
        for c in range(cols):
            if rank == rows:
                break
            p = -1
            for i in range(rank, rows):
                if R[i, c] != 0:
                    p = i
                    break
            if p < 0:
                continue
            if p != rank:
                for j in range(cols):
                    t = R[rank, j]
                    R[rank, j] = R[p, j]
                    R[p, j] = t
            inv = _inv_nb(R[rank, c], poly, degree)
            for j in range(c, cols):
                R[rank, j] = _mul_nb(R[rank, j], inv, poly, degree)
            for i in range(rows):
                if i == rank:
                    continue
                f = R[i, c]
                if f != 0:
                    for j in range(c, cols):
                        R[i, j] ^= _mul_nb(f, R[rank, j], poly, degree)
            pivots[rank] = c
            rank += 1
        return R, pivots[:rank].copy()

    @njit(cache=True)
    def _rank_columns_nb(H, masks, poly, degree):
        nrows, ncols = H.shape
        B = masks.shape[0]
        out = np.zeros(B, dtype=np.int64)
        cols = np.empty(ncols, dtype=np.int64)
        W = np.empty((nrows, ncols), dtype=np.int64)
        for t in range(B):
            mask = masks[t]
            k = 0
            for c in range(ncols):
                if (mask >> c) & 1:
                    cols[k] = c
                    k += 1
            for i in range(nrows):
                for c in range(k):
                    W[i, c] = H[i, cols[c]]
            rank = 0
            for c in range(k):
                if rank == nrows:
                    break
                p = -1
                for i in range(rank, nrows):
                    if W[i, c] != 0:
                        p = i
                        break
                if p < 0:
                    continue
                if p != rank:
                    for j in range(c, k):
                        tmp = W[rank, j]
                        W[rank, j] = W[p, j]
                        W[p, j] = tmp
                piv = W[rank, c]
                for i in range(rank + 1, nrows):
                    f = W[i, c]
                    if f != 0:
                        for j in range(c, k):
                            W[i, j] = _mul_nb(W[i, j], piv, poly, degree) ^ _mul_nb(
                                f, W[rank, j], poly, degree
                            )
                rank += 1
            out[t] = rank
        return out

    @njit(cache=True)
    def _irregular_nb(row_masks, n, a, b):
        B, m = row_masks.shape
        nV = np.int64(1) << n
        pc = np.zeros(nV, dtype=np.int64)
        for x in range(1, nV):
            pc[x] = pc[x >> 1] + (x & 1)
        ok = np.ones(B, dtype=np.bool_)
        for t in range(B):
            for V in range(1, nV):
                pos = 0
                best_single = -(1 << 30)
                for i in range(m):
                    g = pc[row_masks[t, i] & V] - b
                    if g > 0:
                        pos += g
                    if g > best_single:
                        best_single = g
                best = pos if pos > 0 else best_single
                if best > a * (pc[V] - b):
                    ok[t] = False
                    break
        return ok

    @njit(cache=True)
    def _t11h_nb(masks, m, n, h):
        B = masks.shape[0]
        out = np.zeros(B, dtype=np.bool_)
        X = np.zeros((m, n), dtype=np.bool_)
        parent = np.empty(m + n, dtype=np.int64)
        for t in range(B):
            mask = masks[t]
            for i in range(m):
                for j in range(n):
                    X[i, j] = (mask >> (i * n + j)) & 1
            changed = True
            while changed:
                changed = False
                for i in range(m):
                    d = 0
                    last = -1
                    for j in range(n):
                        if X[i, j]:
                            d += 1
                            last = j
                    if d == 1:
                        X[i, last] = False
                        changed = True
                for j in range(n):
                    d = 0
                    last = -1
                    for i in range(m):
                        if X[i, j]:
                            d += 1
                            last = i
                    if d == 1:
                        X[last, j] = False
                        changed = True
            for v in range(m + n):
                parent[v] = v
            e = 0
            for i in range(m):
                for j in range(n):
                    if X[i, j]:
                        e += 1
                        ra = i
                        while parent[ra] != ra:
                            ra = parent[ra]
                        rb = m + j
                        while parent[rb] != rb:
                            rb = parent[rb]
                        if ra != rb:
                            parent[max(ra, rb)] = min(ra, rb)
            if e == 0:
                out[t] = True
                continue
            ell = 0
            r = 0
            comps = 0
            for i in range(m):
                alive = False
                for j in range(n):
                    if X[i, j]:
                        alive = True
                        break
                if alive:
                    ell += 1
                    if parent[i] == i:
                        comps += 1
            for j in range(n):
                alive = False
                for i in range(m):
                    if X[i, j]:
                        alive = True
                        break
                if alive:
                    r += 1
                    if parent[m + j] == m + j:
                        comps += 1
            out[t] = e <= h + ell + r - comps
        return out

    @njit(cache=True)
    def _scan_cycles_nb(labels, max_len, stop_at_zero):
        n_left, n_right = labels.shape
        nv = n_left + n_right
        path = np.empty(nv, dtype=np.int64)
        cursor = np.empty(nv, dtype=np.int64)
        acc = np.zeros(nv, dtype=np.int64)
        on = np.zeros(nv, dtype=np.bool_)
        count = 0
        for s in range(n_left):
            path[0] = s
            on[s] = True
            acc[0] = 0
            cursor[0] = n_left
            depth = 0
            while depth >= 0:
                u = path[depth]
                w = cursor[depth]
                limit = nv if u < n_left else n_left
                if depth + 2 > max_len:
                    w = limit
                while w < limit and on[w]:
                    w += 1
                if w >= limit:
                    on[u] = depth == 0
                    depth -= 1
                    continue
                cursor[depth] = w + 1
                if u < n_left:
                    lab = labels[u, w - n_left]
                else:
                    lab = labels[w, u - n_left]
                depth += 1
                path[depth] = w
                on[w] = True
                acc[depth] = acc[depth - 1] ^ lab
                if w >= n_left:
                    cursor[depth] = s + 1
                    if depth >= 3 and path[1] < w:
                        count += 1
                        total = acc[depth] ^ labels[s, w - n_left]
                        if total == 0 and stop_at_zero:
                            return count, path[: depth + 1].copy()
                else:
                    cursor[depth] = n_left
            on[s] = False
        return count, np.zeros(0, dtype=np.int64)


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def rref(A, poly: int, degree: int):
    A = np.ascontiguousarray(A, dtype=np.int64)
    if A.size == 0:
        return A.copy(), np.zeros(0, dtype=np.int64)
    if USE_NUMBA:
        return _rref_nb(A, np.int64(poly), np.int64(degree))
    return _rref_np(A, poly, degree)


def rank_of_columns(H, masks, poly: int, degree: int) -> np.ndarray:
    """Rank of ``H[:, cols(mask)]`` for every mask."""
    H = np.ascontiguousarray(H, dtype=np.int64)
    masks = np.ascontiguousarray(masks, dtype=np.int64)
    if masks.size == 0:
        return np.zeros(0, dtype=np.int64)
    if USE_NUMBA:
        return _rank_columns_nb(H, masks, np.int64(poly), np.int64(degree))
    return _rank_columns_np(H, masks, poly, degree)


def regular_rows(row_masks, n: int, a: int, b: int) -> np.ndarray:
    row_masks = np.ascontiguousarray(row_masks, dtype=np.int64)
    if row_masks.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    if USE_NUMBA:
        return _irregular_nb(row_masks, np.int64(n), np.int64(a), np.int64(b))
    return _irregular_np(row_masks, n, a, b)


def t11h(masks, m: int, n: int, h: int) -> np.ndarray:
    masks = np.ascontiguousarray(masks, dtype=np.int64)
    if masks.size == 0:
        return np.zeros(0, dtype=bool)
    if USE_NUMBA:
        return _t11h_nb(masks, np.int64(m), np.int64(n), np.int64(h))
    return _t11h_np(masks, m, n, h)


def scan_cycles(labels, max_len: int, stop_at_zero: bool = True):
    """Walk every simple cycle of length <= max_len; return (visited, zero_cycle)."""
    labels = np.ascontiguousarray(labels, dtype=np.int64)
    if USE_NUMBA:
        c, cyc = _scan_cycles_nb(labels, np.int64(max_len), stop_at_zero)
        return int(c), cyc
    return _scan_cycles_py(labels, max_len, stop_at_zero)


def popcount(x) -> np.ndarray:
    return _popcount_np(x)
