# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: lattice enumeration and the best-ratio polynomial scan.

Both routines mirror ``pgnlab._pykernels`` exactly; the pure-Python module is
the reference implementation and the fallback when this extension is absent.
"""

import numpy as np

from libc.math cimport fabs, floor, ceil, sqrt, fabsl, floorl
from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memset

DEF MAXD = 8
DEF BIG = 4.0e18

cdef struct EnumState:
    int m            # lattice rank
    int r            # number of forms (rows)
    double B[16][MAXD]
    double bstar2[MAXD]
    double mu[MAXD][MAXD]
    long long S[MAXD][MAXD]      # S[i][k]: coordinate i of basis column k (u coordinates)
    long long adj[MAXD][MAXD]
    double w[MAXD]
    double W
    double wb0
    double tol
    double slack
    long long *out_u
    double *out_w
    Py_ssize_t nout
    Py_ssize_t cap
    long long nodes
    long long budget
    int status       # 0 ok, 1 budget, 2 memory
    int adj_ok
    long long u[MAXD]
    int has_exact
    int grp[16]                  # exact group of each row, -1 when the row is irrational
    long long Z[16][MAXD]        # integer image of exact rows
    int sg[MAXD]                 # exact key of each basis column (group, value)
    long long sv[MAXD]


cdef inline double weight_of(EnumState *e, double *v) nogil:
    cdef double g = 0.0, a
    cdef int i
    for i in range(e.r):
        a = fabs(v[i])
        if a > g:
            g = a
    return g


cdef int emit(EnumState *e, long long *u, double g) nogil:
    cdef Py_ssize_t newcap
    cdef long long *nu
    cdef double *nw
    cdef int i
    if e.nout == e.cap:
        newcap = e.cap * 2 + 16
        nu = <long long *> realloc(e.out_u, newcap * MAXD * sizeof(long long))
        if nu == NULL:
            e.status = 2
            return -1
        e.out_u = nu
        nw = <double *> realloc(e.out_w, newcap * sizeof(double))
        if nw == NULL:
            e.status = 2
            return -1
        e.out_w = nw
        e.cap = newcap
    for i in range(e.m):
        e.out_u[e.nout * MAXD + i] = u[i]
    for i in range(e.m, MAXD):
        e.out_u[e.nout * MAXD + i] = 0
    e.out_w[e.nout] = g
    e.nout += 1
    return 0


cdef long long det_ll(long long a[MAXD][MAXD], int k, int *ok) nogil:
    # Bareiss fraction-free elimination with a double-magnitude guard
    cdef long long M[MAXD][MAXD]
    cdef long long prev = 1, t
    cdef int i, j, l, piv, sign = 1
    cdef double est
    for i in range(k):
        for j in range(k):
            M[i][j] = a[i][j]
    for l in range(k - 1):
        if M[l][l] == 0:
            piv = -1
            for i in range(l + 1, k):
                if M[i][l] != 0:
                    piv = i
                    break
            if piv < 0:
                return 0
            for j in range(k):
                t = M[l][j]
                M[l][j] = M[piv][j]
                M[piv][j] = t
            sign = -sign
        for i in range(l + 1, k):
            for j in range(l + 1, k):
                est = fabs(<double> M[i][j] * <double> M[l][l]) + fabs(<double> M[i][l] * <double> M[l][j])
                if est > BIG:
                    ok[0] = 0
                    return 0
                M[i][j] = (M[i][j] * M[l][l] - M[i][l] * M[l][j]) // prev
        prev = M[l][l]
    return sign * M[k - 1][k - 1]


cdef void refresh_adjugate(EnumState *e) nogil:
    cdef long long minor[MAXD][MAXD]
    cdef int i, j, a, b, ra, cb, m = e.m, ok = 1
    cdef long long d
    if m == 1:
        e.adj[0][0] = 1
        e.adj_ok = 1
        return
    for i in range(m):
        for j in range(m):
            ra = 0
            for a in range(m):
                if a == j:
                    continue
                cb = 0
                for b in range(m):
                    if b == i:
                        continue
                    minor[ra][cb] = e.S[a][b]
                    cb += 1
                ra += 1
            d = det_ll(minor, m - 1, &ok)
            e.adj[i][j] = -d if (i + j) % 2 else d
    e.adj_ok = ok


cdef void refresh_W(EnumState *e) nogil:
    cdef int k
    e.W = 0.0
    for k in range(e.m):
        if e.w[k] > e.W:
            e.W = e.w[k]


cdef int exact_key(EnumState *e, long long *u, double g, long long *val) nogil:
    """Group whose rows carry the weight of ``u`` exactly, or -1.

    When every row within the float margin of the maximum is exact and in one
    group, the true weight is ``val`` times that group's common scale.
    """
    cdef double v[16]
    cdef double est
    cdef int i, k, G = -1
    cdef long long s, best = 0
    if not e.has_exact:
        return -1
    for i in range(e.r):
        v[i] = 0.0
        for k in range(e.m):
            v[i] += (<double> u[k]) * e.B[i][k]
    for i in range(e.r):
        if fabs(v[i]) >= g * (1.0 - 4.0 * e.tol):
            if e.grp[i] < 0:
                return -1
            if G == -1:
                G = e.grp[i]
            elif G != e.grp[i]:
                return -1
            est = 0.0
            s = 0
            for k in range(e.m):
                est += fabs(<double> e.Z[i][k] * <double> u[k])
                s += e.Z[i][k] * u[k]
            if est > BIG:
                return -1
            if s < 0:
                s = -s
            if s > best:
                best = s
    val[0] = best
    return G


cdef int process(EnumState *e, long long *u, double g) nogil:
    """Offer a lattice point to the running minimum-weight basis.

    A point that is certainly at least as heavy as every other member of its
    fundamental circuit is skipped.  Exact ties are settled with the integer
    rows; a skipped tie is the heaviest member once ties are broken in favour
    of points already emitted, so some minimum basis survives.
    """
    cdef int i, j, imax = -1, dep = 0, kg, drop
    cdef double est, maxw = -1.0
    cdef long long c, kv = 0
    cdef long long circ[MAXD]
    if g > e.W * (1.0 + e.tol):
        return 0
    if e.adj_ok:
        for i in range(e.m):
            est = 0.0
            for j in range(e.m):
                est += fabs(<double> e.adj[i][j] * <double> u[j])
            if est > BIG:
                dep = -1
                break
        if dep == 0:
            for i in range(e.m):
                c = 0
                for j in range(e.m):
                    c += e.adj[i][j] * u[j]
                circ[i] = c
                if c != 0:
                    if e.w[i] > maxw:
                        maxw = e.w[i]
                        imax = i
    else:
        dep = -1
    if dep == -1:
        # circuit unknown: compare against the whole basis, never swap
        if g > e.W * (1.0 + e.tol):
            return 0
        return emit(e, u, g)
    if g > maxw * (1.0 + e.tol):
        return 0
    if g >= maxw * (1.0 - 4.0 * e.tol):
        kg = exact_key(e, u, g, &kv)
        drop = 1
        for i in range(e.m):
            if circ[i] == 0 or e.w[i] < g * (1.0 - 4.0 * e.tol):
                continue
            if kg >= 0 and e.sg[i] == kg and kv >= e.sv[i]:
                continue
            drop = 0
            break
        if drop:
            return 0
    if emit(e, u, g) < 0:
        return -1
    if g < maxw:
        for j in range(e.m):
            e.S[j][imax] = u[j]
        e.w[imax] = g
        e.sg[imax] = exact_key(e, u, g, &kv)
        e.sv[imax] = kv
        refresh_adjugate(e)
        refresh_W(e)
    return 0


cdef int line_walk(EnumState *e, double *base) nogil:
    """Scan the line ``base + t*b_0`` outward from the real minimiser of the gauge.

    Walking away from the minimiser the gauge is nondecreasing.  A point at
    least as heavy as its predecessor and as ``b_0`` is the heaviest member of
    the circuit ``{v_k, v_(k-1), b_0}``; ties are broken by distance from the
    start, so such points are skipped.  Forms on which ``b_0`` vanishes
    exactly keep a constant value along the line; where they dominate, the
    gauge is exactly flat and the whole plateau is jumped over.
    """
    cdef double cand[300]
    cdef int nc = 0, i, j, d, k, has_flat = 0
    cdef double t, best_t = 0.0, best_g = 1e308, g, prev_g, den, K = -1.0, L
    cdef double pa = 1.0, pb = 0.0, lo_i, hi_i
    cdef double v[16]
    cdef long long t0, tt
    for i in range(e.r):
        if e.B[i][0] != 0.0:
            cand[nc] = -base[i] / e.B[i][0]
            nc += 1
        elif fabs(base[i]) > K:
            K = fabs(base[i])
        for j in range(i + 1, e.r):
            den = e.B[i][0] - e.B[j][0]
            if den != 0.0:
                cand[nc] = (base[j] - base[i]) / den
                nc += 1
            den = e.B[i][0] + e.B[j][0]
            if den != 0.0:
                cand[nc] = (-base[j] - base[i]) / den
                nc += 1
    for k in range(nc):
        t = cand[k]
        for i in range(e.r):
            v[i] = base[i] + t * e.B[i][0]
        g = weight_of(e, v)
        if g < best_g:
            best_g = g
            best_t = t
    if best_t > 9.0e15 or best_t < -9.0e15:
        e.status = 1
        return -1
    if K > e.wb0 * (1.0 + e.tol):
        # plateau: t with |base_i + t b_i| <= L for every form moving along the line
        L = K * (1.0 - 2.0 * e.tol)
        pa = -1e300
        pb = 1e300
        for i in range(e.r):
            if e.B[i][0] != 0.0:
                lo_i = (-L - base[i]) / e.B[i][0]
                hi_i = (L - base[i]) / e.B[i][0]
                if lo_i > hi_i:
                    lo_i, hi_i = hi_i, lo_i
                if lo_i > pa:
                    pa = lo_i
                if hi_i < pb:
                    pb = hi_i
        has_flat = pa <= pb and pa > -9.0e15 and pb < 9.0e15
    t0 = <long long> floor(best_t)
    for d in range(2):
        prev_g = -1.0
        if d == 1:
            for i in range(e.r):
                v[i] = base[i] + (<double> t0) * e.B[i][0]
            prev_g = weight_of(e, v)
        tt = t0 if d == 0 else t0 + 1
        while True:
            e.nodes += 1
            if e.nodes > e.budget:
                e.status = 1
                return -1
            if has_flat and pa <= <double> tt and <double> tt <= pb:
                if d == 0 and tt < t0 and <double> (tt + 1) <= pb:
                    tt = <long long> ceil(pa) - 1
                    prev_g = K
                    continue
                if d == 1 and pa <= <double> (tt - 1):
                    tt = <long long> floor(pb) + 1
                    prev_g = K
                    continue
            for i in range(e.r):
                v[i] = base[i] + (<double> tt) * e.B[i][0]
            g = weight_of(e, v)
            if g > e.W * (1.0 + e.tol):
                break
            if prev_g >= 0.0 and g > e.wb0 * (1.0 + e.tol) and g > prev_g * (1.0 + e.tol):
                break
            e.u[0] = tt
            if process(e, e.u, g) < 0:
                return -1
            prev_g = g
            tt = tt - 1 if d == 0 else tt + 1
    return 0


cdef int enum_level(EnumState *e, int k, double partial, double *vec, int zero_above) nogil:
    cdef double c = 0.0, R2, rem, half, dd, ps
    cdef double nvec[16]
    cdef long long lo, hi, uk
    cdef int i, j
    if k == 0:
        if zero_above:
            return 0
        e.u[0] = 0
        return line_walk(e, vec)
    for j in range(k + 1, e.m):
        c -= e.mu[j][k] * (<double> e.u[j])
    R2 = e.r * (e.W * (1.0 + e.tol)) * (e.W * (1.0 + e.tol)) * e.slack
    rem = R2 - partial
    if rem < 0.0:
        return 0
    half = sqrt(rem / e.bstar2[k])
    if c - half < -9.0e15 or c + half > 9.0e15:
        e.status = 1
        return -1
    lo = <long long> ceil(c - half)
    hi = <long long> floor(c + half)
    if zero_above and lo < 0:
        lo = 0
    uk = lo
    while uk <= hi:
        e.nodes += 1
        if e.nodes > e.budget:
            e.status = 1
            return -1
        dd = (<double> uk) - c
        ps = partial + e.bstar2[k] * dd * dd
        R2 = e.r * (e.W * (1.0 + e.tol)) * (e.W * (1.0 + e.tol)) * e.slack
        if ps <= R2:
            e.u[k] = uk
            for i in range(e.r):
                nvec[i] = vec[i] + (<double> uk) * e.B[i][k]
            if enum_level(e, k - 1, ps, nvec, zero_above and uk == 0) < 0:
                return -1
        uk += 1
    e.u[k] = 0
    return 0


def enumerate_min_basis(double[:, ::1] B, double tol=1e-9, long long budget=100000000,
                        Z=None, groups=None):
    """Stream lattice points that may belong to a minimum-gauge basis.

    ``B`` holds the scaled images of a (reduced) basis as columns.  Optional
    ``Z`` (int64, same shape) and ``groups`` (one int per row, -1 for none)
    give exact integer images of rows whose true value is ``Z @ u`` times a
    scale shared by the group; they let exact ties be resolved.  Returns
    ``(U, weights, nodes, status)`` where the rows of ``U`` are coordinate
    vectors in that basis: the basis itself first, then every point that was
    not certifiably the heaviest member of a circuit at the time it was seen.
    """
    cdef EnumState *e = <EnumState *> malloc(sizeof(EnumState))
    cdef int r = B.shape[0], m = B.shape[1], i, j, k
    cdef double s, zero[16]
    cdef double bs[MAXD][16]
    cdef long long seed[MAXD]
    if e == NULL:
        raise MemoryError()
    if m > MAXD or r > 16 or m < 1:
        free(e)
        raise ValueError("unsupported dimension")
    memset(e, 0, sizeof(EnumState))
    e.m = m
    e.r = r
    e.tol = tol
    e.slack = (1.0 + 1e-7) * (1.0 + 1e-7)
    e.budget = budget
    for i in range(r):
        zero[i] = 0.0
        for j in range(m):
            e.B[i][j] = B[i, j]
    # Gram-Schmidt on the columns
    for k in range(m):
        for i in range(r):
            bs[k][i] = e.B[i][k]
        for j in range(k):
            s = 0.0
            for i in range(r):
                s += e.B[i][k] * bs[j][i]
            e.mu[k][j] = s / e.bstar2[j]
            for i in range(r):
                bs[k][i] -= e.mu[k][j] * bs[j][i]
        s = 0.0
        for i in range(r):
            s += bs[k][i] * bs[k][i]
        if s <= 0.0:
            free(e)
            raise ValueError("basis is numerically dependent")
        e.bstar2[k] = s
    for i in range(r):
        e.grp[i] = -1
    if Z is not None and groups is not None:
        Zc = np.ascontiguousarray(Z, dtype=np.int64)
        gc = np.ascontiguousarray(groups, dtype=np.int64)
        if Zc.shape[0] != r or Zc.shape[1] != m or gc.shape[0] != r:
            free(e)
            raise ValueError("exact rows do not match B")
        for i in range(r):
            e.grp[i] = <int> gc[i]
            if gc[i] >= 0:
                e.has_exact = 1
            for j in range(m):
                e.Z[i][j] = Zc[i, j]
    for k in range(m):
        for i in range(m):
            e.S[i][k] = 1 if i == k else 0
            seed[i] = 1 if i == k else 0
        for i in range(r):
            zero[i] = e.B[i][k]
        e.w[k] = weight_of(e, zero)
        e.sg[k] = exact_key(e, seed, e.w[k], &e.sv[k])
    e.wb0 = e.w[0]
    refresh_W(e)
    refresh_adjugate(e)
    e.cap = 64
    e.out_u = <long long *> malloc(e.cap * MAXD * sizeof(long long))
    e.out_w = <double *> malloc(e.cap * sizeof(double))
    for k in range(m):
        for i in range(m):
            seed[i] = 1 if i == k else 0
        emit(e, seed, e.w[k])
    for i in range(r):
        zero[i] = 0.0
    for i in range(MAXD):
        e.u[i] = 0
    with nogil:
        enum_level(e, m - 1, 0.0, zero, 1)
    U = np.empty((e.nout, m), dtype=np.int64)
    Wt = np.empty(e.nout, dtype=np.float64)
    cdef long long[:, ::1] Uv = U
    cdef double[::1] Wv = Wt
    for k in range(e.nout):
        for i in range(m):
            Uv[k, i] = e.out_u[k * MAXD + i]
        Wv[k] = e.out_w[k]
    nodes, status = e.nodes, e.status
    free(e.out_u)
    free(e.out_w)
    free(e)
    return U, Wt, nodes, status


cdef inline int keep_best(long double ratio, long long x, long long *y, int n,
                          long double *kr, long long *kc, int K, int *count) nogil:
    # returns 1 when a candidate is discarded
    cdef int pos, i, j, dropped = 0
    if count[0] == K and ratio >= kr[K - 1]:
        return 1
    if count[0] == K:
        dropped = 1
    pos = count[0] if count[0] < K else K - 1
    while pos > 0 and kr[pos - 1] > ratio:
        kr[pos] = kr[pos - 1]
        for j in range(n + 1):
            kc[pos * (n + 1) + j] = kc[(pos - 1) * (n + 1) + j]
        pos -= 1
    kr[pos] = ratio
    kc[pos * (n + 1)] = x
    for j in range(n):
        kc[pos * (n + 1) + 1 + j] = y[j]
    if count[0] < K:
        count[0] += 1
    return dropped


def best_ratio_scan(double zeta_hi, double zeta_lo, int n, long long H,
                    long long lead_lo, long long lead_hi, bint include_lower, int keep=64,
                    double eps_num=0.0, double eps_den=0.0):
    """Smallest ``|P(zeta)|/|P'(zeta)|`` over integer P of height ``<= H``.

    Scans polynomials of degree ``n`` whose leading coefficient lies in
    ``[lead_lo, lead_hi]``, plus all lower-degree non-constant polynomials
    with positive leading coefficient when ``include_lower`` is set.  For each
    non-constant part the two constant terms nearest the optimum are offered.
    Candidates are ranked by the lower bound
    ``max(0, |P~| - eps_num) / (|P'~| + eps_den)`` where ``~`` marks long
    double values and the ``eps`` bound their absolute errors.  Returns
    ``(bounds, coeffs, full)`` for the ``keep`` best candidates, coefficients
    ordered from the constant term upward; ``full`` says whether any
    candidate was discarded.
    """
    cdef long double z = (<long double> zeta_hi) + (<long double> zeta_lo)
    cdef long double zp[MAXD + 1]
    cdef long double s, d, xs, ratio, num, en = eps_num, ed = eps_den
    cdef long long y[MAXD]
    cdef long long x, start, stop, x2
    cdef int i, top, count = 0, K = keep, carry, full = 0, alt
    cdef long double *kr
    cdef long long *kc
    if n < 1 or n >= MAXD:
        raise ValueError("unsupported degree")
    kr = <long double *> malloc(K * sizeof(long double))
    kc = <long long *> malloc(K * (n + 1) * sizeof(long long))
    zp[0] = 1.0
    for i in range(1, n + 1):
        zp[i] = zp[i - 1] * z
    with nogil:
        for top in range(n - 1, -1, -1):
            if top < n - 1 and not include_lower:
                break
            start = lead_lo if top == n - 1 else 1
            stop = lead_hi if top == n - 1 else H
            if start < 1:
                start = 1
            if stop > H:
                stop = H
            if start > stop:
                continue
            for i in range(n):
                y[i] = 0
            y[top] = start
            for i in range(top):
                y[i] = -H
            while y[top] <= stop:
                s = 0.0
                d = 0.0
                for i in range(top + 1):
                    s += (<long double> y[i]) * zp[i + 1]
                    d += (<long double> ((i + 1) * y[i])) * zp[i]
                if d != 0.0:
                    xs = floorl(-s + 0.5)
                    if xs > H:
                        xs = H
                    if xs < -H:
                        xs = -H
                    x = <long long> xs
                    x2 = x + 1 if (<long double> x) < -s else x - 1
                    for alt in range(2):
                        if alt == 1:
                            x = x2
                            if x > H or x < -H:
                                break
                        num = fabsl((<long double> x) + s) - en
                        if num < 0.0:
                            num = 0.0
                        ratio = num / (fabsl(d) + ed)
                        full |= keep_best(ratio, x, y, n, kr, kc, K, &count)
                i = 0
                carry = 1
                while carry and i < top:
                    y[i] += 1
                    if y[i] > H:
                        y[i] = -H
                        i += 1
                    else:
                        carry = 0
                if carry:
                    y[top] += 1
    ratios = np.empty(count, dtype=np.float64)
    coeffs = np.empty((count, n + 1), dtype=np.int64)
    for i in range(count):
        ratios[i] = <double> kr[i]
        for top in range(n + 1):
            coeffs[i, top] = kc[i * (n + 1) + top]
    free(kr)
    free(kc)
    return ratios, coeffs, bool(full)
