"""Pure-Python versions of the compiled kernels (reference and fallback)."""

from __future__ import annotations

import math

import numpy as np

BIG = 4.0e18


def _adjugate(S: list[list[int]]) -> list[list[int]]:
    m = len(S)
    if m == 1:
        return [[1]]

    def det(a):
        k = len(a)
        if k == 1:
            return a[0][0]
        if k == 2:
            return a[0][0] * a[1][1] - a[0][1] * a[1][0]
        return sum((-1) ** c * a[0][c] * det([row[:c] + row[c + 1:] for row in a[1:]])
                   for c in range(k) if a[0][c])

    adj = [[0] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            minor = [[S[a][b] for b in range(m) if b != i] for a in range(m) if a != j]
            adj[i][j] = (-1) ** (i + j) * det(minor)
    return adj


class _Enum:
    def __init__(self, B: np.ndarray, tol: float, budget: int, Z=None, groups=None):
        self.B = np.asarray(B, dtype=float)
        self.r, self.m = self.B.shape
        self.cols = [self.B[:, k].tolist() for k in range(self.m)]
        self.tol = tol
        self.budget = budget
        self.slack = (1.0 + 1e-7) ** 2
        self.nodes = 0
        self.status = 0
        bs = []
        self.mu = [[0.0] * self.m for _ in range(self.m)]
        self.bstar2 = []
        for k in range(self.m):
            v = list(self.cols[k])
            for j in range(k):
                self.mu[k][j] = sum(a * b for a, b in zip(self.cols[k], bs[j])) / self.bstar2[j]
                v = [a - self.mu[k][j] * b for a, b in zip(v, bs[j])]
            s = sum(a * a for a in v)
            if s <= 0.0:
                raise ValueError("basis is numerically dependent")
            bs.append(v)
            self.bstar2.append(s)
        self.grp = [-1] * self.r
        self.Z = [[0] * self.m for _ in range(self.r)]
        if Z is not None and groups is not None:
            Z = np.asarray(Z, dtype=np.int64)
            if Z.shape != (self.r, self.m) or len(groups) != self.r:
                raise ValueError("exact rows do not match B")
            self.grp = [int(g) for g in groups]
            self.Z = Z.tolist()
        self.has_exact = any(g >= 0 for g in self.grp)
        self.S = [[int(i == k) for k in range(self.m)] for i in range(self.m)]
        self.w = [max(abs(a) for a in c) for c in self.cols]
        keys = [self.exact_key([int(i == k) for i in range(self.m)], self.w[k]) for k in range(self.m)]
        self.sg = [k[0] for k in keys]
        self.sv = [k[1] for k in keys]
        self.wb0 = self.w[0]
        self.W = max(self.w)
        self.adj = _adjugate(self.S)
        self.out_u: list[tuple[int, ...]] = [tuple(int(i == k) for i in range(self.m)) for k in range(self.m)]
        self.out_w: list[float] = list(self.w)
        self.u = [0] * self.m

    def exact_key(self, u, g):
        if not self.has_exact:
            return -1, 0
        G, best = -1, 0
        for i in range(self.r):
            v = 0.0
            for k in range(self.m):
                v += float(u[k]) * self.cols[k][i]
            if abs(v) >= g * (1.0 - 4.0 * self.tol):
                if self.grp[i] < 0 or (G != -1 and G != self.grp[i]):
                    return -1, 0
                G = self.grp[i]
                if sum(abs(float(z) * float(x)) for z, x in zip(self.Z[i], u)) > BIG:
                    return -1, 0
                best = max(best, abs(sum(z * x for z, x in zip(self.Z[i], u))))
        return G, best

    def process(self, u, g):
        if g > self.W * (1.0 + self.tol):
            return
        c = [sum(a * b for a, b in zip(row, u)) for row in self.adj]
        live = [i for i in range(self.m) if c[i] != 0]
        imax = max(live, key=lambda i: self.w[i])
        maxw = self.w[imax]
        if g > maxw * (1.0 + self.tol):
            return
        if g >= maxw * (1.0 - 4.0 * self.tol):
            kg, kv = self.exact_key(u, g)
            if all(self.w[i] < g * (1.0 - 4.0 * self.tol) or (kg >= 0 and self.sg[i] == kg and kv >= self.sv[i])
                   for i in live):
                return
        self.out_u.append(tuple(u))
        self.out_w.append(g)
        if g < maxw:
            for j in range(self.m):
                self.S[j][imax] = u[j]
            self.w[imax] = g
            self.sg[imax], self.sv[imax] = self.exact_key(u, g)
            self.adj = _adjugate(self.S)
            self.W = max(self.w)

    def _budget(self):
        self.nodes += 1
        if self.nodes > self.budget:
            self.status = 1
            raise _Stop

    def line_walk(self, base):
        b0 = self.cols[0]
        r = self.r
        cand = []
        K = -1.0
        for i in range(r):
            if b0[i] != 0.0:
                cand.append(-base[i] / b0[i])
            elif abs(base[i]) > K:
                K = abs(base[i])
            for j in range(i + 1, r):
                den = b0[i] - b0[j]
                if den != 0.0:
                    cand.append((base[j] - base[i]) / den)
                den = b0[i] + b0[j]
                if den != 0.0:
                    cand.append((-base[j] - base[i]) / den)

        def g_at(t):
            return max(abs(base[i] + t * b0[i]) for i in range(r))

        best_t, best_g = 0.0, math.inf
        for t in cand:
            g = g_at(t)
            if g < best_g:
                best_g, best_t = g, t
        if abs(best_t) > 9.0e15:
            self.status = 1
            raise _Stop
        has_flat, pa, pb = False, 1.0, 0.0
        if K > self.wb0 * (1.0 + self.tol):
            L = K * (1.0 - 2.0 * self.tol)
            pa, pb = -1e300, 1e300
            for i in range(r):
                if b0[i] != 0.0:
                    lo_i, hi_i = sorted(((-L - base[i]) / b0[i], (L - base[i]) / b0[i]))
                    pa, pb = max(pa, lo_i), min(pb, hi_i)
            has_flat = pa <= pb and pa > -9.0e15 and pb < 9.0e15
        t0 = math.floor(best_t)
        for d in (0, 1):
            prev_g = -1.0 if d == 0 else g_at(float(t0))
            tt = t0 if d == 0 else t0 + 1
            while True:
                self._budget()
                if has_flat and pa <= tt <= pb:
                    if d == 0 and tt < t0 and tt + 1 <= pb:
                        tt, prev_g = math.ceil(pa) - 1, K
                        continue
                    if d == 1 and pa <= tt - 1:
                        tt, prev_g = math.floor(pb) + 1, K
                        continue
                g = g_at(float(tt))
                if g > self.W * (1.0 + self.tol):
                    break
                if prev_g >= 0.0 and g > self.wb0 * (1.0 + self.tol) and g > prev_g * (1.0 + self.tol):
                    break
                self.u[0] = tt
                self.process(self.u, g)
                prev_g = g
                tt = tt - 1 if d == 0 else tt + 1

    def level(self, k, partial, vec, zero_above):
        if k == 0:
            if zero_above:
                return
            self.u[0] = 0
            self.line_walk(vec)
            return
        c = -sum(self.mu[j][k] * self.u[j] for j in range(k + 1, self.m))
        R2 = self.r * (self.W * (1.0 + self.tol)) ** 2 * self.slack
        rem = R2 - partial
        if rem < 0.0:
            return
        half = math.sqrt(rem / self.bstar2[k])
        if abs(c) + half > 9.0e15:
            self.status = 1
            raise _Stop
        lo, hi = math.ceil(c - half), math.floor(c + half)
        if zero_above:
            lo = max(lo, 0)
        col = self.cols[k]
        for uk in range(lo, hi + 1):
            self._budget()
            ps = partial + self.bstar2[k] * (uk - c) ** 2
            R2 = self.r * (self.W * (1.0 + self.tol)) ** 2 * self.slack
            if ps <= R2:
                self.u[k] = uk
                nvec = [a + uk * b for a, b in zip(vec, col)]
                self.level(k - 1, ps, nvec, zero_above and uk == 0)
        self.u[k] = 0


class _Stop(Exception):
    pass


def enumerate_min_basis(B, tol: float = 1e-9, budget: int = 100_000_000, Z=None, groups=None):
    e = _Enum(B, tol, budget, Z, groups)
    try:
        e.level(e.m - 1, 0.0, [0.0] * e.r, True)
    except _Stop:
        pass
    U = np.array(e.out_u, dtype=np.int64).reshape(len(e.out_u), e.m)
    return U, np.array(e.out_w, dtype=float), e.nodes, e.status


def best_ratio_scan(zeta_hi: float, zeta_lo: float, n: int, H: int, lead_lo: int, lead_hi: int,
                    include_lower: bool, keep: int = 64, eps_num: float = 0.0, eps_den: float = 0.0):
    """Vectorised scan; same contract as the compiled version."""
    z = np.longdouble(zeta_hi) + np.longdouble(zeta_lo)
    zp = [np.longdouble(1)]
    for _ in range(n):
        zp.append(zp[-1] * z)
    zp = np.array(zp, dtype=np.longdouble)
    en, ed = np.longdouble(eps_num), np.longdouble(eps_den)
    rat_all, coef_all = [], []
    for top in range(n - 1, -1, -1):
        if top < n - 1 and not include_lower:
            break
        start, stop = (lead_lo, lead_hi) if top == n - 1 else (1, H)
        start, stop = max(start, 1), min(stop, H)
        if start > stop:
            continue
        axes = [np.arange(-H, H + 1, dtype=np.int64)] * top + [np.arange(start, stop + 1, dtype=np.int64)]
        grids = np.meshgrid(*axes, indexing="ij")
        # the compiled loop runs the lowest coefficient fastest
        Y = np.stack([g.transpose().ravel() for g in grids], axis=1)
        Yl = Y.astype(np.longdouble)
        s = np.zeros(len(Y), dtype=np.longdouble)
        d = np.zeros(len(Y), dtype=np.longdouble)
        for i in range(top + 1):
            s = s + Yl[:, i] * zp[i + 1]
            d = d + (Yl[:, i] * (i + 1)) * zp[i]
        ok = d != 0
        Y, s, d = Y[ok], s[ok], d[ok]
        x = np.clip(np.floor(-s + np.longdouble(0.5)), -H, H)
        x2 = np.where(x < -s, x + 1, x - 1)
        for xx, valid in ((x, np.ones(len(x), dtype=bool)), (x2, (x2 <= H) & (x2 >= -H))):
            num = np.maximum(np.abs(xx + s) - en, 0)
            ratio = num / (np.abs(d) + ed)
            full = np.zeros((int(valid.sum()), n + 1), dtype=np.int64)
            full[:, 0] = xx[valid].astype(np.int64)
            full[:, 1:top + 2] = Y[valid]
            rat_all.append(ratio[valid])
            coef_all.append(full)
    if not rat_all:
        return np.empty(0), np.empty((0, n + 1), dtype=np.int64), False
    ratio = np.concatenate(rat_all)
    coeffs = np.concatenate(coef_all)
    order = np.lexsort((np.arange(len(ratio)), ratio))
    return ratio[order[:keep]].astype(float), coeffs[order[:keep]], bool(len(ratio) > keep)
