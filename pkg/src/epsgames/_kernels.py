"""Compiled hot paths: counter-based draws, inverse-CDF sampling, and
per-game equilibrium counting/existence kernels.

All kernels are single-threaded and release the GIL; callers parallelize
over disjoint game-index ranges.  The draw recipe here must stay in exact
agreement with the pure-Python reference in rng.py.
"""

import math

import numpy as np
from numba import boolean, float64, int64, njit, uint64

_G = np.uint64(0x9E3779B97F4A7C15)
_MULA = np.uint64(0xBF58476D1CE4E5B9)
_MULB = np.uint64(0x94D049BB133111EB)

FAM_UNIFORM = 0
FAM_EXPONENTIAL = 1
FAM_PARETO = 2
FAM_CAUCHY = 3
FAM_GAUSSIAN = 4

_NEG_INF = -1.0e300


@njit(uint64(uint64), cache=True, nogil=True, inline="always")
def _mix64(x):
    x = (x ^ (x >> uint64(30))) * _MULA
    x = (x ^ (x >> uint64(27))) * _MULB
    return x ^ (x >> uint64(31))


@njit(float64(uint64, uint64), cache=True, nogil=True, inline="always")
def _u01(key, pos):
    w = _mix64(key ^ _mix64((pos + uint64(1)) * _G))
    return (float64(w >> uint64(11)) + 0.5) * (2.0 ** -53)


@njit(uint64(uint64, int64), cache=True, nogil=True, inline="always")
def _game_key(root, game_index):
    return _mix64(root ^ (uint64(game_index + 1) * _G))


@njit(float64(float64), cache=True, nogil=True)
def _std_normal_quantile(u):
    # Wichura's PPND16 rational approximation, then one Newton step
    # against the erfc-based CDF to pin the round trip.
    q = u - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        x = q * (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r
                      + 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r
                    + 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r
                  + 1.3314166789178437745e2) * r + 3.3871328727963666080e0) / \
            (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r
                  + 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r
                + 5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r
              + 4.2313330701600911252e1) * r + 1.0)
    else:
        r = u if q < 0.0 else 1.0 - u
        r = math.sqrt(-math.log(r))
        if r <= 5.0:
            r = r - 1.6
            x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r
                      + 2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r
                    + 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r
                  + 4.63033784615654529590e0) * r + 1.42343711074968357734e0) / \
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r
                      + 1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r
                    + 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r
                  + 2.05319162663775882187e0) * r + 1.0)
        else:
            r = r - 5.0
            x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
                      + 1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r
                    + 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r
                  + 5.46378491116411436990e0) * r + 6.65790464350110377720e0) / \
                ((((((1.42151175831644588870e-15 * r + 1.84631831751005468180e-6) * r
                     + 7.86869131145613259100e-4) * r + 1.48753612908506148525e-2) * r
                   + 1.36929880922735805310e-1) * r + 5.99832206555887937690e-1) * r + 1.0)
        if q < 0.0:
            x = -x
    cdf = 0.5 * math.erfc(-x * 0.7071067811865476)
    pdf = 0.3989422804014327 * math.exp(-0.5 * x * x)
    if pdf > 0.0:
        x -= (cdf - u) / pdf
    return x


@njit(float64(int64, float64, float64, float64), cache=True, nogil=True, inline="always")
def _quantile(fam, p0, p1, u):
    if fam == 0:
        return p0 + p1 * u                            # uniform: lo, hi-lo
    elif fam == 1:
        return -math.log1p(-u) / p0                   # exponential: rate
    elif fam == 2:
        return p0 * math.exp(p1 * math.log1p(-u))     # pareto: scale, -1/shape
    elif fam == 3:
        return p0 + p1 * math.tan(math.pi * (u - 0.5))  # cauchy: loc, scale
    else:
        return p0 + p1 * _std_normal_quantile(u)      # gaussian: mean, std


@njit(float64[:](uint64, int64[:]), cache=True, nogil=True)
def uniforms_at(key, positions):
    out = np.empty(positions.size, np.float64)
    for t in range(positions.size):
        out[t] = _u01(key, uint64(positions[t]))
    return out


@njit(float64[:](uint64, int64), cache=True, nogil=True)
def uniforms_range(key, n):
    out = np.empty(n, np.float64)
    for t in range(n):
        out[t] = _u01(key, uint64(t))
    return out


@njit(float64[:](int64, float64, float64, float64[:]), cache=True, nogil=True)
def quantile_array(fam, p0, p1, u):
    out = np.empty(u.size, np.float64)
    for t in range(u.size):
        out[t] = _quantile(fam, p0, p1, u[t])
    return out


@njit(float64[:](float64[:]), cache=True, nogil=True)
def std_normal_quantile_array(u):
    out = np.empty(u.size, np.float64)
    for t in range(u.size):
        out[t] = _std_normal_quantile(u[t])
    return out


@njit((uint64, int64, int64, int64[:], int64[:], int64, float64, float64,
       float64[:], int64[:], int64[:, :], int64[:, :]),
      cache=True, nogil=True)
def count_games(root, g0, g1, dims, strides, fam, p0, p1, eps,
                out_nash, out_eps, out_star):
    """Exact equilibrium counts for i.i.d. games g0..g1-1 of one cell.

    For each profile it accumulates the number of agents that are not best
    responding and the largest deviation gain across agents; every count the
    report needs falls out of those two statistics.
    """
    n = dims.size
    P = 1
    kmax = 0
    for i in range(n):
        P *= dims[i]
        if dims[i] > kmax:
            kmax = dims[i]
    K = eps.size
    nonbr = np.zeros(P, np.uint8)
    dmax = np.empty(P, np.float64)
    vals = np.empty(kmax, np.float64)
    for g in range(g0, g1):
        key = _game_key(root, g)
        for a in range(P):
            nonbr[a] = 0
            dmax[a] = _NEG_INF
        for i in range(n):
            stride = strides[i]
            k = dims[i]
            block = stride * k
            for ob in range(P // block):
                for lo in range(stride):
                    base = ob * block + lo
                    m1 = _NEG_INF
                    m2 = _NEG_INF
                    for j in range(k):
                        pos = (base + j * stride) * n + i
                        v = _quantile(fam, p0, p1, _u01(key, uint64(pos)))
                        vals[j] = v
                        if v > m1:
                            m2 = m1
                            m1 = v
                        elif v > m2:
                            m2 = v
                    for j in range(k):
                        v = vals[j]
                        d = (m1 - v) if v < m1 else (m2 - v)
                        a = base + j * stride
                        if d > 0.0:
                            nonbr[a] += 1
                        if d > dmax[a]:
                            dmax[a] = d
        gi = g - g0
        cn = 0
        for a in range(P):
            if nonbr[a] == 0:
                cn += 1
        out_nash[gi] = cn
        for e in range(K):
            ce = 0
            cs = 0
            ev = eps[e]
            for a in range(P):
                if dmax[a] <= ev:
                    ce += 1
                    if nonbr[a] <= 1:
                        cs += 1
            out_eps[gi, e] = ce
            out_star[gi, e] = cs
    return


@njit(int64(uint64, int64, int64[:], int64[:], int64, float64, float64,
            float64, boolean, boolean, boolean, int64),
      cache=True, nogil=True)
def exists_scan(root, game_index, dims, strides, fam, p0, p1, eps,
                want_nash, want_eps, want_star, chunk):
    """Early-exit existence scan for one i.i.d. game, never materializing it.

    Profiles are visited in flat order in fixed-size chunks; within a chunk
    each agent pass compacts the survivors, so a chunk's cost collapses
    geometrically.  Returns a bitmask: 1 = pure NE found, 2 = eps found,
    4 = eps-star found.  Exact: a flag is 0 only after the full space has
    been ruled out.
    """
    n = dims.size
    P = 1
    for i in range(n):
        P *= dims[i]
    C = chunk if chunk < P else P
    idx = np.empty(C, np.int64)
    nonbr = np.empty(C, np.uint8)
    key = _game_key(root, game_index)
    found_n = False
    found_e = False
    found_s = False
    c0 = 0
    while c0 < P:
        m = C if P - c0 >= C else P - c0
        for t in range(m):
            idx[t] = c0 + t
            nonbr[t] = 0
        count = m
        for i in range(n):
            if count == 0:
                break
            stride = strides[i]
            k = dims[i]
            if want_eps and not found_e:
                cap = 255
            elif want_star and not found_s:
                cap = 1
            else:
                cap = 0
            w = 0
            for t in range(count):
                a = idx[t]
                ai = (a // stride) % k
                base = a - ai * stride
                own = _quantile(fam, p0, p1, _u01(key, uint64(a * n + i)))
                m1 = own
                m2 = _NEG_INF
                for j in range(k):
                    if j == ai:
                        continue
                    pos = (base + j * stride) * n + i
                    v = _quantile(fam, p0, p1, _u01(key, uint64(pos)))
                    if v > m1:
                        m2 = m1
                        m1 = v
                    elif v > m2:
                        m2 = v
                d = (m1 - own) if own < m1 else (m2 - own)
                nb = nonbr[t] + (1 if d > 0.0 else 0)
                if d <= eps and nb <= cap:
                    idx[w] = a
                    nonbr[w] = np.uint8(nb)
                    w += 1
            count = w
        for t in range(count):
            found_e = True
            if nonbr[t] <= 1:
                found_s = True
                if nonbr[t] == 0:
                    found_n = True
                    break
        done = True
        if want_nash and not found_n:
            done = False
        if want_eps and not found_e:
            done = False
        if want_star and not found_s:
            done = False
        if done:
            break
        c0 += m
    flags = 0
    if found_n:
        flags |= 1
    if found_e:
        flags |= 2
    if found_s:
        flags |= 4
    return flags
