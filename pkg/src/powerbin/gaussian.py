"""Normal CDFs in one, two and n dimensions, and the Markov correlation structure.

The bivariate CDF follows Drezner & Wesolowsky as refined by Genz (TVPACK
``BVND``), accurate to about 1e-15.  The n-variate CDF uses Genz's
separation-of-variables transform integrated with a randomly shifted
rank-1 lattice (fast component-by-component construction, Nuyens & Cools);
the shifts come from a fixed seed so results are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.fft import fft, ifft
from scipy.special import ndtr, ndtri

from .core import Sign, as_signs

TWO_PI = 2.0 * math.pi

# Gauss-Legendre rules on [-1, 1] used by the bivariate algorithm.
_GL = {n: leggauss(n) for n in (6, 12, 20)}

MVN_SEED = 20240917
MVN_SHIFTS = 12
MVN_MAX_DIM = 16
MVN_POINTS = 1 << 16
MARKOV_Y_MAX = 8.5
_SHIFTS = np.random.default_rng(MVN_SEED).random((MVN_SHIFTS, MVN_MAX_DIM))


def norm_cdf(x):
    """Standard normal CDF; accepts scalars or arrays, rejects NaN."""
    arr = np.asarray(x, dtype=float)
    if np.isnan(arr).any():
        raise ValueError("norm_cdf: NaN input")
    out = ndtr(arr)
    return float(out) if out.ndim == 0 else out


def _bvnu(h: float, k: float, r: float) -> float:
    """P(X > h, Y > k) for a standard bivariate normal with correlation r."""
    if h == math.inf or k == math.inf:
        return 0.0
    if h == -math.inf:
        return 1.0 if k == -math.inf else float(ndtr(-k))
    if k == -math.inf:
        return float(ndtr(-h))

    ar = abs(r)
    if ar < 0.3:
        x, w = _GL[6]
    elif ar < 0.75:
        x, w = _GL[12]
    else:
        x, w = _GL[20]

    hk = h * k
    if ar < 0.925:
        hs = 0.5 * (h * h + k * k)
        asr = math.asin(r)
        sn = np.sin(0.5 * asr * (x + 1.0))
        bvn = float(np.dot(w, np.exp((sn * hk - hs) / (1.0 - sn * sn))))
        return bvn * asr / (2.0 * TWO_PI) + float(ndtr(-h) * ndtr(-k))

    if r < 0.0:
        k = -k
        hk = -hk
    bvn = 0.0
    if ar < 1.0:
        as_ = (1.0 - r) * (1.0 + r)
        a = math.sqrt(as_)
        bs = (h - k) ** 2
        c = (4.0 - hk) / 8.0
        d = (12.0 - hk) / 16.0
        bvn = a * math.exp(-(bs / as_ + hk) / 2.0) * (
            1.0 - c * (bs - as_) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as_ * as_ / 5.0
        )
        if hk > -160.0:
            b = math.sqrt(bs)
            bvn -= (
                math.exp(-hk / 2.0) * math.sqrt(TWO_PI) * float(ndtr(-b / a)) * b
                * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0)
            )
        a /= 2.0
        xs = (a * (x + 1.0)) ** 2
        rs = np.sqrt(1.0 - xs)
        asr = -(bs / xs + hk) / 2.0
        keep = asr > -100.0
        terms = a * w * np.exp(asr) * (
            np.exp(-hk * xs / (2.0 * (1.0 + rs) ** 2)) / rs - (1.0 + c * xs * (1.0 + d * xs))
        )
        bvn += float(np.sum(terms[keep]))
        bvn = -bvn / TWO_PI

    if r > 0.0:
        bvn += float(ndtr(-max(h, k)))
    else:
        bvn = -bvn
        if k > h:
            if h < 0.0:
                bvn += float(ndtr(k) - ndtr(h))
            else:
                bvn += float(ndtr(-h) - ndtr(-k))
    return bvn


def binorm_cdf(a: float, b: float, rho: float) -> float:
    """P(Y0 <= a, Y1 <= b) for standard normals with correlation ``rho``."""
    a, b, rho = float(a), float(b), float(rho)
    if math.isnan(a) or math.isnan(b) or math.isnan(rho):
        raise ValueError("binorm_cdf: NaN input")
    if not -1.0 <= rho <= 1.0:
        raise ValueError(f"correlation must lie in [-1, 1], got {rho!r}")
    if a == -math.inf or b == -math.inf:
        return 0.0
    if a == math.inf:
        return float(ndtr(b))
    if b == math.inf:
        return float(ndtr(a))
    if rho == 1.0:
        return float(ndtr(min(a, b)))
    if rho == -1.0:
        return max(0.0, float(ndtr(a) - ndtr(-b)))
    return min(1.0, max(0.0, _bvnu(-a, -b, rho)))


@dataclass(frozen=True)
class CorrelationStructure:
    """Markov correlation of standardized Brownian values at increasing times.

    ``rho`` and ``a_matrix`` carry the sign decoration ``s_i s_j``; the
    undecorated versions are exposed separately.  ``a_matrix`` is the
    tridiagonal inverse of ``rho``.
    """

    dim: int
    rho: np.ndarray
    a_matrix: np.ndarray
    signs: tuple[Sign, ...]

    @property
    def sign_vector(self) -> np.ndarray:
        return np.array([int(s) for s in self.signs], dtype=float)

    @property
    def rho_unsigned(self) -> np.ndarray:
        s = self.sign_vector
        return self.rho * np.outer(s, s)

    @property
    def a_unsigned(self) -> np.ndarray:
        s = self.sign_vector
        return self.a_matrix * np.outer(s, s)


def markov_correlation(t: float, expiries: Sequence[float], signs: Sequence[object] | None = None) -> CorrelationStructure:
    """Correlation of ``W(T_i - t)/sqrt(T_i - t)`` and its tridiagonal inverse."""
    T = np.asarray(expiries, dtype=float)
    n = T.size
    if n == 0:
        raise ValueError("need at least one expiry")
    if n > MVN_MAX_DIM:
        raise ValueError(f"dimension {n} exceeds {MVN_MAX_DIM}")
    if np.any(np.diff(T) <= 0.0):
        raise ValueError(f"expiries must be strictly increasing, got {T.tolist()}")
    if T[0] <= t:
        raise ValueError(f"first expiry {T[0]!r} must lie after t={t!r}")
    sg = as_signs(signs) if signs is not None else (Sign.UP,) * n
    if len(sg) != n:
        raise ValueError(f"got {len(sg)} signs for {n} expiries")

    tau = T - t
    lo = np.minimum.outer(tau, tau)
    hi = np.maximum.outer(tau, tau)
    rho = np.sqrt(lo / hi)

    a = np.zeros((n, n))
    if n == 1:
        a[0, 0] = 1.0
    else:
        gaps = np.diff(tau)
        a[0, 0] = tau[1] / gaps[0]
        a[n - 1, n - 1] = tau[n - 1] / gaps[n - 2]
        for i in range(1, n - 1):
            a[i, i] = tau[i] / gaps[i - 1] + tau[i] / gaps[i]
        for i in range(n - 1):
            a[i, i + 1] = a[i + 1, i] = -math.sqrt(tau[i] * tau[i + 1]) / gaps[i]

    s = np.array([int(v) for v in sg], dtype=float)
    ss = np.outer(s, s)
    return CorrelationStructure(dim=n, rho=rho * ss, a_matrix=a * ss, signs=sg)


@dataclass(frozen=True)
class MvnResult:
    prob: float
    error: float
    n_points: int

    def __float__(self) -> float:
        return self.prob


def _genz_order(limits: np.ndarray, cov: np.ndarray) -> list[int]:
    """Genz's heuristic: integrate the most constrained variable first."""
    n = limits.size
    cov = cov.copy()
    b = limits.copy()
    perm = list(range(n))
    chol = np.zeros((n, n))
    y = np.zeros(n)
    for i in range(n):
        cond = []
        for j in range(i, n):
            s = chol[j, :i] @ y[:i]
            sd = math.sqrt(max(cov[j, j] - chol[j, :i] @ chol[j, :i], 1e-300))
            cond.append(ndtr((b[j] - s) / sd))
        best = i + int(np.argmin(cond))
        if best != i:
            perm[i], perm[best] = perm[best], perm[i]
            b[[i, best]] = b[[best, i]]
            cov[[i, best], :] = cov[[best, i], :]
            cov[:, [i, best]] = cov[:, [best, i]]
            chol[[i, best], :] = chol[[best, i], :]
        chol[i, i] = math.sqrt(max(cov[i, i] - chol[i, :i] @ chol[i, :i], 1e-300))
        for j in range(i + 1, n):
            chol[j, i] = (cov[j, i] - chol[j, :i] @ chol[i, :i]) / chol[i, i]
        z = min(max((b[i] - chol[i, :i] @ y[:i]) / chol[i, i], -40.0), 40.0)
        # mean of a standard normal truncated above at z
        p = ndtr(z)
        y[i] = -math.exp(-0.5 * z * z) / math.sqrt(TWO_PI) / p if p > 1e-300 else z
    return perm


def _sov_sample(u: np.ndarray, b: np.ndarray, chol: np.ndarray) -> np.ndarray:
    """Integrand values at points ``u`` of shape (N, n-1)."""
    n = b.size
    npts = u.shape[0]
    f = np.full(npts, float(ndtr(b[0] / chol[0, 0])))
    if n == 1:
        return f
    y = np.empty((npts, n - 1))
    e = f.copy()
    for i in range(1, n):
        y[:, i - 1] = ndtri(np.clip(u[:, i - 1] * e, 1e-300, 1.0 - 1e-16))
        s = y[:, :i] @ chol[i, :i]
        e = ndtr((b[i] - s) / chol[i, i])
        f = f * e
    return f


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def _primitive_root(p: int) -> int:
    factors = _prime_factors(p - 1)
    g = 2
    while any(pow(g, (p - 1) // f, p) == 1 for f in factors):
        g += 1
    return g


@lru_cache(maxsize=16)
def _cbc_lattice(n_points: int) -> tuple[np.ndarray, int]:
    """Generating vector for ``MVN_MAX_DIM`` dimensions and a prime point count <= n_points.

    Component-by-component, so every prefix is itself the CBC vector of
    that lower dimension.
    """
    n = n_points
    while not _is_prime(n):
        n -= 1
    if n < 5:
        raise ValueError(f"too few lattice points: {n_points}")
    m = (n - 1) // 2
    g = _primitive_root(n)
    perm = np.empty(m, dtype=np.int64)
    perm[0] = 1
    for j in range(1, m):
        perm[j] = (g * perm[j - 1]) % n
    perm = np.minimum(n - perm, perm)
    x = perm / n
    c = x * x - x + 1.0 / 6.0
    fc = fft(c)
    gamma = 0.8 ** np.arange(MVN_MAX_DIM)
    z = np.ones(MVN_MAX_DIM, dtype=np.int64)
    q = np.ones(m)
    w = 0
    for s in range(1, MVN_MAX_DIM):
        shifted = np.concatenate([c[: w + 1][::-1], c[w + 1:][::-1]])
        q = q * (1.0 + gamma[s - 1] * shifted)
        w = int(np.argmin(ifft(fc * fft(q)).real))
        z[s] = perm[w]
    return z, n


def _lattice_estimate(b: np.ndarray, chol: np.ndarray, n_points: int) -> tuple[float, float, int]:
    dim = b.size - 1
    z, n = _cbc_lattice(n_points)
    base = (np.arange(n, dtype=float)[:, None] * z[:dim] / n) % 1.0
    means = np.empty(MVN_SHIFTS)
    for m in range(MVN_SHIFTS):
        u = np.abs(2.0 * ((base + _SHIFTS[m, :dim]) % 1.0) - 1.0)
        means[m] = _sov_sample(u, b, chol).mean()
    return float(means.mean()), 3.0 * float(means.std(ddof=1)) / math.sqrt(MVN_SHIFTS), n * MVN_SHIFTS


def mvn_cdf(
    limits: Sequence[float],
    corr: CorrelationStructure | np.ndarray,
    tol: float = 1e-8,
    *,
    order: Sequence[int] | None = None,
    points: int | None = None,
    max_points: int = 1 << 20,
) -> MvnResult:
    """P(Y_i <= limits_i for all i) for a standard normal vector with correlation ``corr``.

    For n = 2 the single remaining integral is done by Gauss-Legendre.  For
    n >= 3 ``error`` is three standard errors across the randomized lattice
    shifts.
    With ``points`` given the lattice size is fixed (rounded down to a
    prime); otherwise it doubles from 2^12 until ``error <= tol`` or
    ``max_points`` is reached.  ``order``
    fixes the integration order; by default Genz's ordering heuristic is used.
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be > 0, got {tol!r}")
    R = corr.rho if isinstance(corr, CorrelationStructure) else np.asarray(corr, dtype=float)
    b = np.asarray(limits, dtype=float)
    n = b.size
    if R.shape != (n, n):
        raise ValueError(f"correlation shape {R.shape} does not match {n} limits")
    if n == 0 or n > MVN_MAX_DIM:
        raise ValueError(f"dimension must be in 1..{MVN_MAX_DIM}, got {n}")
    if np.isnan(b).any():
        raise ValueError("mvn_cdf: NaN limit")
    if not np.allclose(R, R.T, atol=1e-12) or not np.allclose(np.diag(R), 1.0, atol=1e-12):
        raise ValueError("correlation must be symmetric with unit diagonal")
    if np.any(b == -np.inf):
        return MvnResult(0.0, 0.0, 0)

    perm = list(order) if order is not None else _genz_order(np.where(np.isinf(b), 1e300, b), R)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"order must be a permutation of 0..{n - 1}, got {perm}")
    b = b[perm]
    try:
        chol = np.linalg.cholesky(R[np.ix_(perm, perm)])
    except np.linalg.LinAlgError:
        raise ValueError("correlation matrix is not positive definite") from None

    if n == 1:
        return MvnResult(float(ndtr(b[0])), 0.0, 0)
    if n == 2:
        # one integration variable left: Gauss-Legendre beats the lattice
        c, sd = np.array([chol[1, 0]]), np.array([chol[1, 1]])
        prob, used = _markov_sweep(b, c, sd, 20)
        coarse, _ = _markov_sweep(b, c, sd, 12)
        return MvnResult(min(1.0, max(0.0, prob)), abs(prob - coarse), used)
    if points is not None:
        prob, err, used = _lattice_estimate(b, chol, points)
        return MvnResult(min(1.0, max(0.0, prob)), err, used)
    npts = 1 << 12
    while True:
        prob, err, used = _lattice_estimate(b, chol, npts)
        if err <= tol or npts >= max_points:
            return MvnResult(min(1.0, max(0.0, prob)), err, used)
        npts *= 2


def _graded_edges(lo: float, hi: float, center: float, scale: float) -> np.ndarray:
    """Panel edges on [lo, hi], finest around ``center`` and doubling outward up to width 1."""
    w0 = min(1.0, max(1e-3, 0.5 * scale))
    edges = [lo, hi]
    c = min(max(center, lo), hi)
    edges.append(c)
    for direction, stop in ((1.0, hi), (-1.0, lo)):
        pos, w = c, w0
        while (stop - pos) * direction > w:
            pos += direction * w
            edges.append(pos)
            w = min(1.0, 2.0 * w)
    return np.unique(np.asarray(edges))


def _outer_rule(b0: float, b1: float, l10: float, l11: float, n_gl: int = 20) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and density-weighted weights for the outer variable on (-inf, b0]."""
    hi = min(b0, MARKOV_Y_MAX)
    lo = -MARKOV_Y_MAX
    if hi <= lo:
        return np.empty(0), np.empty(0)
    if abs(l10) > 1e-12 and math.isfinite(b1):
        center, scale = b1 / l10, l11 / abs(l10)
    else:
        center, scale = hi, 2.0
    edges = _graded_edges(lo, hi, center, scale)
    x, w = _GL[n_gl]
    a, c = edges[:-1, None], edges[1:, None]
    nodes = (0.5 * (c - a) * x + 0.5 * (c + a)).ravel()
    weights = (0.5 * (c - a) * w).ravel() * np.exp(-0.5 * nodes * nodes) / math.sqrt(TWO_PI)
    return nodes, weights


def _uniform_rule(hi: float, width: float, n_gl: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre on [-MARKOV_Y_MAX, hi] with panels no wider than ``width``."""
    lo = -MARKOV_Y_MAX
    panels = max(1, math.ceil((hi - lo) / width))
    edges = np.linspace(lo, hi, panels + 1)
    x, w = _GL[n_gl]
    a, c = edges[:-1, None], edges[1:, None]
    return (0.5 * (c - a) * x + 0.5 * (c + a)).ravel(), (0.5 * (c - a) * w).ravel()


def _markov_chain(R: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Consecutive correlations c_k = R[k, k-1] and conditional std devs; checks the Markov form."""
    n = R.shape[0]
    c = np.array([R[k, k - 1] for k in range(1, n)])
    expected = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            expected[i, j] = expected[j, i] = np.prod(c[i:j])
    if not np.allclose(R, expected, atol=1e-10, rtol=0.0):
        raise ValueError("correlation is not of Markov (product) form")
    if np.any(np.abs(c) >= 1.0):
        raise ValueError("correlation matrix is not positive definite")
    return c, np.sqrt(1.0 - c * c)


def _markov_sweep(b: np.ndarray, c: np.ndarray, sd: np.ndarray, n_gl: int) -> tuple[float, int]:
    n = b.size
    nodes, weights = _outer_rule(b[0], b[1], c[0], sd[0], n_gl=n_gl)
    if nodes.size == 0:
        return 0.0, 0
    # grids for the middle variables, inner-most last
    grids = []
    for k in range(1, n - 1):
        hi = min(b[k], MARKOV_Y_MAX)
        if hi <= -MARKOV_Y_MAX:
            return 0.0, 0
        width = min(1.0, sd[k - 1], sd[k] / max(abs(c[k]), 1e-300))
        grids.append(_uniform_rule(hi, width, n_gl))
    prev = grids[-1][0] if grids else nodes
    v = ndtr((b[-1] - c[-1] * prev) / sd[-1])
    used = nodes.size
    for k in range(n - 2, 0, -1):
        y, w = grids[k - 1]
        outer = grids[k - 2][0] if k >= 2 else nodes
        kern = np.exp(-0.5 * ((y[None, :] - c[k - 1] * outer[:, None]) / sd[k - 1]) ** 2)
        v = kern @ (w * v) / (sd[k - 1] * math.sqrt(TWO_PI))
        used += y.size
    return float(weights @ v), used


def markov_orthant_cdf(limits: Sequence[float], corr: CorrelationStructure | np.ndarray) -> MvnResult:
    """Rectangle probability for a Markov correlation, by iterated Gauss-Legendre.

    With ``R[i, j] = c_{i+1} ... c_j`` each variable depends on the others
    only through its neighbours, so the integral collapses to a chain of
    one-dimensional integrals.  Variables are integrated latest-first and the
    first one in closed form.  ``error`` compares 20- and 12-point panels.
    """
    R = corr.rho if isinstance(corr, CorrelationStructure) else np.asarray(corr, dtype=float)
    b = np.asarray(limits, dtype=float)[::-1]
    n = b.size
    if R.shape != (n, n):
        raise ValueError(f"correlation shape {R.shape} does not match {n} limits")
    if n == 0 or n > MVN_MAX_DIM:
        raise ValueError(f"dimension must be in 1..{MVN_MAX_DIM}, got {n}")
    if np.isnan(b).any():
        raise ValueError("markov_orthant_cdf: NaN limit")
    if np.any(b == -np.inf):
        return MvnResult(0.0, 0.0, 0)
    if n == 1:
        return MvnResult(float(ndtr(b[0])), 0.0, 0)
    c, sd = _markov_chain(R[::-1, ::-1])
    prob, used = _markov_sweep(b, c, sd, 20)
    coarse, _ = _markov_sweep(b, c, sd, 12)
    return MvnResult(min(1.0, max(0.0, prob)), abs(prob - coarse), used)
