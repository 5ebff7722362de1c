"""Capacity bounds and the chi-square-input rate for the rectified channel.

The integrated receiver decodes through Y = |sqrt(hP*X) + Z2|^2 + Z1 with
nonnegative power input X, E[X] <= 1, antenna noise Z2 ~ CN(0, sigma2_a) and
processing noise Z1 ~ N(0, sigma2_rec).  Closed-form upper bounds come from
the two single-noise limits; the achievable rate is the mutual information of
a central chi-square (1 dof) input, estimated by Monte Carlo with analytic
conditional/marginal output densities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import i0e

from .core import LOG2E, q_function
from .errors import InvalidParams, QuadratureFailure, SplitAtUnity, ZeroNoise

EULER_GAMMA = float(np.euler_gamma)


@dataclass(frozen=True)
class C1BoundParams:
    """Free parameters of the intensity-channel upper bound."""

    beta: float
    delta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise InvalidParams(f"beta must be > 0, got {self.beta}")
        if self.delta < 0:
            raise InvalidParams(f"delta must be >= 0, got {self.delta}")


@dataclass(frozen=True)
class MonteCarloConfig:
    """Sampling configuration for the mutual-information estimator."""

    n_samples: int = 100_000
    seed: int = 0
    quad_tol: float = 1e-10

    def __post_init__(self):
        if self.n_samples < 10_000:
            raise InvalidParams("mutual-information estimate needs n_samples >= 10000")
        if not self.quad_tol > 0:
            raise InvalidParams("quad_tol must be > 0")


@dataclass(frozen=True)
class MiEstimate:
    """Monte Carlo mutual-information estimate [bits/channel use]."""

    value: float
    std_error: float
    n_samples: int
    quadrature_tolerance: float
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "value_bits": self.value,
            "std_error_bits": self.std_error,
            "n_samples": self.n_samples,
            "quadrature_tolerance": self.quadrature_tolerance,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class EffectiveNoise:
    """Processing noise referred through the baseband power splitter."""

    sigma2_eff: float


def effective_proc_noise(sigma2_rec: float, sigma2_adc: float, rho: float) -> EffectiveNoise:
    """sigma2_rec + sigma2_adc / (1 - rho)^2 for a baseband split ratio rho."""
    if sigma2_rec < 0 or sigma2_adc < 0:
        raise InvalidParams("noise powers must be >= 0")
    if not 0 <= rho <= 1:
        raise InvalidParams(f"rho must lie in [0, 1], got {rho}")
    if rho == 1.0:
        if sigma2_adc > 0:
            raise SplitAtUnity("rho = 1 makes the effective processing noise unbounded")
        return EffectiveNoise(sigma2_rec)
    return EffectiveNoise(sigma2_rec + sigma2_adc / (1.0 - rho) ** 2)


def c1_asymptotic(hp: float, sigma_rec: float) -> float:
    """High-power capacity of the intensity channel: log2(hP/sigma_rec) + 0.5*log2(e/2pi)."""
    if not (hp > 0 and sigma_rec > 0):
        raise InvalidParams("c1_asymptotic needs hp > 0 and sigma_rec > 0")
    return math.log2(hp / sigma_rec) + 0.5 * math.log2(math.e / (2.0 * math.pi))


def c1_upper(hp: float, sigma_rec: float, params: C1BoundParams) -> float:
    """Intensity-channel capacity upper bound, valid for any (beta, delta).

    A duality-style bound: an output-measure log term, two moment terms in
    nats, minus the processing-noise differential entropy.
    """
    if not (hp > 0 and sigma_rec > 0):
        raise InvalidParams("c1_upper needs hp > 0 and sigma_rec > 0")
    beta, delta = params.beta, params.delta
    dr = delta / sigma_rec
    edr = math.exp(-0.5 * dr * dr)
    q_dr = q_function(dr)
    sqrt_2pi = math.sqrt(2.0 * math.pi)
    term1 = math.log2(beta * edr + sqrt_2pi * sigma_rec * q_dr)
    term2 = (0.5 * q_dr + (delta + hp + sigma_rec * edr / sqrt_2pi) / beta) * LOG2E
    term3 = (
        delta * edr / (2.0 * sqrt_2pi * sigma_rec)
        + 0.5 * dr * dr * (1.0 - q_function((delta + hp) / sigma_rec))
    ) * LOG2E
    term4 = -0.5 * math.log2(2.0 * math.pi * math.e * sigma_rec * sigma_rec)
    return term1 + term2 + term3 + term4


def c1_upper_optimized(hp: float, sigma_rec: float) -> tuple[float, C1BoundParams]:
    """Minimize the free parameters of c1_upper.

    Coarse log/linear grid followed by coordinate descent; any grid coarseness
    only loosens the (still valid) bound.
    """
    if not (hp > 0 and sigma_rec > 0):
        raise InvalidParams("c1_upper_optimized needs hp > 0 and sigma_rec > 0")
    log_beta_lo = math.log(1e-3 * sigma_rec)
    log_beta_hi = math.log(1e3 * (hp + sigma_rec))
    delta_hi = 10.0 * sigma_rec

    betas = np.exp(np.linspace(log_beta_lo, log_beta_hi, 48))
    deltas = np.linspace(0.0, delta_hi, 25)
    best_val, best_b, best_d = math.inf, betas[0], 0.0
    for b in betas:
        for d in deltas:
            v = c1_upper(hp, sigma_rec, C1BoundParams(b, d))
            if v < best_val:
                best_val, best_b, best_d = v, b, d

    def eval_at(log_b, d):
        return c1_upper(hp, sigma_rec, C1BoundParams(math.exp(log_b), d))

    log_b, d = math.log(best_b), best_d
    prev = best_val
    for _ in range(60):
        res = minimize_scalar(lambda lb: eval_at(lb, d), bounds=(log_beta_lo, log_beta_hi),
                              method="bounded", options={"xatol": 1e-12})
        log_b = res.x
        res = minimize_scalar(lambda dd: eval_at(log_b, dd), bounds=(0.0, delta_hi),
                              method="bounded", options={"xatol": 1e-12})
        d = res.x
        val = res.fun
        if abs(prev - val) <= 1e-6 * max(1.0, abs(val)):
            prev = val
            break
        prev = val
    params = C1BoundParams(math.exp(log_b), d)
    return c1_upper(hp, sigma_rec, params), params


def c2_upper(hp: float, sigma2_a: float) -> float:
    """Noncoherent-channel capacity upper bound with Euler-constant correction."""
    if hp < 0 or sigma2_a <= 0:
        raise InvalidParams("c2_upper needs hp >= 0 and sigma2_a > 0")
    return 0.5 * math.log2(1.0 + hp / sigma2_a) + 0.5 * (
        math.log2(2.0 * math.pi / math.e) - EULER_GAMMA * LOG2E
    )


def c2_asymptotic(hp: float, sigma2_a: float) -> float:
    """High-power noncoherent rate 0.5*log2(1 + hP/(2 sigma2_a)), achieved by a
    central chi-square (1 dof) power input."""
    if hp < 0 or sigma2_a <= 0:
        raise InvalidParams("c2_asymptotic needs hp >= 0 and sigma2_a > 0")
    return 0.5 * math.log2(1.0 + hp / (2.0 * sigma2_a))


def cnl_upper(hp: float, sigma2_a: float, sigma_rec: float) -> float:
    """Capacity upper bound of the rectified channel: the tighter of the two
    single-noise-limit bounds."""
    c1, _ = c1_upper_optimized(hp, sigma_rec)
    return min(c1, c2_upper(hp, sigma2_a))


# ---------------------------------------------------------------------------
# Output densities of Y = W + Z1, W = |sqrt(hP x) + Z2|^2, in t = sqrt(w) space
# ---------------------------------------------------------------------------

def _log_density_w_cond(w, nu, sigma2_a):
    """log density of W given the signal amplitude nu = sqrt(hP x)."""
    sw = np.sqrt(np.maximum(w, 0.0))
    return (
        -((sw - nu) ** 2) / sigma2_a
        + np.log(i0e(2.0 * sw * nu / sigma2_a))
        - np.log(sigma2_a)
    )


def _density_t_cond(t, nu, sigma2_a):
    """Density of T = sqrt(W) given nu (Rice law)."""
    return (2.0 * t / sigma2_a) * np.exp(-((t - nu) ** 2) / sigma2_a) * i0e(
        2.0 * t * nu / sigma2_a
    )


def _marginal_w_variances(hp, sigma2_a):
    # W is marginally a sum of squares of independent zero-mean Gaussians
    # with these variances (chi-square input integrated out analytically)
    return hp + 0.5 * sigma2_a, 0.5 * sigma2_a


def _log_density_w_marg(w, hp, sigma2_a):
    v1, v2 = _marginal_w_variances(hp, sigma2_a)
    return (
        -w / (2.0 * v1)
        + np.log(i0e(w * (v1 - v2) / (4.0 * v1 * v2)))
        - np.log(2.0 * math.sqrt(v1 * v2))
    )


def _density_t_marg(t, hp, sigma2_a):
    v1, v2 = _marginal_w_variances(hp, sigma2_a)
    return (t / math.sqrt(v1 * v2)) * np.exp(-t * t / (2.0 * v1)) * i0e(
        t * t * (v1 - v2) / (4.0 * v1 * v2)
    )


_NODE_LEVELS = (16, 32, 64, 128, 256, 512)
_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl_nodes(n):
    if n not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(n)
        _GL_CACHE[n] = (0.5 * (x + 1.0), 0.5 * w)  # mapped to [0, 1]
    return _GL_CACHE[n]


def _panelized_integrals(knots, integrand, quad_tol):
    """Integrate a smooth nonnegative integrand over per-sample panels.

    knots: (n, k) sorted panel edges per sample.  Escalates Gauss-Legendre
    nodes per panel until successive levels differ by <= quad_tol (absolute).
    """
    n = knots.shape[0]
    result = np.zeros(n)
    active = np.arange(n)
    prev = None
    for level, n_nodes in enumerate(_NODE_LEVELS):
        u, gw = _gl_nodes(n_nodes)
        a = knots[active, :-1]                      # (m, k-1) panel lower edges
        widths = knots[active, 1:] - a              # (m, k-1)
        t = a[..., None] + widths[..., None] * u    # (m, k-1, nodes)
        vals = integrand(t, active)
        cur = np.einsum("mpk,k,mp->m", vals, gw, widths)
        if prev is None:
            prev = cur
            continue
        done = np.abs(cur - prev) <= quad_tol
        result[active[done]] = cur[done]
        active = active[~done]
        if active.size == 0:
            return result
        prev = cur[~done]
    raise QuadratureFailure(
        f"{active.size} output-density integrals missed tol={quad_tol}; "
        "rescale powers/noises toward order unity"
    )


def _build_knots(t_lo, t_hi, features):
    """Sorted panel edges from the integration window plus clipped feature knots."""
    cols = [t_lo] + [np.clip(f, t_lo, t_hi) for f in features] + [t_hi]
    knots = np.column_stack(cols)
    knots.sort(axis=1)
    return knots


def _gaussian_window(y, sigma_rec):
    lo = np.maximum(y - 10.0 * sigma_rec, 0.0)
    hi = np.maximum(y + 10.0 * sigma_rec, 1e-3 * sigma_rec)
    return np.sqrt(lo), np.sqrt(hi)


def _log_phi(z, sigma2):
    return -(z * z) / (2.0 * sigma2) - 0.5 * math.log(2.0 * math.pi * sigma2)


def _log_p_cond(y, x, hp, sigma2_a, sigma2_rec, quad_tol):
    """log p(y | x) for each sample."""
    if sigma2_rec == 0.0:
        return _log_density_w_cond(y, np.sqrt(hp * x), sigma2_a)
    if sigma2_a == 0.0:
        return _log_phi(y - hp * x, sigma2_rec)
    sigma_rec = math.sqrt(sigma2_rec)
    nu = np.sqrt(hp * x)
    sig_t = math.sqrt(sigma2_a)
    t_lo, t_hi = _gaussian_window(y, sigma_rec)
    ty = np.sqrt(np.maximum(y, 0.0))
    phi_w = 0.5 * sigma_rec / np.maximum(ty, math.sqrt(sigma_rec))
    knots = _build_knots(
        t_lo, t_hi,
        [nu - 6 * sig_t, nu - 2 * sig_t, nu + 2 * sig_t, nu + 6 * sig_t,
         ty - 6 * phi_w, ty - 2 * phi_w, ty + 2 * phi_w, ty + 6 * phi_w],
    )

    def integrand(t, active):
        yy = y[active, None, None]
        nn = nu[active, None, None]
        gauss = np.exp(_log_phi(yy - t * t, sigma2_rec))
        return _density_t_cond(t, nn, sigma2_a) * gauss

    vals = _panelized_integrals(knots, integrand, quad_tol)
    return np.log(np.maximum(vals, 5e-324))


def _log_p_marg(y, hp, sigma2_a, sigma2_rec, quad_tol):
    """log p(y) under the chi-square power input, for each sample."""
    if sigma2_rec == 0.0:
        return _log_density_w_marg(y, hp, sigma2_a)
    sigma_rec = math.sqrt(sigma2_rec)
    t_lo, t_hi = _gaussian_window(y, sigma_rec)
    ty = np.sqrt(np.maximum(y, 0.0))
    if sigma2_a == 0.0:
        if hp == 0.0:
            return _log_phi(y, sigma2_rec)
        # p(y) = int 2*phi_halfnormal(t) * phi(y - hP t^2) dt with t = sqrt(x)
        sq = math.sqrt(hp)
        t_lo, t_hi = t_lo / sq, t_hi / sq
        tc = ty / sq
        phi_w = 0.5 * sigma_rec / np.maximum(ty * sq, math.sqrt(hp * sigma_rec))
        ones = np.ones_like(y)
        knots = _build_knots(
            t_lo, t_hi,
            [tc - 6 * phi_w, tc - 2 * phi_w, tc + 2 * phi_w, tc + 6 * phi_w,
             0.5 * ones, 1.0 * ones, 2.0 * ones, 4.0 * ones],
        )

        def integrand(t, active):
            yy = y[active, None, None]
            gauss = np.exp(_log_phi(yy - hp * t * t, sigma2_rec))
            half_normal = math.sqrt(2.0 / math.pi) * np.exp(-0.5 * t * t)
            return half_normal * gauss

        vals = _panelized_integrals(knots, integrand, quad_tol)
        return np.log(np.maximum(vals, 5e-324))
    v1, v2 = _marginal_w_variances(hp, sigma2_a)
    s1, s2 = math.sqrt(v1), math.sqrt(v2)
    phi_w = 0.5 * sigma_rec / np.maximum(ty, math.sqrt(sigma_rec))
    ones = np.ones_like(y)
    knots = _build_knots(
        t_lo, t_hi,
        [s2 * ones, 3 * s2 * ones, 0.5 * s1 * ones, s1 * ones, 2 * s1 * ones, 3 * s1 * ones,
         ty - 6 * phi_w, ty - 2 * phi_w, ty + 2 * phi_w, ty + 6 * phi_w],
    )

    def integrand(t, active):
        yy = y[active, None, None]
        gauss = np.exp(_log_phi(yy - t * t, sigma2_rec))
        return _density_t_marg(t, hp, sigma2_a) * gauss

    vals = _panelized_integrals(knots, integrand, quad_tol)
    return np.log(np.maximum(vals, 5e-324))


_CHUNK = 4096


def cnl_lower_chi2(hp: float, sigma2_a: float, sigma2_rec: float,
                   mc: MonteCarloConfig = MonteCarloConfig()) -> MiEstimate:
    """Achievable rate of the rectified channel with a chi-square power input.

    Draws X = G^2 (G standard normal, so E[X] = 1), pushes each sample through
    the channel, and averages log2 p(Y|X)/p(Y).  The conditional law of the
    squared envelope is the scaled noncentral form with scale sigma2_a and
    noncentrality hP*X, evaluated in log space via the exponentially scaled
    Bessel term; the processing-noise convolution and the input-averaged
    marginal are 1-D panel quadratures to absolute tolerance mc.quad_tol.
    Results are bit-reproducible for a fixed seed and independent of internal
    chunking.
    """
    if hp < 0:
        raise InvalidParams("hp must be >= 0")
    if sigma2_a < 0 or sigma2_rec < 0:
        raise InvalidParams("noise powers must be >= 0")
    if sigma2_a == 0 and sigma2_rec == 0:
        raise ZeroNoise("noiseless rectified channel has unbounded rate")

    n = mc.n_samples
    rng = np.random.default_rng(mc.seed)
    g = rng.standard_normal(n)
    x = g * g
    if sigma2_a > 0:
        scale = math.sqrt(0.5 * sigma2_a)
        w = (np.sqrt(hp * x) + scale * rng.standard_normal(n)) ** 2 \
            + (scale * rng.standard_normal(n)) ** 2
    else:
        w = hp * x
    if sigma2_rec > 0:
        y = w + math.sqrt(sigma2_rec) * rng.standard_normal(n)
    else:
        y = w

    llr = np.empty(n)
    for start in range(0, n, _CHUNK):
        sl = slice(start, min(start + _CHUNK, n))
        lc = _log_p_cond(y[sl], x[sl], hp, sigma2_a, sigma2_rec, mc.quad_tol)
        lm = _log_p_marg(y[sl], hp, sigma2_a, sigma2_rec, mc.quad_tol)
        llr[sl] = (lc - lm) * LOG2E

    value = float(np.mean(llr))
    std_error = float(np.std(llr, ddof=1) / math.sqrt(n))
    return MiEstimate(
        value=max(0.0, value),
        std_error=std_error,
        n_samples=n,
        quadrature_tolerance=mc.quad_tol,
        seed=mc.seed,
    )
