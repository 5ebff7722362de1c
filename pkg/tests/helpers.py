"""Shared independent oracles for the test suite.

These deliberately avoid the library's solver paths: the grid oracle works on
the raw (alpha, rho) formulation and the difference oracles use only function
values.
"""

import math

import numpy as np
from scipy.integrate import quad

from swiptlab.core import LinkParams


def gaussian_tail_oracle(x):
    """Independent Q-function reference: direct numerical integration of the
    normal pdf over the tail (reflected for negative arguments)."""
    if x < 0:
        return 1.0 - gaussian_tail_oracle(-x)
    val, _ = quad(lambda t: math.exp(-t * t / 2.0) / math.sqrt(2.0 * math.pi),
                  x, x + 60.0, epsabs=1e-16, epsrel=1e-13, limit=200)
    return val


def p0_grid_oracle(lp: LinkParams, p_s: float, q_target: float,
                   resolution: int = 2000, zooms: int = 2,
                   window: int = 32) -> float:
    """Brute-force boundary rate: feasible-grid max of (1-a)*log2(1+tau(rho))
    at 'resolution' points per axis, re-gridded twice around the incumbent."""
    hp = lp.received_power
    qm = lp.q_max
    a_lo, a_hi = 0.0, 1.0
    r_lo, r_hi = 0.0, 1.0
    best = -np.inf
    for _ in range(zooms + 1):
        al = np.linspace(a_lo, a_hi, resolution)
        rh = np.linspace(r_lo, r_hi, resolution)
        aa = al[:, None]
        rr = rh[None, :]
        net = aa * qm + (1.0 - aa) * rr * qm - (1.0 - aa) * p_s
        tau = (1.0 - rr) * hp / ((1.0 - rr) * lp.sigma2_a + lp.sigma2_cov)
        rate = (1.0 - aa) * np.log2(1.0 + tau)
        rate[net < q_target] = -np.inf
        i, j = np.unravel_index(np.argmax(rate), rate.shape)
        best = max(best, rate[i, j])
        da = window * (a_hi - a_lo) / (resolution - 1)
        dr = window * (r_hi - r_lo) / (resolution - 1)
        a_lo, a_hi = max(0.0, al[i] - da), min(1.0, al[i] + da)
        r_lo, r_hi = max(0.0, rh[j] - dr), min(1.0, rh[j] + dr)
    return float(max(best, 0.0))


def central_diff1(f, s, h):
    return (f(s + h) - f(s - h)) / (2.0 * h)


def central_diff2(f, s, h):
    return (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h)


def random_circuit_instance(rng):
    """Feasible (LinkParams, p_s, q_target) triple with moderate scales."""
    lp = LinkParams(
        h=rng.uniform(0.3, 2.0),
        p=rng.uniform(20.0, 300.0),
        zeta=rng.uniform(0.3, 1.0),
        sigma2_a=rng.uniform(0.05, 3.0),
        sigma2_cov=rng.uniform(1.0, 20.0),
    )
    p_s = rng.uniform(0.05, 0.8) * lp.q_max
    q_target = rng.uniform(0.0, 0.95) * lp.q_max
    return lp, p_s, q_target
