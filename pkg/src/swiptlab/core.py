"""Shared domain types and elementary closed-form link quantities.

All powers are in watts; "energy units" are watts with the symbol period
normalized to one, so energy per symbol and average power coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np
from scipy.special import erfc

from .errors import InvalidParams, NonPositivePower, ZeroNoise

LOG2E = math.log2(math.e)


@dataclass(frozen=True)
class LinkParams:
    """Point-to-point link: channel, transmit power, noise and conversion figures.

    h          channel power gain (dimensionless, > 0)
    p          average transmit power [W]
    zeta       RF-to-DC conversion efficiency, in (0, 1]
    sigma2_a   antenna noise power [W]
    sigma2_cov RF-to-baseband conversion noise power [W] (separated receiver)
    sigma2_rec rectifier noise variance [W^2]; the std sigma_rec is a power-like
               quantity in watts because the rectified signal is a power signal
    sigma2_adc ADC quantization noise power [W]
    theta      channel phase shift [rad); irrelevant to all closed forms, kept
               for the waveform simulator
    """

    h: float
    p: float
    zeta: float = 1.0
    sigma2_a: float = 0.0
    sigma2_cov: float = 0.0
    sigma2_rec: float = 0.0
    sigma2_adc: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if not self.h > 0:
            raise InvalidParams(f"channel gain must be > 0, got h={self.h}")
        if self.p < 0:
            raise InvalidParams(f"transmit power must be >= 0, got p={self.p}")
        if not 0 < self.zeta <= 1:
            raise InvalidParams(f"conversion efficiency must lie in (0, 1], got zeta={self.zeta}")
        for name in ("sigma2_a", "sigma2_cov", "sigma2_rec", "sigma2_adc"):
            if getattr(self, name) < 0:
                raise InvalidParams(f"{name} must be >= 0, got {getattr(self, name)}")
        if not 0 <= self.theta < 2 * math.pi:
            raise InvalidParams(f"theta must lie in [0, 2*pi), got {self.theta}")

    @property
    def received_power(self) -> float:
        """Average signal power at the antenna output, h*P [W]."""
        return self.h * self.p

    @property
    def q_max(self) -> float:
        """Maximum harvestable energy per symbol, zeta*h*P [energy units]."""
        return self.zeta * self.h * self.p

    @property
    def sigma_rec(self) -> float:
        """Rectifier noise std [W]."""
        return math.sqrt(self.sigma2_rec)

    def to_json_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class OpsPair:
    """On-off power splitting schedule: harvest-only for a time fraction
    ``alpha``, constant split ``rho`` otherwise.  ``rho = 0`` is time
    switching; ``alpha = 0`` is static power splitting."""

    alpha: float
    rho: float

    def __post_init__(self):
        if not 0 <= self.alpha <= 1:
            raise InvalidParams(f"alpha must lie in [0, 1], got {self.alpha}")
        if not 0 <= self.rho <= 1:
            raise InvalidParams(f"rho must lie in [0, 1], got {self.rho}")

    @property
    def mean_split(self) -> float:
        return self.alpha + (1.0 - self.alpha) * self.rho


@dataclass(frozen=True)
class SplitVector:
    """Per-symbol power split ratios, each in [0, 1]."""

    rho: tuple[float, ...]

    def __post_init__(self):
        rho = tuple(float(r) for r in self.rho)
        if len(rho) == 0:
            raise InvalidParams("split vector must not be empty")
        if any(not 0 <= r <= 1 for r in rho):
            raise InvalidParams("every split ratio must lie in [0, 1]")
        object.__setattr__(self, "rho", rho)

    @property
    def mean_split(self) -> float:
        # fsum keeps the equal-entry case exactly consistent with OpsPair
        return math.fsum(self.rho) / len(self.rho)


PowerSchedule = OpsPair | SplitVector


@dataclass(frozen=True)
class CircuitPower:
    """Information-decoder power draw [W] for the two architectures."""

    p_s: float = 0.0
    p_i: float = 0.0

    def __post_init__(self):
        if self.p_s < 0 or self.p_i < 0:
            raise InvalidParams("circuit powers must be >= 0")


@dataclass(frozen=True)
class REPoint:
    rate: float      # bits per channel use
    energy: float    # energy units per symbol

    def __post_init__(self):
        if self.rate < 0 or self.energy < 0:
            raise InvalidParams(f"rate-energy point must be nonnegative, got {self}")


# slack for float noise in the monotonicity check of swept boundaries
_PARETO_SLACK = 1e-9


@dataclass(frozen=True)
class REBoundary:
    """Sampled boundary of an achievable rate-energy region.

    Points are ordered by nondecreasing energy and carry nonincreasing rate,
    i.e. the upper-right Pareto frontier of the region.
    """

    points: tuple[REPoint, ...]
    scheme: str
    receiver: str

    def __post_init__(self):
        pts = tuple(self.points)
        if len(pts) == 0:
            raise InvalidParams("boundary must contain at least one point")
        for a, b in zip(pts, pts[1:]):
            if b.energy < a.energy - _PARETO_SLACK * max(1.0, a.energy):
                raise InvalidParams("boundary points must be sorted by nondecreasing energy")
            if b.rate > a.rate + _PARETO_SLACK * max(1.0, a.rate):
                raise InvalidParams("boundary rate must be nonincreasing in energy")
        object.__setattr__(self, "points", pts)

    def energies(self) -> np.ndarray:
        return np.array([p.energy for p in self.points])

    def rates(self) -> np.ndarray:
        return np.array([p.rate for p in self.points])

    @property
    def max_energy(self) -> float:
        return self.points[-1].energy

    def rate_at(self, energy) -> np.ndarray:
        """Boundary rate at the given energies by linear interpolation.

        Duplicate energies (vertical boundary segments) resolve to the larger
        rate; energies beyond the boundary's span give rate 0.
        """
        e = self.energies()
        r = self.rates()
        # keep the max rate per energy so np.interp sees strictly useful knots
        uniq_e, idx = np.unique(e, return_index=True)
        uniq_r = np.maximum.reduceat(r, idx) if len(uniq_e) < len(e) else r[idx]
        return np.interp(np.asarray(energy, dtype=float), uniq_e, uniq_r, right=0.0)

    def to_csv_rows(self) -> list[tuple[str, str, float, float]]:
        return [(self.scheme, self.receiver, p.rate, p.energy) for p in self.points]

    def to_json_dict(self, provenance: dict | None = None) -> dict:
        d = {
            "scheme": self.scheme,
            "receiver": self.receiver,
            "points": [{"rate_bits": p.rate, "energy_units": p.energy} for p in self.points],
        }
        if provenance:
            d["provenance"] = dict(provenance)
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "REBoundary":
        pts = tuple(REPoint(p["rate_bits"], p["energy_units"]) for p in d["points"])
        return cls(points=pts, scheme=d["scheme"], receiver=d["receiver"])


def q_function(x):
    """Gaussian tail probability Q(x) = P(N(0,1) > x).

    Accurate to better than 1e-12 relative error for |x| <= 8, with monotone
    tail decay beyond.
    """
    x = np.asarray(x, dtype=float)
    out = 0.5 * erfc(x / math.sqrt(2.0))
    return float(out) if out.ndim == 0 else out


def awgn_rate(lp: LinkParams) -> float:
    """Coherent AWGN rate log2(1 + hP / (sigma2_a + sigma2_cov)) [bits/use]."""
    noise = lp.sigma2_a + lp.sigma2_cov
    if noise <= 0:
        if lp.p > 0:
            raise ZeroNoise("antenna plus conversion noise is zero; rate is unbounded")
        return 0.0
    return math.log2(1.0 + lp.received_power / noise)


def split_snr(rho: float, lp: LinkParams) -> float:
    """Decoder SNR under a power split: (1-rho) hP / ((1-rho) sigma2_a + sigma2_cov)."""
    if not 0 <= rho <= 1:
        raise InvalidParams(f"split ratio must lie in [0, 1], got {rho}")
    if rho == 1.0:
        return 0.0
    noise = (1.0 - rho) * lp.sigma2_a + lp.sigma2_cov
    if noise <= 0:
        if lp.p > 0:
            raise ZeroNoise("split-path noise is zero; SNR is unbounded")
        return 0.0
    return (1.0 - rho) * lp.received_power / noise


def harvested_energy(schedule: PowerSchedule, lp: LinkParams) -> float:
    """Harvested energy per symbol, zeta*h*P times the mean split ratio."""
    if isinstance(schedule, (OpsPair, SplitVector)):
        return lp.q_max * schedule.mean_split
    raise InvalidParams(f"unsupported schedule type: {type(schedule).__name__}")


def upper_bound_region(lp: LinkParams, n_points: int = 512) -> REBoundary:
    """Receiver-architecture-independent outer bound: the box with corner
    (log2(1 + hP/sigma2_a), hP)."""
    if lp.sigma2_a <= 0:
        raise InvalidParams("upper bound requires sigma2_a > 0")
    if n_points < 2:
        raise InvalidParams("need at least 2 boundary points")
    r_max = math.log2(1.0 + lp.received_power / lp.sigma2_a)
    q_max = lp.received_power
    energies = np.linspace(0.0, q_max, n_points - 1)
    pts = tuple(REPoint(r_max, float(e)) for e in energies) + (REPoint(0.0, q_max),)
    return REBoundary(points=pts, scheme="ub", receiver="any")


def dbm_to_watts(dbm: float) -> float:
    """10^((dBm - 30)/10)."""
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    """Inverse of dbm_to_watts; requires a strictly positive power."""
    if watts <= 0:
        raise NonPositivePower(f"cannot express {watts} W in dBm")
    return 10.0 * math.log10(watts) + 30.0
