"""Independent Monte Carlo oracles for the closed-form link quantities.

Symbol-level simulators reproduce both receiver chains sample by sample;
the waveform simulator synthesizes the passband signal, pushes it through a
truncated diode polynomial and an ideal brick-wall low-pass filter, and
recovers the DC component the energy-harvesting model predicts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import LinkParams
from .errors import AliasedCarrier, InvalidParams
from .modulation import _check_constellation

# 95% normal-approximation half-width factor for binomial confidence intervals
_CI_FACTOR = 1.959963984540054


def _binomial_ci(p_hat: float, n: int) -> float:
    if 0.0 < p_hat < 1.0:
        return _CI_FACTOR * math.sqrt(p_hat * (1.0 - p_hat) / n)
    return 3.0 / n  # rule of three when no (or only) errors were observed


@dataclass(frozen=True)
class DiodeModel:
    """Schottky diode small-signal model, i(t) = i_s (exp(gamma*v) - 1).

    Taylor coefficients a_n = i_s * gamma^n / n!; truncation at order 2
    reproduces the square-law harvesting model.  Defaults are the physical
    conventions (1 uA saturation current, 25 mV thermal voltage).
    """

    i_s: float = 1e-6
    gamma: float = 40.0
    truncation_order: int = 2

    def __post_init__(self):
        if self.i_s <= 0 or self.gamma <= 0:
            raise InvalidParams("diode constants must be > 0")
        if self.truncation_order < 2:
            raise InvalidParams("truncation order must be >= 2")

    def coefficient(self, n: int) -> float:
        return self.i_s * self.gamma ** n / math.factorial(n)


@dataclass(frozen=True)
class SimConfig:
    """Trial count, RNG seed and (for waveform mode) sampling parameters.

    carrier_hz / bandwidth_hz must be an integer ratio >= 8 so every symbol
    holds complete carrier cycles (narrowband assumption, exact harmonic
    cancellation in the time average).
    """

    n_symbols: int = 100_000
    seed: int = 0
    oversampling: int = 8          # samples per carrier period
    carrier_hz: float = 16.0
    bandwidth_hz: float = 1.0

    def __post_init__(self):
        if self.n_symbols < 1:
            raise InvalidParams("n_symbols must be >= 1")
        if self.oversampling < 8:
            raise InvalidParams("oversampling must be >= 8")
        ratio = self.carrier_hz / self.bandwidth_hz
        if ratio < 8 or abs(ratio - round(ratio)) > 1e-9:
            raise InvalidParams("carrier/bandwidth must be an integer ratio >= 8")


@dataclass(frozen=True)
class SerResult:
    """Empirical symbol error rate with a 95% confidence half-width."""

    ser_hat: float
    ci_halfwidth: float
    n_symbols: int
    seed: int
    energy_hat: float | None = None

    def to_json_dict(self) -> dict:
        d = {"ser_hat": self.ser_hat, "ci_halfwidth": self.ci_halfwidth,
             "n_symbols": self.n_symbols, "seed": self.seed}
        if self.energy_hat is not None:
            d["energy_hat"] = self.energy_hat
        return d


@dataclass(frozen=True)
class RectifierResult:
    """Time-averaged rectifier DC output (normalized by the square-law
    coefficient) and the post-filter residual power at the carrier harmonics."""

    dc_mean: float
    harmonic_residual: float
    n_symbols: int
    seed: int

    def to_json_dict(self) -> dict:
        return {"dc_mean": self.dc_mean, "harmonic_residual": self.harmonic_residual,
                "n_symbols": self.n_symbols, "seed": self.seed}


def _qam_levels(m: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Per-dimension level grids of a unit-average-energy rectangular QAM."""
    l = m.bit_length() - 1
    n_i = 1 << ((l + 1) // 2)
    n_q = 1 << (l // 2)
    delta = math.sqrt(3.0 / (n_i * n_i + n_q * n_q - 2))
    levels_i = delta * (2.0 * np.arange(n_i) - n_i + 1)
    levels_q = delta * (2.0 * np.arange(n_q) - n_q + 1)
    return levels_i, levels_q, delta


def _detect_levels(values: np.ndarray, n_levels: int, spacing: float) -> np.ndarray:
    idx = np.rint((values / spacing + n_levels - 1) / 2.0)
    return np.clip(idx, 0, n_levels - 1).astype(np.int64)


def simulate_qam_separated(lp: LinkParams, rho: float, m: int, cfg: SimConfig,
                           noise_scale: float = 1.0) -> SerResult:
    """Symbol simulation of the split linear channel with minimum-distance
    QAM detection.

    noise_scale > 1 switches to importance sampling: noise is drawn with the
    inflated std and every error event carries the analytic likelihood ratio,
    for symbol error rates far below 1/n_symbols.
    """
    m = _check_constellation(m)
    if not 0 <= rho < 1:
        raise InvalidParams(f"rho must lie in [0, 1), got {rho}")
    if noise_scale < 1.0:
        raise InvalidParams("noise_scale must be >= 1")
    sigma2_eff = (1.0 - rho) * lp.sigma2_a + lp.sigma2_cov
    if sigma2_eff <= 0:
        raise InvalidParams("split-path noise must be > 0 for detection")

    levels_i, levels_q, delta = _qam_levels(m)
    n = cfg.n_symbols
    rng = np.random.default_rng(cfg.seed)
    ii = rng.integers(0, len(levels_i), size=n)
    qq = rng.integers(0, len(levels_q), size=n)
    sym_i, sym_q = levels_i[ii], levels_q[qq]

    amp = math.sqrt((1.0 - rho) * lp.received_power)
    nstd = math.sqrt(sigma2_eff / 2.0) * noise_scale
    noise_i = nstd * rng.standard_normal(n)
    noise_q = nstd * rng.standard_normal(n)
    rx_i = amp * sym_i + noise_i
    rx_q = amp * sym_q + noise_q

    spacing = amp * delta
    err = (_detect_levels(rx_i, len(levels_i), spacing) != ii) \
        | (_detect_levels(rx_q, len(levels_q), spacing) != qq)

    if noise_scale == 1.0:
        ser = float(np.mean(err))
        ci = _binomial_ci(ser, n)
    else:
        # likelihood ratio of the true vs inflated complex Gaussian noise
        k2 = noise_scale * noise_scale
        mag2 = (noise_i * noise_i + noise_q * noise_q) / (sigma2_eff / 2.0)
        log_w = math.log(k2) - 0.5 * mag2 * (1.0 - 1.0 / k2)
        weighted = np.where(err, np.exp(log_w), 0.0)
        ser = float(np.mean(weighted))
        ci = _CI_FACTOR * float(np.std(weighted, ddof=1)) / math.sqrt(n)

    energy = lp.zeta * rho * lp.received_power * float(np.mean(sym_i ** 2 + sym_q ** 2))
    return SerResult(ser_hat=ser, ci_halfwidth=ci, n_symbols=n, seed=cfg.seed,
                     energy_hat=energy)


def simulate_pem_integrated(lp: LinkParams, m: int, cfg: SimConfig) -> SerResult:
    """Symbol simulation of the rectified channel with equispaced power levels
    and midpoint-threshold detection on y/(hP); both noises active."""
    m = _check_constellation(m)
    if lp.sigma2_rec <= 0 and lp.sigma2_a <= 0:
        raise InvalidParams("at least one noise source must be > 0")
    n = cfg.n_symbols
    rng = np.random.default_rng(cfg.seed)
    idx = rng.integers(0, m, size=n)
    power_levels = 2.0 * np.arange(m) / (m - 1)
    amp = np.sqrt(lp.received_power * power_levels[idx])

    if lp.sigma2_a > 0:
        astd = math.sqrt(lp.sigma2_a / 2.0)
        w = (amp + astd * rng.standard_normal(n)) ** 2 \
            + (astd * rng.standard_normal(n)) ** 2
    else:
        w = amp * amp
    y = w
    if lp.sigma2_rec > 0:
        y = w + lp.sigma_rec * rng.standard_normal(n)

    normalized = y / lp.received_power
    det = np.clip(np.rint(normalized * (m - 1) / 2.0), 0, m - 1).astype(np.int64)
    ser = float(np.mean(det != idx))
    return SerResult(ser_hat=ser, ci_halfwidth=_binomial_ci(ser, n), n_symbols=n,
                     seed=cfg.seed)


def simulate_rectifier_waveform(lp: LinkParams, diode: DiodeModel, cfg: SimConfig,
                                constant_envelope: bool = False) -> RectifierResult:
    """Passband synthesis of the energy receiver front end.

    Builds y(t) for per-symbol baseband samples (unit-mean-power circularly
    symmetric Gaussian, or a constant unit envelope), applies the truncated
    diode polynomial, removes everything above the signal bandwidth with an
    ideal brick-wall filter, and reports the time-averaged DC term divided by
    the square-law coefficient a2.
    """
    min_os = max(8, 2 * diode.truncation_order + 2)
    if cfg.oversampling < min_os:
        raise AliasedCarrier(
            f"oversampling {cfg.oversampling} cannot represent order-"
            f"{diode.truncation_order} harmonics; needs >= {min_os}")

    f = cfg.carrier_hz
    cycles_per_symbol = int(round(f / cfg.bandwidth_hz))
    spp = cycles_per_symbol * cfg.oversampling  # samples per symbol
    n = cfg.n_symbols
    rng = np.random.default_rng(cfg.seed)

    if constant_envelope:
        x = np.ones(n, dtype=complex)
    else:
        x = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2.0)
    if lp.sigma2_a > 0:
        nstd = math.sqrt(lp.sigma2_a / 2.0)
        na = nstd * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    else:
        na = np.zeros(n, dtype=complex)

    # the carrier repeats exactly every symbol (integer cycles), so one symbol
    # of carrier samples suffices; Re{b e^{jwt}} = Re(b) cos - Im(b) sin
    dt = 1.0 / (f * cfg.oversampling)
    phase = 2.0 * math.pi * f * dt * np.arange(spp)
    cos_c, sin_c = np.cos(phase), np.sin(phase)
    envelope = math.sqrt(lp.received_power) * x * np.exp(1j * lp.theta) + na
    y = math.sqrt(2.0) * (np.outer(envelope.real, cos_c) - np.outer(envelope.imag, sin_c))
    y = y.reshape(-1)

    # Horner evaluation of sum_k a_k y^k keeps only one working array
    coeffs = [diode.coefficient(k) for k in range(1, diode.truncation_order + 1)]
    i_t = np.full_like(y, coeffs[-1])
    for c in reversed(coeffs[:-1]):
        i_t *= y
        i_t += c
    i_t *= y

    spectrum = np.fft.rfft(i_t)
    freqs = np.fft.rfftfreq(len(i_t), d=dt)
    filtered_spectrum = np.where(freqs <= cfg.bandwidth_hz, spectrum, 0.0)
    filtered = np.fft.irfft(filtered_spectrum, n=len(i_t))

    a2 = diode.coefficient(2)
    dc_mean = float(np.mean(filtered)) / a2

    # post-filter power left in the carrier-harmonic bands, relative to DC
    residual = 0.0
    for k in (1, 2):
        band = (freqs >= k * (f - cfg.bandwidth_hz)) & (freqs <= k * (f + cfg.bandwidth_hz))
        residual += float(np.sum(np.abs(filtered_spectrum[band]) ** 2))
    dc_power = float(np.abs(filtered_spectrum[0]) ** 2)
    harmonic_residual = residual / dc_power if dc_power > 0 else residual
    return RectifierResult(dc_mean=dc_mean, harmonic_residual=harmonic_residual,
                           n_symbols=n, seed=cfg.seed)
