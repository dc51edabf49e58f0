"""Closed-form analysis of the decoupled linear system (b = c = S = P = 0).

Per mode j the characteristic quartic factors into a vertical and a torsional
quadratic; both are solved exactly. When both oscillators are underdamped and
away from the resonance condition zeta = l^2 mu / 3 with omega_j = 3 gamma_j / l^2,
the forced vertical response has the explicit representation

    w_j(t) = e^(-mu t/2) [c1_j sin(omega_j t/2) + c2_j cos(omega_j t/2)] + static_j
             + e^(-3 zeta t/(2 l^2)) [A_j sin(3 gamma_j t/(2 l^2)) + B_j cos(...)],
    th_j(t) = e^(-3 zeta t/(2 l^2)) [(1/gamma_j)((2 l^2/3) th1_j + zeta th0_j) sin(...)
             + th0_j cos(...)],

with the coefficient formulas transcribed verbatim below. Dimensional
parameters are folded in by the substitutions mu -> mu/M, zeta -> zeta/M,
eta -> eta/M, beta Upsilon -> beta Upsilon/M and j^4 pi^4/L^4 -> (D/M)(j pi/L)^4,
eps -> eps/M, kappa -> kappa/M, which reduce to the identity at M = D = 1.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import ModalState, ModelParams

__all__ = [
    "OverdampedBranch",
    "ResonantCase",
    "ConditioningWarning",
    "LinearSolution",
    "SpectrumReport",
    "characteristic_roots",
    "spectrum_report",
    "closed_form",
    "decay_rate",
    "undamped_torsional_frequency",
]

RESONANCE_RTOL = 1e-10
CONDITIONING_RTOL = 1e-8


class OverdampedBranch(ValueError):
    """The underdamped-oscillator hypotheses of the closed form fail."""


class ResonantCase(ValueError):
    """zeta = l^2 mu / 3 together with omega_j = 3 gamma_j / l^2.

    The particular solution then grows secularly (the printed representation
    does not apply) and no coefficient formulas are available, so the case is
    surfaced instead of solved.
    """


class ConditioningWarning(UserWarning):
    """The particular-solution denominator is nearly singular."""


@dataclass(frozen=True)
class _Normalized:
    """Per-mass normalized coefficients; identical to the raw ones at M = D = 1."""

    mu: float
    zeta: float
    beta_ups: float
    eta: float
    g: float
    ell: float
    L: float
    k4v: np.ndarray  # (D/M)(j pi/L)^4
    k4t: np.ndarray  # (eps/M)(j pi/L)^4 + (kappa/M)(j pi/L)^2


def _normalized(params: ModelParams, n: int) -> _Normalized:
    k = np.arange(1, n + 1) * np.pi / params.L
    m = params.M
    return _Normalized(
        mu=params.mu / m,
        zeta=params.zeta / m,
        beta_ups=params.beta * params.Upsilon / m,
        eta=params.eta / m,
        g=params.g,
        ell=params.ell,
        L=params.L,
        k4v=(params.D / m) * k**4,
        k4t=(params.eps / m) * k**4 + (params.kappa / m) * k**2,
    )


def characteristic_roots(j: int, params: ModelParams) -> np.ndarray:
    """Four roots of mode j's quartic: vertical pair first, torsional pair second."""
    if j < 1:
        raise ValueError(f"mode index must be at least 1, got {j}")
    norm = _normalized(params, j)
    k4v, k4t = norm.k4v[-1], norm.k4t[-1]
    disc_v = np.sqrt(complex(norm.mu**2 - 4.0 * k4v))
    about = norm.ell**2 / 3.0
    disc_t = np.sqrt(complex(norm.zeta**2 - 4.0 * about * k4t))
    return np.array(
        [
            (-norm.mu + disc_v) / 2.0,
            (-norm.mu - disc_v) / 2.0,
            (-norm.zeta + disc_t) / (2.0 * about),
            (-norm.zeta - disc_t) / (2.0 * about),
        ]
    )


@dataclass(frozen=True)
class SpectrumReport:
    """Characteristic roots of the retained modes and their stability class."""

    roots: np.ndarray  # (n_modes, 4) complex
    max_real_part: float
    classification: str  # exponentially_stable | lyapunov_stable | unstable | overdamped_branch


def spectrum_report(params: ModelParams, n_modes: int) -> SpectrumReport:
    roots = np.vstack([characteristic_roots(j, params) for j in range(1, n_modes + 1)])
    max_re = float(roots.real.max())
    tol = 1e-12 * max(1.0, float(np.abs(roots).max()))
    has_real_branch = bool(np.any(np.abs(roots.imag) <= tol))
    if max_re > tol:
        classification = "unstable"
    elif max_re >= -tol:
        classification = "lyapunov_stable"
    elif has_real_branch:
        classification = "overdamped_branch"
    else:
        classification = "exponentially_stable"
    return SpectrumReport(roots=roots, max_real_part=max_re, classification=classification)


def decay_rate(params: ModelParams) -> float:
    """Spectral abscissa magnitude of the slowest (j = 1) mode.

    Equals min(mu/(2M), 3 zeta/(2 M l^2)) when both branches are underdamped;
    returns 0.0 for zero damping (the Lyapunov-stable pure-imaginary case).
    """
    return -float(characteristic_roots(1, params).real.max())


def undamped_torsional_frequency(params: ModelParams, n: int) -> np.ndarray:
    """Undamped torsional frequencies (sqrt(3) j pi/(l L)) sqrt(eps j^2 pi^2/L^2 + kappa) / sqrt(M)."""
    norm = _normalized(params, n)
    return np.sqrt(3.0 * norm.k4t) / norm.ell


@dataclass(frozen=True)
class LinearSolution:
    """Closed-form representation; arrays are indexed by mode (entry 0 is j = 1)."""

    omega_j: np.ndarray
    gamma_j: np.ndarray
    A_j: np.ndarray
    B_j: np.ndarray
    c1_j: np.ndarray
    c2_j: np.ndarray
    static_j: np.ndarray
    n_w: int
    n_t: int
    mu: float  # normalized (per-mass) damping entering the exponents
    zeta: float
    ell: float
    th_sin: np.ndarray  # torsional sine/cosine amplitudes, length n_t
    th_cos: np.ndarray

    def _blocks(self, times: np.ndarray):
        t = np.atleast_1d(np.asarray(times, dtype=float))[None, :]
        sigma = 3.0 * self.zeta / (2.0 * self.ell**2)
        omega_t = 3.0 * self.gamma_j[:, None] / (2.0 * self.ell**2)

        def osc(decay, freq, ps, pc):
            envelope = np.exp(-decay * t)
            s, c = np.sin(freq * t), np.cos(freq * t)
            val = envelope * (ps * s + pc * c)
            d1 = envelope * ((-decay * ps - freq * pc) * s + (freq * ps - decay * pc) * c)
            qs, qc = -decay * ps - freq * pc, freq * ps - decay * pc
            d2 = envelope * ((-decay * qs - freq * qc) * s + (freq * qs - decay * qc) * c)
            return val, d1, d2

        hom, hom1, hom2 = osc(
            0.5 * self.mu, 0.5 * self.omega_j[:, None], self.c1_j[:, None], self.c2_j[:, None]
        )
        par, par1, par2 = osc(sigma, omega_t, self.A_j[:, None], self.B_j[:, None])
        w = hom + par + self.static_j[:, None]
        th, th1, th2 = osc(
            sigma,
            omega_t[: self.n_t],
            self.th_sin[:, None],
            self.th_cos[:, None],
        )
        return w, hom1 + par1, hom2 + par2, th, th1, th2

    def sample(self, times: np.ndarray) -> np.ndarray:
        """Rows [w, wdot, th, thdot] at the given times, Trajectory layout."""
        w, wdot, _, th, thdot, _ = self._blocks(times)
        return np.hstack([w.T, wdot.T, th.T, thdot.T])

    def state_at(self, t: float) -> ModalState:
        row = self.sample(np.array([t]))[0]
        return ModalState.unpack(row, self.n_w, self.n_t, t)


def closed_form(y0: ModalState, params: ModelParams) -> LinearSolution:
    """Exact solution of the linear system from y0 (hypotheses checked)."""
    n_w, n_t = y0.n_w, y0.n_t
    norm = _normalized(params, n_w)
    mu, zeta, ell = norm.mu, norm.zeta, norm.ell
    ell2 = ell * ell

    if not (mu > 0.0 and zeta > 0.0):
        raise OverdampedBranch(
            f"the closed form needs strictly positive damping, got mu={mu:g}, zeta={zeta:g}"
        )
    omega_sq = 4.0 * norm.k4v - mu**2
    gamma_sq = (4.0 * ell2 / 3.0) * norm.k4t - zeta**2
    if omega_sq[0] <= 0.0:
        raise OverdampedBranch(
            f"vertical branch overdamped: mu={mu:g} >= 2 sqrt(k4) = {2*np.sqrt(norm.k4v[0]):g}"
        )
    if gamma_sq[0] <= 0.0:
        raise OverdampedBranch(
            f"torsional branch overdamped: zeta={zeta:g} >= "
            f"{2*ell*np.sqrt(norm.k4t[0]/3):g}"
        )
    omega = np.sqrt(omega_sq)
    gamma = np.sqrt(gamma_sq)

    res_scale = max(zeta, ell2 * mu / 3.0)
    if abs(zeta - ell2 * mu / 3.0) <= RESONANCE_RTOL * res_scale:
        freq_scale = np.maximum(omega, 3.0 * gamma / ell2)
        if np.any(np.abs(omega - 3.0 * gamma / ell2) <= RESONANCE_RTOL * freq_scale):
            raise ResonantCase(
                f"zeta = l^2 mu/3 = {zeta:g} and omega_j = 3 gamma_j / l^2 for a retained "
                "mode; the representation acquires secular growth and is not provided"
            )

    th0 = np.zeros(n_w)
    th1 = np.zeros(n_w)
    th0[:n_t] = y0.th
    th1[:n_t] = y0.thdot
    bu, eta = norm.beta_ups, norm.eta

    # Particular-solution coefficients, Eqs. (A-B), transcribed verbatim.
    p1 = 4.0 * ell2**2 * norm.k4v - 9.0 * gamma_sq - 6.0 * ell2 * zeta * mu + 9.0 * zeta**2
    den = p1**2 + 36.0 * gamma_sq * (ell2 * mu - 3.0 * zeta) ** 2
    lead = (4.0 * ell2**2 * norm.k4v) ** 2
    if np.any(den < CONDITIONING_RTOL * lead):
        worst = int(np.argmin(den / lead))
        warnings.warn(
            f"particular-solution denominator for mode {worst + 1} is "
            f"{den[worst] / lead[worst]:.2e} of its leading term; coefficients are "
            "ill-conditioned near resonance",
            ConditioningWarning,
            stacklevel=2,
        )
    a_num = p1 * (
        9.0 * th0 * (gamma_sq + zeta**2) * bu
        + 6.0 * ell2 * th1 * zeta * bu
        - 2.0 * ell2 * (3.0 * zeta * th0 + 2.0 * ell2 * th1) * eta
    ) + 18.0 * gamma_sq * (3.0 * zeta - ell2 * mu) * (
        (3.0 * zeta * th0 + 2.0 * ell2 * th1) * bu - 3.0 * th0 * zeta * bu + 2.0 * ell2 * th0 * eta
    )
    big_a = (2.0 * ell2 / (3.0 * gamma * den)) * a_num
    b_num = p1 * (
        -(2.0 * ell2 * th1 + 3.0 * zeta * th0) * bu
        + 3.0 * th0 * zeta * bu
        - 2.0 * ell2 * th0 * eta
    ) + (3.0 * zeta - ell2 * mu) * (
        18.0 * th0 * (gamma_sq + zeta**2) * bu
        + 12.0 * ell2 * th1 * zeta * bu
        - 4.0 * ell2 * (3.0 * zeta * th0 + 2.0 * ell2 * th1) * eta
    )
    big_b = (2.0 * ell2 / den) * b_num

    j = np.arange(1, n_w + 1)
    static = norm.g * np.sqrt(2.0 * norm.L) * (1.0 - (-1.0) ** j) / (j * np.pi) / norm.k4v

    # Homogeneous coefficients, Eqs. (c1-c2).
    c2 = y0.w - big_b - static
    c1 = (
        2.0 * y0.wdot * ell2
        + y0.w * mu * ell2
        - 3.0 * big_a * gamma
        + big_b * (3.0 * zeta - mu * ell2)
        - static * mu * ell2
    ) / (omega * ell2)

    return LinearSolution(
        omega_j=omega,
        gamma_j=gamma,
        A_j=big_a,
        B_j=big_b,
        c1_j=c1,
        c2_j=c2,
        static_j=static,
        n_w=n_w,
        n_t=n_t,
        mu=mu,
        zeta=zeta,
        ell=ell,
        th_sin=((2.0 * ell2 / 3.0) * y0.thdot + zeta * y0.th) / gamma[:n_t],
        th_cos=y0.th.copy(),
    )
