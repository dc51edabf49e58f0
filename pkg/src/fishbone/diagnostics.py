"""Energy channels, identity residual, Lyapunov function, lemma checks.

Energy channels carry the dimensional M and D factors (kinetic_w = M||w_t||^2/2,
bending = D||w||_2^2/2, ...), so the energy identity

    d/dt Efull = -mu ||w_t||^2 - zeta ||th_t||^2 - beta Upsilon (th_t, w_t) - eta (th, w_t)

closes at any scale; at M = D = 1 the channels are the familiar nondimensional
ones. Sobolev norms are modal sums (||w||_1^2 = sum (j pi/L)^2 w_j^2, etc.);
inner products across the two channels run over the common mode prefix
min(n_w, n_t), consistent with the zero-padding in the dynamics module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import cable as _cable
from .cable import CableGeometry
from .dynamics import ModalState, ModelParams, g_load_projection
from .integrate import Trajectory
from .spectral import Basis, QuadratureGrid

__all__ = [
    "EnergyBreakdown",
    "LyapunovParams",
    "energies",
    "attach_energies",
    "energy_identity_residual",
    "lyapunov_value",
    "sandwich_constants",
    "absorbing_params",
    "lemma_suite",
    "format_report",
    "difference_energy",
    "random_states",
]

SLACK_RTOL = 1e-9  # floating-point forgiveness when testing inequalities


@dataclass(frozen=True)
class EnergyBreakdown:
    kinetic_w: float
    bending: float
    kinetic_th: float
    warping: float
    torsion: float
    stretch: float
    prestress: float
    load: float
    cable: float

    @property
    def E(self) -> float:
        return self.kinetic_w + self.bending + self.kinetic_th + self.warping + self.torsion

    @property
    def Eplus(self) -> float:
        return self.E + self.stretch + self.cable

    @property
    def Efull(self) -> float:
        return self.Eplus + self.prestress + self.load


def _padded_hanger_lines(state: ModalState, ell: float) -> tuple[np.ndarray, np.ndarray]:
    n = max(state.n_w, state.n_t)
    w = np.zeros(n)
    th = np.zeros(n)
    w[: state.n_w] = state.w
    th[: state.n_t] = state.th
    return w + ell * th, w - ell * th


def energies(
    state: ModalState,
    params: ModelParams,
    geometry: CableGeometry,
    basis: Basis,
    grid: QuadratureGrid,
) -> EnergyBreakdown:
    """All energy channels of a state, by modal sums plus cable quadrature."""
    k2w = basis.wavenumbers(state.n_w) ** 2
    k2t = basis.wavenumbers(state.n_t) ** 2
    h1w = float(k2w @ (state.w * state.w))  # ||w||_1^2
    h2w = float(k2w**2 @ (state.w * state.w))  # ||w||_2^2
    h1t = float(k2t @ (state.th * state.th))
    h2t = float(k2t**2 @ (state.th * state.th))
    if geometry.b == 0.0 and geometry.c == 0.0:
        cable = 0.0
    else:
        u_plus, u_minus = _padded_hanger_lines(state, params.ell)
        cable = _cable.pi_energy(u_plus, geometry, grid) + _cable.pi_energy(
            u_minus, geometry, grid
        )
    return EnergyBreakdown(
        kinetic_w=0.5 * params.M * float(state.wdot @ state.wdot),
        bending=0.5 * params.D * h2w,
        kinetic_th=params.M * params.ell**2 * float(state.thdot @ state.thdot) / 6.0,
        warping=0.5 * params.eps * h2t,
        torsion=0.5 * params.kappa * h1t,
        stretch=0.25 * params.S * h1w**2,
        prestress=-0.5 * params.P * h1w,
        load=-float(g_load_projection(params, state.n_w) @ state.w),
        cable=cable,
    )


def attach_energies(
    traj: Trajectory,
    params: ModelParams,
    geometry: CableGeometry,
    basis: Basis,
    grid: QuadratureGrid,
) -> Trajectory:
    """Fill traj.diagnostics with E/Eplus/Efull series and the identity residual."""
    breakdowns = [
        energies(traj.state(i), params, geometry, basis, grid) for i in range(len(traj))
    ]
    traj.diagnostics["E"] = np.array([b.E for b in breakdowns])
    traj.diagnostics["Eplus"] = np.array([b.Eplus for b in breakdowns])
    traj.diagnostics["Efull"] = np.array([b.Efull for b in breakdowns])
    if len(traj) >= 3:
        traj.diagnostics["residual"] = energy_identity_residual(
            traj, params, geometry, basis, grid
        )
    return traj


def _cumtrapz(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    out = np.zeros_like(values)
    out[1:] = np.cumsum(0.5 * np.diff(times) * (values[1:] + values[:-1]))
    return out


def energy_identity_residual(
    traj: Trajectory,
    params: ModelParams,
    geometry: CableGeometry,
    basis: Basis,
    grid: QuadratureGrid,
) -> np.ndarray:
    """Relative residual series of the energy identity along a trajectory.

    R(t) = Efull(t) - Efull(0) + mu int ||w_t||^2 + zeta int ||th_t||^2
           + beta Upsilon int (th_t, w_t) + eta int (th, w_t),
    time integrals by composite trapezoid on the samples; the returned series
    is R(t) / max(|Efull(0)|, 1).
    """
    if len(traj) < 3:
        raise ValueError(f"need at least 3 samples for the residual, got {len(traj)}")
    if "Efull" in traj.diagnostics and len(traj.diagnostics["Efull"]) == len(traj):
        efull = traj.diagnostics["Efull"]
    else:
        efull = np.array(
            [energies(traj.state(i), params, geometry, basis, grid).Efull for i in range(len(traj))]
        )
    nc = min(traj.n_w, traj.n_t)
    wdot, thdot, th = traj.wdot, traj.thdot, traj.th
    diss_w = np.einsum("ij,ij->i", wdot, wdot)
    diss_t = np.einsum("ij,ij->i", thdot, thdot)
    cross = np.einsum("ij,ij->i", thdot[:, :nc], wdot[:, :nc])
    wind = np.einsum("ij,ij->i", th[:, :nc], wdot[:, :nc])
    residual = (
        efull
        - efull[0]
        + params.mu * _cumtrapz(diss_w, traj.times)
        + params.zeta * _cumtrapz(diss_t, traj.times)
        + params.beta * params.Upsilon * _cumtrapz(cross, traj.times)
        + params.eta * _cumtrapz(wind, traj.times)
    )
    return residual / max(abs(float(efull[0])), 1.0)


def lyapunov_value(
    state: ModalState,
    params: ModelParams,
    geometry: CableGeometry,
    basis: Basis,
    grid: QuadratureGrid,
    nu: float,
) -> float:
    """V = Efull + nu (w_t, w) + (nu mu/2)||w||^2 + nu (th_t, th) + (nu zeta/2)||th||^2
    + beta Upsilon (th_t, w) + eta (th, w)."""
    if not nu > 0.0:
        raise ValueError(f"nu must be positive, got {nu}")
    nc = min(state.n_w, state.n_t)
    efull = energies(state, params, geometry, basis, grid).Efull
    return float(
        efull
        + nu * (state.wdot @ state.w)
        + 0.5 * nu * params.mu * (state.w @ state.w)
        + nu * (state.thdot @ state.th)
        + 0.5 * nu * params.zeta * (state.th @ state.th)
        + params.beta * params.Upsilon * (state.thdot[:nc] @ state.w[:nc])
        + params.eta * (state.th[:nc] @ state.w[:nc])
    )


def sandwich_constants(
    params: ModelParams, geometry: CableGeometry, nu: float
) -> tuple[float, float, float]:
    """Constants (c0, c1, c2) with c0 Eplus - c2 <= V <= c1 Eplus + c2.

    Young-inequality bookkeeping of the Lyapunov cross terms against the energy
    channels, valid in the nondimensional normalization (M = D = 1, L = pi)
    where ||.||_0 <= ||.||_1 <= ||.||_2. Each cross term is charged to the
    channels it touches; cmax is the worst per-channel load, and the cable
    floor 2c int xi0^2 plus the prestress/load Young remainders form c2.
    """
    mu, zeta, eta = params.mu, params.zeta, abs(params.eta)
    bu = abs(params.beta * params.Upsilon)
    ell2 = params.ell**2
    coef_kin_w = nu
    coef_bend = nu + nu * mu + bu + eta
    coef_kin_th = 3.0 * (nu + bu) / ell2
    coef_warp = (nu + nu * zeta + eta) / params.eps
    cmax = max(coef_kin_w, coef_bend, coef_kin_th, coef_warp)
    cable_floor = 2.0 * geometry.c * geometry.int_xi0_sq
    remainder = cmax * cable_floor
    px = 0.0
    if params.P > 0.0:
        px = 2.0 * nu
        remainder += params.P**2 / (4.0 * params.S * nu)
    if params.g != 0.0:
        px = 2.0 * nu
        remainder += params.g**2 * params.L / (4.0 * nu)
    return 1.0 - cmax - px, 1.0 + cmax + px, remainder


@dataclass(frozen=True)
class LyapunovParams:
    """Admissible Lyapunov parameters for the absorbing-set construction."""

    nu: float
    nubar: float
    epsbar: float  # admissibility threshold l^2 nubar^2 / (3 beta^2)
    admissible: bool
    reason: str = ""


def absorbing_params(params: ModelParams, nu: float | None = None) -> LyapunovParams:
    """nubar = min{1/2, mu/(mu+1), zeta/(zeta+2), mu, zeta/2} and the eps threshold.

    The returned nu defaults to nubar/2 so 0 < nu < nubar holds strictly;
    epsbar is the supremal threshold (evaluated at nubar), against which the
    model's warping stiffness eps is tested.
    """
    mu, zeta = params.mu, params.zeta
    if mu <= 0.0 or zeta <= 0.0:
        return LyapunovParams(
            nu=0.0,
            nubar=0.0,
            epsbar=0.0,
            admissible=False,
            reason=f"zero damping (mu={mu:g}, zeta={zeta:g}) admits no absorbing set",
        )
    nubar = min(0.5, mu / (mu + 1.0), zeta / (zeta + 2.0), mu, 0.5 * zeta)
    if params.beta > 0.0:
        epsbar = params.ell**2 * nubar**2 / (3.0 * params.beta**2)
    else:
        epsbar = math.inf
    if nu is None:
        nu = 0.5 * nubar
    if params.eps >= epsbar:
        return LyapunovParams(
            nu=nu,
            nubar=nubar,
            epsbar=epsbar,
            admissible=False,
            reason=f"warping stiffness eps={params.eps:g} is not below the threshold {epsbar:g}",
        )
    return LyapunovParams(nu=nu, nubar=nubar, epsbar=epsbar, admissible=True)


def random_states(
    rng: np.random.Generator, basis: Basis, radius: float, count: int
) -> np.ndarray:
    """Smooth random modal vectors in the H^2-ball of the given radius.

    Coefficients decay like j^-3 (representative smooth states, not white
    noise), then each vector is rescaled to a uniformly drawn H^2 norm.
    """
    n = basis.max_modes
    j = np.arange(1, n + 1)
    k4 = basis.wavenumbers(n) ** 4
    raw = rng.standard_normal((count, n)) * j**-3.0
    norms = np.sqrt((raw * raw) @ k4)
    targets = radius * rng.uniform(0.0, 1.0, size=count)
    return raw * (targets / np.where(norms > 0.0, norms, 1.0))[:, None]


class _Check:
    """Track violations and the worst slack of one inequality family."""

    def __init__(self) -> None:
        self.violations = 0
        self.worst_slack = math.inf

    def record(self, lhs: float, rhs: float) -> None:
        slack = rhs - lhs
        self.worst_slack = min(self.worst_slack, slack)
        if slack < -SLACK_RTOL * max(1.0, abs(lhs), abs(rhs)):
            self.violations += 1


def lemma_suite(
    samples: int,
    radius: float,
    geometry: CableGeometry,
    basis: Basis,
    grid: QuadratureGrid,
    seed: int = 0,
) -> dict:
    """Randomized verification of the cable/interpolation inequalities.

    Checks, with the proofs' explicit constants (domain length L in place of
    pi away from the unit span):
      arc_lipschitz   |L(v) - L(z)| <= ||v_x - z_x||_L1
      pi_lipschitz    |Pi(v) - Pi(z)| <= (b sqrt(L) (L/pi) R + c max xi0) ||v_x - z_x||_L1
      h_weak          (h(v), v_x) <= -Pi(v) + C_c ||v_x||_L1 + C_c_bar
      h_l2            ||h(v)||^2 <= 2 b^2 L ||v_x||_L1^2 + 2 c^2 int xi0^2
      interpolation   ||v||_1^2 <= ||v||_0 ||v||_2
      spectral        ||v||_0 <= ||v||_1 <= ||v||_2   (only meaningful for L <= pi)
    plus the empirical constant of ||v||_1^2 <= gamma (||v||_2^2 + ||v||_1^4) + C
    at gamma = 0.1 (an existence check; the max required C is reported).
    """
    if samples < 0:
        raise ValueError(f"sample count must be nonnegative, got {samples}")
    rng = np.random.default_rng(seed)
    span = basis.L
    k2 = basis.wavenumbers() ** 2
    # ||u_x||_L1 <= sqrt(L) ||u||_1 <= sqrt(L) (L/pi) ||u||_2: the lowest
    # wavenumber is pi/L, so the embedding constant grows with the span.
    c_pi = (
        geometry.b * math.sqrt(span) * (span / math.pi) * radius
        + geometry.c * geometry.max_xi0
    )
    c_c = geometry.b * (span + geometry.int_abs_sx)
    c_c_bar = geometry.c * geometry.max_xi0 * (span + geometry.int_abs_sx) + geometry.b * geometry.L0**2
    lemma_gamma = 0.1
    include_spectral = span <= np.pi + 1e-12

    names = ["arc_lipschitz", "pi_lipschitz", "h_weak", "h_l2", "interpolation"]
    if include_spectral:
        names.append("spectral")
    checks = {name: _Check() for name in names}
    max_required_c = -math.inf

    if samples > 0:
        vs = random_states(rng, basis, radius, samples)
        zs = random_states(rng, basis, radius, samples)
        for v, z in zip(vs, zs):
            vx = v @ grid.dmodes
            zx = z @ grid.dmodes
            l1_diff = float(grid.weights @ np.abs(vx - zx))
            l1_v = float(grid.weights @ np.abs(vx))
            arc_v = _cable.arc_length(v, geometry, grid)
            arc_z = _cable.arc_length(z, geometry, grid)
            checks["arc_lipschitz"].record(abs(arc_v - arc_z), l1_diff)
            pi_v = _cable.pi_energy(v, geometry, grid)
            checks["pi_lipschitz"].record(
                abs(pi_v - _cable.pi_energy(z, geometry, grid)), c_pi * l1_diff
            )
            h_v = _cable.h_of(v, geometry, grid)
            checks["h_weak"].record(
                float(grid.weights @ (h_v * vx)), -pi_v + c_c * l1_v + c_c_bar
            )
            checks["h_l2"].record(
                float(grid.weights @ (h_v * h_v)),
                2.0 * geometry.b**2 * span * l1_v**2 + 2.0 * geometry.c**2 * geometry.int_xi0_sq,
            )
            n0 = float(v @ v)
            n1 = float(k2 @ (v * v))
            n2 = float(k2**2 @ (v * v))
            checks["interpolation"].record(n1 * n1, n0 * n2)
            if include_spectral:
                checks["spectral"].record(n0, n1)
                checks["spectral"].record(n1, n2)
            max_required_c = max(max_required_c, n1 - lemma_gamma * (n2 + n1 * n1))

    report: dict = {"samples": samples, "radius": radius, "seed": seed}
    for name, check in checks.items():
        report[f"{name}.violations"] = check.violations
        report[f"{name}.worst_slack"] = check.worst_slack
    report["growth_bound.gamma"] = lemma_gamma
    report["growth_bound.max_required_C"] = max_required_c
    report["violations"] = sum(c.violations for c in checks.values())
    return report


def format_report(report: dict) -> str:
    """Serialize a lemma-suite report as 'key: value' lines for CI assertion."""
    return "\n".join(f"{key}: {report[key]}" for key in report)


def difference_energy(
    traj_a: Trajectory, traj_b: Trajectory, params: ModelParams
) -> np.ndarray:
    """E_{W,Theta}(t) for the difference of two trajectories on one time grid."""
    if traj_a.n_w != traj_b.n_w or traj_a.n_t != traj_b.n_t:
        raise ValueError("trajectories retain different mode counts")
    if traj_a.times.shape != traj_b.times.shape or not np.allclose(
        traj_a.times, traj_b.times, rtol=1e-12, atol=1e-12
    ):
        raise ValueError("trajectories are sampled on different time grids")
    k2w = (np.arange(1, traj_a.n_w + 1) * np.pi / params.L) ** 2
    k2t = (np.arange(1, traj_a.n_t + 1) * np.pi / params.L) ** 2
    dw = traj_a.w - traj_b.w
    dwdot = traj_a.wdot - traj_b.wdot
    dth = traj_a.th - traj_b.th
    dthdot = traj_a.thdot - traj_b.thdot
    return (
        0.5 * params.M * np.einsum("ij,ij->i", dwdot, dwdot)
        + 0.5 * params.D * (dw * dw) @ k2w**2
        + params.M * params.ell**2 / 6.0 * np.einsum("ij,ij->i", dthdot, dthdot)
        + 0.5 * params.eps * (dth * dth) @ k2t**2
        + 0.5 * params.kappa * (dth * dth) @ k2t
    )
