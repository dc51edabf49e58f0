"""Tacoma Narrows preset, canonical scenarios, and the wind-speed sweep.

The preset carries the published mechanical features of the Tacoma Narrows
Bridge (SI units) and derives the model coefficients from them:

    D = E*I,  eps = E*J,  kappa = G*K,  S = A*E/(2L),
    a = M*g/(2H),  b = Ac*Ec/L0,  c = H.

Four canonical 120 s scenarios excite the 9th vertical mode at 3 m (all other
channels 1e-3 of that) and differ in which effects are switched on:

    free          no damping, no wind, no stretching   (cables only)
    wind          piston forcing beta = 1e-2, U = 30 m/s
    wind_stretch  wind plus the stretching nonlinearity S = A*E/(2L)
    damped        wind_stretch plus structural damping delta = zeta = 0.01

The quoted damping and flow coefficients (delta, zeta, beta) are per-unit-mass
rates with units 1/s: they are the numbers that multiply the velocities once
the vertical equation is divided by M.  ModelParams stores the coefficients of
the unscaled equations (the ones whose inertia terms are M w_tt and
(M l^2/3) th_tt), so the scenario builders multiply each rate by M.  With the
bare values instead, the induced rates beta/M ~ 1e-6 1/s would leave every
scenario indistinguishable from `free` over 120 s; the rate reading reproduces
the documented growth/decay behaviors, and at M = 1 the two readings agree.

The wind sweep classifies the late-to-early envelope ratio of the 2nd
torsional mode, the historically dangerous one:

    r = max|th_2| over [5T/6, T] / max|th_2| over [0, T/6]

with r < decay_below -> "decay", r > growth_above -> "growth", else "neutral".
The thresholds (0.5, 2.0) are classification conventions of this package, not
measured constants, and both are keyword-configurable.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .cable import CableGeometry, make_geometry
from .dynamics import ModalState, ModelParams
from .integrate import IntegrationError, IntegratorConfig, Trajectory, integrate
from .linear import undamped_torsional_frequency
from .spectral import Basis, displayed_to_modal, make_grid

__all__ = [
    "DAMPING_RATE",
    "GRAVITY",
    "TNB_TABLE",
    "WIND_COUPLING_RATE",
    "WIND_SPEED",
    "Scenario",
    "SweepRow",
    "derive_tension_parameter",
    "derive_cable_stiffness",
    "derive_stretching",
    "default_timestep",
    "tnb_preset",
    "figure_scenarios",
    "envelope_ratio",
    "classify_ratio",
    "wind_sweep",
]

GRAVITY = 9.8  # m/s^2, fixed for all dimensional runs

# Published Tacoma Narrows mechanical features (SI base units).
TNB_TABLE: dict[str, float] = {
    "E": 2.1e11,  # deck Young modulus (Pa)
    "Ec": 1.85e11,  # cable Young modulus (Pa)
    "G": 8.1e10,  # shear modulus (Pa)
    "L": 853.44,  # main span (m)
    "ell": 6.0,  # deck half-width (m)
    "f": 70.71,  # cable sag (m)
    "I": 0.154,  # second moment of area (m^4)
    "K": 6.07e-6,  # torsional constant (m^4)
    "J": 5.44,  # warping constant (m^6)
    "A": 1.85,  # deck cross-section area (m^2)
    "Ac": 0.1228,  # cable cross-section area (m^2)
    "M": 7198.0,  # linear mass density (kg/m)
    "H": 4.5413e7,  # horizontal cable tension (N)
    "L0": 868.815,  # cable rest length (m)
}
TNB_N_W = 10
TNB_N_T = 4
# The hanger datum s0 shifts the cable rest shape rigidly; every force and
# energy term depends on the shape only through its slope, so any positive
# value gives identical dynamics.
TNB_S0 = 1.0

SWEEP_BETA_RANGE = (1e-5, 1e-2)
SWEEP_SPEED_LIMIT = 30.0

# Per-unit-mass rates (1/s) used by the canonical scenarios; see the module
# docstring for the scaling convention.
DAMPING_RATE = 0.01
WIND_COUPLING_RATE = 1e-2
WIND_SPEED = 30.0


def derive_tension_parameter(M: float, g: float, H: float) -> float:
    """Cable tension parameter a = M g / (2 H)."""
    return M * g / (2.0 * H)


def derive_cable_stiffness(Ac: float, Ec: float, L0: float) -> float:
    """Cable axial stiffness b = Ac Ec / L0."""
    return Ac * Ec / L0


def derive_stretching(A: float, E: float, L: float) -> float:
    """Stretching strength S = A E / (2 L)."""
    return A * E / (2.0 * L)


def default_timestep(params: ModelParams, basis: Basis) -> float:
    """One two-hundredth of the shortest undamped linear period retained.

    Resolves the stiffest mode: the larger of the highest vertical frequency
    sqrt(D/M) (n_w pi/L)^2 and the highest torsional frequency.
    """
    omega_w = math.sqrt(params.D / params.M) * (basis.n_w * np.pi / params.L) ** 2
    omega_t = float(undamped_torsional_frequency(params, basis.n_t)[-1])
    return 2.0 * np.pi / max(omega_w, omega_t) / 200.0


@dataclass(frozen=True)
class Scenario:
    """A named, fully resolved simulation setup."""

    name: str
    params: ModelParams
    geometry: CableGeometry
    basis: Basis
    initial: ModalState
    integrator: IntegratorConfig
    outputs: tuple[str, ...] = ("w", "wdot", "th", "thdot")

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("scenario name must be nonempty")
        if self.initial.n_w != self.basis.n_w or self.initial.n_t != self.basis.n_t:
            raise ValueError(
                f"initial state retains ({self.initial.n_w}, {self.initial.n_t}) modes "
                f"but the basis declares ({self.basis.n_w}, {self.basis.n_t})"
            )
        known = {"w", "wdot", "th", "thdot"}
        bad = [ch for ch in self.outputs if ch not in known]
        if bad:
            raise ValueError(f"unknown output channels {bad}; choose from {sorted(known)}")

    def run(self) -> Trajectory:
        return integrate(self.initial, self.params, self.geometry, self.basis, self.integrator)


def tnb_preset() -> tuple[ModelParams, CableGeometry, Basis]:
    """Tacoma Narrows parameters, cable geometry, and 10+4 mode basis."""
    t = TNB_TABLE
    params = ModelParams(
        M=t["M"],
        D=t["E"] * t["I"],
        eps=t["E"] * t["J"],
        kappa=t["G"] * t["K"],
        ell=t["ell"],
        S=derive_stretching(t["A"], t["E"], t["L"]),
        g=GRAVITY,
        L=t["L"],
    )
    basis = Basis(L=t["L"], n_w=TNB_N_W, n_t=TNB_N_T)
    grid = make_grid(basis)
    geometry = make_geometry(
        a=derive_tension_parameter(t["M"], GRAVITY, t["H"]),
        s0=TNB_S0,
        b=derive_cable_stiffness(t["Ac"], t["Ec"], t["L0"]),
        c=t["H"],
        basis=basis,
        grid=grid,
    )
    return params, geometry, basis


def _excited_ninth_mode(basis: Basis) -> ModalState:
    """Displayed amplitudes: 9th vertical mode 3 m, every other channel 1e-3 of it."""
    main = 3.0
    small = 1e-3 * main
    w = np.full(basis.n_w, small)
    w[8] = main
    wdot = np.full(basis.n_w, small)
    th = np.full(basis.n_t, small)
    thdot = np.full(basis.n_t, small)
    return ModalState(
        displayed_to_modal(w, basis.L),
        displayed_to_modal(wdot, basis.L),
        displayed_to_modal(th, basis.L),
        displayed_to_modal(thdot, basis.L),
    )


def figure_scenarios() -> dict[str, Scenario]:
    """The four canonical 120 s Tacoma Narrows scenarios, keyed by name.

    The damping/flow rates DAMPING_RATE and WIND_COUPLING_RATE are multiplied
    by M here because ModelParams carries the unscaled coefficients (module
    docstring has the full convention).
    """
    base_params, geometry, basis = tnb_preset()
    M = base_params.M
    free = replace(base_params, S=0.0, Upsilon=base_params.ell)
    wind = replace(free, beta=WIND_COUPLING_RATE * M, Ustream=WIND_SPEED)
    wind_stretch = replace(wind, S=base_params.S)
    damped = replace(wind_stretch, delta=DAMPING_RATE * M, zeta=DAMPING_RATE * M)
    initial = _excited_ninth_mode(basis)
    variants = {
        "free": free,
        "wind": wind,
        "wind_stretch": wind_stretch,
        "damped": damped,
    }
    scenarios = {}
    for name, params in variants.items():
        dt = default_timestep(params, basis)
        integrator = IntegratorConfig(
            method="rk4", dt=dt, t_end=120.0, sample_every=10.0 * dt
        )
        scenarios[name] = Scenario(
            name=name,
            params=params,
            geometry=geometry,
            basis=basis,
            initial=initial,
            integrator=integrator,
        )
    return scenarios


def envelope_ratio(traj: Trajectory, mode: int = 2) -> float:
    """Late-to-early ratio of max|th_mode| over [5T/6, T] vs [0, T/6]."""
    if not 1 <= mode <= traj.n_t:
        raise ValueError(f"torsional mode {mode} not retained (n_t = {traj.n_t})")
    series = np.abs(traj.th[:, mode - 1])
    t0, t1 = float(traj.times[0]), float(traj.times[-1])
    span = t1 - t0
    early = series[traj.times <= t0 + span / 6.0]
    late = series[traj.times >= t1 - span / 6.0]
    head, tail = float(early.max()), float(late.max())
    if head == 0.0:
        return 1.0 if tail == 0.0 else math.inf
    return tail / head


def classify_ratio(ratio: float, decay_below: float = 0.5, growth_above: float = 2.0) -> str:
    if ratio < decay_below:
        return "decay"
    if ratio > growth_above:
        return "growth"
    return "neutral"


@dataclass(frozen=True)
class SweepRow:
    """One classified cell of a (beta, U) sweep."""

    beta: float
    U: float
    ratio: float
    classification: str
    note: str = ""


def _run_cell(args: tuple[Scenario, float, float, int, float, float]) -> SweepRow:
    scenario, beta, speed, mode, decay_below, growth_above = args
    try:
        ratio = envelope_ratio(scenario.run(), mode)
    except IntegrationError as exc:
        return SweepRow(
            beta=beta,
            U=speed,
            ratio=math.nan,
            classification="failed",
            note=str(exc),
        )
    return SweepRow(
        beta=beta,
        U=speed,
        ratio=ratio,
        classification=classify_ratio(ratio, decay_below, growth_above),
    )


def _dedup(values, label: str) -> list[float]:
    out = list(dict.fromkeys(float(v) for v in values))
    dropped = len(list(values)) - len(out)
    if dropped:
        warnings.warn(f"dropped {dropped} duplicate {label} grid value(s)", stacklevel=3)
    return out


def wind_sweep(
    beta_grid,
    U_grid,
    base: Scenario,
    *,
    mode: int = 2,
    decay_below: float = 0.5,
    growth_above: float = 2.0,
    workers: int | None = None,
) -> list[SweepRow]:
    """Classify the torsional end behavior on a (beta, U) grid.

    Grid betas are per-unit-mass rates (1/s, the module-docstring convention)
    and are multiplied by base.params.M when each cell's coefficients are
    built; rows report the grid values. Rows come back grid-major (beta
    outer, U inner) regardless of worker count; failed cells are marked and
    do not abort the sweep. beta = 0 is a meaningful unforced baseline and
    does not warn; values off the studied ranges beta in [1e-5, 1e-2],
    |U| <= 30 do.
    """
    betas = _dedup(list(beta_grid), "beta")
    speeds = _dedup(list(U_grid), "U")
    if not betas or not speeds:
        raise ValueError("sweep grids must be nonempty")
    lo, hi = SWEEP_BETA_RANGE
    for beta in betas:
        if beta != 0.0 and not lo <= beta <= hi:
            warnings.warn(f"beta = {beta:g} is outside the studied range [{lo:g}, {hi:g}]")
    for speed in speeds:
        if abs(speed) > SWEEP_SPEED_LIMIT:
            warnings.warn(
                f"|U| = {abs(speed):g} exceeds the studied limit {SWEEP_SPEED_LIMIT:g} m/s"
            )
    cells = []
    for beta in betas:
        for speed in speeds:
            params = replace(base.params, beta=beta * base.params.M, Ustream=speed)
            scenario = replace(
                base, name=f"{base.name}/beta={beta:g}/U={speed:g}", params=params
            )
            cells.append((scenario, beta, speed, mode, decay_below, growth_above))
    if workers is None:
        workers = min(len(cells), os.cpu_count() or 1)
    if workers > 1:
        try:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(_run_cell, cells))
        except (OSError, PermissionError) as exc:  # no subprocess support: run serial
            warnings.warn(f"parallel sweep unavailable ({exc}); running serially")
    return [_run_cell(cell) for cell in cells]
