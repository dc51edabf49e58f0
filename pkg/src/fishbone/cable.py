"""Cable-hanger nonlinearity: rest shape, elongation, restoring force, energy.

Two parabolic cables at rest height s(x) = -(a/2)x^2 + (aL/2)x + s0 hang the
deck through rigid hangers. A deflection u of the hanger attachment line
changes the cable arc length from L0 = int sqrt(1 + s_x^2) to
L(u) = int Xi(u), Xi(u) = sqrt(1 + (u_x + s_x)^2), and the cable answers with
the nodal force density

    h(u) = [b (L0 - L(u)) - c xi0] (u_x + s_x) / Xi(u),

a global first pass for L(u) followed by a nodal second pass. The vertical and
torsional channels feel the two cables through

    f = h(w + l th) + h(w - l th),   f-bar = l [h(w + l th) - h(w - l th)],

and the stored cable energy is Pi(u) = (b/2)(L(u) - L0)^2 + c int xi0 (Xi - xi0),
whose directional derivative is d/dtau Pi(u + tau phi)|_0 = -(h(u), phi_x)_0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spectral import Basis, QuadratureGrid

__all__ = [
    "CableGeometry",
    "make_geometry",
    "big_xi",
    "arc_length",
    "h_of",
    "pi_energy",
    "f_pair",
    "cable_rhs_projection",
]


@dataclass(frozen=True)
class CableGeometry:
    """Rest geometry plus stiffness of the two cables, cached on one grid.

    The cached L0 is always the quadrature value of int sqrt(1 + s_x^2) on the
    construction grid, so that Xi(0) = xi0 and Pi(0) = 0 hold exactly; a
    tabulated arc length only ever enters the *derivation* of b (see the cli
    module), never the force law itself.
    """

    a: float
    s0: float
    b: float
    c: float
    L: float
    sx: np.ndarray = field(repr=False)  # s_x at grid nodes
    xi0: np.ndarray = field(repr=False)  # sqrt(1 + s_x^2) at grid nodes
    L0: float = 0.0
    int_abs_sx: float = 0.0  # int |s_x|, used by lemma constants
    max_xi0: float = 1.0
    int_xi0_sq: float = 0.0  # int xi0^2, the cable energy floor scale


def make_geometry(
    a: float,
    s0: float,
    b: float,
    c: float,
    basis: Basis,
    grid: QuadratureGrid,
    allow_flat: bool = False,
) -> CableGeometry:
    """Build a CableGeometry on a grid; allow_flat permits the straight cable a=0."""
    if a < 0.0 or (a == 0.0 and not allow_flat):
        raise ValueError(f"tension parameter must be positive, got a={a}")
    if not s0 > 0.0:
        raise ValueError(f"hanger length must be positive, got s0={s0}")
    if b < 0.0 or c < 0.0:
        raise ValueError(f"cable stiffnesses must be nonnegative, got b={b}, c={c}")
    sx = a * (0.5 * basis.L - grid.nodes)
    xi0 = np.sqrt(1.0 + sx * sx)
    sx.setflags(write=False)
    xi0.setflags(write=False)
    return CableGeometry(
        a=a,
        s0=s0,
        b=b,
        c=c,
        L=basis.L,
        sx=sx,
        xi0=xi0,
        L0=float(grid.weights @ xi0),
        int_abs_sx=float(grid.weights @ np.abs(sx)),
        # The rest slope peaks at the span ends, which Gauss nodes exclude, so
        # the supremum is taken in closed form rather than over the nodes.
        max_xi0=float(np.sqrt(1.0 + (0.5 * a * basis.L) ** 2)),
        int_xi0_sq=float(grid.weights @ (xi0 * xi0)),
    )


def big_xi(u_x_nodal: np.ndarray, geometry: CableGeometry) -> np.ndarray:
    """Stretched-element length Xi(u) = sqrt(1 + (u_x + s_x)^2) at the nodes."""
    total = np.asarray(u_x_nodal, dtype=float) + geometry.sx
    return np.sqrt(1.0 + total * total)


def _h_from_slope(
    u_x_nodal: np.ndarray, geometry: CableGeometry, weights: np.ndarray
) -> np.ndarray:
    total = u_x_nodal + geometry.sx
    xi = np.sqrt(1.0 + total * total)
    elongation = float(weights @ xi)
    amplitude = geometry.b * (geometry.L0 - elongation) - geometry.c * geometry.xi0
    return amplitude * total / xi


def _slope(u: np.ndarray, grid: QuadratureGrid) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.size > grid.dmodes.shape[0]:
        raise ValueError(
            f"modal vector of length {u.size} does not fit a grid built for "
            f"{grid.dmodes.shape[0]} modes"
        )
    return u @ grid.dmodes[: u.size]


def arc_length(u: np.ndarray, geometry: CableGeometry, grid: QuadratureGrid) -> float:
    """Deformed cable arc length L(u) = int Xi(u)."""
    return float(grid.weights @ big_xi(_slope(u, grid), geometry))


def h_of(u: np.ndarray, geometry: CableGeometry, grid: QuadratureGrid) -> np.ndarray:
    """Cable force density h(u) at the grid nodes (global pass, then nodal)."""
    return _h_from_slope(_slope(u, grid), geometry, grid.weights)


def pi_energy(u: np.ndarray, geometry: CableGeometry, grid: QuadratureGrid) -> float:
    """Cable energy Pi(u) = (b/2)(L(u) - L0)^2 + c int xi0 (Xi(u) - xi0)."""
    xi = big_xi(_slope(u, grid), geometry)
    elongation = float(grid.weights @ xi)
    stretch_term = 0.5 * geometry.b * (elongation - geometry.L0) ** 2
    tension_term = geometry.c * float(grid.weights @ (geometry.xi0 * (xi - geometry.xi0)))
    return stretch_term + tension_term


def f_pair(
    w: np.ndarray,
    th: np.ndarray,
    ell: float,
    geometry: CableGeometry,
    grid: QuadratureGrid,
) -> tuple[np.ndarray, np.ndarray]:
    """Nodal cable nonlinearities (f, f-bar) from the two hanger lines w +- l th."""
    if geometry.b == 0.0 and geometry.c == 0.0:
        zero = np.zeros(grid.n_nodes)
        return zero, zero.copy()
    wx = _slope(w, grid)
    thx = _slope(th, grid)
    h_plus = _h_from_slope(wx + ell * thx, geometry, grid.weights)
    h_minus = _h_from_slope(wx - ell * thx, geometry, grid.weights)
    return h_plus + h_minus, ell * (h_plus - h_minus)


def cable_rhs_projection(
    w: np.ndarray,
    th: np.ndarray,
    params,
    geometry: CableGeometry,
    grid: QuadratureGrid,
) -> tuple[np.ndarray, np.ndarray]:
    """Project (f, e_j')_0 for j <= n_w and (f-bar, e_j')_0 for j <= n_t."""
    n_w, n_t = len(w), len(th)
    if geometry.b == 0.0 and geometry.c == 0.0:
        return np.zeros(n_w), np.zeros(n_t)
    f, fbar = f_pair(w, th, params.ell, geometry, grid)
    return grid.dmodes[:n_w] @ (grid.weights * f), grid.dmodes[:n_t] @ (grid.weights * fbar)
