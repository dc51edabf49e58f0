"""Orthonormal sine basis on (0, L) and composite Gauss-Legendre quadrature.

Mode j has shape e_j(x) = sqrt(2/L) sin(j pi x / L), so the modal coefficient
c_j and the displayed (plotted) amplitude c-bar_j = sqrt(2/L) c_j are distinct
quantities; ``displayed_to_modal``/``modal_to_displayed`` convert between them.
The quadrature is composite Gauss-Legendre rather than a mode-count-matched
rule because the cable nonlinearity integrates square roots of trigonometric
polynomials; panel count scales with the retained mode count so smooth
non-polynomial integrands keep uniform accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Basis",
    "QuadratureGrid",
    "make_grid",
    "eval_modal",
    "project",
    "displayed_to_modal",
    "modal_to_displayed",
]

POINTS_PER_PANEL = 5
MIN_PANELS = 64
PANELS_PER_MODE = 8


@dataclass(frozen=True)
class Basis:
    """Hinged sine basis: n_w vertical and n_t torsional modes on (0, L)."""

    L: float
    n_w: int
    n_t: int

    def __post_init__(self) -> None:
        if not self.L > 0.0:
            raise ValueError(f"span must be positive, got L={self.L}")
        if self.n_w < 1:
            raise ValueError(f"need at least one vertical mode, got n_w={self.n_w}")
        if self.n_t < 1:
            raise ValueError(f"need at least one torsional mode, got n_t={self.n_t}")

    @property
    def max_modes(self) -> int:
        return max(self.n_w, self.n_t)

    def wavenumbers(self, n: int | None = None) -> np.ndarray:
        """k_j = j pi / L for j = 1..n (default: all retained modes)."""
        if n is None:
            n = self.max_modes
        return np.arange(1, n + 1) * (np.pi / self.L)


@dataclass(frozen=True)
class QuadratureGrid:
    """Composite Gauss-Legendre abscissae/weights on (0, L).

    The mode-shape tables (values and first two derivatives of every retained
    mode at every node) are computed once here; they are static geometry, not
    state, so caching them does not interact with the per-call recomputation
    of the state-dependent cable projections.
    """

    nodes: np.ndarray
    weights: np.ndarray
    panels: int
    modes: np.ndarray = field(repr=False)  # (max_modes, n_nodes) e_j(x_i)
    dmodes: np.ndarray = field(repr=False)  # e_j'(x_i)
    d2modes: np.ndarray = field(repr=False)  # e_j''(x_i)

    @property
    def n_nodes(self) -> int:
        return self.nodes.size


def make_grid(basis: Basis) -> QuadratureGrid:
    """Build the quadrature grid for a basis: 5-point panels, >= 8 per mode."""
    panels = max(MIN_PANELS, PANELS_PER_MODE * basis.max_modes)
    ref_x, ref_w = np.polynomial.legendre.leggauss(POINTS_PER_PANEL)
    width = basis.L / panels
    left = np.arange(panels) * width
    # Map the reference rule onto every panel; row-major flatten keeps nodes sorted.
    nodes = (left[:, None] + 0.5 * width * (ref_x[None, :] + 1.0)).ravel()
    weights = np.broadcast_to(0.5 * width * ref_w, (panels, POINTS_PER_PANEL)).ravel().copy()

    k = basis.wavenumbers()[:, None]
    scale = np.sqrt(2.0 / basis.L)
    phase = k * nodes[None, :]
    modes = scale * np.sin(phase)
    dmodes = scale * k * np.cos(phase)
    d2modes = -scale * k**2 * np.sin(phase)
    for arr in (nodes, weights, modes, dmodes, d2modes):
        arr.setflags(write=False)
    return QuadratureGrid(nodes, weights, panels, modes, dmodes, d2modes)


def eval_modal(
    coeffs: np.ndarray, basis: Basis, grid: QuadratureGrid, deriv_order: int = 0
) -> np.ndarray:
    """Evaluate sum_j coeffs_j (d/dx)^deriv e_j at every grid node."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.ndim != 1 or coeffs.size > basis.max_modes:
        raise ValueError(
            f"coefficient vector of length {coeffs.size} does not fit a basis "
            f"with {basis.max_modes} retained modes"
        )
    if deriv_order == 0:
        table = grid.modes
    elif deriv_order == 1:
        table = grid.dmodes
    elif deriv_order == 2:
        table = grid.d2modes
    else:
        raise ValueError(f"derivative order must be 0, 1 or 2, got {deriv_order}")
    return coeffs @ table[: coeffs.size]


def project(values: np.ndarray, basis: Basis, grid: QuadratureGrid, n: int) -> np.ndarray:
    """Return the L2 projections (values, e_j)_0 for j = 1..n via quadrature."""
    values = np.asarray(values, dtype=float)
    if values.shape != grid.nodes.shape:
        raise ValueError(
            f"expected {grid.n_nodes} nodal values, got shape {values.shape}"
        )
    if not 1 <= n <= basis.max_modes:
        raise ValueError(f"mode count {n} exceeds the {basis.max_modes} retained modes")
    return grid.modes[:n] @ (grid.weights * values)


def displayed_to_modal(amplitude: float | np.ndarray, L: float):
    """Convert a displayed amplitude c-bar_j to the modal coefficient c_j."""
    return np.sqrt(L / 2.0) * amplitude


def modal_to_displayed(coeff: float | np.ndarray, L: float):
    """Convert a modal coefficient c_j to the displayed amplitude c-bar_j."""
    return np.sqrt(2.0 / L) * coeff
