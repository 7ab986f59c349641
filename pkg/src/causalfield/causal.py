"""Affine field functionals and the operations group they generate.

An affine functional F[phi] = c + integral(f phi) is stored as a constant
plus a sampled density. The group of operations S0(F) is presented by three
relations: causal factorization S0(F)S0(G) = S0(F+G) when F is later than
G, centrality of constants S0(c) = exp(ic), and the action-shift relation
S0(F) = S0(F^{phi0} + deltaL(phi0)) for compactly supported phi0. Working
through these relations every element reduces to a phase times a Weyl
operator W labeled by Cauchy data, and the commutation phase that appears
is the commutator-function pairing of the densities: the canonical
commutation relations come out of the ordering structure instead of being
put in.

Normal forms are computed with the lattice model's own Green operators: the
retarded and advanced solutions of (box_h + m^2) u = -f are obtained by
leapfrog time stepping of the model's discrete Laplacian. Using the same
difference operator everywhere makes the defining identities of the group
exact at the sample level (densities in the image of the discrete
Klein-Gordon operator reduce to the identity at roundoff, not at O(h^2)).
A continuum-kernel evaluation of the central phase is available for
cross-checks via dyson='kernel'.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CausalOrderError, ConsistencyError, GridError, ModelError
from .grids import TestFunction, kg_apply, gradient_action, overlap_quadrature
from .lattice import CauchyData, LatticeModel, symplectic_form
from .propagators import pairing

__all__ = [
    "Functional",
    "WeylElement",
    "delta_L",
    "shift_functional",
    "causal_order",
    "normal_form",
    "weyl_product",
    "weyl_inverse",
    "product_via_relations",
    "bogoliubov_map",
    "wrap_phase",
]

ORDER_LATER = "later"
ORDER_EARLIER = "earlier"
ORDER_SPACELIKE = "incomparable-spacelike"
ORDER_OVERLAPPING = "overlapping"


def wrap_phase(theta: float) -> float:
    """Reduce a phase to (-pi, pi]."""
    w = np.remainder(theta + np.pi, 2.0 * np.pi) - np.pi
    return float(np.pi) if w == -np.pi else float(w)


@dataclass
class Functional:
    """F[phi] = constant + integral(density * phi); density None means 0."""

    constant: float = 0.0
    density: TestFunction | None = None

    def __post_init__(self):
        if self.density is not None and self.density.geometry != "plane":
            raise GridError("functionals take 1+1 Cartesian densities")

    @property
    def support(self) -> tuple[float, float, float, float] | None:
        """Support box of the density; None for constant functionals."""
        return None if self.density is None else self.density.support

    def __add__(self, other: "Functional") -> "Functional":
        c = self.constant + other.constant
        if self.density is None:
            return Functional(c, other.density)
        if other.density is None:
            return Functional(c, self.density)
        return Functional(c, self.density + other.density)

    def __neg__(self) -> "Functional":
        d = None if self.density is None else self.density.scaled(-1.0)
        return Functional(-self.constant, d)


@dataclass
class WeylElement:
    """Normal form exp(i phase) W(wave) of a group element.

    The wave is the Cauchy data at t = 0 of the commutator-function
    solution generated by the density; the phase is stored wrapped to
    (-pi, pi] and always compared modulo 2 pi.
    """

    phase: float
    wave: CauchyData
    model: LatticeModel

    def __post_init__(self):
        self.phase = wrap_phase(self.phase)

    def wave_norm(self) -> float:
        return self.wave.norm()

    def is_identity(self, phase_tol: float = 1e-10, wave_tol: float = 1e-10) -> bool:
        return abs(wrap_phase(self.phase)) <= phase_tol and self.wave_norm() <= wave_tol


def delta_L(phi0: TestFunction, m: float) -> Functional:
    """Action increment of the field shift phi -> phi + phi0.

    Quadratic Lagrangian, so the increment is affine in the field: the
    density is -(box + m^2) phi0 and the constant is the action of phi0
    itself. The constant uses forward differences, which telescope exactly
    against the centered second-difference operator; the pair (constant,
    density) therefore satisfies the discrete integration-by-parts
    identity at roundoff, not merely to O(grid^2).
    """
    return Functional(gradient_action(phi0, m), kg_apply(phi0, m).scaled(-1.0))


def shift_functional(F: Functional, phi0: TestFunction) -> Functional:
    """F^{phi0}[phi] = F[phi + phi0]: constant picks up integral(f phi0)."""
    if F.density is None:
        return Functional(F.constant, None)
    return Functional(F.constant + overlap_quadrature(F.density, phi0), F.density)


def _support_box(obj) -> tuple[float, float, float, float] | None:
    if isinstance(obj, Functional):
        return obj.support
    if isinstance(obj, TestFunction):
        if obj.geometry != "plane":
            raise GridError("causal order is defined for plane geometry")
        return obj.support
    raise GridError(f"cannot extract a support from {type(obj).__name__}")


def _separable_above(low, high) -> bool:
    """Is there a surface t = t0 + v x, |v| < 1, with `high` above, `low` below?

    Checked on the corner points of the two boxes: the surface exists iff
    v (x_h - x_l) < t_h - t_l has a common solution v in (-1, 1). Corners
    suffice because the constraints are affine in the box coordinates.
    """
    t0l, t1l, x0l, x1l = low
    t0h, t1h, x0h, x1h = high
    vlo, vhi = -1.0, 1.0
    for tl, xl in ((t0l, x0l), (t0l, x1l), (t1l, x0l), (t1l, x1l)):
        for th, xh in ((t0h, x0h), (t0h, x1h), (t1h, x0h), (t1h, x1h)):
            dt = th - tl
            dx = xh - xl
            if dx == 0:
                if dt <= 0:
                    return False
            elif dx > 0:
                vhi = min(vhi, dt / dx)
            else:
                vlo = max(vlo, dt / dx)
    return vlo < vhi


def _boxes_spacelike(b1, b2) -> bool:
    t0a, t1a, x0a, x1a = b1
    t0b, t1b, x0b, x1b = b2
    if x0b > x1a:
        gap = x0b - x1a
    elif x0a > x1b:
        gap = x0a - x1b
    else:
        return False
    reach = max(abs(t1a - t0b), abs(t1b - t0a))
    return gap > reach


def causal_order(F, G) -> str:
    """Relative position of supp F and supp G.

    'later' means supp G separable above supp F by a flat or uniformly
    tilted surface t = t0 + v x with |v| < 1; 'earlier' is the swap;
    mutually spacelike supports are reported as 'incomparable-spacelike'
    even though tilted surfaces exist both ways; anything else is
    'overlapping'. Constant functionals have empty support and count as
    spacelike to everything.
    """
    bf, bg = _support_box(F), _support_box(G)
    if bf is None or bg is None:
        return ORDER_SPACELIKE
    if _boxes_spacelike(bf, bg):
        return ORDER_SPACELIKE
    if _separable_above(bf, bg):
        return ORDER_LATER
    if _separable_above(bg, bf):
        return ORDER_EARLIER
    return ORDER_OVERLAPPING


def _engine_checks(model: LatticeModel, f: TestFunction) -> int:
    if f.geometry != "plane":
        raise GridError("normal forms take 1+1 Cartesian densities")
    if abs(f.grid.hu - model.a) > 1e-9 * model.a:
        raise GridError(
            f"density grid spacing {f.grid.hu} must equal the lattice "
            f"spacing {model.a}")
    q = int(np.rint(model.a / f.grid.ht))
    if q < 2 or abs(model.a / f.grid.ht - q) > 1e-9:
        raise GridError(
            "time step must divide the lattice spacing with ratio >= 2 "
            "(leapfrog stability)")
    if f.grid.nu > model.n:
        raise GridError(
            f"density spans {f.grid.nu} sites, more than the periodic "
            f"lattice's {model.n}")
    return q


def _green_solutions(model: LatticeModel, f: TestFunction):
    """Retarded and advanced solutions of (box_h + m^2) u = -f on the model.

    Leapfrog in time, the model's periodic second-difference Laplacian in
    space. The window covers the source support and the t = 0 slice with
    two extra steps on each end so Cauchy data can be read off centered.
    Returns (u, i0, dt) with u = (u_ret, u_adv) arrays of shape
    (nsteps, model.n) and i0 the window index of t = 0.
    """
    _engine_checks(model, f)
    dt = f.grid.ht
    g = f.grid
    i_lo = min(0, g.it0) - 2
    i_hi = max(0, g.it0 + g.nt - 1) + 2
    nsteps = i_hi - i_lo + 1
    n = model.n
    src = np.zeros((nsteps, n))
    cols = (g.iu0 + np.arange(g.nu)) % n
    src[g.it0 - i_lo:g.it0 - i_lo + g.nt, cols] = f.values
    m2 = model.m**2 + model.mu**2
    c2 = (dt / model.a) ** 2

    def lap(u):
        return np.roll(u, -1) - 2.0 * u + np.roll(u, 1)

    ur = np.zeros_like(src)
    for i in range(1, nsteps - 1):
        ur[i + 1] = (2.0 * ur[i] - ur[i - 1] + c2 * lap(ur[i])
                     - dt * dt * (m2 * ur[i] + src[i]))
    ua = np.zeros_like(src)
    for i in range(nsteps - 2, 0, -1):
        ua[i - 1] = (2.0 * ua[i] - ua[i + 1] + c2 * lap(ua[i])
                     - dt * dt * (m2 * ua[i] + src[i]))
    return ur, ua, -i_lo, dt


def _dyson_quadratic(model: LatticeModel, f: TestFunction,
                     ur: np.ndarray, ua: np.ndarray, i0: int) -> float:
    """integral f (Delta_D f) evaluated with the engine solutions.

    The retarded and advanced quadratic forms agree by the transpose
    symmetry of the difference operator; both are computed and their
    mismatch beyond roundoff is reported as a broken theorem.
    """
    g = f.grid
    cell = g.ht * g.hu
    rows = slice(g.it0 + i0, g.it0 + i0 + g.nt)
    cols = (g.iu0 + np.arange(g.nu)) % model.n
    qr = float(np.sum(f.values * ur[rows][:, cols])) * cell
    qa = float(np.sum(f.values * ua[rows][:, cols])) * cell
    scale = abs(qr) + abs(qa) + 1e-30
    if abs(qr - qa) > 1e-10 * scale:
        raise ConsistencyError(
            f"retarded and advanced quadratic forms differ by "
            f"{abs(qr - qa):.3e} (scale {scale:.3e}); the difference "
            "operator is symmetric, so this indicates a bug")
    return 0.5 * (qr + qa)


def normal_form(F: Functional, model: LatticeModel,
                dyson: str = "lattice") -> WeylElement:
    """Reduce S0(F) to exp(i theta) W(wave).

    theta = c - (1/2) integral f (Delta_D f); the wave is the Cauchy data
    at t = 0 of the commutator-function solution (retarded minus advanced).
    With dyson='lattice' (default) the Dyson form uses the model's own
    Green operators, making the reduction exact on densities in the image
    of the discrete Klein-Gordon operator. dyson='kernel' evaluates the
    central phase with the closed-form continuum kernel instead; it agrees
    at O(grid^2) and is kept as an independent cross-check.
    """
    if F.density is None:
        return WeylElement(F.constant, CauchyData.zero(model.n), model)
    f = F.density
    ur, ua, i0, dt = _green_solutions(model, f)
    if dyson == "lattice":
        quad = _dyson_quadratic(model, f, ur, ua, i0)
    elif dyson == "kernel":
        m_eff = float(np.hypot(model.m, model.mu))
        quad = pairing(f, f, "dyson_mean", m_eff)
    else:
        raise GridError(f"unknown dyson evaluation {dyson!r}")
    upj = ur - ua
    wave = CauchyData(upj[i0].copy(), (upj[i0 + 1] - upj[i0 - 1]) / (2.0 * dt))
    return WeylElement(F.constant - 0.5 * quad, wave, model)


def weyl_product(w1: WeylElement, w2: WeylElement) -> WeylElement:
    """Group law: phases add and pick up half the symplectic form."""
    if w1.model != w2.model:
        raise ModelError("cannot multiply Weyl elements on different models")
    phase = (w1.phase + w2.phase
             - 0.5 * symplectic_form(w1.wave, w2.wave, w1.model.a))
    return WeylElement(phase, w1.wave + w2.wave, w1.model)


def weyl_inverse(w: WeylElement) -> WeylElement:
    return WeylElement(-w.phase, -w.wave, w.model)


def product_via_relations(F1: Functional, F2: Functional,
                          model: LatticeModel,
                          dyson: str = "lattice") -> WeylElement:
    """S0(F1) S0(F2) computed through the defining relations alone.

    Admissible when F1 is later than F2 or the supports are spacelike;
    then causal factorization collapses the product to S0(F1 + F2), which
    reduces to normal form through the action-shift relation and the
    centrality of constants. No symplectic form of the two factors is ever
    taken: agreement with weyl_product(normal_form(F1), normal_form(F2))
    is the commutation-relations theorem, not an input.
    """
    order = causal_order(F2, F1)
    if order not in (ORDER_LATER, ORDER_SPACELIKE):
        raise CausalOrderError(
            f"S0(F1)S0(F2) has no causal factorization: causal_order(F2, F1) "
            f"= {order!r}, needs 'later' or 'incomparable-spacelike'")
    return normal_form(F1 + F2, model, dyson=dyson)


def bogoliubov_map(G: Functional, F: Functional, model: LatticeModel,
                   dyson: str = "lattice") -> WeylElement:
    """Interacting operation S_G(F) = S0(G)^{-1} S0(F + G) in normal form."""
    return weyl_product(weyl_inverse(normal_form(G, model, dyson=dyson)),
                        normal_form(F + G, model, dyson=dyson))
