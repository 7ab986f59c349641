"""Closed-form Klein-Gordon Green kernels and smeared pairings.

Sign convention, used by every module in this package:

    (box + m^2) Delta_R = -delta,   supp Delta_R in the closed forward cone,

so in 1+1 dimensions, inside the cone,

    Delta_R(t, x)  = -(1/2) J0(m sqrt(t^2 - x^2)),         t > |x|,
    Delta(t, x)    = -(1/2) sgn(t) J0(m sqrt(t^2 - x^2)),  |t| > |x|,
    Delta_D        = (Delta_R + Delta_A)/2.

This orientation is the one for which the symplectic form of the wave data
of Delta f1, Delta f2 equals pairing(f1, f2, 'pauli_jordan') with factor
+1, and it matches the mode-sum representation

    Delta(t, x) = -(1/2pi) int dk sin(omega t) cos(k x) / omega.

Quadrature: pairings are double rectangle sums over the product grid, with
the kernel tabulated once on the integer difference grid. Cells that
straddle the lightcone are detected in exact integer arithmetic and their
kernel value is replaced by a subsampled cell average, which restores
second-order convergence across the jump. Nodes exactly on the cone take
the mean of the two one-sided limits. Spacelike-separated supports give an
exact zero because the tabulated kernel itself vanishes there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import j0

from .errors import GridError
from .grids import TestFunction

__all__ = [
    "KERNEL_KINDS",
    "KernelKind",
    "ConeBoundary",
    "kernel_eval",
    "kernel_pointwise",
    "kernel_mode_sum",
    "kernel_table",
    "pairing",
    "pair_radial",
    "pair_massless_3p1",
]

KERNEL_KINDS = ("retarded", "advanced", "pauli_jordan", "dyson_mean")


@dataclass(frozen=True)
class KernelKind:
    """Bundled kernel selector: which Green function, at which mass."""

    kind: str
    m: float
    dimension: str = "1+1"

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise GridError(f"unknown kernel kind {self.kind!r}")
        if self.m < 0:
            raise GridError("mass must be non-negative")
        if self.dimension not in ("1+1", "3+1-radial"):
            raise GridError(f"unknown dimension tag {self.dimension!r}")


class ConeBoundary:
    """Tagged result for pointwise evaluation exactly on the lightcone.

    The kernel jumps there; `inside` and `outside` are the one-sided limits
    and `average` their mean, which is the value the quadrature rule uses.
    """

    def __init__(self, kind: str, t: float, x: float, inside: float):
        self.kind = kind
        self.t = t
        self.x = x
        self.inside = inside
        self.outside = 0.0
        self.average = 0.5 * inside

    def __repr__(self):
        return (f"ConeBoundary(kind={self.kind!r}, t={self.t}, x={self.x}, "
                f"average={self.average})")


def _check_kind(kind: str) -> None:
    if kind not in KERNEL_KINDS:
        raise GridError(f"unknown kernel kind {kind!r}, expected one of {KERNEL_KINDS}")


def _inside_value(kind: str, m: float, T, root):
    """Kernel value strictly inside the cone; root = sqrt(T^2 - X^2)."""
    bes = j0(m * root)
    if kind == "pauli_jordan":
        return -0.5 * np.sign(T) * bes
    if kind == "retarded":
        return np.where(T > 0, -0.5 * bes, 0.0)
    if kind == "advanced":
        return np.where(T < 0, -0.5 * bes, 0.0)
    return -0.25 * bes  # dyson_mean


def _boundary_value(kind: str, T):
    """Mean of one-sided limits on the cone (J0 -> 1 there); 0 at origin."""
    if kind == "pauli_jordan":
        return -0.25 * np.sign(T)
    if kind == "retarded":
        return np.where(T > 0, -0.25, 0.0)
    if kind == "advanced":
        return np.where(T < 0, -0.25, 0.0)
    return -0.125 * np.sign(T) ** 2  # dyson


def kernel_pointwise(kind: str, m: float, T, X):
    """Vectorized kernel values; exact cone points get the boundary mean."""
    T = np.asarray(T, dtype=float)
    X = np.asarray(X, dtype=float)
    s2 = T * T - X * X
    inside = s2 > 0
    root = np.sqrt(np.where(inside, s2, 0.0))
    out = np.where(inside, _inside_value(kind, m, T, root), 0.0)
    return np.where(s2 == 0, _boundary_value(kind, T), out)


def kernel_eval(kind: str | KernelKind, m: float | None = None,
                t: float = 0.0, x: float = 0.0):
    """Pointwise closed-form kernel in 1+1 dimensions.

    Returns a float off the lightcone. Exactly on the cone the value is
    distributionally ambiguous, so a ConeBoundary tag carrying the
    one-sided limits is returned instead of a bare number.
    """
    if isinstance(kind, KernelKind):
        if kind.dimension != "1+1":
            raise GridError("pointwise values exist in 1+1 only; "
                            "use pair_massless_3p1 for 3+1 radial")
        kind, m = kind.kind, kind.m
    _check_kind(kind)
    if m is None or m < 0:
        raise GridError("mass must be given and non-negative")
    s2 = t * t - x * x
    if s2 == 0.0:
        inside = float(np.atleast_1d(_inside_value(kind, m, np.float64(t),
                                                   np.float64(0.0)))[0])
        return ConeBoundary(kind, t, x, inside)
    return float(kernel_pointwise(kind, m, t, x))


def kernel_mode_sum(kind: str, m: float, t: float, x: float,
                    n: int = 8192, a: float = 0.01, mu: float = 0.0,
                    dispersion: str = "continuum") -> float:
    """Independent mode-sum evaluation of the 1+1 kernels on an n-site box.

    Pauli-Jordan:  -(1/(n a)) sum_j sin(omega_j t) cos(k_j x) / omega_j
    over the box momenta k_j; retarded/advanced/dyson follow by the step
    dressings. dispersion='continuum' uses omega = sqrt(m^2 + k^2), the
    Riemann sum of the momentum integral, and converges to the closed
    forms at fixed spacing as the truncation tail 1/(k_max t). The
    'lattice' variant uses the model dispersion with sin(k a / 2); its
    band edge has zero group velocity, so at fixed a it carries a
    wavefront ripple of a few 1e-3 that no amount of modes removes. Use
    it when comparing against lattice dynamics, not against the continuum
    closed forms. Needs m > 0 or a regulator mu > 0 (zero mode).
    """
    _check_kind(kind)
    if m <= 0 and mu <= 0:
        raise GridError("mode sum needs m > 0 or a regulator mu > 0")
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=a)
    if dispersion == "continuum":
        om = np.sqrt(m * m + mu * mu + k * k)
    elif dispersion == "lattice":
        om = np.sqrt(m * m + mu * mu + (4.0 / a**2) * np.sin(k * a / 2.0) ** 2)
    else:
        raise GridError(f"unknown dispersion {dispersion!r}")
    pj = -np.sum(np.sin(om * t) * np.cos(k * x) / om) / (n * a)
    if kind == "pauli_jordan":
        return float(pj)
    if kind == "retarded":
        return float(pj) if t > 0 else 0.0
    if kind == "advanced":
        return float(-pj) if t < 0 else 0.0
    return float(0.5 * np.sign(t) * pj)


def kernel_table(kind: str, m: float, dti: np.ndarray, dui: np.ndarray,
                 ht: float, hx: float, q: int, nsub: int = 32) -> np.ndarray:
    """Kernel on the integer difference grid with cell-averaged cone cells.

    dti, dui are integer node coordinates in units of ht and hx = q*ht. The
    quadrature cell of a node spans half a step each way, so in units of
    ht/2 its corners sit at odd integers and the straddle test is exact:
    over the cell, |T| ranges over [max(0, 2|d|-1), 2|d|+1] and |X| over
    q*[max(0, 2|u|-1), 2|u|+1].
    """
    T = dti[:, None] * ht
    X = dui[None, :] * hx
    K = kernel_pointwise(kind, m, T, X)

    d = np.abs(dti)[:, None]
    u = np.abs(dui)[None, :]
    tmin = np.where(d == 0, 0, 2 * d - 1)
    tmax = 2 * d + 1
    umin = np.where(u == 0, 0, (2 * u - 1) * q)
    umax = (2 * u + 1) * q
    lo = tmin - umax
    hi = tmax - umin
    strad = (lo < 0) & (hi > 0)

    idx = np.argwhere(strad)
    if len(idx):
        off = (np.arange(nsub) + 0.5) / nsub - 0.5
        OT = (off * ht)[:, None]
        OX = (off * hx)[None, :]
        chunk = max(1, 2_000_000 // (nsub * nsub))
        for start in range(0, len(idx), chunk):
            part = idx[start:start + chunk]
            Tc = dti[part[:, 0]] * ht
            Xc = dui[part[:, 1]] * hx
            vals = kernel_pointwise(
                kind, m,
                Tc[:, None, None] + OT[None, :, :],
                Xc[:, None, None] + OX[None, :, :])
            K[part[:, 0], part[:, 1]] = vals.mean(axis=(1, 2))
    return K


def _common_steps(f: TestFunction, g: TestFunction) -> tuple[float, float, int]:
    """Common (ht, hx) and the integer ratio q = hx/ht, or raise."""
    if f.geometry != "plane" or g.geometry != "plane":
        raise GridError("pairing kernels are 1+1 Cartesian; use pair_radial "
                        "or pair_massless_3p1 for radial profiles")
    if not f.grid.compatible(g.grid):
        raise GridError("pairing needs equal grid spacings (common refinement)")
    ht, hx = f.grid.ht, f.grid.hu
    q = int(np.rint(hx / ht))
    if q < 1 or abs(hx / ht - q) > 1e-9:
        raise GridError(
            f"hx/ht = {hx / ht} must be a positive integer so lightcone "
            "cells classify exactly; the bump constructors use ht = hx/2")
    return ht, hx, q


def pairing(f: TestFunction, g: TestFunction, kind: str | KernelKind,
            m: float | None = None, method: str = "fft",
            nsub: int = 32) -> float:
    """Double quadrature  sum_{x1,x2} f(x1) K(x1 - x2) g(x2) (ht hx)^2.

    The quadruple sum collapses through the full cross-correlation of the
    two sample arrays. method='direct' keeps an explicit loop over time
    rows instead (same kernel table, same value up to roundoff; kept as a
    cross-check for small grids). Antisymmetric under swapping f and g for
    kind='pauli_jordan', symmetric for 'dyson_mean'.
    """
    if isinstance(kind, KernelKind):
        kind, m = kind.kind, kind.m
    _check_kind(kind)
    if m is None or m < 0:
        raise GridError("mass must be given and non-negative")
    ht, hx, q = _common_steps(f, g)
    gf, gg = f.grid, g.grid
    dti = (gf.it0 - (gg.it0 + gg.nt - 1)) + np.arange(gf.nt + gg.nt - 1)
    dui = (gf.iu0 - (gg.iu0 + gg.nu - 1)) + np.arange(gf.nu + gg.nu - 1)
    K = kernel_table(kind, m, dti, dui, ht, hx, q, nsub=nsub)
    if not K.any():
        return 0.0
    if method == "fft":
        C = fftconvolve(f.values, g.values[::-1, ::-1], mode="full")
        return float(np.sum(C * K)) * (ht * hx) ** 2
    if method != "direct":
        raise GridError(f"unknown pairing method {method!r}")
    # explicit row loop against the same table; cross-check for small grids
    v1, v2 = f.values, g.values
    ju = np.arange(gf.nu)[:, None] - np.arange(gg.nu)[None, :] + gg.nu - 1
    acc = 0.0
    for i1 in range(gf.nt):
        for i2 in range(gg.nt):
            Krow = K[i1 - i2 + gg.nt - 1]
            acc += float(v1[i1] @ Krow[ju] @ v2[i2])
    return acc * (ht * hx) ** 2


def _radial_checks(f: TestFunction, g: TestFunction) -> tuple[float, float, int]:
    if f.geometry != "radial" or g.geometry != "radial":
        raise GridError("radial pairing requires radial test functions")
    if not f.grid.compatible(g.grid):
        raise GridError("radial pairing needs equal grid spacings")
    if f.grid.iu0 < 1 or g.grid.iu0 < 1:
        raise GridError("radial grids must keep r > 0")
    ht, hr = f.grid.ht, f.grid.hu
    q = int(np.rint(hr / ht))
    if q < 1 or abs(hr / ht - q) > 1e-9:
        raise GridError(
            f"hr/ht = {hr / ht} must be a positive integer so lightcone "
            "nodes classify exactly; the bump constructors use ht = hr/2")
    return ht, hr, q


def _pair_radial_kernel(m: float, f: TestFunction, g: TestFunction) -> float:
    """4pi sum r s f(t1,r) g(t2,s) [D(T,|r-s|) - D(T,r+s)] (ht hr)^2.

    D is the 1+1 Pauli-Jordan kernel; the bracket is the exact angular
    reduction of the 3+1 kernel between radial profiles. T, |r-s| and r+s
    are built from integer node differences times the common step, so a
    node that sits exactly on the cone compares equal bitwise and gets the
    boundary mean deterministically; two separately rounded float paths
    disagree there and break antisymmetry. The same rule is shared by the
    massless and massive paths so their cone-cell quadrature error cancels
    in m -> 0 comparisons.
    """
    ht, hr, q = _radial_checks(f, g)
    gf, gg = f.grid, g.grid
    v1, v2 = f.values, g.values
    r1, r2 = gf.u, gg.u
    nt1, nt2 = gf.nt, gg.nt
    ir1 = gf.iu0 + np.arange(gf.nu)
    ir2 = gg.iu0 + np.arange(gg.nu)
    dti = (gf.it0 - (gg.it0 + gg.nt - 1)) + np.arange(nt1 + nt2 - 1)
    dA = q * np.abs(ir1[:, None] - ir2[None, :])   # units of ht
    dB = q * (ir1[:, None] + ir2[None, :])
    T = (dti * ht)[:, None, None]
    RS = r1[:, None] * r2[None, :]
    K = (kernel_pointwise("pauli_jordan", m, T, (dA * ht)[None])
         - kernel_pointwise("pauli_jordan", m, T, (dB * ht)[None]))
    if not K.any():
        return 0.0
    n = nt1 + nt2 - 1
    F1 = np.fft.rfft(v1, n=n, axis=0)
    F2 = np.fft.rfft(v2[::-1], n=n, axis=0)
    acc = 0.0
    for j1 in range(v1.shape[1]):
        C = np.fft.irfft(F1[:, j1][:, None] * F2, n=n, axis=0)
        acc += np.einsum("k,dk,dk->", RS[j1], K[:, j1, :], C)
    return float(4.0 * np.pi * acc * (ht * hr) ** 2)


def pair_radial(f: TestFunction, g: TestFunction, m: float) -> float:
    """Massive 3+1 pairing of radially symmetric profiles (mode-sum-free).

    Used directly and as the m -> 0 extrapolation oracle for the massless
    operation below.
    """
    if m < 0:
        raise GridError("mass must be non-negative")
    return _pair_radial_kernel(m, f, g)


def pair_massless_3p1(f: TestFunction, g: TestFunction) -> float:
    """Massless 3+1 pairing: the kernel lives exactly on the cone.

    The angular reduction turns the cone-supported kernel into the
    indicator -(1/2) sgn(T) on |r-s| < |T| < r+s, the m = 0 case of the
    massive reduction. Returns exactly 0.0 whenever the cone shadows of
    the two supports are disjoint, because the tabulated kernel vanishes
    on every sample-difference node.
    """
    return _pair_radial_kernel(0.0, f, g)
