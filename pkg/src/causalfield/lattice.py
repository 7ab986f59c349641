"""Periodic lattice scalar field: dispersion, one-particle space, translations.

The spatial lattice has N sites with spacing a and periodic wrap. Dispersion
is the standard nearest-neighbour one,

    omega_k**2 = m**2 + mu**2 + (4/a**2) * sin(k*a/2)**2,

with an infrared regulator mu that is mandatory at m = 0 (the zero mode is
otherwise massless and the vacuum complex structure degenerates).

One-particle vectors are complex N-vectors in the momentum basis. Real wave
data (phi, pi) embeds real-linearly as

    z_k = sqrt(a/2) * (sqrt(omega_k) * phi_hat_k + i * pi_hat_k / sqrt(omega_k))

with phi_hat = fft(phi)/sqrt(N), which makes Im<z1, z2> = sigma(w1, w2)/2
exactly (vdot convention, antilinear first slot), where

    sigma(w1, w2) = a * sum(phi1*pi2 - pi1*phi2).

Translations (t, s) act diagonally as exp(i*(omega*t - k*s*a)). Note the
orientation: the classical Hamiltonian flow by t maps embeddings with the
phase exp(-i*omega*t), i.e. forward transport of wave data is time_evolve
with (-t, s). Both directions are exercised in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ConsistencyError, ModelError

__all__ = [
    "LatticeSpec",
    "LatticeModel",
    "CauchyData",
    "Translation",
    "build_model",
    "symplectic_form",
    "embed",
    "unembed",
    "time_evolve",
    "classical_evolve",
    "in_future_cone",
    "extend_semigroup",
    "ModeUnitary",
    "energy_spectrum_check",
    "interval_sites",
    "gaussian_wave",
]


@dataclass(frozen=True)
class LatticeSpec:
    """Lattice geometry and field parameters. Periodic boundary only."""

    n: int
    a: float
    m: float
    mu: float | None = None  # infrared regulator, required when m == 0

    def validate(self) -> None:
        if int(self.n) != self.n or self.n < 2:
            raise ModelError(f"need at least 2 sites, got n={self.n}")
        if not (self.a > 0):
            raise ModelError(f"spacing must be positive, got a={self.a}")
        if self.m < 0:
            raise ModelError(f"mass must be non-negative, got m={self.m}")
        if self.mu is not None and self.mu < 0:
            raise ModelError(f"regulator must be non-negative, got mu={self.mu}")
        if self.m == 0 and not (self.mu and self.mu > 0):
            raise ModelError("m = 0 requires a positive infrared regulator mu")


class LatticeModel:
    """Immutable dispersion data for a LatticeSpec."""

    def __init__(self, spec: LatticeSpec):
        spec.validate()
        self.spec = spec
        self.n = int(spec.n)
        self.a = float(spec.a)
        self.m = float(spec.m)
        self.mu = float(spec.mu) if spec.mu else 0.0
        self.k = 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.a)
        om2 = self.m**2 + self.mu**2 + (4.0 / self.a**2) * np.sin(self.k * self.a / 2.0) ** 2
        self.omega = np.sqrt(om2)
        self.sqw = np.sqrt(self.omega)
        self.x = self.a * np.arange(self.n)
        # index map k -> -k, used when splitting z into real wave data
        self._neg = (-np.arange(self.n)) % self.n

    def mode_transform(self, v: np.ndarray) -> np.ndarray:
        """Unitary DFT, site basis to momentum basis."""
        return np.fft.fft(v) / np.sqrt(self.n)

    def mode_transform_inv(self, vhat: np.ndarray) -> np.ndarray:
        return np.fft.ifft(vhat) * np.sqrt(self.n)

    def __eq__(self, other) -> bool:
        return isinstance(other, LatticeModel) and self.spec == other.spec

    def __hash__(self):
        return hash(self.spec)

    def __repr__(self):
        return (f"LatticeModel(n={self.n}, a={self.a}, m={self.m}, "
                f"mu={self.mu})")


def build_model(spec: LatticeSpec) -> LatticeModel:
    return LatticeModel(spec)


@dataclass
class CauchyData:
    """Real wave data (field, momentum) on the lattice sites."""

    phi: np.ndarray
    pi: np.ndarray

    def __post_init__(self):
        self.phi = np.asarray(self.phi, dtype=float)
        self.pi = np.asarray(self.pi, dtype=float)
        if self.phi.shape != self.pi.shape or self.phi.ndim != 1:
            raise ModelError("phi and pi must be equal-length 1d arrays")

    @property
    def n(self) -> int:
        return self.phi.shape[0]

    def __add__(self, other: "CauchyData") -> "CauchyData":
        return CauchyData(self.phi + other.phi, self.pi + other.pi)

    def __sub__(self, other: "CauchyData") -> "CauchyData":
        return CauchyData(self.phi - other.phi, self.pi - other.pi)

    def __neg__(self) -> "CauchyData":
        return CauchyData(-self.phi, -self.pi)

    def __mul__(self, c: float) -> "CauchyData":
        return CauchyData(c * self.phi, c * self.pi)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.phi**2 + self.pi**2)))

    @staticmethod
    def zero(n: int) -> "CauchyData":
        return CauchyData(np.zeros(n), np.zeros(n))


class Translation(NamedTuple):
    """Spacetime translation: time t plus integer lattice shift s (length s*a)."""

    t: float
    s: int = 0

    def __add__(self, other):
        return Translation(self.t + other[0], self.s + other[1])

    def __sub__(self, other):
        return Translation(self.t - other[0], self.s - other[1])

    def __neg__(self):
        return Translation(-self.t, -self.s)


def in_future_cone(tau: Translation, a: float, include_lightlike: bool = True) -> bool:
    """Membership in V+, the closed (default) forward cone t >= |s*a|.

    Lightlike boundary translations are included by default; pass
    include_lightlike=False to sample only the open cone.
    """
    edge = abs(tau[1]) * a
    return tau[0] >= edge if include_lightlike else tau[0] > edge


def symplectic_form(w1: CauchyData, w2: CauchyData, a: float) -> float:
    """sigma(w1, w2) = a * sum(phi1*pi2 - pi1*phi2). Antisymmetric, nondegenerate."""
    return float(a * (np.dot(w1.phi, w2.pi) - np.dot(w1.pi, w2.phi)))


def embed(model: LatticeModel, w: CauchyData) -> np.ndarray:
    """Real-linear symplectic embedding of wave data into mode space.

    Im<embed(w1), embed(w2)> = sigma(w1, w2)/2 with np.vdot.
    """
    if w.n != model.n:
        raise ModelError(f"wave has {w.n} sites, model has {model.n}")
    ph = model.mode_transform(w.phi)
    pp = model.mode_transform(w.pi)
    return np.sqrt(model.a / 2.0) * (model.sqw * ph + 1j * pp / model.sqw)


def unembed(model: LatticeModel, z: np.ndarray) -> CauchyData:
    """Inverse of embed on the real-wave image (splits z into phi, pi)."""
    zc = np.conj(z[model._neg])
    ph = (z + zc) / (np.sqrt(2.0 * model.a) * model.sqw)
    pp = model.sqw * (z - zc) / (1j * np.sqrt(2.0 * model.a))
    phi = model.mode_transform_inv(ph)
    pi = model.mode_transform_inv(pp)
    return CauchyData(phi.real, pi.real)


def time_evolve(model: LatticeModel, z: np.ndarray, tau: Translation) -> np.ndarray:
    """Unitary translation: multiply each mode by exp(i*(omega*t - k*s*a)).

    Defined for every tau; the semigroup restriction to V+ lives at the
    region level, not here. The classical Hamiltonian flow corresponds to
    tau = (-t, s), see classical_evolve.
    """
    t, s = tau
    return z * np.exp(1j * (model.omega * t - model.k * (s * model.a)))


def classical_evolve(model: LatticeModel, w: CauchyData, t: float) -> CauchyData:
    """Exact lattice Hamiltonian flow of wave data forward by time t."""
    ph = model.mode_transform(w.phi)
    pp = model.mode_transform(w.pi)
    c, s = np.cos(model.omega * t), np.sin(model.omega * t)
    ph_t = c * ph + (s / model.omega) * pp
    pp_t = -model.omega * s * ph + c * pp
    phi = model.mode_transform_inv(ph_t)
    pi = model.mode_transform_inv(pp_t)
    return CauchyData(phi.real, pi.real)


class ModeUnitary:
    """Diagonal unitary in the momentum basis, returned by extend_semigroup."""

    def __init__(self, phases: np.ndarray):
        self.phases = phases

    def __call__(self, z: np.ndarray) -> np.ndarray:
        return self.phases * z

    def matrix(self) -> np.ndarray:
        return np.diag(self.phases)


def extend_semigroup(
    model: LatticeModel,
    x: Translation,
    decompositions: Sequence[tuple[Translation, Translation]],
    tol: float = 1e-10,
) -> ModeUnitary:
    """Extend the V+ semigroup to the full translation x = tau1 - tau2.

    Every supplied decomposition must have both parts in V+ and difference x;
    all of them must produce the same unitary. Disagreement beyond tol is a
    theorem violation and raises ConsistencyError.
    """
    if not decompositions:
        raise ModelError("need at least one decomposition")
    mats = []
    for tau1, tau2 in decompositions:
        tau1, tau2 = Translation(*tau1), Translation(*tau2)
        if not in_future_cone(tau1, model.a) or not in_future_cone(tau2, model.a):
            raise ModelError(f"decomposition ({tau1}, {tau2}) is not in V+ x V+")
        d = tau1 - tau2
        if not (np.isclose(d.t, x[0], rtol=0, atol=1e-12) and d.s == x[1]):
            raise ModelError(f"decomposition ({tau1}, {tau2}) does not reproduce x={x}")
        u1 = np.exp(1j * (model.omega * tau1.t - model.k * (tau1.s * model.a)))
        u2 = np.exp(1j * (model.omega * tau2.t - model.k * (tau2.s * model.a)))
        mats.append(u1 * np.conj(u2))
    for other in mats[1:]:
        err = np.max(np.abs(other - mats[0]))
        if err > tol:
            raise ConsistencyError(
                f"decompositions disagree by {err:.3e} > {tol:.1e}; "
                "this should be impossible and indicates a bug")
    return ModeUnitary(mats[0])


def energy_spectrum_check(model: LatticeModel) -> dict:
    """Report spectrum positivity and the mass gap."""
    omin = float(model.omega.min())
    omax = float(model.omega.max())
    return {
        "omega_min": omin,
        "omega_max": omax,
        "gap": omin,
        "passes": bool(omin >= 0.0),
        "n_modes": model.n,
    }


def interval_sites(l: int, r: int, n: int) -> np.ndarray:
    """Inclusive site interval [l, r] as an index array.

    r < l wraps through the periodic boundary: [6, 1] on 8 sites is
    (6, 7, 0, 1).
    """
    if not (0 <= l < n and 0 <= r < n):
        raise ModelError(f"interval [{l}, {r}] outside 0..{n - 1}")
    if r < l:
        r += n
    return np.arange(l, r + 1) % n


def gaussian_wave(
    model: LatticeModel,
    center: float,
    width: float,
    k0: float = 0.0,
    amplitude: float = 1.0,
    kind: str = "standing",
) -> CauchyData:
    """Gaussian bump wave data, physical units for center/width/k0.

    kind 'standing' leaves pi = 0; kind 'right' fills pi so that the packet
    is purely right-moving under the lattice dispersion (pi_hat =
    -i*sign(k)*omega*phi_hat, which transports the packet rightward under
    the classical flow).
    """
    dx = model.x - center
    phi = amplitude * np.exp(-(dx**2) / (2.0 * width**2)) * np.cos(k0 * dx)
    if kind == "standing":
        return CauchyData(phi, np.zeros_like(phi))
    if kind != "right":
        raise ModelError(f"unknown wave kind {kind!r}")
    ph = model.mode_transform(phi)
    sgn = np.sign(model.k)
    pp = -1j * sgn * model.omega * ph
    pi = model.mode_transform_inv(pp).real
    return CauchyData(phi, pi)
