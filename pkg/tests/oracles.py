"""Independent reference evaluations used by the tests.

Everything here is built from a different representation than the package
uses: spectral integrals instead of position-space kernels, integral
representations instead of library Bessel calls, brute-force linear algebra
instead of blockwise closed forms. Agreement is then evidence, not
tautology.
"""

import numpy as np
from scipy.integrate import quad, trapezoid
from scipy.linalg import null_space


def bessel_j0_integral(z: float) -> float:
    """J0 via its integral representation (1/pi) int_0^pi cos(z sin th) dth."""
    val, _ = quad(lambda th: np.cos(z * np.sin(th)), 0.0, np.pi, limit=200)
    return val / np.pi


def spectral_gaussian_sc(k, m, tc, xc, wt, wx, amplitude=1.0):
    """Frequency-split transform of a Gaussian bump against sin/cos(omega t).

    S(k) = int dt dx sin(omega_k t) e^{-i k x} f(t, x) and the cosine
    analogue, both in closed form for an untruncated Gaussian centered at
    (tc, xc).
    """
    w = np.sqrt(m * m + k * k)
    damp = (amplitude * 2.0 * np.pi * wt * wx
            * np.exp(-(w * wt) ** 2 / 2.0 - (k * wx) ** 2 / 2.0)
            * np.exp(-1j * k * xc))
    return damp * np.sin(w * tc), damp * np.cos(w * tc)


def spectral_pairing_1p1(p1, p2, m, kmax=40.0, nk=400001):
    """Commutator pairing of two Gaussian bumps from the spectral side.

    p_i = (tc, xc, wt, wx[, amplitude]). Computes
    int dk/(2pi) (-conj(S1) C2 + conj(C1) S2) / omega_k
    by dense trapezoid; with the package kernel orientation this equals
    pairing(f1, f2, 'pauli_jordan', m) up to Gaussian truncation and
    quadrature error of the grids.
    """
    k = np.linspace(-kmax, kmax, nk)
    w = np.sqrt(m * m + k * k)
    s1, c1 = spectral_gaussian_sc(k, m, *p1)
    s2, c2 = spectral_gaussian_sc(k, m, *p2)
    integ = (-np.conj(s1) * c2 + np.conj(c1) * s2) / w
    val = trapezoid(integ, k) / (2.0 * np.pi)
    assert abs(val.imag) < 1e-12 * (abs(val.real) + 1.0)
    return float(val.real)


def _realstack(z):
    return np.concatenate([np.asarray(z).real, np.asarray(z).imag])


def _jmat(d):
    return np.block([[np.zeros((d, d)), -np.eye(d)],
                     [np.eye(d), np.zeros((d, d))]])


def brute_modular_info(gens, phi):
    """Information of phi via dense matrices: -(J phi, P ln(S^T S) phi).

    gens: complex vectors spanning L over the reals; needs L + iL to be
    the whole space and the defects to be moderate, since ln(S^T S) is
    taken through a dense eigendecomposition. No block structure is used
    anywhere, so this is an independent oracle for the closed forms.
    """
    d = len(phi)
    J = _jmat(d)
    B = np.stack([_realstack(g) for g in gens], axis=1)
    M1 = np.concatenate([B, J @ B], axis=1)
    M2 = np.concatenate([B, -J @ B], axis=1)
    S = M2 @ np.linalg.pinv(M1)
    D = S.T @ S
    w, V = np.linalg.eigh(0.5 * (D + D.T))
    lnD = V @ np.diag(np.log(w)) @ V.T
    Lp = null_space(B.T @ J)
    A = np.concatenate([B, Lp], axis=1)
    assert A.shape[0] == A.shape[1], "oracle needs L + L' = H"
    P = B @ np.linalg.inv(A)[:B.shape[1]]
    ph = _realstack(phi)
    return -float((J @ ph) @ (P @ (J @ (lnD @ ph))))
