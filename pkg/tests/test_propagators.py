import numpy as np
import pytest

from causalfield.errors import GridError
from causalfield.grids import gaussian_bump, radial_bump
from causalfield.propagators import (ConeBoundary, KernelKind, kernel_eval,
                                     kernel_mode_sum, pair_massless_3p1,
                                     pair_radial, pairing)

from oracles import bessel_j0_integral, spectral_pairing_1p1


def test_kernel_eval_closed_forms():
    m = 1.0
    # inside the cone: -(1/2) J0(m sqrt(t^2-x^2)), J0 from an independent
    # integral representation
    for t, x in [(2.0, 0.5), (2.0, 0.0), (-2.0, 0.5), (3.0, -1.0)]:
        root = np.sqrt(t * t - x * x)
        want = -0.5 * np.sign(t) * bessel_j0_integral(m * root)
        assert kernel_eval("pauli_jordan", m, t, x) == pytest.approx(want, abs=1e-12)
    # spacelike: exactly zero
    for kind in ("retarded", "advanced", "pauli_jordan", "dyson_mean"):
        assert kernel_eval(kind, m, 0.5, 2.0) == 0.0
    # retarded vanishes in the past, advanced in the future
    assert kernel_eval("retarded", m, -2.0, 0.5) == 0.0
    assert kernel_eval("advanced", m, 2.0, 0.5) == 0.0
    assert kernel_eval("dyson_mean", m, 2.0, 0.5) == pytest.approx(
        0.5 * kernel_eval("retarded", m, 2.0, 0.5))


def test_kernel_eval_boundary_is_tagged():
    b = kernel_eval("pauli_jordan", 1.0, 2.0, 2.0)
    assert isinstance(b, ConeBoundary)
    assert b.inside == pytest.approx(-0.5)
    assert b.outside == 0.0
    assert b.average == pytest.approx(-0.25)
    assert isinstance(kernel_eval("retarded", 0.7, -1.0, 1.0), ConeBoundary)


def test_kernel_eval_validation():
    with pytest.raises(GridError):
        kernel_eval("feynman", 1.0, 1.0, 0.0)
    with pytest.raises(GridError):
        kernel_eval("retarded", -1.0, 1.0, 0.0)
    with pytest.raises(GridError):
        KernelKind("retarded", -1.0)
    k = KernelKind("pauli_jordan", 1.0)
    assert kernel_eval(k, t=2.0, x=0.5) == kernel_eval("pauli_jordan", 1.0, 2.0, 0.5)


def test_mode_sum_matches_closed_form():
    # box-mode Riemann sum of the spectral integral, pinned resolution
    m = 1.0
    for kind, t, x in [("pauli_jordan", 2.0, 0.0), ("pauli_jordan", 2.0, 0.5),
                       ("retarded", 2.0, 0.0), ("advanced", -2.0, 0.0),
                       ("dyson_mean", 2.0, 0.0)]:
        closed = float(kernel_eval(kind, m, t, x))
        mode = kernel_mode_sum(kind, m, t, x, n=8192, a=0.01)
        assert abs(closed - mode) < 1e-3
    # the model-dispersion variant keeps a band-edge ripple at fixed spacing
    lat = kernel_mode_sum("pauli_jordan", m, 2.0, 0.0, n=8192, a=0.01,
                          dispersion="lattice")
    assert abs(float(kernel_eval("pauli_jordan", m, 2.0, 0.0)) - lat) < 2e-2


def test_mode_sum_needs_mass_or_regulator():
    with pytest.raises(GridError):
        kernel_mode_sum("pauli_jordan", 0.0, 1.0, 0.0)
    kernel_mode_sum("pauli_jordan", 0.0, 1.0, 0.0, mu=1e-3)


def test_pairing_antisymmetry_and_kind_relations():
    m = 0.8
    f = gaussian_bump(0.0, 2.0, 0.4, 0.5, 0.05, 0.1)
    g = gaussian_bump(1.5, 2.3, 0.5, 0.4, 0.05, 0.1)
    pj = pairing(f, g, "pauli_jordan", m)
    assert pairing(g, f, "pauli_jordan", m) == pytest.approx(-pj, abs=1e-12)
    ret = pairing(f, g, "retarded", m)
    adv = pairing(f, g, "advanced", m)
    dys = pairing(f, g, "dyson_mean", m)
    # kernel identities survive the shared quadrature exactly
    assert pj == pytest.approx(ret - adv, abs=1e-12 * (1 + abs(pj)))
    assert dys == pytest.approx(0.5 * (ret + adv), abs=1e-12 * (1 + abs(dys)))
    assert pairing(f, g, "dyson_mean", m) == pytest.approx(
        pairing(g, f, "dyson_mean", m), abs=1e-12)


def test_pairing_spacelike_supports_exact_zero():
    m = 0.8
    f = gaussian_bump(0.0, 2.0, 0.4, 0.5, 0.05, 0.1)
    far = gaussian_bump(0.0, 30.0, 0.4, 0.5, 0.05, 0.1)
    for kind in ("retarded", "advanced", "pauli_jordan", "dyson_mean"):
        assert pairing(f, far, kind, m) == 0.0


def test_pairing_matches_spectral_oracle():
    # fixed causally ordered pair; oracle works on the spectral side
    m = 0.7
    p1 = (1.1, 5.0, 0.9, 1.0)
    p2 = (-1.1, 8.5, 1.0, 1.1)
    hx = 0.025
    f1 = gaussian_bump(*p1, ht=hx / 2, hx=hx)
    f2 = gaussian_bump(*p2, ht=hx / 2, hx=hx)
    truth = spectral_pairing_1p1(p1, p2, m)
    got = pairing(f1, f2, "pauli_jordan", m)
    assert abs(got - truth) < 1e-4 * abs(truth)

    # quadrature error decreases under refinement
    coarse = pairing(gaussian_bump(*p1, ht=0.05, hx=0.1),
                     gaussian_bump(*p2, ht=0.05, hx=0.1), "pauli_jordan", m)
    mid = pairing(gaussian_bump(*p1, ht=0.025, hx=0.05),
                  gaussian_bump(*p2, ht=0.025, hx=0.05), "pauli_jordan", m)
    assert abs(mid - truth) < abs(coarse - truth)


def test_pairing_direct_agrees_with_fft():
    m = 0.7
    f1 = gaussian_bump(1.1, 5.0, 0.9, 1.0, 0.1, 0.2)
    f2 = gaussian_bump(-1.1, 8.5, 1.0, 1.1, 0.1, 0.2)
    a = pairing(f1, f2, "pauli_jordan", m)
    b = pairing(f1, f2, "pauli_jordan", m, method="direct")
    assert abs(a - b) < 1e-12 * (1 + abs(a))


def test_pairing_validation():
    f = gaussian_bump(0.0, 2.0, 0.4, 0.5, 0.05, 0.1)
    g = gaussian_bump(0.0, 2.0, 0.4, 0.5, 0.05, 0.15)  # different hx
    with pytest.raises(GridError):
        pairing(f, g, "pauli_jordan", 1.0)
    h = gaussian_bump(0.0, 2.0, 0.4, 0.5, 0.07, 0.1)   # hx/ht not integer
    with pytest.raises(GridError):
        pairing(h, h, "pauli_jordan", 1.0)
    r = radial_bump(0.0, 3.0, 0.4, 0.4, 0.05, 0.1)
    with pytest.raises(GridError):
        pairing(r, r, "pauli_jordan", 1.0)
    with pytest.raises(GridError):
        pairing(f, f, "pauli_jordan", None)


def test_radial_massless_vs_massive_extrapolation():
    h = 0.05
    r1 = radial_bump(0.9, 2.0, 0.5, 0.45, h / 2, h)
    r2 = radial_bump(-0.8, 3.2, 0.45, 0.5, h / 2, h)
    p0 = pair_massless_3p1(r1, r2)
    rich = (4.0 * pair_radial(r1, r2, 0.05) - pair_radial(r1, r2, 0.1)) / 3.0
    assert abs(rich - p0) < 1e-3 * abs(p0)


def test_radial_disjoint_cone_shadows_exact_zero():
    h = 0.05
    r1 = radial_bump(0.9, 2.0, 0.5, 0.45, h / 2, h)
    r3 = radial_bump(0.3, 14.0, 0.3, 0.3, h / 2, h)
    assert pair_massless_3p1(r1, r3) == 0.0
    assert pair_radial(r1, r3, 0.5) == 0.0


def test_radial_antisymmetry():
    h = 0.05
    r1 = radial_bump(0.9, 2.0, 0.5, 0.45, h / 2, h)
    r2 = radial_bump(-0.8, 3.2, 0.45, 0.5, h / 2, h)
    a = pair_massless_3p1(r1, r2)
    b = pair_massless_3p1(r2, r1)
    assert abs(a + b) < 1e-9 * abs(a)


def test_radial_rejects_plane_and_mixed():
    f = gaussian_bump(0.0, 2.0, 0.4, 0.5, 0.05, 0.1)
    r = radial_bump(0.0, 3.0, 0.4, 0.4, 0.05, 0.1)
    with pytest.raises(GridError):
        pair_massless_3p1(f, f)
    with pytest.raises(GridError):
        pair_radial(r, f, 0.5)
