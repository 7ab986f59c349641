"""Deterministic command-line harness over the whole stack.

Every command reads one JSON config (sections model / region / wave /
sweep, all optional, validated strictly), writes one or more CSV
artifacts plus a JSON metadata sidecar into --out, and returns a
four-way exit status: 0 all in-scope assertions pass, 1 a numerical
assertion failed, 2 the config violates the schema, 3 an I/O problem.
Nothing is written until the config has validated and the computation
has finished, and each artifact lands atomically, so a failed run never
leaves partial files. --threads is recorded in the sidecar but the
evaluation stays serial: byte-identical reruns are a contract here and
worth more than the speedup at these problem sizes. --seed feeds only
the random-instance generator of weyl-check; the physics commands are
deterministic by construction.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .causal import (Functional, causal_order, normal_form,
                     product_via_relations, weyl_product, wrap_phase)
from .errors import (CausalFieldError, CausalOrderError, ConsistencyError,
                     GridError, ModelError, NonStandard, NotAFactor,
                     RegionExhausted, SchemaError)
from .grids import gaussian_bump
from .ioutil import (atomic_write, load_config, merge_config, render_csv,
                     render_json, resolved_model, validate_config)
from .lattice import (LatticeSpec, build_model, energy_spectrum_check,
                      interval_sites)
from .modular import delta_eigenvalues, make_subspace, tomita
from .propagators import KERNEL_KINDS, kernel_pointwise
from .sweeps import (CONVENTIONS, SweepSpec, WaveSpec, diamond_region,
                     huygens_contrast, run_sweep)

__all__ = ["main", "default_config", "COMMANDS"]

# bundled defaults; a user config overrides key by key
_BASE = {
    "model": {"N": 128, "a": 1.0, "m": 1.0, "mu": 0.0},
    "region": {"l": 20.0, "r": 80.0, "shrink": 1.0},
    "wave": {"center": 50.0, "width": 3.0, "k0": 0.0, "amplitude": 1.0,
             "kind": "standing"},
    "sweep": {"steps": 8, "dt": 1.0},
}

_PER_COMMAND = {
    # region inside the certified depth range: every modular weight of a
    # 12-site interval at m = 1 resolves above the float defect floor, so
    # the monotonicity assertion is meaningful (wider regions flag their
    # steps as clamped and the reading becomes floor-limited)
    "sweep": {"region": {"l": 44.0, "r": 55.0, "shrink": 1.0},
              "wave": {"center": 48.0, "width": 1.5, "k0": 0.0,
                       "amplitude": 1.0, "kind": "standing"},
              "sweep": {"steps": 5, "dt": 1.0}},
    # interval sized for a quick, well-conditioned modular solve
    "modular": {"model": {"N": 64, "a": 1.0, "m": 1.0, "mu": 0.0},
                "region": {"l": 20.0, "r": 35.0, "shrink": 1.0}},
    # grid the relation checks were calibrated on
    "weyl-check": {"model": {"N": 256, "a": 0.25, "m": 0.8, "mu": 0.0}},
    # right-mover that exits the diamond well before the sweep ends
    "huygens": {"wave": {"center": 55.0, "width": 2.5, "k0": 0.0,
                         "amplitude": 1.0, "kind": "right"},
                "sweep": {"steps": 28, "dt": 1.0}},
}


def default_config(command: str) -> dict:
    cfg = {k: dict(v) for k, v in _BASE.items()}
    for section, body in _PER_COMMAND.get(command, {}).items():
        cfg[section].update(body)
    return cfg


def _wave_spec(cfg: dict) -> WaveSpec:
    w = cfg["wave"]
    return WaveSpec(center=w["center"], width=w["width"], k0=w["k0"],
                    amplitude=w["amplitude"], kind=w["kind"])


def _sweep_spec(cfg: dict, model: LatticeSpec) -> SweepSpec:
    return SweepSpec(model=model, region=(cfg["region"]["l"],
                                          cfg["region"]["r"]),
                     wave=_wave_spec(cfg), steps=cfg["sweep"]["steps"],
                     dt=cfg["sweep"]["dt"], shrink=cfg["region"]["shrink"])


def _cmd_propagator(cfg, args):
    """Pointwise kernel table on the configured region and sweep times."""
    model = resolved_model(cfg)
    l, r = cfg["region"]["l"], cfg["region"]["r"]
    if not r > l:
        raise ModelError(f"empty region [{l}, {r}]")
    half = 0.5 * (r - l)
    nx = int(np.floor(2.0 * half / model.a)) + 1
    xs = -half + model.a * np.arange(nx)
    ts = cfg["sweep"]["dt"] * np.arange(cfg["sweep"]["steps"])
    tg, xg = np.meshgrid(ts, xs, indexing="ij")
    cols = [kernel_pointwise(kind, model.m, tg.ravel(), xg.ravel())
            for kind in KERNEL_KINDS]
    rows = [(t, x) + tuple(col[i] for col in cols)
            for i, (t, x) in enumerate(zip(tg.ravel(), xg.ravel()))]
    csv = render_csv("t,x," + ",".join(KERNEL_KINDS), rows)
    results = {"rows": len(rows), "mass": model.m,
               "x_range": [float(xs[0]), float(xs[-1])],
               "t_range": [float(ts[0]), float(ts[-1])]}
    return True, results, [("propagator.csv", csv)]


def _functional_pairs(model, ht, n_ordered, n_spacelike, rng):
    """Random bump-functional pairs with a verified causal relation.

    Draws mirror the calibrated families of the relation checks: ordered
    pairs are separated in time by a tilted surface, spacelike pairs by a
    gap wider than their joint temporal reach. Each draw is verified with
    causal_order and retried, so every returned pair really carries the
    label it claims.
    """
    mid = 0.5 * model.n * model.a
    out = []

    def bump(tc, xc, wt, wx, amp):
        return gaussian_bump(tc, xc, wt, wx, ht=ht, hx=model.a,
                             amplitude=amp)

    def draw_ordered():
        wt1, wx1, wt2, wx2 = rng.uniform(0.4, 0.6, size=4)
        x2 = mid + rng.uniform(-4.0, 4.0)
        x1 = x2 + rng.uniform(-2.0, 2.0)
        t2 = rng.uniform(-0.5, 0.5)
        t1 = t2 + rng.uniform(5.6, 7.0)
        a1, a2 = rng.uniform(0.5, 1.5, size=2)
        return (Functional(rng.uniform(-1, 1), bump(t1, x1, wt1, wx1, a1)),
                Functional(rng.uniform(-1, 1), bump(t2, x2, wt2, wx2, a2)))

    def draw_spacelike():
        wt1, wx1, wt2, wx2 = rng.uniform(0.4, 0.6, size=4)
        x1 = mid - rng.uniform(7.5, 9.0)
        x2 = mid + rng.uniform(7.5, 9.0)
        t1, t2 = rng.uniform(-0.5, 0.5, size=2)
        a1, a2 = rng.uniform(0.5, 1.5, size=2)
        return (Functional(rng.uniform(-1, 1), bump(t1, x1, wt1, wx1, a1)),
                Functional(rng.uniform(-1, 1), bump(t2, x2, wt2, wx2, a2)))

    for label, draw, want, count in (
            ("ordered", draw_ordered, "later", n_ordered),
            ("spacelike", draw_spacelike, "incomparable-spacelike",
             n_spacelike)):
        for _ in range(count):
            for _attempt in range(50):
                F1, F2 = draw()
                if causal_order(F2, F1) == want:
                    out.append((label, F1, F2))
                    break
            else:
                raise ConsistencyError(
                    f"could not draw a {label} pair in 50 attempts")
    return out


def _cmd_weyl_check(cfg, args):
    """Products through the relations against the direct group law."""
    model = build_model(resolved_model(cfg))
    rng = np.random.default_rng(args.seed)
    pairs = _functional_pairs(model, model.a / 2.0, 8, 8, rng)
    rows = []
    max_phase = 0.0
    max_wave = 0.0
    for i, (label, F1, F2) in enumerate(pairs):
        via = product_via_relations(F1, F2, model)
        direct = weyl_product(normal_form(F1, model), normal_form(F2, model))
        dp = abs(wrap_phase(via.phase - direct.phase))
        dw = (via.wave - direct.wave).norm() / max(1.0, direct.wave.norm())
        rows.append((i, label, dp, dw))
        max_phase = max(max_phase, dp)
        max_wave = max(max_wave, dw)
    passed = max_phase < 1e-4 and max_wave < 1e-8
    csv = render_csv("pair,relation,phase_error,wave_error",
                     [(i, lb, dp, dw) for i, lb, dp, dw in rows])
    results = {"pairs": len(pairs), "max_phase_error": max_phase,
               "max_wave_error": max_wave, "passed": passed}
    return passed, results, [("weyl_check.csv", csv)]


def _cmd_modular(cfg, args):
    """Modular spectrum and invariant residuals of the configured region."""
    model = build_model(resolved_model(cfg))
    l, r = cfg["region"]["l"], cfg["region"]["r"]
    lo, hi = diamond_region((l, r), 0.0, 0.0, model.a)
    sites = interval_sites(lo % model.n, hi % model.n, model.n)
    md = tomita(make_subspace(model, sites))
    evs = delta_eigenvalues(md)
    worst = 0.0
    for b in md.blocks:
        ratio = b.s / b.c
        delta = np.array([[1.0, -2j * ratio], [2j * ratio,
                                               1.0 + 4.0 * ratio * ratio]])
        mj = np.array([[b.c, 1j * b.s], [1j * b.s, b.c]])
        dinv = np.array([[1.0 + 4.0 * ratio * ratio, 2j * ratio],
                         [-2j * ratio, 1.0]])
        rel = np.linalg.norm(mj @ delta.conj() @ mj.conj() - dinv) \
            / np.linalg.norm(dinv)
        worst = max(worst, rel)
    passed = bool(worst < 1e-8)
    csv = render_csv("index,delta_eigenvalue",
                     [(i, v) for i, v in enumerate(evs)])
    results = {"sites": int(sites.size), "rank": md.subspace.rank,
               "blocks": len(md.blocks), "centers": len(md.centers),
               "n_clamped": md.n_clamped, "min_defect": md.min_c,
               "max_log_eigenvalue": float(np.log(evs[0])),
               "jdj_inverse_residual": worst, "passed": passed}
    return passed, results, [("modular.csv", csv)]


def _cmd_sweep(cfg, args):
    """Static shrinking-region sweep of the configured wave."""
    res = run_sweep(_sweep_spec(cfg, resolved_model(cfg)))
    info = res.information
    i0 = float(info[0]) if np.isfinite(info[0]) else 0.0
    scale = max(abs(i0), 1.0)
    finite = info[np.isfinite(info)]
    passed = (res.n_failed == 0
              and bool(np.all(finite >= -1e-9 * scale))
              and res.max_rise() <= 1e-7 * scale)
    csv = render_csv("t,region_l,region_r,information,cond_flag", res.rows())
    results = dict(res.metadata())
    results.update({"i0": i0, "max_rise": res.max_rise(), "passed": passed})
    return passed, results, [("sweep.csv", csv)]


def _cmd_huygens(cfg, args):
    """Massless collapse against a massive tail on one geometry.

    The configured model fixes the lattice and the massive twin's mass
    (defaulting to 1 when the config is massless); the massless twin runs
    at m = 0 with the infrared regulator at its documented ceiling.
    """
    base = resolved_model(cfg)
    m_massive = base.m if base.m > 0.0 else 1.0
    massless = LatticeSpec(n=base.n, a=base.a, m=0.0, mu=1e-3 / base.a)
    massive = LatticeSpec(n=base.n, a=base.a, m=m_massive, mu=0.0)
    rep = huygens_contrast(_sweep_spec(cfg, massless),
                           _sweep_spec(cfg, massive), strict=False)
    header = "t,region_l,region_r,information,cond_flag"
    files = [("huygens_massless.csv", render_csv(header, rep.massless.rows())),
             ("huygens_massive.csv", render_csv(header, rep.massive.rows()))]
    results = {"t_exit": rep.t_exit, "i0": rep.i0, "tail_max": rep.tail_max,
               "massive_tail_max": rep.massive_tail_max,
               "tail_bound": rep.tail_bound, "passed": rep.passed,
               "massless": rep.massless.metadata(),
               "massive": rep.massive.metadata()}
    return rep.passed, results, files


def _cmd_spectrum(cfg, args):
    """Dispersion of the configured chain with its positivity check."""
    model = build_model(resolved_model(cfg))
    report = energy_spectrum_check(model)
    csv = render_csv("index,omega",
                     [(i, w) for i, w in enumerate(model.omega)])
    results = dict(report)
    results["passed"] = report["passes"]
    return bool(report["passes"]), results, [("spectrum.csv", csv)]


COMMANDS = {
    "propagator": _cmd_propagator,
    "weyl-check": _cmd_weyl_check,
    "modular": _cmd_modular,
    "sweep": _cmd_sweep,
    "huygens": _cmd_huygens,
    "spectrum": _cmd_spectrum,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causalfield",
        description="Deterministic experiments on the lattice scalar field.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__.splitlines()[0])
        p.add_argument("--config", default=None,
                       help="JSON experiment config; defaults are bundled")
        p.add_argument("--out", default=".",
                       help="output directory for CSV and sidecar")
        p.add_argument("--threads", type=int, default=1,
                       help="recorded in the sidecar; evaluation is serial")
        p.add_argument("--seed", type=int, default=0,
                       help="seeds random instance generators only")
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.threads < 1:
            raise SchemaError(f"--threads must be positive, got {args.threads}")
        if not 0 <= args.seed < 2**64:
            raise SchemaError(f"--seed must fit in u64, got {args.seed}")
        override = load_config(args.config)
        validate_config(override)
        cfg = merge_config(default_config(args.command), override)
    except SchemaError as exc:
        print(f"causalfield: config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"causalfield: cannot read config: {exc}", file=sys.stderr)
        return 3
    try:
        passed, results, files = COMMANDS[args.command](cfg, args)
    except (ModelError, RegionExhausted, SchemaError) as exc:
        # the config parsed but describes an impossible experiment
        print(f"causalfield: config error: {exc}", file=sys.stderr)
        return 2
    except (NonStandard, NotAFactor, ConsistencyError, CausalOrderError,
            GridError, CausalFieldError) as exc:
        print(f"causalfield: {exc}", file=sys.stderr)
        return 1
    sidecar = {
        "command": args.command,
        "config": cfg,
        "conventions": dict(CONVENTIONS),
        "results": results,
        "seed": args.seed,
        "threads": args.threads,
        "version": __version__,
    }
    name = args.command.replace("-", "_")
    try:
        for fname, text in files:
            atomic_write(os.path.join(args.out, fname), text)
        atomic_write(os.path.join(args.out, f"{name}.meta.json"),
                     render_json(sidecar))
    except OSError as exc:
        print(f"causalfield: cannot write artifacts: {exc}", file=sys.stderr)
        return 3
    status = "pass" if passed else "FAIL"
    print(f"causalfield {args.command}: {status}")
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
