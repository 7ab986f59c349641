import time

import numpy as np

from causalfield.causal import Functional, normal_form
from causalfield.grids import gaussian_bump
from causalfield.lattice import LatticeSpec, build_model, symplectic_form
from causalfield.propagators import pairing

M = 0.7


def draw(rng):
    t1 = rng.uniform(0.7, 1.3)
    t2 = rng.uniform(-1.3, -0.7)
    x1 = rng.uniform(5.0, 9.0)
    x2 = x1 + rng.uniform(-1.2, 1.2)
    wt1, wt2 = rng.uniform(0.35, 0.6, size=2)
    wx1, wx2 = rng.uniform(0.35, 0.6, size=2)
    a1, a2 = rng.uniform(0.5, 1.5, size=2)
    return (t1, x1, wt1, wx1, a1), (t2, x2, wt2, wx2, a2)


def bridge_err(p1, p2, hx, model):
    f1 = gaussian_bump(p1[0], p1[1], p1[2], p1[3], ht=hx / 2, hx=hx,
                       amplitude=p1[4])
    f2 = gaussian_bump(p2[0], p2[1], p2[2], p2[3], ht=hx / 2, hx=hx,
                       amplitude=p2[4])
    w1 = normal_form(Functional(0.0, f1), model)
    w2 = normal_form(Functional(0.0, f2), model)
    sig = symplectic_form(w1.wave, w2.wave, model.a)
    ker = pairing(f1, f2, "pauli_jordan", M)
    return abs(sig - ker) / abs(ker), ker


coarse = build_model(LatticeSpec(n=160, a=0.1, m=M))
fine = build_model(LatticeSpec(n=320, a=0.05, m=M))

rng = np.random.default_rng(101)
t0 = time.time()
rows = []
for k in range(8):
    p1, p2 = draw(rng)
    ec, kerc = bridge_err(p1, p2, 0.1, coarse)
    ef, kerf = bridge_err(p1, p2, 0.05, fine)
    rows.append((ec, ef, kerf))
    print(f"pair {k}: coarse={ec:.3e} fine={ef:.3e} ker={kerf:+.4f} "
          f"ratio={ec/ef if ef > 0 else np.inf:.2f}")
ec = np.array([r[0] for r in rows])
ef = np.array([r[1] for r in rows])
print(f"max coarse={ec.max():.3e} max fine={ef.max():.3e} "
      f"elapsed={time.time() - t0:.2f}s for 8 pairs both levels")
