import numpy as np
from causalfield.lattice import LatticeSpec
from causalfield.sweeps import SweepSpec, WaveSpec, run_sweep

COARSE = LatticeSpec(n=128, a=1.0, m=0.0, mu=1e-3)
FINE = LatticeSpec(n=256, a=0.5, m=0.0, mu=1e-3)

def series(model, c, w, k0, steps=26):
    spec = SweepSpec(model=model, region=(20.0, 80.0),
                     wave=WaveSpec(center=c, width=w, k0=k0, kind="right"),
                     steps=steps, dt=1.0)
    return run_sweep(spec)

for (c, w, k0) in [(74.0, 2.0, 0.0), (76.0, 2.5, 0.0),
                   (75.0, 2.0, 0.3), (77.0, 3.0, 0.0), (75.0, 2.25, 0.2)]:
    r1 = series(COARSE, c, w, k0)
    r2 = series(FINE, c, w, k0)
    i1, i2 = r1.information, r2.information
    i0 = i1[0]
    gap = np.max(np.abs(i2 - i1)) / i0
    d1 = r1.second_differences()
    d2 = r2.second_differences()
    print(f"c={c} w={w} k0={k0}: i0={i0:.4f} refine_gap={gap:.3e} "
          f"min_d2/i0 coarse={d1.min()/i0:+.3e} fine={d2.min()/i0:+.3e} "
          f"flags={int(r1.n_failed)}/{int(r2.n_failed)}")
