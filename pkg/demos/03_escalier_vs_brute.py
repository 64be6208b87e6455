# Escalier against exhaustive search on the benchmark functions.
#
# Brute force tries every ascending knot tuple on the grid, so its cost grows
# like C(m, n).  Escalier only sweeps the first knot and follows critical
# zones for the rest.

from escalier import Interval, SolverConfig, brute_force_fit, escalier_fit, zoo_lookup
from escalier.bench import measure_runtime

I = Interval(0.0, 2.0)

# warm up the compiled kernels so they are not timed
brute_force_fit(zoo_lookup("f1"), I, 3, 0.1)
escalier_fit(zoo_lookup("f1"), I, SolverConfig(precision=1e-2))

print(f"{'fn':<4} {'n':>2} {'escalier r2':>12} {'brute r2':>10} {'esc ms':>8} {'brute ms':>9}")
for fid in ("f1", "f3", "f6", "f7"):
    fn = zoo_lookup(fid)
    for n in (2, 3):
        cfg = SolverConfig(precision=1e-3, tolerance=1e-3, max_steps=n)
        out = {}
        t_e = measure_runtime(lambda: out.setdefault("e", escalier_fit(fn, I, cfg)), 1)
        t_b = measure_runtime(lambda: out.setdefault("b", brute_force_fit(fn, I, n, 1e-3)), 1)
        print(f"{fid:<4} {n:>2} {out['e'].r2:>12.6f} {out['b'].r2:>10.6f} {t_e:>8.0f} {t_b:>9.0f}")

# f6 oscillates, so one candidate per zone can miss the best branch; brute
# force does not have that problem but pays for it in runtime.
