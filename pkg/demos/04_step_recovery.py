# A single-step target is fitted exactly.
#
# The first knot is found by a full sweep, so when the jump sits on the grid
# the solver lands on it and explains all of the variance.

from escalier import Interval, SolverConfig, escalier_fit, random_step_function, zoo_lookup

I = Interval(0.0, 2.0)
cfg = SolverConfig(precision=1e-3, max_steps=3)

fit = escalier_fit(zoo_lookup("f4"), I, cfg)
print("unit step:", fit.knots, "r2 =", fit.r2)

hits = 0
for seed in range(20):
    g = random_step_function(seed, 1, I, grid=cfg.precision)
    fit = escalier_fit(g, I, cfg)
    ok = fit.knots == (float(g.knots[0]),) and abs(fit.r2 - 1) < 1e-12
    hits += ok
    print(f"seed {seed:2d}: jump {g.knots[0]:.3f}  found {fit.knots}  r2 {fit.r2:.12f}")
print(f"{hits}/20 exact")

# two jumps are a different story: the second knot comes from the critical
# zone equation, which assumes a continuous target
g = random_step_function(7, 2, I, grid=cfg.precision)
fit = escalier_fit(g, I, cfg)
print("two-jump target", g.knots, "-> knots", fit.knots, "r2", round(fit.r2, 6))
