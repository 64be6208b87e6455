# Fitting x^2 on [0, 2] with two steps.
#
# With the knots fixed, each step height is just the mean of f over its
# segment.  The interesting part is where to put the knots.

import numpy as np

from escalier import Interval, Partition, SolverConfig, escalier_fit, evaluate_escalier, fit_fixed_knots, zoo_lookup

f1 = zoo_lookup("f1")
I = Interval(0.0, 2.0)

# %% a hand-picked partition first
fit = fit_fixed_knots(f1, Partition(I, (1.0,)))
print("one knot at 1:  heights", np.round(fit.segment_means, 6), " r2", round(fit.r2, 6))

# %% now let the solver choose two knots
fit = escalier_fit(f1, I, SolverConfig(precision=1e-4, tolerance=1e-3, max_steps=2))
print("optimal knots:", fit.knots)
print("r2:           ", round(fit.r2, 6))

# the closed form for the parabola on [0, 2] puts them near 0.99387 and 1.55194
print("distance to closed form:", np.abs(np.array(fit.knots) - (0.99387, 1.55194)).max())

# %% evaluate the step function on a few points
xs = np.linspace(0, 2, 9)
for x, g in zip(xs, evaluate_escalier(fit, xs)):
    print(f"  x={x:.2f}  f={f1(x):.4f}  g={g:.4f}")
