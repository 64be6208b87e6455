# Any vectorised function can be fitted.  Without an antiderivative we build a
# prefix integral once by quadrature; mean values then cost one lookup each.

import numpy as np

from escalier import Interval, SolverConfig, escalier_fit, from_callable, quadrature_mean

I = Interval(0.0, 2.0)
bump = from_callable("bump", lambda x: np.exp(-8 * (x - 0.7) ** 2) + 0.3 * x, I)

print("mean on [0.2, 1.3]:", bump.mean_value(0.2, 1.3))
print("direct quadrature: ", quadrature_mean(bump.eval, 0.2, 1.3))

for n in (1, 2, 3, 4):
    fit = escalier_fit(bump, I, SolverConfig(precision=1e-3, max_steps=n))
    print(f"max_steps={n}: knots {np.round(fit.knots, 3)}  r2 {fit.r2:.6f}")
