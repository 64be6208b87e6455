# What the sweep actually looks at.
#
# For a fixed pair (k0, k1) the next knot k2 is critical when the average of
# the two neighbouring segment means equals f(k1).  On a grid the residual
# is never exactly zero, so we look for runs where it drops below a tolerance.

import numpy as np

from escalier import Interval, Partition, SolverConfig, criticality, full_recurrence_residuals, lipschitz_skip, scan_critical_zones, terminal_residual, zoo_lookup
from escalier.critical import criticality_row

f1 = zoo_lookup("f1")
k0, k1 = 0.0, 0.9938

k2 = np.linspace(1.0, 1.99, 12)
print("criticality along k2:")
for x, c in zip(k2, criticality_row(f1, k0, k1, k2)):
    print(f"  k2={x:.3f}  c={c:.5f}")

# %% zones on the fine grid
cfg = SolverConfig(precision=1e-4, tolerance=1e-3)
for z in scan_critical_zones(f1, k0, k1, 2.0, cfg):
    print(f"zone [{z.zone_start:.4f}, {z.zone_end:.4f}]  argmin {z.argmin_k2:.4f}  c={z.min_criticality:.2e}")

# %% the optimum also satisfies the terminal condition at the last knot
print("terminal residual at the optimum:", terminal_residual(f1, 0.99387, 1.55194, 2.0))
print("full recurrence residuals:       ", full_recurrence_residuals(f1, Partition(Interval(0, 2), (0.99387, 1.55194))))

# %% the Lipschitz bound says how far ahead the next critical knot must be
K = f1.lipschitz_bound
print(f"with K={K}: no critical k2 before {lipschitz_skip(K, f1, 0.0, 1.0):.4f} (k1 = 1)")

# a step function has no critical zones at all past its jump
print("f4 zones:", scan_critical_zones(zoo_lookup("f4"), 0.0, 1.0, 2.0, cfg))
print("f4 criticality at (0, 1, 2):", criticality(zoo_lookup("f4"), 0.0, 1.0, 2.0))
