# The unit steps u_a, u_k1, ..., u_kn have Gram matrix G[i, j] = b - k_max(i, j).
# Its inverse is tridiagonal, and f^T G^-1 f reproduces the mean-value ESS.

import numpy as np

from escalier import Interval, Partition, ess_quadratic_form, fit_fixed_knots, gram_build, zoo_lookup

p = Partition(Interval(0.0, 2.0), (0.4, 1.1, 1.6))
g = gram_build(p)
np.set_printoptions(precision=4, suppress=True)
print("dense Gram:\n", g.dense)
print("tridiagonal inverse:\n", g.inverse())
print("max |G G^-1 - I| =", np.abs(g.dense @ g.inverse() - np.eye(p.n + 1)).max())

for fid in ("f1", "f6", "f7"):
    fn = zoo_lookup(fid)
    q = ess_quadratic_form(fn, p)
    e = fit_fixed_knots(fn, p).ess
    print(f"{fid}: quadratic form {q:.12f}   mean-value sum {e:.12f}")
