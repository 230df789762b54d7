"""Univariate building blocks: spaces, evaluation, exact products, duals.

Run:  python demos/01_spline_spaces.py
"""

import numpy as np

from argyris import (
    Spline,
    UnivariateSpace,
    derived_edge_spaces,
    dual_functional,
    multiply_by_linear,
    represent_exactly,
)

# A degree-3, C^1 space on 4 uniform elements. Interior knots carry
# multiplicity p - r = 2, so the dimension is (p-r)(n-1) + p + 1 = 10.
sp = UnivariateSpace(3, 1, 4)
print("space:", sp)
print("knots:", sp.knots)
print("Greville abscissae:", np.round(sp.greville(), 4))

# All active basis functions at a point, with derivatives.
first, ders = sp.basis_ders([0.37], 2)
print(f"\nat x=0.37 the active functions start at index {first[0]}")
print("values:      ", np.round(ders[0, 0], 6), " (sum:", ders[0, 0].sum(), ")")
print("derivatives: ", np.round(ders[0, 1], 6))

# The edge spaces attached to this space: same degree with one more order of
# smoothness, and one degree less with the same smoothness. Their dimensions
# differ by exactly one.
splus, sminus = derived_edge_spaces(sp)
print("\ntrace space:      ", splus)
print("derivative space: ", sminus)

# Exact piecewise-polynomial arithmetic: a product with a linear polynomial
# lands in the next-degree space with no approximation error.
one = Spline(sp, np.ones(sp.N))
prod = multiply_by_linear(one, 0.0, 1.0)  # multiply 1 by x
print("\ncoefficients of x in the degree-4 space:", np.round(prod.coeffs, 6))
print("(these are the Greville abscissae of that space)")

# Exact conversion: any member of S+ lives in the big space too.
b2 = splus.basis_function(2)
coeffs = represent_exactly(sp, b2)
xs = np.linspace(0, 1, 7)
print("\nconversion residual of a trace basis function:",
      np.abs(Spline(sp, coeffs)(xs) - b2(xs)).max())

# Local dual functionals extract coefficients of any spline in the space.
rng = np.random.default_rng(0)
c = rng.normal(size=sp.N)
s = Spline(sp, c)
extracted = np.array([dual_functional(sp, j, s) for j in range(sp.N)])
print("\ndual-functional coefficient recovery error:", np.abs(extracted - c).max())
