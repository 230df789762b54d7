"""Building the smooth space: dimensions, basis families, smoothness audit.

Run:  python demos/04_smooth_basis.py
"""

import numpy as np

from argyris import (
    ArgyrisSpace,
    C2Data,
    SpaceConfig,
    builtin_geometry,
    physical_derivatives,
    smoothness_report,
    space_dimension,
)
from argyris.multipatch import CORNER_UV

cfg = SpaceConfig(3, 1, 4)
mp = builtin_geometry("three_patch_bilinear", cfg)

# The dimension is pure bookkeeping: it depends only on the topology counts
# and the space parameters, never on the control nets.
total, parts = space_dimension(mp)
print(f"dimension {total} = {parts['patch']} patch-interior "
      f"+ {parts['edge']} edge + {parts['vertex']} vertex")

space = ArgyrisSpace(mp)
kinds = {}
for fn in space.functions:
    kinds[fn.id.kind] = kinds.get(fn.id.kind, 0) + 1
print("enumerated:", kinds)

# Edge functions come in two flavors: traces (j, 0) span function values
# along the interface, derivatives (j, 1) span the transversal slope.
eid = mp.interfaces()[0].id
print(f"\ninterface {eid} basis indices:",
      [fn.id.index for fn in space.functions if fn.id.kind == "edge" and fn.id.owner == eid])

# Each vertex carries six functions that interpolate value, gradient and
# Hessian there; their point data is a scaled Kronecker delta.
v = [v for v in mp.vertices if v.is_interior][0]
print(f"\nvertex {v.id}: sigma = {space.sigma(v.id):.6f}")
fn = space.vertex_projector(v.id, C2Data(1.0, np.zeros(2), np.zeros((2, 2))))
ip, c = v.corners[0]
gj = mp.patches[ip].jet(CORNER_UV[c:c + 1], 2)
from argyris import TensorSpace, TensorSpline
fj = TensorSpline(TensorSpace(space.usp), fn.dense_grid(space.shape, ip)).jet(
    CORNER_UV[c:c + 1], 2)
val, grad, hess = physical_derivatives(gj, fj)
print("value-slot interpolant at the vertex: value", round(val[0], 12),
      "gradient", np.round(grad[0], 12), "Hessian max", np.abs(hess).max())

# The audit measures two-sided jumps of every basis function: values and
# physical gradients across interfaces, second derivatives at vertices.
rep = smoothness_report(space, samples_per_edge=100)
print(f"\nsmoothness audit: max C1 jump {rep.max_c1_jump:.2e}, "
      f"max C2 vertex jump {rep.max_c2_jump:.2e}")
print("audit passed:", rep.passed())
