#!/usr/bin/env python3
"""Functional calculus through clustered spectral projections.

A Hermitian matrix decomposes into eigenvalue clusters with orthogonal
projections; a scalar function of the matrix is the projection-weighted
sum of its values on the distinct eigenvalues.
"""

import numpy as np

from moikit import (
    Polynomial,
    WienerAtomic,
    functional_calculus,
    hermitian_eigendecompose,
    validate_decomposition,
)
from moikit.verify import random_hermitian, suite_rng

# --- the 2x2 flip ----------------------------------------------------------
flip = np.array([[0.0, 1.0], [1.0, 0.0]])
decomp = hermitian_eigendecompose(flip)
print("flip matrix [[0,1],[1,0]]:")
for cluster in decomp.clusters:
    print(f"  eigenvalue {cluster.eigenvalue:+.1f}, projection:")
    print(np.array_str(cluster.projection.real, precision=3))

square = functional_calculus(Polynomial([0, 0, 1]), decomp)
print("flip squared (an involution, so the identity):")
print(np.array_str(square.real, precision=3))

# --- a degenerate spectrum merges into one cluster -------------------------
decomp_eye = hermitian_eigendecompose(np.eye(3) * 2.0)
print(f"\n2*I_3 decomposes into {len(decomp_eye.clusters)} cluster "
      f"of multiplicity {decomp_eye.clusters[0].multiplicity}")

# --- structural invariants, re-checked numerically --------------------------
rng = suite_rng(2024, 0)
A = random_hermitian(rng, 6)
decomp = hermitian_eigendecompose(A)
report = validate_decomposition(decomp)
print(f"\nrandom 6x6 Hermitian: {len(decomp.clusters)} clusters")
print(report.summary())

# --- cos of a matrix --------------------------------------------------------
cos = WienerAtomic([(1.0, 0.5), (-1.0, 0.5)])
C = functional_calculus(cos, decomp)
# cos(A)^2 + sin(A)^2 = I, evaluated independently
sin = WienerAtomic([(1.0, -0.5j), (-1.0, 0.5j)])
S = functional_calculus(sin, decomp)
residual = np.linalg.norm(C @ C + S @ S - np.eye(6))
print(f"\n||cos(A)^2 + sin(A)^2 - I||_F = {residual:.2e}")
