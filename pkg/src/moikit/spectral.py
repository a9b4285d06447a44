"""Hermitian eigendecomposition with eigenvalue clustering and functional calculus.

The eigensolver is a cyclic Jacobi iteration on the complex Hermitian
matrix: rotations give uniformly accurate eigenvectors, which is what the
downstream spectral-projection sums need.  Eigenvalues within
``cluster_tol`` are merged into one cluster whose projection is the sum of
the constituent rank-1 projectors; a scalar function of the matrix is then
the projection-weighted sum of its values on the distinct eigenvalues.

Decompositions are frozen after construction and safe to share across
threads; the solver itself runs single-threaded per matrix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, NotHermitian
from .report import VerificationReport, equality_check, inequality_check
from .scalar_functions import evaluate_safely

__all__ = [
    "SpectralCluster",
    "SpectralDecomposition",
    "hermitian_eigendecompose",
    "functional_calculus",
    "validate_decomposition",
    "require_hermitian",
    "matrix_from_dict",
    "matrix_to_dict",
    "load_matrix",
    "save_matrix",
]

JACOBI_SWEEP_BUDGET = 30
JACOBI_OFFDIAG_FACTOR = 1e-13


def require_hermitian(A: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Validate shape, finiteness, and Hermiticity; return a complex copy."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise NotHermitian(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A.real)) or not np.all(np.isfinite(np.asarray(A, dtype=complex).imag)):
        raise NotHermitian("matrix has non-finite entries")
    A = np.asarray(A, dtype=complex)
    scale = np.max(np.abs(A)) if A.size else 0.0
    if tol is None:
        tol = 1e-10 * (1.0 + scale)
    dev = np.max(np.abs(A - A.conj().T))
    if dev > tol:
        raise NotHermitian(f"max |A - A*| = {dev:.3e} exceeds tolerance {tol:.3e}")
    return 0.5 * (A + A.conj().T)


def _offdiagonal_norm(H: np.ndarray) -> float:
    od = H.copy()
    np.fill_diagonal(od, 0.0)
    return float(np.linalg.norm(od))


def jacobi_eigh(A: np.ndarray, max_sweeps: int = JACOBI_SWEEP_BUDGET,
                offdiag_factor: float = JACOBI_OFFDIAG_FACTOR):
    """Cyclic Jacobi diagonalization of a complex Hermitian matrix.

    Returns ascending eigenvalues and the unitary of eigenvectors
    (``A = V diag(lam) V*``).  Each rotation zeroes one off-diagonal pair;
    sweeps repeat until the off-diagonal Frobenius mass falls below
    ``offdiag_factor * ||A||_F`` or the sweep budget is exhausted.
    """
    n = A.shape[0]
    H = np.array(A, dtype=complex)
    V = np.eye(n, dtype=complex)
    fro = np.linalg.norm(H)
    if fro == 0.0 or n == 1:
        return np.real(np.diag(H)).copy(), V
    thresh = offdiag_factor * fro
    skip = thresh / (10.0 * n * n)
    sweeps = 0
    while _offdiagonal_norm(H) > thresh:
        if sweeps >= max_sweeps:
            raise ConvergenceFailure(
                f"Jacobi iteration did not converge in {max_sweeps} sweeps")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = H[p, q]
                absb = abs(apq)
                if absb <= skip:
                    continue
                app = H[p, p].real
                aqq = H[q, q].real
                phase = apq / absb
                tau = (app - aqq) / (2.0 * absb)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                w = (t * c) * phase
                colp = H[:, p].copy()
                colq = H[:, q].copy()
                H[:, p] = c * colp + np.conj(w) * colq
                H[:, q] = -w * colp + c * colq
                rowp = H[p, :].copy()
                rowq = H[q, :].copy()
                H[p, :] = c * rowp + w * rowq
                H[q, :] = -np.conj(w) * rowp + c * rowq
                H[p, p] = H[p, p].real
                H[q, q] = H[q, q].real
                H[p, q] = 0.0
                H[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp + np.conj(w) * vq
                V[:, q] = -w * vp + c * vq
    lam = np.real(np.diag(H)).copy()
    order = np.argsort(lam, kind="stable")
    return lam[order], V[:, order]


@dataclass(frozen=True)
class SpectralCluster:
    eigenvalue: float
    projection: np.ndarray
    multiplicity: int


@dataclass(frozen=True)
class SpectralDecomposition:
    """Clustered eigenvalues of a Hermitian matrix with orthogonal projections.

    ``source`` is the decomposed matrix itself (kept so the decomposition
    can be re-validated and so polynomial routes can reuse matrix powers);
    ``source_norm`` is its operator norm (spectral radius).
    """

    source: np.ndarray
    source_norm: float
    clusters: tuple[SpectralCluster, ...]
    cluster_tol: float

    @property
    def dimension(self) -> int:
        return self.source.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([c.eigenvalue for c in self.clusters])

    @property
    def projections(self) -> list[np.ndarray]:
        return [c.projection for c in self.clusters]


def hermitian_eigendecompose(A: np.ndarray, cluster_tol: float | None = None,
                             hermiticity_tol: float | None = None,
                             max_sweeps: int = JACOBI_SWEEP_BUDGET) -> SpectralDecomposition:
    """Decompose a Hermitian matrix into clustered spectral projections.

    Eigenvalues within ``cluster_tol`` of their neighbor are merged; the
    default tolerance ``1e-7 * (1 + ||A||_F)`` keeps near-degenerate gaps
    out of downstream divided-difference quotients (the diagonal derivative
    form takes over inside a cluster).
    """
    A = require_hermitian(A, hermiticity_tol)
    if cluster_tol is None:
        cluster_tol = 1e-7 * (1.0 + np.linalg.norm(A))
    lam, V = jacobi_eigh(A, max_sweeps=max_sweeps)
    n = A.shape[0]
    clusters = []
    start = 0
    for i in range(1, n + 1):
        if i < n and lam[i] - lam[i - 1] <= cluster_tol:
            continue
        members = V[:, start:i]
        proj = members @ members.conj().T
        proj = 0.5 * (proj + proj.conj().T)
        clusters.append(SpectralCluster(
            eigenvalue=float(np.mean(lam[start:i])),
            projection=proj,
            multiplicity=i - start,
        ))
        start = i
    return SpectralDecomposition(
        source=A,
        source_norm=float(np.max(np.abs(lam))) if n else 0.0,
        clusters=tuple(clusters),
        cluster_tol=float(cluster_tol),
    )


def functional_calculus(f, decomposition: SpectralDecomposition) -> np.ndarray:
    """Apply a scalar function to a decomposed Hermitian matrix.

    Returns the projection-weighted sum of the function's values on the
    distinct eigenvalues; raises :class:`EvaluationDomain` when the
    function is undefined (or non-finite) at one of them.
    """
    n = decomposition.dimension
    out = np.zeros((n, n), dtype=complex)
    for cluster in decomposition.clusters:
        out += evaluate_safely(f, cluster.eigenvalue) * cluster.projection
    return out


def validate_decomposition(decomposition: SpectralDecomposition) -> VerificationReport:
    """Re-check every structural invariant of a spectral decomposition."""
    D = decomposition
    n = D.dimension
    report = VerificationReport("spectral-decomposition")
    eye = np.eye(n)

    psum = sum(D.projections, start=np.zeros((n, n), dtype=complex))
    report.add(equality_check(
        "resolution of identity", "sum of projections equals the identity",
        residual=float(np.linalg.norm(psum - eye)), tolerance=1e-10 * n))

    worst = 0.0
    for i, P in enumerate(D.projections):
        for j, Q in enumerate(D.projections):
            target = P if i == j else 0.0
            worst = max(worst, float(np.linalg.norm(P @ Q - target)))
    report.add(equality_check(
        "orthogonal idempotents", "projections are idempotent and mutually orthogonal",
        residual=worst, tolerance=1e-10))

    herm = max((float(np.linalg.norm(P - P.conj().T)) for P in D.projections), default=0.0)
    report.add(equality_check(
        "hermitian projections", "each projection is Hermitian",
        residual=herm, tolerance=1e-10))

    mult = max((abs(float(np.trace(c.projection).real) - c.multiplicity)
                for c in D.clusters), default=0.0)
    report.add(equality_check(
        "multiplicities", "trace of each projection equals its multiplicity",
        residual=mult, tolerance=1e-8))

    recon = sum((c.eigenvalue * c.projection for c in D.clusters),
                start=np.zeros((n, n), dtype=complex))
    report.add(equality_check(
        "reconstruction", "eigenvalue-weighted projection sum reconstructs the matrix",
        residual=float(np.linalg.norm(D.source - recon)),
        tolerance=1e-10 * n * (1.0 + D.source_norm)))

    gaps = np.diff(D.eigenvalues)
    if gaps.size:
        # post-clustering, consecutive representatives sit more than
        # cluster_tol apart by construction
        report.add(inequality_check(
            "ordering", "cluster eigenvalues are strictly increasing",
            lhs=D.cluster_tol, rhs=float(gaps.min())))
    return report


# ---------------------------------------------------------------------------
# matrix JSON format
# ---------------------------------------------------------------------------

def matrix_from_dict(data: dict) -> np.ndarray:
    n = int(data["n"])
    re = np.asarray(data["re"], dtype=float)
    im = np.asarray(data["im"], dtype=float)
    if re.shape != (n, n) or im.shape != (n, n):
        raise ValueError(f"matrix parts must be {n}x{n}")
    return re + 1j * im


def matrix_to_dict(A: np.ndarray) -> dict:
    A = np.asarray(A, dtype=complex)
    return {
        "n": A.shape[0],
        "re": A.real.tolist(),
        "im": A.imag.tolist(),
    }


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        return matrix_from_dict(json.load(fh))


def save_matrix(path, A: np.ndarray) -> None:
    with open(path, "w") as fh:
        json.dump(matrix_to_dict(A), fh)
        fh.write("\n")
