"""Stress cases: spectra with tiny gaps, high orders, schema stability.

Near-degenerate eigenvalues above the clustering threshold and tiny
perturbations produce cross-spectrum node gaps that the difference-quotient
recursion cannot survive; these tests pin the full pipelines in that
regime.
"""

import json

import numpy as np
import pytest

from moikit import (
    DerivativeRequest,
    MoiOperands,
    MoiSymbol,
    Polynomial,
    WienerAtomic,
    finite_difference_derivative,
    matrix_function_derivative,
    moi_evaluate,
    moi_perturbation,
    moi_polynomial,
    taylor_remainder_direct,
    taylor_remainder_moi,
)
from moikit.verify import random_hermitian, suite_rng

COS = WienerAtomic([(1.0, 0.5), (-1.0, 0.5)])


def near_degenerate(rng, n, gap):
    """Hermitian matrix with one eigenvalue pair separated by exactly gap."""
    eigs = np.sort(rng.uniform(-1.0, 1.0, n))
    eigs[1] = eigs[0] + gap
    Q = np.linalg.qr(rng.standard_normal((n, n))
                     + 1j * rng.standard_normal((n, n)))[0]
    A = Q @ np.diag(eigs).astype(complex) @ Q.conj().T
    return 0.5 * (A + A.conj().T)


class TestNearDegenerateBase:
    @pytest.mark.parametrize("gap", [1e-3, 1e-5])
    def test_derivative_matches_stencil(self, gap):
        rng = suite_rng(71, 0)
        A = near_degenerate(rng, 4, gap)
        dirs = tuple(random_hermitian(rng, 4, norm=1.0) for _ in range(2))
        via_moi = matrix_function_derivative(DerivativeRequest(COS, A, dirs, 2, "moi"))
        oracle = finite_difference_derivative(COS, A, dirs, extended=True)
        rel = np.linalg.norm(via_moi - oracle) / (1 + np.linalg.norm(via_moi))
        assert rel < 1e-8

    def test_tiny_perturbation_identity(self):
        rng = suite_rng(72, 0)
        A = random_hermitian(rng, 5)
        B = A + 1e-6 * random_hermitian(rng, 5)   # cross-spectrum gaps ~1e-6
        for f in (COS, Polynomial([0.5, -1.0, 0.25, 1.0])):
            report = moi_perturbation(f, A, B)
            assert report.passed, report.summary()

    def test_tiny_perturbation_remainder_forms_agree(self):
        rng = suite_rng(73, 0)
        a = random_hermitian(rng, 4, norm=0.8)
        b = 1e-5 * random_hermitian(rng, 4, norm=1.0)
        for k in (1, 2):
            direct = taylor_remainder_direct(COS, k, a, b)
            mixed = taylor_remainder_moi(COS, k, a, b)
            scale = 1 + np.linalg.norm(direct)
            assert np.linalg.norm(direct - mixed) / scale < 1e-8


class TestOrderFour:
    def test_monomial_integral_matches_direct_sum(self):
        rng = suite_rng(74, 0)
        bases = [random_hermitian(rng, 3) for _ in range(5)]
        middles = [random_hermitian(rng, 3) for _ in range(4)]
        ops = MoiOperands.from_matrices(bases, middles)
        symbol = MoiSymbol.from_function(Polynomial([0] * 6 + [1]), 4)
        direct = moi_evaluate(symbol, ops)
        closed = moi_polynomial(6, ops)
        scale = 1 + np.linalg.norm(closed)
        assert np.linalg.norm(direct - closed) / scale < 1e-9

    def test_fourth_derivative_of_quartic(self):
        rng = suite_rng(75, 0)
        A = random_hermitian(rng, 3)
        dirs = tuple(random_hermitian(rng, 3) for _ in range(4))
        # D^4 of x^4 is the full symmetrization of the directions product
        value = matrix_function_derivative(
            DerivativeRequest(Polynomial([0, 0, 0, 0, 1]), A, dirs, 4, "moi"))
        import itertools
        expected = sum(dirs[p[0]] @ dirs[p[1]] @ dirs[p[2]] @ dirs[p[3]]
                       for p in itertools.permutations(range(4)))
        np.testing.assert_allclose(value, expected, atol=1e-10)


class TestReportSchema:
    def test_body_key_order_is_frozen(self, tmp_path):
        from moikit.cli import main
        out = tmp_path / "r.json"
        assert main(["verify", "--seed", "1", "--filter", "truncation",
                     "--out", str(out)]) == 0
        body = json.loads((tmp_path / "r.json.body").read_text())
        assert list(body) == ["tool", "version", "config", "overall_pass", "checks"]
        assert list(body["checks"][0]) == [
            "name", "identity", "lhs", "rhs", "residual", "tolerance", "passed"]
        full = json.loads(out.read_text())
        assert list(full)[:-1] == list(body)
        assert list(full)[-1] == "timings_seconds"
