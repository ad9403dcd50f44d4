"""Acceptance suite: one test per criterion, exact arithmetic, timed.

Each test asserts its own runtime budget; the conftest hook prints a
PASS/FAIL line per criterion at the end of the run.
"""

import os
import subprocess
import sys
import time
from math import comb

import pytest

from superpoint.algebra import SuperElement, monomials_of_bidegree
from superpoint.derivations import bracket, extend, extend_by_constraint, koszul_d
from superpoint.quadric import verify_dh_action, verify_lemma_2_1, verify_quotient, verify_w_action
from superpoint.vectorial import QuadraticForm, verify_jacobi, verify_lemma_1_1, w_basis, w_basis_all

criterion = pytest.mark.criterion


class Timer:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.1f}s, limit {self.limit}s"


def assert_report(report):
    assert report.passed, report.to_text()


@criterion(1, "d^2 = 0 on every monomial, n <= 6", 5)
def test_koszul_square_zero():
    # d is C[x]-linear, so x-degree <= 2 exercises every xi-pattern with and without x factors
    with Timer(5):
        for n in range(1, 7):
            d = koszul_d(n)
            for xd in range(3):
                for k in range(n + 1):
                    for m in monomials_of_bidegree(n, xd, k):
                        assert d.apply(d.apply(m)).is_zero(), (n, m)


@criterion(2, "extension commutes with d and is unique, n <= 5", 30)
def test_extension_unique():
    with Timer(30):
        for n in range(1, 6):
            d = koszul_d(n)
            for f in w_basis_all(n):
                g = extend(f)
                assert bracket(g, d).is_zero(), f
                solved, kernel_dim = extend_by_constraint(f)
                assert kernel_dim == 0, f
                assert solved == g, f


@criterion(3, "extension is a Lie superalgebra homomorphism, n <= 4", 60)
def test_representation():
    with Timer(60):
        for n in range(1, 5):
            basis = w_basis_all(n)
            ext = [extend(f) for f in basis]
            for i, a in enumerate(basis):
                for j, b in enumerate(basis):
                    assert extend(bracket(a, b)) == bracket(ext[i], ext[j]), (a, b)


@criterion(4, "dim (W_n)_k = n C(n, k+1), total n 2^n, n <= 8", 5)
def test_w_dimensions():
    with Timer(5):
        for n in range(1, 9):
            total = 0
            for k in range(-1, n):
                layer = w_basis(n, k).basis
                assert len(layer) == n * comb(n, k + 1)
                assert len(set(layer)) == len(layer)
                total += len(layer)
            assert total == n * 2**n


@criterion(5, "scalar multiplier, DH = H + QE, [E,H] in H, decomposition, n = 2..6", 180)
def test_dh_structure():
    with Timer(180):
        for n in range(2, 7):
            report = verify_lemma_1_1(n, QuadraticForm.standard(n))
            assert_report(report)
            h = sum(r["dimH"] for r in report.layers)
            dh = sum(r["dimDH"] for r in report.layers)
            assert dh == h + 1


@criterion(6, "graded Jacobi: W2, W3 exhaustive, 500 seeded triples of W5", 120)
def test_jacobi():
    with Timer(120):
        for n in (2, 3):
            report = verify_jacobi(n, exhaustive=True)
            assert_report(report)
            assert f"{len(w_basis_all(n)) ** 3} triples" in report.checks[0].detail
        report = verify_jacobi(5, samples=500, seed=0, exhaustive=False)
        assert_report(report)
        assert "500 triples" in report.checks[0].detail


@criterion(7, "symbolic du = 0 matches pointwise test on charts, n = 2..4", 60)
def test_chart_kernel():
    with Timer(60):
        for n in (2, 3, 4):
            report = verify_lemma_2_1(n, samples=20, seed=0, random_elements=50)
            assert_report(report)
            tested = int(report.checks[0].detail.split("/")[1].split()[0])
            # per chart: n-1 frame sections, n-1 chart functions, n generators, 50 random
            assert tested == n * ((n - 1) * 2 + n + 50)


@criterion(8, "reduction mod omega, d'^2 = 0, induced fields well defined, n <= 5", 120)
def test_quotient():
    with Timer(120):
        for n in range(1, 6):
            assert_report(verify_quotient(n, QuadraticForm.standard(n), trials=20, seed=0))


@criterion(9, "W_n on charts (n = 2..4) and DH_n on A' (n = 3, 5): injective, bracket preserving", 180)
def test_actions():
    with Timer(180):
        for n in (2, 3, 4):
            assert_report(verify_w_action(n))
        for n in (3, 5):
            assert_report(verify_dh_action(n, QuadraticForm.standard(n), seed=0, trials=20))


CLI_RUNS = [
    ["dims", "--n", "4"],
    ["dims", "--n", "10", "--format", "json"],
    ["basis", "--n", "3", "--k", "0", "--which", "H"],
    ["basis", "--n", "3", "--k", "1", "--which", "DH", "--format", "json"],
    ["bracket", "∂ξ1", "ξ1∂ξ1"],
    ["bracket", "E", "ξ1ξ2∂ξ1", "--format", "json"],
    ["extend", "xi1xi2 dxi1"],
    ["defect", "xi1 dxi2 - xi2 dxi1", "--format", "json"],
    ["quotient", "x3^2 xi1", "--n", "3"],
    ["verify", "lemma11", "--n", "4", "--format", "json"],
    ["verify", "lemma21", "--n", "3", "--samples", "20", "--seed", "7", "--format", "json"],
    ["verify", "waction", "--n", "2"],
    ["verify", "dhaction", "--n", "3", "--samples", "5", "--format", "json"],
    ["verify", "jacobi", "--n", "3", "--samples", "50", "--seed", "3"],
]


def _cli(args, hashseed):
    env = dict(os.environ, PYTHONHASHSEED=str(hashseed))
    proc = subprocess.run([sys.executable, "-m", "superpoint", *args], capture_output=True, env=env)
    return proc.returncode, proc.stdout


@criterion(10, "CLI output is byte-identical across runs", None)
def test_cli_determinism():
    for args in CLI_RUNS:
        first = _cli(args, 1)
        second = _cli(args, 12345)
        assert first[0] == 0, args
        assert first == second, args
