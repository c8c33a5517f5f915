"""The compiled kernels and the pure-Python fallback must agree."""

import os
import subprocess
import sys

import numpy as np
import pytest

from pgnlab import _pykernels, kernels, minima
from pgnlab.approx import best_ratio
from pgnlab.geometry import Family, exact_rows, make_body, scaled_basis
from pgnlab.realnum import cbrt2, golden_ratio, liouville, sqrt2

compiled = pytest.importorskip("pgnlab._kernels")


def test_dispatch_prefers_compiled():
    assert kernels.COMPILED == (os.environ.get("PGNLAB_PURE_PYTHON") != "1")


def test_environment_forces_fallback():
    code = "from pgnlab import kernels; print(kernels.COMPILED, kernels.enumerate_min_basis.__module__)"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                         env={**os.environ, "PGNLAB_PURE_PYTHON": "1"}, check=True).stdout.split()
    assert out == ["False", "pgnlab._pykernels"]


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("PGNLAB_THREADS", "3")
    assert kernels.worker_count() == 3
    monkeypatch.setenv("PGNLAB_THREADS", "zero")
    assert kernels.worker_count() >= 1


def _minima_with(impl, monkeypatch, body):
    monkeypatch.setattr(kernels, "enumerate_min_basis", impl.enumerate_min_basis)
    return minima.successive_minima(body)


@pytest.mark.parametrize("target,n,Q", [
    (golden_ratio(), 1, 10 ** 5), (sqrt2(), 2, 3000), (cbrt2(), 2, 10 ** 5),
    (cbrt2(), 3, 10 ** 4), (liouville(), 2, 10 ** 6), (liouville(), 3, 2000),
], ids=lambda v: getattr(v, "label", str(v)))
@pytest.mark.parametrize("family", [Family.PRIMAL, Family.LINEAR_FORM])
def test_minima_agree(monkeypatch, target, n, Q, family):
    body = make_body(family, n, Q, target)
    a = _minima_with(compiled, monkeypatch, body)
    b = _minima_with(_pykernels, monkeypatch, body)
    assert [r.lam for r in a] == [r.lam for r in b]
    assert [r.witness for r in a] == [r.witness for r in b]


def test_raw_enumeration_agrees():
    body = make_body(Family.LINEAR_FORM, 2, 10 ** 4, cbrt2())
    U = minima.reduced_basis(body)
    B = np.ascontiguousarray(scaled_basis(body, U, body.default_lattice()), dtype=float)
    Z, groups = exact_rows(body, U, body.default_lattice())
    ua, wa, _, sa = compiled.enumerate_min_basis(B, 1e-9, 10 ** 7, Z, groups)
    ub, wb, _, sb = _pykernels.enumerate_min_basis(B, 1e-9, 10 ** 7, Z, groups)
    assert sa == sb == 0
    assert sorted(map(tuple, ua.tolist())) == sorted(map(tuple, ub.tolist()))
    np.testing.assert_allclose(np.sort(wa), np.sort(wb), rtol=1e-12)


def test_budget_status_matches():
    body = make_body(Family.PRIMAL, 3, 10 ** 5, cbrt2())
    U = minima.reduced_basis(body)
    B = np.ascontiguousarray(scaled_basis(body, U, body.default_lattice()), dtype=float)
    for impl in (compiled, _pykernels):
        assert impl.enumerate_min_basis(B, 1e-9, 2)[3] == kernels.BUDGET_EXCEEDED


@pytest.mark.parametrize("n,H", [(1, 50), (2, 20), (3, 8), (4, 4)])
def test_ratio_scan_agrees(n, H):
    z = float(cbrt2())
    for lo, hi, lower in ((1, H, True), (3, H // 2 + 1, False)):
        ra, ca, fa = compiled.best_ratio_scan(z, 0.0, n, H, lo, hi, lower, 32)
        rb, cb, fb = _pykernels.best_ratio_scan(z, 0.0, n, H, lo, hi, lower, 32)
        assert fa == fb
        np.testing.assert_allclose(ra, rb, rtol=1e-12)
        assert ca.tolist() == cb.tolist()


def test_best_ratio_independent_of_backend(monkeypatch):
    want = best_ratio(liouville(), 3, 12)
    monkeypatch.setattr(kernels, "best_ratio_scan", _pykernels.best_ratio_scan)
    got = best_ratio(liouville(), 3, 12)
    assert got.record.coeffs == want.record.coeffs
    assert got.ratio == want.ratio
