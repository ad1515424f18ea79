import json
from importlib import resources

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cofactor import synth
from cofactor.conditions import (
    DEFAULT_TOL, cc2_prime, cc_residuals, check_compound, check_type1, check_type2, cofactor_report,
    default_tol, force_middle_eigenvalue, with_tolerance,
)
from cofactor.errors import AmbiguousMiddleEigenvector, NotCompound
from cofactor.twinning import DomainPair, type1_solution, type2_solution


def _bundled(name):
    d = json.loads(resources.files("cofactor").joinpath("data", f"{name}.json").read_text())
    return np.array(d["U"]), np.array(d["ehat"], float), d["expected"]


@pytest.mark.parametrize("maker,verdict", [
    (synth.type1_system, "Type I"), (synth.type2_system, "Type II"), (synth.compound_system, "Compound"),
])
def test_synthetic_systems_are_satisfied(rng, maker, verdict):
    for _ in range(10):
        s = maker(rng)
        r = cc_residuals(s.U, s.a, s.n)
        assert abs(r.cc1) < 1e-12 and abs(r.cc2) < 1e-12 and r.cc3 > 0
        rep = cofactor_report(s.U, s.ehat, tol=1e-8)
        assert rep.verdicts[verdict], rep.verdicts
        assert rep.satisfied


def test_type_residuals(rng):
    s = synth.type1_system(rng)
    assert abs(check_type1(s.U, s.ehat)) < 1e-13
    s = synth.type2_system(rng)
    assert abs(check_type2(s.U, s.ehat)) < 1e-13


def test_cc2_factorizes_through_v2(rng):
    for _ in range(20):
        s = synth.violate_cc2(rng)
        lam = np.linalg.eigvalsh(s.U)
        a2, n2 = cc2_prime(s.U, s.a, s.n)
        cc2 = cc_residuals(s.U, s.a, s.n).cc2
        assert cc2 == pytest.approx((lam[0] ** 2 - 1) * (lam[2] ** 2 - 1) * a2 * n2, rel=1e-9, abs=1e-14)
        assert abs(cc2) > 1e-6


def test_cc2_prime_ambiguous():
    with pytest.raises(AmbiguousMiddleEigenvector):
        cc2_prime(np.diag([1.0, 1.0, 1.1]), [1, 0, 0], [0, 1, 0])


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_type12_cc3_follows_from_cc1_cc2(seed):
    rng = np.random.default_rng(seed)
    s1 = synth.type1_system(rng, lam1_range=(0.6, 0.99), lam3_range=(1.01, 1.8), require_cc3=False)
    s2 = synth.type2_system(rng, lam1_range=(0.6, 0.99), lam3_range=(1.01, 1.8), require_cc3=False)
    assert cc_residuals(s1.U, s1.a, s1.n).cc3 >= -1e-12
    assert cc_residuals(s2.U, s2.a, s2.n).cc3 >= -1e-12


def test_compound_cc3_can_fail(rng):
    s = synth.violate_cc3(rng)
    v = check_compound(s.U, s.ehat, tol=1e-8)
    assert abs(v.cc1) < 1e-12 and abs(v.e1_dot_v2) < 1e-12
    assert min(v.cc3) < -1e-2
    assert not v.satisfied
    assert cofactor_report(s.U, s.ehat, tol=1e-8).verdict == "not satisfied"


def test_check_compound_rejects_generic_axis():
    with pytest.raises(NotCompound):
        check_compound(np.diag([0.9, 1.0, 1.1]), [1, 2, 3])


def test_cualmn_values():
    U, e, exp = _bundled("cualmn")
    r = cofactor_report(U, e)
    assert r.kind is DomainPair.TYPE_I_II
    assert abs(r.cc1) == pytest.approx(0.000836, abs=1e-6)
    assert r.typeI_residual_sq == pytest.approx(0.02563, abs=1e-5)
    assert r.typeII_residual_sq == pytest.approx(0.02023, abs=1e-5)
    assert r.cc3 == pytest.approx((0.00227, 0.00165), abs=1e-5)
    assert r.verdict == "not satisfied"


def test_aucuzn_is_a_compound_axis_but_reports_type_residuals():
    U, e, _ = _bundled("aucuzn")
    r = cofactor_report(U, e)
    assert r.kind is DomainPair.COMPOUND
    assert abs(r.typeI_residual_sq) == pytest.approx(0.02633, abs=1e-5)
    assert r.typeII_residual_sq == pytest.approx(0.02900, abs=1e-5)
    assert r.cc3_type12 == pytest.approx((0.01755, 0.01744), abs=1e-5)


def test_vo2_needs_lambda2_only():
    U, e, exp = _bundled("vo2")
    r = cofactor_report(U, e)
    assert r.kind is DomainPair.COMPOUND
    assert r.verdict == "satisfied if lambda2 = 1"
    assert r.cc3 == pytest.approx((0.01615, 0.01440), abs=1e-5)
    forced = cofactor_report(force_middle_eigenvalue(U), e)
    assert forced.verdict == "satisfied (Compound)"
    assert forced.cc3 == pytest.approx((0.01604, 0.01429), abs=1e-5)


def test_force_middle_eigenvalue_keeps_frame():
    U, _, _ = _bundled("vo2")
    V = force_middle_eigenvalue(U, 1.0)
    np.testing.assert_allclose(np.linalg.eigvalsh(V)[1], 1.0)
    np.testing.assert_allclose(np.linalg.eigvalsh(V)[[0, 2]], np.linalg.eigvalsh(U)[[0, 2]])


def test_tolerance_controls(monkeypatch):
    U, e, _ = _bundled("cualmn")
    assert default_tol() == DEFAULT_TOL
    monkeypatch.setenv("COFACTOR_TOL", "0.05")
    assert default_tol() == 0.05
    r = cofactor_report(U, e)
    assert r.tol == 0.05 and r.verdicts["Type I"]
    tight = with_tolerance(r, 1e-4)
    assert not tight.satisfied
    assert tight.cc3 == r.cc3


def test_report_as_dict_is_json_serializable():
    U, e, _ = _bundled("vo2")
    d = cofactor_report(U, e).as_dict()
    json.dumps(d)
    assert d["kind"] == "Compound" and "compound" in d
