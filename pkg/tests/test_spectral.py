from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from oracles import lemma6_two_by_two
from tpspectra.errors import DomainError, ResourceLimitError, SingularMatrixError
from tpspectra.kernel import kernel_blocks
from tpspectra.linalg import RATIONAL, as_matrix
from tpspectra.operators import build_a, build_b, project_tail
from tpspectra.schur import normalization_z_closed_form
from tpspectra.series import PLUS, SymbolParams, h_coefficients
from tpspectra.spectral import (audit_total_positivity, hausdorff_distance, is_monotone_nonincreasing,
                                lemma6_check, lemma6_trials, matched_distance, spectrum_verdict,
                                structured_lemma6, sweep_convergence, toeplitz_lower, verify_theorem4)


# total positivity ------------------------------------------------------------

def test_audit_identity_clean():
    rep = audit_total_positivity(np.eye(5), 3)
    assert rep.passed and rep.min_minor_value == 0.0


def test_audit_reports_single_violation():
    rep = audit_total_positivity(np.array([[1.0, 2.0], [3.0, 4.0]]))
    assert rep.violations == [((0, 1), (0, 1), pytest.approx(-2.0))]
    assert rep.min_minor_value == pytest.approx(-2.0)
    exact = audit_total_positivity(as_matrix([[1, 2], [3, 4]], RATIONAL))
    assert exact.violations == [((0, 1), (0, 1), Fraction(-2))]
    assert exact.to_dict()["minMinorExact"] == "-2"


def test_audit_toeplitz_single_alpha_exhaustive():
    h = h_coefficients(SymbolParams(alpha_plus=(0.5,)), PLUS, 8, RATIONAL)
    t = toeplitz_lower(h, 8)
    assert t[3, 1] == Fraction(1, 4) and t[1, 3] == 0
    rep = audit_total_positivity(t, 3, window_cap=8, exhaustive=True)
    assert rep.passed and rep.exhaustive and rep.minors_examined > 3000


def test_audit_caps():
    with pytest.raises(ResourceLimitError):
        audit_total_positivity(np.eye(3), max_minor_size=6)
    with pytest.raises(ResourceLimitError):
        audit_total_positivity(np.eye(3), window_cap=65)


def test_audit_sampling_is_seeded(mixed):
    a = build_a(mixed, 12).matrix
    r1 = audit_total_positivity(a, 4, seed=3)
    r2 = audit_total_positivity(a, 4, seed=3)
    assert r1.to_dict() == r2.to_dict() and r1.sampled_examined > 0


@pytest.mark.parametrize("name", ["widom-1", "widom-2", "geometric", "mixed"])
def test_operators_totally_nonnegative_exact(presets, name):
    p = presets[name]
    a = build_a(p, 8, scalar=RATIONAL).matrix
    b = build_b(p, 8, scalar=RATIONAL).matrix
    for m in (a, b, a.T.dot(b)):
        assert audit_total_positivity(m, 3, window_cap=8, samples=100).passed


# spectra -------------------------------------------------------------------

def test_verdict_zero_matrix():
    rep = spectrum_verdict(np.zeros((4, 4)))
    assert rep.passed and np.all(rep.eigenvalues == 0)


def test_verdict_detects_range_and_near_one():
    assert spectrum_verdict(np.diag([0.5, 2.0])).verdict == "fail"
    assert spectrum_verdict(np.array([[0.0, 1.0], [-1.0, 0.0]])).verdict == "fail"
    rep = spectrum_verdict(np.diag([0.2, 1.0 - 1e-10]))
    assert rep.passed and len(rep.near_one) == 1


def test_verdict_k11_widom_half():
    p = SymbolParams.widom([0.5], [0.5])
    k = kernel_blocks(build_a(p, 30), build_b(p, 30))
    rep = spectrum_verdict(project_tail(k.k11, 0), "K11^(0)")
    assert rep.passed and rep.max_imag_abs < 1e-9


def test_hausdorff_and_matching():
    assert hausdorff_distance([0.5, 0.0], [0.5]) == 0.0
    assert hausdorff_distance([0.5], [0.25]) == pytest.approx(0.25)
    assert matched_distance([0.1, 0.9], [0.9, 0.1]) == 0.0
    with pytest.raises(DomainError):
        matched_distance([0.1], [0.1, 0.2])


def test_sweep_zero_operator():
    rep = sweep_convergence(lambda n: np.zeros((n, n)), [4, 8, 16])
    assert rep.convergence_trace == [(8, 0.0), (16, 0.0)] and rep.passed
    with pytest.raises(DomainError):
        sweep_convergence(lambda n: np.zeros((n, n)), [8, 4])


def test_sweep_atb_widom(widom1):
    rep = sweep_convergence(lambda n: build_a(widom1, n).matrix.T @ build_b(widom1, n).matrix, [8, 16, 32, 64])
    assert is_monotone_nonincreasing(rep.convergence_trace)
    assert rep.convergence_trace[-1][1] < 1e-8
    z = float(normalization_z_closed_form(widom1))
    assert rep.determinants[-1][1] == pytest.approx(z, rel=1e-6)


@pytest.mark.parametrize("name", ["widom-1", "widom-2"])
def test_theorem4_widom(presets, name):
    rep = verify_theorem4(presets[name], 40, [0, 1, 2, 5])
    assert rep.passed
    assert len(rep.spectra) == 12
    assert max(s["spectrumGap"] for s in rep.similarity) < 1e-10


def test_theorem4_full_rank_presets(presets):
    for name in ("mixed", "exp", "geometric"):
        assert verify_theorem4(presets[name], 30, range(3)).passed, name


# minor identity ---------------------------------------------------------------

def test_lemma6_zero_matrix():
    rep = lemma6_check(as_matrix(np.zeros((4, 4)), RATIONAL), 2)
    assert rep.passed and rep.det_one_minus_d == 1 and not any(rep.d.ravel())


fr = st.fractions(min_value=-2, max_value=2, max_denominator=5)


@given(fr, fr, fr, fr)
def test_lemma6_two_by_two_symbolic(c11, c12, c21, c22):
    c = [[c11, c12], [c21, c22]]
    o = None
    try:
        o = lemma6_two_by_two(c)
    except ZeroDivisionError:
        pass
    assume(o is not None and o["det"] != 0 and o["D"] != 1 and 1 + c11 != 0)
    rep = lemma6_check(as_matrix(c, RATIONAL), 1)
    assert rep.d[0, 0] == o["D"] and rep.e[0, 0] == o["E"]
    assert rep.det_one_minus_d == o["det1MinusD"]
    assert rep.passed


def test_lemma6_rejects_float_and_singular():
    with pytest.raises(DomainError):
        lemma6_check(np.eye(2), 1)
    with pytest.raises(SingularMatrixError):
        lemma6_check(as_matrix([[-1, 0], [0, 0]], RATIONAL), 1)


def test_lemma6_seeded_trials():
    reps = lemma6_trials(3, 3, trials=5, seed=1)
    assert all(r.passed for r in reps)
    assert [r.to_dict() for r in reps] == [r.to_dict() for r in lemma6_trials(3, 3, trials=5, seed=1)]


def test_structured_instance(mixed):
    out = structured_lemma6(mixed)
    assert out["passed"] and out["det1MinusDPositive"]
    assert out["auditD"].exhaustive and out["auditD"].passed
