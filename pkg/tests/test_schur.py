from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import partition_count, schur_specialized
from tpspectra.errors import DomainError, ResourceLimitError, TruncationError
from tpspectra.kernel import z_kernel
from tpspectra.linalg import RATIONAL
from tpspectra.operators import build_a, build_b, build_l
from tpspectra.schur import (MeasureContext, Partition, brute_correlation, enumerate_partitions, measure_weight,
                             normalization_z, normalization_z_closed_form, partitions_of, schur_giambelli,
                             schur_jacobi_trudi, size_series, size_tail_bound, verify_theorem3)
from tpspectra.series import PLUS, SymbolParams, h_coefficients

partitions = st.lists(st.integers(1, 6), max_size=6).map(lambda xs: Partition(tuple(sorted(xs, reverse=True))))


def test_enumeration_counts():
    assert [p.parts for p in enumerate_partitions(0)] == [()]
    sizes = [p.size for p in enumerate_partitions(20)]
    for n in range(21):
        assert sizes.count(n) == partition_count(n)
    assert partition_count(5) == 7 and partition_count(10) == 42
    assert sum(1 for _ in partitions_of(5)) == 7 and sum(1 for _ in partitions_of(10)) == 42


def test_enumeration_order_and_cap():
    assert list(partitions_of(4)) == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
    with pytest.raises(ResourceLimitError):
        next(enumerate_partitions(61))


def test_partition_basics():
    lam = Partition((4, 2, 1))
    assert lam.size == 7 and lam.length == 3 and lam.part(5) == 0
    assert lam.conjugate().parts == (3, 2, 1, 1)
    assert lam.frobenius == ((3, 0), (2, 0)) and lam.rank == 2
    assert lam.points(-5) == [3, 0, -2, -4, -5]
    assert lam.contains(0) and not lam.contains(-1)
    with pytest.raises(Exception):
        Partition((1, 2))


@given(partitions)
def test_frobenius_roundtrip_and_conjugate(lam):
    p, q = lam.frobenius
    assert Partition.from_frobenius(p, q) == lam
    assert lam.conjugate().conjugate() == lam
    assert lam.conjugate().frobenius == (q, p)


def test_jacobi_trudi_examples():
    a = Fraction(1, 2)
    h = h_coefficients(SymbolParams(alpha_plus=(a,)), PLUS, 10, RATIONAL)
    assert schur_jacobi_trudi(Partition(()), h) == 1
    for k in range(1, 6):
        assert schur_jacobi_trudi(Partition((k,)), h) == a ** k
    assert schur_jacobi_trudi(Partition((1, 1)), h) == 0
    with pytest.raises(TruncationError):
        schur_jacobi_trudi(Partition((12,)), h)


@given(partitions)
def test_jacobi_trudi_matches_bialternant(lam):
    alphas = (Fraction(1, 2), Fraction(1, 3), Fraction(2, 7))
    h = h_coefficients(SymbolParams(alpha_plus=alphas), PLUS, 14, RATIONAL)
    assert schur_jacobi_trudi(lam, h) == schur_specialized(lam.parts, alphas)
    betas = (Fraction(2, 5), Fraction(1, 4))
    hb = h_coefficients(SymbolParams(beta_plus=betas), PLUS, 14, RATIONAL)
    assert schur_jacobi_trudi(lam, hb) == schur_specialized(lam.parts, betas=betas)


def test_giambelli_examples(mixed):
    a = build_a(mixed, 6, scalar=RATIONAL).matrix
    assert schur_giambelli(Partition((3, 1, 1)), a) == a[2, 2]
    assert schur_giambelli(Partition(()), a) == 1
    assert schur_giambelli(Partition((2, 2)), a) == a[1, 1] * a[0, 0] - a[1, 0] * a[0, 1]
    h = h_coefficients(mixed, PLUS, 12, RATIONAL)
    assert schur_giambelli(Partition((2, 2)), a) == schur_jacobi_trudi(Partition((2, 2)), h)


def test_giambelli_equals_jacobi_trudi_small(mixed):
    a = build_a(mixed, 9, scalar=RATIONAL).matrix
    h = h_coefficients(mixed, PLUS, 20, RATIONAL)
    for lam in enumerate_partitions(8):
        assert schur_giambelli(lam, a) == schur_jacobi_trudi(lam, h)


def test_normalization_closed_form_examples(geometric):
    assert normalization_z_closed_form(SymbolParams()) == 1
    assert normalization_z_closed_form(geometric.exact()) == Fraction(4, 3)
    assert normalization_z_closed_form(geometric) == pytest.approx(4 / 3, abs=1e-15)
    z, tail = normalization_z(geometric)
    assert abs(z - 4 / 3) < 1e-12 and tail < 1e-15


def test_normalization_routes_with_gamma(presets):
    for name, p in presets.items():
        z, _ = normalization_z(p)
        assert z == pytest.approx(float(normalization_z_closed_form(p)), rel=1e-12), name


def test_normalization_explicit_order_too_small(geometric):
    with pytest.raises(TruncationError):
        normalization_z(geometric, order=4)


def test_z_equals_fredholm_determinant(mixed):
    n = 48
    l = build_l(build_a(mixed, n), build_b(mixed, n))
    det = np.linalg.det(np.eye(2 * n) + l)
    assert det == pytest.approx(float(normalization_z_closed_form(mixed)), rel=1e-6)


def test_size_series_counts_weights(mixed):
    c = size_series(mixed, 6, RATIONAL).coeffs
    ctx = MeasureContext.build(mixed, order=12, scalar=RATIONAL)
    for n in range(7):
        total = sum(ctx.schur_pair(Partition(p))[0] * ctx.schur_pair(Partition(p))[1] for p in partitions_of(n))
        assert total == c[n]


def test_weights_geometric(geometric):
    ctx = MeasureContext.build(geometric, scalar=RATIONAL)
    assert measure_weight(ctx, Partition(())) == Fraction(3, 4)
    assert measure_weight(ctx, Partition((2,))) == Fraction(3, 64)  # 0.046875
    assert measure_weight(ctx, Partition((1, 1))) == 0


def test_weight_table_matches_jacobi_trudi(mixed):
    ctx = MeasureContext.build(mixed)
    table = ctx.weight_table(10)
    parts = list(enumerate_partitions(10))
    jt = np.array([ctx.weight(lam) for lam in parts])
    assert np.max(np.abs(table.weights - jt)) < 1e-15
    assert ctx.weight_table(10) is table


def test_total_mass_and_tail(geometric):
    table = MeasureContext.build(geometric).weight_table(25)
    total = table.weights.sum()
    assert 1 - 1e-12 <= total + table.tail_bound and total <= 1 + 1e-12
    assert table.tail_bound == pytest.approx(0.25 ** 26 / 0.75 * 0.75, rel=0.5)


def test_tail_bound_zero_for_polynomial_size_series(widom1):
    assert size_tail_bound(widom1, 5) < 1e-18


def test_brute_correlation_examples(geometric):
    vac = MeasureContext.build(SymbolParams())
    assert brute_correlation(vac, [-1], 5).value == 1.0
    ctx = MeasureContext.build(geometric)
    zk = z_kernel(geometric, -1, 0)
    assert abs(brute_correlation(ctx, [0], 30).value - zk(0, 0)) < 1e-8
    assert abs(brute_correlation(ctx, [0, -1], 30).value - zk.correlation([0, -1])) < 1e-7
    with pytest.raises(DomainError):
        brute_correlation(ctx, [1, 1], 5)


def test_theorem3_empty_and_widom(widom1):
    ctx = MeasureContext.build(widom1)
    rep = verify_theorem3(ctx, [()], 20)
    assert rep.entries[0]["brute_force"] == pytest.approx(1.0, abs=1e-15)
    assert rep.entries[0]["determinant"] == 1.0
    rep = verify_theorem3(ctx, [(x,) for x in range(-3, 4)], 20, tol=1e-7)
    assert rep.passed


def test_particle_balance(mixed):
    # points >= 0 and holes < 0 of L(lambda) both number the Frobenius rank
    ctx = MeasureContext.build(mixed)
    cap, m = 24, 30
    parts = list(enumerate_partitions(cap))
    w = ctx.weight_table(cap).weights
    mean_rank = float(np.dot(w, [lam.rank for lam in parts]))
    zk = z_kernel(mixed, -m, m - 1)
    rho = np.array([zk(x, x) for x in range(-m, m)])
    assert rho[m:].sum() == pytest.approx(mean_rank, abs=1e-9)
    assert (1 - rho[:m]).sum() == pytest.approx(mean_rank, abs=1e-9)
