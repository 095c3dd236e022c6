import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import convexuq as cq
from convexuq import ModelVariant as V
from convexuq.correlation import (
    R_CLAMP,
    _mp_feasible,
    _mp_shape_2d,
    ccc_fit,
    scc,
)
from convexuq.errors import (
    DegenerateData,
    DuplicatePair,
    InfeasibleFit,
    MissingPair,
    NotPositiveDefinite,
    ZeroDeviation,
)
from convexuq.factorization import core_shape_matrix, shape_matrix

MP_VARIANTS = [V.MP1, V.MP2, V.RECT, V.LTRI, V.UTRI]


def test_scc_hand_value():
    # about midpoints (0, 0), not about sample means
    x = np.array([1.0, -1.0, 2.0])
    y = np.array([2.0, -2.0, 4.0])
    assert scc(x, y, 0.0, 0.0) == pytest.approx(1.0)
    assert scc(x, -y, 0.0, 0.0) == pytest.approx(-1.0)


def test_scc_uses_midpoint_not_mean():
    x = np.array([0.2, 0.4])
    y = np.array([0.4, 0.2])
    # about the means this pair is perfectly anti-correlated; about the
    # midpoint 0 both products are positive
    assert scc(x, y, 0.0, 0.0) == pytest.approx(0.8)
    assert np.corrcoef(x, y)[0, 1] == pytest.approx(-1.0)


def test_scc_zero_deviation():
    with pytest.raises(ZeroDeviation):
        scc(np.zeros(3), np.ones(3), 0.0, 0.0)


@settings(max_examples=80)
@given(
    st.lists(
        st.tuples(st.floats(-1, 1), st.floats(-1, 1)),
        min_size=2,
        max_size=12,
    )
)
def test_scc_bounded(pairs):
    u = np.array(pairs)
    # squared deviations can underflow to an exact zero for subnormal
    # columns, which is the same degeneracy as an all-zero column
    if float(u[:, 0] @ u[:, 0]) == 0.0 or float(u[:, 1] @ u[:, 1]) == 0.0:
        return
    value = scc(u[:, 0], u[:, 1], 0.0, 0.0)
    assert -1.0 <= value <= 1.0


@settings(max_examples=60)
@given(st.floats(-0.998, 0.998))
def test_closed_form_shape_matches_factorization(r):
    if abs(r) < 1e-9:
        # below working precision the eigensolver no longer separates the
        # two eigenvectors, so only the exact r = 0 member is canonical
        return
    R = np.array([[1.0, r], [r, 1.0]])
    for variant in MP_VARIANTS:
        generic = shape_matrix(core_shape_matrix(variant, R)).entries
        closed = _mp_shape_2d(variant, np.array([r]))[0]
        np.testing.assert_allclose(closed, generic, atol=1e-12)


def test_shape_at_zero_is_square():
    for variant in MP_VARIANTS:
        np.testing.assert_array_equal(_mp_shape_2d(variant, np.array([0.0]))[0], np.eye(2))


def test_rect_family_discontinuous_at_zero():
    # the limiting member at r -> 0 is the inscribed diamond, not the square
    s_eps = _mp_shape_2d(V.RECT, np.array([1e-9]))[0]
    np.testing.assert_allclose(s_eps, [[0.5, 0.5], [0.5, -0.5]], atol=1e-8)


def _me_feasible(r, u):
    R = np.array([[1.0, r], [r, 1.0]])
    vals = np.einsum("ij,jk,ik->i", u, np.linalg.inv(R), u)
    return np.all(vals <= 1.0 + 1e-9)


def test_me_ccc_matches_grid_oracle():
    # random box data is often infeasible for the ellipse family; the fit
    # and the brute-force grid must agree on that too
    rng = np.random.Generator(np.random.Philox(key=11))
    feasible_cases = 0
    for _ in range(20):
        u = rng.uniform(-0.9, 0.9, size=(8, 2))
        grid = np.linspace(-0.999, 0.999, 1999)
        feasible = [r for r in grid if _me_feasible(r, u)]
        try:
            fitted = ccc_fit(V.ME, u)
        except InfeasibleFit:
            assert not feasible
            continue
        feasible_cases += 1
        assert feasible, "oracle found nothing but the fit succeeded"
        oracle = max(feasible, key=abs)
        assert fitted == pytest.approx(oracle, abs=2e-3)
        assert abs(fitted) >= abs(oracle) - 1e-12
    assert feasible_cases >= 3


@pytest.mark.parametrize("variant", MP_VARIANTS, ids=lambda v: v.value)
def test_mp_ccc_is_feasible_extreme(variant):
    rng = np.random.Generator(np.random.Philox(key=13))
    for _ in range(6):
        u = rng.uniform(-0.92, 0.92, size=(10, 2))
        fitted = ccc_fit(variant, u)
        assert bool(_mp_feasible(variant, np.array([fitted]), u)[0])
        if fitted != 0.0 and abs(fitted) < R_CLAMP - 1e-3:
            stepped = fitted + np.sign(fitted) * 2e-3
            assert not bool(_mp_feasible(variant, np.array([stepped]), u)[0])


def test_me_ccc_is_feasible_extreme():
    # correlated, off-corner data keeps the ellipse family feasible
    rng = np.random.Generator(np.random.Philox(key=17))
    for _ in range(6):
        z1 = rng.standard_normal(10)
        z2 = 0.7 * z1 + 0.3 * rng.standard_normal(10)
        u = np.clip(np.column_stack([z1, z2]) / 3.0, -0.85, 0.85)
        fitted = ccc_fit(V.ME, u)
        assert _me_feasible(fitted, u)
        if fitted != 0.0 and abs(fitted) < R_CLAMP - 1e-3:
            assert not _me_feasible(fitted + np.sign(fitted) * 2e-3, u)


def test_ccc_tie_breaks_with_scc_sign():
    # mirror-symmetric data: both one-sided extremes have equal magnitude,
    # the sample correlation sign decides
    u = np.array([[0.6, 0.55], [-0.6, -0.55], [0.2, 0.1], [-0.2, -0.1]])
    for variant in MP_VARIANTS:
        r_pos = ccc_fit(variant, u)
        r_neg = ccc_fit(variant, u * np.array([1.0, -1.0]))
        assert r_pos > 0
        assert r_neg < 0
        assert r_pos == pytest.approx(-r_neg, abs=1e-9)


def test_me_infeasible_raises_with_gap():
    u = np.array([[0.99, -0.99], [0.99, 0.99]])
    with pytest.raises(InfeasibleFit) as exc:
        ccc_fit(V.ME, u)
    assert exc.value.gap is not None and exc.value.gap > 0


def test_me_infeasible_relax_returns_midpoint():
    u = np.array([[0.99, -0.99], [0.99, 0.99]])
    with pytest.warns(DegenerateData):
        relaxed = ccc_fit(V.ME, u, on_infeasible="relax")
    # symmetric violation above/below zero
    assert relaxed == pytest.approx(0.0, abs=1e-9)


def test_ccc_clamp_warns():
    # a single diagonal pair supports correlation arbitrarily close to 1
    u = np.array([[0.5, 0.5], [-0.5, -0.5]])
    with pytest.warns(DegenerateData):
        fitted = ccc_fit(V.ME, u)
    assert fitted == pytest.approx(R_CLAMP)


def test_assemble_checks_pairs():
    with pytest.raises(MissingPair):
        cq.assemble_correlation_matrix([(0, 1, 0.5)], 3, "scc")
    with pytest.raises(DuplicatePair):
        cq.assemble_correlation_matrix(
            [(0, 1, 0.5), (0, 1, 0.4), (0, 2, 0.1), (1, 2, 0.2)], 3, "scc"
        )


def test_ensure_pd_strict_raises():
    bad = np.array([[1.0, 0.9, -0.9], [0.9, 1.0, 0.9], [-0.9, 0.9, 1.0]])
    R = cq.CorrelationMatrix(entries=bad, method="scc")
    assert R.lambda_min < 0
    with pytest.raises(NotPositiveDefinite):
        cq.ensure_positive_definite(R, policy="strict")


def test_ensure_pd_repair_restores():
    bad = np.array([[1.0, 0.9, -0.9], [0.9, 1.0, 0.9], [-0.9, 0.9, 1.0]])
    R = cq.CorrelationMatrix(entries=bad, method="scc")
    fixed = cq.ensure_positive_definite(R, policy="repair")
    assert fixed.lambda_min >= 1e-8 * (1 - 1e-12)
    np.testing.assert_array_equal(np.diag(fixed.entries), np.ones(3))
    assert fixed.repair is not None
    assert fixed.repair.lambda_min_before == pytest.approx(R.lambda_min)
    assert fixed.repair.max_entry_change > 0


def test_ensure_pd_leaves_good_matrix_alone():
    good = np.array([[1.0, 0.3], [0.3, 1.0]])
    R = cq.CorrelationMatrix(entries=good, method="scc")
    out = cq.ensure_positive_definite(R, policy="repair")
    assert out is R


def test_fit_matrix_scc_matches_manual(standard_u):
    R = cq.fit_correlation_matrix("scc", None, standard_u)
    for i in range(3):
        for j in range(3):
            if i == j:
                assert R.entries[i, j] == 1.0
            else:
                manual = scc(standard_u[:, i], standard_u[:, j], 0.0, 0.0)
                assert R.entries[i, j] == pytest.approx(manual)


def test_fit_matrix_ccc_uses_variant_geometry(standard_u):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateData)
        by_variant = {
            v: cq.fit_correlation_matrix("ccc", v, standard_u).entries[0, 1]
            for v in [V.ME] + MP_VARIANTS
        }
    # different enclosing geometries give genuinely different coefficients
    assert len({round(x, 6) for x in by_variant.values()}) >= 4
