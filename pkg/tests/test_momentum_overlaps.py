import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pauliphoton.momentum_overlaps import (
    MomentumProfile,
    ProfileRangeError,
    closed_form_L,
    closed_form_M,
    compute_L,
    compute_M,
    cross_overlap,
    overlap_quad,
    parse_profile,
    profile_eval,
)

lorentz = MomentumProfile.lorentzian
gauss = MomentumProfile.gaussian


def pair(delta, d, family=lorentz):
    return family(delta, -d / 2), family(delta, d / 2)


class TestProfileEval:
    def test_lorentzian_peak(self):
        assert profile_eval(lorentz(2.0), 0.0) == pytest.approx(1 / (2 * math.pi), rel=1e-15)
        assert 1 / (2 * math.pi) == pytest.approx(0.159155, abs=5e-7)

    @pytest.mark.parametrize("center", [0.0, 3.5, -7.0])
    def test_lorentzian_half_width(self, center):
        p = lorentz(2.0, center)
        peak = profile_eval(p, center)
        assert profile_eval(p, center + 2.0) == pytest.approx(peak / 2)
        assert profile_eval(p, center - 2.0) == pytest.approx(peak / 2)

    def test_gaussian_peak(self):
        assert profile_eval(gauss(1.0, 0.3), 0.3) == pytest.approx(0.398942, abs=5e-7)

    @pytest.mark.parametrize("p", [lorentz(0.7, 1.0), lorentz(6.0), gauss(0.5, -2.0), gauss(3.0)])
    def test_unit_mass(self, p):
        from scipy.integrate import quad

        mass = quad(lambda x: profile_eval(p, x), -np.inf, np.inf, epsabs=1e-12)[0]
        assert mass == pytest.approx(1.0, abs=1e-9)

    def test_vectorized(self):
        x = np.linspace(-5, 5, 11)
        p = lorentz(2.0, 1.0)
        np.testing.assert_allclose(profile_eval(p, x), [profile_eval(p, v) for v in x])

    def test_tabulated_out_of_range(self):
        u = np.linspace(-10, 10, 201)
        p = MomentumProfile.tabulated(np.column_stack([u, profile_eval(lorentz(2.0), u)]))
        assert profile_eval(p, 0.0) == pytest.approx(1 / (2 * math.pi), rel=1e-6)
        with pytest.raises(ProfileRangeError):
            profile_eval(p, 10.5)

    def test_bad_width(self):
        with pytest.raises(ValueError):
            lorentz(0.0)
        with pytest.raises(ValueError):
            gauss(-1.0)


class TestOverlaps:
    def test_L_lorentzian_delta2(self):
        a, b = pair(2.0, 0.0)
        expected = (1 / (4 * math.pi)) ** 2
        assert expected == pytest.approx(6.3326e-3, rel=1e-4)
        assert compute_L(a, b) == pytest.approx(expected, rel=1e-14)
        assert compute_L(a, b, method="quad") == pytest.approx(expected, rel=1e-8)

    def test_L_center_independent(self):
        assert compute_L(lorentz(2.0, 0.0), lorentz(2.0, 7.0), "quad") == pytest.approx(
            compute_L(lorentz(2.0, 0.0), lorentz(2.0, 0.0), "quad"), rel=1e-9
        )

    def test_L_gaussian(self):
        expected = (1 / (2 * math.sqrt(math.pi))) ** 2
        assert expected == pytest.approx(7.9577e-2, rel=1e-4)
        assert compute_L(gauss(1.0), gauss(1.0), "quad") == pytest.approx(expected, rel=1e-8)

    def test_M_identity_case(self):
        for p in (lorentz(3.0, 1.2), gauss(0.4, -1.0)):
            assert compute_M(p, p, "quad") == pytest.approx(compute_L(p, p, "quad"), rel=1e-9)

    def test_M_lorentzian_d2(self):
        a, b = pair(2.0, 2.0)
        expected = (1 / (5 * math.pi)) ** 2
        assert expected == pytest.approx(4.0528e-3, rel=1e-4)
        assert compute_M(a, b, "quad") == pytest.approx(expected, rel=1e-8)
        assert compute_M(a, b) / compute_L(a, b) == pytest.approx(0.64, rel=1e-12)

    def test_M_scale_invariance_example(self):
        a, b = pair(4.0, 4.0)
        assert compute_M(a, b, "quad") / compute_L(a, b, "quad") == pytest.approx(0.64, rel=1e-8)

    def test_gaussian_cross_closed_form_vs_quad(self):
        a, b = gauss(1.0, 0.0), gauss(1.5, 2.0)
        assert cross_overlap(a, b, "quad") == pytest.approx(cross_overlap(a, b), rel=1e-8)

    def test_unequal_lorentzian_widths(self):
        a, b = lorentz(1.0, 0.0), lorentz(3.0, 2.5)
        assert compute_M(a, b, "quad") == pytest.approx(closed_form_M(a, b), rel=1e-8)
        assert compute_L(a, b, "quad") == pytest.approx(closed_form_L(a, b), rel=1e-8)

    def test_bad_method(self):
        with pytest.raises(ValueError):
            compute_L(lorentz(1.0), lorentz(1.0), method="simpson")


@settings(max_examples=60, deadline=None)
@given(
    delta=st.floats(0.1, 20.0),
    ratio=st.floats(0.0, 10.0),
    family=st.sampled_from([lorentz, gauss]),
)
def test_quadrature_matches_closed_form(delta, ratio, family):
    a, b = pair(delta, ratio * delta, family)
    assert compute_L(a, b, "quad") == pytest.approx(compute_L(a, b), rel=1e-6)
    m_closed = compute_M(a, b)
    if family is gauss and m_closed < 1e-30:
        return  # exp(-d^2/4s^2) underflows relative accuracy far out
    assert compute_M(a, b, "quad") == pytest.approx(m_closed, rel=1e-6)


@settings(max_examples=100, deadline=None)
@given(
    delta=st.floats(0.05, 50.0),
    d=st.floats(0.0, 100.0),
    shift=st.floats(-50.0, 50.0),
    family=st.sampled_from([lorentz, gauss]),
)
def test_cauchy_schwarz_and_translation(delta, d, shift, family):
    a, b = family(delta, shift), family(delta, shift + d)
    L, M = compute_L(a, b), compute_M(a, b)
    assert 0 <= M <= L * (1 + 1e-12)
    a0, b0 = pair(delta, d, family)
    assert compute_M(a0, b0) == pytest.approx(M, rel=1e-9, abs=1e-300)
    if d == 0:
        assert M == pytest.approx(L, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(delta=st.floats(0.05, 20.0), d=st.floats(0.0, 50.0), lam=st.floats(0.01, 100.0))
def test_lorentzian_ratio_scale_invariant(delta, d, lam):
    a, b = pair(delta, d)
    a2, b2 = pair(lam * delta, lam * d)
    r1 = compute_M(a, b) / compute_L(a, b)
    r2 = compute_M(a2, b2) / compute_L(a2, b2)
    assert abs(r1 - r2) <= 1e-10


class TestOverlapQuad:
    def test_mirror_symmetry(self):
        q = overlap_quad(*pair(2.0, 3.0))
        assert q.Ltilde == pytest.approx(q.L, rel=1e-15)
        assert q.Mtilde == pytest.approx(q.M, rel=1e-15)

    def test_d0_all_equal(self):
        q = overlap_quad(*pair(2.0, 0.0))
        expected = 1 / (4 * math.pi) ** 2
        for v in (q.L, q.M, q.Ltilde, q.Mtilde):
            assert v == pytest.approx(expected, rel=1e-14)

    def test_unequal_hole_width(self):
        a, b = pair(2.0, 2.0)
        q = overlap_quad(a, b, lorentz(4.0, 1.0), lorentz(4.0, -1.0))
        assert q.Mtilde / q.Ltilde == pytest.approx((64 / (4 + 64)) ** 2)
        assert q.M / q.L == pytest.approx(0.64)

    def test_tabulated_matches_lorentzian(self):
        u = np.linspace(-400, 400, 16001)
        table = np.column_stack([u, profile_eval(lorentz(2.0), u)])
        tab = MomentumProfile.tabulated(table)
        for d in (0.0, 2.0, 5.0):
            qt = overlap_quad(tab.shifted(-d / 2), tab.shifted(d / 2))
            ql = overlap_quad(*pair(2.0, d))
            for name in ("L", "M", "Ltilde", "Mtilde"):
                assert getattr(qt, name) == pytest.approx(getattr(ql, name), rel=1e-4)

    def test_validate_rejects_M_above_L(self):
        from pauliphoton.momentum_overlaps import OverlapQuad

        with pytest.raises(ValueError):
            OverlapQuad(1.0, 1.5, 1.0, 0.5).validate()


class TestParseProfile:
    def test_grammar(self, tmp_path):
        assert parse_profile("lorentzian:delta=2") == lorentz(2.0)
        assert parse_profile("gaussian:sigma=1.5", center=1.0) == gauss(1.5, 1.0)
        assert parse_profile("lorentzian", width=4) == lorentz(4.0)
        u = np.linspace(-5, 5, 51)
        path = tmp_path / "f.txt"
        np.savetxt(path, np.column_stack([u, np.exp(-u * u)]))
        p = parse_profile(f"table:path={path}")
        assert p.family == "tabulated"
        assert profile_eval(p, 0.0) == pytest.approx(1.0)

    @pytest.mark.parametrize("text", ["lorentzian", "cauchy:delta=1", "gaussian:sigma", "table:x=1"])
    def test_bad_grammar(self, text):
        with pytest.raises(ValueError):
            parse_profile(text)
