import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pauliphoton.momentum_overlaps import MomentumProfile, OverlapQuad, overlap_quad
from pauliphoton.photon_state import (
    DEFAULT_RULES,
    SIGMA_MINUS,
    SIGMA_PLUS,
    DegenerateStateError,
    SelectionRuleTable,
    SelectionRuleViolation,
    TwoQubitDM,
    assemble_density_matrix,
    bell_state,
    dumps,
    loads,
    map_to_polarization,
    normalize,
)


@st.composite
def overlap_quads(draw):
    L = draw(st.floats(1e-6, 10.0))
    Lt = draw(st.floats(1e-6, 10.0))
    return OverlapQuad(L, L * draw(st.floats(0.0, 1.0)), Lt, Lt * draw(st.floats(0.0, 1.0)))


class TestAssemble:
    def test_equal_overlaps_give_bell_projector(self):
        q = OverlapQuad(0.3, 0.3, 0.5, 0.5)
        m = assemble_density_matrix(q).entries
        psi = np.array([0, 1, 1, 0])
        np.testing.assert_allclose(m, 0.15 * np.outer(psi, psi), atol=1e-15)

    def test_distinguishable_limit(self):
        m = assemble_density_matrix(OverlapQuad(1.0, 0.0, 1.0, 0.0)).entries
        np.testing.assert_array_equal(m, np.eye(4))

    def test_lorentzian_d2(self):
        q = overlap_quad(MomentumProfile.lorentzian(2.0, -1.0), MomentumProfile.lorentzian(2.0, 1.0))
        L, M = (1 / (4 * np.pi)) ** 2, (1 / (5 * np.pi)) ** 2
        dm = assemble_density_matrix(q)
        expected = np.diag([(L - M) ** 2, L * L, L * L, (L - M) ** 2])
        expected[1, 2] = expected[2, 1] = M * M
        np.testing.assert_allclose(dm.entries, expected, rtol=1e-12)
        assert dm.eigenvalues().min() >= 0

    def test_rejects_invalid_quad(self):
        with pytest.raises(ValueError):
            assemble_density_matrix(OverlapQuad(1.0, 2.0, 1.0, 0.5))


@settings(max_examples=200, deadline=None)
@given(overlap_quads())
def test_psd_hermitian_and_exchange_symmetric(q):
    dm = assemble_density_matrix(q)
    dm.check()
    swap = np.eye(4)[[0, 2, 1, 3]]
    np.testing.assert_array_equal(swap @ dm.entries @ swap, dm.entries)


class TestNormalize:
    def test_bell(self):
        dm = normalize(assemble_density_matrix(OverlapQuad(2.0, 2.0, 1.0, 1.0)))
        assert dm.normalized
        np.testing.assert_allclose(dm.entries, bell_state("spin").entries, atol=1e-15)

    def test_maximally_mixed(self):
        dm = normalize(TwoQubitDM(np.eye(4)))
        np.testing.assert_allclose(dm.entries, np.eye(4) / 4)

    def test_trace_formula(self):
        q = OverlapQuad(1.0, 0.64, 1.0, 0.64)
        raw = assemble_density_matrix(q)
        assert raw.trace == pytest.approx(2 * 0.36**2 + 2.0)
        assert normalize(raw).trace == pytest.approx(1.0, abs=1e-12)

    def test_degenerate(self):
        with pytest.raises(DegenerateStateError):
            normalize(assemble_density_matrix(OverlapQuad(0.0, 0.0, 0.0, 0.0)))


class TestPolarization:
    def test_default_table(self):
        assert DEFAULT_RULES.polarization(0, 0) == SIGMA_MINUS
        assert DEFAULT_RULES.polarization(1, 1) == SIGMA_PLUS
        assert DEFAULT_RULES.polarization(0, 1) is None
        assert DEFAULT_RULES.polarization(1, 0) is None

    def test_physical_labels(self):
        table = SelectionRuleTable.from_physical({(-0.5, -1.5): SIGMA_MINUS, (0.5, 1.5): SIGMA_PLUS})
        assert table == DEFAULT_RULES

    def test_bell_state_maps_to_photon_bell_state(self):
        photon = map_to_polarization(bell_state("spin"))
        assert photon.basis == "photon"
        np.testing.assert_allclose(photon.entries, bell_state("photon").entries)

    def test_swapped_table_permutes(self):
        q = OverlapQuad(1.0, 0.5, 2.0, 0.1)
        spin = normalize(assemble_density_matrix(q))
        swapped = map_to_polarization(spin, DEFAULT_RULES.swapped())
        perm = [3, 2, 1, 0]
        np.testing.assert_allclose(swapped.entries, spin.entries[np.ix_(perm, perm)])

    def test_forbidden_transition(self):
        spin = normalize(assemble_density_matrix(OverlapQuad(1.0, 0.5, 1.0, 0.5)))
        with pytest.raises(SelectionRuleViolation):
            map_to_polarization(spin, SelectionRuleTable({(0, 0): SIGMA_MINUS}))
        with pytest.raises(SelectionRuleViolation):
            map_to_polarization(spin, SelectionRuleTable({(0, 0): SIGMA_PLUS, (1, 1): SIGMA_PLUS}))

    def test_partial_table_ok_when_unpopulated(self):
        m = np.zeros((4, 4))
        m[0, 0] = 1.0
        out = map_to_polarization(TwoQubitDM(m), SelectionRuleTable({(0, 0): SIGMA_PLUS}))
        assert out.entries[3, 3] == 1.0

    def test_requires_spin_basis(self):
        with pytest.raises(ValueError):
            map_to_polarization(bell_state("photon"))


@settings(max_examples=100, deadline=None)
@given(overlap_quads(), st.booleans())
def test_spectrum_preserved(q, swap):
    spin = normalize(assemble_density_matrix(q))
    rules = DEFAULT_RULES.swapped() if swap else DEFAULT_RULES
    photon = map_to_polarization(spin, rules)
    np.testing.assert_allclose(photon.eigenvalues(), spin.eigenvalues(), atol=1e-15)


def test_serialization_roundtrip():
    dm = normalize(assemble_density_matrix(OverlapQuad(1.0, 0.64, 1.0, 0.64)))
    text = dumps(dm)
    back = loads(text)
    assert back.basis == "spin" and back.normalized
    np.testing.assert_array_equal(back.entries, dm.entries)
    import json

    data = json.loads(text)
    assert len(data["entries"]) == 16
    assert data["entries"][6] == [dm.entries[1, 2].real, 0.0]


def test_check_catches_bad_matrices():
    with pytest.raises(ValueError):
        TwoQubitDM(np.diag([1.0, -0.5, 0.25, 0.25])).check()
    m = np.eye(4, dtype=complex) / 4
    m[0, 1] = 0.1j
    with pytest.raises(ValueError):
        TwoQubitDM(m).check()
    with pytest.raises(ValueError):
        TwoQubitDM(np.eye(4), normalized=True).check()
    with pytest.raises(ValueError):
        TwoQubitDM(np.eye(3))
