import math

import numpy as np
import pytest

from noonsim.fock import ModeMismatchError, ModeRegistry, PureState
from noonsim.optics import (
    Circuit,
    ModeUnitary,
    beamsplitter,
    bs_coupler,
    embed,
    hwp,
    pbs,
    phase_element,
    phase_plate,
    polarization_element,
    qwp,
    random_polarization_rotation,
)
from noonsim.heralding import DetectionPattern, detect, fidelity
from noonsim.pdc import pair_registry, singlet_term

from oracles import dense_lift

POL_REG = ModeRegistry(["a_h", "a_v"])


def jones_element(jones):
    return polarization_element(POL_REG, "a", jones)


def up_to_phase(s1: PureState, s2: PureState, tol=1e-12) -> bool:
    overlap = s2.inner(s1)
    return abs(abs(overlap) - s1.norm * s2.norm) <= tol


# --- waveplate conventions -----------------------------------------------------------


def test_hwp45_swaps_h_and_v():
    state = jones_element(hwp(math.pi / 4)).apply(PureState.basis(POL_REG, (1, 0)))
    assert up_to_phase(state, PureState.basis(POL_REG, (0, 1)))


def test_hwp0_is_diagonal():
    m = hwp(0.0)
    assert abs(m[0, 1]) == 0 and abs(m[1, 0]) == 0


def test_hwp225_maps_hv_to_pm():
    state = jones_element(hwp(math.pi / 8)).apply(PureState.basis(POL_REG, (1, 0)))
    assert state.amplitude((1, 0)) == pytest.approx(1 / math.sqrt(2))
    assert state.amplitude((0, 1)) == pytest.approx(1 / math.sqrt(2))


def test_qwp0_is_diagonal_phase():
    m = qwp(0.0)
    assert abs(m[0, 1]) == 0 and abs(m[1, 0]) == 0
    assert m[1, 1] == pytest.approx(1j)


def test_two_quarter_waves_make_a_half_wave():
    twice = qwp(math.pi / 4) @ qwp(math.pi / 4)
    ratio = twice @ np.linalg.inv(hwp(math.pi / 4))
    # proportional to the identity
    assert abs(ratio[0, 0] - ratio[1, 1]) < 1e-12
    assert abs(ratio[0, 1]) < 1e-12 and abs(ratio[1, 0]) < 1e-12


@pytest.mark.parametrize("angle", np.linspace(0, math.pi, 7))
def test_waveplates_are_unitary(angle):
    for kernel in (hwp(angle), qwp(angle), phase_plate(angle)):
        dev = np.abs(kernel @ kernel.conj().T - np.eye(2)).max()
        assert dev < 1e-12


# --- beam splitters and PBS ----------------------------------------------------------


def test_bs_zero_reflectivity_is_identity():
    assert np.allclose(bs_coupler(0.0), np.eye(2))


def test_bs_hom_null():
    reg = ModeRegistry(["c1_h", "c2_h"])
    state = PureState.basis(reg, (1, 1))
    out = beamsplitter(reg, "c1", "c2", 0.5).apply(state)
    assert abs(out.amplitude((1, 1))) < 1e-12
    outcome = detect(out, DetectionPattern.of({"c1_h": 1, "c2_h": 1}))
    assert outcome.probability <= 1e-12


def test_bs_invalid_reflectivity():
    with pytest.raises(ValueError):
        bs_coupler(1.5)


def test_pbs_routes_h_straight():
    reg = ModeRegistry(["c1_h", "c1_v", "c2_h", "c2_v"])
    unitary = pbs(reg, "c1", "c2")
    one_h = PureState.basis(reg, tuple(1 if str(m) == "c1_h" else 0 for m in reg))
    assert unitary.apply(one_h).isclose(one_h)


def test_pbs_reflects_v():
    reg = ModeRegistry(["c1_h", "c1_v", "c2_h", "c2_v"])
    unitary = pbs(reg, "c1", "c2")
    occ_in = tuple(1 if str(m) == "c1_v" else 0 for m in reg)
    occ_out = tuple(1 if str(m) == "c2_v" else 0 for m in reg)
    assert unitary.apply(PureState.basis(reg, occ_in)).isclose(PureState.basis(reg, occ_out))


def test_pbs_splits_h_plus_v():
    reg = ModeRegistry(["c1_h", "c1_v", "c2_h", "c2_v"])
    unitary = pbs(reg, "c1", "c2")
    occ_in = tuple(1 if str(m) in ("c1_h", "c1_v") else 0 for m in reg)
    out = unitary.apply(PureState.basis(reg, occ_in))
    occ_out = tuple(1 if str(m) in ("c1_h", "c2_v") else 0 for m in reg)
    assert out.isclose(PureState.basis(reg, occ_out))


# --- phase plates ------------------------------------------------------------------------


def test_phase_plate_zero_is_identity():
    assert np.allclose(phase_plate(0.0), np.eye(2))


def test_phase_plate_pi_flips_v():
    state = jones_element(phase_plate(math.pi)).apply(PureState.basis(POL_REG, (0, 1)))
    assert state.amplitude((0, 1)) == pytest.approx(-1.0)


def test_phase_plate_advances_noon_phase_doubly():
    theta = 0.37
    noon = PureState(POL_REG, {(2, 0): 1 / math.sqrt(2), (0, 2): 1 / math.sqrt(2)})
    shifted = phase_element(POL_REG, "a", theta).apply(noon)
    ratio = shifted.amplitude((0, 2)) / shifted.amplitude((2, 0))
    assert ratio == pytest.approx(np.exp(2j * theta))


# --- embedding ----------------------------------------------------------------------------


def test_embed_identity_kernel():
    reg = pair_registry()
    unitary = embed(reg, ["a_h", "a_v"], np.eye(2, dtype=complex))
    assert np.allclose(unitary.matrix, np.eye(4))


def test_embed_leaves_other_modes_alone():
    state = singlet_term(1)
    rotated = polarization_element(state.registry, "b", hwp(math.pi / 4)).apply(state)
    # path-a amplitudes survive unchanged in magnitude
    dist = rotated.number_distribution(["a_h"])
    assert dist[0] == pytest.approx(0.5) and dist[1] == pytest.approx(0.5)


def test_embed_rejects_duplicate_targets():
    with pytest.raises(ModeMismatchError):
        embed(POL_REG, ["a_h", "a_h"], np.eye(2, dtype=complex))


def test_nonunitary_matrix_rejected():
    with pytest.raises(ValueError):
        ModeUnitary(POL_REG, np.array([[1.0, 0.0], [0.0, 2.0]], dtype=complex))


# --- the Fock-space lift -------------------------------------------------------------------


def test_lift_matches_permanent_oracle(rng):
    reg = ModeRegistry(["c1_h", "c1_v", "c2_h"])
    for _ in range(8):
        z = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        q, r = np.linalg.qr(z)
        matrix = q * (np.diag(r) / np.abs(np.diag(r)))
        unitary = ModeUnitary(reg, matrix)
        terms = {
            (2, 1, 0): 0.5 + 0.1j,
            (0, 1, 2): -0.3,
            (1, 1, 1): 0.2j,
        }
        mine = unitary.apply(PureState(reg, terms))
        want = dense_lift(matrix, terms)
        for occ, amp in want.items():
            assert mine.amplitude(occ) == pytest.approx(amp, abs=1e-10)
        assert len(mine.terms) == len(want)


def test_lift_is_homomorphism(rng):
    for _ in range(10):
        u = ModeUnitary(POL_REG, random_polarization_rotation(rng))
        v = ModeUnitary(POL_REG, random_polarization_rotation(rng))
        state = PureState(POL_REG, {(3, 1): 0.6, (1, 1): 0.4j, (0, 4): -0.2})
        chained = u.apply(v.apply(state))
        direct = (u @ v).apply(state)
        assert chained.isclose(direct, tol=1e-10)


def test_lift_preserves_norm_and_photon_number(rng):
    state = PureState(POL_REG, {(2, 0): 0.5, (1, 1): 0.5j, (0, 2): -0.5, (0, 0): 0.5}).normalized()
    for _ in range(6):
        u = ModeUnitary(POL_REG, random_polarization_rotation(rng))
        out = u.apply(state)
        assert abs(out.norm - 1.0) < 1e-12
        assert out.number_distribution() == pytest.approx(state.number_distribution(), abs=1e-12)


def test_identity_unitary_is_identity():
    state = PureState(POL_REG, {(2, 1): 1.0}).normalized()
    unitary = ModeUnitary(POL_REG, np.eye(2, dtype=complex))
    assert unitary.apply(state).isclose(state)


def test_joint_rotation_leaves_singlets_invariant(rng):
    for n in (1, 2, 3):
        state = singlet_term(n)
        for _ in range(5):
            jones = random_polarization_rotation(rng)
            rotated = polarization_element(state.registry, "a", jones).apply(state)
            rotated = polarization_element(state.registry, "b", jones).apply(rotated)
            assert fidelity(rotated, state) == pytest.approx(1.0, abs=1e-10)


# --- circuits ----------------------------------------------------------------------------


def test_circuit_json_roundtrip_and_apply():
    reg = ModeRegistry(["c1_h", "c1_v", "c2_h", "c2_v"])
    spec = [
        {"kind": "pbs", "targets": ["c1", "c2"]},
        {"kind": "hwp", "angle_deg": 45.0, "targets": ["c2"]},
        {"kind": "bs", "r": 0.5, "targets": ["c1", "c2"]},
    ]
    circuit = Circuit.from_json(spec)
    assert Circuit.from_json(circuit.to_json()) == circuit
    occ_in = tuple(1 if str(m) in ("c1_h", "c1_v") else 0 for m in reg)
    out = circuit.apply(PureState.basis(reg, occ_in))
    manual = pbs(reg, "c1", "c2").apply(PureState.basis(reg, occ_in))
    manual = polarization_element(reg, "c2", hwp(math.pi / 4)).apply(manual)
    manual = beamsplitter(reg, "c1", "c2", 0.5).apply(manual)
    assert out.isclose(manual, tol=1e-12)


def test_circuit_elements_apply_in_order():
    spec_ab = [
        {"kind": "hwp", "angle_deg": 22.5, "targets": ["a"]},
        {"kind": "qwp", "angle_deg": 45.0, "targets": ["a"]},
    ]
    spec_ba = list(reversed(spec_ab))
    state = PureState.basis(POL_REG, (1, 0))
    out_ab = Circuit.from_json(spec_ab).apply(state)
    out_ba = Circuit.from_json(spec_ba).apply(state)
    assert not out_ab.isclose(out_ba, tol=1e-6)


def test_circuit_hwp_accepts_explicit_mode_targets():
    spec = [{"kind": "hwp", "angle_deg": 45.0, "targets": ["a_h", "a_v"]}]
    out = Circuit.from_json(spec).apply(PureState.basis(POL_REG, (1, 0)))
    assert up_to_phase(out, PureState.basis(POL_REG, (0, 1)))
