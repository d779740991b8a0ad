import math
from typing import Optional, Tuple

import numpy as np
import pytest

from mdi_qpq.analysis.rates import (
    attack_bit_probabilities,
    attack_rate_qutrit,
    honest_rate_qubit,
    honest_rate_qutrit,
)
from mdi_qpq.exceptions import (
    DimensionMismatchError,
    DomainError,
    InvariantViolationError,
)
from mdi_qpq.qstate.bell import bell_basis, bsm_probability
from mdi_qpq.qstate.ensembles import (
    QUTRIT_LABELS,
    ensemble_for,
    qubit_bases,
    rotated_qutrit_basis,
)
from mdi_qpq.qstate.models import HALF_PI, ProtocolParams
from mdi_qpq.sift.export import format_probability, table_to_dict, table_to_rows
from mdi_qpq.sift.models import BobStrategy, ConclusiveVerdict, ProbabilityTable
from mdi_qpq.sift.rules import (
    conclusive_bit_masses,
    conclusive_rate_from_table,
    conclusive_sets,
    conclusive_verdict,
    joint_conclusive_rate,
)
from mdi_qpq.sift.tables import (
    honest_table,
    joint_table,
    middle_table,
    normalize_columns,
)

# Alice's states that end conclusive for each honest Bob state, qutrit rotated basis
QUTRIT_CONCLUSIVE_SETS = {
    "|0>": {"|1'>"},
    "|1>": {"|0'>", "|2'>"},
    "|2>": {"|0'>", "|1'>"},
    "|0'>": {"|1>", "|2>"},
    "|1'>": {"|0>", "|2>"},
    "|2'>": {"|1>"},
}

QUTRIT = {label: i for i, label in enumerate(QUTRIT_LABELS)}


def qutrit_honest_closed_form(gamma1: float, gamma2: float) -> np.ndarray:
    """Raw φ0 probabilities, Alice rows against Bob columns, both |0>..|2'>."""
    c1, s1 = math.cos(gamma1) ** 2, math.sin(gamma1) ** 2
    c2, s2 = math.cos(gamma2) ** 2, math.sin(gamma2) ** 2
    cross = np.array(
        [
            [c1, s1, 0.0],
            [s1 * c2, c1 * c2, s2],
            [s1 * s2, c1 * s2, c2],
        ]
    )
    return np.block([[np.eye(3), cross], [cross.T, np.eye(3)]]) / 3


def qutrit_middle_closed_form(gamma1: float, gamma2: float) -> np.ndarray:
    """Normalized φ0 probabilities, Alice |0>..|2'> against |0''>, |1''>, |2''>."""
    c1, s1 = math.cos(gamma1), math.sin(gamma1)
    ch1, sh1 = math.cos(gamma1 / 2), math.sin(gamma1 / 2)
    ch2, sh2 = math.cos(gamma2 / 2), math.sin(gamma2 / 2)
    return (
        np.array(
            [
                [ch1**2, sh1**2, 0.0],
                [sh1**2 * ch2**2, ch1**2 * ch2**2, sh2**2],
                [sh1**2 * sh2**2, ch1**2 * sh2**2, ch2**2],
                [
                    (c1 * ch1 + s1 * sh1 * ch2) ** 2,
                    (c1 * sh1 - s1 * ch1 * ch2) ** 2,
                    s1**2 * sh2**2,
                ],
                [
                    (s1 * ch1 - c1 * sh1 * ch2) ** 2,
                    (s1 * sh1 + c1 * ch1 * ch2) ** 2,
                    c1**2 * sh2**2,
                ],
                [sh1**2 * sh2**2, ch1**2 * sh2**2, ch2**2],
            ]
        )
        / 2
    )


def qubit_honest_closed_form(theta: float) -> np.ndarray:
    """ψ⁻ probabilities, Alice rows against Bob columns, |0>, |1>, |0'>, |1'>."""
    c, s = math.cos(theta) ** 2, math.sin(theta) ** 2
    return (
        np.array(
            [
                [0.0, 1.0, s, c],
                [1.0, 0.0, c, s],
                [s, c, 0.0, 1.0],
                [c, s, 1.0, 0.0],
            ]
        )
        / 2
    )


def qubit_middle_closed_form(theta: float) -> np.ndarray:
    """ψ⁻ probabilities, Alice |0>, |1>, |0'>, |1'> against |0''>, |1''>."""
    ch, sh = math.cos(theta / 2) ** 2, math.sin(theta / 2) ** 2
    return np.array([[sh, ch], [ch, sh], [sh, ch], [ch, sh]]) / 2


def literal_verdict(
    params: ProtocolParams, alice: int, announcement: int
) -> Tuple[bool, Optional[int]]:
    """Exactly one candidate reaching the target at params decides the bit."""
    ensemble = ensemble_for(params)
    bell = bell_basis(params.dim)
    reaching = [
        candidate
        for candidate in ensemble.candidates(announcement)
        if bsm_probability(
            ensemble.states[alice], ensemble.states[candidate], bell, params.target
        )
        > 1e-12
    ]
    if len(reaching) != 1:
        return False, None
    return True, ensemble.basis_of[reaching[0]]


@pytest.fixture
def table_angles() -> np.ndarray:
    """Twenty-five interior (γ1, γ2) pairs."""
    return np.random.default_rng(25).uniform(0.02, math.pi / 2 - 0.02, size=(25, 2))


class TestTables:
    def test_rotated_cell(self) -> None:
        gamma1 = 0.8
        table = honest_table(ProtocolParams.qutrit(gamma1, 0.3))
        assert table.cell("|1'>", "|0>") == pytest.approx(
            math.sin(gamma1) ** 2 / 3, abs=1e-12
        )

    def test_fourier_cell(self) -> None:
        table = honest_table(ProtocolParams.fourier())
        assert table.cell("|0'>", "|1>") == pytest.approx(1 / 9, abs=1e-12)

    def test_qubit_cells(self) -> None:
        theta = 0.9
        table = honest_table(ProtocolParams.qubit(theta))
        assert table.cell("|0>", "|1'>") == pytest.approx(
            math.cos(theta) ** 2 / 2, abs=1e-12
        )
        assert table.cell("|0>", "|0'>") == pytest.approx(
            math.sin(theta) ** 2 / 2, abs=1e-12
        )

    def test_qutrit_honest_tables_in_full(self, table_angles: np.ndarray) -> None:
        for gamma1, gamma2 in table_angles:
            params = ProtocolParams.qutrit(gamma1, gamma2)
            raw = honest_table(params)
            expected = qutrit_honest_closed_form(gamma1, gamma2)
            np.testing.assert_allclose(raw.entries, expected, atol=1e-12)
            np.testing.assert_allclose(
                normalize_columns(raw).entries, expected * 1.5, atol=1e-12
            )
            np.testing.assert_allclose(raw.column_sums, 2 / 3, atol=1e-12)

    def test_qubit_honest_tables_in_full(self, table_angles: np.ndarray) -> None:
        for theta in table_angles[:, 0]:
            table = honest_table(ProtocolParams.qubit(theta))
            np.testing.assert_allclose(
                table.entries, qubit_honest_closed_form(theta), atol=1e-12
            )

    def test_qubit_middle_tables_in_full(self, table_angles: np.ndarray) -> None:
        for theta in table_angles[:, 1]:
            table = normalize_columns(middle_table(ProtocolParams.qubit(theta)))
            assert table.col_labels == ("|0''>", "|1''>")
            np.testing.assert_allclose(
                table.entries, qubit_middle_closed_form(theta), atol=1e-12
            )

    def test_qutrit_middle_tables_in_full(self, table_angles: np.ndarray) -> None:
        for gamma1, gamma2 in table_angles:
            raw = middle_table(ProtocolParams.qutrit(gamma1, gamma2))
            np.testing.assert_allclose(raw.column_sums, 2 / 3, atol=1e-12)
            np.testing.assert_allclose(
                normalize_columns(raw).entries,
                qutrit_middle_closed_form(gamma1, gamma2),
                atol=1e-12,
            )

    def test_fourier_tables_in_full(self) -> None:
        raw = honest_table(ProtocolParams.fourier())
        rotated = np.zeros((3, 3))
        # |j'> pairs with |(-j mod 3)'>
        for j in range(3):
            rotated[j, (-j) % 3] = 1 / 3
        expected = np.block(
            [[np.eye(3) / 3, np.full((3, 3), 1 / 9)], [np.full((3, 3), 1 / 9), rotated]]
        )
        np.testing.assert_allclose(raw.entries, expected, atol=1e-12)
        np.testing.assert_allclose(
            normalize_columns(raw).entries, expected * 1.5, atol=1e-12
        )

    def test_qubit_column_sums(self) -> None:
        table = honest_table(ProtocolParams.qubit(0.4))
        np.testing.assert_allclose(table.column_sums, 1.0, atol=1e-12)

    def test_joint_table_dimension_mismatch(self) -> None:
        honest, _ = qubit_bases(0.5)
        with pytest.raises(DimensionMismatchError):
            joint_table(rotated_qutrit_basis(0.5, 0.5), honest, bell_basis(3), 0)

    def test_joint_table_matches_bsm_probability(self) -> None:
        ensemble = rotated_qutrit_basis(0.3, 1.1)
        bell = bell_basis(3)
        table = joint_table(ensemble, ensemble, bell, 0)
        assert table.row_labels == ensemble.labels
        expected = bsm_probability(ensemble.states[4], ensemble.states[2], bell, 0)
        assert table.entries[4, 2] == pytest.approx(expected, abs=1e-15)

    def test_normalize_qutrit(self) -> None:
        table = normalize_columns(honest_table(ProtocolParams.qutrit(0.5, 0.5)))
        assert table.normalized
        assert table.norm_constant == pytest.approx(2 / 3, abs=1e-12)
        assert table.cell("|0>", "|0>") == pytest.approx(0.5, abs=1e-12)
        np.testing.assert_allclose(table.column_sums, 1.0, atol=1e-12)

    def test_normalize_fourier(self) -> None:
        table = normalize_columns(honest_table(ProtocolParams.fourier()))
        values = {round(float(x), 12) for x in table.entries.flat}
        assert values == {0.0, round(1 / 6, 12), 0.5}
        assert table.cell("|0'>", "|1>") == pytest.approx(1 / 6, abs=1e-12)
        assert table.cell("|0>", "|0>") == pytest.approx(0.5, abs=1e-12)

    def test_normalize_middle(self) -> None:
        gamma1 = 1.2
        raw = middle_table(ProtocolParams.qutrit(gamma1, 0.7))
        np.testing.assert_allclose(raw.column_sums, 2 / 3, atol=1e-12)
        table = normalize_columns(raw)
        assert table.cell("|0>", "|0''>") == pytest.approx(
            math.cos(gamma1 / 2) ** 2 / 2, abs=1e-12
        )

    def test_normalize_is_idempotent(self) -> None:
        table = normalize_columns(honest_table(ProtocolParams.qutrit(0.5, 0.9)))
        assert normalize_columns(table) is table

    def test_unequal_columns(self) -> None:
        table = ProbabilityTable(
            row_labels=("a", "b"),
            col_labels=("x", "y"),
            entries=np.array([[0.5, 0.1], [0.2, 0.3]]),
        )
        with pytest.raises(InvariantViolationError):
            normalize_columns(table)

    def test_zero_columns(self) -> None:
        table = ProbabilityTable(
            row_labels=("a",), col_labels=("x",), entries=np.array([[0.0]])
        )
        with pytest.raises(InvariantViolationError):
            normalize_columns(table)

    def test_shape_mismatch(self) -> None:
        with pytest.raises(InvariantViolationError):
            ProbabilityTable(row_labels=("a",), col_labels=("x",), entries=np.eye(2))


class TestVerdicts:
    def test_rotated_examples(self, generic_qutrit: ProtocolParams) -> None:
        verdict = conclusive_verdict(QUTRIT["|1'>"], 0, generic_qutrit)
        assert verdict.conclusive and verdict.inferred_key_bit == 0
        assert verdict.excluded_candidate == "|0'>"

        verdict = conclusive_verdict(QUTRIT["|1>"], 0, generic_qutrit)
        assert verdict.conclusive and verdict.inferred_key_bit == 1
        assert verdict.excluded_candidate == "|0>"

        verdict = conclusive_verdict(QUTRIT["|2'>"], 0, generic_qutrit)
        assert not verdict.conclusive
        assert verdict.degenerate

        verdict = conclusive_verdict(QUTRIT["|0>"], 0, generic_qutrit)
        assert not verdict.conclusive
        assert not verdict.degenerate

    def test_qubit_example(self) -> None:
        verdict = conclusive_verdict(2, 0, ProtocolParams.qubit(1.0))
        assert verdict.conclusive and verdict.inferred_key_bit == 0

    def test_boundary_overlap_is_not_conclusive(
        self, corner_qutrit: ProtocolParams
    ) -> None:
        # <0|0'> vanishes at gamma1 = π/2 but not in general
        verdict = conclusive_verdict(QUTRIT["|0>"], 0, corner_qutrit)
        assert not verdict.conclusive

    def test_bad_announcement(self, generic_qutrit: ProtocolParams) -> None:
        with pytest.raises(DomainError):
            conclusive_verdict(0, 3, generic_qutrit)

    def test_bad_alice_state(self, generic_qutrit: ProtocolParams) -> None:
        with pytest.raises(DomainError):
            conclusive_verdict(6, 0, generic_qutrit)

    @pytest.mark.parametrize("target", range(9))
    def test_every_qutrit_target_reads_actual_angles(
        self, target: int, random_angle_pairs: np.ndarray
    ) -> None:
        settings = [*random_angle_pairs[:5], (math.atan(math.sqrt(2)), math.pi / 4)]
        for gamma1, gamma2 in settings:
            params = ProtocolParams.qutrit(gamma1, gamma2, target)
            for alice in range(6):
                for announcement in range(3):
                    verdict = conclusive_verdict(alice, announcement, params)
                    conclusive, bit = literal_verdict(params, alice, announcement)
                    assert verdict.conclusive == conclusive
                    assert verdict.inferred_key_bit == bit

    @pytest.mark.parametrize("target", range(4))
    def test_every_qubit_target_reads_actual_angles(self, target: int) -> None:
        thetas = [*np.random.default_rng(41).uniform(0.05, 1.52, size=5), math.pi / 4]
        for theta in thetas:
            params = ProtocolParams.qubit(theta, target)
            for alice in range(4):
                for announcement in range(2):
                    verdict = conclusive_verdict(alice, announcement, params)
                    conclusive, bit = literal_verdict(params, alice, announcement)
                    assert verdict.conclusive == conclusive
                    assert verdict.inferred_key_bit == bit

    def test_quarter_angle_qubit_with_phi_minus(self) -> None:
        # cos 2θ vanishes at π/4, so |0'> and |1'> exclude their own candidate
        params = ProtocolParams.qubit(math.pi / 4, 1)
        for alice, announcement in ((2, 0), (3, 1)):
            verdict = conclusive_verdict(alice, announcement, params)
            assert verdict.conclusive and verdict.inferred_key_bit == 0
        assert joint_conclusive_rate(params) == pytest.approx(0.25, abs=1e-12)
        assert conclusive_rate_from_table(params) == pytest.approx(0.25, abs=1e-12)

    def test_generic_qubit_with_phi_minus(self) -> None:
        theta = 0.6
        params = ProtocolParams.qubit(theta, 1)
        assert joint_conclusive_rate(params) == pytest.approx(
            math.sin(theta) ** 2 / 4, abs=1e-12
        )

    @pytest.mark.parametrize("target", range(9))
    def test_boundary_uses_interior_pattern(self, target: int) -> None:
        corner = ProtocolParams.qutrit(HALF_PI, HALF_PI, target)
        interior = ProtocolParams.qutrit(0.61, 0.97, target)
        for alice in range(6):
            for announcement in range(3):
                assert conclusive_verdict(
                    alice, announcement, corner
                ) == conclusive_verdict(alice, announcement, interior)

    def test_verdict_invariants(self) -> None:
        with pytest.raises(InvariantViolationError):
            ConclusiveVerdict(conclusive=True)
        with pytest.raises(InvariantViolationError):
            ConclusiveVerdict(conclusive=False, inferred_key_bit=1)

    def test_qutrit_sets(self, random_angle_pairs: np.ndarray) -> None:
        for gamma1, gamma2 in random_angle_pairs:
            sets = conclusive_sets(ProtocolParams.qutrit(gamma1, gamma2))
            assert sets == QUTRIT_CONCLUSIVE_SETS

    def test_qubit_sets(self) -> None:
        rng = np.random.default_rng(5)
        for theta in rng.uniform(0.05, math.pi / 2 - 0.05, size=20):
            sets = conclusive_sets(ProtocolParams.qubit(theta))
            assert sets["|0>"] == {"|0'>"}
            assert all(len(members) == 1 for members in sets.values())

    def test_fourier_sets(self) -> None:
        sets = conclusive_sets(ProtocolParams.fourier())
        assert sets["|0>"] == {"|1'>", "|2'>"}
        assert sum(len(members) for members in sets.values()) == 12

    def test_zero_probability_soundness(self, random_angle_pairs: np.ndarray) -> None:
        bell = bell_basis(3)
        for gamma1, gamma2 in random_angle_pairs:
            params = ProtocolParams.qutrit(gamma1, gamma2)
            ensemble = ensemble_for(params)
            for a, alice in enumerate(ensemble.states):
                for announcement in range(3):
                    verdict = conclusive_verdict(a, announcement, params)
                    if not verdict.conclusive:
                        continue
                    assert verdict.excluded_candidate is not None
                    excluded = ensemble.states[
                        ensemble.label_index(verdict.excluded_candidate)
                    ]
                    assert bsm_probability(alice, excluded, bell, 0) <= 1e-12


class TestRates:
    def test_qutrit_rate_matches_closed_form(self) -> None:
        rng = np.random.default_rng(3)
        for gamma1, gamma2 in rng.uniform(0.05, math.pi / 2 - 0.05, size=(50, 2)):
            params = ProtocolParams.qutrit(gamma1, gamma2)
            expected = honest_rate_qutrit(gamma1, gamma2)
            assert conclusive_rate_from_table(params) == pytest.approx(
                expected, abs=1e-12
            )
            assert joint_conclusive_rate(params) == pytest.approx(expected, abs=1e-12)

    def test_qubit_rate_matches_closed_form(self) -> None:
        for theta in (0.2, 0.7, math.pi / 4, 1.3):
            params = ProtocolParams.qubit(theta)
            assert conclusive_rate_from_table(params) == pytest.approx(
                honest_rate_qubit(theta), abs=1e-12
            )

    def test_corner_rate(self, corner_qutrit: ProtocolParams) -> None:
        assert conclusive_rate_from_table(corner_qutrit) == pytest.approx(
            0.5, abs=1e-12
        )

    def test_fourier_rate(self) -> None:
        params = ProtocolParams.fourier()
        assert conclusive_rate_from_table(params) == pytest.approx(1 / 3, abs=1e-12)
        assert joint_conclusive_rate(params) == pytest.approx(1 / 3, abs=1e-12)

    def test_middle_masses(self, random_angle_pairs: np.ndarray) -> None:
        for gamma1, gamma2 in random_angle_pairs:
            params = ProtocolParams.qutrit(gamma1, gamma2)
            masses = conclusive_bit_masses(params, BobStrategy.MIDDLE_ATTACK)
            p0, p1 = attack_bit_probabilities(gamma1, gamma2)
            assert masses[0, 0] == pytest.approx(p0, abs=1e-12)
            assert masses[0, 1] == pytest.approx(p1, abs=1e-12)
            assert conclusive_rate_from_table(
                params, BobStrategy.MIDDLE_ATTACK
            ) == pytest.approx(attack_rate_qutrit(gamma1, gamma2), abs=1e-12)

    def test_corner_middle_masses(self, corner_qutrit: ProtocolParams) -> None:
        masses = conclusive_bit_masses(corner_qutrit, BobStrategy.MIDDLE_ATTACK)
        np.testing.assert_allclose(
            masses, [[0.25, 0.375], [0.375, 0.125], [0.0, 0.5]], atol=1e-12
        )

    def test_qubit_middle_masses_tie(self) -> None:
        theta = 0.8
        masses = conclusive_bit_masses(
            ProtocolParams.qubit(theta), BobStrategy.MIDDLE_ATTACK
        )
        np.testing.assert_allclose(masses, math.cos(theta / 2) ** 2 / 2, atol=1e-12)


class TestExport:
    def test_format_probability(self) -> None:
        assert format_probability(0.5) == "0.500000000000"
        assert format_probability(1 / 6) == "0.166666666667"
        assert format_probability(1e-15) == "0.000000000000"
        assert format_probability(0.125) == "0.125000000000"

    def test_rows(self) -> None:
        table = normalize_columns(honest_table(ProtocolParams.fourier()))
        rows = table_to_rows(table)
        assert rows[0][0] == "alice\\bob"
        assert rows[0][1:] == list(table.col_labels)
        assert len(rows) == 7
        assert rows[1][1] == "0.500000000000"

    def test_dict(self) -> None:
        table = normalize_columns(honest_table(ProtocolParams.qutrit(0.5, 0.5)))
        data = table_to_dict(table)
        assert data["normalized"] is True
        assert data["norm_constant"] == "0.666666666667"
        assert data["entries"][0][0] == "0.500000000000"
