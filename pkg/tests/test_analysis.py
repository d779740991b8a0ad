import math

import numpy as np
import pytest

from mdi_qpq.analysis.models import SCAN_COLUMNS, THETA_SCAN_COLUMNS, GridAxis
from mdi_qpq.analysis.rates import (
    attack_bit_probabilities,
    attack_bit_probabilities_qubit,
    attack_rate_qubit,
    attack_rate_qutrit,
    detection_power,
    expected_attack_qber,
    expected_attack_qber_overall,
    fourier_rate,
    honest_rate_qubit,
    honest_rate_qutrit,
    qubit_fourier_reference,
    region_membership,
    region_predicates,
)
from mdi_qpq.analysis.scan import (
    default_axis,
    grid_scan,
    security_summary,
    theta_scan,
)
from mdi_qpq.exceptions import DomainError, ValidationError
from mdi_qpq.qstate.models import HALF_PI, ProtocolParams


@pytest.fixture(scope="module")
def open_grid() -> tuple[np.ndarray, np.ndarray]:
    values = default_axis().values()
    g1, g2 = np.meshgrid(values, values, indexing="ij")
    return g1, g2


class TestHonestRates:
    def test_qutrit_examples(self) -> None:
        assert honest_rate_qutrit(HALF_PI, HALF_PI) == pytest.approx(0.5, abs=1e-12)
        assert honest_rate_qutrit(math.pi / 3, math.pi / 6) == pytest.approx(
            0.3020833333333, abs=1e-12
        )
        assert honest_rate_qutrit(0.0, 0.0) == 0.0

    def test_qubit_examples(self) -> None:
        assert honest_rate_qubit(math.pi / 4) == pytest.approx(0.25, abs=1e-12)
        assert honest_rate_qubit(HALF_PI) == pytest.approx(0.5, abs=1e-12)

    def test_vectorized(self, open_grid: tuple[np.ndarray, np.ndarray]) -> None:
        g1, g2 = open_grid
        rates = honest_rate_qutrit(g1, g2)
        assert isinstance(rates, np.ndarray)
        assert rates.shape == (65, 65)
        assert float(rates[10, 20]) == pytest.approx(
            honest_rate_qutrit(float(g1[10, 20]), float(g2[10, 20])), abs=1e-15
        )

    def test_out_of_range(self) -> None:
        with pytest.raises(DomainError):
            honest_rate_qutrit(2.0, 0.5)
        with pytest.raises(DomainError):
            honest_rate_qubit(-0.1)


class TestRegions:
    def test_examples(self) -> None:
        assert region_membership(math.pi / 3, math.pi / 6) == (True, False)
        assert region_membership(math.pi / 6, math.pi / 3) == (False, True)

    def test_diagonal_is_in_neither(self) -> None:
        for gamma in np.linspace(0.05, HALF_PI - 0.05, 30):
            assert region_membership(gamma, gamma) == (False, False)

    def test_membership_matches_rate_comparison(
        self, open_grid: tuple[np.ndarray, np.ndarray]
    ) -> None:
        g1, g2 = open_grid
        in_r1, in_r2 = region_membership(g1, g2)
        r1, r2 = region_predicates(g1, g2)
        p = honest_rate_qutrit(g1, g2)
        decided = np.abs(r1) > 1e-12
        np.testing.assert_array_equal(
            in_r1[decided], (p < honest_rate_qubit(g1))[decided]
        )
        decided = np.abs(r2) > 1e-12
        np.testing.assert_array_equal(
            in_r2[decided], (p < honest_rate_qubit(g2))[decided]
        )


class TestAttackRates:
    def test_corner(self) -> None:
        assert attack_rate_qutrit(HALF_PI, HALF_PI) == pytest.approx(
            13 / 24, abs=1e-12
        )
        p0, p1 = attack_bit_probabilities(HALF_PI, HALF_PI)
        assert p0 == pytest.approx(0.25, abs=1e-12)
        assert p1 == pytest.approx(0.375, abs=1e-12)
        assert expected_attack_qber(HALF_PI, HALF_PI) == pytest.approx(0.4, abs=1e-12)

    def test_p0_below_p1_on_open_square(
        self, open_grid: tuple[np.ndarray, np.ndarray]
    ) -> None:
        p0, p1 = attack_bit_probabilities(*open_grid)
        assert np.all(np.asarray(p0) < np.asarray(p1))

    def test_tie_when_gamma2_vanishes(self) -> None:
        for gamma1 in np.linspace(0.0, HALF_PI, 11):
            p0, p1 = attack_bit_probabilities(gamma1, 0.0)
            assert p0 == pytest.approx(p1, abs=1e-12)

    def test_attack_beats_honest(
        self, open_grid: tuple[np.ndarray, np.ndarray]
    ) -> None:
        g1, g2 = open_grid
        assert np.all(
            np.asarray(attack_rate_qutrit(g1, g2))
            > np.asarray(honest_rate_qutrit(g1, g2))
        )

    def test_qubit(self) -> None:
        assert attack_rate_qubit(HALF_PI) == pytest.approx(0.5, abs=1e-12)
        assert attack_rate_qubit(0.0) == pytest.approx(1.0, abs=1e-12)
        thetas = np.linspace(0.01, HALF_PI - 0.01, 200)
        assert np.all(
            np.asarray(attack_rate_qubit(thetas))
            > np.asarray(honest_rate_qubit(thetas))
        )
        p0, p1 = attack_bit_probabilities_qubit(math.pi / 4)
        assert p0 == p1 == pytest.approx(math.cos(math.pi / 8) ** 2 / 2, abs=1e-12)

    def test_pooled_qber(self) -> None:
        corner = ProtocolParams.qutrit(HALF_PI, HALF_PI)
        assert expected_attack_qber_overall(corner) == pytest.approx(
            3 / 13, abs=1e-12
        )
        assert expected_attack_qber_overall(
            ProtocolParams.qubit(math.pi / 4)
        ) == pytest.approx(0.5, abs=1e-12)

    def test_fourier(self) -> None:
        assert fourier_rate() == pytest.approx(1 / 3, abs=1e-12)
        assert qubit_fourier_reference() == pytest.approx(0.25, abs=1e-12)
        assert fourier_rate() > qubit_fourier_reference()


class TestDetectionPower:
    def test_strong_attack(self) -> None:
        assert detection_power(3 / 13, 0.2, 3000) > 0.99

    def test_declared_instance(self) -> None:
        assert detection_power(0.4, 0.25, 1000) > 0.999

    def test_noiseless(self) -> None:
        assert detection_power(0.0, 0.05, 150) == 0.0
        assert detection_power(0.0, 0.0, 150) == 1.0

    def test_monotone_in_qber(self) -> None:
        powers = [detection_power(q, 0.2, 200) for q in (0.1, 0.2, 0.3)]
        assert powers == sorted(powers)

    def test_invalid(self) -> None:
        with pytest.raises(DomainError):
            detection_power(0.2, 0.1, 0)
        with pytest.raises(DomainError):
            detection_power(1.2, 0.1, 10)


class TestGridAxis:
    def test_default_is_open(self) -> None:
        values = default_axis().values()
        assert values.size == 65
        assert values[0] > 0 and values[-1] < HALF_PI
        np.testing.assert_allclose(np.diff(values), HALF_PI / 66)

    def test_closed_axis(self) -> None:
        values = GridAxis(0.0, 1.0, 0.25, open_interval=False).values()
        np.testing.assert_allclose(values, [0.0, 0.25, 0.5, 0.75, 1.0])

    def test_invalid(self) -> None:
        with pytest.raises(ValidationError):
            GridAxis(0.0, 1.0, 0.0).values()
        with pytest.raises(ValidationError):
            GridAxis(1.0, 0.5, 0.1).values()


class TestGridScan:
    def test_default_scan(self) -> None:
        scan = grid_scan()
        assert scan.columns == SCAN_COLUMNS
        assert scan.shape == (65, 65)
        rows = scan.rows()
        assert len(rows) == 65 * 65
        p_column = SCAN_COLUMNS.index("p")
        mid_column = SCAN_COLUMNS.index("p_c_mid")
        assert all(row[mid_column] > row[p_column] for row in rows)

    def test_selected_columns_keep_order(self) -> None:
        scan = grid_scan(quantities=["p0", "gamma1", "p"])
        assert scan.columns == ("gamma1", "p", "p0")

    def test_unknown_column(self) -> None:
        with pytest.raises(ValidationError):
            grid_scan(quantities=["nope"])

    def test_range_outside_square(self) -> None:
        with pytest.raises(ValidationError):
            grid_scan(GridAxis(0.0, 2.0, 0.1))

    def test_empty_grid(self) -> None:
        with pytest.raises(ValidationError):
            grid_scan(GridAxis(0.0, 0.01, 0.02))


class TestSecuritySummary:
    def test_corner(self) -> None:
        summary = security_summary(HALF_PI, HALF_PI)
        assert summary.honest_conclusive_rate == pytest.approx(0.5, abs=1e-12)
        assert summary.attack_conclusive_rate == pytest.approx(13 / 24, abs=1e-12)
        assert (summary.p0, summary.p1) == pytest.approx((0.25, 0.375), abs=1e-12)
        assert summary.expected_attack_qber == pytest.approx(0.4, abs=1e-12)
        assert summary.expected_attack_qber_overall == pytest.approx(
            3 / 13, abs=1e-12
        )

    def test_to_dict(self) -> None:
        data = security_summary(math.pi / 3, math.pi / 6).to_dict()
        assert data["params"]["dim"] == 3
        assert data["params"]["ensemble_kind"] == "rotated"
        assert data["in_r1"] is True
        assert data["in_r2"] is False


class TestThetaScan:
    def test_default_sweep(self) -> None:
        scan = theta_scan()
        assert scan.columns == THETA_SCAN_COLUMNS
        assert len(scan) == 65
        theta = scan.values["theta"]
        assert theta[0] > 0 and theta[-1] < HALF_PI
        assert np.all(scan.values["p_c_mid_qubit"] > scan.values["p_prime"])
        np.testing.assert_allclose(scan.values["p0"], scan.values["p1"], atol=1e-15)
        np.testing.assert_allclose(scan.values["qber_expected"], 0.5, atol=1e-12)

    def test_endpoints_and_quarter_angle(self) -> None:
        scan = theta_scan(GridAxis(0.0, HALF_PI, math.pi / 8, open_interval=False))
        np.testing.assert_allclose(scan.values["theta"], np.arange(5) * math.pi / 8)
        p_prime = scan.values["p_prime"]
        p_mid = scan.values["p_c_mid_qubit"]
        assert (p_prime[0], p_mid[0]) == pytest.approx((0.0, 1.0), abs=1e-12)
        assert (p_prime[-1], p_mid[-1]) == pytest.approx((0.5, 0.5), abs=1e-12)
        assert p_prime[2] == pytest.approx(0.25, abs=1e-12)
        assert p_mid[2] == pytest.approx((2 + math.sqrt(2)) / 4, abs=1e-12)
        assert scan.values["p0"][2] == pytest.approx(
            (2 + math.sqrt(2)) / 8, abs=1e-12
        )

    def test_rows_follow_columns(self) -> None:
        scan = theta_scan(quantities=["p_prime", "theta"])
        assert scan.columns == ("theta", "p_prime")
        first = scan.rows()[0]
        assert first[1] == pytest.approx(math.sin(first[0]) ** 2 / 2, abs=1e-15)

    def test_invalid(self) -> None:
        with pytest.raises(ValidationError):
            theta_scan(quantities=["gamma1"])
        with pytest.raises(ValidationError):
            theta_scan(GridAxis(0.0, 2.0, 0.1))
