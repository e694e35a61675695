import csv
import pathlib
import tempfile
import unittest
from fractions import Fraction

import numpy as np

from nsc_toolkit import energy, errors, models
from nsc_toolkit.spectral import fields
from nsc_toolkit.spectral import grid as grid_mod


def row(*values: int) -> list[Fraction]:
    return [Fraction(v) for v in values]


class CoefficientTestCase(unittest.TestCase):
    def test_c_rows(self) -> None:
        table = energy.coeff_table('c', 3)
        self.assertEqual(table.row(0), row(1))
        self.assertEqual(table.row(1), row(3, 1))
        self.assertEqual(table.row(2), row(18, 2, 1))
        self.assertEqual(table.row(3), row(108, 18, -3, 1))
        self.assertEqual(table.n_max, 3)

    def test_expansion_orders_agree(self) -> None:
        for n in range(1, 8):
            for k in range(n):
                self.assertEqual(
                    energy.c_polynomial(n, k, 'left'),
                    energy.c_polynomial(n, k, 'right'),
                )

    def test_d_keeps_negative_part(self) -> None:
        self.assertEqual(energy.coeff_table('d', 3).row(3), row(0, 0, -3, 1))

    def test_a_is_nonnegative_with_unit_diagonal(self) -> None:
        for family in ('a', 'a_prime'):
            table = energy.coeff_table(family, energy.MAX_ORDER)
            for (n, k), value in table.entries.items():
                self.assertGreaterEqual(value, 0)
                if n == k:
                    self.assertEqual(value, 1)
        self.assertEqual(energy.a_coeff(3, 2), 3)

    def test_c_prime_rows(self) -> None:
        self.assertEqual(energy.derive_cprime(1), tuple(row(5, 1)))
        self.assertEqual(energy.derive_cprime(2), tuple(row(50, 6, 1)))
        for n in range(energy.MAX_ORDER + 1):
            self.assertEqual(energy.c_prime_coeff(n, n), 1)

    def test_operator_rules_reproduce_c(self) -> None:
        for n in range(energy.MAX_ORDER + 1):
            self.assertEqual(
                list(energy.energy_form_coefficients(n)),
                energy.coeff_table('c', n).row(n),
            )

    def test_index_validation(self) -> None:
        with self.assertRaises(errors.DomainError):
            energy.c_coeff(energy.MAX_ORDER + 1, 0)
        with self.assertRaises(errors.DomainError):
            energy.a_coeff(2, 3)
        with self.assertRaises(errors.DomainError):
            energy.c_polynomial(2, 2)

    def test_reconcile_reports_only_mismatches(self) -> None:
        for n, k, written, swapped in energy.reconcile_a_prime(6):
            self.assertNotEqual(written, swapped)
            self.assertLess(k, n)

    def test_tables_csv(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = pathlib.Path(tmp) / 'coefficients.csv'
            energy.write_tables_csv(
                path, [energy.coeff_table(f, 2) for f in energy.FAMILIES]
            )
            with path.open(encoding='utf-8') as handle:
                rows = list(csv.reader(handle))
        self.assertEqual(
            rows[0], ['family', 'n', 'k', 'numerator', 'denominator']
        )
        self.assertIn(['c', '1', '0', '3', '1'], rows)
        self.assertIn(['c_prime', '2', '0', '50', '1'], rows)
        self.assertEqual(len(rows), 1 + 6 * len(energy.FAMILIES))


class IdentityTestCase(unittest.TestCase):
    def setUp(self) -> None:
        grid = grid_mod.make_grid(32, 2.0)
        self.u = fields.windowed_random_vector(
            grid, np.random.default_rng(4), width=0.9
        )

    def test_integration_by_parts(self) -> None:
        report = energy.verify_energy_identity(0, self.u)
        self.assertLess(report.relative_defect, 1e-10)

    def test_first_and_second_order(self) -> None:
        self.assertLess(
            energy.verify_energy_identity(1, self.u).relative_defect, 1e-6
        )
        self.assertLess(
            energy.verify_energy_identity(2, self.u).relative_defect, 1e-5
        )

    def test_c_prime_identity(self) -> None:
        for n in range(3):
            report = energy.verify_cprime(n, self.u)
            self.assertLess(report.relative_defect, 1e-6)

    def test_order_limit(self) -> None:
        with self.assertRaises(errors.DomainError):
            energy.verify_energy_identity(
                energy.MAX_IDENTITY_ORDER + 1, self.u
            )


def decaying_series(kappa: float, grow: bool = False) -> models.TimeSeries:
    """Energy rows of a single heat-damped mode with |xi| = 1."""
    times = np.linspace(0.0, 10.0 if grow else 1.0, 201)
    if grow:
        l2 = 1.0 + times**2
    else:
        l2 = np.exp(-2.0 * kappa * times)
    rows = np.stack(
        [times, l2, l2, np.ones_like(times), 2.0 * l2, 2.0 * l2], axis=1
    )
    return models.TimeSeries(kappa=kappa, dt=0.005, energy=rows.tolist())


class BalanceTestCase(unittest.TestCase):
    def test_exact_balance(self) -> None:
        report = energy.energy_balance_report(decaying_series(0.1))
        self.assertEqual(report.m, 0)
        self.assertEqual(len(report.defects), 201)
        self.assertLess(report.max_defect, 1e-8)
        self.assertIsNone(report.constant)

    def test_higher_order_constant(self) -> None:
        report = energy.energy_balance_report(decaying_series(0.1), m=1)
        assert report.constant is not None
        self.assertLess(abs(report.constant), 1e-8)

    def test_growth_warning(self) -> None:
        with self.assertLogs('nsc_toolkit.energy', 'WARNING'):
            report = energy.energy_balance_report(
                decaying_series(0.0, grow=True)
            )
        assert report.growth_exponent is not None
        self.assertAlmostEqual(report.growth_exponent, 1.0, places=6)

    def test_invalid_input(self) -> None:
        with self.assertRaises(errors.DomainError):
            energy.energy_balance_report(
                models.TimeSeries(kappa=0.1, dt=0.01)
            )
        with self.assertRaises(errors.DomainError):
            energy.energy_balance_report(decaying_series(0.1), m=2)


if __name__ == '__main__':
    unittest.main()
