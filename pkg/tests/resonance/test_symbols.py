import math
import unittest

import numpy as np

from nsc_toolkit import errors, settings
from nsc_toolkit.resonance import symbols


class DispersionTestCase(unittest.TestCase):
    def test_lambda(self) -> None:
        self.assertEqual(float(symbols.lam([0.0, 0.0, 2.0])), 1.0)
        self.assertEqual(float(symbols.lam([3.0, 0.0, 0.0])), 0.0)
        np.testing.assert_allclose(
            symbols.lam([[1.0, 0.0, 1.0], [0.0, 1.0, -1.0]]),
            [1 / math.sqrt(2), -1 / math.sqrt(2)],
        )

    def test_zero_frequency_rejected(self) -> None:
        with self.assertRaises(errors.DomainError):
            symbols.lam([0.0, 0.0, 0.0])
        with self.assertRaises(errors.DomainError):
            symbols.lam([1.0, 2.0])

    def test_gradient_matches_differences(self) -> None:
        xi = np.array([0.3, -1.2, 0.7])
        h = 1e-6
        numeric = [
            (
                symbols.lam(xi + h * np.eye(3)[i])
                - symbols.lam(xi - h * np.eye(3)[i])
            )
            / (2 * h)
            for i in range(3)
        ]
        np.testing.assert_allclose(
            symbols.grad_lambda(xi), numeric, rtol=1e-7, atol=1e-10
        )


class PhaseTestCase(unittest.TestCase):
    def setUp(self) -> None:
        rng = np.random.default_rng(2)
        self.xi = rng.standard_normal((50, 3))
        self.eta = rng.standard_normal((50, 3))
        self.signs = rng.choice([-1, 1], size=(50, 3))

    def test_phi_sums_three_lambdas(self) -> None:
        sample = symbols.make_sample([1.0, 0.0, 1.0], [0.0, 1.0, 0.0])
        expected = sum(sample.lambdas)
        self.assertAlmostEqual(sample.phi, expected)
        flipped = symbols.phi(sample.xi, sample.eta, (-1, 1, 1))
        self.assertAlmostEqual(
            float(flipped), expected - 2 * sample.lambdas[0]
        )

    def test_sigma_is_horizontal_cross_product(self) -> None:
        sigma = symbols.sigma_bar(self.xi, self.eta)
        cross = np.cross(self.xi, self.eta)[:, :2]
        np.testing.assert_allclose(
            np.linalg.norm(sigma, axis=1), np.linalg.norm(cross, axis=1)
        )

    def test_derivatives_match_differences(self) -> None:
        exact = symbols.phase_derivatives(self.xi, self.eta, self.signs)
        numeric = symbols.phase_derivatives_fd(
            self.xi, self.eta, self.signs
        )
        for name in ('scaling', 'rotation', 'vertical'):
            np.testing.assert_allclose(
                getattr(exact, name),
                getattr(numeric, name),
                rtol=1e-5,
                atol=1e-7,
            )

    def test_denominators(self) -> None:
        plain = symbols.normal_form_denominator(
            self.xi, self.eta, self.signs, 0.0
        )
        np.testing.assert_allclose(
            plain, 1j * symbols.phi(self.xi, self.eta, self.signs)
        )
        polarized = symbols.polarized_denominator(
            self.xi, self.eta, self.signs, 0.5
        )
        np.testing.assert_allclose(
            polarized.real,
            np.sum((self.xi - self.eta) * self.eta, axis=1),
        )
        with self.assertRaises(errors.DomainError):
            symbols.normal_form_denominator(
                self.xi, self.eta, self.signs, 0.1, a=-1
            )

    def test_viscous_denominator_real_part(self) -> None:
        xi, eta = np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])
        value = symbols.normal_form_denominator(
            xi, eta, (1, 1, 1), 0.1, a=1, b=0
        )
        # |xi|^2 - 3 |eta|^2 - |xi - eta|^2 = 1 - 3 - 2
        self.assertAlmostEqual(float(value.real), -0.4)


class SampleTestCase(unittest.TestCase):
    def test_make_sample_validation(self) -> None:
        with self.assertRaises(errors.DomainError):
            symbols.make_sample([1.0, 0.0, 0.0], [1.0, 0.0, 0.0])
        with self.assertRaises(errors.DomainError):
            symbols.make_sample(
                [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], (1, 0, 1)
            )

    def test_indices(self) -> None:
        settings.reset_settings(
            settings.Configuration.model_validate(
                {'localization': {'p_min': -10, 'q_min': -10}}
            )
        )
        try:
            sample = symbols.make_sample([0.0, 0.0, 4.0], [1.0, 0.0, 0.0])
            (k, p, q), _zeta, (k2, p2, q2) = sample.indices()
            self.assertEqual((k, p, q), (2, -10, 0))
            self.assertEqual((k2, p2, q2), (0, 0, -10))
        finally:
            settings.reset_settings()


if __name__ == '__main__':
    unittest.main()
