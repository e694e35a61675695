import unittest

import numpy as np
import pydantic

from nsc_toolkit import errors
from nsc_toolkit.resonance import multipliers


class MultiplierSpecTestCase(unittest.TestCase):
    def test_angle_factor_needs_other_vector(self) -> None:
        with self.assertRaises(pydantic.ValidationError):
            multipliers.Factor(kind='cos', vector='xi')

    def test_cutoff_needs_lambda(self) -> None:
        with self.assertRaises(pydantic.ValidationError):
            multipliers.MultiplierSpec(cutoff='res')

    def test_signs_validated(self) -> None:
        with self.assertRaises(pydantic.ValidationError):
            multipliers.MultiplierSpec(signs=(1, 2, 1))


class EvaluateTestCase(unittest.TestCase):
    def setUp(self) -> None:
        rng = np.random.default_rng(8)
        self.xi = rng.standard_normal((40, 3))
        self.eta = rng.standard_normal((40, 3))

    def test_norm_factor(self) -> None:
        spec = multipliers.MultiplierSpec(coefficient=2.0)
        np.testing.assert_allclose(
            multipliers.evaluate(spec, self.xi, self.eta),
            2.0 * np.linalg.norm(self.xi, axis=1),
        )

    def test_angle_factors(self) -> None:
        kinds: tuple[multipliers.FactorKind, ...] = ('cos', 'sin')
        total = np.zeros(len(self.xi))
        for kind in kinds:
            factor = multipliers.Factor(kind=kind, vector='eta', power=2)
            spec = multipliers.MultiplierSpec(
                factors=(factor,), norm_factor=False
            )
            total += multipliers.evaluate(spec, self.xi, self.eta)
        np.testing.assert_allclose(total, 1.0)

    def test_lambda_and_horizontal(self) -> None:
        factors = (
            multipliers.Factor(kind='lambda', vector='xi_minus_eta', power=2),
            multipliers.Factor(
                kind='horizontal', vector='xi_minus_eta', power=0
            ),
        )
        spec = multipliers.MultiplierSpec(factors=factors, norm_factor=False)
        zeta = self.xi - self.eta
        np.testing.assert_allclose(
            multipliers.evaluate(spec, self.xi, self.eta),
            (zeta[:, 2] / np.linalg.norm(zeta, axis=1)) ** 2,
        )

    def test_split_adds_up(self) -> None:
        spec = multipliers.MultiplierSpec(signs=(1, -1, 1))
        res, nr = multipliers.res_nr_split(spec, 0.25)
        np.testing.assert_allclose(
            multipliers.evaluate(res, self.xi, self.eta)
            + multipliers.evaluate(nr, self.xi, self.eta),
            multipliers.evaluate(spec, self.xi, self.eta),
        )

    def test_split_validation(self) -> None:
        spec = multipliers.MultiplierSpec()
        with self.assertRaises(errors.DomainError):
            multipliers.res_nr_split(spec, 0.0)
        res, _nr = multipliers.res_nr_split(spec, 1.0)
        with self.assertRaises(errors.DomainError):
            multipliers.res_nr_split(res, 1.0)


if __name__ == '__main__':
    unittest.main()
