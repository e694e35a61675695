import math
import unittest

import numpy as np

from nsc_toolkit.spectral import calculus, fields
from nsc_toolkit.spectral import grid as grid_mod


class FieldsTestCase(unittest.TestCase):
    def test_gaussian_norm(self) -> None:
        grid = grid_mod.make_grid(16, 2.0)
        g = fields.gaussian(grid, 1.0)
        # |exp(-r^2/2)|_2^2 = pi^(3/2)
        self.assertAlmostEqual(g.l2_norm(), math.pi**0.75, places=5)
        self.assertLess(float(np.max(np.abs(g.physical().imag))), 1e-12)

    def test_random_scalar_is_seeded(self) -> None:
        grid = grid_mod.make_grid(8, 1.0)
        first = fields.windowed_random_scalar(
            grid, np.random.default_rng(4)
        )
        second = fields.windowed_random_scalar(
            grid, np.random.default_rng(4)
        )
        np.testing.assert_array_equal(first.coeffs, second.coeffs)

    def test_random_vector_is_divergence_free(self) -> None:
        grid = grid_mod.make_grid(16, 1.5)
        v = fields.windowed_random_vector(grid, np.random.default_rng(9))
        self.assertGreater(v.l2_norm(), 0.0)
        self.assertLess(calculus.divergence_residual(v), 1e-13)


if __name__ == '__main__':
    unittest.main()
