import math
import unittest

import numpy as np

from nsc_toolkit import errors
from nsc_toolkit.spectral import grid as grid_mod


def random_field(
    grid: grid_mod.Grid, seed: int = 0
) -> grid_mod.SpectralField:
    rng = np.random.default_rng(seed)
    coeffs = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
    coeffs[~grid.nyquist_mask] = 0.0
    return grid_mod.SpectralField(grid, coeffs)


class GridTestCase(unittest.TestCase):
    def test_odd_n_rejected(self) -> None:
        with self.assertRaisesRegex(errors.ConfigurationError, 'even'):
            grid_mod.make_grid(15, 1.0)

    def test_size_limits(self) -> None:
        with self.assertRaises(errors.ConfigurationError):
            grid_mod.make_grid(2, 1.0)
        with self.assertRaises(errors.ConfigurationError):
            grid_mod.make_grid(2048, 1.0)

    def test_box_scale_must_be_positive(self) -> None:
        with self.assertRaises(errors.ConfigurationError):
            grid_mod.make_grid(8, 0.0)
        with self.assertRaises(errors.ConfigurationError):
            grid_mod.make_grid(8, math.inf)

    def test_geometry(self) -> None:
        grid = grid_mod.make_grid(8, 2.0)
        self.assertAlmostEqual(grid.spacing, math.pi / 2)
        self.assertAlmostEqual(grid.volume, (4 * math.pi) ** 3)
        self.assertEqual(grid.modes.tolist(), [0, 1, 2, 3, -4, -3, -2, -1])
        self.assertEqual(grid.xi[0][1, 0, 0], 0.5)
        self.assertEqual(grid.coordinates[0][0, 0, 0], -2 * math.pi)

    def test_lambda(self) -> None:
        grid = grid_mod.make_grid(8, 1.0)
        self.assertEqual(grid.lam[0, 0, 0], 0.0)
        self.assertEqual(grid.lam[0, 0, 1], 1.0)
        self.assertEqual(grid.lam[0, 0, -1], -1.0)
        self.assertEqual(grid.lam[1, 0, 0], 0.0)
        self.assertAlmostEqual(grid.lam[1, 0, 1], 1 / math.sqrt(2))
        self.assertTrue(np.all(np.abs(grid.lam) <= 1.0))

    def test_masks(self) -> None:
        grid = grid_mod.make_grid(12, 1.0)
        self.assertEqual(int(grid.nyquist_mask.sum()), 11**3)
        self.assertEqual(int(grid.mode_mask.sum()), 11**3 - 1)
        self.assertEqual(int(grid.dealias_mask.sum()), 7**3)
        self.assertEqual(int(grid.axis_mask.sum()), 12)
        self.assertTrue(grid.axis_mask[0, 0, 5])
        self.assertFalse(grid.axis_mask[1, 0, 0])


class SpectralFieldTestCase(unittest.TestCase):
    def test_plane_wave_coefficients(self) -> None:
        grid = grid_mod.make_grid(8, 1.5)
        x1, _x2, _x3 = grid.coordinates
        wave = np.broadcast_to(np.exp(2j * x1 / 1.5), grid.shape)
        field = grid_mod.SpectralField.from_physical(grid, wave)
        expected = np.zeros(grid.shape, dtype=np.complex128)
        expected[2, 0, 0] = 1.0
        np.testing.assert_allclose(field.coeffs, expected, atol=1e-13)

    def test_round_trip(self) -> None:
        grid = grid_mod.make_grid(8, 1.0)
        field = random_field(grid)
        again = grid_mod.SpectralField.from_physical(grid, field.physical())
        np.testing.assert_allclose(again.coeffs, field.coeffs, atol=1e-12)

    def test_parseval(self) -> None:
        grid = grid_mod.make_grid(8, 0.7)
        field = random_field(grid, seed=3)
        direct = math.sqrt(
            float(np.sum(np.abs(field.physical()) ** 2)) * grid.spacing**3
        )
        self.assertAlmostEqual(field.l2_norm() / direct, 1.0, places=12)
        self.assertAlmostEqual(
            field.inner(field).real, field.l2_norm() ** 2, delta=1e-8
        )

    def test_shape_checked(self) -> None:
        grid = grid_mod.make_grid(8, 1.0)
        with self.assertRaises(errors.ConfigurationError):
            grid_mod.SpectralField(grid, np.zeros((4, 4, 4), complex))
        with self.assertRaises(errors.ConfigurationError):
            grid_mod.VectorField(grid, np.zeros(grid.shape, complex))

    def test_arithmetic(self) -> None:
        grid = grid_mod.make_grid(8, 1.0)
        f = random_field(grid, seed=1)
        g = random_field(grid, seed=2)
        np.testing.assert_allclose(
            ((f + g) - g).coeffs, f.coeffs, atol=1e-14
        )
        np.testing.assert_allclose((2.0 * f).coeffs, 2.0 * f.coeffs)


class VectorFieldTestCase(unittest.TestCase):
    def test_components_round_trip(self) -> None:
        grid = grid_mod.make_grid(8, 1.0)
        parts = [random_field(grid, seed) for seed in range(3)]
        vector = grid_mod.VectorField.from_components(parts)
        self.assertIs(vector.component(1).grid, grid)
        np.testing.assert_array_equal(
            vector.components()[2].coeffs, parts[2].coeffs
        )
        self.assertAlmostEqual(
            vector.l2_norm() ** 2,
            sum(p.l2_norm() ** 2 for p in parts),
            delta=1e-8 * vector.l2_norm() ** 2,
        )


if __name__ == '__main__':
    unittest.main()
