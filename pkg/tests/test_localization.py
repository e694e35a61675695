import math
import unittest

import numpy as np

from nsc_toolkit import errors, localization, models, settings
from nsc_toolkit.spectral import fields
from nsc_toolkit.spectral import grid as grid_mod


def coarse_settings() -> settings.Configuration:
    return settings.Configuration.model_validate(
        {'localization': {'p_min': -6, 'q_min': -6, 'legendre_degree': 32}}
    )


def axial_dipole(grid: grid_mod.Grid) -> grid_mod.SpectralField:
    """x_3 exp(-r^2 / 2): degree one in Lambda on every shell."""
    _x1, _x2, x3 = grid.coordinates
    return grid_mod.SpectralField.from_physical(
        grid, x3 * np.exp(-(grid.radius**2) / 2.0)
    )


def zonal_profile(
    grid: grid_mod.Grid, degree: int, centre: float = 2.0
) -> grid_mod.SpectralField:
    """L_degree(Lambda) times a shell bump at |xi| = centre."""
    table = localization.legendre_table(degree, grid.lam)
    coeffs = (table[degree] * np.exp(-((grid.xi_norm - centre) ** 2))).astype(
        np.complex128
    )
    coeffs[~grid.mode_mask] = 0.0
    return grid_mod.SpectralField(grid, coeffs)


class CutoffTestCase(unittest.TestCase):
    def test_psi(self) -> None:
        self.assertEqual(localization.psi(0.5), 1.0)
        self.assertEqual(localization.psi(-1.0), 1.0)
        self.assertEqual(localization.psi(2.5), 0.0)
        self.assertAlmostEqual(localization.psi(1.5), math.exp(-1 / 3))

    def test_varphi_support(self) -> None:
        x = np.array([0.25, 0.5, 1.0, 2.0, 3.0])
        np.testing.assert_array_equal(
            localization.varphi(x) > 0, [False, False, True, False, False]
        )

    def test_littlewood_paley_partition(self) -> None:
        grid = grid_mod.make_grid(16, 1.3)
        total = sum(
            localization.shell_weight(grid, k)
            for k in localization.shell_range(grid)
        )
        np.testing.assert_allclose(
            np.asarray(total)[grid.mode_mask], 1.0, atol=1e-12
        )


class AnisotropyTestCase(unittest.TestCase):
    def setUp(self) -> None:
        settings.reset_settings(coarse_settings())

    def tearDown(self) -> None:
        settings.reset_settings()

    def test_index_values(self) -> None:
        self.assertEqual(
            localization.index_values(-3), [models.FLOOR, -2, -1, 0]
        )

    def test_partition_off_origin(self) -> None:
        grid = grid_mod.make_grid(12, 1.0)
        total = localization.anisotropy_partition(grid)
        np.testing.assert_allclose(
            total[grid.mode_mask], 1.0, atol=1e-12
        )

    def test_cells_partition_every_mode(self) -> None:
        grid = grid_mod.make_grid(8, 1.0)
        total = np.zeros(grid.n**3)
        for _cell, support, weights in localization.enumerate_cells(grid):
            np.add.at(total, support, weights)
        np.testing.assert_allclose(
            total[grid.mode_mask.ravel()], 1.0, atol=1e-12
        )

    def test_cells_in_report_order(self) -> None:
        grid = grid_mod.make_grid(8, 1.0)
        cells = [c for c, _s, _w in localization.enumerate_cells(grid)]
        keys = [c.sort_key() for c in cells]
        self.assertEqual(keys, sorted(keys))

    def test_index_below_floor_rejected(self) -> None:
        grid = grid_mod.make_grid(8, 1.0)
        with self.assertRaises(errors.DomainError):
            localization.p_weight(grid, -6)
        with self.assertRaises(errors.DomainError):
            localization.q_weight(grid, 1)

    def test_apply_pkpq_matches_cell_weight(self) -> None:
        grid = grid_mod.make_grid(8, 1.0)
        f = fields.gaussian(grid, 1.0)
        cell = models.CellIndex(k=0, p=0, q=models.FLOOR)
        np.testing.assert_allclose(
            localization.apply_pkpq(f, 0, 0, models.FLOOR).coeffs,
            f.coeffs * localization.cell_weight(grid, cell),
        )


class LegendreTestCase(unittest.TestCase):
    def test_table(self) -> None:
        x = np.linspace(-1.0, 1.0, 7)
        table = localization.legendre_table(3, x)
        np.testing.assert_allclose(table[2], (3 * x**2 - 1) / 2)
        np.testing.assert_allclose(table[3], (5 * x**3 - 3 * x) / 2)

    def test_argument_range(self) -> None:
        with self.assertRaises(errors.DomainError):
            localization.legendre_table(2, [1.5])

    def test_zonal_kernel(self) -> None:
        self.assertAlmostEqual(
            localization.legendre_zonal(0, 0.3), 1 / (4 * math.pi)
        )
        with self.assertRaises(errors.DomainError):
            localization.legendre_zonal(-1, 0.0)


class AngularProjectorTestCase(unittest.TestCase):
    def setUp(self) -> None:
        settings.reset_settings(coarse_settings())
        self.grid = grid_mod.make_grid(16, 2.0)

    def tearDown(self) -> None:
        settings.reset_settings()

    def test_radial_field_is_degree_zero(self) -> None:
        f = fields.gaussian(self.grid, 1.0)
        low = localization.apply_rl(f, 0, variant='leq')
        np.testing.assert_allclose(low.coeffs, f.coeffs, atol=1e-10)
        high = localization.apply_rl(f, 2, variant='exact')
        self.assertLess(high.l2_norm(), 1e-8 * f.l2_norm())

    def test_angular_gradient_of_dipole(self) -> None:
        f = axial_dipole(self.grid)
        self.assertAlmostEqual(
            localization.angular_gradient_norm(f) / f.l2_norm(),
            math.sqrt(2.0),
            places=6,
        )

    def test_partition_sums_to_field(self) -> None:
        f = axial_dipole(self.grid) + fields.gaussian(self.grid, 0.8)
        pieces = localization.angular_partition(f, 3)
        self.assertEqual(len(pieces), 4)
        total = pieces[0]
        for piece in pieces[1:]:
            total = total + piece
        np.testing.assert_allclose(total.coeffs, f.coeffs, atol=1e-10)

    def test_far_bands_annihilate(self) -> None:
        _x1, _x2, x3 = self.grid.coordinates
        f = grid_mod.SpectralField.from_physical(
            self.grid, x3**2 * np.exp(-(self.grid.radius**2) / 2.0)
        )
        band = localization.apply_rl(f, 1)
        self.assertGreater(band.l2_norm(), 1e-3 * f.l2_norm())
        far = localization.apply_rl(band, 5)
        self.assertLessEqual(far.l2_norm(), 1e-8 * band.l2_norm())

    def test_lambda_profile_bands(self) -> None:
        f = zonal_profile(self.grid, 1)
        np.testing.assert_allclose(
            localization.apply_rl(f, 0).coeffs,
            f.coeffs,
            atol=1e-10 * np.abs(f.coeffs).max(),
        )
        self.assertLess(
            localization.apply_rl(f, 2).l2_norm(), 1e-8 * f.l2_norm()
        )

    def test_degree_four_lands_in_band_two(self) -> None:
        f = zonal_profile(self.grid, 4)
        size = f.l2_norm()
        band = localization.apply_rl(f, 2)
        self.assertLess((band - f).l2_norm(), 0.2 * size)
        for l in (1, 3):  # noqa: E741
            self.assertLess(
                localization.apply_rl(f, l).l2_norm(), 0.2 * size
            )

    def test_partition_reconstructs_high_degrees(self) -> None:
        f = (
            zonal_profile(self.grid, 4)
            + zonal_profile(self.grid, 6, centre=2.5) * 0.5
            + fields.gaussian(self.grid, 0.8)
        )
        pieces = localization.angular_partition(f, 6)
        total = pieces[0]
        for piece in pieces[1:]:
            total = total + piece
        np.testing.assert_allclose(
            total.coeffs, f.coeffs, atol=1e-10 * np.abs(f.coeffs).max()
        )

    def test_bands_four_apart_annihilate(self) -> None:
        rng = np.random.default_rng(5)
        f = grid_mod.SpectralField.zeros(self.grid)
        for degree in range(9):
            f = f + zonal_profile(
                self.grid, degree, centre=rng.uniform(1.5, 3.0)
            ) * rng.standard_normal()
        transform = localization.angular_transform(f)
        for l in range(3):  # noqa: E741
            band = localization.apply_rl(f, l, transform=transform)
            if band.l2_norm() == 0.0:
                continue
            far = localization.apply_rl(band, l + 4)
            self.assertLessEqual(far.l2_norm(), 1e-8 * band.l2_norm())

    def test_signed_variant_by_sign_of_p_plus_l(self) -> None:
        f = axial_dipole(self.grid)
        empty = localization.apply_rl(f, 1, p=-3, variant='signed')
        self.assertFalse(np.any(empty.coeffs))
        boundary = localization.apply_rl(f, 1, p=-1, variant='signed')
        leq = localization.apply_rl(f, 1, variant='leq')
        np.testing.assert_allclose(boundary.coeffs, leq.coeffs)
        with self.assertRaises(errors.DomainError):
            localization.apply_rl(f, 1, variant='signed')

    def test_non_axisymmetric_rejected(self) -> None:
        x1, _x2, _x3 = self.grid.coordinates
        f = grid_mod.SpectralField.from_physical(
            self.grid, x1 * np.exp(-(self.grid.radius**2) / 2.0)
        )
        with self.assertRaises(errors.NotAxisymmetricError) as context:
            localization.angular_transform(f)
        self.assertGreater(context.exception.variation, 0.0)


if __name__ == '__main__':
    unittest.main()
