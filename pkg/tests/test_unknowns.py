import unittest

import numpy as np

from nsc_toolkit import unknowns
from nsc_toolkit.spectral import calculus, fields
from nsc_toolkit.spectral import grid as grid_mod


def off_axis_field(
    n: int = 16, box_scale: float = 1.5, seed: int = 0
) -> grid_mod.VectorField:
    grid = grid_mod.make_grid(n, box_scale)
    v = fields.windowed_random_vector(
        grid, np.random.default_rng(seed), width=0.9
    )
    projected, _removed = unknowns.project_off_axis(v)
    return projected


def swirl(grid: grid_mod.Grid) -> grid_mod.VectorField:
    x1, x2, x3 = grid.coordinates
    g = np.exp(-((np.hypot(x1, x2) - 1.5) ** 2 + x3**2))
    v = grid_mod.VectorField.from_physical(
        grid, np.stack(np.broadcast_arrays(-x2 * g, x1 * g, 0.0 * g))
    )
    return unknowns.project_off_axis(calculus.leray_project(v))[0]


class DiagonalizationTestCase(unittest.TestCase):
    def test_velocity_round_trip(self) -> None:
        v = off_axis_field()
        state = grid_mod.VelocityState(v, t=0.7, kappa=0.0)
        profiles = unknowns.profiles_from_velocity(state)
        back = unknowns.velocity_from_profiles(profiles)
        np.testing.assert_allclose(
            back.velocity.coeffs,
            v.coeffs,
            atol=1e-12 * float(np.max(np.abs(v.coeffs))),
        )
        self.assertEqual(back.t, 0.7)

    def test_round_trip_with_reversed_coupling(self) -> None:
        v = off_axis_field(seed=3)
        state = grid_mod.VelocityState(v, t=2.0)
        profiles = unknowns.profiles_from_velocity(state, -1)
        back = unknowns.velocity_from_profiles(profiles, -1)
        np.testing.assert_allclose(
            back.velocity.coeffs,
            v.coeffs,
            atol=1e-12 * float(np.max(np.abs(v.coeffs))),
        )

    def test_u_pm_inverse(self) -> None:
        v = off_axis_field(seed=1)
        pair = unknowns.to_dispersive(grid_mod.VelocityState(v))
        plus, minus = unknowns.u_pm(pair)
        again = unknowns.from_u_pm(plus, minus)
        np.testing.assert_allclose(again.a.coeffs, pair.a.coeffs)
        np.testing.assert_allclose(again.c.coeffs, pair.c.coeffs)

    def test_energy_is_shared_by_the_unknowns(self) -> None:
        """|A|^2 + |C|^2 = |u|^2 for divergence-free u off the axis."""
        v = off_axis_field(seed=2)
        pair = unknowns.to_dispersive(grid_mod.VelocityState(v))
        self.assertAlmostEqual(
            (pair.a.l2_norm() ** 2 + pair.c.l2_norm() ** 2)
            / v.l2_norm() ** 2,
            1.0,
            places=12,
        )

    def test_axis_mass_warning(self) -> None:
        grid = grid_mod.make_grid(8, 1.0)
        coeffs = np.zeros((3, *grid.shape), dtype=np.complex128)
        coeffs[0, 0, 0, 1] = 1.0
        v = grid_mod.VectorField(grid, coeffs)
        self.assertEqual(unknowns.axis_mass_fraction(v), 1.0)
        with self.assertLogs('nsc_toolkit.unknowns', 'WARNING'):
            unknowns.to_dispersive(grid_mod.VelocityState(v))

    def test_project_off_axis(self) -> None:
        grid = grid_mod.make_grid(8, 1.0)
        coeffs = np.zeros((3, *grid.shape), dtype=np.complex128)
        coeffs[0, 0, 0, 1] = 2.0
        coeffs[2, 1, 0, 0] = 1.0
        projected, removed = unknowns.project_off_axis(
            grid_mod.VectorField(grid, coeffs)
        )
        self.assertAlmostEqual(removed, 4.0 * grid.volume)
        self.assertFalse(np.any(projected.coeffs[0]))
        self.assertEqual(projected.coeffs[2, 1, 0, 0], 1.0)


class ProfileTestCase(unittest.TestCase):
    def test_wind_and_unwind(self) -> None:
        grid = grid_mod.make_grid(8, 1.0)
        f = fields.gaussian(grid, 0.7)
        wound = unknowns.wind_profile(f, 3.0, -1)
        back = unknowns.wind_profile(wound, 3.0, -1, 'to_unknown')
        np.testing.assert_allclose(back.coeffs, f.coeffs, atol=1e-15)

    def test_linear_flow_is_coriolis(self) -> None:
        """Frozen profiles give du/dt = -P(e_3 x u)."""
        v = off_axis_field(seed=4)
        profiles = unknowns.profiles_from_velocity(
            grid_mod.VelocityState(v, t=0.5)
        )
        h = 1e-4

        def velocity_at(t: float) -> grid_mod.VectorField:
            moved = unknowns.ProfilePair(
                profiles.u_plus, profiles.u_minus, t=t
            )
            return unknowns.velocity_from_profiles(moved).velocity

        derivative = (velocity_at(0.5 + h) - velocity_at(0.5 - h)) * (
            0.5 / h
        )
        expected = calculus.leray_project(calculus.coriolis(v)) * -1.0
        np.testing.assert_allclose(
            derivative.coeffs,
            expected.coeffs,
            atol=1e-6 * float(np.max(np.abs(expected.coeffs))),
        )


class NonlinearityTestCase(unittest.TestCase):
    def test_matches_projected_advection(self) -> None:
        v = off_axis_field(n=16, seed=5)
        state = grid_mod.VelocityState(v)
        n_a, n_c = unknowns.nonlinearity_ac(state)
        forcing = unknowns.nonlinearity_leray(state)
        off_axis, _removed = unknowns.project_off_axis(forcing)
        pair = unknowns.to_dispersive(grid_mod.VelocityState(off_axis))
        scale = float(np.max(np.abs(n_a.coeffs)))
        np.testing.assert_allclose(
            n_a.coeffs, pair.a.coeffs, atol=1e-10 * scale
        )
        np.testing.assert_allclose(
            n_c.coeffs, pair.c.coeffs, atol=1e-10 * scale
        )

    def test_dropped_axis_forcing(self) -> None:
        grid = grid_mod.make_grid(16, 2.0)
        ring = swirl(grid)
        _a, _c, dropped = unknowns.nonlinearity_ac_with_axis(
            grid_mod.VelocityState(ring)
        )
        self.assertLess(dropped, 1e-12 * ring.l2_norm() ** 2)
        generic = off_axis_field(seed=6)
        _a, _c, dropped = unknowns.nonlinearity_ac_with_axis(
            grid_mod.VelocityState(generic)
        )
        self.assertGreater(dropped, 0.0)

    def test_products_are_symmetric(self) -> None:
        v = off_axis_field(n=8, seed=7)
        products = unknowns.quadratic_products(v)
        self.assertIs(products[0, 2], products[2, 0])
        self.assertEqual(len({id(p) for p in products.values()}), 6)


if __name__ == '__main__':
    unittest.main()
