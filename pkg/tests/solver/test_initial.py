import unittest

from nsc_toolkit import errors, unknowns
from nsc_toolkit.solver import initial
from nsc_toolkit.spectral import calculus
from nsc_toolkit.spectral import grid as grid_mod

PARAMS = {'radius': 1.5, 'width': 0.7}


class InitAxisymmetricTestCase(unittest.TestCase):
    def setUp(self) -> None:
        self.grid = grid_mod.make_grid(16, 2.0)

    def test_amplitude_is_epsilon(self) -> None:
        for family in ('gaussian_swirl_ring', 'poloidal_vortex'):
            state = initial.init_axisymmetric(
                family, 0.05, PARAMS, self.grid, kappa=0.01
            )
            self.assertAlmostEqual(
                initial.profile_amplitude(state), 0.05, places=10
            )
            self.assertEqual(state.kappa, 0.01)

    def test_divergence_free_and_off_axis(self) -> None:
        state = initial.init_axisymmetric(
            'poloidal_vortex',
            0.1,
            {**PARAMS, 'swirl': 0.5},
            self.grid,
        )
        self.assertLess(
            calculus.divergence_residual(state.velocity), 1e-10
        )
        self.assertEqual(unknowns.axis_mass_fraction(state.velocity), 0.0)

    def test_zero_epsilon(self) -> None:
        state = initial.init_axisymmetric(
            'gaussian_swirl_ring', 0.0, None, self.grid
        )
        self.assertEqual(state.velocity.l2_norm(), 0.0)

    def test_invalid_input(self) -> None:
        with self.assertRaises(errors.ConfigurationError):
            initial.init_axisymmetric('hill_vortex', 0.1, None, self.grid)
        with self.assertRaises(errors.ConfigurationError):
            initial.init_axisymmetric(
                'gaussian_swirl_ring', 0.1, {'height': 1.0}, self.grid
            )
        with self.assertRaises(errors.ConfigurationError):
            initial.init_axisymmetric(
                'gaussian_swirl_ring', -0.1, None, self.grid
            )


if __name__ == '__main__':
    unittest.main()
