import unittest
from unittest import mock

import numpy as np

from nsc_toolkit import energy, errors, helpers, unknowns
from nsc_toolkit.solver import initial, integrator
from nsc_toolkit.spectral import checkpoint
from nsc_toolkit.spectral import grid as grid_mod
from tests import RunTestCase


class DyadicWindowTestCase(unittest.TestCase):
    def test_windows(self) -> None:
        self.assertEqual(integrator.dyadic_window(3.0), ([1, 2], 3))
        self.assertEqual(integrator.dyadic_window(0.0), ([], 1))
        windows, count = integrator.dyadic_window(100.0)
        self.assertEqual(windows, [6, 7])
        self.assertEqual(count, 7)

    def test_negative_time(self) -> None:
        with self.assertRaises(errors.DomainError):
            integrator.dyadic_window(-1.0)


class LinearRunTestCase(RunTestCase):
    def test_inviscid_linear_flow_keeps_energy(self) -> None:
        config = self.config(kappa=0.0, nonlinear=False, t_end=1.0, dt=0.1)
        result = integrator.run(config)
        norms = [record.l2 for record in result.series.records]
        np.testing.assert_allclose(norms, norms[0], rtol=1e-12)
        self.assertEqual(result.series.records[-1].t, result.final.t)
        self.assertAlmostEqual(result.final.t, 1.0)
        self.assertTrue((self.output_dir / 'final.nsck').exists())

    def test_heat_flow_balance(self) -> None:
        config = self.config(kappa=0.1, nonlinear=False, t_end=1.0, dt=0.1)
        result = integrator.run(config, write_final=False)
        report = energy.energy_balance_report(result.series)
        self.assertLess(report.max_defect, 1e-4)
        self.assertEqual(len(result.series.energy), 11)
        self.assertFalse((self.output_dir / 'final.nsck').exists())


class NonlinearRunTestCase(RunTestCase):
    def test_short_run(self) -> None:
        seen: list[float] = []
        config = self.config(checkpoint_every=2)
        result = integrator.run(
            config, observer=lambda _step, p: seen.append(p.t)
        )
        records = result.series.records
        self.assertEqual([r.step for r in records], [0, 1, 2, 3, 4])
        self.assertEqual(seen, [r.t for r in records])
        self.assertEqual(result.series.dt, 0.05)
        for record in records:
            self.assertLess(record.divergence_residual, 1e-9)
        self.assertEqual(
            [path.name for path in result.checkpoints],
            ['checkpoint-000002.nsck', 'checkpoint-000004.nsck', 'final.nsck'],
        )
        stored = checkpoint.load(result.checkpoints[-1])
        self.assertAlmostEqual(stored.t, result.final.t)
        self.assertAlmostEqual(stored.velocity.l2_norm(), records[-1].l2)

    def test_norm_cadence(self) -> None:
        result = integrator.run(
            self.config(t_end=0.1, norms_every=2), write_final=False
        )
        first, second, third = result.series.records
        self.assertIsNotNone(first.b_plus)
        self.assertIsNone(second.b_plus)
        self.assertIsNotNone(third.x_minus)

    def test_step_preserves_profile_time(self) -> None:
        state = initial.init_axisymmetric(
            'gaussian_swirl_ring',
            0.05,
            {'radius': 1.5, 'width': 0.7},
            grid_mod.make_grid(16, 2.0),
            kappa=0.01,
        )
        profiles = unknowns.profiles_from_velocity(state)
        stepper = integrator.Integrator(kappa=0.01)
        advanced = stepper.step(profiles, 0.05)
        self.assertAlmostEqual(advanced.t, 0.05)
        self.assertEqual(advanced.kappa, 0.01)
        self.assertGreater(stepper.stable_dt(profiles), 0.0)

    def test_abort_writes_last_good_state(self) -> None:
        config = self.config()
        with mock.patch.object(
            integrator.Integrator,
            'advance',
            side_effect=lambda grid, t, v, h: v * np.nan,
        ):
            with self.assertRaises(errors.NumericalAbort) as context:
                integrator.run(config)
        path = self.output_dir / 'last-good.nsck'
        self.assertEqual(context.exception.checkpoint, path)
        stored = checkpoint.load(path).velocity.coeffs
        self.assertTrue(np.all(np.isfinite(stored)))


class IntegratorOrderTestCase(unittest.TestCase):
    def setUp(self) -> None:
        state = initial.init_axisymmetric(
            'gaussian_swirl_ring',
            1.0,
            {'radius': 1.5, 'width': 0.7},
            grid_mod.make_grid(16, 2.0),
            kappa=0.01,
        )
        self.profiles = unknowns.profiles_from_velocity(state)
        self.stepper = integrator.Integrator(kappa=0.01)

    def test_step_doubling_is_fourth_order(self) -> None:
        steps = [0.2, 0.1, 0.05]
        defects = []
        for h in steps:
            whole = self.stepper.step(self.profiles, h)
            halves = self.stepper.step(
                self.stepper.step(self.profiles, h / 2), h / 2
            )
            defects.append(
                (whole.u_plus - halves.u_plus).l2_norm()
                + (whole.u_minus - halves.u_minus).l2_norm()
            )
        self.assertGreater(defects[-1], 0.0)
        self.assertGreaterEqual(helpers.fit_loglog(steps, defects), 4.5)


if __name__ == '__main__':
    unittest.main()
