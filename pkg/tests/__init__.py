"""Test utilities and base classes for nsc-toolkit tests."""

import os
import pathlib
import tempfile
import typing
import unittest

from nsc_toolkit import settings


class RunTestCase(unittest.TestCase):
    """Base class for tests that integrate the flow.

    This class automatically handles:
    - Skipping tests when SKIP_SLOW_TESTS is set
    - Creating a scratch output directory for each test
    - Restoring the default settings after each test
    """

    @classmethod
    def setUpClass(cls) -> None:
        if os.environ.get('SKIP_SLOW_TESTS'):
            raise unittest.SkipTest('Slow tests disabled')

    def setUp(self) -> None:
        self._scratch = tempfile.TemporaryDirectory()
        self.output_dir = pathlib.Path(self._scratch.name)

    def tearDown(self) -> None:
        self._scratch.cleanup()
        settings.reset_settings()

    def config(self, **overrides: typing.Any) -> settings.SimConfig:
        """A 16^3 swirl-ring run that fits well inside its box."""
        values: dict[str, typing.Any] = {
            'n': 16,
            'box_scale': 2.0,
            'kappa': 0.01,
            'epsilon': 0.05,
            'init': {
                'family': 'gaussian_swirl_ring',
                'params': {'radius': 1.5, 'width': 0.7},
            },
            'dt': 0.05,
            't_end': 0.2,
            'diagnostics_every': 1,
            'output_dir': self.output_dir,
        }
        values.update(overrides)
        return settings.SimConfig.model_validate(values)
