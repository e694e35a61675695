import pathlib
import tempfile
import unittest

import numpy as np

from nsc_toolkit import errors
from nsc_toolkit.spectral import checkpoint, fields
from nsc_toolkit.spectral import grid as grid_mod


class CheckpointTestCase(unittest.TestCase):
    def setUp(self) -> None:
        self.tmpdir = tempfile.TemporaryDirectory()
        self.path = pathlib.Path(self.tmpdir.name) / 'state.nsck'
        grid = grid_mod.make_grid(8, 1.25)
        velocity = fields.windowed_random_vector(
            grid, np.random.default_rng(11), width=0.6
        )
        self.state = grid_mod.VelocityState(velocity, t=1.5, kappa=0.01)

    def tearDown(self) -> None:
        self.tmpdir.cleanup()

    def test_round_trip_is_exact(self) -> None:
        checkpoint.save(self.path, self.state)
        loaded = checkpoint.load(self.path)
        self.assertEqual(loaded.grid, self.state.grid)
        self.assertEqual(loaded.t, 1.5)
        self.assertEqual(loaded.kappa, 0.01)
        np.testing.assert_array_equal(
            loaded.velocity.coeffs, self.state.velocity.coeffs
        )
        self.assertFalse(self.path.with_suffix('.nsck.part').exists())

    def test_missing_file(self) -> None:
        with self.assertRaises(errors.ConfigurationError):
            checkpoint.load(self.path)

    def test_truncated(self) -> None:
        checkpoint.save(self.path, self.state)
        self.path.write_bytes(self.path.read_bytes()[:-16])
        with self.assertRaisesRegex(errors.ConfigurationError, 'expected'):
            checkpoint.load(self.path)

    def test_bad_magic(self) -> None:
        checkpoint.save(self.path, self.state)
        raw = bytearray(self.path.read_bytes())
        raw[:4] = b'XXXX'
        self.path.write_bytes(bytes(raw))
        with self.assertRaisesRegex(errors.ConfigurationError, 'not a'):
            checkpoint.load(self.path)

    def test_short_header(self) -> None:
        self.path.write_bytes(b'NSCK')
        with self.assertRaisesRegex(errors.ConfigurationError, 'truncated'):
            checkpoint.load(self.path)


if __name__ == '__main__':
    unittest.main()
