import os
import tempfile

from ..exact_linalg import PrimeField
from ..settings import DEFAULT_PRIMES


class SetupFieldMixin:
    def setUp(self):
        super().setUp()
        self.field = PrimeField(DEFAULT_PRIMES[0])
        self.other_field = PrimeField(DEFAULT_PRIMES[1])

    def random_alphas(self, count, seed=0):
        """Return ``count`` distinct random field elements."""
        rng = self.field.rng(seed)
        result = []
        while len(result) < count:
            value = int(rng.integers(0, self.field.p))
            if value not in result:
                result.append(value)
        return result


class SetupTempDirMixin:
    def setUp(self):
        super().setUp()
        self._tmp_dir = tempfile.TemporaryDirectory()
        self.addCleanup(self._tmp_dir.cleanup)
        self.tmp_dir = self._tmp_dir.name

    def tmp_path(self, name):
        return os.path.join(self.tmp_dir, name)
