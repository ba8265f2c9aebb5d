import os
from unittest import TestCase, mock

from ..settings import (
    DEFAULT_PRIMES,
    DEFAULT_SEED,
    FORMAT_JSON,
    FORMAT_MARKDOWN,
    SPEC_MOMENT,
    Settings,
    setup_sentry,
)


class SettingsTest(TestCase):
    """Test the ``Settings`` class."""

    @mock.patch.dict(os.environ, {}, clear=True)
    def testDefaults(self):
        """Test the settings without environment"""
        settings = Settings.from_env(read_dot_env=False)
        self.assertEqual(settings.primes, DEFAULT_PRIMES)
        self.assertEqual(settings.seed, DEFAULT_SEED)
        self.assertEqual(settings.spec, SPEC_MOMENT)
        self.assertEqual(settings.format, FORMAT_MARKDOWN)
        self.assertEqual(settings.cache, "")
        self.assertFalse(setup_sentry(settings))

    @mock.patch.dict(
        os.environ,
        {
            "WLPCHECK_PRIMES": "1000003,1000033",
            "WLPCHECK_SEED": "7",
            "WLPCHECK_FORMAT": "json",
            "WLPCHECK_JOBS": "4",
        },
        clear=True,
    )
    def testEnvironment(self):
        """Test settings from the environment"""
        settings = Settings.from_env(read_dot_env=False)
        self.assertEqual(settings.primes, (1000003, 1000033))
        self.assertEqual(settings.seed, 7)
        self.assertEqual(settings.format, FORMAT_JSON)
        self.assertEqual(settings.jobs, 4)

    @mock.patch.dict(os.environ, {"WLPCHECK_SPEC": "bogus"}, clear=True)
    def testInvalid(self):
        """Test rejection of invalid values"""
        with self.assertRaises(ValueError):
            Settings.from_env(read_dot_env=False)

    def testSentryDsnHidden(self):
        """Test that the Sentry DSN is not shown"""
        settings = Settings(sentry_dsn="https://secret@example.com/1")
        self.assertNotIn("secret@example", repr(settings))
