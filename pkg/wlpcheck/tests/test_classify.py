from unittest import TestCase, mock

from .. import classify as classify_module
from ..certificates import CertificateResult
from ..classify import (
    CAVEAT_MOD_P,
    HOLDS_EXCEPTIONS,
    VERDICT_FAILS,
    VERDICT_HOLDS,
    VERDICT_UNDETERMINED,
    ClassifyOptions,
    classify,
    classify_grid,
    expected_verdict,
)
from ..delta_analysis import (
    EVIDENCE_KNOWN_RESULT,
    EVIDENCE_LEMMA_FAMILY,
    EVIDENCE_RANK_WITNESS,
    EVIDENCE_SPORADIC,
)
from ..report import find_mismatches
from ..settings import DEFAULT_PRIMES, SPEC_RANDOM
from . import SetupTempDirMixin


class SetupOptionsMixin:
    def setUp(self):
        super().setUp()
        self.options = ClassifyOptions(spec_kind=SPEC_RANDOM)
        self.quick_options = ClassifyOptions(
            primes=DEFAULT_PRIMES[:1], trials=1, spec_kind=SPEC_RANDOM
        )


class ExpectedVerdictTest(TestCase):
    """Test the ``expected_verdict()`` function."""

    def testValues(self):
        """Test the closed-form verdict on cells of every kind"""
        self.assertEqual(expected_verdict(3, 17), VERDICT_HOLDS)
        self.assertEqual(expected_verdict(12, 1), VERDICT_HOLDS)
        self.assertEqual(expected_verdict(7, 2), VERDICT_HOLDS)
        self.assertEqual(expected_verdict(5, 5), VERDICT_FAILS)
        self.assertEqual(expected_verdict(9, 2), VERDICT_FAILS)
        self.assertEqual(expected_verdict(4, 3), VERDICT_FAILS)


class ClassifyTest(SetupOptionsMixin, TestCase):
    """Test the ``classify()`` function."""

    def testKnownResult(self):
        """Test a cell with at most three variables"""
        record = classify(3, 4, self.options)
        self.assertEqual(record.verdict, VERDICT_HOLDS)
        self.assertEqual(
            [e.kind for e in record.evidence], [EVIDENCE_KNOWN_RESULT, EVIDENCE_RANK_WITNESS]
        )
        self.assertTrue(record.confirmed)
        self.assertEqual(record.caveat, "")

    def testRankProfileHolds(self):
        """Test a cell decided by a maximal rank profile"""
        record = classify(4, 2, self.options)
        self.assertEqual(record.verdict, VERDICT_HOLDS)
        self.assertEqual([e.kind for e in record.evidence], [EVIDENCE_RANK_WITNESS])
        self.assertEqual(record.evidence[0].values, {"runs": 4, "maximal_runs": 4})
        self.assertTrue(record.confirmed)
        self.assertIn("rank_profile", record.timings)

    def testHoldsExceptions(self):
        """Test the four cells with ``n >= 4`` and ``d >= 2`` where the WLP holds"""
        for n, d in HOLDS_EXCEPTIONS:
            record = classify(n, d, self.quick_options)
            self.assertEqual(record.verdict, VERDICT_HOLDS, (n, d))
            self.assertEqual([e.kind for e in record.evidence], [EVIDENCE_RANK_WITNESS], (n, d))

    def testLemmaFamily(self):
        """Test a cell decided by the difference sequence bound"""
        record = classify(10, 4, self.options)
        self.assertEqual(record.verdict, VERDICT_FAILS)
        self.assertEqual([e.kind for e in record.evidence], [EVIDENCE_LEMMA_FAMILY])
        self.assertTrue(record.confirmed)
        self.assertNotIn("rank_profile", record.timings)

    def testSporadic(self):
        """Test a cell decided by a sporadic certificate"""
        record = classify(5, 5, self.quick_options)
        self.assertEqual(record.verdict, VERDICT_FAILS)
        self.assertEqual(record.evidence[0].kind, EVIDENCE_SPORADIC)
        self.assertEqual(record.evidence[0].base_pair, (4, 5))
        self.assertFalse(record.confirmed)
        self.assertEqual(record.caveat, CAVEAT_MOD_P)

    def testOpenSandwich(self):
        """Test that a deficient rank profile does not decide a cell with an open sandwich"""
        short = CertificateResult(
            case=(4, 6, 5),
            degree=9,
            span_dim=13,
            quotient_dim=14,
            target=14,
            expected=10,
            matched=False,
            families_tried=1,
        )
        with mock.patch.object(classify_module, "sporadic_certificate", return_value=short):
            record = classify(5, 5, self.quick_options)
        self.assertEqual(record.verdict, VERDICT_UNDETERMINED)
        self.assertEqual(
            [e.kind for e in record.evidence], [EVIDENCE_SPORADIC, EVIDENCE_RANK_WITNESS]
        )
        self.assertEqual(record.evidence[1].values["maximal_runs"], 0)
        self.assertFalse(record.confirmed)
        self.assertEqual(record.caveat, "")

    def testRankDeficiencyAlone(self):
        """Test that a cell without a failure proof stays undetermined"""
        with mock.patch.object(classify_module, "fails_by_lemma3", return_value=None):
            record = classify(4, 3, self.quick_options)
        self.assertEqual(record.verdict, VERDICT_UNDETERMINED)
        self.assertEqual([e.kind for e in record.evidence], [EVIDENCE_RANK_WITNESS])

    def testSkipHeavy(self):
        """Test leaving a heavy certificate cell undetermined"""
        options = ClassifyOptions(skip_heavy=True)
        record = classify(11, 3, options)
        self.assertEqual(record.verdict, VERDICT_UNDETERMINED)
        self.assertEqual(record.evidence, [])
        self.assertEqual(record.caveat, "")


class ClassifyGridTest(SetupOptionsMixin, SetupTempDirMixin, TestCase):
    """Test the ``classify_grid()`` function."""

    def testSmallGrid(self):
        """Test that a small grid agrees with the closed form"""
        records = classify_grid(5, 3, self.quick_options)
        cells = [(n, d) for n in range(1, 6) for d in (1, 2, 3)]
        self.assertEqual([(r.n, r.d) for r in records], cells)
        self.assertEqual(find_mismatches(records, expected_verdict), [])
        self.assertFalse([r for r in records if r.verdict == VERDICT_UNDETERMINED])
        self.assertEqual([(r.n, r.d) for r in records if r.verdict == VERDICT_FAILS], [(4, 3)])

    def testWorkers(self):
        """Test that worker processes give the serial result"""
        options = ClassifyOptions(
            primes=DEFAULT_PRIMES[:1],
            trials=1,
            spec_kind=SPEC_RANDOM,
            jobs=2,
            cache_path=self.tmp_path("cache.ndjson"),
        )
        serial = classify_grid(3, 2, self.quick_options)
        parallel = classify_grid(3, 2, options)
        self.assertEqual(
            [(r.n, r.d, r.verdict, r.confirmed) for r in parallel],
            [(r.n, r.d, r.verdict, r.confirmed) for r in serial],
        )
