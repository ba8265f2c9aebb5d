"""Rendering and parsing of classification reports.

The JSON format is newline-delimited: one ``ClassificationRecord`` per line, unstructured with
``converter``.  The Markdown format is a table with one row per ``(n, d)`` cell.
"""

import json
import typing

import cattr

from .classify import VERDICT_UNDETERMINED, ClassificationRecord, expected_verdict
from .exceptions import SizeMismatchException
from .settings import FORMAT_JSON, FORMAT_MARKDOWN

#: Converter between report lines and records.
converter = cattr.Converter()

#: Header of the Markdown table.
MARKDOWN_HEADER = (
    "| n | d | verdict | confirmed | evidence | seconds |",
    "|---|---|---|---|---|---|",
)

#: Value of ``--expect`` selecting the closed-form classification.
EXPECT_BUILTIN = "builtin"


def record_to_json(record: ClassificationRecord) -> str:
    return json.dumps(converter.unstructure(record), sort_keys=True)


def record_from_json(line: str) -> ClassificationRecord:
    return converter.structure(json.loads(line), ClassificationRecord)


def _markdown_row(record: ClassificationRecord) -> str:
    evidence = "; ".join(
        "%s %s" % (e.kind, e.detail) if e.detail else e.kind for e in record.evidence
    )
    return "| %d | %d | %s | %s | %s | %.2f |" % (
        record.n,
        record.d,
        record.verdict,
        "yes" if record.confirmed else "no",
        evidence.replace("|", "/"),
        sum(record.timings.values()),
    )


def render(records: typing.Iterable[ClassificationRecord], format: str) -> str:
    """Return the report for ``records`` in ``format``."""
    if format == FORMAT_JSON:
        return "".join(record_to_json(record) + "\n" for record in records)
    elif format == FORMAT_MARKDOWN:
        lines = list(MARKDOWN_HEADER) + [_markdown_row(record) for record in records]
        return "\n".join(lines) + "\n"
    else:
        raise ValueError("Unknown report format %s" % format)


def read_records(path: str) -> typing.List[ClassificationRecord]:
    """Parse an NDJSON report file."""
    with open(path, "rt") as inputf:
        return [record_from_json(line) for line in inputf if line.strip()]


def load_expectations(source: str) -> typing.Callable[[int, int], typing.Optional[str]]:
    """Return a lookup ``(n, d) -> verdict`` from ``source``.

    ``source`` is either ``"builtin"`` or the path of an NDJSON report as read by
    ``read_records()``, of which only ``n``, ``d`` and ``verdict`` are required.  Cells missing from
    a file have no expectation.
    """
    if source == EXPECT_BUILTIN:
        return expected_verdict
    try:
        records = read_records(source)
    except ValueError as e:
        raise SizeMismatchException("Invalid expectations in %s: %s" % (source, e)) from e
    table = {(record.n, record.d): record.verdict for record in records}
    return lambda n, d: table.get((n, d))


def find_mismatches(
    records: typing.Iterable[ClassificationRecord],
    expect: typing.Callable[[int, int], typing.Optional[str]],
) -> typing.List[typing.Tuple[int, int, str, str]]:
    """Return ``(n, d, expected, actual)`` for every determined record contradicting ``expect``."""
    result = []
    for record in records:
        if record.verdict == VERDICT_UNDETERMINED:
            continue
        expected = expect(record.n, record.d)
        if expected is not None and record.verdict != expected:
            result.append((record.n, record.d, expected, record.verdict))
    return result
