"""Append-only cache of quotient dimensions.

Each line of the cache file is one compact JSON object with sorted keys::

    {"chart":"ci","d":3,"dim":171,"j":8,"m":10,"n":8,"prime":1073741789,"provenance":"...","version":1}

Lines with an unknown ``version`` are skipped with a warning.
"""

import json
import os
import threading
import typing

import attr
import cattr
from logzero import logger

#: Version of the cache line layout.
CACHE_VERSION = 1


@attr.s(frozen=True, auto_attribs=True)
class CacheEntry:
    """One cached dimension."""

    chart: str
    d: int
    dim: int
    j: int
    m: int
    n: int
    prime: int
    provenance: str
    version: int = CACHE_VERSION

    @property
    def key(self):
        return (self.n, self.m, self.d, self.j, self.prime, self.provenance, self.chart)


#: Converter between cache lines and ``CacheEntry``.
converter = cattr.Converter()


def dump_entry(entry: CacheEntry) -> str:
    """Return the canonical line for ``entry`` (without newline)."""
    return json.dumps(converter.unstructure(entry), sort_keys=True, separators=(",", ":"))


def load_entry(line: str) -> CacheEntry:
    return converter.structure(json.loads(line), CacheEntry)


class DimensionCache:
    """NDJSON file cache of ``(n, m, d, j, prime, provenance, chart) -> dim``.

    With ``buffered=True`` new entries are only collected in ``pending`` and the file is left
    alone, for use in worker processes; the parent appends them with ``extend()``.
    """

    def __init__(self, path: str, buffered: bool = False):
        self.path = path
        self.buffered = buffered
        self.pending: typing.List[CacheEntry] = []
        self._entries: typing.Dict[tuple, CacheEntry] = {}
        self._lock = threading.Lock()
        self._load()

    def _load(self):
        if not self.path or not os.path.exists(self.path):
            return
        with open(self.path, "rt") as inputf:
            for lineno, line in enumerate(inputf, 1):
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                if record.get("version") != CACHE_VERSION:
                    logger.warning(
                        "Skipping cache line %d with unknown version %s",
                        lineno,
                        record.get("version"),
                    )
                    continue
                entry = converter.structure(record, CacheEntry)
                self._entries[entry.key] = entry
        logger.debug("Loaded %d cache entries from %s", len(self._entries), self.path)

    def __len__(self):
        return len(self._entries)

    def get(self, n, m, d, j, prime, provenance, chart) -> typing.Optional[int]:
        entry = self._entries.get((n, m, d, j, prime, provenance, chart))
        if entry is not None:
            logger.debug("Cache hit for n=%d, m=%d, d=%d, j=%d", n, m, d, j)
            return entry.dim
        return None

    def lookup(self, n, m, d, j, prime, provenance, chart) -> typing.Optional[CacheEntry]:
        return self._entries.get((n, m, d, j, prime, provenance, chart))

    def put(self, entry: CacheEntry):
        """Record ``entry``; appends to the file unless buffered."""
        with self._lock:
            if entry.key in self._entries:
                return
            self._entries[entry.key] = entry
            if self.buffered:
                self.pending.append(entry)
            elif self.path:
                with open(self.path, "at") as outputf:
                    print(dump_entry(entry), file=outputf)

    def extend(self, entries: typing.Iterable[CacheEntry]):
        for entry in entries:
            self.put(entry)
