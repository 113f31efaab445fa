"""On-disk persistence of the colored Jones memo.

Enabled by the ``AJT_CACHE_DIR`` environment variable.  The file is JSON:

    {"version": 1, "checksum": sha256-hex, "entries": [[slopes, n, scalar], ...]}

The checksum covers the serialized entries.  A missing, unreadable or
corrupted file is treated as an empty cache.
"""

import hashlib
import json
import logging
import os
import tempfile

from . import jones
from .ring import LaurentScalar

__all__ = ["cache_path", "load_cache", "save_cache"]

log = logging.getLogger(__name__)

VERSION = 1
FILENAME = "colored_jones_v1.json"
MAX_TERMS = 200_000


def cache_path(directory=None):
    directory = directory or os.environ.get("AJT_CACHE_DIR")
    if not directory:
        return None
    return os.path.join(directory, FILENAME)


def _checksum(entries):
    blob = json.dumps(entries, separators=(",", ":"), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def load_cache(directory=None):
    """Merge cached values into the memo; returns the number loaded."""
    path = cache_path(directory)
    if not path or not os.path.exists(path):
        return 0
    try:
        with open(path) as fh:
            data = json.load(fh)
        entries = data["entries"]
        if data.get("version") != VERSION or data.get("checksum") != _checksum(entries):
            raise ValueError("checksum mismatch")
        parsed = {}
        for slopes, n, text in entries:
            parsed[(tuple(tuple(x) for x in slopes), int(n))] = LaurentScalar.parse(text)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        log.warning("ignoring colored Jones cache %s: %s", path, exc)
        return 0
    with jones._memo_lock:
        for key, value in parsed.items():
            jones._memo.setdefault(key, value)
    return len(parsed)


def save_cache(directory=None):
    """Write the memo atomically; returns the number of entries written."""
    path = cache_path(directory)
    if not path:
        return 0
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with jones._memo_lock:
        items = sorted(jones._memo.items())
    entries = [[[list(s) for s in slopes], n, str(v)] for (slopes, n), v in items if v.nterms <= MAX_TERMS]
    data = {"version": VERSION, "checksum": _checksum(entries), "entries": entries}
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        json.dump(data, fh)
    os.replace(tmp, path)
    return len(entries)
