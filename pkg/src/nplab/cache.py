"""Content-addressed result cache.

Keys are SHA-256 digests of a canonical JSON rendering of
``(operation, arguments, quadrature)``.  Entries are JSON files written via a
temporary file and an atomic rename.  If the directory cannot be written the
cache degrades to an in-memory dict with a warning.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path

log = logging.getLogger(__name__)

__all__ = ["canonical_json", "cache_key", "ResultCache", "default_cache_dir"]


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=True)


def cache_key(operation: str, args, quad=None) -> str:
    payload = {"op": operation, "args": args, "quad": quad}
    return hashlib.sha256(canonical_json(payload).encode()).hexdigest()


def default_cache_dir() -> Path:
    env = os.environ.get("NPLAB_CACHE_DIR")
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "nplab"


class ResultCache:
    """``get``/``put`` of JSON-serialisable values by key.  ``enabled=False`` never hits."""

    def __init__(self, directory=None, enabled: bool = True):
        self.enabled = enabled
        self.memory: dict = {}
        self.directory = None
        if not enabled:
            return
        d = Path(directory) if directory is not None else default_cache_dir()
        try:
            d.mkdir(parents=True, exist_ok=True)
            probe = tempfile.NamedTemporaryFile(dir=d, delete=True)
            probe.close()
            self.directory = d
        except OSError as exc:
            log.warning("cache directory %s is not writable (%s); using memory only", d, exc)

    @property
    def persistent(self) -> bool:
        return self.directory is not None

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, key: str):
        if not self.enabled:
            return None
        if key in self.memory:
            return self.memory[key]
        if self.directory is None:
            return None
        path = self._path(key)
        if not path.exists():
            return None
        try:
            with open(path) as fh:
                value = json.load(fh)
        except (OSError, ValueError) as exc:
            log.warning("corrupt cache entry %s (%s); recomputing", path.name, exc)
            return None
        self.memory[key] = value
        return value

    def put(self, key: str, value) -> None:
        if not self.enabled:
            return
        self.memory[key] = value
        if self.directory is None:
            return
        try:
            fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
            with os.fdopen(fd, "w") as fh:
                json.dump(value, fh)
            os.replace(tmp, self._path(key))
        except OSError as exc:
            log.warning("cache write failed (%s); keeping the entry in memory", exc)
