"""Disk cache for FEM meshes and solved fields, keyed by content hashes.

The cache directory defaults to ``.microsonic-cache`` under the current
directory and can be moved with the ``MICROSONIC_CACHE_DIR`` environment
variable.  Writes are atomic (temp file + rename), so concurrent readers
and a single writer per key are safe.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

import numpy as np

ENV_VAR = "MICROSONIC_CACHE_DIR"
SCHEMA_VERSION = 2


def cache_dir() -> Path:
    return Path(os.environ.get(ENV_VAR, ".microsonic-cache"))


def content_key(payload: dict) -> str:
    """Stable hash of a canonicalized, JSON-serializable payload."""
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:24]


def _path(kind: str, key: str) -> Path:
    return cache_dir() / f"{kind}-{key}.npz"


def store(kind: str, key: str, arrays: dict, meta: dict) -> Path:
    path = _path(kind, key)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = dict(arrays)
    payload["__meta__"] = np.frombuffer(
        json.dumps(meta, sort_keys=True).encode(), dtype=np.uint8)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            np.savez_compressed(fh, **payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def load(kind: str, key: str):
    """(arrays, meta) or None on a miss or an unreadable entry."""
    path = _path(kind, key)
    if not path.exists():
        return None
    try:
        with np.load(path, allow_pickle=False) as dat:
            arrays = {k: dat[k] for k in dat.files if k != "__meta__"}
            meta = json.loads(bytes(dat["__meta__"]).decode())
        return arrays, meta
    except Exception:
        # corrupt entry: recompute (caller warns)
        return None
