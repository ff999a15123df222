"""Content-addressed importance map cache.

Maps are keyed by a hash of the source bytes plus the generator route, so one
image retargeted to many sizes pays for importance generation once. Entries
are persisted as grayscale PNG with a JSON sidecar; a failing cache directory
degrades to in-memory caching with a warning.
"""
import hashlib
import json
import logging
import threading
from pathlib import Path

import numpy as np
from PIL import Image

from .importance import ImportanceMap

logger = logging.getLogger(__name__)


def importance_key(source_bytes: bytes, generator: str) -> str:
    digest = hashlib.sha256()
    digest.update(source_bytes)
    digest.update(b"|")
    digest.update(generator.encode())
    return digest.hexdigest()


class ImportanceCache:
    def __init__(self, cache_dir=None):
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self._memory: dict[str, tuple[ImportanceMap, dict]] = {}
        self._lock = threading.Lock()
        self._key_locks: dict[str, threading.Lock] = {}
        self._disk_ok = True
        if self.cache_dir is not None:
            try:
                self.cache_dir.mkdir(parents=True, exist_ok=True)
            except OSError as exc:
                logger.warning("cannot create cache dir %s (%s); caching in memory only",
                               self.cache_dir, exc)
                self._disk_ok = False

    def _paths(self, key):
        return self.cache_dir / f"{key}.png", self.cache_dir / f"{key}.json"

    def get(self, key: str):
        with self._lock:
            hit = self._memory.get(key)
        if hit is not None:
            return hit
        if self.cache_dir is None or not self._disk_ok:
            return None
        png, sidecar = self._paths(key)
        if not (png.exists() and sidecar.exists()):
            return None
        try:
            scores = np.asarray(Image.open(png).convert("L"), dtype=float) / 255.0
            meta = json.loads(sidecar.read_text())
        except (OSError, ValueError) as exc:
            logger.warning("cache entry %s unreadable (%s)", key, exc)
            return None
        entry = (ImportanceMap(scores), meta)
        with self._lock:
            self._memory[key] = entry
        return entry

    def put(self, key: str, imp_map: ImportanceMap, meta: dict):
        with self._lock:
            self._memory[key] = (imp_map, meta)
        if self.cache_dir is None or not self._disk_ok:
            return
        png, sidecar = self._paths(key)
        try:
            arr = np.clip(np.rint(imp_map.scores * 255.0), 0, 255).astype(np.uint8)
            Image.fromarray(arr, mode="L").save(png)
            sidecar.write_text(json.dumps(meta))
        except OSError as exc:
            logger.warning("cache write failed for %s (%s); keeping in memory", key, exc)
            self._disk_ok = False

    def get_or_compute(self, key: str, compute):
        """Single-flight: concurrent first requests for a key compute once."""
        hit = self.get(key)
        if hit is not None:
            return hit
        with self._lock:
            key_lock = self._key_locks.setdefault(key, threading.Lock())
        with key_lock:
            hit = self.get(key)
            if hit is not None:
                return hit
            imp_map, meta = compute()
            self.put(key, imp_map, meta)
            return imp_map, meta
