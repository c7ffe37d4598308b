import hashlib
import json
import logging
from threading import RLock
from typing import Any, Optional

from cachetools import LRUCache

from cubeflats.config import get_settings

logger = logging.getLogger(__name__)


class CacheManager:
    """Thread-safe in-memory memo table for pure, deterministic computations."""

    def __init__(self, max_size: int = 256):
        """
        Initialize the cache buffer.

        Args:
            max_size (int): Ceiling on stored results; least recently used entries are evicted first.
        """
        self._cache = LRUCache(maxsize=max_size)
        self._lock = RLock()

    @staticmethod
    def _generate_key(**kwargs) -> str:
        """
        Maps keyword parameters onto a deterministic MD5 hex key.
        Non-JSON values (fractions, models) fall back to their string form.
        """
        try:
            # sort_keys ensures identical parameter dict arrangements generate the same key
            key_string = json.dumps(kwargs, sort_keys=True, default=str)
            return hashlib.md5(key_string.encode("utf-8"), usedforsecurity=False).hexdigest()
        except (TypeError, ValueError) as e:
            logger.error(f"Cache key generation failure: {str(e)}")
            return hashlib.md5(str(kwargs).encode("utf-8"), usedforsecurity=False).hexdigest()

    def get(self, **kwargs) -> Optional[Any]:
        """Fetch the value stored under the given parameters, or None."""
        key = self._generate_key(**kwargs)

        with self._lock:
            cached_item = self._cache.get(key)

        if cached_item is not None:
            logger.debug(f"Cache HIT for {kwargs.get('kind', 'entry')} {key}")
        return cached_item

    def set(self, value: Any, **kwargs) -> None:
        """
        Store a value under the given parameters.

        Args:
            value (Any): Result to memoize. None is never stored.
        """
        if value is None:
            return

        key = self._generate_key(**kwargs)
        with self._lock:
            self._cache[key] = value
        logger.debug(f"Cache record set for {kwargs.get('kind', 'entry')} {key}")

    def clear(self) -> None:
        """Drops every stored result."""
        with self._lock:
            self._cache.clear()
        logger.info("Cache layer cleared")

    def current_size(self) -> int:
        """Returns the number of results currently held."""
        with self._lock:
            return len(self._cache)


_cache_manager: Optional[CacheManager] = None
_singleton_lock = RLock()


def get_cache_manager() -> CacheManager:
    """
    Lazy initializer for the process-wide cache instance.

    Returns:
        CacheManager: Shared memo table sized from settings.
    """
    global _cache_manager
    with _singleton_lock:
        if _cache_manager is None:
            _cache_manager = CacheManager(max_size=get_settings().CACHE_MAX_SIZE)
    return _cache_manager
