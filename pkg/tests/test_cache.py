from cubeflats.utils.cache import CacheManager, get_cache_manager


def test_set_get_and_clear():
    """Stored results come back under the same parameters until cleared."""
    cache = CacheManager(max_size=4)
    cache.set((1, 2, 3), kind="orders", n=5)
    assert cache.get(kind="orders", n=5) == (1, 2, 3)
    assert cache.get(kind="orders", n=6) is None
    assert cache.current_size() == 1
    cache.clear()
    assert cache.current_size() == 0


def test_none_is_not_stored():
    """None is the miss marker and never cached."""
    cache = CacheManager()
    cache.set(None, kind="empty")
    assert cache.current_size() == 0


def test_key_ignores_parameter_order():
    """Keyword order does not change the key."""
    cache = CacheManager()
    cache.set("hit", kind="torus", a=(1, 8), b=(7, 4))
    assert cache.get(b=(7, 4), a=(1, 8), kind="torus") == "hit"


def test_least_recently_used_entry_is_evicted():
    """A full cache drops the entry touched longest ago."""
    cache = CacheManager(max_size=2)
    cache.set("first", kind="k", i=1)
    cache.set("second", kind="k", i=2)
    assert cache.get(kind="k", i=1) == "first"
    cache.set("third", kind="k", i=3)
    assert cache.get(kind="k", i=2) is None
    assert cache.get(kind="k", i=1) == "first"
    assert cache.current_size() == 2


def test_cache_manager_is_shared():
    """get_cache_manager returns one process-wide instance."""
    assert get_cache_manager() is get_cache_manager()
