"""
Test script to verify caching of subgroup lattices and mark tables

Run with: pytest test_cache.py -v
"""

import time

import pytest

from cache_manager import CacheManager, content_hash
from config import EngineConfig
from presets import get_preset, group_from_dict


@pytest.fixture
def cache(tmp_path):
    return CacheManager(str(tmp_path / "cache"))


class TestCacheManager:
    """Tests for CacheManager"""

    def test_lattice_round_trip(self, cache):
        group = get_preset("S4")

        start_time = time.time()
        first = cache.lattice(group)
        first_run_time = time.time() - start_time

        start_time = time.time()
        second = cache.lattice(group)
        second_run_time = time.time() - start_time
        print(f"\n✓ First run: {first_run_time:.3f}s, second run: {second_run_time:.3f}s")

        assert [s.members for s in first.subgroups] == [s.members for s in second.subgroups], "Subgroups don't match!"
        assert first.labels == second.labels
        assert len(cache.info()) == 1

    def test_miss_returns_none(self, cache):
        assert cache.load("lattice", get_preset("C4")) is None

    def test_edited_group_gets_a_new_key(self, cache):
        a = group_from_dict({"name": "G", "degree": 3, "generators": [[1, 2, 0]]})
        b = group_from_dict({"name": "G", "degree": 3, "generators": [[1, 2, 0], [1, 0, 2]]})
        assert cache._get_cache_key("lattice", a) != cache._get_cache_key("lattice", b)
        cache.lattice(a)
        assert cache.load("lattice", b, {"max_lattice_order": EngineConfig().max_lattice_order}) is None

    def test_cap_is_part_of_the_key(self, cache):
        group = get_preset("C4")
        cache.lattice(group)
        cache.lattice(group, EngineConfig(max_lattice_order=64))
        assert len(cache.info()) == 2

    def test_marks(self, cache):
        group = get_preset("S3")
        table = cache.marks(group.whole)
        again = cache.marks(group.whole)
        assert table.equals(again)
        assert table.shape == (4, 4)

    def test_corrupt_file_is_a_miss(self, cache):
        group = get_preset("C4")
        cache.lattice(group)
        for path in cache.cache_dir.glob("*.pkl"):
            path.write_bytes(b"")
        assert cache.load("lattice", group, {"max_lattice_order": EngineConfig().max_lattice_order}) is None
        assert len(cache.lattice(group)) == 3

    def test_clear(self, cache):
        cache.lattice(get_preset("C4"))
        cache.lattice(get_preset("S3"))
        assert cache.clear(get_preset("C4")) == 1
        assert cache.clear() == 1
        assert cache.info().empty

    def test_content_hash_is_order_independent(self):
        assert content_hash({"a": 1, "b": [1, 2]}) == content_hash({"b": [1, 2], "a": 1})
