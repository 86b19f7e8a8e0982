"""
Cache Manager for subgroup lattices and tables of marks

Provides caching functionality to avoid re-enumerating subgroup lattices on
every CLI run. Uses pickle for serialization; keys are content hashes of the
defining group data (name, degree, generators), the relevant cap and the tool
version, so an edited group file never reads a stale entry.
"""

import hashlib
import json
import logging
import pickle
from pathlib import Path
from typing import Any, Dict, Optional

import pandas as pd

from config import DEFAULT_CONFIG, TOOL_VERSION, EngineConfig
from group_core import FiniteGroup, Subgroup, SubgroupLattice, register_lattice, subgroups
from gsets import table_of_marks
from presets import group_to_dict

logger = logging.getLogger(__name__)


def content_hash(payload: Dict[str, Any]) -> str:
    """sha256 of the canonical JSON form of payload"""
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


class CacheManager:
    """Manages caching of computed lattices and mark tables"""

    def __init__(self, cache_dir: str = ".cache"):
        """
        Initialize cache manager.

        Args:
            cache_dir: Directory to store cache files
        """
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)

    def _get_cache_key(self, kind: str, group: FiniteGroup, extra: Optional[Dict[str, Any]] = None) -> str:
        """
        Generate a cache key from the group's defining data.

        Args:
            kind: "lattice" or "marks"
            group: Group the entry belongs to
            extra: Additional key material (caps, level ids)

        Returns:
            Hash string representing this exact computation
        """
        payload = {"kind": kind, "group": group_to_dict(group), "version": TOOL_VERSION}
        if extra:
            payload["extra"] = extra
        return content_hash(payload)

    def _get_cache_path(self, kind: str, group: FiniteGroup, extra: Optional[Dict[str, Any]] = None) -> Path:
        # group name + hash keeps the file names readable
        key = self._get_cache_key(kind, group, extra)
        return self.cache_dir / f"{group.name}_{kind}_{key[:16]}.pkl"

    def load(self, kind: str, group: FiniteGroup, extra: Optional[Dict[str, Any]] = None) -> Optional[Any]:
        """
        Load a cached entry if available.

        Returns:
            The cached object on a hit, None on a miss or unreadable file
        """
        cache_path = self._get_cache_path(kind, group, extra)

        if not cache_path.exists():
            logger.debug(f"[Cache] Miss - no {kind} cache for {group.name}")
            return None

        try:
            with open(cache_path, "rb") as f:
                data = pickle.load(f)
                logger.info(f"[Cache] Hit - loaded from {cache_path.name}")
                return data
        except (OSError, pickle.UnpicklingError, EOFError, AttributeError) as e:
            logger.warning(f"[Cache] Error loading cache: {e}")
            return None

    def save(self, kind: str, group: FiniteGroup, data: Any, extra: Optional[Dict[str, Any]] = None) -> None:
        cache_path = self._get_cache_path(kind, group, extra)

        try:
            with open(cache_path, "wb") as f:
                pickle.dump(data, f)
                logger.info(f"[Cache] Saved to {cache_path.name}")
        except OSError as e:
            logger.warning(f"[Cache] Error saving cache: {e}")

    def clear(self, group: Optional[FiniteGroup] = None) -> int:
        """
        Clear cache files.

        Args:
            group: If specified, only clear entries of this group.
                   If None, clear all cache files.

        Returns:
            Number of files removed
        """
        pattern = f"{group.name}_*.pkl" if group else "*.pkl"
        removed = 0
        for cache_file in self.cache_dir.glob(pattern):
            cache_file.unlink()
            removed += 1
        logger.info(f"[Cache] Cleared {removed} cache files")
        return removed

    def info(self) -> pd.DataFrame:
        """One row per cache file with its size in KB"""
        rows = []
        for cache_file in sorted(self.cache_dir.glob("*.pkl")):
            rows.append({"file": cache_file.name, "size_kb": round(cache_file.stat().st_size / 1024, 2)})
        return pd.DataFrame(rows, columns=["file", "size_kb"])

    # ------------------------------------------------------------------
    # typed entry points

    def lattice(self, group: FiniteGroup, config: EngineConfig = DEFAULT_CONFIG) -> SubgroupLattice:
        """
        Subgroup lattice from cache, computing and saving it on a miss.

        A hit seeds the in-process memo so later subgroups() calls reuse it.
        """
        extra = {"max_lattice_order": config.max_lattice_order}
        cached = self.load("lattice", group, extra)
        if isinstance(cached, SubgroupLattice) and cached.group == group:
            register_lattice(cached, config)
            return cached
        lattice = subgroups(group, config)
        self.save("lattice", group, lattice, extra)
        return lattice

    def marks(self, level: Subgroup) -> pd.DataFrame:
        group = level.parent
        extra = {"level": list(level.members)}
        cached = self.load("marks", group, extra)
        if isinstance(cached, pd.DataFrame):
            return cached
        table = table_of_marks(level)
        self.save("marks", group, table, extra)
        return table
