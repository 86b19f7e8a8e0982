"""
Workspace and reproducible reports

A Workspace is a root directory holding group, universe and indexing-system
files plus the lattice cache. A Report records one CLI invocation (arguments,
content hashes of every input file, stdout, exit code, timing, tool version)
so it can be replayed later and compared byte-for-byte.
"""

import hashlib
import json
import logging
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from cache_manager import CacheManager
from config import TOOL_VERSION, WORKSPACE_ENV
from errors import InputError

logger = logging.getLogger(__name__)

Runner = Callable[[Sequence[str]], Tuple[int, str]]


def file_hash(path: Union[str, Path]) -> str:
    """sha256 of a file's bytes"""
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except FileNotFoundError:
        raise InputError(f"input file not found: {path}") from None


class Workspace:
    """Root directory with groups/, universes/, indexing/ and .cache/"""

    SUBDIRS = ("groups", "universes", "indexing")

    def __init__(self, root: Optional[Union[str, Path]] = None, cache_dir: Optional[Union[str, Path]] = None):
        """
        Initialize a workspace.

        Args:
            root: Root directory; defaults to $NORMCALC_WORKSPACE, then the current directory
            cache_dir: Cache directory; defaults to <root>/.cache
        """
        self.root = Path(root or os.getenv(WORKSPACE_ENV) or ".").resolve()
        self.cache_dir = Path(cache_dir) if cache_dir else self.root / ".cache"
        self._cache: Optional[CacheManager] = None

    @property
    def cache(self) -> CacheManager:
        if self._cache is None:
            self._cache = CacheManager(str(self.cache_dir))
        return self._cache

    def resolve(self, path: Union[str, Path], kind: Optional[str] = None) -> Path:
        """
        Find a file: as given, under the root, then under root/<kind>.

        Raises:
            InputError: no candidate exists
        """
        path = Path(path)
        candidates = [path, self.root / path]
        if kind:
            candidates.append(self.root / kind / path)
        for candidate in candidates:
            if candidate.is_file():
                return candidate
        raise InputError(f"file not found: {path}")

    def files(self, kind: str) -> List[Path]:
        directory = self.root / kind
        return sorted(directory.glob("*.json")) if directory.is_dir() else []


@dataclass
class Report:
    """One recorded CLI invocation"""
    command: List[str]
    inputs: Dict[str, str] = field(default_factory=dict)
    stdout: str = ""
    exit_code: int = 0
    elapsed_seconds: float = 0.0
    tool_version: str = TOOL_VERSION

    def to_dict(self):
        """Convert to dictionary for serialization"""
        return asdict(self)

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        logger.info(f"[Report] Saved to {path}")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Report":
        try:
            data = json.loads(Path(path).read_text())
            return cls(**data)
        except FileNotFoundError:
            raise InputError(f"report not found: {path}") from None
        except (json.JSONDecodeError, TypeError) as e:
            raise InputError(f"malformed report {path}: {e}") from None


@dataclass
class ReplayOutcome:
    matches: bool
    stale_inputs: List[str]
    stdout: str
    exit_code: int

    def to_dict(self):
        return asdict(self)


def replay(report: Report, runner: Runner) -> ReplayOutcome:
    """
    Re-run a report's command and compare stdout and exit code byte-for-byte.

    Inputs whose content hash changed are listed as stale; a stale replay
    never counts as matching.
    """
    stale = []
    for path, digest in sorted(report.inputs.items()):
        try:
            if file_hash(path) != digest:
                stale.append(path)
        except InputError:
            stale.append(path)
    if report.tool_version != TOOL_VERSION:
        logger.warning(f"[Report] recorded with {report.tool_version}, replaying with {TOOL_VERSION}")

    exit_code, stdout = runner(report.command)
    matches = not stale and exit_code == report.exit_code and stdout == report.stdout
    if stale:
        logger.warning(f"[Report] inputs changed since recording: {', '.join(stale)}")
    return ReplayOutcome(matches, stale, stdout, exit_code)
