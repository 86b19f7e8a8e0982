"""
Preset groups and group definition files

Desk-scale groups shipped with the tool, plus loading and saving of group JSON
files ({"name", "degree", "generators"} with 0-based image lists).
"""

import json
import logging
from dataclasses import dataclass, asdict
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Tuple, Union

from config import DEFAULT_CONFIG, EngineConfig
from errors import InputError, UnknownPresetError
from group_core import FiniteGroup, make_group

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GroupPreset:
    """A named permutation group with its generators"""
    name: str
    degree: int
    generators: Tuple[Tuple[int, ...], ...]
    description: str
    aliases: Tuple[str, ...] = ()

    def to_dict(self):
        """Convert to dictionary for serialization"""
        return {"name": self.name, "degree": self.degree,
                "generators": [list(g) for g in self.generators]}


def _cyclic(n: int, aliases: Tuple[str, ...] = ()) -> GroupPreset:
    shift = tuple((i + 1) % n for i in range(n))
    return GroupPreset(f"C{n}", n, (shift,), f"cyclic group of order {n}", aliases)


# ==============================================================================
# CYCLIC GROUPS
# ==============================================================================

CYCLIC_PRESETS = [
    GroupPreset("trivial", 1, (), "trivial group", ("e", "C1")),
    _cyclic(2),
    _cyclic(3, ("Cp",)),
    _cyclic(4),
    _cyclic(5),
    _cyclic(6),
    _cyclic(8),
    _cyclic(9, ("Cp2",)),
    _cyclic(27, ("Cp3",)),
]

# ==============================================================================
# NON-CYCLIC GROUPS
# ==============================================================================

NONCYCLIC_PRESETS = [
    GroupPreset("S3", 3, ((1, 2, 0), (1, 0, 2)), "symmetric group on 3 points"),
    GroupPreset("D4", 4, ((1, 2, 3, 0), (0, 3, 2, 1)), "symmetries of the square, order 8", ("D8",)),
    GroupPreset("Q8", 8, ((1, 2, 3, 0, 6, 7, 5, 4), (4, 7, 5, 6, 2, 0, 1, 3)),
                "quaternion group as a regular permutation group"),
    GroupPreset("A4", 4, ((1, 2, 0, 3), (1, 0, 3, 2)), "alternating group on 4 points"),
    GroupPreset("S4", 4, ((1, 2, 3, 0), (1, 0, 2, 3)), "symmetric group on 4 points"),
]

ALL_PRESETS = CYCLIC_PRESETS + NONCYCLIC_PRESETS

_BY_NAME: Dict[str, GroupPreset] = {}
for _preset in ALL_PRESETS:
    for _key in (_preset.name,) + _preset.aliases:
        _BY_NAME[_key.lower()] = _preset


def preset_names() -> List[str]:
    return [p.name for p in ALL_PRESETS]


def find_preset(name: str) -> GroupPreset:
    """Look up a preset by name or alias ("C_4", "c4" and "C4" are the same)"""
    key = name.strip().replace("_", "").lower()
    if key not in _BY_NAME:
        raise UnknownPresetError(f"unknown group preset '{name}'; available: {', '.join(preset_names())}")
    return _BY_NAME[key]


@lru_cache(maxsize=None)
def _build(name: str) -> FiniteGroup:
    preset = find_preset(name)
    return make_group(preset.degree, preset.generators, preset.name)


def get_preset(name: str, config: EngineConfig = DEFAULT_CONFIG) -> FiniteGroup:
    """Build (once per process) the preset group with this name"""
    preset = find_preset(name)
    if config is DEFAULT_CONFIG:
        return _build(preset.name)
    return make_group(preset.degree, preset.generators, preset.name, config)


def group_from_dict(data: dict, config: EngineConfig = DEFAULT_CONFIG) -> FiniteGroup:
    """
    Build a group from its JSON form.

    Args:
        data: {"name": str, "degree": int, "generators": [[int, ...], ...]}

    Returns:
        FiniteGroup
    """
    try:
        name = str(data["name"])
        degree = int(data["degree"])
        generators = [tuple(int(i) for i in g) for g in data.get("generators", [])]
    except (AttributeError, KeyError, TypeError, ValueError) as e:
        raise InputError(f"malformed group definition: {e}") from None
    return make_group(degree, generators, name, config)


def group_to_dict(group: FiniteGroup) -> dict:
    return {"name": group.name, "degree": group.degree,
            "generators": [list(g.images) for g in group.generators]}


def load_group_file(path: Union[str, Path], config: EngineConfig = DEFAULT_CONFIG) -> FiniteGroup:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise InputError(f"group file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"group file {path} is not valid JSON: {e}") from None
    group = group_from_dict(data, config)
    logger.info(f"[Group] loaded {group.name} from {path.name}")
    return group


def save_group_file(group: FiniteGroup, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(group_to_dict(group), indent=2, sort_keys=True) + "\n")


def preset_catalog() -> List[dict]:
    """Rows describing every preset, used by `group list`"""
    rows = []
    for preset in ALL_PRESETS:
        group = get_preset(preset.name)
        row = asdict(preset)
        row.pop("generators")
        row["aliases"] = ", ".join(preset.aliases)
        row["order"] = group.order
        rows.append(row)
    return rows
