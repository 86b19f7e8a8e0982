"""
Engine configuration

Resource caps, tool identity and environment overrides. The defaults are
sized for desk-scale groups (order <= 48).
"""

import os
from dataclasses import dataclass, asdict, replace
from typing import Optional


TOOL_NAME = "normcalc"
TOOL_VERSION = "0.3.0"

WORKSPACE_ENV = "NORMCALC_WORKSPACE"


@dataclass(frozen=True)
class EngineConfig:
    """Resource caps shared by every module"""

    # closure of generators in make_group
    max_group_elements: int = 10_000

    # subgroup lattice enumeration
    max_lattice_order: int = 48

    # enumerate_all searches over admissible maps
    max_enumeration_classes: int = 12

    # element-level pullbacks in the span bicategory
    max_apex_points: int = 10_000

    # largest group the subset brute-force subgroup oracle will touch
    brute_force_order: int = 12

    # candidate norms the subset brute-force indexing-system oracle will touch
    max_brute_force_pairs: int = 16

    def to_dict(self):
        """Convert to dictionary for serialization"""
        return asdict(self)

    def with_overrides(self, max_lattice_order: Optional[int] = None,
                       max_apex_points: Optional[int] = None) -> "EngineConfig":
        """Return a copy with the given caps replaced (None keeps the current value)"""
        changes = {}
        if max_lattice_order is not None:
            changes["max_lattice_order"] = max_lattice_order
        if max_apex_points is not None:
            changes["max_apex_points"] = max_apex_points
        return replace(self, **changes)

    @classmethod
    def from_env(cls) -> "EngineConfig":
        """
        Build a config from environment overrides.

        Reads NORMCALC_CAP_GROUP_ORDER and NORMCALC_MAX_APEX when set.
        """
        config = cls()
        order = os.getenv("NORMCALC_CAP_GROUP_ORDER")
        apex = os.getenv("NORMCALC_MAX_APEX")
        return config.with_overrides(
            max_lattice_order=int(order) if order else None,
            max_apex_points=int(apex) if apex else None,
        )


DEFAULT_CONFIG = EngineConfig()
