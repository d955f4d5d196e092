"""Group files and the bundled data directory.

Group file: JSON ``{"name": ..., "generators": [[[0/1 ...], ...], ...]}``;
bundled files also record the stated ``order`` and abstract ``type``.
``QCF_DATA_DIR`` overrides the bundled location.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .geometry import Code, Subspace, parse_appendix_text
from .gf2 import BitMatrix
from .groups import MatrixGroup, closure, cyclic_subgroup_classes, orbit_space

_BUNDLED = Path(__file__).parent / "data"

# the 33 surviving group classes plus an alternative G_4_6 presentation
SURVIVING_GROUPS = (
    ["G_1_1", "G_2_1", "G_3_1", "G_3_2"]
    + [f"G_4_{i}" for i in range(1, 8)]
    + ["G_5_1", "G_6_1", "G_6_2", "G_6_3", "G_7_1", "G_7_2"]
    + [f"G_8_{i}" for i in range(1, 12)]
    + ["G_9_1", "G_9_2", "G_12_1", "G_14_1", "G_16_1"]
)
ALT_G46 = "G_4_6_alt"


def data_dir() -> Path:
    env = os.environ.get("QCF_DATA_DIR")
    return Path(env) if env else _BUNDLED


@dataclass(frozen=True)
class GroupRecord:
    name: str
    generators: tuple[BitMatrix, ...]
    stated_order: int | None = None
    stated_type: str | None = None

    def group(self) -> MatrixGroup:
        return MatrixGroup(7 if not self.generators else self.generators[0].ncols, self.generators, name=self.name)

    def closure(self) -> MatrixGroup:
        n = self.generators[0].ncols if self.generators else 7
        return closure(self.generators, n, name=self.name)


def parse_group_json(text: str, n: int = 7) -> GroupRecord:
    d = json.loads(text)
    gens = tuple(BitMatrix.from_lists(m) for m in d.get("generators", []))
    for g in gens:
        if g.shape != (n, n) and gens[0].shape != g.shape:
            raise ValueError("generators differ in shape")
    return GroupRecord(d.get("name", "unnamed"), gens, d.get("order"), d.get("type"))


def load_group_file(path: str | Path) -> GroupRecord:
    return parse_group_json(Path(path).read_text())


def group_to_json(group: MatrixGroup, name: str | None = None, **extra) -> str:
    d = {"name": name or group.name or "group", "generators": [g.to_lists() for g in group.generators]}
    d.update(extra)
    return json.dumps(d)


def bundled_group(name: str) -> GroupRecord:
    return load_group_file(data_dir() / "groups" / f"{name}.json")


def cyclic_record(order: int, index: int = 1, n: int = 7) -> GroupRecord:
    """The index-th (1-based) conjugacy class of cyclic subgroups of the given order."""
    classes = cyclic_subgroup_classes(n, order)
    if not 1 <= index <= len(classes):
        raise ValueError(f"order {order} has {len(classes)} cyclic classes; index {index} is out of range")
    g = classes[index - 1]
    return GroupRecord(f"C_{order}_{index}", g.generators, order, f"Z_{order}")


def resolve_group(spec: str) -> GroupRecord:
    """A bundled name such as ``G_4_6``, ``cyclic:M[:I]``, or a path to a group file."""
    if spec.startswith("cyclic:"):
        parts = [int(x) for x in spec.split(":")[1:]]
        return cyclic_record(*parts[:2])
    p = Path(spec)
    if p.suffix == ".json" or p.exists():
        return load_group_file(p)
    return bundled_group(spec)


def appendix_code_path() -> Path:
    return data_dir() / "appendix_c.txt"


def appendix_representatives() -> list[Subspace]:
    return parse_appendix_text(appendix_code_path().read_text())


def expand_orbits(reps: list[Subspace], group: MatrixGroup) -> list[Subspace]:
    """All images of the representatives under the group, without repeats."""
    os_ = orbit_space(7, reps[0].dim, group) if reps else None
    out: dict[int, Subspace] = {}
    for r in reps:
        idx = os_.orbit_of[r.key][0]
        for key in os_.orbits[idx]:
            out.setdefault(key, Subspace.from_key(key, r.dim, r.n))
    return list(out.values())


def appendix_code() -> Code:
    g46 = bundled_group("G_4_6").closure()
    return Code(tuple(expand_orbits(appendix_representatives(), g46)))
