"""Reference groups with known structure, used by the test and acceptance suites.

Each row is (label, spec, expected multiplier orders, stabilizer order).
Labels follow the nTm census numbering; specs use the CLI mini-language.
"""

from __future__ import annotations

# metacyclic, M(G) = 0, stabilizer cyclic
METACYCLIC_TRIVIAL_M = [
    ("2T1", "C:2", [], 1),
    ("3T1", "C:3", [], 1),
    ("3T2", "D:3", [], 2),
    ("4T1", "C:4", [], 1),
    ("5T1", "C:5", [], 1),
    ("5T2", "D:5", [], 2),
    ("5T3", "F:5,4", [], 4),
    ("6T1", "C:6", [], 1),
    ("6T2", "G0:3,2,2,3", [], 1),
    ("6T5", "G0:3,6,2,3|H=a*b^2", [], 3),
    ("7T1", "C:7", [], 1),
    ("7T2", "D:7", [], 2),
    ("7T3", "F:7,3", [], 3),
    ("7T4", "F:7,6", [], 6),
    ("8T1", "C:8", [], 1),
    ("8T5", "Q:2", [], 1),
    ("8T7", "Mod:1|H=b", [], 2),
    ("8T8", "QD:1|H=b", [], 2),
    ("9T1", "C:9", [], 1),
    ("9T3", "D:9", [], 2),
    ("9T4", "G0:3,6,2,3|H=b^3", [], 2),
    ("9T6", "XS:3|H=a", [], 3),
    ("9T10", "G0:9,6,2,9|H=b", [], 6),
    ("10T1", "C:10", [], 1),
    ("10T2", "G0:5,2,4,5", [], 1),
    ("10T4", "F:5,4|H=b^2", [], 2),
    ("10T6", "G0:5,10,4,5|H=a*b^2", [], 5),
    ("11T1", "C:11", [], 1),
    ("11T2", "D:11", [], 2),
    ("11T3", "F:11,5", [], 5),
    ("11T4", "F:11,10", [], 10),
    ("12T1", "C:12", [], 1),
    ("12T5", "Q:3", [], 1),
    ("12T19", "G0:3,12,2,3|H=a*b^4", [], 3),
]

# metacyclic, M(G) != 0, M(H) = 0
METACYCLIC_NONTRIVIAL_M = [
    ("4T2", "G0:2,2,1,2", [2], 1),
    ("4T3", "D:4", [2], 2),
    ("6T3", "D:6", [2], 2),
    ("8T2", "G0:4,2,1,4", [2], 1),
    ("8T4", "G0:4,2,3,4", [2], 1),
    ("8T6", "D:8", [2], 2),
    ("9T2", "G0:3,3,1,3", [3], 1),
    ("10T3", "D:10", [2], 2),
    ("10T5", "G0:10,4,7,10|H=b", [2], 4),
    ("12T2", "G0:6,2,1,6", [2], 1),
    ("12T3", "G0:6,2,5,6", [2], 1),
    ("12T11", "G0:12,2,5,12|H=b", [2], 2),
    ("12T12", "D:12", [2], 2),
    ("12T14", "G0:12,2,7,12|H=b", [2], 2),
    ("12T18", "G0:6,6,5,6|H=a^4*b^4", [2], 3),
]

# not metacyclic
NONMETACYCLIC_ANCHORS = [
    ("4T4", "perm:(1,2,3);(2,3,4)", [2], 3),
    ("4T5", "perm:(1,2,3,4);(1,2)", [2], 6),
    ("8T3", "perm:(1,2)(3,4)(5,6)(7,8);(1,3)(2,4)(5,7)(6,8);(1,5)(2,6)(3,7)(4,8)", [2, 2, 2], 1),
    ("9T7", "perm:(1,2,3)(4,5,6)(7,8,9);(1,4,7)(2,5,8)(3,6,9);(4,5,6)(7,9,8)", [3, 3], 3),
    ("8T12", "perm:(1,4,7)(2,8,5);(1,6,2,3)(4,7,8,5)", [], 3),
]

ALL_ROWS = METACYCLIC_TRIVIAL_M + METACYCLIC_NONTRIVIAL_M + NONMETACYCLIC_ANCHORS


def degree_of(label: str) -> int:
    return int(label.split("T")[0])


def build(spec_text: str):
    from .cli import parse_group_spec
    from .families import build_group

    return build_group(parse_group_spec(spec_text))
