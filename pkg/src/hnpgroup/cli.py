"""Command-line interface: analyze single groups, batch reports over a catalog of transitive groups."""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources

from .cohomology import ENGINES, BudgetExceeded
from .families import FAMILY_KINDS, GroupSpec, InvalidParameters, NoClosedForm, build_group, validate_spec
from .hnp import Conclusion, NotCoreFree, NotTransitive, hnp_verdict
from .permgroup import CapExceeded, PermGroup, Permutation, is_transitive, parse_cycles

COLUMNS = ("label", "|G|", "|H|", "metacyclic", "zgroup", "M(G)", "M(H)", "cond0", "verdict",
           "tamagawa", "timings")

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


# ---------------------------------------------------------------------------
# group specs


class SpecError(ValueError):
    def __init__(self, text, position, expected):
        self.text = text
        self.position = position
        self.expected = expected
        super().__init__(f"bad group spec {text!r} at position {position}: expected {expected}")


_INT = re.compile(r"-?\d+")


def parse_group_spec(text: str) -> GroupSpec:
    """Parse `KIND:params` with an optional `|H=<subgroup>` suffix."""
    body, stab = text, None
    if "|" in text:
        cut = text.index("|")
        body = text[:cut]
        rest = text[cut + 1:]
        if not rest.startswith("H="):
            raise SpecError(text, cut + 1, "'H=' after '|'")
        stab = rest[2:]
        if not stab.strip():
            raise SpecError(text, cut + 3, "a subgroup description")
    if ":" not in body:
        raise SpecError(text, len(body), "':' after the family name")
    kind, params = body.split(":", 1)
    if kind not in FAMILY_KINDS:
        raise SpecError(text, 0, "one of " + ", ".join(FAMILY_KINDS))
    start = len(kind) + 1
    if kind == "perm":
        gens = []
        pos = start
        for piece in params.split(";"):
            try:
                parse_cycles(piece)
            except ValueError:
                raise SpecError(text, pos, "cycle notation such as (1,2,3)") from None
            gens.append(piece.strip())
            pos += len(piece) + 1
        spec = GroupSpec("perm", (), tuple(gens), stab)
    else:
        values = []
        pos = start
        for piece in params.split(","):
            if not _INT.fullmatch(piece.strip()):
                raise SpecError(text, pos, "an integer")
            values.append(int(piece))
            pos += len(piece) + 1
        spec = GroupSpec(kind, tuple(values), (), stab)
    validate_spec(spec)
    return spec


# ---------------------------------------------------------------------------
# catalog


@dataclass(frozen=True)
class CatalogRecord:
    degree: int
    index: int
    generators: tuple
    note: str = ""

    @property
    def label(self) -> str:
        return f"{self.degree}T{self.index}"

    def group(self) -> PermGroup:
        perms = [Permutation.from_cycles(x, self.degree) for x in self.generators]
        return PermGroup(perms, degree=self.degree, label=self.label)


class CatalogError(ValueError):
    def __init__(self, problems):
        self.problems = problems
        super().__init__("\n".join(problems))


def default_catalog_path() -> str:
    return str(resources.files("hnpgroup").joinpath("data/transitive_2_7.txt"))


def _parse_record(line: str):
    body, _, note = line.partition("#")
    parts = body.split(None, 2)
    if len(parts) < 3:
        raise ValueError("expected '<degree> <index> <gen>;<gen>;...'")
    n, m = int(parts[0]), int(parts[1])
    gens = tuple(x.strip() for x in parts[2].split(";") if x.strip())
    if n < 1 or m < 1:
        raise ValueError("degree and index must be positive")
    perms = []
    for gtext in gens:
        parse_cycles(gtext)
        perms.append(Permutation.from_cycles(gtext, n))
    if not is_transitive(PermGroup(perms, degree=n)):
        raise ValueError("generators do not act transitively")
    return CatalogRecord(n, m, gens, note.strip())


def load_catalog(path) -> list:
    problems, records, seen = [], [], set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                rec = _parse_record(line)
            except (ValueError, IndexError) as exc:
                problems.append(f"{path}:{lineno}: {exc}")
                continue
            key = (rec.degree, rec.index)
            if key in seen:
                problems.append(f"{path}:{lineno}: duplicate record {rec.label}")
                continue
            seen.add(key)
            records.append(rec)
    if problems:
        raise CatalogError(problems)
    records.sort(key=lambda r: (r.degree, r.index))
    return records


# ---------------------------------------------------------------------------
# report rows


@dataclass
class ReportRow:
    label: str
    order_g: str
    order_h: str
    metacyclic: str
    zgroup: str
    m_g: str
    m_h: str
    cond0: str
    verdict: str
    tamagawa: str
    timings: str
    conclusion: str = ""
    flags: dict | None = None

    def values(self):
        return (self.label, self.order_g, self.order_h, self.metacyclic, self.zgroup, self.m_g,
                self.m_h, self.cond0, self.verdict, self.tamagawa, self.timings)

    def as_dict(self):
        return dict(zip(COLUMNS, self.values()))


def _flag(x):
    if x is None:
        return "skipped(unknown)"
    return "yes" if x else "no"


def _inv(x):
    return "skipped(budget)" if x is None else str(x)


def analyze_group(label: str, g: PermGroup, options: dict) -> ReportRow:
    t0 = time.perf_counter()
    v = hnp_verdict(g, budget_h2=options.get("budget_h2"), direct_h2=options.get("direct_h2", True),
                    sha_policy=options.get("sha_policy", "auto"))
    elapsed = time.perf_counter() - t0
    verdict = f"{v.status_text} {v.hnp_conclusion.value}"
    if v.sha_omega is not None:
        verdict += f" sha={v.sha_omega}"
    tam = str(v.tamagawa) if v.tamagawa is not None else "skipped(hypotheses unmet)"
    timing = f"{elapsed:.3f}s" if options.get("timings") else "skipped(deterministic output)"
    flags = {"metacyclic": v.metacyclic, "mg_zero": None if v.multiplier_g is None else v.multiplier_g.is_trivial,
             "mh_zero": None if v.multiplier_h is None else v.multiplier_h.is_trivial, "cond0": v.cond0}
    return ReportRow(label, str(v.order_g), str(v.order_h), _flag(v.metacyclic), _flag(v.zgroup),
                     _inv(v.multiplier_g), _inv(v.multiplier_h), _flag(v.cond0), verdict, tam, timing,
                     v.hnp_conclusion.value, flags)


_FILTER_TERMS = {
    "metacyclic": ("metacyclic", True), "!metacyclic": ("metacyclic", False),
    "M=0": ("mg_zero", True), "M!=0": ("mg_zero", False),
    "MH=0": ("mh_zero", True), "MH!=0": ("mh_zero", False),
    "cond0": ("cond0", True), "!cond0": ("cond0", False),
}


def parse_filter(text: str | None):
    if not text:
        return []
    out = []
    for term in (x.strip() for x in text.split(",")):
        if term not in _FILTER_TERMS:
            raise ValueError(f"unknown filter term {term!r}; known: {', '.join(_FILTER_TERMS)}")
        out.append(_FILTER_TERMS[term])
    return out


def row_passes(row: ReportRow, terms) -> bool:
    return all(row.flags.get(key) is want for key, want in terms)


def parse_degrees(text: str | None):
    if not text:
        return None
    lo, _, hi = text.partition("-")
    lo = int(lo)
    hi = int(hi) if hi else lo
    return lo, hi


def _record_row(args):
    rec, options = args
    return analyze_group(rec.label, rec.group(), options)


def table_rows(records, options, filter_terms=(), workers=1):
    jobs = [(rec, options) for rec in records]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_record_row, jobs))
    else:
        rows = [_record_row(j) for j in jobs]
    return [r for r in rows if row_passes(r, filter_terms)]


def render(rows, fmt: str) -> str:
    if fmt == "json":
        return json.dumps([r.as_dict() for r in rows], indent=2, ensure_ascii=False) + "\n"
    lines = ["\t".join(COLUMNS)]
    lines += ["\t".join(r.values()) for r in rows]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands


def _options(ns) -> dict:
    return {"budget_h2": ns.budget_h2, "direct_h2": not ns.no_direct_h2, "sha_policy": ns.sha_omega,
            "timings": ns.timings}


def cmd_analyze(ns, out=None) -> int:
    out = out or sys.stdout
    spec = parse_group_spec(ns.spec)
    g = build_group(spec)
    row = analyze_group(str(spec), g, _options(ns))
    out.write(render([row], ns.format))
    return EXIT_INCONCLUSIVE if row.conclusion == Conclusion.INCONCLUSIVE.value else EXIT_OK


def cmd_table(ns, out=None) -> int:
    out = out or sys.stdout
    records = load_catalog(ns.catalog or default_catalog_path())
    rng = parse_degrees(ns.degrees)
    if rng is not None:
        records = [r for r in records if rng[0] <= r.degree <= rng[1]]
    terms = parse_filter(ns.filter)
    workers = ns.workers if ns.workers else (os.cpu_count() or 1)
    rows = table_rows(records, _options(ns), terms, workers)
    out.write(render(rows, ns.format))
    return EXIT_OK


def cmd_verify_catalog(ns, out=None) -> int:
    out = out or sys.stdout
    records = load_catalog(ns.catalog or default_catalog_path())
    degrees = sorted({r.degree for r in records})
    out.write(f"{len(records)} records OK (degrees {', '.join(map(str, degrees)) or 'none'})\n")
    return EXIT_OK


def cmd_multiplier(ns, out=None) -> int:
    out = out or sys.stdout
    spec = parse_group_spec(ns.spec)
    g = build_group(spec)
    cells = []
    for name, fn in ENGINES.items():
        try:
            cells.append(str(fn(g, ns.budget_h2)))
        except (BudgetExceeded, CapExceeded, NoClosedForm) as exc:
            cells.append(f"skipped({exc})")
    out.write("\t".join(ENGINES) + "\n" + "\t".join(cells) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hnpgroup", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--budget-h2", type=int, default=None, metavar="VARS",
                        help="cap on |G|^2 * rank for cocycle computations")
        sp.add_argument("--no-direct-h2", action="store_true", help="never solve for H^2 directly")
        sp.add_argument("--sha-omega", choices=("auto", "always", "never"), default="auto")
        sp.add_argument("--format", choices=("tsv", "json"), default="tsv")
        sp.add_argument("--timings", action="store_true", help="fill the timings column")

    a = sub.add_parser("analyze", help="analyze one group given as a spec")
    a.add_argument("spec")
    common(a)
    a.set_defaults(func=cmd_analyze)

    t = sub.add_parser("table", help="report over a catalog of transitive groups")
    t.add_argument("--catalog", default=None)
    t.add_argument("--degrees", default=None, help="e.g. 2-4")
    t.add_argument("--filter", default=None, help="comma list of: " + ", ".join(_FILTER_TERMS))
    t.add_argument("--workers", type=int, default=0)
    common(t)
    t.set_defaults(func=cmd_table)

    v = sub.add_parser("verify-catalog", help="validate a catalog file")
    v.add_argument("--catalog", default=None)
    v.set_defaults(func=cmd_verify_catalog)

    m = sub.add_parser("multiplier", help="Schur multiplier from every engine")
    m.add_argument("spec")
    m.add_argument("--budget-h2", type=int, default=None, metavar="VARS")
    m.set_defaults(func=cmd_multiplier)
    return p


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        return ns.func(ns)
    except (SpecError, InvalidParameters, CatalogError, NotTransitive, NotCoreFree, ValueError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
