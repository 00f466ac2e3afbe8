import json
import subprocess
import sys

import pytest

from hnpgroup.cli import (
    COLUMNS,
    EXIT_ERROR,
    EXIT_INCONCLUSIVE,
    EXIT_OK,
    CatalogError,
    SpecError,
    default_catalog_path,
    load_catalog,
    main,
    parse_degrees,
    parse_filter,
    parse_group_spec,
)
from hnpgroup.families import GroupSpec, InvalidParameters, build_group


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def tsv_rows(out):
    lines = out.rstrip("\n").split("\n")
    assert tuple(lines[0].split("\t")) == COLUMNS
    return [dict(zip(COLUMNS, line.split("\t"))) for line in lines[1:]]


class TestSpecParsing:
    def test_examples(self):
        assert parse_group_spec("D:4") == GroupSpec("D", (4,))
        assert parse_group_spec("G0:8,2,3,8") == GroupSpec("G0", (8, 2, 3, 8))
        spec = parse_group_spec("perm:(1,2,3,4,5);(2,3,5,4)")
        assert spec.kind == "perm" and len(spec.generators) == 2
        assert build_group(spec).order() == 20
        assert parse_group_spec("D:6|H=reflection").stabilizer == "reflection"

    @pytest.mark.parametrize("text,pos", [("X:3", 0), ("D4", 2), ("D:x", 2), ("G0:4,2,,4", 7),
                                          ("perm:(1,2;(3,4)", 5), ("C:3|K=a", 4), ("C:3|H=", 6)])
    def test_errors_report_position(self, text, pos):
        with pytest.raises(SpecError) as exc:
            parse_group_spec(text)
        assert exc.value.position == pos and exc.value.expected

    def test_invalid_parameters_are_rejected(self):
        with pytest.raises(InvalidParameters):
            parse_group_spec("G0:4,2,2,4")


class TestCatalog:
    def test_bundled_catalog_validates(self):
        recs = load_catalog(default_catalog_path())
        assert [r.label for r in recs[:3]] == ["2T1", "3T1", "3T2"]
        assert {r.degree for r in recs} == {2, 3, 4, 5, 6, 7}
        assert len(recs) == 36
        for r in recs:
            g = r.group()
            assert g.degree == r.degree

    def test_line_format(self, tmp_path):
        p = tmp_path / "cat.txt"
        p.write_text("# comment\n\n3 2 (1,2,3);(1,2)  # S3\n")
        (rec,) = load_catalog(p)
        assert rec.label == "3T2" and rec.note == "S3" and rec.group().order() == 6

    def test_errors_name_every_bad_line(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("3 1 (1,2,3)\n4 1 (1,2)(3,4)\n3 1 (1,3,2)\n5 1 (1,2\n2 1\n")
        with pytest.raises(CatalogError) as exc:
            load_catalog(p)
        text = "\n".join(exc.value.problems)
        assert len(exc.value.problems) == 4
        for lineno in (2, 3, 4, 5):
            assert f"bad.txt:{lineno}:" in text
        assert "transitive" in text and "duplicate" in text

    def test_verify_command(self, capsys, tmp_path):
        code, out, _ = run(capsys, "verify-catalog")
        assert code == EXIT_OK and out.startswith("36 records OK")
        p = tmp_path / "bad.txt"
        p.write_text("4 1 (1,2)(3,4)\n")
        code, _, err = run(capsys, "verify-catalog", "--catalog", str(p))
        assert code == EXIT_ERROR and "transitive" in err


class TestAnalyze:
    def test_c2(self, capsys):
        code, out, _ = run(capsys, "analyze", "C:2")
        (row,) = tsv_rows(out)
        assert code == EXIT_OK
        assert row["metacyclic"] == "yes" and row["M(G)"] == "0"
        assert row["verdict"].startswith("ZERO HOLDS_UNCONDITIONALLY")

    def test_d6_reflection(self, capsys):
        code, out, _ = run(capsys, "analyze", "D:6|H=reflection")
        (row,) = tsv_rows(out)
        assert row["|G|"] == "12" and row["|H|"] == "2" and row["M(G)"] == "[2]"
        assert row["verdict"].startswith("ISO_TO_MG")

    def test_xs3(self, capsys):
        code, out, _ = run(capsys, "analyze", "XS:3", "--format", "json")
        (row,) = json.loads(out)
        assert list(row) == list(COLUMNS)
        assert row["metacyclic"] == "yes" and row["M(G)"] == "0" and row["|G|"] == "27"

    def test_spec_round_trips_through_label(self, capsys):
        for text in ("D:6|H=reflection", "G0:3,6,2,3|H=a*b^2", "perm:(1,2,3);(1,2)"):
            _, out, _ = run(capsys, "analyze", text)
            (row,) = tsv_rows(out)
            assert parse_group_spec(row["label"]) == parse_group_spec(text)

    def test_inconclusive_exit_code(self, capsys):
        code, out, _ = run(capsys, "analyze", "perm:(1,2,3,4);(1,2)|H=(1,2);(3,4)", "--budget-h2", "10")
        (row,) = tsv_rows(out)
        assert code == EXIT_INCONCLUSIVE and "INCONCLUSIVE" in row["verdict"]
        assert row["M(G)"] == "skipped(budget)"

    def test_error_exit_codes(self, capsys):
        assert run(capsys, "analyze", "D:2")[0] == EXIT_ERROR
        assert run(capsys, "analyze", "Y:2")[0] == EXIT_ERROR
        code, _, err = run(capsys, "analyze", "C:4|H=a^2")
        assert code == EXIT_ERROR and "core" in err

    def test_timings_flag(self, capsys):
        _, out, _ = run(capsys, "analyze", "C:3")
        assert tsv_rows(out)[0]["timings"] == "skipped(deterministic output)"
        _, out, _ = run(capsys, "analyze", "C:3", "--timings")
        assert tsv_rows(out)[0]["timings"].endswith("s")


class TestTable:
    def test_filters(self):
        assert parse_filter("metacyclic,M=0") == [("metacyclic", True), ("mg_zero", True)]
        assert parse_filter(None) == []
        with pytest.raises(ValueError):
            parse_filter("abelian")
        assert parse_degrees("2-4") == (2, 4) and parse_degrees("5") == (5, 5)

    def test_metacyclic_trivial_multiplier_degrees_2_to_4(self, capsys):
        code, out, _ = run(capsys, "table", "--degrees", "2-4", "--filter", "metacyclic,M=0", "--workers", "1")
        assert code == EXIT_OK
        assert [r["label"] for r in tsv_rows(out)] == ["2T1", "3T1", "3T2", "4T1"]

    def test_nontrivial_multiplier_degrees_2_to_4(self, capsys):
        _, out, _ = run(capsys, "table", "--degrees", "2-4", "--filter", "M!=0,MH=0,cond0", "--workers", "1")
        rows = tsv_rows(out)
        assert [r["label"] for r in rows] == ["4T2", "4T3", "4T4", "4T5"]
        _, out, _ = run(capsys, "table", "--degrees", "2-4", "--filter", "metacyclic,M!=0,MH=0,cond0",
                        "--workers", "1")
        rows = tsv_rows(out)
        assert [(r["label"], r["M(G)"]) for r in rows] == [("4T2", "[2]"), ("4T3", "[2]")]

    def test_metacyclic_trivial_multiplier_degrees_5_to_7(self, capsys):
        _, out, _ = run(capsys, "table", "--degrees", "5-7", "--filter", "metacyclic,M=0,cond0",
                        "--workers", "2", "--budget-h2", "3000")
        assert [r["label"] for r in tsv_rows(out)] == [
            "5T1", "5T2", "5T3", "6T1", "6T2", "6T5", "7T1", "7T2", "7T3", "7T4"]

    def test_byte_identical_output(self, capsys):
        outs = []
        for workers in ("1", "3", "1"):
            _, out, _ = run(capsys, "table", "--degrees", "2-5", "--workers", workers, "--budget-h2", "3000")
            outs.append(out)
        assert outs[0] == outs[1] == outs[2]

    def test_empty_catalog(self, capsys, tmp_path):
        p = tmp_path / "empty.txt"
        p.write_text("# nothing here\n")
        code, out, _ = run(capsys, "table", "--catalog", str(p))
        assert code == EXIT_OK and tsv_rows(out) == []
        code, out, _ = run(capsys, "table", "--catalog", str(p), "--format", "json")
        assert json.loads(out) == []


class TestMultiplierCommand:
    def test_engines_side_by_side(self, capsys):
        code, out, _ = run(capsys, "multiplier", "D:4")
        head, cells = out.rstrip("\n").split("\n")
        assert head.split("\t") == ["family", "uct", "sylow"]
        fam, uct, syl = cells.split("\t")
        assert fam == uct == "[2]" and syl.startswith("skipped(")

    def test_raw_generators(self, capsys):
        _, out, _ = run(capsys, "multiplier", "perm:(1,2,3);(2,3,4)")
        fam, uct, _ = out.rstrip("\n").split("\n")[1].split("\t")
        assert fam.startswith("skipped(") and uct == "[2]"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hnpgroup", "analyze", "C:3"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("label\t")
