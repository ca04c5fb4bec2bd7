import json
import os
from pathlib import Path

import pytest

from nilalg.cli import main
from nilalg.documents import document_to_table, load_table
from nilalg import families as fam
from nilalg.field import GF, QQ

GOLDEN = Path(__file__).parent / "golden" / "cli"

TABLES = {
    "mu0_4.json": ["--family", "mu0", "--dim", "4"],
    "mu0_3_gf2.json": ["--family", "mu0", "--dim", "3", "--field", "gf2"],
    "mu1_1_5.json": ["--family", "mu1_1", "--dim", "5"],
    "mu1_2_5.json": ["--family", "mu1_2", "--dim", "5"],
    "mu1_2_6_gf5.json": ["--family", "mu1_2", "--dim", "6", "--field", "gf5"],
    "pi6_gf5.json": ["--family", "pi6", "--field", "gf5"],
    "pi7_gf5.json": ["--family", "pi7", "--field", "gf5"],
    "mu2_1_6_gf5.json": ["--family", "mu2_1", "--dim", "6", "--field", "GF(5)"],
    "lambda2_gf3.json": ["--family", "lambda2", "--field", "gf3"],
    "pi1_2_gf5.json": ["--family", "pi1", "--alpha", "2", "--field", "gf5"],
    "pi3_gf5.json": ["--family", "pi3", "--field", "gf5"],
    "muprime.json": ["--family", "muprime", "--dim", "6", "--p", "2", "--alpha", "1", "--beta", "1,3;0,-1"],
    "mu2_2_half.json": ["--family", "mu2_2", "--dim", "6", "--alpha", "1/2"],
}

# (golden stdout name, argv, exit code)
CASES = [
    ("check_mu0_4", ["check", "mu0_4.json"], 0),
    ("profile_mu0_4", ["profile", "mu0_4.json"], 0),
    ("profile_pi6", ["profile", "pi6_gf5.json"], 0),
    ("invariants_mu0_4", ["invariants", "mu0_4.json"], 0),
    ("invariants_mu21", ["invariants", "mu2_1_6_gf5.json"], 0),
    ("charseq_mu0_4", ["charseq", "mu0_4.json"], 0),
    ("charseq_mu21_exhaustive", ["charseq", "mu2_1_6_gf5.json", "--strategy", "exhaustive"], 0),
    ("charseq_pi6_sampled", ["charseq", "pi6_gf5.json", "--strategy", "sampled", "--count", "10"], 0),
    ("grade_mu0_4", ["grade", "mu0_4.json"], 0),
    ("grade_mu12", ["grade", "mu1_2_6_gf5.json"], 0),
    ("grade_lambda2_search", ["grade", "lambda2_gf3.json", "--method", "search"], 0),
    ("iso_self_search", ["iso", "mu0_3_gf2.json", "mu0_3_gf2.json", "--search"], 0),
    ("iso_centers", ["iso", "mu1_1_5.json", "mu1_2_5.json"], 1),
    ("iso_pi_search", ["iso", "pi6_gf5.json", "pi7_gf5.json", "--search"], 1),
    ("iso_exhausted", ["iso", "pi1_2_gf5.json", "pi3_gf5.json", "--search", "--workers", "2"], 1),
    ("iso_invariants_agree", ["iso", "pi6_gf5.json", "pi6_gf5.json"], 2),
    ("iso_witness_ok", ["iso", "mu0_4.json", "mu0_4.json", "--witness", "identity4.json"], 0),
    ("iso_witness_bad", ["iso", "mu0_4.json", "mu0_4.json", "--witness", "scale4.json"], 2),
    ("census_dim2_gf2", ["census", "--dim", "2", "--field", "gf2", "--classify"], 0),
    ("census_dim2_gf3", ["census", "--dim", "2", "--field", "gf3"], 0),
    ("verify_census_dim2", ["verify-paper", "--suite", "census", "--dim", "2"], 0),
    ("build_muprime_summary", ["build", "--family", "muprime", "--dim", "6", "--p", "2", "--alpha", "1",
                               "--beta", "1,3;0,-1", "--out", "x.json"], 0),
]


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for name, argv in TABLES.items():
        assert main(["build", *argv, "--out", name]) == 0
    ident = [["1" if i == j else "0" for j in range(4)] for i in range(4)]
    Path("identity4.json").write_text(json.dumps({"matrix": ident}))
    scale = [row[:] for row in ident]
    scale[0][0] = "2"
    Path("scale4.json").write_text(json.dumps({"matrix": scale}))
    return tmp_path


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name,argv,code", CASES, ids=[c[0] for c in CASES])
def test_golden_stdout(workdir, capsys, name, argv, code):
    capsys.readouterr()
    got_code, out, _ = run(argv, capsys)
    assert got_code == code
    assert out == (GOLDEN / f"{name}.txt").read_text()


def test_built_tables_match_constructors(workdir):
    assert load_table("mu0_4.json") == fam.mu0(4)
    assert load_table("muprime.json") == fam.mu_prime(6, 2, 1, [[1, 3], [0, -1]])
    assert load_table("mu2_2_half.json") == fam.mu2(2, 6, QQ(1) / 2)
    assert load_table("pi7_gf5.json") == fam.pi(7, F=GF(5))


def test_build_to_stdout(capsys):
    code, out, _ = run(["build", "--family", "mu0", "--dim", "4"], capsys)
    assert code == 0
    assert document_to_table(json.loads(out)) == fam.mu0(4)
    assert json.loads(out) == json.loads((Path(__file__).parent / "golden" / "families" / "mu0_4.json")
                                         .read_text())["table"]


def test_reports_written(workdir, capsys):
    assert main(["check", "mu0_4.json", "--out", "r.json"]) == 0
    rep = json.loads(Path("r.json").read_text())
    assert rep == {"associative": True, "nilpotent": True, "nilindex": 5, "associativity_defects": []}
    assert main(["iso", "mu0_3_gf2.json", "mu0_3_gf2.json", "--search", "--out", "w.json"]) == 0
    rep = json.loads(Path("w.json").read_text())
    assert rep["outcome"] == "Witness"
    assert rep["witness"] == [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]
    # a saved report doubles as a witness file
    assert main(["iso", "mu0_3_gf2.json", "mu0_3_gf2.json", "--witness", "w.json"]) == 0
    assert main(["census", "--dim", "2", "--field", "gf3", "--classify", "--out", "c.json",
                 "--csv", "c.csv"]) == 0
    rep = json.loads(Path("c.json").read_text())
    assert rep["iso_class_count"] == 2 and [c["orbit_size"] for c in rep["classes"]] == [1, 8]
    assert Path("c.csv").read_text().splitlines()[0] == "class,orbit_size,profile,products"
    assert not [p for p in os.listdir(".") if p.startswith(".tmp")]


def test_reports_are_byte_identical(workdir, capsys):
    for i in (1, 2):
        assert main(["census", "--dim", "2", "--field", "gf3", "--classify", "--out", f"c{i}.json",
                     "--workers", str(i)]) == 0
        assert main(["charseq", "pi6_gf5.json", "--strategy", "sampled", "--out", f"s{i}.json"]) == 0
    assert Path("c1.json").read_bytes() == Path("c2.json").read_bytes()
    assert Path("s1.json").read_bytes() == Path("s2.json").read_bytes()


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["check"],
    ["verify-paper"],
    ["verify-paper", "--suite", ","],
    ["verify-paper", "--suite", "s9"],
    ["build", "--family", "mu9"],
    ["build", "--family", "mu1_1", "--dim", "2"],
    ["build", "--family", "mu0", "--dim", "3", "--field", "gf4"],
    ["check", "missing.json"],
    ["census", "--dim", "2", "--field", "gf2", "--csv", "x.csv"],
    ["iso", "mu0_4.json", "mu0_4.json", "--search", "--witness", "identity4.json"],
    ["charseq", "mu0_4.json", "--strategy", "exhaustive"],
])
def test_usage_errors(workdir, capsys, argv):
    code, _, err = run(argv, capsys)
    assert code == 64
    assert err


def test_malformed_document(workdir, capsys):
    Path("bad.json").write_text('{"schema_version": 1, "field": "Q", "dim": 1, "products": [], "x": 0}')
    Path("broken.json").write_text("{")
    Path("badw.json").write_text('{"matrix": "no"}')
    assert run(["check", "bad.json"], capsys)[0] == 65
    assert run(["profile", "broken.json"], capsys)[0] == 65
    assert run(["iso", "mu0_4.json", "mu0_4.json", "--witness", "badw.json"], capsys)[0] == 65


def test_not_nilpotent_input(workdir, capsys):
    Path("idem.json").write_text(json.dumps({"schema_version": 1, "field": "Q", "dim": 1,
                                             "products": [{"i": 1, "j": 1, "out": [[1, "1"]]}]}))
    code, out, _ = run(["check", "idem.json"], capsys)
    assert code == 0 and out == "associative: true; nilindex: not nilpotent\n"
    assert run(["profile", "idem.json"], capsys)[0] == 65


def test_budget_exhaustion(workdir, capsys, monkeypatch):
    assert main(["build", "--family", "mu2_3", "--dim", "6", "--field", "gf5", "--out", "m3.json"]) == 0
    assert main(["build", "--family", "mu2_4", "--dim", "6", "--field", "gf5", "--out", "m4.json"]) == 0
    assert run(["iso", "pi6_gf5.json", "pi6_gf5.json", "--search", "--max-nodes", "1"], capsys)[0] == 70
    monkeypatch.setenv("NILALG_MAX_NODES", "1")
    assert run(["iso", "pi6_gf5.json", "pi6_gf5.json", "--search"], capsys)[0] == 70
    assert run(["census", "--dim", "3", "--field", "gf3"], capsys)[0] == 70


def test_dimension_mismatch(workdir, capsys):
    assert run(["iso", "mu0_4.json", "mu1_1_5.json"], capsys)[0] == 65
