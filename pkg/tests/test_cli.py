
from cayleyci.cli import main
from cayleyci.io import decode_graph6, loads_connection_set, loads_report


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def records(text):
    return loads_report(text)[1]


def test_spiga_writes_file_and_census(tmp_path, capsys):
    path = tmp_path / "s.json"
    code, out, _ = run(capsys, "spiga", "-o", str(path))
    assert code == 0
    assert out.splitlines()[-1] == "4 + 27 + 81·9 = 760"
    assert "S_{0,1,0}\t81" in out
    assert len(loads_connection_set(path.read_text())) == 760
    again = tmp_path / "t.json"
    run(capsys, "spiga", "-o", str(again))
    assert path.read_bytes() == again.read_bytes()


def test_hat_small_demo(capsys, tmp_path):
    edges = tmp_path / "e.txt"
    code, out, _ = run(capsys, "hat", "--moduli", "5", "--elements", "0,1", "--n", "4", "--edges", str(edges))
    assert code == 0
    meta = records(out)[0]
    assert meta["vertices"] == 80 and meta["k"] == 2
    pairs = [line.split() for line in edges.read_text().splitlines()]
    assert sum(u != v for u, v in pairs) == 80 * meta["degree"] // 2
    assert sum(u == v for u, v in pairs) == 80


def test_hat_hypothesis_failure_exit_code(capsys):
    code, out, _ = run(capsys, "hat", "--moduli", "5", "--elements", "0,1", "--n", "3")
    assert code == 2
    h3 = next(r for r in records(out) if r.get("id") == "h3")
    assert h3["verdict"] == "false"


def test_hat_spiga_pipeline(capsys, tmp_path):
    path = tmp_path / "s.json"
    run(capsys, "spiga", "-o", str(path))
    code, out, _ = run(capsys, "hat", str(path), "--n", "3")
    assert code == 0
    assert records(out)[0]["vertices"] == 59049


def test_ci_test_exit_codes(capsys, tmp_path):
    assert run(capsys, "ci-test", "--moduli", "4", "--elements", "1,3", "--method", "babai")[0] == 0
    assert run(capsys, "dci-test", "--moduli", "4", "--elements", "1")[0] == 0
    code, out, _ = run(capsys, "dci-test", "--moduli", "8", "--elements", "0,1,2,4,5")
    assert code == 3
    assert records(out)[0]["witness"]["set"] == [[0], [1], [4], [5], [6]]
    path = tmp_path / "s.json"
    run(capsys, "spiga", "-o", str(path))
    assert run(capsys, "ci-test", str(path), "--directed")[0] == 4
    assert run(capsys, "ci-test", str(path), "--directed", "--method", "babai", "--vertex-cap", "100")[0] == 4


def test_usage_and_io_errors(capsys, tmp_path):
    assert run(capsys, "bogus")[0] == 1
    assert run(capsys, "spiga", "--unknown-flag")[0] == 1
    assert run(capsys, "ci-test", str(tmp_path / "missing.json"))[0] == 1
    bad = tmp_path / "bad.json"
    bad.write_text("not json")
    assert run(capsys, "ci-test", str(bad))[0] == 1


def test_env_override(capsys, monkeypatch):
    monkeypatch.setenv("CAYLEYCI_SUBGROUP_CAP", "1")
    assert run(capsys, "ci-test", "--moduli", "4", "--elements", "1,3", "--method", "babai")[0] == 4


def test_verify_suites(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "cliques", "--moduli", "5", "--elements", "0,1", "--n", "4")
    assert code == 0 and records(out)[0]["passed"]
    code, out, _ = run(capsys, "verify", "--suite", "outneighbour", "--moduli", "6")
    assert code == 0 and records(out)[0]["sets_checked"] == 64
    code, out, _ = run(capsys, "verify", "--suite", "phi", "--moduli", "5", "--elements", "0,1", "--n", "3")
    assert code == 0 and records(out)[0]["checked"] == 36
    code, out, _ = run(capsys, "verify", "--suite", "babai-agreement", "--groups", "4;2,2", "--workers", "1")
    assert code == 0 and records(out)[0]["passed"]
    code, out, _ = run(capsys, "verify", "--suite", "cliques", "--moduli", "7", "--elements", "0,1,3", "--n", "3", "--mode", "spot")
    assert code == 0 and records(out)[0]["degree"] == records(out)[0]["degree_direct"]


def test_cliques_command(capsys, tmp_path):
    code, out, _ = run(capsys, "cliques", "--moduli", "5", "--elements", "0,1", "--n", "3")
    kinds = {r["kind"] for r in records(out)}
    assert code == 0 and kinds == {"A_COSET_G", "B3_ABCOSET", "C3_SUBSET"}
    g = tmp_path / "g.txt"
    g.write_text("0 1\n1 0\n1 2\n2 1\n")
    code, out, _ = run(capsys, "cliques", str(g))
    assert [r["vertices"] for r in records(out)] == [[0, 1], [1, 2]]
    assert run(capsys, "cliques", str(g), "--budget", "1")[0] == 4


def test_export_and_double_cover(capsys, tmp_path):
    code, out, _ = run(capsys, "export", "--moduli", "5", "--elements", "1", "--format", "edges")
    assert code == 0 and out.splitlines() == ["0 1", "1 2", "2 3", "3 4", "4 0"]
    code, out, _ = run(capsys, "export", "--moduli", "5", "--elements", "0,1", "--n", "4", "--format", "meta")
    assert records(out)[0]["vertices"] == 80
    code, out, _ = run(capsys, "export", "--moduli", "5", "--elements", "0,1", "--n", "4", "--format", "graph6")
    assert code == 0 and decode_graph6(out).n == 80
    edges = tmp_path / "e.txt"
    edges.write_text("0 1\n1 2\n")
    code, out, _ = run(capsys, "double-cover", str(edges), "--to", "edges")
    assert code == 0 and out.splitlines() == ["0 4", "1 5"]


def test_witness_command(capsys):
    code, out, _ = run(capsys, "witness", "--moduli", "7", "--elements", "0,1,3")
    head = records(out)[0]
    assert code == 0 and head["p"] == 7 and "inversion" in head["tricks"]
    code, out, _ = run(capsys, "witness", "--moduli", "2,2", "--elements", "1")
    assert code == 2


def test_help_lists_subcommands(capsys):
    code, out, _ = run(capsys, "--help")
    assert code == 0
    for name in ["spiga", "hat", "witness", "ci-test", "dci-test", "cliques", "verify", "export", "double-cover"]:
        assert name in out
