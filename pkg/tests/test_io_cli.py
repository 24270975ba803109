import json
import subprocess
import sys
from fractions import Fraction

import pytest

from llb import cli, hyperbolic, library, local, lueck
from llb import io as llbio
from llb.covers import PermutationRep
from llb.errors import InputError, ParseError, TooLargeForExact
from llb.complex import hodge_laplacian


# ---------------------------------------------------------------- round trips


@pytest.mark.parametrize("name", sorted(library.corpus()))
def test_complex_round_trip(name):
    K = library.corpus()[name]
    text = llbio.format_complex(K)
    K2 = llbio.parse_complex(text)
    assert K2 == K
    assert llbio.format_complex(K2) == text


@pytest.mark.parametrize("G", [library.cycle_graph(7), library.petersen_graph(), library.star_graph(4),
                               library.graph_from_edges([(0, 1)], vertices=[5])])
def test_graph_round_trip(G):
    text = llbio.format_graph(G)
    assert llbio.parse_graph(text) == {v: set(nb) for v, nb in G.items()}
    assert llbio.format_graph(llbio.parse_graph(text)) == text


def test_perm_round_trip():
    rep = PermutationRep(4, ((1, 2, 3, 0), (0, 1, 3, 2)))
    text = llbio.format_perm_rep(rep)
    back = llbio.parse_perm_rep(text)
    assert back.degree == 4 and back.generators == rep.generators


def test_surface_round_trip():
    S = hyperbolic.genus2_octagon_surface()
    S2 = llbio.parse_surface(llbio.format_surface(S))
    assert S2.label == S.label and S2.domain_radius == S.domain_radius and S2.area == S.area
    for a, b in zip(S.generators, S2.generators):
        assert (a == b).all()


def test_ball_statistics_json_round_trip():
    stats = local.ball_census(library.petersen_graph(), 2)
    assert local.BallStatistics.from_dict(json.loads(json.dumps(stats.to_dict()))) == stats


# ---------------------------------------------------------------- parse errors


def test_parse_error_reports_line():
    with pytest.raises(ParseError) as exc:
        llbio.parse_complex("dim 0\n0\n1\ndim 1\n0 1 2\n")
    assert exc.value.line == 5


@pytest.mark.parametrize("text", ["", "0\n", "dim 0\nx\n", "dim 1\n0\n", "dim 0\n0\ndim 0\n1\n"])
def test_bad_complex_text(text):
    with pytest.raises(ParseError):
        llbio.parse_complex(text)


def test_repeated_image_named():
    with pytest.raises(ParseError, match="image 1 repeated"):
        llbio.parse_perm_rep("degree 3\n1 1 0\n")


@pytest.mark.parametrize("text", ["", "3\n", "degree 0\n", "degree 3\n0 1\n"])
def test_bad_perm_text(text):
    with pytest.raises(ParseError):
        llbio.parse_perm_rep(text)


def test_bad_graph_text():
    with pytest.raises(ParseError):
        llbio.parse_graph("1 1\n")
    with pytest.raises(ParseError):
        llbio.parse_graph("1 2 3\n")


def test_bad_surface_json():
    with pytest.raises(ParseError):
        llbio.parse_surface("{not json")
    with pytest.raises(ParseError):
        llbio.parse_surface("[]")


def test_unknown_suffix(tmp_path):
    p = tmp_path / "x.txt"
    p.write_text("dim 0\n0\n")
    with pytest.raises(InputError):
        llbio.parse_inputs([p])
    assert llbio.parse_inputs([p], ["complex"])[0].counts() == [1]


# ---------------------------------------------------------------- reports


def test_emit_is_byte_identical_across_runs():
    K = library.torus7()
    a = llbio.emit_report(lueck.normalized_betti_sequence(_tower(K), 1), "csv")
    b = llbio.emit_report(lueck.normalized_betti_sequence(_tower(K), 1), "csv")
    assert a == b


def test_empty_tower_report_has_header_only():
    report = lueck.ConvergenceReport(1, [], [], [], Fraction(1), None, [], "inconclusive")
    assert llbio.emit_report(report, "csv") == b"level,degree,normalized_betti\n"


def test_format_value():
    assert llbio.format_value(Fraction(9, 8)) == "9/8"
    assert llbio.format_value(float("inf")) == "inf"
    assert llbio.format_value(1 / 3) == "0.333333333333"
    assert llbio.format_value(3) == "3"


def test_json_report_has_manifest(tmp_path):
    p = tmp_path / "k.cx"
    p.write_text(llbio.format_complex(library.triangle_boundary()))
    m = llbio.RunManifest.for_inputs("complex betti", [p], {"degree": None})
    doc = json.loads(llbio.emit_report((["a"], [[1]], {}), "json", m))
    assert doc["manifest"]["hashes"][str(p)] == llbio.sha256_file(p)
    assert doc["manifest"]["version"] == llbio.VERSION


def _tower(K):
    from llb.covers import normal_chain_tower

    return normal_chain_tower(K, "cyclic", 3)


# ---------------------------------------------------------------- exact cap


def test_exact_cap_from_environment(monkeypatch):
    L = hodge_laplacian(library.cycle_complex(50), 0)
    monkeypatch.setenv("LLB_EXACT_CAP", "20")
    with pytest.raises(TooLargeForExact):
        lueck.heat_trace_exact(L, 1.0)
    monkeypatch.setenv("LLB_EXACT_CAP", "100")
    assert lueck.heat_trace_exact(L, 1.0) > 1


# ---------------------------------------------------------------- command line


def _write_complex(tmp_path, K, name="k.cx"):
    p = tmp_path / name
    p.write_text(llbio.format_complex(K))
    return p


def test_cli_complex_validate_and_betti(tmp_path, capsys):
    p = _write_complex(tmp_path, library.torus7())
    assert cli.main(["complex", "validate", str(p)]) == 0
    assert "euler characteristic 0" in capsys.readouterr().out
    out = tmp_path / "b.csv"
    assert cli.main(["complex", "betti", str(p), "--out", str(out)]) == 0
    assert out.read_text() == "degree,betti\n0,1\n1,2\n2,1\n"
    assert (tmp_path / "b.csv.manifest.json").exists()


def test_cli_invalid_complex_exit_2(tmp_path, capsys):
    p = tmp_path / "bad.cx"
    p.write_text("dim 0\n0\n1\ndim 2\n0 1 2\n")
    assert cli.main(["complex", "validate", str(p)]) == 2
    assert "error" in capsys.readouterr().err


def test_cli_missing_file_exit_2(tmp_path):
    assert cli.main(["complex", "betti", str(tmp_path / "nope.cx")]) == 2


def test_cli_tower_build_and_luck_run(tmp_path):
    p = _write_complex(tmp_path, library.cycle_complex(3))
    tdir = tmp_path / "tower"
    assert cli.main(["tower", "build", str(p), "--family", "cyclic", "--depth", "4", "--out", str(tdir)]) == 0
    tower = cli.load_tower(tdir / "tower.json")
    assert tower.degrees == [2, 4, 8, 16]
    out = tmp_path / "run.json"
    assert cli.main(["luck", "run", str(tdir / "tower.json"), "--degree", "1", "--t-grid", "0.1:1000:12",
                     "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["manifest"]["command"] == "luck run"
    assert doc["summary"]["fitted_limit"] == "0/1"
    assert out.with_suffix(".csv").read_text().startswith("level,degree,normalized_betti")


def test_cli_luck_run_reproducible(tmp_path):
    p = _write_complex(tmp_path, library.rose(2))
    tdir = tmp_path / "tower"
    cli.main(["tower", "build", str(p), "--family", "mod-p", "--depth", "2", "--out", str(tdir)])
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        cli.main(["luck", "run", str(tdir / "tower.json"), "--degree", "1", "--mode", "stochastic",
                  "--probes", "16", "--seed", "4", "--t-grid", "0.1:10:4", "--out", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_cli_tower_cover(tmp_path, capsys):
    p = _write_complex(tmp_path, library.cycle_complex(4))
    rep = tmp_path / "r.perm"
    rep.write_text("degree 3\n1 2 0\n")
    assert cli.main(["tower", "cover", str(p), str(rep)]) == 0
    C = llbio.parse_complex(capsys.readouterr().out)
    assert C.counts() == [12, 12]


def test_cli_bad_perm_exit_2(tmp_path):
    p = _write_complex(tmp_path, library.cycle_complex(4))
    rep = tmp_path / "r.perm"
    rep.write_text("degree 3\n1 1 0\n")
    assert cli.main(["tower", "cover", str(p), str(rep)]) == 2


def test_cli_bs_census_compare(tmp_path, capsys):
    a, b = tmp_path / "a.edges", tmp_path / "b.edges"
    a.write_text(llbio.format_graph(library.cycle_graph(8)))
    b.write_text(llbio.format_graph(library.cycle_graph(16)))
    for g in (a, b):
        assert cli.main(["bs", "census", str(g), "--radius", "3", "--out", str(g) + ".json"]) == 0
    capsys.readouterr()
    assert cli.main(["bs", "compare", str(a) + ".json", str(b) + ".json"]) == 0
    assert capsys.readouterr().out.strip() == "0/1"
    assert cli.main(["bs", "census", str(b), "--radius", "2", "--out", str(b) + "2.json"]) == 0
    assert cli.main(["bs", "compare", str(a) + ".json", str(b) + "2.json"]) == 2


def test_cli_bs_thin(tmp_path):
    g = tmp_path / "g.edges"
    g.write_text(llbio.format_graph(library.cycle_graph(6)))
    out = tmp_path / "thin.csv"
    assert cli.main(["bs", "thin", str(g), "--r-grid", "1:4:4", "--out", str(out)]) == 0
    # every vertex of C_6 lies on a 6-cycle, injectivity radius 3
    assert out.read_text() == "r,fraction\n1/1,0/1\n2/1,0/1\n3/1,0/1\n4/1,1/1\n"


def test_cli_hyp_commands(tmp_path, capsys):
    assert cli.main(["hyp", "dual", "--space", "H2", "--degree", "1"]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(1 / (2 * 3.141592653589793), abs=1e-11)
    assert cli.main(["hyp", "dual", "--space", "H5", "--degree", "1"]) == 2
    out = tmp_path / "g.csv"
    assert cli.main(["hyp", "genus-limit", "--max-genus", "4", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[1].startswith("2,1/1,1/2,")
    s = tmp_path / "cyl.json"
    s.write_text(llbio.format_surface(hyperbolic.cyclic_surface(1.0)))
    out = tmp_path / "dev.csv"
    assert cli.main(["hyp", "trace", str(s), "--t", "0.5", "--points", "3", "--out", str(out)]) == 0
    assert out.read_text().startswith("point_re,point_im,injrad,kernel")
    assert cli.main(["hyp", "trace", str(s), "--t", "50", "--points", "3"]) == 2


def test_console_script_help():
    r = subprocess.run([sys.executable, "-m", "llb.cli", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    for cmd in ("complex", "tower", "luck", "bs", "hyp"):
        assert cmd in r.stdout
