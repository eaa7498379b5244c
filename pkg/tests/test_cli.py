import csv
import json

import numpy as np
import pytest

from hsflow import __version__
from hsflow.cli import DatumFormatError, datum_to_dict, demo, main, parse_datum
from hsflow.datasets import make_random_datum
from hsflow.evolution import evolve
from hsflow.lagrangian import build
from hsflow.measure import cdf_sup_distance


def write(tmp_path, doc, name="datum.json"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(path)


def run_json(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


class TestParse:
    def test_intro(self, tmp_path):
        d = parse_datum(write(tmp_path, {"u_left": 0, "pieces": [[0, 1, -1]], "atoms": []}))
        assert d.energy == 1.0

    def test_atom_only(self, tmp_path):
        d = parse_datum(write(tmp_path, {"u_left": 0, "pieces": [], "atoms": [[0, 2]]}))
        assert d.energy == 2.0

    def test_negative_mass(self, tmp_path):
        with pytest.raises(DatumFormatError, match="atom mass must be positive"):
            parse_datum(write(tmp_path, {"u_left": 0, "pieces": [], "atoms": [[0, -1]]}))

    def test_gap(self, tmp_path):
        with pytest.raises(DatumFormatError, match="not contiguous"):
            parse_datum(write(tmp_path, {"pieces": [[0, 1, 1], [1.5, 2, 1]]}))

    @pytest.mark.parametrize("bad", ['"abc"', "null", "true", '"nan"', "[1]"])
    def test_malformed_number(self, tmp_path, bad):
        with pytest.raises(DatumFormatError, match="number"):
            parse_datum(write(tmp_path, '{"u_left": 0, "pieces": [[0, 1, %s]]}' % bad))

    def test_invalid_json(self, tmp_path):
        with pytest.raises(DatumFormatError, match="not valid JSON"):
            parse_datum(write(tmp_path, "{pieces: }"))

    def test_errors_are_distinct(self, tmp_path):
        msgs = set()
        for doc in (
            {"pieces": [[0, 1, 1], [2, 3, 1]]},
            {"atoms": [[0, -1]]},
            {"pieces": [[0, "x", 1]]},
        ):
            with pytest.raises(DatumFormatError) as exc:
                parse_datum(write(tmp_path, doc))
            msgs.add(str(exc.value).split(" ")[0])
        assert len(msgs) == 3

    @pytest.mark.parametrize("seed", range(10))
    def test_round_trip(self, tmp_path, seed):
        d = make_random_datum(seed)
        back = parse_datum(write(tmp_path, datum_to_dict(d)))
        p, q = build(d), build(back)
        x = np.linspace(-15, 15, 601)
        assert np.max(np.abs(d.u_bar(x) - back.u_bar(x))) == 0.0
        assert cdf_sup_distance(d.mu_bar, back.mu_bar) == 0.0
        for t in (-1.0, 1.5):
            assert cdf_sup_distance(evolve(p, t).mu, evolve(q, t).mu) == 0.0


class TestDemo:
    def test_intro(self):
        assert demo("intro").energy == 1.0

    def test_atom(self):
        assert demo("atom", mass=1).energy == 1.0

    def test_cantor_kept_length(self):
        d = demo("cantor", depth=4)
        kept = sum(b - a for a, b, c in d.piece_table() if c == -1.0)
        assert kept == pytest.approx(0.5 + 2**-5, abs=1e-15)

    @pytest.mark.parametrize("name, params", [("spiral", {}), ("atom", {"mass": 0}), ("cantor", {"depth": 0})])
    def test_invalid(self, name, params):
        with pytest.raises(ValueError):
            demo(name, **params)

    def test_shortcut(self):
        assert parse_datum("demo:atom:2.5").energy == 2.5
        assert len(parse_datum("demo:cantor:3").piece_table()) == 15


class TestEvolveCommand:
    def test_intro_blowup(self, capsys):
        code, out = run_json(capsys, ["evolve", "-i", "demo:intro", "-t", "2", "-n", "1000"])
        assert code == 0
        assert [(a["x"], a["mass"]) for a in out["atoms"]] == [(0.0, 1.0)]
        assert out["atoms"][0]["source"] == [0.0, 1.0]
        assert max(abs(s["u"]) for s in out["samples"]) <= 1e-10
        assert len(out["samples"]) == 1000
        assert out["version"] == __version__
        assert out["config"]["tol_slope"] == 1e-10 and out["config"]["tol_x"] == 1e-12

    def test_intro_t1(self, capsys):
        code, out = run_json(capsys, ["evolve", "-i", "demo:intro", "-t", "1", "-n", "9"])
        assert code == 0
        xs = [s["x"] for s in out["samples"]]
        assert xs[0] == -1.0 and xs[-1] >= 1.0
        from hsflow.evolution import evaluate_u

        assert evaluate_u(build(demo("intro")), 0.125, 1.0) == -0.25

    def test_atom_dissolves(self, capsys):
        code, out = run_json(capsys, ["evolve", "-i", "demo:atom:1", "-t", "2"])
        assert code == 0 and out["atoms"] == []
        assert out["density_pieces"] == [{"start": 0.0, "end": 1.0, "density": 1.0}]
        assert out["energy"] == 1.0

    def test_csv(self, tmp_path):
        target = tmp_path / "u.csv"
        assert main(["evolve", "-i", "demo:intro", "-t", "2", "--format", "csv", "-o", str(target)]) == 0
        rows = list(csv.reader(target.open()))
        assert rows[0] == ["x", "u"] and len(rows) == 202
        atoms = list(csv.reader((tmp_path / "u_atoms.csv").open()))
        assert atoms[0] == ["x", "mass", "source_start", "source_end"]
        assert [float(v) for v in atoms[1]] == [0.0, 1.0, 0.0, 1.0]

    def test_json_floats_round_trip(self, capsys):
        _, out = run_json(capsys, ["evolve", "-i", "demo:cantor:3", "-t", "1.3"])
        u = evolve(build(demo("cantor", depth=3)), 1.3).u
        for s in out["samples"]:
            assert s["u"] == float(u(s["x"]))

    def test_missing_file(self, capsys):
        assert main(["evolve", "-i", "/nonexistent.json", "-t", "1"]) == 2
        assert "error" in capsys.readouterr().err

    def test_bad_samples(self):
        with pytest.raises(SystemExit):
            main(["evolve", "-i", "demo:intro", "-t", "1", "-n", "1"])


class TestReportCommands:
    def test_singular_intro(self, capsys):
        code, out = run_json(capsys, ["singular", "-i", "demo:intro", "--json"])
        assert code == 0
        (ev,) = out["events"]
        assert ev["t"] == 2.0
        assert [(a["x"], a["mass"], a["source"]) for a in ev["atoms"]] == [(0.0, 1.0, [0.0, 1.0])]

    def test_singular_table(self, capsys):
        assert main(["singular", "-i", "demo:cantor:2"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 3

    def test_semigroup_intro(self, capsys):
        code, out = run_json(capsys, ["semigroup", "-i", "demo:intro", "--s", "1", "--t", "2", "--json"])
        assert code == 0 and out["max_deviation"] <= 1e-9 and out["passed"]

    def test_semigroup_singular_start(self, capsys):
        assert main(["semigroup", "-i", "demo:intro", "--s", "2", "--t", "3"]) == 2

    def test_verify_zero(self, tmp_path, capsys):
        path = write(tmp_path, {"u_left": 0, "pieces": [], "atoms": []})
        code, out = run_json(capsys, ["verify", "-i", path, "--suite", "all", "--json"])
        assert code == 0
        assert all(r["passed"] and r["max_error"] == 0.0 for r in out["reports"])
        assert out["config"]["seed"] == 0

    def test_verify_names_failing_check(self, capsys, monkeypatch):
        from hsflow import cli
        from hsflow.verify import CheckReport

        monkeypatch.setattr(cli, "run_suites", lambda *a, **k: [CheckReport("weak_form", 1.0, 1e-10)])
        assert main(["verify", "-i", "demo:intro"]) == 1
        assert "failed check: weak_form" in capsys.readouterr().err

    def test_negative_tolerance(self, capsys):
        assert main(["verify", "-i", "demo:intro", "--tol-x", "-1"]) == 2
        assert "tol_x" in capsys.readouterr().err

    @pytest.mark.parametrize("suite", ["conservation", "weak", "ode", "structure", "oracle"])
    def test_verify_each_suite(self, capsys, suite):
        assert main(["verify", "-i", "demo:cantor:3", "--suite", suite, "--seed", "3"]) == 0
        assert "PASS" in capsys.readouterr().out

    def test_demo_command(self, tmp_path):
        target = tmp_path / "intro.json"
        assert main(["demo", "intro", "-o", str(target)]) == 0
        assert parse_datum(str(target)).energy == 1.0
