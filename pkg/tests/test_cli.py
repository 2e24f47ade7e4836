import csv
import io
import json

from ptcache.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestConstruct:
    def test_example1_document(self, capsys):
        code, out, _ = run_cli(
            capsys, "construct", "--preset", "theorem1", "--K", "7", "--t", "2"
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["fs"]["aggregate"] == [0, 2, 2]
        assert doc["sizing"]["gamma"][1] == "5/1"

    def test_jcm(self, capsys):
        code, out, _ = run_cli(
            capsys, "construct", "--preset", "jcm", "--K", "5", "--t", "2"
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["fs"]["aggregate"] == [2]
        assert doc["F_PT"] == 20

    def test_constraint_violation_exit2(self, capsys):
        code, _, err = run_cli(
            capsys, "construct", "--preset", "theorem1", "--K", "8", "--t", "2"
        )
        assert code == 2
        assert "K must be odd" in err

    def test_grouping_override(self, capsys):
        # the wider split costs more packets than the preset's (7, 6)
        code, out, _ = run_cli(
            capsys, "construct", "--preset", "theorem1", "--K", "13", "--t", "2",
            "--grouping", "8,5",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["grouping"]["sizes"] == [8, 5]
        assert doc["F_PT"] == 136  # vs 126 at the preset grouping

    def test_bad_grouping_override_exit2(self, capsys):
        code, _, err = run_cli(
            capsys, "construct", "--preset", "theorem1", "--K", "13", "--t", "2",
            "--grouping", "9,3",
        )
        assert code == 2
        assert "error" in err


class TestSimulate:
    def test_example1_pass(self, capsys):
        code, out, _ = run_cli(
            capsys, "simulate", "--preset", "theorem1", "--K", "7", "--t", "2",
            "--seed", "0", "--demands", "distinct",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["passed"] is True
        assert doc["rate"] == "5/2"

    def test_odd_t3(self, capsys):
        code, out, _ = run_cli(
            capsys, "simulate", "--preset", "odd_t3", "--K", "9", "--t", "3",
            "--seed", "2",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["passed"] is True
        assert doc["packets_per_file"] == 210

    def test_even_K_validity_report(self, capsys):
        code, out, _ = run_cli(
            capsys, "simulate", "--preset", "even_K", "--K", "12", "--t", "2"
        )
        assert code == 0
        assert json.loads(out)["passed"] is True

    def test_transcript_and_determinism(self, capsys, tmp_path):
        t1, t2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        args = ["simulate", "--preset", "theorem1", "--K", "7", "--t", "2",
                "--seed", "5", "--demands", "uniform"]
        code1, out1, _ = run_cli(capsys, *args, "--transcript", str(t1))
        code2, out2, _ = run_cli(capsys, *args, "--transcript", str(t2))
        assert code1 == code2 == 0
        assert out1 == out2
        assert t1.read_bytes() == t2.read_bytes()
        first = json.loads(t1.read_text().splitlines()[0])
        assert first["round"] == 1

    def test_grouping_override_simulates(self, capsys):
        code, out, _ = run_cli(
            capsys, "simulate", "--preset", "theorem1", "--K", "13", "--t", "2",
            "--grouping", "8,5", "--seed", "1",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["passed"] is True and doc["packets_per_file"] == 136

    def test_explicit_demands(self, capsys):
        code, out, _ = run_cli(
            capsys, "simulate", "--preset", "jcm", "--K", "5", "--t", "2",
            "--demands", "5,4,3,2,1",
        )
        assert code == 0
        assert json.loads(out)["passed"] is True

    def test_bad_demands_exit2(self, capsys):
        code, _, err = run_cli(
            capsys, "simulate", "--preset", "jcm", "--K", "5", "--t", "2",
            "--demands", "1,2",
        )
        assert code == 2
        assert "error" in err


class TestVerify:
    def test_claims_grid(self, capsys):
        code, out, _ = run_cli(
            capsys, "verify", "--claims", "--t", "4", "--q-range", "5:15"
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["passed"] is True

    def test_remark3(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--remark3", "--q", "3")
        assert code == 0
        doc = json.loads(out)
        assert doc["checks"][0]["witness"]["mc_satisfying"] == [[2, 2, 2]]

    def test_lemma3(self, capsys):
        code, out, _ = run_cli(
            capsys, "verify", "--lemma3", "--K", "13", "--t", "2"
        )
        assert code == 0
        assert json.loads(out)["checks"][0]["witness"]["argmin"] == 7

    def test_lemma1_and_odd_t(self, capsys):
        code, out, _ = run_cli(
            capsys, "verify", "--lemma1", "--t", "2", "--q-range", "3:8",
            "--odd-t", "--r-range", "1:6", "--strict",
        )
        assert code == 0
        assert json.loads(out)["passed"] is True

    def test_no_selection_exit2(self, capsys):
        code, _, err = run_cli(capsys, "verify")
        assert code == 2
        assert "nothing to verify" in err


class TestSweep:
    def test_two_rows(self, capsys):
        code, out, _ = run_cli(
            capsys, "sweep", "--t", "2", "--q-max", "4", "--format", "csv"
        )
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert [r["ratio_exact"] for r in rows] == ["6/7", "5/6"]

    def test_json_same_content(self, capsys):
        code_c, out_c, _ = run_cli(
            capsys, "sweep", "--t", "2,4", "--q-max", "8", "--format", "csv"
        )
        code_j, out_j, _ = run_cli(
            capsys, "sweep", "--t", "2,4", "--q-max", "8", "--format", "json"
        )
        assert code_c == code_j == 0
        rows_csv = list(csv.DictReader(io.StringIO(out_c)))
        rows_json = [{k: str(v) for k, v in r.items()} for r in json.loads(out_j)]
        assert rows_json == rows_csv

    def test_odd_t_exit2(self, capsys):
        code, _, err = run_cli(capsys, "sweep", "--t", "3")
        assert code == 2
        assert "even t required for theorem1 sweep" in err

    def test_output_dir_override(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("PTCACHE_OUTPUT_DIR", str(tmp_path))
        code, _, _ = run_cli(
            capsys, "sweep", "--t", "2", "--q-max", "4", "--output", "ratios.csv"
        )
        assert code == 0
        assert (tmp_path / "ratios.csv").exists()
