import json

import pytest

from rtwl.cli import main

PAPER_GRID = "0 3 2 6\n0 4 5 7\n1 2 3 7\n1 4 5 6\n"


@pytest.fixture
def grid_file(tmp_path):
    path = tmp_path / "paper44.grid"
    path.write_text(PAPER_GRID)
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestStar:
    def test_no_small_witness(self, capsys, grid_file):
        code, out = run(capsys, "star", "--grid", grid_file, "--max-size", "2")
        data = json.loads(out)
        assert code == 0
        assert data["status"] == "none"

    def test_size_three_witness(self, capsys, grid_file):
        code, out = run(capsys, "star", "--grid", grid_file, "--max-size", "3")
        data = json.loads(out)
        assert data["status"] == "found"
        assert len(data["witness"]) == 3

    def test_expect_mismatch_exit_code(self, capsys, grid_file):
        code, _ = run(
            capsys, "star", "--grid", grid_file, "--max-size", "2", "--expect", "found"
        )
        assert code == 2

    def test_bad_grid_file(self, capsys, tmp_path):
        bad = tmp_path / "bad.grid"
        bad.write_text("0 1\n2\n")
        code, _ = run(capsys, "star", "--grid", str(bad))
        assert code == 3


class TestVerify:
    def test_expect_refuted(self, capsys):
        code, out = run(
            capsys, "verify", "--dims", "2,2", "--colors", "4", "--expect", "refuted"
        )
        assert code == 0
        assert json.loads(out)["verdict"] == "REFUTED"

    def test_expect_mismatch(self, capsys):
        code, _ = run(
            capsys, "verify", "--dims", "2,2", "--colors", "3", "--expect", "refuted"
        )
        assert code == 2

    def test_unknown_with_expect_fails(self, capsys):
        code, out = run(
            capsys,
            "verify", "--dims", "3,3", "--colors", "5",
            "--budget", "10", "--expect", "refuted",
        )
        assert code == 2
        assert json.loads(out)["verdict"] == "UNKNOWN"

    def test_json_byte_stable(self, capsys):
        _, a = run(capsys, "verify", "--dims", "2,2", "--colors", "4")
        _, b = run(capsys, "verify", "--dims", "2,2", "--colors", "4")
        assert a == b

    def test_markdown_format(self, capsys):
        code, out = run(
            capsys, "verify", "--dims", "2,2", "--colors", "4", "--format", "md"
        )
        assert code == 0
        assert "| verdict | REFUTED |" in out

    def test_config_embedded(self, capsys):
        _, out = run(capsys, "verify", "--dims", "2,2", "--colors", "4")
        data = json.loads(out)
        assert "workers" in data["config"] and "seed" in data["config"]


class TestScanCensus:
    def test_scan_range(self, capsys):
        code, out = run(capsys, "scan", "--dims", "2,2", "--colors", "3..4")
        data = json.loads(out)
        assert data["details"]["least_refuted"] == 4

    def test_census_csv(self, capsys):
        code, out = run(
            capsys, "census", "--dims", "2,4", "--crosscheck", "off", "--format", "csv"
        )
        assert "operation,census" in out


class TestReduce:
    def test_cascade_constant_two(self, capsys):
        code, out = run(capsys, "reduce", "cascade", "--ks", "2,2", "--in", "||2")
        data = json.loads(out)
        assert code == 0
        assert data["decoded"] == 2
        assert data["valid"] is True

    def test_product(self, capsys):
        code, out = run(
            capsys, "reduce", "product", "--ks", "2,3", "--in", "|1", "--in", "0|2"
        )
        data = json.loads(out)
        assert code == 0
        assert data["decoded"] == [1, 2]

    def test_lpo_family(self, capsys):
        for name in ("lpo-balanced", "lpo-srt3", "lpo-wub"):
            for flip in ("none", "0", "5"):
                code, out = run(capsys, "reduce", name, "--flip", flip)
                assert code == 0, (name, flip)
                assert json.loads(out)["valid"] is True

    def test_sort(self, capsys):
        code, out = run(capsys, "reduce", "sort", "--in", "0,1,0|1")
        assert code == 0
        assert json.loads(out)["solution"] == 2

    def test_cfi_meet(self, capsys):
        code, out = run(capsys, "reduce", "cfi-meet", "--word", "1", "-k", "0")
        data = json.loads(out)
        assert code == 0
        assert data["encoded"] == "1"

    def test_cfi_relabel(self, capsys):
        code, out = run(
            capsys, "reduce", "cfi-relabel", "--word", "1", "--sigma", "1"
        )
        assert json.loads(out)["encoded"] == "1,1,2"

    def test_malformed_stream(self, capsys):
        code, _ = run(capsys, "reduce", "cascade", "--ks", "2,2", "--in", "1,2")
        assert code == 3


class TestWordCommands:
    def test_bar(self, capsys):
        code, out = run(capsys, "bar", "--word", "2,1")
        data = json.loads(out)
        assert data["bar"] == "2,1,1,2"
        assert data["bar_excluded"] == []

    def test_psi_cascade_grid(self, capsys):
        code, out = run(capsys, "psi", "--kind", "cascade", "--ks", "2,2")
        assert out.strip().splitlines() == ["0 2", "1 2"]

    def test_psi_product_json(self, capsys):
        code, out = run(
            capsys, "psi", "--kind", "product", "--ks", "2,2", "--format", "json"
        )
        data = json.loads(out)
        assert data["n_colors"] == 4


class TestEnumerate:
    def test_pairing_count(self, capsys):
        code, out = run(
            capsys, "enumerate", "--dims", "4,4", "--pairings", "--count"
        )
        assert json.loads(out)["pairings"] == 2027025

    def test_table_count(self, capsys):
        code, out = run(
            capsys, "enumerate", "--dims", "2,2", "--colors", "4", "--total", "--count"
        )
        assert json.loads(out)["tables"] == 1

    def test_roundtrip_through_files(self, capsys, tmp_path):
        out_path = tmp_path / "table.grid"
        run(capsys, "psi", "--kind", "cascade", "--ks", "2,2", "--out", str(out_path))
        code, out = run(capsys, "star", "--grid", str(out_path))
        data = json.loads(out)
        # a correct reduction's table admits no witness
        assert data["status"] == "none"
