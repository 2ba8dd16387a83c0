import json

import numpy as np
import pytest

from typewalk.cli import main


@pytest.fixture
def triangle(tmp_path):
    p = tmp_path / "triangle.edges"
    p.write_text("0 1\n1 2\n2 0\n")
    return p


@pytest.fixture
def small_graph(tmp_path):
    # two overlapping squares plus a pendant: enough structure for eval
    edges = [(0, 1), (1, 2), (2, 3), (3, 0), (2, 4), (4, 5), (5, 6), (6, 2),
             (1, 5), (3, 6), (0, 7), (4, 7), (5, 7), (1, 6), (0, 5)]
    p = tmp_path / "small.edges"
    p.write_text("\n".join(f"{u} {v}" for u, v in edges) + "\n")
    return p


def run(argv):
    return main([str(a) for a in argv])


class TestMotifsCommand:
    def test_triangle_counts(self, triangle, tmp_path):
        out = tmp_path / "out"
        assert run(["motifs", triangle, "--out", out]) == 0
        lines = (out / "features.tsv").read_text().strip().splitlines()
        assert lines[0].split("\t") == ["node"] + [f"x{k}" for k in range(1, 10)]
        assert lines[1].split("\t") == ["0", "2", "0", "1", "0", "0", "0", "0", "0", "0"]

    def test_feature_restriction(self, triangle, tmp_path):
        out = tmp_path / "out"
        assert run(["motifs", triangle, "--out", out, "--features", "x2,x3"]) == 0
        header = (out / "features.tsv").read_text().splitlines()[0]
        assert header == "node\tx2\tx3"

    def test_missing_input_exit_code(self, tmp_path):
        assert run(["motifs", tmp_path / "nope.edges", "--out", tmp_path / "o"]) == 2

    def test_parse_error_exit_code(self, tmp_path):
        p = tmp_path / "bad.edges"
        p.write_text("0 x\n")
        assert run(["motifs", p, "--out", tmp_path / "o"]) == 2


class TestEmbedCommand:
    def test_identity_phi_gives_one_type_per_node(self, small_graph, tmp_path):
        out = tmp_path / "out"
        assert run(["embed", small_graph, "--out", out, "--phi", "identity",
                    "--dims", 8, "--walks-per-node", 2, "--walk-length", 6]) == 0
        header = (out / "embedding.txt").read_text().splitlines()[0]
        assert header == "8 8"
        manifest = json.loads((out / "embed_manifest.json").read_text())
        assert manifest["num_types"] == 8

    def test_concat_phi_compresses(self, small_graph, tmp_path):
        out = tmp_path / "out"
        assert run(["embed", small_graph, "--out", out, "--features", "x1,x2,x3",
                    "--delta", "0.5", "--dims", 8,
                    "--walks-per-node", 2, "--walk-length", 6]) == 0
        manifest = json.loads((out / "embed_manifest.json").read_text())
        assert manifest["num_types"] < 8

    def test_byte_identical_reruns(self, small_graph, tmp_path):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert run(["embed", small_graph, "--out", out, "--seed", 7,
                        "--dims", 8, "--walks-per-node", 2, "--walk-length", 6,
                        "--save-corpus", "--save-beta"]) == 0
            outs.append(out)
        for fname in ("embedding.txt", "embedding.beta.txt", "assignment.tsv", "corpus.txt"):
            assert (outs[0] / fname).read_bytes() == (outs[1] / fname).read_bytes()

    def test_external_assignment(self, triangle, tmp_path):
        a = tmp_path / "assign.tsv"
        a.write_text("0\t0\n1\t0\n2\t1\n")
        out = tmp_path / "out"
        assert run(["embed", triangle, "--out", out, "--phi", "external",
                    "--assignment", a, "--dims", 4,
                    "--walks-per-node", 1, "--walk-length", 4]) == 0
        manifest = json.loads((out / "embed_manifest.json").read_text())
        assert manifest["num_types"] == 2

    def test_external_without_path_is_parameter_error(self, triangle, tmp_path):
        assert run(["embed", triangle, "--out", tmp_path / "o", "--phi", "external"]) == 3


class TestEvalCommand:
    def test_basic_report(self, small_graph, tmp_path):
        out = tmp_path / "out"
        assert run(["eval", small_graph, "--out", out, "--repeats", 2,
                    "--dims", 8, "--walks-per-node", 2, "--walk-length", 8,
                    "--operators", "hadamard,mean", "--features", "x1,x2,x3"]) == 0
        lines = (out / "eval.tsv").read_text().strip().splitlines()
        assert lines[0].startswith("seed\toperator")
        assert len(lines) == 1 + 2 * 2
        for line in lines[1:]:
            assert 0.0 <= float(line.split("\t")[5]) <= 1.0

    def test_unknown_operator_exit_code(self, small_graph, tmp_path):
        assert run(["eval", small_graph, "--out", tmp_path / "o",
                    "--operators", "cosine"]) == 3

    def test_deterministic_outputs(self, small_graph, tmp_path):
        texts = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert run(["eval", small_graph, "--out", out, "--repeats", 2,
                        "--dims", 8, "--walks-per-node", 2, "--walk-length", 8,
                        "--threads", 1, "--features", "x1,x2,x3"]) == 0
            lines = (out / "eval.tsv").read_text().strip().splitlines()
            # drop the wall-clock column; timing is the one nondeterministic field
            texts.append([l.rsplit("\t", 1)[0] for l in lines])
        assert texts[0] == texts[1]


class TestAnalyzeCommand:
    def test_path_graph_diagnostics(self, tmp_path):
        p = tmp_path / "path.edges"
        p.write_text("0 1\n1 2\n")
        out = tmp_path / "out"
        assert run(["analyze", p, "--out", out, "--u", 0, "--v", 2,
                    "--t", 2, "--L", 2, "--trials", 2000]) == 0
        report = (out / "analysis.tsv").read_text()
        assert "first_passage" in report and "access_time" in report
        assert "False" not in report

    def test_adjacent_pair_is_parameter_error(self, tmp_path):
        p = tmp_path / "path.edges"
        p.write_text("0 1\n1 2\n")
        assert run(["analyze", p, "--out", tmp_path / "o", "--u", 0, "--v", 1]) == 3


class TestConfigFile:
    def test_config_supplies_defaults_and_flags_win(self, small_graph, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"dims": 8, "walks_per_node": 2,
                                   "walk_length": 6, "seed": 3}))
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        assert run(["embed", small_graph, "--out", out1, "--config", cfg]) == 0
        m1 = json.loads((out1 / "embed_manifest.json").read_text())
        assert m1["params"]["dims"] == 8 and m1["params"]["seed"] == 3
        assert run(["embed", small_graph, "--out", out2, "--config", cfg,
                    "--seed", 9]) == 0
        m2 = json.loads((out2 / "embed_manifest.json").read_text())
        assert m2["params"]["seed"] == 9

    def test_unknown_config_key_rejected(self, small_graph, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"walks": 2}))
        assert run(["embed", small_graph, "--out", tmp_path / "o", "--config", cfg]) == 3

    def test_manifest_params_round_trip_as_config(self, small_graph, tmp_path):
        out1 = tmp_path / "o1"
        assert run(["embed", small_graph, "--out", out1, "--dims", 8,
                    "--walks-per-node", 2, "--walk-length", 6, "--seed", 4]) == 0
        params = json.loads((out1 / "embed_manifest.json").read_text())["params"]
        for drop in ("command", "input", "out", "threads"):
            params.pop(drop, None)
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(params))
        out2 = tmp_path / "o2"
        assert run(["embed", small_graph, "--out", out2, "--config", cfg]) == 0
        assert (out1 / "embedding.txt").read_bytes() == (out2 / "embedding.txt").read_bytes()


class TestSweepCommand:
    def test_tiny_grid(self, small_graph, tmp_path):
        out = tmp_path / "out"
        assert run(["sweep", small_graph, "--out", out, "--repeats", 1,
                    "--dims", 8, "--walks-per-node", 2, "--walk-length", 8,
                    "--features", "x1,x2,x3",
                    "--delta-grid", "0.5,0.9", "--p-grid", "1", "--q-grid", "1"]) == 0
        lines = (out / "sweep.tsv").read_text().strip().splitlines()
        assert len(lines) == 1 + 2  # header + 2 deltas x 1 p x 1 q x 1 op
