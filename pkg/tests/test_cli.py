"""Command-line interface, exercised through main(argv)."""

import json

import pytest

from factflow.cli import main
from conftest import TOY_LINES, family_graph_lines


@pytest.fixture
def toy_tsv(tmp_path):
    path = tmp_path / "toy.tsv"
    path.write_text("".join(line + "\n" for line in TOY_LINES))
    return str(path)


@pytest.fixture
def family_setup(tmp_path):
    import factflow as ff

    graph_path = tmp_path / "family.tsv"
    graph_path.write_text("".join(line + "\n" for line in family_graph_lines()))
    g = ff.load_graph(str(graph_path))
    true_claims = [
        ff.LabeledClaim(g.claim(f"x{i}", "spouse", f"y{i}"), True) for i in range(20)
    ]
    negatives = ff.generate_lcwa_negatives(true_claims, 1, rng_seed=7)
    dataset_path = tmp_path / "claims.tsv"
    from factflow.evaluate import write_dataset

    write_dataset(true_claims + negatives, dataset_path, g)
    return str(graph_path), str(dataset_path)


class TestBuildSim:
    def test_summary_and_cache(self, toy_tsv, tmp_path, capsys):
        cache = tmp_path / "relsim.bin"
        code = main(["build-sim", "--graph", toy_tsv, "--cache", str(cache)])
        assert code == 0
        out = capsys.readouterr().out
        assert "relations=4" in out
        assert cache.exists()

    def test_rebuild_byte_identical(self, toy_tsv, tmp_path):
        c1, c2 = tmp_path / "a.bin", tmp_path / "b.bin"
        main(["build-sim", "--graph", toy_tsv, "--cache", str(c1)])
        main(["build-sim", "--graph", toy_tsv, "--cache", str(c2)])
        assert c1.read_bytes() == c2.read_bytes()

    def test_changed_graph_forces_rebuild(self, toy_tsv, tmp_path, capsys):
        cache = tmp_path / "relsim.bin"
        main(["build-sim", "--graph", toy_tsv, "--cache", str(cache)])
        other = tmp_path / "other.tsv"
        other.write_text("a\tZZZ\tb\nb\tB\tc\n")
        code = main(
            ["check", "--graph", str(other), "--cache", str(cache),
             "--claim", "a\tZZZ\tc", "--mode", "ks"]
        )
        assert code == 0
        assert "rebuilding" in capsys.readouterr().err


class TestSimilar:
    def test_tsv_rows(self, toy_tsv, capsys):
        code = main(["similar", "--graph", toy_tsv, "--relation", "A", "--top-k", "2"])
        assert code == 0
        rows = capsys.readouterr().out.strip().splitlines()
        assert len(rows) == 2
        rank, rel, value = rows[0].split("\t")
        assert rank == "1"
        assert 0.0 <= float(value) <= 1.0


class TestCheck:
    def test_json_document(self, toy_tsv, capsys):
        code = main(["check", "--graph", toy_tsv, "--claim", "a\tA\te"])
        assert code == 0
        captured = capsys.readouterr()
        doc = json.loads(captured.out)
        assert doc["claim"] == {"subject": "a", "predicate": "A", "object": "e"}
        assert doc["method"] == "ks"
        assert doc["paths"]
        assert "config:" in captured.err

    def test_escaped_tab_accepted(self, toy_tsv, capsys):
        code = main(["check", "--graph", toy_tsv, "--claim", "a\\tA\\te"])
        assert code == 0
        assert json.loads(capsys.readouterr().out)["claim"]["object"] == "e"

    def test_unknown_entity_exit_2(self, toy_tsv, capsys):
        code = main(["check", "--graph", toy_tsv, "--claim", "a\tA\tghost"])
        assert code == 2
        captured = capsys.readouterr()
        assert captured.out == ""
        assert "error" in captured.err

    def test_degree_product_tsv(self, toy_tsv, capsys):
        code = main(
            ["check", "--graph", toy_tsv, "--claim", "b\tA\td",
             "--mode", "dp", "--emit", "tsv"]
        )
        assert code == 0
        line = capsys.readouterr().out
        assert line == "b\tA\td\tdp\t9\n"  # both endpoints have degree 3

    def test_zero_score_is_success(self, tmp_path, capsys):
        path = tmp_path / "two.tsv"
        path.write_text("s\tp\ta\nx\tp\to\n")
        code = main(["check", "--graph", str(path), "--claim", "s\tp\to"])
        assert code == 0
        assert json.loads(capsys.readouterr().out)["tau"] == 0.0

    def test_dot_output(self, toy_tsv, capsys):
        code = main(
            ["check", "--graph", toy_tsv, "--claim", "a\tA\te", "--emit", "dot"]
        )
        assert code == 0
        assert capsys.readouterr().out.startswith("digraph evidence {")

    def test_kl_modes(self, toy_tsv, capsys):
        for mode in ("kl", "kl-rel", "ks-avg", "katz", "aa", "jaccard"):
            code = main(
                ["check", "--graph", toy_tsv, "--claim", "a\tA\te", "--mode", mode]
            )
            assert code == 0
        assert capsys.readouterr().out


class TestEvaluate:
    def test_all_methods_csv(self, family_setup, tmp_path, capsys):
        graph_path, dataset_path = family_setup
        out = tmp_path / "results.csv"
        code = main(
            ["evaluate", "--graph", graph_path, "--dataset", dataset_path,
             "--methods", "all", "--folds", "4", "--out", str(out)]
        )
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "method,dataset,auroc,n_pos,n_neg,runtime_ms"
        assert len(lines) == 10  # header + 9 methods
        methods = [row.split(",")[0] for row in lines[1:]]
        assert methods == [
            "ks", "ks-avg", "ks-cv", "kl", "kl-rel", "katz", "aa", "jaccard", "dp",
        ]

    def test_byte_identical_reruns(self, family_setup, tmp_path):
        graph_path, dataset_path = family_setup
        outs = []
        for name in ("r1.csv", "r2.csv"):
            out = tmp_path / name
            code = main(
                ["evaluate", "--graph", graph_path, "--dataset", dataset_path,
                 "--methods", "ks,ks-cv,dp", "--folds", "4", "--seed", "3",
                 "--out", str(out)]
            )
            assert code == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_missing_dataset_exit_2(self, toy_tsv):
        assert main(
            ["evaluate", "--graph", toy_tsv, "--dataset", "/nonexistent.tsv"]
        ) == 2

    def test_subset_of_methods_stdout(self, family_setup, capsys):
        graph_path, dataset_path = family_setup
        code = main(
            ["evaluate", "--graph", graph_path, "--dataset", dataset_path,
             "--methods", "dp,jaccard"]
        )
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 3


class TestPatterns:
    def test_family_top_pattern(self, family_setup, capsys):
        graph_path, dataset_path = family_setup
        code = main(
            ["patterns", "--graph", graph_path, "--dataset", dataset_path,
             "--relation", "spouse"]
        )
        assert code == 0
        rows = capsys.readouterr().out.strip().splitlines()
        rank, signature, freq, example = rows[0].split("\t")
        assert rank == "1"
        assert signature == "child,child^-1"
        assert int(freq) >= 20
        assert "-[child]->" in example

    def test_unknown_relation_exit_2(self, family_setup):
        graph_path, dataset_path = family_setup
        code = main(
            ["patterns", "--graph", graph_path, "--dataset", dataset_path,
             "--relation", "nope"]
        )
        assert code == 2
