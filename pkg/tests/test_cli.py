import csv
import json

import pytest

import planted
from termnet.cli import main


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """Run every stage once over the planted corpus; tests inspect the files."""
    root = tmp_path_factory.mktemp("pipeline")
    paths = planted.write_fixture(root)
    out = root / "out"

    steps = [
        ["glossary", "build", str(paths["glossary"]), "--out", str(out)],
        [
            "ingest",
            "--corpus-dir", str(paths["docs_dir"]),
            "--metadata", str(paths["metadata"]),
            "--out", str(out),
        ],
        [
            "matrix",
            "--corpus", str(out / "corpus.jsonl"),
            "--glossary", str(out / "glossary.json"),
            "--out", str(out),
        ],
        [
            "network",
            "--matrix", str(out / "matrix.csv"),
            "--corpus", str(out / "corpus.jsonl"),
            "--alpha", "0.001",
            "--permutations", "300",
            "--seed", "7",
            "--workers", "2",
            "--out", str(out),
        ],
        [
            "metrics",
            "--edges", str(out / "edges.csv"),
            "--nodes", str(out / "nodes.csv"),
            "--null-instances", "20",
            "--seed", "3",
            "--out", str(out),
        ],
        [
            "communities",
            "--edges", str(out / "edges.csv"),
            "--nodes", str(out / "nodes.csv"),
            "--methods", "louvain,lp,greedy",
            "--seed", "5",
            "--out", str(out),
        ],
        [
            "richclub",
            "--edges", str(out / "edges.csv"),
            "--nodes", str(out / "nodes.csv"),
            "--mode", "rank",
            "--ensemble", "50",
            "--seed", "11",
            "--club-cut", str(planted.PLANTED_CUT),
            "--out", str(out),
        ],
        [
            "report",
            "--matrix", str(out / "matrix.csv"),
            "--corpus", str(out / "corpus.jsonl"),
            "--membership", str(out / "membership.csv"),
            "--periods", str(paths["periods"]),
            "--cutoff", "0.1",
            "--out", str(out),
        ],
    ]
    for step in steps:
        assert main(step) == 0, f"step failed: {step[0]}"
    return out


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


class TestStages:
    def test_glossary_file(self, pipeline):
        data = json.loads((pipeline / "glossary.json").read_text())
        canonicals = {entry["canonical"] for entry in data}
        assert "fiscal stance" in canonicals
        assert len(canonicals) == len(planted.glossary_lines())

    def test_ingest_report(self, pipeline):
        report = json.loads((pipeline / "ingest_report.json").read_text())
        assert report["documents"] == planted.N_DOCS
        assert report["empty_documents"] == []

    def test_matrix_sidecar(self, pipeline):
        sidecar = json.loads((pipeline / "matrix.meta.json").read_text())
        assert sidecar["removed_docs"] == []
        assert len(sidecar["doc_lengths"]) == planted.N_DOCS

    def test_network_summary(self, pipeline):
        summary = json.loads((pipeline / "network.json").read_text())
        assert summary["tau"] == pytest.approx(0.001 / (40 * 39 / 2))
        assert summary["nodes_lcc"] == planted.N_DOCS
        assert 0 < summary["density_lcc"] < 1
        edges = read_csv(pipeline / "edges.csv")
        assert {"src", "dst", "weight"} <= set(edges[0])
        nodes = read_csv(pipeline / "nodes.csv")
        assert {"id", "date", "speaker", "category"} <= set(nodes[0])
        assert len(nodes) == summary["nodes_lcc"]

    def test_metrics_outputs(self, pipeline):
        metrics = json.loads((pipeline / "metrics.json").read_text())
        assert 0 <= metrics["global_clustering"] <= 1
        assert set(metrics["assortativity"]) == {
            "degree", "strength", "date", "speaker", "category",
        }
        stats = read_csv(pipeline / "node_stats.csv")
        assert len(stats) == planted.N_DOCS
        ccdf = read_csv(pipeline / "ccdf_clustering.csv")
        probs = [float(r["ccdf"]) for r in ccdf]
        assert probs == sorted(probs, reverse=True)

    def test_communities_outputs(self, pipeline):
        summary = json.loads((pipeline / "communities.json").read_text())
        assert summary["methods"] == ["louvain", "label_propagation", "greedy_modularity"]
        ari = read_csv(pipeline / "ari_matrix.csv")
        assert len(ari) == 3
        for method in summary["methods"]:
            assert (pipeline / "partitions" / f"{method}.csv").exists()

    def test_richclub_outputs(self, pipeline):
        summary = json.loads((pipeline / "richclub.json").read_text())
        assert summary["club_cut"] == planted.PLANTED_CUT
        assert summary["core_size"] == planted.CORE_SIZE
        curve = read_csv(pipeline / "richclub_curve.csv")
        sizes = [int(r["club_size"]) for r in curve]
        assert sizes == sorted(sizes, reverse=True)
        membership = read_csv(pipeline / "membership.csv")
        core = {r["node_id"] for r in membership if r["in_core"] == "true"}
        assert core == set(planted.core_ids())
        composition = json.loads((pipeline / "group_composition.json").read_text())
        assert sum(composition["core"].values()) == planted.CORE_SIZE

    def test_report_outputs(self, pipeline):
        rows = read_csv(pipeline / "content_timeseries.csv")
        assert len(rows) == planted.N_DOCS
        assert {r["period"] for r in rows} == {"recession", "normal"}
        for row in rows:
            assert float(row["percentage"]) == pytest.approx(100 * float(row["score"]))
        core_terms = {r["term"] for r in read_csv(pipeline / "group_terms_core.csv")}
        assert "shared00" in core_terms

    def test_figures_rendered(self, pipeline):
        for name in (
            "fig_similarity_pdf.png",
            "fig_degree_strength.png",
            "fig_clustering_ccdf.png",
            "fig_ari.png",
            "fig_richclub.png",
            "fig_content_timeseries.png",
            "fig_group_terms.png",
            "fig_group_terms_cutoff.png",
        ):
            assert (pipeline / name).stat().st_size > 0, name


class TestOptionsAndErrors:
    def test_validation_error_exits_2(self, tmp_path):
        missing = tmp_path / "nowhere"
        missing.mkdir()
        code = main(
            [
                "ingest",
                "--corpus-dir", str(missing),
                "--metadata", str(tmp_path / "meta.csv"),
                "--out", str(tmp_path),
            ]
        )
        assert code == 2

    def test_unknown_community_method_exits_2(self, pipeline, tmp_path):
        code = main(
            [
                "communities",
                "--edges", str(pipeline / "edges.csv"),
                "--nodes", str(pipeline / "nodes.csv"),
                "--methods", "walktrap",
                "--out", str(tmp_path),
            ]
        )
        assert code == 2

    def test_no_bonferroni_keeps_more_edges(self, pipeline, tmp_path):
        base = json.loads((pipeline / "network.json").read_text())
        out = tmp_path / "alpha"
        code = main(
            [
                "network",
                "--matrix", str(pipeline / "matrix.csv"),
                "--corpus", str(pipeline / "corpus.jsonl"),
                "--permutations", "300",
                "--seed", "7",
                "--no-bonferroni",
                "--no-figures",
                "--out", str(out),
            ]
        )
        assert code == 0
        uncorrected = json.loads((out / "network.json").read_text())
        assert uncorrected["tau"] == 0.001
        assert uncorrected["edges_all"] >= base["edges_all"]

    def test_pvalue_smoothing_flag(self, pipeline, tmp_path):
        out = tmp_path / "smooth"
        code = main(
            [
                "network",
                "--matrix", str(pipeline / "matrix.csv"),
                "--corpus", str(pipeline / "corpus.jsonl"),
                "--permutations", "100",
                "--seed", "7",
                "--alpha", "0.05",  # smoothing floors p at 1/101
                "--pvalue-smoothing",
                "--no-bonferroni",
                "--no-figures",
                "--out", str(out),
            ]
        )
        assert code == 0
        assert json.loads((out / "network.json").read_text())["pvalue_smoothing"] is True

    def test_communities_import_and_binary(self, pipeline, tmp_path):
        external = tmp_path / "external.csv"
        with open(pipeline / "nodes.csv", newline="", encoding="utf-8") as fh:
            node_ids = [row["id"] for row in csv.DictReader(fh)]
        external.write_text(
            "node_id,community_id\n"
            + "\n".join(f"{n},{0 if n in set(planted.core_ids()) else 1}" for n in node_ids)
            + "\n",
            encoding="utf-8",
        )
        out = tmp_path / "comm"
        code = main(
            [
                "communities",
                "--edges", str(pipeline / "edges.csv"),
                "--nodes", str(pipeline / "nodes.csv"),
                "--methods", "louvain",
                "--import", str(external),
                "--binary",
                "--no-figures",
                "--out", str(out),
            ]
        )
        assert code == 0
        summary = json.loads((out / "communities.json").read_text())
        assert "external" in summary["methods"]
        ari = read_csv(out / "ari_matrix.csv")
        assert len(ari) == 2

    def test_richclub_degree_mode(self, pipeline, tmp_path):
        out = tmp_path / "rc"
        code = main(
            [
                "richclub",
                "--edges", str(pipeline / "edges.csv"),
                "--nodes", str(pipeline / "nodes.csv"),
                "--mode", "degree",
                "--ensemble", "10",
                "--no-figures",
                "--out", str(out),
            ]
        )
        assert code == 0
        curve = read_csv(out / "richclub_curve.csv")
        # degree clubs ignore weights, so the null mean equals the actual phi
        for row in curve:
            if row["phi"]:
                assert float(row["phi_null_mean"]) == pytest.approx(float(row["phi"]))

    def test_report_without_membership(self, pipeline, tmp_path):
        out = tmp_path / "rep"
        code = main(
            [
                "report",
                "--matrix", str(pipeline / "matrix.csv"),
                "--corpus", str(pipeline / "corpus.jsonl"),
                "--no-figures",
                "--out", str(out),
            ]
        )
        assert code == 0
        assert (out / "content_timeseries.csv").exists()
        assert not (out / "group_terms_core.csv").exists()
