"""Command line pipeline: glossary build -> ingest -> matrix -> network ->
metrics / communities / richclub -> report.

Every stage reads the previous stage's files, writes CSV/JSON results into
``--out`` and, for the analysis stages, renders matplotlib figures next to
them (disable with ``--no-figures``). Validation problems exit with code 2.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import json
import logging
import math
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from . import community as community_mod
from . import figures, netmetrics, report, richclub, simnet
from .corpus import ingest, load_corpus, save_corpus
from .errors import ValidationError
from .glossary import build_glossary, load_glossary, load_source, save_glossary
from .graph import density, largest_component, read_graph, write_graph
from .termmatrix import build_matrix, read_matrix, write_matrix

log = logging.getLogger("termnet")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _json_ready(value):
    if isinstance(value, float) and math.isnan(value):
        return None
    if isinstance(value, dict):
        return {k: _json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_ready(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return _json_ready(float(value))
    return value


def _write_json(payload: dict, path: Path) -> None:
    path.write_text(json.dumps(_json_ready(payload), indent=2) + "\n", encoding="utf-8")


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _hist_rows(values, bins=50):
    counts, edges = netmetrics.histogram(values, bins)
    return [
        (repr(float(edges[i])), repr(float(edges[i + 1])), int(counts[i]))
        for i in range(len(counts))
    ]


# ---------------------------------------------------------------- commands


def cmd_glossary_build(args) -> int:
    out = _out_dir(args)
    entries = []
    for source in args.sources:
        entries.extend(load_source(source))
    glossary = build_glossary(entries)
    save_glossary(glossary, out / "glossary.json")
    log.info(
        "glossary: %d canonical terms, %d variants, max length %d",
        len(glossary), len(glossary.variant_universe()), glossary.max_len,
    )
    return 0


def cmd_ingest(args) -> int:
    out = _out_dir(args)
    corpus = ingest(args.corpus_dir, args.metadata, cut_marker=args.cut_marker)
    save_corpus(corpus, out / "corpus.jsonl")
    empty = corpus.empty_document_ids()
    _write_json(
        {
            "documents": len(corpus),
            "empty_documents": empty,
            "provenance": corpus.provenance,
        },
        out / "ingest_report.json",
    )
    log.info("ingested %d documents (%d empty)", len(corpus), len(empty))
    return 0


def cmd_matrix(args) -> int:
    out = _out_dir(args)
    corpus = load_corpus(args.corpus)
    glossary = load_glossary(args.glossary)
    matrix, removed = build_matrix(corpus, glossary)
    write_matrix(matrix, out / "matrix.csv", removed=removed)
    log.info(
        "matrix: %d documents x %d terms (%d document(s) without occurrences removed)",
        matrix.shape[0], matrix.shape[1], len(removed),
    )
    return 0


def cmd_network(args) -> int:
    out = _out_dir(args)
    matrix, _ = read_matrix(args.matrix)
    corpus = load_corpus(args.corpus)
    attrs = {
        d.id: {"date": d.date.isoformat(), "speaker": d.speaker, "category": d.category}
        for d in corpus.documents
    }
    missing = [d for d in matrix.doc_ids if d not in attrs]
    if missing:
        raise ValidationError(f"corpus lacks metadata for document(s): {', '.join(missing[:5])}")

    similarity = simnet.similarity_matrix(matrix, use=args.frequencies)
    log.info(
        "similarity: %d documents, %d pairs", similarity.n, similarity.pair_values().size
    )
    pvalues = simnet.permutation_pvalues(
        matrix,
        n_perm=args.permutations,
        seed=args.seed,
        use=args.frequencies,
        workers=args.workers,
        smoothing=args.pvalue_smoothing,
    )
    if args.no_bonferroni:
        tau = args.alpha
    else:
        tau = simnet.bonferroni_threshold(args.alpha, similarity.n)
    graph = simnet.filter_network(similarity, pvalues, tau, matrix.doc_ids, attrs)
    if graph.m == 0:
        raise ValidationError(f"no significant edges at tau={tau:.3g}")
    density_all = density(graph)
    lcc = largest_component(graph)
    dropped = sorted(set(graph.ids) - set(lcc.ids))

    write_graph(lcc, out / "edges.csv", out / "nodes.csv")
    all_pairs = similarity.pair_values()
    kept = np.array([w for _, _, w in lcc.edges()])
    _write_csv(out / "sim_pdf_all.csv", ["bin_left", "bin_right", "count"], _hist_rows(all_pairs))
    _write_csv(
        out / "sim_pdf_significant.csv", ["bin_left", "bin_right", "count"], _hist_rows(kept)
    )
    _write_json(
        {
            "alpha": args.alpha,
            "permutations": args.permutations,
            "seed": args.seed,
            "bonferroni": not args.no_bonferroni,
            "pvalue_smoothing": args.pvalue_smoothing,
            "frequencies": args.frequencies,
            "tau": tau,
            "documents": similarity.n,
            "nodes_all": graph.n,
            "edges_all": graph.m,
            "density_all": density_all,
            "nodes_lcc": lcc.n,
            "edges_lcc": lcc.m,
            "density_lcc": density(lcc) if lcc.n >= 2 else math.nan,
            "disconnected_nodes": dropped,
        },
        out / "network.json",
    )
    if not args.no_figures:
        figures.similarity_pdf(all_pairs, kept, out / "fig_similarity_pdf.png")
    log.info(
        "network: tau=%.3g, %d/%d nodes in largest component, %d edges, density %.4f",
        tau, lcc.n, graph.n, lcc.m, density_all,
    )
    return 0


def _parse_dates(graph) -> list[dt.date] | None:
    raw = graph.attribute("date")
    if any(not value for value in raw):
        return None
    return [dt.date.fromisoformat(value) for value in raw]


def cmd_metrics(args) -> int:
    out = _out_dir(args)
    graph = read_graph(args.edges, args.nodes)
    stats = netmetrics.node_stats(graph)
    null = netmetrics.clustering_null(graph, instances=args.null_instances, seed=args.seed)

    assortativity: dict[str, float | None] = {
        "degree": netmetrics.assortativity_scalar(graph, stats.degree.astype(float)),
        "strength": netmetrics.assortativity_scalar(graph, stats.strength),
    }
    dates = _parse_dates(graph)
    assortativity["date"] = (
        netmetrics.assortativity_scalar(graph, [d.toordinal() for d in dates])
        if dates
        else math.nan
    )
    assortativity["speaker"] = netmetrics.assortativity_categorical(
        graph, graph.attribute("speaker")
    )
    assortativity["category"] = netmetrics.assortativity_categorical(
        graph, graph.attribute("category")
    )

    _write_csv(
        out / "node_stats.csv",
        ["id", "degree", "strength", "clustering_weighted", "clustering_unweighted"],
        [
            (
                node_id,
                int(k),
                repr(float(s)),
                "" if math.isnan(cw) else repr(float(cw)),
                "" if math.isnan(cu) else repr(float(cu)),
            )
            for node_id, k, s, cw, cu in zip(
                stats.ids, stats.degree, stats.strength,
                stats.clustering_weighted, stats.clustering_unweighted,
            )
        ],
    )
    for name, curve in (("ccdf_clustering", null["actual_ccdf"]), ("ccdf_clustering_null", null["null_ccdf"])):
        _write_csv(
            out / f"{name}.csv",
            ["value", "ccdf"],
            [(repr(float(v)), repr(float(p))) for v, p in zip(curve.values, curve.probabilities)],
        )
    _write_csv(out / "hist_degree.csv", ["bin_left", "bin_right", "count"], _hist_rows(stats.degree))
    _write_csv(out / "hist_strength.csv", ["bin_left", "bin_right", "count"], _hist_rows(stats.strength))
    for attribute in ("date", "speaker", "category"):
        values = graph.attribute(attribute)
        if attribute == "date":
            values = [v[:4] for v in values]  # per-year counts
        counts = Counter(values)
        _write_csv(
            out / f"counts_{attribute}.csv",
            [attribute, "count"],
            sorted(counts.items()),
        )

    payload = {
        "nodes": graph.n,
        "edges": graph.m,
        "density": density(graph),
        "global_clustering": netmetrics.global_clustering(graph),
        "mean_clustering_weighted": stats.mean_clustering(weighted=True),
        "mean_clustering_unweighted": stats.mean_clustering(weighted=False),
        "clustering_null": {
            "instances": args.null_instances,
            "seed": args.seed,
            "actual_mean": null["actual_mean"],
            "null_mean": null["null_mean"],
        },
        "assortativity": assortativity,
        "bimodality_coefficient": {
            "degree": netmetrics.bimodality_coefficient(stats.degree),
            "strength": netmetrics.bimodality_coefficient(stats.strength),
        },
    }
    _write_json(payload, out / "metrics.json")

    if not args.no_figures:
        figures.degree_strength_histograms(stats.degree, stats.strength, out / "fig_degree_strength.png")
        figures.clustering_ccdf(null["actual_ccdf"], null["null_ccdf"], out / "fig_clustering_ccdf.png")
        for attribute in ("date", "speaker", "category"):
            values = graph.attribute(attribute)
            if attribute == "date":
                values = [v[:4] for v in values]
            figures.attribute_bars(
                dict(sorted(Counter(values).items())), attribute, out / f"fig_counts_{attribute}.png"
            )
    log.info(
        "metrics: C=%.4f, mean c_w=%.4f, mean c_u=%.4f",
        payload["global_clustering"],
        payload["mean_clustering_weighted"],
        payload["mean_clustering_unweighted"],
    )
    return 0


def cmd_communities(args) -> int:
    out = _out_dir(args)
    graph = read_graph(args.edges, args.nodes)
    if graph.n >= 2 and density(graph) > community_mod.DENSE_GRAPH_WARNING:
        log.warning(
            "graph density %.3f exceeds %.1f; community detection on dense graphs "
            "can be unstable", density(graph), community_mod.DENSE_GRAPH_WARNING,
        )
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    known = {
        "louvain": lambda: community_mod.louvain(graph, seed=args.seed, binary=args.binary),
        "lp": lambda: community_mod.label_propagation(graph, seed=args.seed, binary=args.binary),
        "greedy": lambda: community_mod.greedy_modularity(graph, binary=args.binary),
    }
    unknown = [m for m in methods if m not in known]
    if unknown:
        raise ValidationError(f"unknown method(s): {', '.join(unknown)}; choose from {sorted(known)}")

    partitions = []
    import warnings as _warnings

    with _warnings.catch_warnings():
        _warnings.simplefilter("ignore")  # density warning already logged once
        for method in methods:
            partitions.append(known[method]())
    for path in args.imports or []:
        partitions.append(community_mod.import_partition(path))

    partition_dir = out / "partitions"
    partition_dir.mkdir(exist_ok=True)
    modularity_scores = {}
    for partition in partitions:
        community_mod.write_partition(partition, partition_dir / f"{partition.method}.csv")
        modularity_scores[partition.method] = community_mod.modularity(graph, partition)

    payload = {
        "methods": [p.method for p in partitions],
        "seed": args.seed,
        "binary": args.binary,
        "communities": {p.method: p.n_communities() for p in partitions},
        "modularity": modularity_scores,
    }
    if len(partitions) >= 2:
        labels, matrix = community_mod.ari_matrix(partitions)
        _write_csv(
            out / "ari_matrix.csv",
            ["method", *labels],
            [(label, *[repr(float(v)) for v in row]) for label, row in zip(labels, matrix)],
        )
        if not args.no_figures:
            figures.ari_heatmap(labels, matrix, out / "fig_ari.png")
    _write_json(payload, out / "communities.json")
    log.info("communities: %s", ", ".join(f"{p.method}={p.n_communities()}" for p in partitions))
    return 0


def cmd_richclub(args) -> int:
    out = _out_dir(args)
    graph = read_graph(args.edges, args.nodes)
    ensemble = netmetrics.NullEnsemble(graph=graph, instances=args.ensemble, seed=args.seed)
    curve = richclub.normalized_curve(graph, args.mode, ensemble)
    richclub.write_curve(curve, out / "richclub_curve.csv")

    cut = args.club_cut if args.club_cut is not None else curve.regime_start
    membership = None
    if cut is not None:
        membership = richclub.core_periphery_split(graph, cut)
        richclub.write_membership(membership, out / "membership.csv")
        composition = richclub.group_composition(graph, membership, "category")
        _write_json(composition, out / "group_composition.json")
    else:
        log.warning(
            "no rich-club regime detected in %s mode; pass --club-cut to force a split",
            args.mode,
        )

    _write_json(
        {
            "mode": args.mode,
            "ensemble": args.ensemble,
            "seed": args.seed,
            "regime_start": curve.regime_start,
            "club_cut": cut,
            "core_size": int(membership.in_core.sum()) if membership is not None else None,
        },
        out / "richclub.json",
    )
    if not args.no_figures:
        figures.richclub_curve(curve, out / "fig_richclub.png")
    log.info(
        "rich club (%s): regime start %s, cut %s",
        args.mode, curve.regime_start, cut,
    )
    return 0


def cmd_report(args) -> int:
    out = _out_dir(args)
    matrix, _ = read_matrix(args.matrix)
    corpus = load_corpus(args.corpus)
    dates = {d.id: d.date for d in corpus.documents}
    periods = report.load_periods(args.periods) if args.periods else []
    rows = report.content_timeseries(matrix, dates, periods)
    report.write_timeseries(rows, out / "content_timeseries.csv")
    if not args.no_figures:
        figures.content_timeseries(rows, out / "fig_content_timeseries.png")

    if args.membership:
        in_core = richclub.read_membership(args.membership)
        full_core, full_periphery = report.group_terms(matrix, in_core, cutoff=None)
        cut_core, cut_periphery = report.group_terms(matrix, in_core, cutoff=args.cutoff)
        report.write_group_table(full_core, out / "group_terms_core.csv")
        report.write_group_table(full_periphery, out / "group_terms_periphery.csv")
        report.write_group_table(cut_core, out / "group_terms_core_cutoff.csv")
        report.write_group_table(cut_periphery, out / "group_terms_periphery_cutoff.csv")
        if not args.no_figures:
            figures.group_term_bars(full_core, full_periphery, out / "fig_group_terms.png")
            figures.group_term_bars(cut_core, cut_periphery, out / "fig_group_terms_cutoff.png")
    log.info("report: %d documents, %d labelled recession", len(rows),
             sum(1 for r in rows if r.period == "recession"))
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="termnet",
        description="Glossary-based similarity networks for document corpora.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_out(p):
        p.add_argument("--out", default=".", help="result directory (default: current)")

    def add_figures(p):
        p.add_argument("--no-figures", action="store_true", help="skip figure rendering")

    glossary = sub.add_parser("glossary", help="glossary operations")
    glossary_sub = glossary.add_subparsers(dest="glossary_command", required=True)
    build = glossary_sub.add_parser("build", help="merge glossary sources into glossary.json")
    build.add_argument("sources", nargs="+", help="TSV or JSON glossary source files")
    add_out(build)
    build.set_defaults(func=cmd_glossary_build)

    p = sub.add_parser("ingest", help="read documents + metadata into corpus.jsonl")
    p.add_argument("--corpus-dir", required=True, help="directory of <id>.txt files")
    p.add_argument("--metadata", required=True, help="CSV with id,date,speaker,category")
    p.add_argument("--cut-marker", default=None,
                   help="drop text after the first occurrence of this marker")
    add_out(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("matrix", help="count occurrences into the document-term matrix")
    p.add_argument("--corpus", required=True, help="corpus.jsonl from ingest")
    p.add_argument("--glossary", required=True, help="glossary.json from glossary build")
    add_out(p)
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("network", help="similarity + permutation test + thresholding")
    p.add_argument("--matrix", required=True, help="matrix.csv from the matrix stage")
    p.add_argument("--corpus", required=True, help="corpus.jsonl (node attributes)")
    p.add_argument("--alpha", type=float, default=0.001)
    p.add_argument("--permutations", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1, help="permutation worker threads")
    p.add_argument("--no-bonferroni", action="store_true",
                   help="threshold each pair at alpha without correction")
    p.add_argument("--pvalue-smoothing", action="store_true",
                   help="estimate p as (count+1)/(n_perm+1) instead of count/n_perm")
    p.add_argument("--frequencies", choices=("abs", "rel"), default="abs",
                   help="which frequencies feed the cosine (equal up to rounding)")
    add_out(p)
    add_figures(p)
    p.set_defaults(func=cmd_network)

    p = sub.add_parser("metrics", help="clustering, assortativity, distributions")
    p.add_argument("--edges", required=True)
    p.add_argument("--nodes", required=True)
    p.add_argument("--null-instances", type=int, default=100,
                   help="weight-reshuffle instances for the clustering null")
    p.add_argument("--seed", type=int, default=0)
    add_out(p)
    add_figures(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("communities", help="partitions and their pairwise agreement")
    p.add_argument("--edges", required=True)
    p.add_argument("--nodes", required=True)
    p.add_argument("--methods", default="louvain,lp,greedy",
                   help="comma list from louvain,lp,greedy")
    p.add_argument("--import", dest="imports", action="append", metavar="PARTITION_CSV",
                   help="external node_id,community_id partition (repeatable)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--binary", action="store_true", help="ignore weights, use adjacency")
    add_out(p)
    add_figures(p)
    p.set_defaults(func=cmd_communities)

    p = sub.add_parser("richclub", help="rich-club curve, regime and core split")
    p.add_argument("--edges", required=True)
    p.add_argument("--nodes", required=True)
    p.add_argument("--mode", choices=richclub.MODES, default="rank")
    p.add_argument("--ensemble", type=int, default=100,
                   help="weight-reshuffle instances for normalization")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--club-cut", type=float, default=None,
                   help="rank cut for the core (default: detected regime start)")
    add_out(p)
    add_figures(p)
    p.set_defaults(func=cmd_richclub)

    p = sub.add_parser("report", help="content time series and group term tables")
    p.add_argument("--matrix", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--membership", default=None, help="membership.csv from richclub")
    p.add_argument("--periods", default=None, help="CSV with start,end,label date ranges")
    p.add_argument("--cutoff", type=float, default=0.02,
                   help="fraction of top-mass terms removed in the cutoff tables")
    add_out(p)
    add_figures(p)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
