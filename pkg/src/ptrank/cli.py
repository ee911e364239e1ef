"""Command-line entry point for the provider ranking pipeline.

Subcommands cover the full batch flow: catalog validation, weak
ranking, candidate sampling, consensus, labeling, the agreement gate,
slate building, training, evaluation, prediction, signal export, and a
synthetic corpus generator. Every command reads the same plain-text
config (flags override keys), draws all randomness from one seed, and
writes its outputs plus a run manifest into --out-dir.

Exit codes: 0 success, 1 usage error, 2 data or config error, 3 runtime
error (training divergence, labeler transport failures, and the like).
"""

from __future__ import annotations

import argparse
import json
import csv
import logging
import math
import sys
from pathlib import Path

from . import catalog, plots
from .catalog import Locale
from .config import PipelineConfig, load_config
from .errors import ConfigError, DataError, PtrankError
from .features import EmbeddingIndex, assemble_inputs
from .manifest import ManifestWriter
from .nn import load_checkpoint, save_checkpoint
from .signal import build_signal_table, export_signals
from .training import (
    assemble_cells,
    evaluate_model,
    grade_labeled_slates,
    predict_slate,
    prepare_dataset,
    score_slate,
    synthesize,
    train,
    write_synthetic_dataset,
)
from .truth import (
    AGREEMENT_THRESHOLD,
    DEFAULT_PROMPT_TEMPLATE,
    HttpLabelerClient,
    MockLabelerClient,
    agreement,
    consensus_vote,
    read_candidate_sets,
    read_label_responses,
    request_labels,
    sample_candidates,
)
from .weak import RankedSlate, rank_topic, read_rankings, write_rankings

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    """argparse with the documented usage-error exit code (1, not 2)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


# ---------------------------------------------------------------------------
# Shared plumbing
# ---------------------------------------------------------------------------


def _config(args, **extra) -> PipelineConfig:
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    for key, value in extra.items():
        if value is not None:
            overrides[key] = value
    return load_config(args.config, overrides)


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_snapshots(path):
    return list(catalog.load_records(path, "snapshot"))


def _load_embeddings(path, dim):
    return list(catalog.load_records(path, "embedding", dim=dim))


def _cells(snapshots) -> dict[tuple[str, str], list]:
    by_cell: dict[tuple[str, str], list] = {}
    for snap in snapshots:
        by_cell.setdefault((snap.topic, str(snap.locale)), []).append(snap)
    return dict(sorted(by_cell.items()))


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, separators=(",", ":"), ensure_ascii=False) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    cfg = _config(args, embedding_dim=args.dim)
    out = _out_dir(args)
    man = ManifestWriter("validate", cfg.seed, cfg.render())
    man.add_input("snapshots", args.snapshots)
    man.add_input("embeddings", args.embeddings)
    snapshots = _load_snapshots(args.snapshots)
    embeddings = _load_embeddings(args.embeddings, None)
    report = catalog.validate_catalog(snapshots, embeddings, cfg.embedding_dim)
    report_path = out / "report.json"
    _write_json(report_path, report.to_dict())
    man.add_output("report", report_path)
    man.write(out)
    print(report.summary())
    for violation in report.violations:
        print(f"  - {violation}")
    return 0 if report.ok else 2


def cmd_weak_rank(args) -> int:
    cfg = _config(args, embedding_dim=args.dim, decay=args.decay, window_days=args.window_days)
    out = _out_dir(args)
    man = ManifestWriter("weak-rank", cfg.seed, cfg.render())
    man.add_input("snapshots", args.snapshots)
    man.add_input("embeddings", args.embeddings)
    snapshots = _load_snapshots(args.snapshots)
    index = EmbeddingIndex.from_records(_load_embeddings(args.embeddings, cfg.embedding_dim))
    rankings = []
    for (topic, loc), snaps in _cells(snapshots).items():
        locale = Locale.parse(loc)
        assembled = assemble_inputs(topic, locale, snaps, index, cfg.decay, cfg.window_days)
        cells = [(provider, inp.numeric) for provider, inp in assembled.items()]
        rankings.append(rank_topic(topic, locale, cells))
    path = out / "rankings.jsonl"
    write_rankings(path, rankings)
    man.add_output("rankings", path)
    man.write(out)
    print(f"ranked {len(rankings)} cell(s) -> {path}")
    return 0


def cmd_sample_candidates(args) -> int:
    cfg = _config(args, n_negatives=args.n_negatives)
    out = _out_dir(args)
    man = ManifestWriter("sample-candidates", cfg.seed, cfg.render())
    man.add_input("rankings", args.rankings)
    rankings = read_rankings(args.rankings)
    candidates = [
        sample_candidates(slate, slate.providers(), cfg.n_negatives, cfg.seed) for slate in rankings
    ]
    path = out / "candidates.jsonl"
    catalog.write_jsonl(path, (c.to_record() for c in candidates))
    man.add_output("candidates", path)
    man.write(out)
    short = sum(1 for c in candidates if c.negative_shortfall)
    print(f"sampled candidates for {len(candidates)} cell(s) ({short} with negative shortfall) -> {path}")
    return 0


def cmd_consensus(args) -> int:
    cfg = _config(args, quorum_agree=args.quorum_agree, quorum_total=args.quorum_total)
    out = _out_dir(args)
    man = ManifestWriter("consensus", cfg.seed, cfg.render())
    man.add_input("judgments", args.judgments)
    judgments = list(catalog.load_records(args.judgments, "judgment"))
    by_cell: dict[tuple[str, str], list] = {}
    for j in judgments:
        by_cell.setdefault((j.topic, str(j.locale)), []).append(j)
    rows = []
    accepted = 0
    for (topic, loc) in sorted(by_cell):
        locale = Locale.parse(loc)
        for result in consensus_vote(by_cell[(topic, loc)], (cfg.quorum_agree, cfg.quorum_total)):
            rows.append(result.to_record(topic, locale))
            accepted += int(result.accepted)
    path = out / "consensus.jsonl"
    catalog.write_jsonl(path, rows)
    man.add_output("consensus", path)
    man.write(out)
    print(f"consensus over {len(by_cell)} cell(s): {accepted}/{len(rows)} provider votes accepted -> {path}")
    return 0


def cmd_label(args) -> int:
    cfg = _config(args)
    out = _out_dir(args)
    man = ManifestWriter("label", cfg.seed, cfg.render())
    man.add_input("candidates", args.candidates)
    template = DEFAULT_PROMPT_TEMPLATE
    if args.template:
        try:
            template = Path(args.template).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read template {args.template}: {exc.strerror}") from exc
        man.add_input("template", args.template)
    if args.mock_dir:
        client = MockLabelerClient(args.mock_dir)
    else:
        client = HttpLabelerClient(args.endpoint)
    candidates = read_candidate_sets(args.candidates)
    labels = [request_labels(client, cand, template) for cand in candidates]
    path = out / "labels.jsonl"
    catalog.write_jsonl(path, (lab.to_record() for lab in labels))
    man.add_output("labels", path)
    man.write(out)
    added = sum(len(lab.additions) for lab in labels)
    print(f"labeled {len(labels)} cell(s) ({added} off-list addition(s)) -> {path}")
    return 0


def cmd_agreement(args) -> int:
    cfg = _config(args)
    out = _out_dir(args)
    man = ManifestWriter("agreement", cfg.seed, cfg.render())
    man.add_input("labels", args.labels)
    man.add_input("consensus", args.consensus)
    labels = read_label_responses(args.labels)
    accepted_by_cell: dict[tuple[str, str], set[str]] = {}
    for lineno, obj in catalog.read_jsonl(args.consensus):
        try:
            cell = (obj["topic"], obj["locale"])
            if obj["accepted"]:
                accepted_by_cell.setdefault(cell, set()).add(obj["provider"])
            else:
                accepted_by_cell.setdefault(cell, set())
        except (KeyError, TypeError) as exc:
            raise DataError(f"bad consensus row: {exc}", path=str(args.consensus), line=lineno) from None

    csv_rows = []
    cell_names, precisions, recalls = [], [], []
    passed_count = 0
    for lab in labels:
        cell = (lab.topic, str(lab.locale))
        if cell not in accepted_by_cell:
            raise DataError(f"no consensus rows for labeled cell {cell}")
        report = agreement(lab, accepted_by_cell[cell])
        csv_rows.append(
            [lab.topic, str(lab.locale), report.precision, report.recall,
             "pass" if report.passed else "fail", ";".join(report.flags)]
        )
        cell_names.append(f"{lab.topic}/{lab.locale}")
        precisions.append(report.precision)
        recalls.append(report.recall)
        passed_count += int(report.passed)
    if not csv_rows:
        raise DataError(f"no label responses in {args.labels}")
    mean_p = math.fsum(precisions) / len(precisions)
    mean_r = math.fsum(recalls) / len(recalls)
    gate = passed_count == len(csv_rows)
    csv_rows.append(["(all)", "*", mean_p, mean_r, "pass" if gate else "fail", ""])

    csv_path = out / "agreement.csv"
    _write_csv(csv_path, ["topic", "locale", "precision", "recall", "verdict", "flags"], csv_rows)
    png_path = plots.agreement_bars(cell_names, precisions, recalls, AGREEMENT_THRESHOLD, out / "agreement.png")
    man.add_output("agreement_csv", csv_path)
    man.add_output("agreement_png", png_path)
    man.write(out)
    print(
        f"agreement over {len(cell_names)} cell(s): {passed_count} passed, "
        f"mean precision {mean_p:.4f}, mean recall {mean_r:.4f}, gate {'PASS' if gate else 'FAIL'}"
    )
    return 0


def cmd_build_slates(args) -> int:
    cfg = _config(args, slate_capacity=args.slate_capacity)
    out = _out_dir(args)
    man = ManifestWriter("build-slates", cfg.seed, cfg.render())
    man.add_input("labels", args.labels)
    man.add_input("candidates", args.candidates)
    labels = read_label_responses(args.labels)
    candidates = read_candidate_sets(args.candidates)
    slates = grade_labeled_slates(labels, candidates, cfg.slate_capacity)
    path = out / "slates.jsonl"
    catalog.write_records(path, slates)
    man.add_output("slates", path)
    man.write(out)
    graded = sum(sum(1 for it in s.items if it.relevance > 0) for s in slates)
    zeros = sum(sum(1 for it in s.items if it.relevance == 0) for s in slates)
    print(f"built {len(slates)} slate(s) ({graded} graded items, {zeros} negatives) -> {path}")
    return 0


def _negative_sampling_flag(value: str | None):
    if value is None:
        return None
    return value == "on"


def cmd_train(args) -> int:
    cfg = _config(
        args,
        embedding_dim=args.dim,
        decay=args.decay,
        window_days=args.window_days,
        model=args.model,
        epochs=args.epochs,
        batch_size=args.batch_size,
        learning_rate=args.learning_rate,
        negative_sampling=_negative_sampling_flag(args.negative_sampling),
        validation_fraction=args.validation_fraction,
        slate_capacity=args.slate_capacity,
    )
    out = _out_dir(args)
    man = ManifestWriter("train", cfg.seed, cfg.render())
    for role, path in (("slates", args.slates), ("snapshots", args.snapshots), ("embeddings", args.embeddings)):
        man.add_input(role, path)
    slates = list(catalog.load_records(args.slates, "slate"))
    snapshots = _load_snapshots(args.snapshots)
    index = EmbeddingIndex.from_records(_load_embeddings(args.embeddings, cfg.embedding_dim))
    assembled = assemble_cells(slates, snapshots, index, cfg.decay, cfg.window_days)
    result = train(slates, assembled, cfg.training())
    for flag in result.flags:
        logger.warning(flag)

    checkpoint_path = out / "checkpoint.json"
    save_checkpoint(result.to_checkpoint(metadata={"decay": cfg.decay, "window_days": cfg.window_days}), checkpoint_path)
    trace_path = out / "trace.csv"
    _write_csv(trace_path, ["epoch", "loss", "ndcg10"], [[t.epoch, t.train_loss, t.val_ndcg] for t in result.traces])
    png_path = plots.training_curves(result.traces, out / "trace.png")
    man.add_output("checkpoint", checkpoint_path)
    man.add_output("trace_csv", trace_path)
    man.add_output("trace_png", png_path)
    man.write(out)
    print(
        f"trained {cfg.model} on {result.train_slates} slate(s) "
        f"(validation {result.val_slates}): final val NDCG@{cfg.ndcg_k} = {result.val_report.value:.4f}"
    )
    return 0


def cmd_eval(args) -> int:
    cfg = _config(args, embedding_dim=args.dim, decay=args.decay, window_days=args.window_days, ndcg_k=args.ndcg_k)
    out = _out_dir(args)
    man = ManifestWriter("eval", cfg.seed, cfg.render())
    for role, path in (
        ("checkpoint", args.checkpoint),
        ("slates", args.slates),
        ("snapshots", args.snapshots),
        ("embeddings", args.embeddings),
    ):
        man.add_input(role, path)
    model = load_checkpoint(args.checkpoint).build_model()
    slates = list(catalog.load_records(args.slates, "slate"))
    snapshots = _load_snapshots(args.snapshots)
    index = EmbeddingIndex.from_records(_load_embeddings(args.embeddings, cfg.embedding_dim))
    dataset = prepare_dataset(slates, snapshots, index, cfg.decay, cfg.window_days)
    widths = {st.embedding_dim for st in dataset}
    if widths and widths != {model.embedding_dim}:
        raise DataError(f"checkpoint expects embedding width {model.embedding_dim}, data has {sorted(widths)}")
    report, rows = evaluate_model(model, dataset, cfg.ndcg_k, cfg.parallelism)
    mean_tau = math.fsum(r.tau for r in rows) / len(rows) if rows else 0.0

    csv_rows = [[r.topic, str(r.locale), r.size, r.ndcg, r.tau] for r in rows]
    csv_rows.append(["(mean)", "*", report.slate_count, report.value, mean_tau])
    eval_path = out / "eval.csv"
    _write_csv(eval_path, ["topic", "locale", "items", "ndcg", "tau"], csv_rows)
    rankings = []
    for st in dataset:
        scores = score_slate(model, st)
        entries = sorted(zip(st.providers, scores.tolist()), key=lambda e: (-e[1], e[0]))
        rankings.append(RankedSlate(topic=st.topic, locale=st.locale, entries=tuple(entries)))
    rankings_path = out / "rankings.jsonl"
    write_rankings(rankings_path, rankings)
    png_path = plots.ndcg_histogram([r.ndcg for r in rows], cfg.ndcg_k, out / "eval.png")
    man.add_output("eval_csv", eval_path)
    man.add_output("rankings", rankings_path)
    man.add_output("eval_png", png_path)
    man.write(out)
    print(
        f"evaluated {len(rows)} slate(s): mean NDCG@{cfg.ndcg_k} = {report.value:.4f} "
        f"({report.skipped} all-zero slate(s) excluded), mean tau = {mean_tau:.4f}"
    )
    return 0


def cmd_predict(args) -> int:
    cfg = _config(args, embedding_dim=args.dim, decay=args.decay, window_days=args.window_days)
    out = _out_dir(args)
    man = ManifestWriter("predict", cfg.seed, cfg.render())
    for role, path in (("checkpoint", args.checkpoint), ("snapshots", args.snapshots), ("embeddings", args.embeddings)):
        man.add_input(role, path)
    locale = Locale.parse(args.locale)
    model = load_checkpoint(args.checkpoint).build_model()
    snapshots = _load_snapshots(args.snapshots)
    index = EmbeddingIndex.from_records(_load_embeddings(args.embeddings, cfg.embedding_dim))
    assembled = assemble_inputs(args.topic, locale, snapshots, index, cfg.decay, cfg.window_days)
    if not assembled:
        raise DataError(f"no snapshot rows for cell ({args.topic}, {locale})")
    ranked = predict_slate(model, args.topic, locale, assembled)
    path = out / "prediction.jsonl"
    write_rankings(path, [ranked])
    man.add_output("prediction", path)
    man.write(out)
    print(f"ranked {len(ranked)} provider(s) for ({args.topic}, {locale}):")
    for position, (provider, score) in enumerate(ranked.entries[:10], start=1):
        print(f"  {position:2d}. {provider}  {score:.6f}")
    return 0


def cmd_export_signal(args) -> int:
    cfg = _config(args, floor=args.floor)
    out = _out_dir(args)
    man = ManifestWriter("export-signal", cfg.seed, cfg.render())
    man.add_input("rankings", args.rankings)
    man.add_input("content", args.content)
    rankings = read_rankings(args.rankings)
    table = build_signal_table(rankings, cfg.floor)
    contents = list(catalog.load_records(args.content, "content"))
    signals = export_signals(contents, table, cfg.floor)
    table_path = out / "table.jsonl"
    catalog.write_jsonl(table_path, table.to_rows())
    signals_path = out / "signals.jsonl"
    catalog.write_jsonl(signals_path, (s.to_record() for s in signals))
    man.add_output("table", table_path)
    man.add_output("signals", signals_path)
    man.write(out)
    cold = sum(1 for s in signals if "cold_content" in s.flags)
    print(
        f"exported {len(table)} table entries and {len(signals)} content signal(s) "
        f"({cold} cold) -> {signals_path}"
    )
    return 0


def cmd_synth(args) -> int:
    cfg = _config(args)
    out = _out_dir(args)
    man = ManifestWriter("synth", cfg.seed, cfg.render())
    locales = tuple(Locale.parse(text) for text in args.locales.split(","))
    data = synthesize(
        n_topics=args.topics,
        n_providers=args.providers,
        embedding_dim=args.dim,
        seed=cfg.seed,
        n_days=args.days,
        locales=locales,
        extra_providers=args.extra_providers,
    )
    paths = write_synthetic_dataset(data, out)
    for role, path in paths.items():
        man.add_output(role, path)
    man.write(out)
    print(
        f"synthesized {args.topics} topic(s): {len(data.snapshots)} snapshots, "
        f"{len(data.embeddings)} embeddings, {len(data.labels)} labeled cells -> {out}"
    )
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ptrank", description="Batch provider-ranking pipeline.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command", parser_class=_Parser)

    def add_command(name: str, func, help_text: str):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", metavar="FILE", help="key = value config file")
        p.add_argument("--seed", type=int, help="master random seed (overrides config)")
        p.add_argument("--out-dir", default=".", metavar="DIR", help="output directory (default: .)")
        p.add_argument("--verbose", action="store_true", help="debug logging")
        p.set_defaults(func=func)
        return p

    def add_assembly_flags(p):
        p.add_argument("--dim", type=int, help="expected embedding width (default: infer)")
        p.add_argument("--decay", type=float, help="recency decay per day")
        p.add_argument("--window-days", type=int, help="recency window length")

    p = add_command("validate", cmd_validate, "Audit snapshots and embeddings against the catalog rules.")
    p.add_argument("--snapshots", required=True, metavar="FILE")
    p.add_argument("--embeddings", required=True, metavar="FILE")
    p.add_argument("--dim", type=int, help="expected embedding width (default: infer)")

    p = add_command("weak-rank", cmd_weak_rank, "Rank providers per (topic, locale) with the fixed linear scorer.")
    p.add_argument("--snapshots", required=True, metavar="FILE")
    p.add_argument("--embeddings", required=True, metavar="FILE")
    add_assembly_flags(p)

    p = add_command("sample-candidates", cmd_sample_candidates, "Draw labeling candidates from weak rankings.")
    p.add_argument("--rankings", required=True, metavar="FILE")
    p.add_argument("--n-negatives", type=int, help="negatives per cell (10..15)")

    p = add_command("consensus", cmd_consensus, "Fold annotator judgments into per-provider consensus.")
    p.add_argument("--judgments", required=True, metavar="FILE")
    p.add_argument("--quorum-agree", type=int, help="votes needed to accept")
    p.add_argument("--quorum-total", type=int, help="full panel size")

    p = add_command("label", cmd_label, "Request ranked labels for candidate sets from a labeler.")
    p.add_argument("--candidates", required=True, metavar="FILE")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--mock-dir", metavar="DIR", help="directory of canned <topic>.json responses")
    source.add_argument("--endpoint", metavar="URL", help="labeler HTTP endpoint")
    p.add_argument("--template", metavar="FILE", help="prompt template override")

    p = add_command("agreement", cmd_agreement, "Score labeler output against human consensus (95/95 gate).")
    p.add_argument("--labels", required=True, metavar="FILE")
    p.add_argument("--consensus", required=True, metavar="FILE")

    p = add_command("build-slates", cmd_build_slates, "Grade label responses into training slates.")
    p.add_argument("--labels", required=True, metavar="FILE")
    p.add_argument("--candidates", required=True, metavar="FILE")
    p.add_argument("--slate-capacity", type=int, help="max items per slate")

    p = add_command("train", cmd_train, "Train the listwise ranker or the pairwise baseline.")
    p.add_argument("--slates", required=True, metavar="FILE")
    p.add_argument("--snapshots", required=True, metavar="FILE")
    p.add_argument("--embeddings", required=True, metavar="FILE")
    add_assembly_flags(p)
    p.add_argument("--model", choices=["listwise", "pairwise"])
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--learning-rate", type=float)
    p.add_argument("--negative-sampling", choices=["on", "off"])
    p.add_argument("--validation-fraction", type=float)
    p.add_argument("--slate-capacity", type=int)

    p = add_command("eval", cmd_eval, "Evaluate a checkpoint on labeled slates (NDCG, Kendall tau).")
    p.add_argument("--checkpoint", required=True, metavar="FILE")
    p.add_argument("--slates", required=True, metavar="FILE")
    p.add_argument("--snapshots", required=True, metavar="FILE")
    p.add_argument("--embeddings", required=True, metavar="FILE")
    add_assembly_flags(p)
    p.add_argument("--ndcg-k", type=int)

    p = add_command("predict", cmd_predict, "Rank one cell's providers with a trained checkpoint.")
    p.add_argument("--checkpoint", required=True, metavar="FILE")
    p.add_argument("--snapshots", required=True, metavar="FILE")
    p.add_argument("--embeddings", required=True, metavar="FILE")
    p.add_argument("--topic", required=True)
    p.add_argument("--locale", required=True, help="e.g. en-US")
    add_assembly_flags(p)

    p = add_command("export-signal", cmd_export_signal, "Export the per-content multiplicative signal.")
    p.add_argument("--rankings", required=True, metavar="FILE")
    p.add_argument("--content", required=True, metavar="FILE")
    p.add_argument("--floor", type=float, help="lowest exported score (default 0.1)")

    p = add_command("synth", cmd_synth, "Generate a seeded synthetic corpus.")
    p.add_argument("--topics", type=int, default=20)
    p.add_argument("--providers", type=int, default=30, help="slate providers per topic")
    p.add_argument("--dim", type=int, default=64, help="embedding width")
    p.add_argument("--days", type=int, default=7)
    p.add_argument("--locales", default="en-US", help="comma-separated markets (default: en-US)")
    p.add_argument("--extra-providers", type=int, default=15, help="distractor providers per topic")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (ConfigError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PtrankError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # runtime failures map to exit 3 by contract
        logger.debug("unhandled exception", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
