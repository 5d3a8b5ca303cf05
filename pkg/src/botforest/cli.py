"""Command-line entry point: train, score, evaluate, adapt, synthesize, serve.

Exit codes: 0 success, 1 usage error, 2 data/model error. All file outputs
are written atomically (temp file + rename), so a failing run never leaves
partial output behind.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from .accounts import (
    Corpus,
    LabeledAccount,
    atomic_write_text,
    load_corpus,
    parse_account,
    score_result_to_json,
)
from .ensemble import (
    EscModel,
    esc_score,
    load_model,
    load_partition,
    model_digest,
    monolithic_score_result,
    save_model,
    train_esc_rows,
    train_monolithic_rows,
)
from .errors import BotforestError, UsageError
from .evalkit import (
    EscTrainer,
    MonolithicTrainer,
    add_specialist_curve,
    cross_domain_matrix,
    kfold_cv_table,
    loco_experiment_table,
    matrix_to_csv,
    spearman_rho,
)
from .features import REGISTRY, featurize_account, featurize_corpus
from .forest import TrainParams, set_default_jobs
from .seeds import derive_seed
from .synthgen import generate_dataset, load_synth_config

log = logging.getLogger("botforest")

DEFAULT_SEED = 42


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> _Parser:
    p = _Parser(prog="botforest", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=None,
                   help=f"seed for every stochastic step (default {DEFAULT_SEED})")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads for tree training (default: all cores)")
    p.add_argument("--log-level", default=os.environ.get("ESC_LOG", "warning"))
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("synth", help="generate a synthetic labeled corpus")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out", required=True)

    tp = sub.add_parser("train", help="train an ensemble (or baseline-only) model")
    tp.add_argument("--data", nargs="+", required=True)
    tp.add_argument("--partition", default=None)
    tp.add_argument("--out", required=True)
    tp.add_argument("--trees", type=int, default=100)
    tp.add_argument("--baseline-only", action="store_true",
                    help="train just the general human/bot forest pipeline")

    scp = sub.add_parser("score", help="score accounts from a JSONL file")
    scp.add_argument("--model", required=True)
    scp.add_argument("--input", required=True)
    scp.add_argument("--output", required=True)

    ep = sub.add_parser("eval", help="evaluation protocols")
    esub = ep.add_subparsers(dest="eval_command", required=True)

    cv = esub.add_parser("cv", help="in-domain stratified cross-validation")
    cv.add_argument("--data", nargs="+", required=True)
    cv.add_argument("--partition", required=True)
    cv.add_argument("--folds", type=int, default=5)
    cv.add_argument("--trees", type=int, default=100)
    cv.add_argument("--out", default=None)

    mx = esub.add_parser("matrix", help="train-on-row, test-on-column domain matrix")
    mx.add_argument("--data", nargs="+", required=True,
                    help="one corpus path per domain (>= 2)")
    mx.add_argument("--trainer", choices=("monolithic", "esc"), required=True)
    mx.add_argument("--partition", default=None)
    mx.add_argument("--trees", type=int, default=100)
    mx.add_argument("--out-prefix", default=None,
                    help="write <prefix>.<metric>.csv files instead of stdout JSON")

    ho = esub.add_parser("holdout", help="train/test split evaluation with CIs")
    ho.add_argument("--train", nargs="+", required=True)
    ho.add_argument("--test", nargs="+", required=True)
    ho.add_argument("--partition", required=True)
    ho.add_argument("--trees", type=int, default=100)
    ho.add_argument("--out", default=None)

    lc = esub.add_parser("loco", help="leave-one-class-out evaluation")
    lc.add_argument("--data", nargs="+", required=True)
    lc.add_argument("--partition", required=True)
    lc.add_argument("--held-class", required=True)
    lc.add_argument("--trees", type=int, default=100)
    lc.add_argument("--out", default=None)

    ad = sub.add_parser("adapt", help="grow one specialist on a new domain, tracking F1")
    ad.add_argument("--model", required=True)
    ad.add_argument("--new-data", required=True)
    ad.add_argument("--class-name", required=True)
    ad.add_argument("--step", type=int, default=50)
    ad.add_argument("--budget", type=int, default=800)
    ad.add_argument("--out-curve", required=True)

    fp = sub.add_parser("features", help="feature registry tools")
    fsub = fp.add_subparsers(dest="features_command", required=True)
    fsub.add_parser("list", help="dump the feature registry as JSON")

    sv = sub.add_parser("serve", help="run the HTTP scoring service")
    sv.add_argument("--model", required=True)
    sv.add_argument("--port", type=int, default=8080)
    sv.add_argument("--bind", default="127.0.0.1")

    return p


def _load_merged(paths) -> Corpus:
    examples = []
    for path in paths:
        examples.extend(load_corpus(path).examples)
    return Corpus(examples=examples, source_path=";".join(str(p) for p in paths))


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        atomic_write_text(out_path, text)
    else:
        sys.stdout.write(text)


def _cmd_synth(args, seed: int) -> int:
    config = load_synth_config(args.config)
    if args.seed is not None:
        from dataclasses import replace

        config = replace(config, seed=args.seed)
    corpus = generate_dataset(config)
    from .accounts import write_corpus

    write_corpus(corpus, args.out)
    log.info("wrote %d accounts to %s", len(corpus), args.out)
    return 0


def _cmd_train(args, seed: int) -> int:
    if not args.baseline_only and not args.partition:
        raise UsageError("--partition is required unless --baseline-only is set")
    corpus = _load_merged(args.data)
    table = featurize_corpus(corpus)
    params = TrainParams(n_trees=args.trees)
    rows = np.arange(len(table))
    if args.baseline_only:
        model = train_monolithic_rows(table, rows, params, seed)
    else:
        partition = load_partition(args.partition)
        model = train_esc_rows(table, rows, partition, params, seed)
    save_model(model, args.out)
    print(f"model digest sha256:{model_digest(model)}")
    return 0


def _cmd_score(args, seed: int) -> int:
    model = load_model(args.model)
    lines = []
    with open(args.input, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            acc = parse_account(line)
            raw = acc.account if isinstance(acc, LabeledAccount) else acc
            fv = featurize_account(raw)
            if isinstance(model, EscModel):
                result = esc_score(model, fv, user_id=raw.user_id)
            else:
                result = monolithic_score_result(model, fv, user_id=raw.user_id)
            lines.append(score_result_to_json(result))
    atomic_write_text(args.output, "".join(line + "\n" for line in lines))
    log.info("scored %d accounts", len(lines))
    return 0


def _cmd_eval_cv(args, seed: int) -> int:
    corpus = _load_merged(args.data)
    table = featurize_corpus(corpus)
    partition = load_partition(args.partition)
    params = TrainParams(n_trees=args.trees)
    mono_report, mono_oof = kfold_cv_table(
        table, MonolithicTrainer(params), args.folds, derive_seed(seed, 1)
    )
    esc_report, esc_oof = kfold_cv_table(
        table, EscTrainer(partition, params), args.folds, derive_seed(seed, 1)
    )
    out = {
        "monolithic": mono_report.to_obj(),
        "esc": esc_report.to_obj(),
        "score_agreement_spearman": spearman_rho(mono_oof, esc_oof),
    }
    _emit(json.dumps(out, indent=2) + "\n", args.out)
    return 0


def _cmd_eval_matrix(args, seed: int) -> int:
    if len(args.data) < 2:
        raise UsageError("eval matrix needs at least two --data corpora")
    corpora = [load_corpus(p) for p in args.data]
    params = TrainParams(n_trees=args.trees)
    if args.trainer == "esc":
        if not args.partition:
            raise UsageError("--partition is required for the esc trainer")
        trainer = EscTrainer(load_partition(args.partition), params)
    else:
        trainer = MonolithicTrainer(params)
    matrix = cross_domain_matrix(corpora, trainer, seed=seed)
    if args.out_prefix:
        for metric in ("precision", "recall", "f1", "auc"):
            atomic_write_text(f"{args.out_prefix}.{metric}.csv", matrix_to_csv(matrix, metric))
        return 0
    obj = [[cell.to_obj() for cell in row] for row in matrix]
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")
    return 0


def _cmd_eval_holdout(args, seed: int) -> int:
    train_corpus = _load_merged(args.train)
    test_corpus = _load_merged(args.test)
    partition = load_partition(args.partition)
    params = TrainParams(n_trees=args.trees)
    from .evalkit import _report_from_scores  # shared report assembly

    train_table = featurize_corpus(train_corpus)
    test_table = featurize_corpus(test_corpus)
    rows = np.arange(len(train_table))
    results = {}
    for name, trainer in (
        ("monolithic", MonolithicTrainer(params)),
        ("esc", EscTrainer(partition, params)),
    ):
        scorer = trainer.train(train_table, rows, derive_seed(seed, 2))
        scores = scorer.scores(test_table.X)
        results[name] = _report_from_scores(
            scores, test_table.y, derive_seed(seed, 3),
            {"experiment": "holdout", "trainer": name, "seed": seed},
        ).to_obj()
    _emit(json.dumps(results, indent=2) + "\n", args.out)
    return 0


def _cmd_eval_loco(args, seed: int) -> int:
    corpus = _load_merged(args.data)
    table = featurize_corpus(corpus)
    partition = load_partition(args.partition)
    result = loco_experiment_table(
        table, partition, args.held_class, TrainParams(n_trees=args.trees), seed
    )
    _emit(json.dumps(result.to_obj(), indent=2) + "\n", args.out)
    return 0


def _cmd_adapt(args, seed: int) -> int:
    model = load_model(args.model)
    if not isinstance(model, EscModel):
        raise UsageError("adapt requires an ensemble model, not a baseline-only one")
    holdout = load_corpus(args.new_data)
    curve = add_specialist_curve(
        model, holdout, args.class_name, step=args.step, budget=args.budget, seed=seed
    )
    atomic_write_text(args.out_curve, curve.to_csv())
    return 0


def _cmd_features_list(args, seed: int) -> int:
    sys.stdout.write(json.dumps(REGISTRY.to_obj(), indent=2) + "\n")
    return 0


def _cmd_serve(args, seed: int) -> int:
    from .service import serve

    serve(args.model, bind=args.bind, port=args.port)
    return 0


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    logging.basicConfig(level=args.log_level.upper(),
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    if args.threads is not None:
        set_default_jobs(args.threads)
    else:
        set_default_jobs(os.cpu_count() or 1)
    handlers = {
        "synth": _cmd_synth,
        "train": _cmd_train,
        "score": _cmd_score,
        "adapt": _cmd_adapt,
        "serve": _cmd_serve,
    }
    try:
        if args.command == "eval":
            handler = {
                "cv": _cmd_eval_cv,
                "matrix": _cmd_eval_matrix,
                "holdout": _cmd_eval_holdout,
                "loco": _cmd_eval_loco,
            }[args.eval_command]
        elif args.command == "features":
            handler = _cmd_features_list
        else:
            handler = handlers[args.command]
        return handler(args, seed)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except (BotforestError, OSError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
