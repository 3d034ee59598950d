"""Command-line front end: ``symlab {run,check,report,dataset,symmetry}``.

Exit status is 0 on success, 1 when a check fails or its hypotheses do not
hold, and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .datasets import DATASETS, RatedDataset, test_battery
from .experiment import ExperimentConfig, ExperimentError, ScoreReport, resolve_config, run_experiment
from .invariance import PreconditionError, theorem1_check, theorem2_check
from .lbfgs import LbfgsConfig
from .learners import AsRandomized, IdentityOracle, Memorizer, MLPLearner, PositionalUnigram
from .mlp import NetConfig
from .symmetry import apply, apply_to_dataset, is_dataset_invariant, parse_symmetry, verify_bijection
from .words import LATIN, LATIN2, DomainError, InfeasibleCodebook, fresh_distributed_codebook

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _learner(args):
    if args.learner == "memorizer":
        return Memorizer(args.default)
    if args.learner == "pos-unigram":
        return PositionalUnigram(args.smoothing)
    if args.learner == "identity-oracle":
        return IdentityOracle()
    config = NetConfig(
        hidden_layers=args.layers, hidden_width=args.width, encoder=args.encoding,
        max_iterations=args.max_iterations,
    )
    return MLPLearner(config, LbfgsConfig(max_iterations=args.max_iterations))


def cmd_run(args) -> int:
    overrides = {
        "master_seed": args.seed,
        "repetitions": args.repetitions,
        "hidden_layers_list": tuple(args.layers) if args.layers else None,
        "hidden_width": args.width,
        "encodings": tuple(args.encodings) if args.encodings else None,
        "output_dir": args.output_dir,
        "max_iterations": args.max_iterations,
    }
    config = resolve_config(args.config, overrides)
    try:
        report = run_experiment(config, jobs=args.jobs)
    except ExperimentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(f"wrote {config.output_dir} ({len(report.rows)} score rows, {len(report.failures)} failed repetitions)")
    if args.report:
        from .plotting import render_report

        for path in render_report(report, config.output_dir):
            print(f"wrote {path}")
    return EXIT_OK


def cmd_check(args) -> int:
    sigma = parse_symmetry(args.symmetry, LATIN2)
    data = DATASETS[args.dataset](args.seed)
    learner = _learner(args)
    try:
        if args.theorem == 1:
            if not learner.deterministic:
                print("error: theorem 1 needs a deterministic learner; use --theorem 2", file=sys.stderr)
                return EXIT_FAIL
            report = theorem1_check(learner, sigma, data, dataset_id=args.dataset, seed=args.seed)
        else:
            if learner.deterministic:
                learner = AsRandomized(learner)
            report = theorem2_check(
                learner, sigma, data, args.word, n_reps=args.reps, seed=args.seed,
                dataset_id=args.dataset, jobs=args.jobs,
            )
    except PreconditionError as exc:
        print(f"precondition failed: {exc}")
        return EXIT_FAIL
    print(json.dumps(report.to_dict(), sort_keys=True) if args.json else report.summary())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_report(args) -> int:
    from .plotting import render_report

    report = ScoreReport.load(args.run_dir)
    styles = ("bars-svg", "table-text") if args.style == "all" else (args.style,)
    for path in render_report(report, args.output_dir or args.run_dir, styles):
        print(f"wrote {path}")
    return EXIT_OK


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_dataset(args) -> int:
    if args.kind == "battery":
        _emit("\n".join(test_battery(args.seed)) + "\n", args.out)
    elif args.kind == "codebook":
        try:
            spec = fresh_distributed_codebook(LATIN, args.k, args.seed)
        except InfeasibleCodebook as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FAIL
        _emit(spec.to_csv(), args.out)
    else:
        _emit(DATASETS[args.kind](args.seed).to_csv(), args.out)
    return EXIT_OK


def cmd_symmetry(args) -> int:
    sigma = parse_symmetry(args.symmetry, LATIN2)
    if args.verify:
        ok = verify_bijection(sigma)
        print(f"{sigma.name}: {'bijection' if ok else 'NOT a bijection'} on {sigma.domain.size} words")
        if not ok:
            return EXIT_FAIL
    if args.words:
        for w in args.words:
            print(f"{w}\t{apply(sigma, w)}")
        return EXIT_OK
    if args.input is None:
        return EXIT_OK
    text = sys.stdin.read() if args.input == "-" else Path(args.input).read_text()
    if text.lstrip().startswith("word"):
        data = RatedDataset.from_csv(text, LATIN2)
        if args.invariant:
            ok = is_dataset_invariant(sigma, data)
            print(f"dataset {'is' if ok else 'is NOT'} invariant under {sigma.name}")
            return EXIT_OK if ok else EXIT_FAIL
        sys.stdout.write(apply_to_dataset(sigma, data).to_csv())
    else:
        for w in text.split():
            print(f"{w}\t{apply(sigma, w)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="symlab", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run the network experiment grid")
    r.add_argument("--config", help="JSON experiment config")
    r.add_argument("--seed", type=int, help="master seed (overrides config and SYMLAB_SEED)")
    r.add_argument("--repetitions", type=int)
    r.add_argument("--layers", type=int, nargs="+", choices=(1, 2, 3))
    r.add_argument("--width", type=int)
    r.add_argument("--encodings", nargs="+", choices=("localist", "distributed"))
    r.add_argument("--max-iterations", type=int)
    r.add_argument("--output-dir")
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--report", action="store_true", help="also render figures and table")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("check", help="check a theorem for a learner, symmetry and dataset")
    c.add_argument("--theorem", type=int, choices=(1, 2), required=True)
    c.add_argument("--learner", choices=("memorizer", "pos-unigram", "identity-oracle", "mlp"), required=True)
    c.add_argument("--symmetry", required=True, help="identity|reversal|yz-swap|pos-perm:<position>:<cycles>")
    c.add_argument("--dataset", choices=sorted(DATASETS), required=True)
    c.add_argument("--word", default="YY", help="probe word for theorem 2")
    c.add_argument("--reps", type=int, default=40)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--default", type=float, default=0.5, help="memorizer score for unseen words")
    c.add_argument("--smoothing", type=float, default=1.0)
    c.add_argument("--layers", type=int, default=1, choices=(1, 2, 3))
    c.add_argument("--width", type=int, default=256)
    c.add_argument("--encoding", choices=("localist", "distributed"), default="localist")
    c.add_argument("--max-iterations", type=int, default=100)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_check)

    rp = sub.add_parser("report", help="render figures and tables from a run directory")
    rp.add_argument("--run-dir", required=True)
    rp.add_argument("--output-dir")
    rp.add_argument("--style", choices=("bars-svg", "table-text", "all"), default="all")
    rp.set_defaults(func=cmd_report)

    d = sub.add_parser("dataset", help="emit a generated dataset as CSV")
    d.add_argument("kind", choices=sorted(DATASETS) + ["battery", "codebook"])
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--k", type=int, default=26, help="code length for codebooks")
    d.add_argument("--out")
    d.set_defaults(func=cmd_dataset)

    s = sub.add_parser("symmetry", help="apply or verify a symmetry")
    s.add_argument("--symmetry", required=True)
    s.add_argument("words", nargs="*")
    s.add_argument("--input", help="file of words or word,rating CSV ('-' for stdin)")
    s.add_argument("--verify", action="store_true", help="check bijectivity on all words")
    s.add_argument("--invariant", action="store_true", help="test dataset invariance instead of mapping it")
    s.set_defaults(func=cmd_symmetry)
    return p


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (ValueError, DomainError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
