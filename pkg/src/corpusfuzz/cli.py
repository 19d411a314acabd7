"""``corpusfuzz`` command line: extract, cluster, plan, run, report.

Exit codes: 0 success, 1 usage or validation error, 2 environment problem
(missing or broken tool), 3 internal error, 130 interrupted.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import signal
import sys
import traceback

from . import __version__
from .campaign import (
    MODEL,
    PLAN,
    RECORDS,
    cluster_matrix,
    extract_corpus,
    list_corpus,
    load_config,
    run_campaign,
)
from .clustering import ClusteringParams, load_model, save_model
from .exceptions import CorpusFuzzError, GenerationError, ToolchainError, ValidationError
from .features import dumps_vectors_csv, load_catalog, read_vectors_csv, write_vectors_csv
from .features.catalog import DEFAULT_CATALOG
from .planner import Strategy, plan_schedule, plan_to_dict, save_plan
from .reporting import average_summaries, render_machine, render_table, tally

log = logging.getLogger("corpusfuzz")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ENV = 2
EXIT_INTERNAL = 3
EXIT_INTERRUPTED = 130


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for environment errors here
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: {message}")


def _global_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    s = argparse.SUPPRESS
    p.add_argument("--seed", type=int, default=s, help="master seed (run, plan) or clustering seed (cluster)")
    p.add_argument("--workers", type=int, default=s, help="parallel trials (default: CPU count)")
    p.add_argument("--keep-all", action="store_true", default=s, help="retain sources of passing trials")
    p.add_argument("--output", "-o", default=s, help="output file or directory")
    p.add_argument("--verbose", "-v", action="count", default=s)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = _Parser(prog="corpusfuzz", parents=[common],
                     description="Corpus-guided configuration of a feature-configurable C program generator.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("extract", parents=[common], help="count features in a seed corpus, write CSV")
    p.add_argument("corpus_dir")
    p.add_argument("--catalog", default=DEFAULT_CATALOG)

    p = sub.add_parser("cluster", parents=[common], help="normalize a feature CSV and run X-Means")
    p.add_argument("features_csv")
    p.add_argument("--catalog", default=DEFAULT_CATALOG)
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, default=200)
    p.add_argument("--tolerance", type=float, default=0.025)
    p.add_argument("--max-iter", type=int, default=500)

    p = sub.add_parser("plan", parents=[common], help="write a campaign schedule")
    p.add_argument("--strategy", default=Strategy.ROUND_ROBIN.value,
                   choices=[s.value for s in Strategy])
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--model", help="cluster model (required by kconfig strategies)")

    p = sub.add_parser("run", parents=[common], help="run or resume a campaign")
    p.add_argument("config", help="campaign configuration (JSON)")
    p.add_argument("--strategy", choices=[s.value for s in Strategy])
    p.add_argument("--budget", type=int)
    p.add_argument("--corpus", dest="corpus_dir")
    p.add_argument("--model")
    p.add_argument("--catalog")
    p.add_argument("--mock", metavar="SCENARIO", help="use the bundled mock toolchain")

    p = sub.add_parser("report", parents=[common], help="summarize one or more campaign directories")
    p.add_argument("campaign_dirs", nargs="+")
    p.add_argument("--format", choices=["table", "machine"], default="table")
    p.add_argument("--average", action="store_true", help="add a row averaged over the given runs")
    return parser


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_extract(args) -> int:
    catalog = load_catalog(args.catalog)
    if not os.path.isdir(args.corpus_dir):
        raise ValidationError(f"corpus directory {args.corpus_dir!r} does not exist")
    if not list_corpus(args.corpus_dir)[0]:
        raise ValidationError(f"no corpus files (*.c, *.i, *.h) under {args.corpus_dir!r}")
    matrix, problems = extract_corpus(args.corpus_dir, catalog)
    for p in problems:
        log.warning("%s", p)
    if not matrix.rows:
        raise ValidationError(f"no corpus files could be read under {args.corpus_dir!r}")
    output = getattr(args, "output", None)
    if output:
        write_vectors_csv(matrix, catalog, output)
    else:
        sys.stdout.write(dumps_vectors_csv(matrix, catalog))
    log.info("extracted %d program(s), skipped %d", len(matrix.rows), len(problems))
    return EXIT_OK


def cmd_cluster(args) -> int:
    catalog = load_catalog(args.catalog)
    matrix = read_vectors_csv(args.features_csv, catalog)
    if not matrix.rows:
        raise ValidationError(f"{args.features_csv}: no feature rows")
    params = ClusteringParams(k_min=args.k_min, k_max=args.k_max, tolerance=args.tolerance,
                              max_iter=args.max_iter, rng_seed=getattr(args, "seed", 0))
    model = cluster_matrix(matrix, params, catalog)
    output = getattr(args, "output", None) or MODEL
    save_model(model, output)
    print(f"k = {model.k}")
    print("sizes = " + " ".join(str(s) for s in model.sizes))
    print(f"model written to {output}")
    return EXIT_OK


def cmd_plan(args) -> int:
    strategy = Strategy.parse(args.strategy)
    model = None
    if strategy.uses_centroids:
        if not args.model:
            raise ValidationError(f"strategy {strategy.value!r} needs --model (see 'corpusfuzz cluster')")
        model = load_model(args.model)
    plan = plan_schedule(model, strategy, args.budget, getattr(args, "seed", 0), args.model)
    output = getattr(args, "output", None)
    if output:
        save_plan(plan, output)
        counts = plan.counts()
        print(f"{strategy.value}: budget {plan.budget}, per-centroid counts {counts}" if counts
              else f"{strategy.value}: budget {plan.budget}")
    else:
        json.dump(plan_to_dict(plan), sys.stdout, indent=1, sort_keys=True)
        sys.stdout.write("\n")
    return EXIT_OK


def cmd_run(args) -> int:
    overrides = {
        "strategy": args.strategy,
        "budget": args.budget,
        "corpus_dir": args.corpus_dir,
        "model": args.model,
        "catalog": args.catalog,
        "master_seed": getattr(args, "seed", None),
        "workers": getattr(args, "workers", None),
        "keep_all": getattr(args, "keep_all", None),
        "output_dir": getattr(args, "output", None),
    }
    if args.mock:
        overrides["toolchain"] = {"mock": args.mock}
    config = load_config(args.config, overrides)
    result = run_campaign(config)
    log.info("executed %d trial(s), %d already recorded", result["executed"], result["already_done"])
    with open(os.path.join(config.output_dir, "summary.txt"), encoding="utf-8") as fh:
        sys.stdout.write(fh.read())
    return EXIT_OK


def _summary_of(directory):
    path = os.path.join(directory, RECORDS)
    if not os.path.isfile(path):
        raise ValidationError(f"no records log at {path}")
    with open(path, encoding="utf-8", errors="replace") as fh:
        lines = [line for line in fh.read().split("\n") if line.strip()]
    strategy = os.path.basename(os.path.normpath(directory))
    plan_path = os.path.join(directory, PLAN)
    if os.path.isfile(plan_path):
        with open(plan_path, encoding="utf-8") as fh:
            strategy = json.load(fh).get("strategy", strategy)
    return tally(lines, strategy)


def cmd_report(args) -> int:
    summaries = [_summary_of(d) for d in args.campaign_dirs]
    averaged = average_summaries(summaries) if args.average else None
    if args.format == "table":
        text = render_table(summaries, averaged)
    elif len(summaries) == 1 and averaged is None:
        text = render_machine(summaries[0])
    else:
        runs = [json.loads(render_machine(s)) for s in summaries]
        doc = {"format": "corpusfuzz-summary-set/1", "runs": runs, "average": averaged}
        text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    _emit(text, getattr(args, "output", None))
    return EXIT_OK


COMMANDS = {
    "extract": cmd_extract,
    "cluster": cmd_cluster,
    "plan": cmd_plan,
    "run": cmd_run,
    "report": cmd_report,
}


def _terminate(signum, frame):
    raise KeyboardInterrupt


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    level = {0: logging.WARNING, 1: logging.INFO}.get(getattr(args, "verbose", 0), logging.DEBUG)
    logging.basicConfig(level=level, format="corpusfuzz: %(message)s", stream=sys.stderr, force=True)
    # SIGTERM gets the same graceful shutdown as Ctrl-C
    previous = signal.signal(signal.SIGTERM, _terminate)
    try:
        return COMMANDS[args.command](args)
    except (ToolchainError, GenerationError) as exc:
        print(f"corpusfuzz: error: {exc}", file=sys.stderr)
        return EXIT_ENV
    except CorpusFuzzError as exc:
        print(f"corpusfuzz: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"corpusfuzz: error: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        print("corpusfuzz: interrupted; completed trials are recorded, rerun to resume", file=sys.stderr)
        return EXIT_INTERRUPTED
    except Exception:  # noqa: BLE001
        traceback.print_exc()
        print("corpusfuzz: internal error", file=sys.stderr)
        return EXIT_INTERNAL
    finally:
        signal.signal(signal.SIGTERM, previous)


if __name__ == "__main__":
    sys.exit(main())
