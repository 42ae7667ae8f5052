#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
cli.py - sceembed command line program

Subcommands: smooth, train, evaluate, cut, gen-sbm, benchmark. All
randomness flows from --seed; lines starting with "time" carry wall clock
measurements and are the only output that differs between identical runs.

.. Licence MIT
"""
import argparse
import functools
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from sceembed.cachefile import CacheFileError
from sceembed.config import Aggregator, ConfigError, TrainConfig, PRESETS
from sceembed.config import load_config_file, resolve_config
from sceembed.cut_oracle import (
    CutSizeLimitError,
    CutVariant,
    InvalidCutError,
    brute_force_sparsest_cut,
    edge_expansion,
    edge_expansion_prime,
)
from sceembed.data import (
    Dataset,
    DatasetError,
    MatrixFormatError,
    gen_features,
    gen_sbm,
    load_dataset,
    load_matrix,
    read_labels,
    save_matrix,
    write_edge_list,
    write_labels,
)
from sceembed.evaluation import SplitError, logistic_probe, make_splits, mean_std
from sceembed.graph_core import DimensionError, EdgeListParseError, load_edge_list
from sceembed.model import embed
from sceembed.rngs import spawn_seeds
from sceembed.sce_core import SCE, __version__
from sceembed.training import DegenerateEmbeddingError, LossKind

logger = logging.getLogger("sceembed")

# flag name -> TrainConfig field
_CONFIG_FLAGS = {
    "k": "k",
    "dims": "dims",
    "lr": "lr",
    "alpha": "alpha",
    "beta": "beta",
    "epochs": "epochs",
    "neg_per_node": "neg_per_node",
    "batch_size": "batch_size",
    "aggregator": "aggregator",
    "seed": "seed",
}

# options every subcommand needs after resolution
_REQUIRED = {
    "smooth": ("graph", "features", "out"),
    "train": ("graph", "features"),
    "evaluate": ("embeddings", "labels"),
    "cut": ("graph",),
    "gen-sbm": ("sizes", "out"),
    "benchmark": (),
}

_KNOWN_ERRORS = (
    CacheFileError,
    ConfigError,
    CutSizeLimitError,
    DatasetError,
    DegenerateEmbeddingError,
    DimensionError,
    EdgeListParseError,
    InvalidCutError,
    MatrixFormatError,
    SplitError,
    OSError,
    ValueError,
)


@dataclass
class Command:
    """Validated subcommand with its resolved options."""

    subcommand: str
    options: Dict[str, Any]
    config: Optional[TrainConfig] = None


@dataclass
class BenchmarkReport:
    """Accuracy and Micro-F1 of every split, per label rate."""

    dataset: str
    accuracies: Dict[int, List[float]]
    micro_f1s: Dict[int, List[float]]
    train_seconds: float
    loss: str
    final_loss: Optional[float]
    trace: List[Tuple[int, float, float]] = field(default_factory=list)

    def summary(self, per_class: int) -> Tuple[float, float]:
        return mean_std(self.accuracies[per_class])

    def lines(self) -> List[str]:
        """Human readable lines followed by key=value summary lines."""
        out = []
        for per_class, values in self.accuracies.items():
            for split, (acc, f1) in enumerate(zip(values, self.micro_f1s[per_class])):
                out.append(
                    "per_class={} split={} accuracy={:.4f} micro_f1={:.4f}".format(
                        per_class, split, acc, f1
                    )
                )
            acc_mean, acc_std = mean_std(values)
            f1_mean, f1_std = mean_std(self.micro_f1s[per_class])
            out.append(
                "{} labels/class: accuracy {:.2f} ± {:.2f}, "
                "micro-F1 {:.2f} ± {:.2f} over {} splits".format(
                    per_class,
                    100 * acc_mean,
                    100 * acc_std,
                    100 * f1_mean,
                    100 * f1_std,
                    len(values),
                )
            )
            out.append(
                "summary dataset={} loss={} per_class={} splits={} "
                "accuracy_mean={:.6f} accuracy_std={:.6f} "
                "micro_f1_mean={:.6f} micro_f1_std={:.6f}".format(
                    self.dataset,
                    self.loss,
                    per_class,
                    len(values),
                    acc_mean,
                    acc_std,
                    f1_mean,
                    f1_std,
                )
            )
        if self.final_loss is not None:
            out.append("summary final_loss={:.10e}".format(self.final_loss))
        for epoch, seconds, acc in self.trace:
            out.append(
                "time trace epoch={} seconds={:.4f} accuracy={:.4f}".format(
                    epoch, seconds, acc
                )
            )
        out.append("time train_seconds={:.4f}".format(self.train_seconds))
        return out


def report_issue(func):
    """Friendly message for unexpected errors"""

    @functools.wraps(func)
    def wrapper_sce_cli(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except Exception:
            print(
                "Error: An unexpected error occurred. "
                "If you can't resolve this issue please report it together "
                "with the command line you used.",
                file=sys.stderr,
            )
            raise

    return wrapper_sce_cli


def _int_list(value: str) -> Tuple[int, ...]:
    try:
        items = tuple(int(item) for item in value.split(",") if item.strip())
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma separated integers")
    if not items:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return items


def _build_parser() -> argparse.ArgumentParser:
    """Parser with one subparser per subcommand"""
    parser = argparse.ArgumentParser(
        prog="sceembed",
        description="sceembed - unsupervised node embeddings trained on "
        "negative samples only, with sparsest cut oracles",
    )
    parser.add_argument(
        "--version",
        action="version",
        version="%(prog)s - version {}".format(__version__),
    )

    logging_opts = argparse.ArgumentParser(add_help=False)
    logging_opts.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="increase logging verbosity (-v info, -vv debug)",
    )

    data_opts = argparse.ArgumentParser(add_help=False)
    data_opts.add_argument("--graph", metavar="<edge_list>", help="edge list file")
    data_opts.add_argument(
        "--features",
        metavar="<features>",
        help="feature matrix, SCE1 binary or plain text",
    )
    data_opts.add_argument(
        "--labels", metavar="<labels>", help="one class id per line, -1 unlabeled"
    )

    train_opts = argparse.ArgumentParser(add_help=False)
    train_opts.add_argument(
        "--config", metavar="<config_file>", help="key = value configuration file"
    )
    train_opts.add_argument(
        "--preset",
        choices=sorted(PRESETS),
        help="hyper-parameters reported for a citation benchmark",
    )
    train_opts.add_argument("--seed", type=int, help="seed of all randomness")
    train_opts.add_argument("--k", type=int, help="smoothing depth")
    train_opts.add_argument(
        "--dims", type=_int_list, help="comma separated layer widths, e.g. 64,32"
    )
    train_opts.add_argument("--lr", type=float, help="Adam learning rate")
    train_opts.add_argument("--alpha", type=float, help="unsupervised loss weight")
    train_opts.add_argument("--beta", type=float, help="L2 weight")
    train_opts.add_argument("--epochs", type=int, help="training epochs")
    train_opts.add_argument(
        "--neg-per-node", dest="neg_per_node", type=int, help="negatives per node"
    )
    train_opts.add_argument(
        "--batch-size",
        dest="batch_size",
        type=int,
        help="mini-batch size b, 0 for full batch",
    )
    train_opts.add_argument(
        "--aggregator",
        choices=[mode.value for mode in Aggregator],
        help="none trains SCE, the others MoSCE",
    )
    train_opts.add_argument(
        "--loss",
        choices=[kind.value for kind in LossKind],
        default=LossKind.SCE.value,
        help="unsupervised loss (negative = ablation)",
    )
    train_opts.add_argument(
        "--cache-dir",
        dest="cache_dir",
        help="cache smoothing levels in this directory (no cache without it)",
    )
    train_opts.add_argument(
        "--no-cache",
        dest="no_cache",
        action="store_true",
        help="ignore --cache-dir, never read or write cached smoothing levels",
    )

    eval_opts = argparse.ArgumentParser(add_help=False)
    eval_opts.add_argument(
        "--per-class",
        dest="per_class",
        type=_int_list,
        default=(20,),
        help="training labels per class, comma list for a label-rate sweep",
    )
    eval_opts.add_argument(
        "--splits", type=int, default=10, help="number of random splits"
    )

    sub = parser.add_subparsers(dest="subcommand", metavar="<subcommand>")
    sub.required = True

    smooth = sub.add_parser(
        "smooth",
        parents=[logging_opts, data_opts, train_opts],
        help="write smoothed features F^(k)",
    )
    smooth.add_argument("--out", metavar="<file>", help="output SCE1 file")

    train = sub.add_parser(
        "train",
        parents=[logging_opts, data_opts, train_opts],
        help="train encoder and write embeddings",
    )
    train.add_argument("--out", metavar="<file>", help="output embedding file")

    evaluate = sub.add_parser(
        "evaluate",
        parents=[logging_opts, eval_opts],
        help="logistic-regression probe of an embedding file",
    )
    evaluate.add_argument("--embeddings", metavar="<file>", help="SCE1 embeddings")
    evaluate.add_argument("--labels", metavar="<labels>", help="label file")
    evaluate.add_argument("--seed", type=int, default=0, help="split seed")

    cut = sub.add_parser(
        "cut", parents=[logging_opts], help="exhaustive sparsest cut (n <= 20)"
    )
    cut.add_argument("--graph", metavar="<edge_list>", help="edge list file")
    cut.add_argument(
        "--variant",
        choices=[variant.value for variant in CutVariant],
        default=CutVariant.PHI_PRIME.value,
        help="objective to minimize",
    )

    sbm = sub.add_parser(
        "gen-sbm", parents=[logging_opts], help="generate synthetic SBM dataset"
    )
    sbm.add_argument("--sizes", type=_int_list, help="block sizes, e.g. 200,200")
    sbm.add_argument("--p-in", dest="p_in", type=float, default=0.05)
    sbm.add_argument("--p-out", dest="p_out", type=float, default=0.005)
    sbm.add_argument("--dim", type=int, default=32, help="feature width")
    sbm.add_argument("--signal", type=float, default=0.0)
    sbm.add_argument("--noise", type=float, default=1.0)
    sbm.add_argument("--seed", type=int, default=0)
    sbm.add_argument(
        "--out",
        metavar="<prefix>",
        help="writes <prefix>.edges, <prefix>.features, <prefix>.labels",
    )

    bench = sub.add_parser(
        "benchmark",
        parents=[logging_opts, data_opts, train_opts, eval_opts],
        help="train and probe over random splits",
    )
    bench.add_argument(
        "--sbm",
        type=_int_list,
        help="use a generated SBM (p_in 0.05, p_out 0.005, 32 noise features) "
        "with these block sizes instead of files",
    )
    bench.add_argument(
        "--trace",
        action="store_true",
        help="probe the first split after every epoch",
    )
    return parser


def parse_args(argv: Sequence[str]) -> Command:
    """
    Parse and validate command line.

    `--config` values are loaded first; preset < config file < flags.

    :param argv: arguments without program name
    :rtype: Command
    :raises: SystemExit with status 2 on usage error
    """
    parser = _build_parser()
    args = parser.parse_args(list(argv))
    options = vars(args)
    subcommand = options.pop("subcommand")

    missing = [name for name in _REQUIRED[subcommand] if options.get(name) is None]
    if subcommand == "benchmark" and options.get("sbm") is None:
        missing += [
            name
            for name in ("graph", "features", "labels")
            if options.get(name) is None
        ]
    if missing:
        parser.error(
            "{} requires {}".format(
                subcommand, ", ".join("--" + name.replace("_", "-") for name in missing)
            )
        )

    config = None
    if "epochs" in options:
        file_values = {}
        try:
            if options.get("config"):
                with open(options["config"], "r", encoding="utf-8") as stream:
                    file_values = load_config_file(stream)
            overrides = {flag: options.get(flag) for flag in _CONFIG_FLAGS}
            config = resolve_config(options.get("preset"), file_values, overrides)
            config.validate()
        except (ConfigError, OSError) as e:
            parser.error(str(e))

    return Command(subcommand, options, config)


def run_benchmark(
    dataset: Dataset,
    config: TrainConfig,
    splits: int = 10,
    per_class: Sequence[int] = (20,),
    loss: str = LossKind.SCE.value,
    trace: bool = False,
    sce: Optional[SCE] = None,
) -> BenchmarkReport:
    """
    Train embeddings and probe them over random per-class splits.

    With epochs = 0 the probe sees the untrained encoder. Splits depend
    only on the labels and config.seed, so loss variants share them.

    :param Dataset dataset: labeled dataset
    :param TrainConfig config: training hyper-parameters
    :param int splits: random splits per label rate
    :param per_class: training labels per class, one block per value
    :param str loss: "sce" or "negative"
    :param bool trace: probe the first split after every epoch
    :param SCE sce: estimator to use (cache settings), built from config if None
    :rtype: BenchmarkReport
    :raises: DatasetError when dataset has no labels
    """
    if dataset.labels is None:
        raise DatasetError("benchmark needs a labeled dataset")
    sce = sce or SCE(config)
    split_seed = spawn_seeds(config.seed, 4)[3]
    split_sets = {
        rate: make_splits(dataset.labels, rate, splits, seed=seed)
        for rate, seed in zip(per_class, split_seed.spawn(len(per_class)))
    }

    rows: List[Tuple[int, float, float]] = []
    callback = None
    if trace:
        levels = sce.smooth_features(dataset.graph, dataset.features)
        first_split = split_sets[per_class[0]][0]
        started = time.perf_counter()
        probing = [0.0]

        def callback(epoch, params, _loss):
            # probing time is excluded from the reported training time
            probe_started = time.perf_counter()
            elapsed = probe_started - started - probing[0]
            Z = embed(levels, params, config.aggregator)
            acc = logistic_probe(Z, first_split).accuracy
            probing[0] += time.perf_counter() - probe_started
            rows.append((epoch, elapsed, acc))

    result = sce.fit(dataset.graph, dataset.features, loss=loss, callback=callback)
    Z = sce.embed(dataset.graph, dataset.features)

    accuracies: Dict[int, List[float]] = {}
    micro_f1s: Dict[int, List[float]] = {}
    for rate, rate_splits in split_sets.items():
        probes = [logistic_probe(Z, split) for split in rate_splits]
        accuracies[rate] = [probe.accuracy for probe in probes]
        micro_f1s[rate] = [probe.micro_f1 for probe in probes]

    return BenchmarkReport(
        dataset=dataset.name,
        accuracies=accuracies,
        micro_f1s=micro_f1s,
        train_seconds=result.train_seconds,
        loss=LossKind(loss).value,
        final_loss=result.loss_history[-1] if result.loss_history else None,
        trace=rows,
    )


def _make_sce(command: Command) -> SCE:
    options = command.options
    cache_dir = options.get("cache_dir")
    return SCE(
        command.config,
        use_cache=bool(cache_dir) and not options.get("no_cache"),
        cache_dir=cache_dir,
    )


def _level_path(out: str, level: int) -> str:
    root, ext = os.path.splitext(out)
    return "{}-L{}{}".format(root, level, ext or ".sce")


def _cmd_smooth(command: Command) -> None:
    options = command.options
    dataset = load_dataset(options["graph"], options["features"])
    levels = _make_sce(command).smooth_features(dataset.graph, dataset.features)
    if len(levels) == 1:
        save_matrix(levels[0], options["out"])
        print("wrote {} ({} x {})".format(options["out"], *levels[0].shape))
        return
    for level, matrix in enumerate(levels, start=1):
        path = _level_path(options["out"], level)
        save_matrix(matrix, path)
        print("wrote {} ({} x {})".format(path, *matrix.shape))


def _cmd_train(command: Command) -> None:
    options = command.options
    dataset = load_dataset(options["graph"], options["features"])
    sce = _make_sce(command)
    result = sce.fit(dataset.graph, dataset.features, loss=options["loss"])
    Z = sce.embed(dataset.graph, dataset.features)
    if options.get("out"):
        save_matrix(Z, options["out"])
        print("wrote {} ({} x {})".format(options["out"], *Z.shape))
    print("initial_loss={:.10e}".format(result.initial_loss))
    if result.loss_history:
        print("final_loss={:.10e}".format(result.loss_history[-1]))
    print("time train_seconds={:.4f}".format(result.train_seconds))


def _cmd_evaluate(command: Command) -> None:
    options = command.options
    Z = load_matrix(options["embeddings"])
    labels = read_labels(options["labels"])
    if Z.shape[0] != labels.shape[0]:
        raise DatasetError(
            "{} has {} rows but {} has {} labels".format(
                options["embeddings"], Z.shape[0], options["labels"], labels.shape[0]
            )
        )
    seeds = spawn_seeds(options["seed"], len(options["per_class"]))
    for rate, seed in zip(options["per_class"], seeds):
        values = []
        for index, split in enumerate(
            make_splits(labels, rate, options["splits"], seed=seed)
        ):
            probe = logistic_probe(Z, split)
            values.append(probe.accuracy)
            print(
                "per_class={} split={} accuracy={:.4f} micro_f1={:.4f}".format(
                    rate, index, probe.accuracy, probe.micro_f1
                )
            )
        mean, std = mean_std(values)
        print(
            "{} labels/class: accuracy {:.2f} ± {:.2f} over {} splits".format(
                rate, 100 * mean, 100 * std, len(values)
            )
        )


def _cmd_cut(command: Command) -> None:
    options = command.options
    with open(options["graph"], "r", encoding="utf-8") as stream:
        graph = load_edge_list(stream)
    result = brute_force_sparsest_cut(graph, options["variant"])
    print("variant={}".format(result.variant.value))
    print("value={!r}".format(result.value))
    print("set={}".format(" ".join(str(node) for node in result.best_set.members())))
    print(
        "phi={!r} phi_prime={!r}".format(
            edge_expansion(graph, result.best_set),
            edge_expansion_prime(graph, result.best_set),
        )
    )


def _cmd_gen_sbm(command: Command) -> None:
    options = command.options
    graph_seed, feature_seed = spawn_seeds(options["seed"], 2)
    graph, labels = gen_sbm(
        options["sizes"], options["p_in"], options["p_out"], graph_seed
    )
    features = gen_features(
        labels, options["dim"], options["signal"], options["noise"], feature_seed
    )
    prefix = options["out"]
    write_edge_list(graph, prefix + ".edges")
    save_matrix(features, prefix + ".features")
    write_labels(labels, prefix + ".labels")
    print(
        "wrote {0}.edges {0}.features {0}.labels (n={1}, m={2})".format(
            prefix, graph.n, graph.m
        )
    )


def synthetic_dataset(sizes: Sequence[int], seed: int = 0) -> Dataset:
    """Two-level benchmark: SBM graph with pure-noise 32-d features."""
    graph_seed, feature_seed = spawn_seeds(seed, 2)
    graph, labels = gen_sbm(sizes, 0.05, 0.005, graph_seed)
    features = gen_features(labels, 32, signal=0.0, noise=1.0, seed=feature_seed)
    return Dataset(graph, features, labels, name="sbm")


def _cmd_benchmark(command: Command) -> None:
    options = command.options
    if options.get("sbm") is not None:
        dataset = synthetic_dataset(options["sbm"], command.config.seed)
    else:
        dataset = load_dataset(options["graph"], options["features"], options["labels"])
    report = run_benchmark(
        dataset,
        command.config,
        splits=options["splits"],
        per_class=options["per_class"],
        loss=options["loss"],
        trace=options["trace"],
        sce=_make_sce(command),
    )
    for line in report.lines():
        print(line)


_HANDLERS = {
    "smooth": _cmd_smooth,
    "train": _cmd_train,
    "evaluate": _cmd_evaluate,
    "cut": _cmd_cut,
    "gen-sbm": _cmd_gen_sbm,
    "benchmark": _cmd_benchmark,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand.

    :return: exit status, 0 on success
    :rtype: int
    """
    command = parse_args(sys.argv[1:] if argv is None else argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(
        command.options.get("verbose", 0), logging.DEBUG
    )
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s - %(levelname)s (%(name)s): %(message)s",
    )

    try:
        _HANDLERS[command.subcommand](command)
    except _KNOWN_ERRORS as e:
        logger.error(str(e))
        return 1
    return 0


@report_issue
def _sce_cli():
    """
    sceembed - command line program for training and evaluating embeddings
    Usage: sceembed <subcommand> [options]
    """
    sys.exit(main())


if __name__ == "__main__":
    _sce_cli()
