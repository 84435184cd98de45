"""Command-line entry point.

Every command writes its outputs plus ``manifest.json`` into ``--out``. Exit
codes: 0 success, 2 usage error, 3 unparsable input, 4 data-contract failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from pathlib import Path

from . import LABELS, DataError, ParseError, __version__
from .baseline import baseline_trainer, pair_configs, predict_matrix, train_all_labels
from .correlate import correlate_features, correlate_labels
from .corpus import WEEKDAYS, label_distribution, parse_corpus, summarize, weekday_breakdown
from .ensemble import (
    EnsembleConfig,
    ensemble_predict,
    format_predictions,
    format_run,
    grid_search,
    parse_predictions,
    preset_configs,
    system_runs,
)
from .evaluate import cross_validate_configs, evaluate_predictions, kfold_split, lookup_trainer
from .metrics import FIELDS
from .semfeat import Lexicons, extract_features, format_features, load_wordnet, parse_features
from .synthetic import data_path

EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_DATA = 4


class UsageError(Exception):
    pass


class Run:
    """Collects inputs read and outputs written by one command."""

    def __init__(self, command: str, args: argparse.Namespace):
        self.command = command
        self.out = Path(args.out)
        self.fmt = args.format
        self.params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")}
        self.inputs: dict[str, str] = {}
        self.outputs: dict[str, str] = {}

    def read(self, path) -> bytes:
        path = Path(path)
        try:
            data = path.read_bytes()
        except OSError as exc:
            raise ParseError(f"cannot read: {exc.strerror}", str(path)) from None
        self.inputs[str(path)] = hashlib.sha256(data).hexdigest()
        return data

    def write(self, name: str, text: str) -> None:
        path = self.out / name
        path.parent.mkdir(parents=True, exist_ok=True)
        data = text.encode("utf-8")
        path.write_bytes(data)
        self.outputs[name] = hashlib.sha256(data).hexdigest()

    def table(self, stem: str, headers, rows, percent=(), decimals=None) -> None:
        self.write(f"{stem}.{_EXT[self.fmt]}", render(headers, rows, self.fmt, percent, decimals))

    def finish(self) -> None:
        manifest = {
            "command": self.command,
            "version": __version__,
            "seed": self.params.get("seed"),
            "params": self.params,
            "inputs": dict(sorted(self.inputs.items())),
            "outputs": dict(sorted(self.outputs.items())),
        }
        self.out.mkdir(parents=True, exist_ok=True)
        (self.out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")


_EXT = {"csv": "csv", "json": "json", "markdown": "md"}


def _cell(value, fmt, as_percent, decimals):
    if value is None:
        return "" if fmt != "json" else None
    if fmt == "json":
        return value
    if isinstance(value, float):
        if fmt == "markdown" and as_percent:
            return f"{100 * value:.2f}%"
        if decimals is not None:
            return f"{value:.{decimals}f}"
        return repr(value) if fmt == "csv" else f"{value:.3f}"
    return str(value)


def render(headers, rows, fmt, percent=(), decimals=None) -> str:
    """Render rows as csv, json or markdown.

    Values are fractions; columns listed in ``percent`` are shown as 2-decimal
    percentages in markdown only.
    """
    rows = [list(r) for r in rows]
    if fmt == "json":
        return json.dumps([dict(zip(headers, r)) for r in rows], indent=2) + "\n"
    cells = [[_cell(v, fmt, h in percent, decimals) for h, v in zip(headers, r)] for r in rows]
    if fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(headers)
        writer.writerows(cells)
        return out.getvalue()
    lines = ["| " + " | ".join(headers) + " |", "|" + "---|" * len(headers)]
    lines += ["| " + " | ".join(c for c in r) + " |" for r in cells]
    return "\n".join(lines) + "\n"


def _schema(run, path):
    if path is None:
        return None
    try:
        return json.loads(run.read(path))
    except ValueError as exc:
        raise ParseError(f"schema is not JSON: {exc}", str(path)) from None


def _corpus(run, path, schema=None, labelled=True):
    records = parse_corpus(run.read(path), _schema(run, schema), source=str(path))
    if labelled and any(r.labels is None for r in records):
        raise DataError(f"{path}: corpus carries no label columns")
    return records


def _predictions(run, path, roles):
    matrix = parse_predictions(run.read(path), source=str(path))
    if roles:
        names = roles.split(",")
        if len(names) != 2:
            raise UsageError("--models takes two comma-separated model ids (A role, B role)")
        matrix = matrix.renamed({names[0]: "A", names[1]: "B"})
    return matrix


def _configs(run, names, files, threshold):
    presets = preset_configs()
    configs = {}
    for name in names or []:
        if name == "A":
            configs[name] = EnsembleConfig.uniform(1.0, threshold, name)
        elif name == "B":
            configs[name] = EnsembleConfig.uniform(0.0, threshold, name)
        elif name in presets:
            configs[name] = EnsembleConfig(presets[name].weights, threshold, name)
        else:
            raise UsageError(f"unknown config {name!r}; choose from A, B, {', '.join(presets)}")
    for path in files or []:
        try:
            cfg = EnsembleConfig.from_dict(json.loads(run.read(path)))
        except (ValueError, KeyError, TypeError) as exc:
            raise ParseError(f"bad config file: {exc}", str(path)) from None
        configs[cfg.name or Path(path).stem] = cfg
    return configs


def _metric_rows(named_reports):
    return [[name, *(getattr(rep, f) for f in FIELDS)] for name, rep in named_reports]


def cmd_stats(args):
    run = Run("stats", args)
    records = _corpus(run, args.corpus, args.schema, labelled=False)
    s = summarize(records)
    rows = [["n_comments", s.n_comments, "", "", ""], ["n_parents", s.n_parents, "", "", ""], ["n_users", s.n_users, "", "", ""]]
    for name in ("comments_per_parent", "comments_per_user", "words_per_comment", "impact"):
        st = getattr(s, name)
        rows.append([name, st.mean, st.min, st.max, st.std])
    run.table("summary", ["statistic", "mean_or_count", "min", "max", "std"], rows)
    if s.label_rates is not None:
        run.table("labels", ["label", "positive_rate"], [[k, v] for k, v in label_distribution(records).items()], percent=("positive_rate",))
        table = weekday_breakdown(records)
        wrows = [[day, *(table.rows[day][l] / 100 for l in LABELS)] for day in WEEKDAYS if day in table.rows]
        wrows.append(["Overall", *(table.overall[l] / 100 for l in LABELS)])
        run.table("weekday", ["weekday", *LABELS], wrows, percent=LABELS)
    run.finish()


def cmd_train(args):
    run = Run("train", args)
    records = _corpus(run, args.corpus, args.schema)
    targets = _corpus(run, args.predict, args.schema, labelled=False) if args.predict else records
    overrides = {k: v for k, v in (("learning_rate", args.lr), ("epochs", args.epochs), ("l2", args.l2)) if v is not None}
    matrix = None
    for model_id, cfg in pair_configs(args.seed, **overrides).items():
        models = train_all_labels(records, cfg)
        for m in models:
            run.write(f"models/{model_id}-{m.label}.json", m.to_json() + "\n")
        part = predict_matrix(models, targets, model_id)
        matrix = part if matrix is None else matrix.merged(part)
    run.write("predictions.jsonl", format_predictions(matrix))
    run.finish()


def cmd_ensemble(args):
    run = Run("ensemble", args)
    matrix = _predictions(run, args.predictions, args.models)
    gold = {r.id: r.labels for r in _corpus(run, args.gold, args.schema)} if args.gold else None
    if args.all_runs:
        runs = system_runs(matrix, threshold=args.threshold)
    else:
        configs = _configs(run, args.config or ([] if args.weights else ["Model 5"]), args.weights, args.threshold)
        runs = {_slug(name): ensemble_predict(matrix, cfg) for name, cfg in configs.items()}
    rows = []
    for name, predicted in runs.items():
        run.write(f"runs/{name}.csv", format_run(predicted))
        if gold is not None:
            rows.append([name, *(getattr(evaluate_predictions(predicted, gold)[1], f) for f in FIELDS)])
    if gold is not None:
        run.table("metrics", ["run", *FIELDS], rows, percent=("accuracy",))
    run.finish()


def _slug(name):
    return name.lower().replace(" ", "")


def cmd_gridsearch(args):
    run = Run("gridsearch", args)
    matrix = _predictions(run, args.predictions, args.models)
    gold = {r.id: r.labels for r in _corpus(run, args.gold, args.schema)}
    result = grid_search(matrix, gold, args.step, args.objective, args.threshold)
    run.write("best_config.json", json.dumps(result.config.to_dict(), indent=2) + "\n")
    rows = []
    for label in LABELS:
        for w, metrics in result.table[label]:
            rows.append([label, w, 1.0 - w, *(metrics[f] for f in FIELDS)])
    run.table("grid", ["label", "w_a", "w_b", *FIELDS], rows, percent=("accuracy",))
    run.table(
        "best",
        ["label", "w_a", "w_b", args.objective],
        [[l, p.w_a, p.w_b, result.objective[l]] for l, p in zip(LABELS, result.config.weights)],
    )
    run.finish()


def cmd_evaluate(args):
    run = Run("evaluate", args)
    if (args.corpus is None) == (args.predictions is None):
        raise UsageError("give exactly one of --corpus or --predictions")
    if args.predictions is not None:
        if args.gold is None:
            raise UsageError("--predictions needs --gold")
        matrix = _predictions(run, args.predictions, args.models)
        records = [r for r in _corpus(run, args.gold, args.schema) if r.id in set(matrix.ids())]
        trainer = lookup_trainer(matrix)
    else:
        records = _corpus(run, args.corpus, args.schema)
        overrides = {k: v for k, v in (("learning_rate", args.lr), ("epochs", args.epochs), ("l2", args.l2)) if v is not None}
        trainer = baseline_trainer(pair_configs(args.seed, **overrides))
    if args.k < 2 or args.k > len(records):
        raise UsageError(f"-k must be between 2 and the number of comments ({len(records)}), got {args.k}")
    names = args.config if (args.config or args.config_file) else ["A", "B", *preset_configs()]
    configs = _configs(run, names, args.config_file, args.threshold)
    strata = None
    if args.stratify:
        strata = {r.id: r.labels[LABELS.index(args.stratify)] for r in records}
    folds = kfold_split([r.id for r in records], args.k, args.seed, strata)
    results = cross_validate_configs(records, trainer, configs, folds)

    run.table("comparison", ["model", *FIELDS], _metric_rows((n, r.report) for n, r in results.items()), percent=("accuracy",))
    per_label = []
    for name, res in results.items():
        per_label += [[name, *row] for row in _metric_rows(res.per_label.items())]
    run.table("per_label", ["model", "label", *FIELDS], per_label, percent=("accuracy",))
    report = {
        "k": args.k,
        "seed": args.seed,
        "threshold": args.threshold,
        "stratify": args.stratify,
        "configs": {
            name: {
                "weights": configs[name].to_dict()["weights"],
                "label_averaged": res.report.as_dict(),
                "per_label": {l: m.as_dict() for l, m in res.per_label.items()},
                "folds": [
                    {"fold": f.fold, "label_averaged": f.averaged.as_dict(), "per_label": {l: m.as_dict() for l, m in f.per_label.items()}}
                    for f in res.folds
                ],
            }
            for name, res in results.items()
        },
    }
    run.write("report.json", json.dumps(report, indent=2) + "\n")
    run.finish()


def _resources(run, args):
    conf = {}
    if args.resources:
        for lineno, line in enumerate(run.read(args.resources).decode("utf-8").splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ParseError("expected key=value", str(args.resources), lineno)
            conf[key.strip()] = value.strip()
    paths = {}
    for key, default in (
        ("wordnet", data_path("wordnet")),
        ("positive", data_path("positive-words.txt")),
        ("negative", data_path("negative-words.txt")),
        ("subjective", data_path("subjclues.tff")),
    ):
        paths[key] = Path(getattr(args, key) or conf.get(key) or default)
    for key in ("positive", "negative", "subjective"):
        run.read(paths[key])
    for f in sorted(paths["wordnet"].glob("*.*")):
        run.read(f)
    taxonomy = load_wordnet(paths["wordnet"])
    lexicons = Lexicons.load(paths["positive"], paths["negative"], paths["subjective"])
    return taxonomy, lexicons


def cmd_features(args):
    run = Run("features", args)
    records = _corpus(run, args.corpus, args.schema, labelled=False)
    taxonomy, lexicons = _resources(run, args)
    polarity = {}
    if args.polarity:
        reader = csv.reader(io.StringIO(run.read(args.polarity).decode("utf-8")))
        for lineno, row in enumerate(reader, 1):
            if lineno == 1 and row[:1] == ["id"]:
                continue
            try:
                polarity[row[0]] = float(row[1])
            except (IndexError, ValueError):
                raise ParseError("expected id,probability", str(args.polarity), lineno) from None
    features = {r.id: extract_features(r.text, taxonomy, lexicons, polarity.get(r.id)) for r in records}
    run.write("features.csv", format_features(features))
    run.finish()


def cmd_correlate(args):
    run = Run("correlate", args)
    records = _corpus(run, args.corpus, args.schema)
    headers = ["variable", "rho", "n", "n_dropped"]
    rows = [[c.variable, c.rho, c.n, c.n_dropped] for c in correlate_labels(records)]
    run.table("label_correlation", headers, rows, decimals=4)
    if args.features:
        features = parse_features(run.read(args.features), source=str(args.features))
        rows = [[c.variable, c.rho, c.n, c.n_dropped] for c in correlate_features(records, features)]
        run.table("feature_correlation", headers, rows, decimals=4)
    run.finish()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="disclosure-ensemble", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: out)")
        p.add_argument("--format", choices=sorted(_EXT), default="csv", help="table format (default: csv)")
        p.add_argument("--schema", type=Path, help="JSON mapping of field names to corpus column names")
        return p

    def training_flags(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--lr", type=float, help="SGD learning rate (default 0.1)")
        p.add_argument("--epochs", type=int, help="SGD epochs (default 5)")
        p.add_argument("--l2", type=float, help="L2 penalty (default 1e-6)")

    p = command("stats", cmd_stats, "corpus statistics, label rates and weekday table")
    p.add_argument("corpus", type=Path)

    p = command("train", cmd_train, "train the two baseline models and write predictions")
    p.add_argument("corpus", type=Path)
    p.add_argument("--predict", type=Path, help="corpus to predict (default: the training corpus)")
    training_flags(p)

    p = command("ensemble", cmd_ensemble, "combine base-model predictions into run files")
    p.add_argument("predictions", type=Path)
    p.add_argument("--config", action="append", help="preset name ('Model 1'..'Model 5', 'A', 'B'); repeatable")
    p.add_argument("--weights", action="append", type=Path, help="JSON config file, e.g. gridsearch's best_config.json")
    p.add_argument("--all-runs", action="store_true", help="write runs 1-7 (five presets, then A and B alone)")
    p.add_argument("--gold", type=Path, help="labelled corpus for scoring the runs")
    p.add_argument("--models", help="model ids taking roles A and B, e.g. roberta,albert")
    p.add_argument("--threshold", type=float, default=0.5)

    p = command("evaluate", cmd_evaluate, "k-fold cross-validated comparison of configurations")
    p.add_argument("--corpus", type=Path, help="labelled corpus; trains the baselines per fold")
    p.add_argument("--predictions", type=Path, help="precomputed predictions (requires --gold)")
    p.add_argument("--gold", type=Path)
    p.add_argument("--models", help="model ids taking roles A and B")
    p.add_argument("-k", type=int, default=10)
    p.add_argument("--config", action="append", help="config name; default: A, B and the five presets")
    p.add_argument("--config-file", action="append", type=Path)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--stratify", choices=LABELS, help="stratify folds on this label")
    training_flags(p)

    p = command("gridsearch", cmd_gridsearch, "per-label weight search")
    p.add_argument("predictions", type=Path)
    p.add_argument("--gold", type=Path, required=True)
    p.add_argument("--models", help="model ids taking roles A and B")
    p.add_argument("--step", type=float, default=0.1)
    p.add_argument("--objective", choices=FIELDS, default="acc_and_f1")
    p.add_argument("--threshold", type=float, default=0.5)

    p = command("features", cmd_features, "semantic features per comment")
    p.add_argument("corpus", type=Path)
    p.add_argument("--resources", type=Path, help="key=value file with wordnet/positive/negative/subjective paths")
    p.add_argument("--wordnet", type=Path, help="directory with WordNet index.* and data.* files")
    p.add_argument("--positive", type=Path)
    p.add_argument("--negative", type=Path)
    p.add_argument("--subjective", type=Path)
    p.add_argument("--polarity", type=Path, help="CSV id,probability overriding the lexicon polarity score")

    p = command("correlate", cmd_correlate, "Pearson correlation of score with labels and features")
    p.add_argument("corpus", type=Path)
    p.add_argument("--features", type=Path, help="features.csv written by the features command")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"{parser.prog}: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DataError as exc:
        print(f"{parser.prog}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
