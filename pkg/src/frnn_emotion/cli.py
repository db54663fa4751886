"""Command-line entry point.

Exit codes: 0 success, 1 usage or config error, 2 data error.
"""
from __future__ import annotations

import argparse
import itertools
import math
import sys
import warnings
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, ExperimentConfig, load_config
from .dataset import (EMOTIONS, DataError, TextRecord, VectorDataset, class_stats, join,
                      load_task_tsv, load_vectors, read_task_rows)
from .ensemble import EnsembleConfig, Voting, ensemble_predict, round_half_up, score_ensemble
from .ensemble import select_models, tune_alpha
from .evaluation import (ScoreReport, average_emotions, fmt, fold_scores, make_folds,
                         out_of_fold_memberships, safe_pcc)
from .frnn import FrnnConfig, argmax_lowest, fit
from .preprocess import CleanOptions, clean_tweet

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@contextmanager
def _output(path):
    if path is None or str(path) == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


class Session:
    """Loads and caches the files an experiment touches."""

    def __init__(self, cfg: ExperimentConfig, seed: int | None = None, threads: int = 1):
        self.cfg = cfg
        self.seed = cfg.seed if seed is None else seed
        self.threads = max(1, threads)
        self._vectors: dict = {}
        self._records: dict = {}

    def header(self, **extra) -> str:
        fields = {"seed": self.seed, "config": self.cfg.digest, **extra}
        return "# " + " ".join(f"{k}={v}" for k, v in fields.items()) + "\n"

    def emotions(self, emotion: str | None) -> tuple:
        if emotion is None:
            if not self.cfg.emotions:
                raise ConfigError("config has no [data] entries")
            return self.cfg.emotions
        if emotion not in self.cfg.data:
            raise ConfigError(f"no data configured for emotion {emotion!r}")
        return (emotion,)

    def training_records(self, emotion: str) -> list[TextRecord]:
        """Train and dev records merged, train first."""
        if emotion not in self._records:
            records = load_task_tsv(self.cfg.split_path(emotion, "train"))
            dev = self.cfg.split_path(emotion, "dev")
            if dev is not None:
                more = load_task_tsv(dev)
                seen = {r.id for r in records}
                clash = [r.id for r in more if r.id in seen]
                if clash:
                    raise DataError(f"duplicate id {clash[0]} across train and dev")
                records = records + more
            wrong = [r for r in records if r.emotion != emotion]
            if wrong:
                raise DataError(f"record {wrong[0].id} is {wrong[0].emotion}, expected {emotion}")
            self._records[emotion] = records
        return self._records[emotion]

    def vectors(self, path: Path):
        key = str(path)
        if key not in self._vectors:
            if not path.exists():
                raise DataError(f"no such vector file {path}")
            self._vectors[key] = load_vectors(path)
        return self._vectors[key]

    def dataset(self, model: str, emotion: str, records, prep: str | None = None,
                key: str = "vectors") -> VectorDataset:
        dim, vecs = self.vectors(self.cfg.model(model).vector_path(emotion, prep, key))
        return join(records, vecs, dim)

    def folds(self, emotion: str):
        labels = np.array([r.label for r in self.training_records(emotion)])
        return make_folds(labels, self.seed, self.cfg.folds)

    def member_memberships(self, members, emotion: str):
        """Out-of-fold mean memberships of each member on train+dev."""
        records = self.training_records(emotion)
        folds = self.folds(emotion)
        out = {}
        for m in members:
            ds = self.dataset(m, emotion, records)
            cfg = self.cfg.model(m).frnn(emotion, len(ds))
            (lower, upper), = out_of_fold_memberships(ds, [cfg], folds, self.threads)
            out[m] = (lower + upper) / 2.0
        labels = np.array([r.label for r in records], dtype=np.float64)
        return out, labels, folds

    def test_memberships(self, members, emotion: str, test_records):
        """Members fitted on all of train+dev, evaluated on the test records."""
        records = self.training_records(emotion)
        out = {}
        for m in members:
            train = self.dataset(m, emotion, records)
            key = "test_vectors" if self.cfg.model(m).get("test_vectors", emotion) else "vectors"
            test = self.dataset(m, emotion, test_records, key=key)
            model = fit(train, self.cfg.model(m).frnn(emotion, len(train)))
            lower, upper = model.memberships(test.vectors, threads=self.threads)
            out[m] = (lower + upper) / 2.0
        return out

    def ensemble_config(self, emotion, members=None, alpha=None) -> EnsembleConfig:
        spec = self.cfg.ensemble
        members = tuple(members or spec.members)
        voting = spec.voting
        if voting.needs_alpha:
            alpha = alpha if alpha is not None else spec.alpha
        else:
            alpha = None
        weights = {m: w for m, w in spec.weights.items() if m in members}
        return EnsembleConfig(members, voting, alpha, weights, spec.rescale_input)


# -- commands ----------------------------------------------------------------

def cmd_preprocess(args) -> int:
    if args.raw and args.stopwords:
        raise UsageError("--raw and --stopwords are exclusive")
    opts = CleanOptions(general=not args.raw, stopwords=args.stopwords)
    header, rows = read_task_rows(args.input)
    with _output(args.out) as out:
        if header is not None:
            out.write("\t".join(header) + "\n")
        for _, cols in rows:
            cols = list(cols)
            cols[1] = clean_tweet(cols[1], opts)
            out.write("\t".join(cols) + "\n")
    return 0


def cmd_stats(args) -> int:
    rows = []
    if args.inputs:
        records = []
        for p in args.inputs:
            records.extend(load_task_tsv(p))
        by_emotion = {}
        for r in records:
            by_emotion.setdefault(r.emotion, []).append(r)
        groups = [(e, by_emotion[e]) for e in EMOTIONS if e in by_emotion]
        header = ""
    else:
        if not args.config:
            raise UsageError("stats needs --config or input files")
        session = Session(load_config(args.config, check_files=False), args.seed)
        groups = [(e, session.training_records(e)) for e in session.emotions(args.emotion)]
        header = session.header()
    for emotion, records in groups:
        st = class_stats(records)
        rows.append("\t".join([emotion, str(st.total), str(st.smallest_class), f"{st.ir:.4f}"]
                              + [str(st.counts[c]) for c in sorted(st.counts)]))
    with _output(args.out) as out:
        out.write(header)
        out.write("emotion\ttotal\tsmallest\tir\tn0\tn1\tn2\tn3\n")
        out.write("".join(r + "\n" for r in rows))
    return 0


def cmd_sweep(args) -> int:
    session = Session(load_config(args.config), args.seed, args.threads)
    sw = session.cfg.sweep
    rows = []
    for emotion in session.emotions(args.emotion):
        records = session.training_records(emotion)
        labels = np.array([r.label for r in records], dtype=np.float64)
        folds = session.folds(emotion)
        for model in session.cfg.models:
            for prep in sw.preps:
                grid = list(itertools.product(sw.schemes, sw.ks))
                try:
                    ds = session.dataset(model, emotion, records, prep)
                    configs = [FrnnConfig(k, s, s) for s, k in grid]
                    with warnings.catch_warnings():
                        warnings.simplefilter("ignore", RuntimeWarning)
                        oof = out_of_fold_memberships(ds, configs, folds, session.threads)
                        reports = [ScoreReport.from_folds(
                            fold_scores(labels, argmax_lowest(lo + up), folds))
                            for lo, up in oof]
                except DataError as exc:
                    print(f"warning: {model}/{emotion}/{prep}: {exc}", file=sys.stderr)
                    reports = [ScoreReport.from_folds([-math.inf] * folds.n_folds)] * len(grid)
                for (scheme, k), rep in zip(grid, reports):
                    rows.append((rep.mean_pcc, emotion, model, scheme, k, prep, rep.per_fold))
    order = sorted(range(len(rows)), key=lambda i: -rows[i][0])
    with _output(args.out) as out:
        out.write(session.header())
        out.write("emotion\tmodel\tscheme\tk\tprep\t"
                  + "\t".join(f"fold{f}" for f in range(session.cfg.folds)) + "\tmean\n")
        for i in order:
            mean, emotion, model, scheme, k, prep, per_fold = rows[i]
            out.write("\t".join([emotion, model, scheme, str(k), prep]
                                + [fmt(s) for s in per_fold] + [fmt(mean)]) + "\n")
    return 0


def _write_predictions(path, session, records, labels, **header):
    with _output(path) as out:
        out.write(session.header(**header))
        out.write("id\tlabel\n")
        for rec, lab in zip(records, labels):
            out.write(f"{rec.id}\t{int(lab)}\n")


def _resolve_alpha(session, emotion, cfg, mm, labels, folds):
    if cfg.voting.needs_alpha and cfg.alpha is None:
        alpha, _ = tune_alpha(cfg.members, mm, labels, folds, session.cfg.ensemble.alpha_grid,
                              rounded=cfg.voting is Voting.RESCALED_WA_ROUNDED,
                              rescale_input=cfg.rescale_input)
        return session.ensemble_config(emotion, cfg.members, alpha)
    return cfg


def _test_records(session, emotion, path):
    if path is None:
        path = session.cfg.split_path(emotion, "test")
    if path is None:
        raise UsageError(f"no test file for {emotion}: pass --test or set [data] {emotion}.test")
    return load_task_tsv(path, labeled=False)


def _predict_test(session, emotion, cfg, test_records):
    test_mm = session.test_memberships(cfg.members, emotion, test_records)
    return round_half_up(ensemble_predict(cfg, test_mm))


def _test_score(test_records, predictions):
    if any(r.label is None for r in test_records):
        return None
    return safe_pcc([r.label for r in test_records], predictions)


def cmd_ensemble(args) -> int:
    session = Session(load_config(args.config), args.seed, args.threads)
    if args.test and not args.predictions:
        raise UsageError("--test needs --predictions <path>")
    emotions = session.emotions(args.emotion)
    if args.test and len(emotions) != 1:
        raise UsageError("--test needs --emotion")
    lines = []
    for emotion in emotions:
        cfg = session.ensemble_config(emotion)
        mm, labels, folds = session.member_memberships(cfg.members, emotion)
        cfg = _resolve_alpha(session, emotion, cfg, mm, labels, folds)
        rep = score_ensemble(cfg, mm, labels, folds, f"{session.cfg.digest}:{emotion}")
        extra = f"# alpha={cfg.alpha}\n" if cfg.alpha is not None else ""
        lines.append(extra + rep.tsv_row() + "\n")
        if args.test:
            test_records = _test_records(session, emotion, args.test)
            preds = _predict_test(session, emotion, cfg, test_records)
            _write_predictions(args.predictions, session, test_records, preds, emotion=emotion)
            score = _test_score(test_records, preds)
            if score is not None:
                lines.append(f"# test_pcc={fmt(score)}\n")
    with _output(args.out) as out:
        out.write(session.header(voting=session.cfg.ensemble.voting.value))
        out.write("config\t" + "\t".join(f"fold{f}" for f in range(session.cfg.folds)) + "\tmean\n")
        out.write("".join(lines))
    return 0


def cmd_tune(args) -> int:
    session = Session(load_config(args.config), args.seed, args.threads)
    spec = session.cfg.ensemble
    rows, chosen = [], {}
    for emotion in session.emotions(args.emotion):
        members = spec.members
        mm, labels, folds = session.member_memberships(members, emotion)
        alpha, alpha_pcc = tune_alpha(members, mm, labels, folds, spec.alpha_grid,
                                      rescale_input=spec.rescale_input)
        if spec.subset_search:
            subset, rounded_pcc = select_models(members, mm, labels, folds,
                                                Voting.RESCALED_WA_ROUNDED, alpha,
                                                spec.rescale_input, session.threads)
        else:
            subset = tuple(members)
            rounded_pcc = score_ensemble(EnsembleConfig(subset, Voting.RESCALED_WA_ROUNDED, alpha,
                                                        rescale_input=spec.rescale_input),
                                         mm, labels, folds).mean_pcc
        chosen[emotion] = (subset, alpha, rounded_pcc)
        rows.append([emotion, "/".join(subset), f"{alpha:g}", fmt(alpha_pcc), fmt(rounded_pcc)])
    if set(chosen) == set(EMOTIONS):
        avg = average_emotions({e: v[2] for e, v in chosen.items()})
        rows.append(["average", "", "", "", fmt(avg)])
    with _output(args.out) as out:
        out.write(session.header())
        out.write("emotion\tmembers\talpha\tcv_pcc_all_members\tcv_pcc_rounded\n")
        out.write("".join("\t".join(r) + "\n" for r in rows))
    return 0


def cmd_predict(args) -> int:
    session = Session(load_config(args.config), args.seed, args.threads)
    if args.emotion is None and args.test is not None:
        raise UsageError("--test needs --emotion")
    outputs = []
    for emotion in session.emotions(args.emotion):
        cfg = session.ensemble_config(emotion)
        if cfg.voting.needs_alpha and cfg.alpha is None:
            mm, labels, folds = session.member_memberships(cfg.members, emotion)
            cfg = _resolve_alpha(session, emotion, cfg, mm, labels, folds)
        test_records = _test_records(session, emotion, args.test)
        outputs.append((emotion, test_records, _predict_test(session, emotion, cfg, test_records)))
    if len(outputs) == 1:
        emotion, recs, preds = outputs[0]
        _write_predictions(args.out, session, recs, preds, emotion=emotion)
    else:
        if args.out is None:
            raise UsageError("several emotions: --out must name a directory")
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        for emotion, recs, preds in outputs:
            _write_predictions(outdir / f"{emotion}.pred.tsv", session, recs, preds, emotion=emotion)
    scores = {e: _test_score(recs, preds) for e, recs, preds in outputs}
    for e, s in scores.items():
        if s is not None:
            print(f"{e}\ttest_pcc\t{fmt(s)}", file=sys.stderr)
    if set(scores) == set(EMOTIONS) and all(s is not None for s in scores.values()):
        print(f"average\ttest_pcc\t{fmt(average_emotions(scores))}", file=sys.stderr)
    return 0


# -- argument parsing -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config file")
    common.add_argument("--emotion", choices=EMOTIONS)
    common.add_argument("--seed", type=int, help="overrides [eval] seed")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--threads", type=int, default=1)

    parser = _Parser(prog="frnn-emotion", description="Fuzzy-rough nearest-neighbour emotion intensity classifier.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("preprocess", parents=[common], help="clean the tweet column of a task file")
    p.add_argument("input")
    p.add_argument("--raw", action="store_true", help="leave text untouched")
    p.add_argument("--stopwords", action="store_true", help="also remove stop-words")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("stats", parents=[common], help="class balance of train+dev data")
    p.add_argument("inputs", nargs="*", help="task files (instead of --config)")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("sweep", parents=[common], help="single-model grid over scheme, k, prep")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ensemble", parents=[common], help="cross-validate the configured ensemble")
    p.add_argument("--test", help="also predict this test file")
    p.add_argument("--predictions", help="where --test predictions go")
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("tune", parents=[common], help="alpha grid search and member selection")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("predict", parents=[common], help="predict test labels with the ensemble")
    p.add_argument("--test", help="test file (default: [data] <emotion>.test)")
    p.set_defaults(func=cmd_predict)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command not in ("preprocess", "stats") and not args.config:
        parser.error(f"{args.command} needs --config")
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        # reader went away (e.g. piped into head); not an error of ours
        sys.stderr.close()
        return 0
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
