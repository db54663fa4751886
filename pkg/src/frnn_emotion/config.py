"""Experiment configuration files.

A config is an INI file; one file fully determines an experiment::

    [data]
    anger.train = data/EI-oc-En-anger-train.txt
    anger.dev = data/EI-oc-En-anger-dev.txt
    anger.test = data/EI-oc-En-anger-test.txt

    [model roberta]
    vectors = vectors/roberta-{emotion}-{prep}.vec
    prep = standard
    k = 19          ; or "auto" for sqrt(N)/2
    k.joy = 9
    lower = add
    upper = add

    [ensemble]
    members = roberta, deepmoji
    voting = rescaled_wa
    alpha = 0.042
    alpha_grid = 0.002:0.100:0.002
    subset_search = yes

    [eval]
    seed = 0
    folds = 5

    [sweep]
    schemes = strict, add, exp, mean
    k = 5:23:2
    preps = raw, standard, stopword

Any model key may be overridden per emotion as ``key.<emotion>``. Relative
paths are resolved against the config file's directory. ``{emotion}`` and
``{prep}`` in vector paths are substituted at load time.
"""
from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path

from .dataset import EMOTIONS
from .ensemble import DEFAULT_ALPHA_GRID, RescaleInput, Voting
from .frnn import FrnnConfig
from .owa import OwaScheme, default_k

PREP_LEVELS = ("raw", "standard", "stopword")
SPLITS = ("train", "dev", "test")


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


@dataclass(frozen=True)
class ModelSpec:
    name: str
    options: dict
    base: Path

    def get(self, key: str, emotion: str | None = None, default=None):
        if emotion is not None and f"{key}.{emotion}" in self.options:
            return self.options[f"{key}.{emotion}"]
        return self.options.get(key, default)

    def prep(self, emotion: str) -> str:
        prep = self.get("prep", emotion, "standard")
        if prep not in PREP_LEVELS:
            raise ConfigError(f"model {self.name}: unknown prep {prep!r}")
        return prep

    def frnn(self, emotion: str, n_train: int | None = None) -> FrnnConfig:
        """``k = auto`` (or no k) means sqrt(N)/2 of the training set size."""
        k = self.get("k", emotion, "auto")
        try:
            if k == "auto":
                k = default_k(n_train) if n_train else 1
            return FrnnConfig(int(k), self.get("lower", emotion, "add"),
                              self.get("upper", emotion, "add"))
        except ValueError as exc:
            raise ConfigError(f"model {self.name}: {exc}") from None

    def vector_path(self, emotion: str, prep: str | None = None, key: str = "vectors") -> Path:
        template = self.get(key, emotion) or self.get("vectors", emotion)
        if not template:
            raise ConfigError(f"model {self.name}: no vectors path")
        prep = prep or self.prep(emotion)
        return resolve(self.base, template.format(emotion=emotion, prep=prep))


@dataclass(frozen=True)
class EnsembleSpec:
    members: tuple = ()
    voting: Voting = Voting.MEAN
    alpha: float | None = None
    alpha_grid: tuple = DEFAULT_ALPHA_GRID
    subset_search: bool = True
    rescale_input: RescaleInput = RescaleInput.RAW
    weights: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SweepSpec:
    schemes: tuple = ("strict", "add", "exp", "mean")
    ks: tuple = tuple(range(5, 24, 2))
    preps: tuple = PREP_LEVELS


@dataclass(frozen=True)
class ExperimentConfig:
    data: dict
    models: dict
    ensemble: EnsembleSpec
    sweep: SweepSpec
    seed: int = 0
    folds: int = 5
    digest: str = ""
    path: Path | None = None

    @property
    def emotions(self) -> tuple:
        return tuple(e for e in EMOTIONS if e in self.data)

    def split_path(self, emotion: str, split: str) -> Path | None:
        return self.data.get(emotion, {}).get(split)

    def model(self, name: str) -> ModelSpec:
        try:
            return self.models[name]
        except KeyError:
            raise ConfigError(f"no [model {name}] section") from None


def resolve(base: Path, value: str) -> Path:
    p = Path(value).expanduser()
    return p if p.is_absolute() else base / p


def parse_list(value: str) -> list[str]:
    return [v.strip() for v in value.replace("\n", ",").split(",") if v.strip()]


def parse_range(value: str, cast=float) -> tuple:
    """``start:stop:step`` (inclusive) or a comma list."""
    if ":" in value:
        try:
            start, stop, step = (Decimal(v.strip()) for v in value.split(":"))
        except ValueError:
            raise ConfigError(f"bad range {value!r}") from None
        if step <= 0 or stop < start:
            raise ConfigError(f"bad range {value!r}")
        out, x = [], start
        while x <= stop:
            out.append(cast(x))
            x += step
        return tuple(out)
    try:
        return tuple(cast(v) for v in parse_list(value))
    except ValueError:
        raise ConfigError(f"bad list {value!r}") from None


def _bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "yes", "true", "on"):
        return True
    if v in ("0", "no", "false", "off"):
        return False
    raise ConfigError(f"bad boolean {value!r}")


def _digest(parser: configparser.ConfigParser) -> str:
    canon = []
    for section in sorted(parser.sections()):
        canon.append(f"[{section}]")
        for key, value in sorted(parser.items(section, raw=True)):
            canon.append(f"{key}={' '.join(value.split())}")
    return hashlib.sha256("\n".join(canon).encode("utf-8")).hexdigest()[:12]


def load_config(path, check_files: bool = True) -> ExperimentConfig:
    path = Path(path)
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    base = path.resolve().parent
    known = {"data", "ensemble", "eval", "sweep"}
    for section in parser.sections():
        if section not in known and not section.startswith("model "):
            raise ConfigError(f"unknown section [{section}]")

    data: dict = {}
    if parser.has_section("data"):
        for key, value in parser.items("data"):
            emotion, _, split = key.partition(".")
            if emotion not in EMOTIONS or split not in SPLITS:
                raise ConfigError(f"[data] key {key!r} must be <emotion>.<train|dev|test>")
            data.setdefault(emotion, {})[split] = resolve(base, value)
    for emotion, splits in data.items():
        if "train" not in splits:
            raise ConfigError(f"[data] {emotion}.train missing")

    models = {}
    for section in parser.sections():
        if section.startswith("model "):
            name = section[len("model "):].strip()
            if not name:
                raise ConfigError("model section without a name")
            models[name] = ModelSpec(name, dict(parser.items(section)), base)

    ens = parser["ensemble"] if parser.has_section("ensemble") else {}
    try:
        members = tuple(parse_list(ens.get("members", ""))) or tuple(models)
        voting = Voting(ens.get("voting", "mean"))
        rescale_input = RescaleInput(ens.get("rescale_input", "raw"))
    except ValueError as exc:
        raise ConfigError(f"[ensemble] {exc}") from None
    for m in members:
        if m not in models:
            raise ConfigError(f"[ensemble] member {m!r} has no [model {m}] section")
    alpha = float(ens["alpha"]) if "alpha" in ens else None
    grid = parse_range(ens["alpha_grid"]) if "alpha_grid" in ens else DEFAULT_ALPHA_GRID
    if any(not 0 < a < 1 for a in grid) or (alpha is not None and not 0 < alpha < 1):
        raise ConfigError("[ensemble] alpha values must lie in (0, 1)")
    weights = {}
    for item in parse_list(ens.get("weights", "")):
        name, _, w = item.partition(":")
        try:
            weights[name.strip()] = float(w)
        except ValueError:
            raise ConfigError(f"[ensemble] bad weight {item!r}") from None
    ensemble = EnsembleSpec(members, voting, alpha, grid,
                            _bool(ens.get("subset_search", "yes")), rescale_input, weights)

    ev = parser["eval"] if parser.has_section("eval") else {}
    try:
        seed = int(ev.get("seed", "0"))
        folds = int(ev.get("folds", "5"))
    except ValueError as exc:
        raise ConfigError(f"[eval] {exc}") from None
    if folds != 5:
        raise ConfigError("[eval] only 5-fold cross-validation is supported")

    sw = parser["sweep"] if parser.has_section("sweep") else {}
    sweep = SweepSpec(
        tuple(parse_list(sw["schemes"])) if "schemes" in sw else SweepSpec.schemes,
        parse_range(sw["k"], int) if "k" in sw else SweepSpec.ks,
        tuple(parse_list(sw["preps"])) if "preps" in sw else SweepSpec.preps,
    )
    for s in sweep.schemes:
        if s not in {o.value for o in OwaScheme}:
            raise ConfigError(f"[sweep] unknown scheme {s!r}")
    for p in sweep.preps:
        if p not in PREP_LEVELS:
            raise ConfigError(f"[sweep] unknown prep {p!r}")
    if any(k < 1 for k in sweep.ks):
        raise ConfigError("[sweep] k values must be >= 1")

    cfg = ExperimentConfig(data, models, ensemble, sweep, seed, folds, _digest(parser), path)
    for m in models.values():
        for e in cfg.emotions:
            m.frnn(e)
            m.prep(e)
    if check_files:
        for emotion in cfg.emotions:
            for split, p in data[emotion].items():
                if not p.exists():
                    raise ConfigError(f"[data] {emotion}.{split}: no such file {p}")
            for m in models.values():
                vp = m.vector_path(emotion)
                if not vp.exists():
                    raise ConfigError(f"[model {m.name}] vectors for {emotion}: no such file {vp}")
    return cfg
