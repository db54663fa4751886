"""Synthetic clustered embeddings for tests, benchmarks and a runnable demo.

Each class is a Gaussian cloud around a random point of the unit sphere,
projected back onto the sphere. Several "views" of one labeled set stand in
for embeddings from different models; a decoy view is drawn from a shuffled
copy of the labels and so carries no information about the true ones.

    python -m frnn_emotion.synthetic demo/     # writes a ready-to-run experiment
"""
from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

from .dataset import EMOTIONS, N_CLASSES, VectorDataset, save_vectors


def balanced_labels(n: int, rng: np.random.Generator, n_classes: int = N_CLASSES) -> np.ndarray:
    return rng.permutation(np.arange(n) % n_classes)


def sphere_clusters(labels, dim: int, spread: float, rng: np.random.Generator,
                    n_classes: int = N_CLASSES) -> np.ndarray:
    centers = rng.normal(size=(n_classes, dim))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    x = centers[labels] + rng.normal(scale=spread, size=(len(labels), dim))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def clustered_dataset(n: int, dim: int, spread: float = 0.3, seed: int = 0,
                      labels=None) -> VectorDataset:
    rng = np.random.default_rng(seed)
    if labels is None:
        labels = balanced_labels(n, rng)
    labels = np.asarray(labels)
    vectors = sphere_clusters(labels, dim, spread, rng)
    return VectorDataset(dim, [f"t{i:05d}" for i in range(len(labels))], vectors, labels)


def ensemble_views(n: int = 400, dim: int = 16, good=("alpha", "beta"), decoy: str | None = "decoy",
                   spreads=(0.45, 0.55), seed: int = 0):
    """Labels plus one dataset per view, all sharing ids and labels."""
    rng = np.random.default_rng(seed)
    labels = balanced_labels(n, rng)
    ids = [f"t{i:05d}" for i in range(n)]
    views = {}
    for name, spread in zip(good, spreads):
        views[name] = VectorDataset(dim, ids, sphere_clusters(labels, dim, spread, rng), labels)
    if decoy:
        shuffled = rng.permutation(labels)
        views[decoy] = VectorDataset(dim, ids, sphere_clusters(shuffled, dim, 0.3, rng), labels)
    return labels, views


def write_demo_experiment(directory, n: int = 240, dim: int = 16, seed: int = 0,
                          emotions=EMOTIONS, spreads=(0.45, 0.55), k="7",
                          alpha_grid="0.01:0.09:0.01") -> Path:
    """Task files, vector files and a config for every emotion; returns the config path.

    ``n`` is the train+dev size per emotion; 40 more instances form the test split.
    """
    directory = Path(directory)
    (directory / "data").mkdir(parents=True, exist_ok=True)
    (directory / "vectors").mkdir(exist_ok=True)
    data_lines = []
    for e_i, emotion in enumerate(emotions):
        labels, views = ensemble_views(n + 40, dim, spreads=spreads, seed=seed + e_i)
        ids = [f"2018-En-{e_i}{i:05d}" for i in range(n + 40)]
        splits = {"train": range(0, n * 3 // 4), "dev": range(n * 3 // 4, n),
                  "test": range(n, n + 40)}
        for split, idx in splits.items():
            path = directory / "data" / f"{emotion}-{split}.txt"
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write("ID\tTweet\tAffect Dimension\tIntensity Class\n")
                for i in idx:
                    fh.write(f"{ids[i]}\tsynthetic tweet {i} @user #tag :)\t{emotion}\t"
                             f"{labels[i]}: intensity {labels[i]}\n")
            data_lines.append(f"{emotion}.{split} = data/{emotion}-{split}.txt")
        for name, ds in views.items():
            vecs = dict(zip(ids, ds.vectors))
            for prep in ("raw", "standard", "stopword"):
                save_vectors(directory / "vectors" / f"{name}-{emotion}-{prep}.vec", dim, vecs)
    models = "\n".join(
        f"[model {name}]\nvectors = vectors/{name}-{{emotion}}-{{prep}}.vec\n"
        f"prep = standard\nk = {k}\nlower = add\nupper = add\n"
        for name in views
    )
    config = (
        "[data]\n" + "\n".join(data_lines) + "\n\n" + models + "\n"
        "[ensemble]\nmembers = " + ", ".join(views) + "\n"
        "voting = rescaled_wa\nalpha = 0.04\nalpha_grid = " + alpha_grid + "\nsubset_search = yes\n\n"
        f"[eval]\nseed = {seed}\nfolds = 5\n\n"
        "[sweep]\nschemes = strict, add, exp, mean\nk = 5:23:2\npreps = raw, standard, stopword\n"
    )
    path = directory / "experiment.ini"
    path.write_text(config, encoding="utf-8")
    return path


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else "demo"
    print(write_demo_experiment(target))
