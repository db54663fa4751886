"""Tweet cleaning: emoji/emoticon replacement, tag and punctuation removal,
optional stop-word removal, and mean pooling of token vectors."""
from __future__ import annotations

import html
import re
import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Mapping, Sequence

import numpy as np

# Extra symbols treated as punctuation on top of Unicode P* categories.
EXTRA_PUNCT = frozenset("$^~+=<>|`")
# Presentation selectors and joiners left behind by partial emoji sequences.
_EMOJI_RESIDUE = dict.fromkeys(map(ord, "\ufe0e\ufe0f\u200d"), None)
_MAX_PASSES = 8


@dataclass(frozen=True)
class CleanOptions:
    general: bool = True
    stopwords: bool = False

    def __post_init__(self):
        if self.stopwords and not self.general:
            raise ValueError("stop-word removal requires general cleaning")

    @classmethod
    def from_level(cls, level: str) -> "CleanOptions":
        """``raw``, ``standard`` or ``stopword``."""
        try:
            return {"raw": cls(False, False), "standard": cls(True, False),
                    "stopword": cls(True, True)}[level]
        except KeyError:
            raise ValueError(f"unknown preprocessing level {level!r}") from None


class EmojiTable:
    """Unicode emoji and ASCII emoticon descriptions, matched longest first."""

    def __init__(self, unicode_map: Mapping[str, str], emoticon_map: Mapping[str, str]):
        for key, value in list(unicode_map.items()) + list(emoticon_map.items()):
            if not key:
                raise ValueError("empty emoji key")
            if not re.fullmatch(r"[a-z]+( [a-z]+)*", value):
                raise ValueError(f"description for {key!r} must be lowercase words: {value!r}")
        self.unicode_map = dict(unicode_map)
        self.emoticon_map = dict(emoticon_map)
        self._lookup = {**self.emoticon_map, **self.unicode_map}
        alts = []
        for key in sorted(self._lookup, key=len, reverse=True):
            pat = re.escape(key)
            # Alphanumeric edges must sit on a word boundary so ":o" does not fire inside ":ok".
            if key in self.emoticon_map:
                if key[0].isalnum():
                    pat = r"(?<![^\W_])" + pat
                if key[-1].isalnum():
                    pat = pat + r"(?![^\W_])"
            alts.append(pat)
        self._pattern = re.compile("|".join(alts)) if alts else None

    def replace(self, text: str) -> str:
        if self._pattern is None:
            return text
        text = self._pattern.sub(lambda m: f" {self._lookup[m.group(0)]} ", text)
        return text.translate(_EMOJI_RESIDUE)


def _read_data(name: str) -> str:
    return resources.files("frnn_emotion").joinpath("data").joinpath(name).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def default_table() -> EmojiTable:
    unicode_map = {}
    for line in _read_data("emoji.tsv").splitlines():
        if not line or line.startswith("#"):
            continue
        points, desc = line.split("\t")
        unicode_map["".join(chr(int(p, 16)) for p in points.split())] = desc
    emoticon_map = {}
    for line in _read_data("emoticons.tsv").splitlines():
        if line:
            emo, desc = line.split("\t")
            emoticon_map[emo] = desc
    return EmojiTable(unicode_map, emoticon_map)


@lru_cache(maxsize=None)
def default_stopwords() -> frozenset[str]:
    return frozenset(w for w in _read_data("stopwords.txt").split())


def _is_punct(ch: str) -> bool:
    return ch in EXTRA_PUNCT or unicodedata.category(ch)[0] == "P"


def _general_pass(text: str, table: EmojiTable) -> str:
    text = table.replace(text)
    text = " ".join(tok for tok in text.split() if not tok.startswith("@"))
    text = text.replace("#", "").replace("&", " and ")
    text = "".join(ch for ch in text
                   if unicodedata.category(ch)[0] != "N" and not _is_punct(ch))
    return " ".join(text.split())


def clean_tweet(text: str, opts: CleanOptions = CleanOptions(), table: EmojiTable | None = None,
                stoplist: frozenset[str] | None = None) -> str:
    if not opts.general:
        return text
    if table is None:
        table = default_table()
    # HTML entities come from the tweet export (``&amp;``), not from the author.
    text = html.unescape(text)
    # Deleting characters can splice a new emoji sequence together; repeat until stable.
    for _ in range(_MAX_PASSES):
        cleaned = _general_pass(text, table)
        if cleaned == text:
            break
        text = cleaned
    if opts.stopwords:
        text = remove_stopwords(text, default_stopwords() if stoplist is None else stoplist)
    return text


def remove_stopwords(text: str, stoplist) -> str:
    return " ".join(tok for tok in text.split() if tok.lower() not in stoplist)


def pool_mean(word_vectors: Sequence) -> np.ndarray:
    """Component-wise mean of token vectors."""
    if len(word_vectors) == 0:
        raise ValueError("no known tokens")
    mat = np.asarray(word_vectors, dtype=np.float64)
    if mat.ndim != 2:
        raise ValueError("token vectors must share one dimension")
    return mat.mean(axis=0)
