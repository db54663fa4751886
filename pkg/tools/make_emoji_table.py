"""Regenerate ``src/frnn_emotion/data/emoji.tsv`` from the ``emoji`` package.

Development-time tool only; the library reads the bundled TSV and never
imports ``emoji``.

    pip install emoji
    python tools/make_emoji_table.py > src/frnn_emotion/data/emoji.tsv
"""
import re
import sys

import emoji

SELECTORS = {0xFE0E, 0xFE0F}


def describe(name):
    words = re.sub(r"[^a-z]+", " ", name.strip(":").lower())
    return " ".join(words.split())


def main():
    rows = {}
    for char, data in emoji.EMOJI_DATA.items():
        desc = describe(data["en"])
        if not desc:
            continue
        points = tuple(ord(c) for c in char)
        rows.setdefault(points, desc)
        bare = tuple(p for p in points if p not in SELECTORS)
        if bare and bare != points:
            rows.setdefault(bare, desc)
    out = sys.stdout
    out.write(f"# generated from emoji {emoji.__version__}\n")
    for points in sorted(rows):
        out.write(" ".join(f"{p:X}" for p in points) + "\t" + rows[points] + "\n")


if __name__ == "__main__":
    main()
