import unicodedata

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frnn_emotion.preprocess import (CleanOptions, EmojiTable, clean_tweet, default_stopwords,
                                     default_table, pool_mean, remove_stopwords)

STANDARD = CleanOptions(general=True)
STOP = CleanOptions(general=True, stopwords=True)


def test_examples():
    assert clean_tweet("@user I love #sunny days!!! :)", STANDARD) == "I love sunny days happy face"
    assert clean_tweet("Tom & Jerry\n4ever", STANDARD) == "Tom and Jerry ever"
    assert clean_tweet("I am so happy", STOP) == "happy"


def test_raw_is_identity():
    s = "  @x #y 12 :) \n"
    assert clean_tweet(s, CleanOptions(general=False)) == s


def test_options():
    with pytest.raises(ValueError):
        CleanOptions(general=False, stopwords=True)
    assert CleanOptions.from_level("stopword") == STOP
    with pytest.raises(ValueError):
        CleanOptions.from_level("heavy")


def test_unicode_emoji_replaced():
    desc = default_table().unicode_map["\U0001F62D"]
    assert clean_tweet("so tired \U0001F62D\U0001F62D", STANDARD) == f"so tired {desc} {desc}"


def test_variation_selector_does_not_survive():
    out = clean_tweet("love ❤️ it", STANDARD)
    assert out.isascii() and "love" in out and out.endswith("it")


def test_emoticon_needs_boundary():
    table = EmojiTable({}, {":o": "surprised", "xD": "laughing"})
    assert clean_tweet("ok :o", STANDARD, table) == "ok surprised"
    assert clean_tweet("boxDrive", STANDARD, table) == "boxDrive"


def test_html_entities():
    assert clean_tweet("fish &amp; chips", STANDARD) == "fish and chips"


def test_remove_stopwords():
    stop = default_stopwords()
    assert {"i", "am", "so"} <= stop
    assert remove_stopwords("", stop) == ""
    assert remove_stopwords("sunny weather", stop) == "sunny weather"
    assert remove_stopwords("I Am happy", stop) == "happy"


def test_table_values_are_words():
    t = default_table()
    assert t.emoticon_map[":)"] == "happy face"
    assert len(t.unicode_map) > 1000
    for v in list(t.unicode_map.values()) + list(t.emoticon_map.values()):
        assert v.replace(" ", "").isalpha() and v == v.lower()


def test_pool_mean():
    np.testing.assert_array_equal(pool_mean([(1, 0), (0, 1)]), [0.5, 0.5])
    np.testing.assert_array_equal(pool_mean([(2, 2, 2)]), [2, 2, 2])
    np.testing.assert_array_equal(pool_mean([(1, 1), (3, 3), (5, 5)]), [3, 3])
    with pytest.raises(ValueError, match="no known tokens"):
        pool_mean([])


tweets = st.text(
    alphabet=st.one_of(st.sampled_from(list(" #@&:;()!?.,'-_\n\t0123456789DPpxX<3")),
                       st.characters(codec="utf-8", exclude_categories=("Cs",))),
    max_size=60)


@settings(max_examples=300, deadline=None)
@given(tweets)
def test_idempotent(text):
    once = clean_tweet(text, STANDARD)
    assert clean_tweet(once, STANDARD) == once
    assert clean_tweet(clean_tweet(text, STOP), STOP) == clean_tweet(text, STOP)


@settings(max_examples=300, deadline=None)
@given(tweets)
def test_output_alphabet(text):
    out = clean_tweet(text, STANDARD)
    assert out == out.strip() and "  " not in out and "\n" not in out
    for ch in out:
        cat = unicodedata.category(ch)
        assert cat[0] != "N" and cat[0] != "P"
        assert ch not in "#&"
    assert not any(tok.startswith("@") for tok in out.split())
