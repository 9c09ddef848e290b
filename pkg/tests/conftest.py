import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

from subadic.words import Substitution

sys.path.insert(0, str(Path(__file__).parent))

EXAMPLES_DIR = Path(__file__).resolve().parent.parent / "examples"

S = Substitution.from_dict

EX = {
    "ex1": S({"a": "aab", "b": "abb"}),
    "ex2": S({"a": "acb", "b": "aba", "c": "aaa"}),
    "ex3": S({"a": "acb", "b": "aba", "c": "aca"}),
    "ex7": S({"a": "abc", "b": "aacc", "c": "abcc"}),
    "ex8": S({"a": "bbad", "b": "ab", "c": "ad", "d": "dac"}),
    "ex10": S({"a": "aac", "b": "bcc", "c": "abc"}),
    "ex11": S({"a": "aac", "b": "bcc", "c": "adbc", "d": "adbd"}),
    "ex11_star": S({"a": "caa", "b": "c", "c": "cadb", "d": "cadbdb"}),
    "fig1": S({"a": "abb", "b": "ab"}),
    "chacon": S({"0": "0010", "1": "1"}),
    "variant": S({"0": "00100110", "1": "1"}),
    "morse": S({"0": "01", "1": "10"}),
    "ex15": S({"a": "aabaa", "b": "abcab", "c": "aabac"}),
}


@pytest.fixture
def ex():
    return EX


@pytest.fixture
def examples_dir():
    return EXAMPLES_DIR


@st.composite
def substitutions(draw, min_letters=1, max_letters=5, max_len=6):
    k = draw(st.integers(min_letters, max_letters))
    images = tuple(tuple(draw(st.lists(st.integers(0, k - 1), min_size=1, max_size=max_len)))
                   for _ in range(k))
    return Substitution(tuple("abcde"[:k]), images)
