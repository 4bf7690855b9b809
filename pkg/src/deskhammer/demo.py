"""Bundled demo corpus: three articles of desk-scale set and graph theory,
in a fixed (consistent) and a buggy variant whose unguarded assumption
makes the graph article contradictory.
"""

from __future__ import annotations

from importlib import resources

from .corpus import CorpusSnapshot, load_corpus_texts

VARIANTS = ("fixed", "buggy")


def demo_article_texts(variant: str = "fixed") -> dict[str, str]:
    if variant not in VARIANTS:
        raise ValueError(f"unknown demo variant {variant!r}")
    subdir = "demo" if variant == "fixed" else "demo_buggy"
    package = resources.files(__package__) / "data" / subdir
    out: dict[str, str] = {}
    for entry in sorted(package.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".art"):
            out[entry.name[: -len(".art")]] = entry.read_text(encoding="utf-8")
    return out


def load_demo_corpus(variant: str = "fixed") -> CorpusSnapshot:
    return load_corpus_texts(demo_article_texts(variant))
