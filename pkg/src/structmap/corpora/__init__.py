"""Bundled example corpora."""
from __future__ import annotations

from importlib import resources
from pathlib import Path

CLASSICS = "classics.anl"


def corpus_path(name: str = CLASSICS) -> Path:
    return Path(str(resources.files(__name__).joinpath(name)))


def load_classics():
    from ..dsl import load_corpus

    return load_corpus(corpus_path())
