from __future__ import annotations

import pytest

from deskhammer import demo
from deskhammer.corpus import Fact
from deskhammer.tptp import parse_formula


@pytest.fixture(scope="session")
def demo_snapshot():
    return demo.load_demo_corpus("fixed")


@pytest.fixture(scope="session")
def buggy_snapshot():
    return demo.load_demo_corpus("buggy")


def make_fact(label: str, text: str, role: str = "axiom", article: str = "t",
              position: int = 0, justification=None, status: str = "accepted") -> Fact:
    return Fact(article, label, role, parse_formula(text), justification, status, position)


@pytest.fixture
def fact():
    return make_fact
