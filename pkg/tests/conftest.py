from importlib import resources
from pathlib import Path

import pytest

from regtype import parse_grammar, read_program

CORPUS = Path(str(resources.files("regtype") / "corpus"))


def g(text: str):
    return parse_grammar(text)


@pytest.fixture
def corpus_program():
    def load(name: str):
        return read_program(CORPUS / name).program

    return load


@pytest.fixture
def t_ll():
    return g("T -> [] | .(T1,T); T1 -> [] | .(num,T1)")
