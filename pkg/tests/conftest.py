from __future__ import annotations

import pathlib

import pytest

from reqfrag.parser import parse

REPO = pathlib.Path(__file__).resolve().parent.parent
CORPUS = REPO / "corpus"


@pytest.fixture(scope="session")
def corpus_dir() -> pathlib.Path:
    return CORPUS


@pytest.fixture(scope="session")
def table1_table2_text() -> str:
    return (CORPUS / "table1_table2.fret").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def table1_table2(table1_table2_text):
    return parse(table1_table2_text, filename="table1_table2.fret")


@pytest.fixture(scope="session")
def table2_text() -> str:
    return (CORPUS / "table2.fret").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def table2(table2_text):
    return parse(table2_text, filename="table2.fret")


@pytest.fixture(scope="session")
def fig1_text() -> str:
    return (CORPUS / "fig1.fret").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def fig1(fig1_text):
    return parse(fig1_text, filename="fig1.fret")


@pytest.fixture(scope="session")
def fig1_flat():
    return parse(
        (CORPUS / "fig1_flat.fret").read_text(encoding="utf-8"),
        filename="fig1_flat.fret",
    )
