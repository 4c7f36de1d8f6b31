"""
Shared pytest fixtures: the worked schemas under fixtures/, loaded through the parser
"""
from pathlib import Path

import pytest

from fd_parser import load_decomposition, load_schema

FIXTURES = Path(__file__).parent / "fixtures"


def schema_from(name):
    return load_schema(FIXTURES / f"{name}.fd").schema


def decomposition_from(name, schema):
    return load_decomposition(FIXTURES / f"{name}.dec", schema)


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def single_key():
    return schema_from("single_key")


@pytest.fixture
def key_chain():
    return schema_from("key_chain")


@pytest.fixture
def no_transitivity():
    return schema_from("no_transitivity")


@pytest.fixture
def partition():
    return schema_from("partition")


@pytest.fixture
def shared_dependent():
    return schema_from("shared_dependent")


@pytest.fixture
def minimal_overlap():
    return schema_from("minimal_overlap")


@pytest.fixture
def students():
    return schema_from("students")
