import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from lanprove import parse_language

settings.register_profile(
    "deterministic",
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("deterministic")

CORPUS = Path(__file__).parent.parent / "corpus"

VARIANTS = ("faulty", "fixed1", "fixed2", "fixed3", "fixed4")


def corpus_path(name: str) -> Path:
    if name in VARIANTS:
        return CORPUS / f"lambda-div-print-{name}.lan"
    return CORPUS / f"{name}.lan"


@pytest.fixture(scope="session")
def corpus():
    """name -> parsed LanguageDef for every committed corpus file."""
    langs = {name: parse_language(corpus_path(name).read_text())
             for name in VARIANTS}
    langs["stlc"] = parse_language(corpus_path("stlc").read_text())
    return langs


@pytest.fixture(scope="session")
def faulty(corpus):
    return corpus["faulty"]


@pytest.fixture(scope="session")
def fixed1(corpus):
    return corpus["fixed1"]


@pytest.fixture(scope="session")
def fixed2(corpus):
    return corpus["fixed2"]


@pytest.fixture(scope="session")
def fixed3(corpus):
    return corpus["fixed3"]


@pytest.fixture(scope="session")
def fixed4(corpus):
    return corpus["fixed4"]


@pytest.fixture(scope="session")
def stlc(corpus):
    return corpus["stlc"]
