import sys
from pathlib import Path

import pytest

FIELDS_DIR = Path(__file__).resolve().parent.parent / "fields"

sys.setrecursionlimit(10000)


def load_descriptor(name: str):
    from raylat.fielddata import parse_field_file
    return parse_field_file((FIELDS_DIR / f"{name}.json").read_bytes())


@pytest.fixture(scope="session")
def qi():
    return load_descriptor("qi")


@pytest.fixture(scope="session")
def qsqrt2():
    return load_descriptor("qsqrt2")


@pytest.fixture(scope="session")
def qsqrt_m5():
    return load_descriptor("qsqrt_m5")


@pytest.fixture(scope="session")
def zeta7plus():
    return load_descriptor("zeta7plus")


@pytest.fixture(scope="session")
def qsqrt5():
    return load_descriptor("qsqrt5")


@pytest.fixture(scope="session")
def embeddings_cache():
    from raylat.unitlog import LogEmbedding
    cache = {}

    def get(fd):
        if fd.label not in cache:
            cache[fd.label] = LogEmbedding(fd)
        return cache[fd.label]

    return get


@pytest.fixture(scope="session")
def ray_ctx_cache(embeddings_cache):
    """(fd, modulus_spec) -> (q, factorization, RayContext)."""
    from raylat import unitlog
    from raylat.cli import parse_modulus
    cache = {}

    def get(fd, spec: str):
        key = (fd.label, spec)
        if key not in cache:
            emb = embeddings_cache(fd)
            q, fac = parse_modulus(fd, spec)
            ctx = unitlog.ray_context(fd, q, fac or None, emb=emb)
            cache[key] = (q, fac, ctx)
        return cache[key]

    return get
