import functools
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from skewalg.cyclic import make_algebra  # noqa: E402
from skewalg.gen import Generator  # noqa: E402
from skewalg.tower import make_tower  # noqa: E402

# instance classes: (p, f_k, d, s, N, M)
CLASSES = {
    "comm": (5, 1, 1, 1, 8, 8),
    "split_s2": (5, 1, 1, 2, 8, 8),
    "d3": (3, 1, 3, 1, 8, 18),
    "d3_s2": (3, 1, 3, 2, 6, 18),
}


@functools.lru_cache(maxsize=None)
def algebra(p, f_k, d, s, N):
    return make_algebra(make_tower(p, f_k, d, s, N))


def class_algebra(name):
    p, f_k, d, s, N, M = CLASSES[name]
    return algebra(p, f_k, d, s, N), M


@pytest.fixture(params=sorted(CLASSES))
def inst(request):
    return class_algebra(request.param)


@pytest.fixture
def gen():
    return Generator(20261016)
