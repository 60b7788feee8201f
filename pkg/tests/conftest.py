import itertools

import pytest

from onedim.config import RunConfig
from onedim.graphs import SimplicialGraph


@pytest.fixture(scope="session")
def cfg():
    return RunConfig()


def brute_force_p4(g: SimplicialGraph) -> bool:
    """Independent oracle: scan every 4-subset and every ordering for an induced path."""
    for quad in itertools.combinations(g.vertices, 4):
        for perm in itertools.permutations(quad):
            if perm[0] > perm[3]:
                continue
            want = {frozenset(perm[i:i + 2]) for i in range(3)}
            have = {frozenset(p) for p in itertools.combinations(quad, 2)} & g.edges
            if have == want:
                return True
    return False


def graph_from_mask(n: int, mask: int) -> SimplicialGraph:
    vs = [str(i) for i in range(n)]
    pairs = list(itertools.combinations(vs, 2))
    edges = frozenset(frozenset(p) for k, p in enumerate(pairs) if mask >> k & 1)
    return SimplicialGraph(tuple(vs), edges)
