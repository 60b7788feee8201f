"""Verdict tables for mapping class groups, braid groups and related families.

Each verdict is a lookup: the outcome plus the statement it rests on.  Outside
the ranges covered by a known statement the outcome is ``Unknown-per-paper``
and the tool does not extrapolate.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError
from .graphs import SimplicialGraph, path_graph

POSSIBLE = "EmbedsVirtuallyPossible"
OBSTRUCTED = "Obstructed"
UNKNOWN = "Unknown-per-paper"

CITE_MOD = ("mapping class groups: no finite index subgroup acts faithfully by C^{1+bv} "
            "diffeomorphisms of a compact one-manifold exactly when c(S) >= 2")
CITE_LOW = "complexity <= 1: some finite index subgroup is F x Z (F free), and such groups do act"
CITE_BRAID = "braid groups: the C^{1+bv} obstruction holds for finite index subgroups exactly when n >= 4"
CITE_BRAID_LOW = "braid groups on at most 3 strands: a finite index subgroup is F x Z, so actions exist"
CITE_AUT = "Aut(F_n) and Out(F_n) for n >= 3 contain the obstruction group in every finite index subgroup"
CITE_TORELLI = "Torelli group and the third Johnson subgroup, genus at least 3"
CITE_JOHNSON = "higher Johnson subgroups (k > 3), genus at least 5"
CITE_NONE = "no claim is made for these parameters"


@dataclass(frozen=True)
class SurfaceSignature:
    g: int
    n: int = 0
    b: int = 0

    def __post_init__(self):
        for name in ("g", "n", "b"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 0:
                raise DomainError(f"surface {name} must be a nonnegative integer")
            object.__setattr__(self, name, int(v))

    def to_json(self) -> dict:
        return {"g": self.g, "n": self.n, "b": self.b}


@dataclass(frozen=True)
class Verdict:
    outcome: str
    citation: str

    def __post_init__(self):
        if not self.citation:
            raise ValueError("a verdict needs a citation")

    @property
    def obstructed(self) -> bool:
        return self.outcome == OBSTRUCTED

    def to_json(self) -> dict:
        return {"verdict": self.outcome, "cite": self.citation}


def complexity(s: SurfaceSignature) -> int:
    """``3g - 3 + n + b``; negative for spheres with few punctures."""
    return 3 * s.g - 3 + s.n + s.b


def mod_verdict(s: SurfaceSignature) -> Verdict:
    if complexity(s) <= 1:
        return Verdict(POSSIBLE, CITE_LOW)
    return Verdict(OBSTRUCTED, CITE_MOD)


def braid_verdict(n: int) -> Verdict:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError("braid groups need n >= 1 strands")
    return Verdict(POSSIBLE, CITE_BRAID_LOW) if n <= 3 else Verdict(OBSTRUCTED, CITE_BRAID)


FAMILIES = ("autfn", "outfn", "torelli", "johnson")


def group_catalog_verdict(family: str, n: int | None = None, genus: int | None = None,
                          k: int | None = None) -> Verdict:
    """Catalog lookup.

    ``AutFn``/``OutFn`` take the rank ``n``; ``Torelli`` takes ``genus``;
    ``Johnson`` takes the filtration index ``k`` and ``genus``
    (``k = 1`` is the whole mapping class group, ``k = 2`` the Torelli group).
    """
    fam = str(family).lower().replace("_", "").replace("-", "").replace("(", "").replace(")", "")
    if fam in ("autfn", "outfn", "aut", "out"):
        if n is None or int(n) != n or n < 1:
            raise DomainError(f"{family} needs a rank n >= 1")
        return Verdict(OBSTRUCTED, CITE_AUT) if n >= 3 else Verdict(UNKNOWN, CITE_NONE)
    if fam == "torelli":
        k = 2
        fam = "johnson"
    if fam == "johnson":
        if genus is None or int(genus) != genus or genus < 0:
            raise DomainError(f"{family} needs a genus >= 0")
        if k is None or int(k) != k or k < 1:
            raise DomainError("Johnson subgroups need an index k >= 1")
        if k == 1:
            # the first term is the whole mapping class group; use the surface table
            return Verdict(UNKNOWN, CITE_NONE)
        if k <= 3:
            return Verdict(OBSTRUCTED, CITE_TORELLI) if genus >= 3 else Verdict(UNKNOWN, CITE_NONE)
        return Verdict(OBSTRUCTED, CITE_JOHNSON) if genus >= 5 else Verdict(UNKNOWN, CITE_NONE)
    raise DomainError(f"unknown group family {family!r}; expected one of {FAMILIES}")


def chain_graph(case: str) -> SimplicialGraph:
    """Intersection graphs of curve chains: ``FigureA`` a plain 4-chain, ``FigureB`` with labels ``b, d, a, c``."""
    key = str(case).lower().replace("figure", "").strip()
    if key == "a":
        return path_graph(["gamma1", "gamma2", "gamma3", "gamma4"])
    if key == "b":
        return path_graph(["b", "d", "a", "c"])
    raise DomainError(f"unknown chain graph {case!r}; expected FigureA or FigureB")
