"""Tolerance ladder and run configuration.

Every numerical decision in the package is made against one of these
tolerances.  Values falling between ``tol_id`` and ``tol_nz`` are never
silently rounded to a yes/no answer; callers receive an explicit
indeterminate flag instead.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path


@dataclass(frozen=True)
class Tolerances:
    tol_id: float = 1e-9      # "acts as the identity"
    tol_nz: float = 1e-3      # "clearly nontrivial"
    tol_root: float = 1e-11   # bisection accuracy for fixed points
    tol_rot: float = 1e-7     # rotation-number convergence
    tol_geom: float = 1e-8    # interval endpoint comparisons
    tol_var: float = 1e-6     # total-variation refinement increment
    tol_eval: float = 1e-12   # inverse evaluation by bisection

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"{f.name} must be positive")
        if self.tol_id >= self.tol_nz:
            raise ValueError("tol_id must be smaller than tol_nz")


@dataclass(frozen=True)
class RunConfig:
    """Knobs shared by the library and the CLI."""

    tol: Tolerances = field(default_factory=Tolerances)
    grid: int = 2 ** 14             # fixed-set / displacement sampling grid
    period_cap: int = 64            # max denominator for rational rotation numbers
    budget: int = 64                # proposition-interval pair budget
    samples: int = 2 ** 14          # sample points for chain detection
    var_min_level: int = 10         # first dyadic level for derivative variation
    var_max_level: int = 20
    seed: int = 0

    def __post_init__(self):
        for name in ("grid", "period_cap", "budget", "samples", "var_min_level", "var_max_level"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.var_min_level > self.var_max_level:
            raise ValueError("var_min_level exceeds var_max_level")

    def with_overrides(self, **kw) -> "RunConfig":
        tol_kw = {k: v for k, v in kw.items() if k in Tolerances.__dataclass_fields__ and v is not None}
        top_kw = {k: v for k, v in kw.items() if k in RunConfig.__dataclass_fields__ and k != "tol" and v is not None}
        tol = replace(self.tol, **tol_kw) if tol_kw else self.tol
        return replace(self, tol=tol, **top_kw)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_file(cls, path, base: "RunConfig | None" = None) -> "RunConfig":
        """Load a JSON config file; keys are flat (``tol_id``, ``grid``, ...)."""
        data = json.loads(Path(path).read_text())
        if "tol" in data and isinstance(data["tol"], dict):
            data = {**data.pop("tol"), **data}
        unknown = set(data) - set(Tolerances.__dataclass_fields__) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return (base or cls()).with_overrides(**data)


DEFAULT = RunConfig()

