"""Mixed categorical-continuous search spaces and candidate points.

A search space is a list of categorical variables (finite level sets) plus a
list of continuous variables (box bounds). Candidate points store categorical
level indices and raw continuous coordinates; kernels and the optimizer work
on the normalized view where every continuous coordinate lives in [0, 1].
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np


class SpaceError(ValueError):
    """Raised when a space or point definition violates its invariants."""


@dataclass(frozen=True)
class ContinuousVar:
    name: str
    lower: float
    upper: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise SpaceError(f"continuous variable {self.name!r}: bounds must be finite")
        if not self.lower < self.upper:
            raise SpaceError(f"continuous variable {self.name!r}: lower must be < upper")


@dataclass(frozen=True)
class CategoricalVar:
    name: str
    levels: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "levels", tuple(str(v) for v in self.levels))
        if len(self.levels) < 2:
            raise SpaceError(f"categorical variable {self.name!r}: needs at least 2 levels")
        if len(set(self.levels)) != len(self.levels):
            raise SpaceError(f"categorical variable {self.name!r}: level labels must be unique")


@dataclass(frozen=True)
class SearchSpace:
    categoricals: tuple[CategoricalVar, ...] = ()
    continuous: tuple[ContinuousVar, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "categoricals", tuple(self.categoricals))
        object.__setattr__(self, "continuous", tuple(self.continuous))
        if self.n_cat + self.n_con < 1:
            raise SpaceError("space must contain at least one variable")
        names = [v.name for v in self.categoricals] + [v.name for v in self.continuous]
        if len(set(names)) != len(names):
            raise SpaceError("variable names must be unique across the space")

    @property
    def n_cat(self) -> int:
        return len(self.categoricals)

    @property
    def n_con(self) -> int:
        return len(self.continuous)

    @property
    def lower(self) -> np.ndarray:
        return np.array([v.lower for v in self.continuous], dtype=float)

    @property
    def upper(self) -> np.ndarray:
        return np.array([v.upper for v in self.continuous], dtype=float)

    @property
    def level_counts(self) -> tuple[int, ...]:
        return tuple(len(v.levels) for v in self.categoricals)

    def sample(self, rng: np.random.Generator) -> "MixedPoint":
        """Draw one uniform point: each level uniform, each coordinate uniform in its box."""
        cat = tuple(int(rng.integers(0, len(v.levels))) for v in self.categoricals)
        con = tuple(float(rng.uniform(v.lower, v.upper)) for v in self.continuous)
        return MixedPoint(cat=cat, con=con)

    def to_json(self) -> dict[str, Any]:
        return {
            "categoricals": [{"name": v.name, "levels": list(v.levels)} for v in self.categoricals],
            "continuous": [{"name": v.name, "lower": v.lower, "upper": v.upper} for v in self.continuous],
        }

    @staticmethod
    def from_json(doc: dict[str, Any]) -> "SearchSpace":
        if not isinstance(doc, dict):
            raise SpaceError("space document must be a JSON object")
        cats = doc.get("categoricals", [])
        cons = doc.get("continuous", [])
        if not isinstance(cats, list) or not isinstance(cons, list):
            raise SpaceError("'categoricals' and 'continuous' must be lists")
        categoricals = []
        for entry in cats:
            try:
                categoricals.append(CategoricalVar(name=str(entry["name"]), levels=tuple(entry["levels"])))
            except (KeyError, TypeError) as exc:
                raise SpaceError(f"malformed categorical variable entry: {entry!r}") from exc
        continuous = []
        for entry in cons:
            try:
                continuous.append(
                    ContinuousVar(name=str(entry["name"]), lower=float(entry["lower"]), upper=float(entry["upper"]))
                )
            except (KeyError, TypeError, ValueError) as exc:
                if isinstance(exc, SpaceError):
                    raise
                raise SpaceError(f"malformed continuous variable entry: {entry!r}") from exc
        return SearchSpace(categoricals=tuple(categoricals), continuous=tuple(continuous))

    def dumps(self) -> str:
        return json.dumps(self.to_json())


@dataclass(frozen=True)
class MixedPoint:
    """One candidate: categorical level indices plus raw continuous coordinates."""

    cat: tuple[int, ...] = ()
    con: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "cat", tuple(int(i) for i in self.cat))
        object.__setattr__(self, "con", tuple(float(x) for x in self.con))

    def to_json(self) -> dict[str, Any]:
        return {"cat": list(self.cat), "con": list(self.con)}

    @staticmethod
    def from_json(doc: dict[str, Any]) -> "MixedPoint":
        if not isinstance(doc, dict) or "cat" not in doc or "con" not in doc:
            raise SpaceError("point document must be an object with 'cat' and 'con'")
        try:
            return MixedPoint(cat=tuple(int(i) for i in doc["cat"]), con=tuple(float(x) for x in doc["con"]))
        except (TypeError, ValueError) as exc:
            raise SpaceError(f"malformed point: {doc!r}") from exc


@dataclass(frozen=True)
class NormalizedPoint:
    """A MixedPoint with its continuous part mapped affinely onto [0, 1]^d."""

    cat: tuple[int, ...] = ()
    con01: tuple[float, ...] = ()


def validate_point(space: SearchSpace, p: MixedPoint) -> str | None:
    """Check a point against the space; return None if valid, else a message naming the first offending field."""
    if len(p.cat) != space.n_cat:
        return f"cat has length {len(p.cat)}, expected {space.n_cat}"
    if len(p.con) != space.n_con:
        return f"con has length {len(p.con)}, expected {space.n_con}"
    for i, (idx, var) in enumerate(zip(p.cat, space.categoricals)):
        if not 0 <= idx < len(var.levels):
            return f"cat[{i}] out of range for {var.name!r} (got {idx}, have {len(var.levels)} levels)"
    for j, (x, var) in enumerate(zip(p.con, space.continuous)):
        if not math.isfinite(x):
            return f"con[{j}] not finite for {var.name!r}"
        if x < var.lower:
            return f"con[{j}] below lower bound of {var.name!r} ({x} < {var.lower})"
        if x > var.upper:
            return f"con[{j}] above upper bound of {var.name!r} ({x} > {var.upper})"
    return None


def normalize(space: SearchSpace, p: MixedPoint) -> NormalizedPoint:
    con01 = tuple((x - v.lower) / (v.upper - v.lower) for x, v in zip(p.con, space.continuous))
    return NormalizedPoint(cat=p.cat, con01=con01)


def denormalize(space: SearchSpace, q: NormalizedPoint) -> MixedPoint:
    con = tuple(v.lower + u * (v.upper - v.lower) for u, v in zip(q.con01, space.continuous))
    return MixedPoint(cat=q.cat, con=con)


def encode_categorical_for_benchmark(
    space: SearchSpace, p: MixedPoint, lo: float, hi: float
) -> list[float]:
    """Map each level index onto an evenly spaced grid over [lo, hi].

    Level j of a variable with L levels maps to lo + j*(hi - lo)/(L - 1), so
    the endpoints of the interval are always occupied and distinct levels get
    distinct reals. Synthetic benchmarks consume these as their first U
    coordinates.
    """
    out = []
    for idx, var in zip(p.cat, space.categoricals):
        n_levels = len(var.levels)
        out.append(lo + idx * (hi - lo) / (n_levels - 1))
    return out
