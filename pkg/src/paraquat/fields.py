"""Charts, points, tensor fields and finite differences.

A chart is a single coordinate box on R^n.  Tensor fields are callables
returning component arrays at a point; all derivatives in the package are
second-order central differences with a fixed step, so every numerical
statement downstream is explicit about its stencil.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    EmptyDomainError,
    EvaluationError,
    OutOfDomainError,
    ShapeError,
    StencilOutOfDomainError,
    ValidationError,
)

DEFAULT_STEP = 1e-3
# sample_points keeps this much distance from the box walls so that nested
# central-difference stencils (up to a few steps deep) never leave the domain
INTERIOR_MARGIN = 10 * DEFAULT_STEP


@dataclass(frozen=True, eq=False)
class ManifoldSpec:
    """A coordinate chart: names and a closed domain box, one interval per
    coordinate."""

    coords: tuple[str, ...]
    domain: np.ndarray  # shape (dim, 2), rows [lo, hi]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        dom = np.array(self.domain, dtype=float)
        if len(self.coords) < 1:
            raise ValidationError("chart needs at least one coordinate")
        if len(set(self.coords)) != len(self.coords):
            raise ValidationError(f"coordinate names must be distinct: {self.coords}")
        if dom.shape != (len(self.coords), 2):
            raise ValidationError(
                f"domain must be ({len(self.coords)}, 2), got {dom.shape}"
            )
        if not np.all(dom[:, 0] < dom[:, 1]):
            raise ValidationError("every domain interval needs lo < hi")
        dom.flags.writeable = False
        object.__setattr__(self, "domain", dom)

    def __eq__(self, other):
        return (
            isinstance(other, ManifoldSpec)
            and self.coords == other.coords
            and np.array_equal(self.domain, other.domain)
        )

    def __hash__(self):
        return hash((self.coords, self.domain.tobytes()))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def contains(self, coords: np.ndarray, margin: float = 0.0) -> bool:
        c = np.asarray(coords, dtype=float)
        return bool(
            np.all(c >= self.domain[:, 0] + margin)
            and np.all(c <= self.domain[:, 1] - margin)
        )


@dataclass(frozen=True, eq=False)
class Point:
    """A point of a chart.  Coordinates are copied and frozen."""

    chart: ManifoldSpec
    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=float).reshape(-1)
        if c.shape != (self.chart.dim,):
            raise ValidationError(
                f"point needs {self.chart.dim} coordinates, got {c.shape}"
            )
        c.flags.writeable = False
        object.__setattr__(self, "coords", c)

    def shifted(self, k: int, delta: float) -> "Point":
        c = self.coords.copy()
        c[k] += delta
        return Point(self.chart, c)

    def __repr__(self):  # keeps pytest output readable
        vals = ", ".join(f"{n}={v:.4g}" for n, v in zip(self.chart.coords, self.coords))
        return f"Point({vals})"


@dataclass(frozen=True)
class TensorField:
    """A (r, s) tensor field given by a component callable.

    ``components(p)`` must return an ndarray of shape ``(dim,) * (r + s)``
    (contravariant slots first).  Evaluation is deterministic: same point,
    same array.
    """

    chart: ManifoldSpec
    r: int
    s: int
    components: Callable[[Point], np.ndarray]
    label: str = ""

    def __post_init__(self):
        if self.r < 0 or self.s < 0:
            raise ValidationError("tensor valences must be nonnegative")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.chart.dim,) * (self.r + self.s)


@dataclass(frozen=True)
class FdConfig:
    """Finite-difference parameters.  Only the 2nd-order central scheme is
    implemented; the field exists so reports can state it."""

    step: float = DEFAULT_STEP
    scheme: str = "central-2"

    def __post_init__(self):
        if self.step <= 0:
            raise ValidationError("FD step must be positive")
        if self.scheme != "central-2":
            raise ValidationError(f"unsupported FD scheme: {self.scheme!r}")


def eval_field(field: TensorField, p: Point) -> np.ndarray:
    """Evaluate a tensor field, enforcing domain, shape and finiteness."""
    if p.chart is not field.chart and p.chart != field.chart:
        raise ValidationError("point and field live on different charts")
    if not field.chart.contains(p.coords):
        raise OutOfDomainError(f"{p} outside the chart domain")
    vals = np.asarray(field.components(p), dtype=float)
    if vals.shape != field.shape:
        raise ShapeError(
            f"field {field.label or '<unnamed>'}: expected {field.shape}, got {vals.shape}"
        )
    if not np.all(np.isfinite(vals)):
        raise EvaluationError(
            f"field {field.label or '<unnamed>'} returned non-finite components at {p}"
        )
    return vals


def fd_partial(field: TensorField, p: Point, k: int, cfg: FdConfig = FdConfig()) -> np.ndarray:
    """Central difference of the components along coordinate k.

    Exact for affine component functions; O(h^2) otherwise.
    """
    h = cfg.step
    if not (0 <= k < field.chart.dim):
        raise ValidationError(f"direction {k} out of range for dim {field.chart.dim}")
    plus, minus = p.shifted(k, +h), p.shifted(k, -h)
    if not (field.chart.contains(plus.coords) and field.chart.contains(minus.coords)):
        raise StencilOutOfDomainError(
            f"stencil around {p} in direction {k} leaves the domain"
        )
    return (eval_field(field, plus) - eval_field(field, minus)) / (2.0 * h)


def sample_points(
    spec: ManifoldSpec,
    count: int,
    seed: int,
    margin: float = INTERIOR_MARGIN,
) -> list[Point]:
    """Deterministic interior sample of the domain box.

    Points stay ``margin`` away from every wall so that nested FD stencils
    remain inside.  Same (spec, count, seed) -> identical points.
    """
    if count < 1:
        raise ValidationError("count must be >= 1")
    lo = spec.domain[:, 0] + margin
    hi = spec.domain[:, 1] - margin
    if np.any(lo >= hi):
        raise EmptyDomainError(
            f"domain box has no interior at margin {margin}"
        )
    rng = np.random.default_rng(seed)
    draws = rng.uniform(lo, hi, size=(count, spec.dim))
    return [Point(spec, row) for row in draws]


def constant_field(chart: ManifoldSpec, r: int, s: int, value: np.ndarray, label: str = "") -> TensorField:
    """Field whose components are the same array everywhere."""
    vals = np.asarray(value, dtype=float)
    return TensorField(chart, r, s, lambda p: vals, label=label)
