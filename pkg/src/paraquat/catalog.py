"""Named geometry ingredients and the shipped scenario files.

Scenario JSON refers to metrics, triples and product structures by the names
registered here, or supplies component matrices of expression strings (see
:mod:`paraquat.exprlang`).  Every constructor validates the chart dimension it
is instantiated on.
"""

from __future__ import annotations

import json
from importlib import resources
from typing import Callable, Sequence

import numpy as np

from .algebra import LocalBasisTriple
from .connection import MetricField
from .errors import ParseError, ValidationError
from .exprlang import bind_expr, parse_expr
from .fields import ManifoldSpec, Point, TensorField, constant_field
from .structures import ProductStructureField

ETA4 = np.diag([1.0, 1.0, -1.0, -1.0])
ETA8 = np.block(
    [[ETA4, np.zeros((4, 4))], [np.zeros((4, 4)), ETA4]]
)

# The standard triple on R^{2,2}: J3 rotates the (12) and (34) planes in
# opposite senses, J1 swaps the factors, J2 = J1 J3.  All three are
# eta-skew, J1^2 = J2^2 = I, J3^2 = -I.
STD_J3 = np.array(
    [[0.0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]
)
STD_J1 = np.array(
    [[0.0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]
)
STD_J2 = STD_J1 @ STD_J3


def make_chart(
    dim: int,
    coords: Sequence[str] | None = None,
    domain: Sequence[Sequence[float]] | None = None,
) -> ManifoldSpec:
    """Chart with default names x1..xn and default box [-1, 1]^n."""
    names = tuple(coords) if coords is not None else tuple(f"x{i + 1}" for i in range(dim))
    if len(names) != dim:
        raise ValidationError(f"{len(names)} coordinate names for dim {dim}")
    box = (
        np.asarray(domain, dtype=float)
        if domain is not None
        else np.array([[-1.0, 1.0]] * dim)
    )
    return ManifoldSpec(names, box)


def _require_dim(chart: ManifoldSpec, dim: int, what: str) -> None:
    if chart.dim != dim:
        raise ValidationError(f"{what} needs a {dim}-dim chart, got {chart.dim}")


def _block(J: np.ndarray) -> np.ndarray:
    z = np.zeros((4, 4))
    return np.block([[J, z], [z, J]])


def _rotated(angle: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    c, s = np.cos(angle), np.sin(angle)
    return c * STD_J1 + s * STD_J2, -s * STD_J1 + c * STD_J2, STD_J3


def _metric_neutral4(chart: ManifoldSpec) -> MetricField:
    _require_dim(chart, 4, "neutral4")
    return MetricField(constant_field(chart, 0, 2, ETA4, "neutral4"), signature_hint=(2, 2))


def _metric_euclidean4(chart: ManifoldSpec) -> MetricField:
    _require_dim(chart, 4, "euclidean4")
    return MetricField(constant_field(chart, 0, 2, np.eye(4), "euclidean4"), signature_hint=(4, 0))


def _metric_conformal_neutral4(chart: ManifoldSpec) -> MetricField:
    _require_dim(chart, 4, "conformal-neutral4")
    comp = lambda p: np.exp(2.0 * p.coords[0]) * ETA4
    return MetricField(
        TensorField(chart, 0, 2, comp, "conformal-neutral4"), signature_hint=(2, 2)
    )


def _metric_neutral8(chart: ManifoldSpec) -> MetricField:
    _require_dim(chart, 8, "neutral8")
    return MetricField(constant_field(chart, 0, 2, ETA8, "neutral8"), signature_hint=(4, 4))


METRICS: dict[str, Callable[[ManifoldSpec], MetricField]] = {
    "neutral4": _metric_neutral4,
    "euclidean4": _metric_euclidean4,
    "conformal-neutral4": _metric_conformal_neutral4,
    "neutral8": _metric_neutral8,
}


def _triple_standard4(chart: ManifoldSpec) -> LocalBasisTriple:
    _require_dim(chart, 4, "standard4")
    return LocalBasisTriple(
        constant_field(chart, 1, 1, STD_J1, "J1"),
        constant_field(chart, 1, 1, STD_J2, "J2"),
        constant_field(chart, 1, 1, STD_J3, "J3"),
    )


def _triple_rotated4(chart: ManifoldSpec) -> LocalBasisTriple:
    """standard4 rotated in the span of (J1, J2) by the first coordinate."""
    _require_dim(chart, 4, "rotated4")

    def member(a: int) -> TensorField:
        return TensorField(
            chart, 1, 1, lambda p, a=a: _rotated(p.coords[0])[a], f"J{a + 1}'"
        )

    return LocalBasisTriple(member(0), member(1), member(2))


def _triple_product8(chart: ManifoldSpec) -> LocalBasisTriple:
    _require_dim(chart, 8, "product8")
    return LocalBasisTriple(
        constant_field(chart, 1, 1, _block(STD_J1), "J1+J1"),
        constant_field(chart, 1, 1, _block(STD_J2), "J2+J2"),
        constant_field(chart, 1, 1, _block(STD_J3), "J3+J3"),
    )


def _product_rotated_member(chart: ManifoldSpec, a: int, coord: int) -> TensorField:
    return TensorField(
        chart,
        1,
        1,
        lambda p, a=a: _block(_rotated(p.coords[coord])[a]),
        f"J{a + 1}'+J{a + 1}'",
    )


def _triple_product8_rotated(chart: ManifoldSpec) -> LocalBasisTriple:
    """Both factors rotated by the first base coordinate; descends through the
    first-factor projection onto rotated4."""
    _require_dim(chart, 8, "product8-rotated")
    return LocalBasisTriple(*(_product_rotated_member(chart, a, 0) for a in range(3)))


def _triple_product8_fiber_rotated(chart: ManifoldSpec) -> LocalBasisTriple:
    """Rotation angle taken from the fifth coordinate — a fiber coordinate of
    the first-factor projection, so the pair upstairs stays PQK while nothing
    downstairs matches it."""
    _require_dim(chart, 8, "product8-fiber-rotated")
    return LocalBasisTriple(*(_product_rotated_member(chart, a, 4) for a in range(3)))


TRIPLES: dict[str, Callable[[ManifoldSpec], LocalBasisTriple]] = {
    "standard4": _triple_standard4,
    "rotated4": _triple_rotated4,
    "product8": _triple_product8,
    "product8-rotated": _triple_product8_rotated,
    "product8-fiber-rotated": _triple_product8_fiber_rotated,
}


def _structure_split8(chart: ManifoldSpec) -> ProductStructureField:
    _require_dim(chart, 8, "split8")
    F = np.diag([1.0] * 4 + [-1.0] * 4)
    return ProductStructureField(constant_field(chart, 1, 1, F, "split8"), "split8")


def _structure_split8_rotated(chart: ManifoldSpec) -> ProductStructureField:
    """split8 conjugated by a factor-mixing rotation of angle 0.1 x2: still an
    isometric involution commuting with the product triple, no longer
    parallel or integrable."""
    _require_dim(chart, 8, "split8-rotated")

    def comp(p: Point) -> np.ndarray:
        th = 0.1 * p.coords[1]
        c, s = np.cos(2.0 * th), np.sin(2.0 * th)
        eye = np.eye(4)
        return np.block([[c * eye, s * eye], [s * eye, -c * eye]])

    return ProductStructureField(TensorField(chart, 1, 1, comp, "split8-rotated"), "split8-rotated")


STRUCTURES: dict[str, Callable[[ManifoldSpec], ProductStructureField]] = {
    "split8": _structure_split8,
    "split8-rotated": _structure_split8_rotated,
}


def expression_matrix(
    rows: Sequence[Sequence[str]], chart: ManifoldSpec
) -> Callable[[Point], np.ndarray]:
    """Compile a matrix of expression strings into a components callable.

    Parsing and symbol binding happen here, so malformed entries fail at
    scenario-build time rather than mid-run.
    """
    n = chart.dim
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValidationError(f"expected an {n}x{n} matrix of expressions")
    compiled = [[bind_expr(parse_expr(str(e)), chart.coords) for e in row] for row in rows]

    def comps(p: Point) -> np.ndarray:
        return np.array([[f(p.coords) for f in row] for row in compiled])

    return comps


def expression_metric(rows: Sequence[Sequence[str]], chart: ManifoldSpec) -> MetricField:
    return MetricField(TensorField(chart, 0, 2, expression_matrix(rows, chart), "expression metric"))


def expression_triple(
    matrices: Sequence[Sequence[Sequence[str]]], chart: ManifoldSpec
) -> LocalBasisTriple:
    if len(matrices) != 3:
        raise ValidationError("a triple needs exactly three matrices")
    members = [
        TensorField(chart, 1, 1, expression_matrix(m, chart), f"J{a + 1} (expression)")
        for a, m in enumerate(matrices)
    ]
    return LocalBasisTriple(*members)


def metric_from_config(spec, chart: ManifoldSpec) -> MetricField:
    if isinstance(spec, str):
        if spec not in METRICS:
            raise ParseError(f"unknown metric {spec!r}; catalog has {sorted(METRICS)}")
        return METRICS[spec](chart)
    if isinstance(spec, dict) and "matrix" in spec:
        return expression_metric(spec["matrix"], chart)
    raise ParseError("metric must be a catalog name or {'matrix': [[expr, ...], ...]}")


def triple_from_config(spec, chart: ManifoldSpec) -> LocalBasisTriple:
    if isinstance(spec, str):
        if spec not in TRIPLES:
            raise ParseError(f"unknown triple {spec!r}; catalog has {sorted(TRIPLES)}")
        return TRIPLES[spec](chart)
    if isinstance(spec, dict) and "matrices" in spec:
        return expression_triple(spec["matrices"], chart)
    raise ParseError("triple must be a catalog name or {'matrices': [m1, m2, m3]}")


def structure_from_config(spec, chart: ManifoldSpec) -> ProductStructureField:
    if isinstance(spec, str):
        if spec not in STRUCTURES:
            raise ParseError(f"unknown structure {spec!r}; catalog has {sorted(STRUCTURES)}")
        return STRUCTURES[spec](chart)
    if isinstance(spec, dict) and "matrix" in spec:
        return ProductStructureField(
            TensorField(chart, 1, 1, expression_matrix(spec["matrix"], chart), "expression structure"),
            "expression structure",
        )
    raise ParseError("structure must be a catalog name or {'matrix': [[expr, ...], ...]}")


def scenario_names() -> list[str]:
    """Names of the shipped scenario files, sorted."""
    root = resources.files("paraquat").joinpath("catalog_data")
    return sorted(
        entry.name[: -len(".json")]
        for entry in root.iterdir()
        if entry.name.endswith(".json")
    )


def load_catalog_scenario(name: str) -> dict:
    path = resources.files("paraquat").joinpath("catalog_data", f"{name}.json")
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ParseError(
            f"no catalog scenario named {name!r}; available: {scenario_names()}"
        ) from None
    return json.loads(text)
