"""Sasaki-type lift of a neutral metric and its basis triple to the tangent
bundle, plus the closed forms its Levi-Civita connection must satisfy.

A bundle point is written xi = (x, u) with u the fiber vector.  Horizontal and
vertical lifts of a base vector X at xi are

    X^h = (X, -M X),   X^v = (0, X),   M^k_i = Gamma^k_{ji}(x) u^j,

so the frame matrix L = [[I, 0], [-M, I]] has inverse [[I, 0], [M, I]].  The
lifted metric makes both lifts isometric copies of the base and keeps them
orthogonal; the lifted triple acts blockwise through the same frame:

    G = L^{-T} diag(g, g) L^{-1},      Jt_a = L diag(J_a, J_a) L^{-1}.

Everything downstream of these two formulas — the connection cases, the
derivative of the lifted triple, the brackets — is checked against finite
differences of G itself rather than assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import LocalBasisTriple, check_triple_algebra
from .connection import (
    MetricField,
    christoffel,
    covariant_derivative_11,
    curvature_operator,
    lie_bracket,
    riemann,
)
from .errors import PreconditionFailedError, ShapeError, ValidationError
from .fields import (
    FdConfig,
    ManifoldSpec,
    Point,
    TensorField,
    eval_field,
    fd_partial,
    sample_points,
)
from .structures import check_hermitian, fit_kahler_oneforms
from .submersion import SubmersionMap

LIFT_PRECONDITION_TOL = 1e-8
FLAT_BASE_TOL = 1e-3


def tangent_bundle_chart(base: ManifoldSpec, u_box=(-1.0, 1.0)) -> ManifoldSpec:
    """The 2n-dim chart (x^1..x^n, u^1..u^n) over a base chart."""
    n = base.dim
    ub = np.asarray(u_box, dtype=float)
    if ub.shape == (2,):
        ub = np.tile(ub, (n, 1))
    if ub.shape != (n, 2):
        raise ValidationError(f"u_box must be a pair or an ({n}, 2) array")
    fiber_names = tuple(f"u{i + 1}" for i in range(n))
    if set(fiber_names) & set(base.coords):
        raise ValidationError("base coordinate names collide with fiber names u1..")
    return ManifoldSpec(base.coords + fiber_names, np.vstack([base.domain, ub]))


def _split_xi(base: ManifoldSpec, xi: Point) -> tuple[Point, np.ndarray]:
    n = base.dim
    if xi.chart.dim != 2 * n:
        raise ValidationError(
            f"bundle point has dim {xi.chart.dim}, expected {2 * n} over this base"
        )
    return Point(base, xi.coords[:n]), np.array(xi.coords[n:])


def connection_shift(g: MetricField, xi: Point, cfg: FdConfig = FdConfig()) -> np.ndarray:
    """M^k_i = Gamma^k_{ji}(x) u^j — the u-part of horizontal lifts is -M X."""
    x, u = _split_xi(g.chart, xi)
    gam = christoffel(g, x, cfg).gamma
    return np.einsum("kji,j->ki", gam, u)


def vertical_lift(X, xi: Point) -> np.ndarray:
    n = xi.chart.dim // 2
    X = np.asarray(X, dtype=float)
    if X.shape != (n,):
        raise ShapeError(f"base vector has shape {X.shape}, expected ({n},)")
    return np.concatenate([np.zeros(n), X])


def horizontal_lift(X, g: MetricField, xi: Point, cfg: FdConfig = FdConfig()) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    n = g.chart.dim
    if X.shape != (n,):
        raise ShapeError(f"base vector has shape {X.shape}, expected ({n},)")
    M = connection_shift(g, xi, cfg)
    return np.concatenate([X, -M @ X])


@dataclass(frozen=True)
class LiftFrame:
    """Horizontal and vertical lifts of the base coordinate frame, as columns."""

    point: Point
    horizontal: np.ndarray  # (2n, n)
    vertical: np.ndarray    # (2n, n)


def lift_frame(g: MetricField, xi: Point, cfg: FdConfig = FdConfig()) -> LiftFrame:
    n = g.chart.dim
    M = connection_shift(g, xi, cfg)
    return LiftFrame(
        point=xi,
        horizontal=np.vstack([np.eye(n), -M]),
        vertical=np.vstack([np.zeros((n, n)), np.eye(n)]),
    )


@dataclass(frozen=True)
class SasakiBundle:
    """The lifted geometry bundled with what it was built from."""

    spec: ManifoldSpec
    metric: MetricField
    triple: LocalBasisTriple
    projection: SubmersionMap
    base_metric: MetricField
    base_triple: LocalBasisTriple
    cfg: FdConfig = FdConfig()

    @property
    def base_dim(self) -> int:
        return self.base_metric.chart.dim

    def point(self, x, u) -> Point:
        return Point(self.spec, np.concatenate([np.asarray(x, float), np.asarray(u, float)]))

    def base_point(self, xi: Point) -> Point:
        return _split_xi(self.base_metric.chart, xi)[0]

    def fiber_vector(self, xi: Point) -> np.ndarray:
        return _split_xi(self.base_metric.chart, xi)[1]


def build_tangent_bundle(
    g: MetricField,
    T: LocalBasisTriple,
    u_box=(-1.0, 1.0),
    cfg: FdConfig = FdConfig(),
    validate: bool = True,
) -> SasakiBundle:
    """Assemble the lifted metric, triple and projection over (g, T).

    The construction only makes sense over a pair whose triple satisfies the
    tau algebra and is g-skew; with validate=True this is spot-checked and a
    PreconditionFailedError raised on violation.
    """
    if T.chart != g.chart:
        raise ValidationError("metric and triple live on different charts")
    base = g.chart
    n = base.dim
    if validate:
        for p in sample_points(base, 3, seed=20):
            rep = check_triple_algebra(T, p)
            herm = check_hermitian(g, T, p)
            if rep.max_residual >= LIFT_PRECONDITION_TOL or herm >= LIFT_PRECONDITION_TOL:
                raise PreconditionFailedError(
                    f"base pair fails at {p}: algebra {rep.max_residual:.3e}, "
                    f"hermitian {herm:.3e}"
                )
    bundle = tangent_bundle_chart(base, u_box)

    def frames_at(xi: Point) -> tuple[np.ndarray, np.ndarray, Point]:
        x = Point(base, xi.coords[:n])
        u = xi.coords[n:]
        gam = christoffel(g, x, cfg).gamma
        M = np.einsum("kji,j->ki", gam, u)
        eye, zero = np.eye(n), np.zeros((n, n))
        L = np.block([[eye, zero], [-M, eye]])
        Linv = np.block([[eye, zero], [M, eye]])
        return L, Linv, x

    def metric_components(xi: Point) -> np.ndarray:
        _, Linv, x = frames_at(xi)
        gx = g.matrix(x)
        zero = np.zeros((n, n))
        return Linv.T @ np.block([[gx, zero], [zero, gx]]) @ Linv

    hint = None
    if g.signature_hint is not None:
        hint = (2 * g.signature_hint[0], 2 * g.signature_hint[1])
    G = MetricField(
        TensorField(bundle, 0, 2, metric_components, label="lifted metric"),
        signature_hint=hint,
    )

    def lifted_member(a: int) -> TensorField:
        def comps(xi: Point, a=a) -> np.ndarray:
            L, Linv, x = frames_at(xi)
            Jx = eval_field(T.fields[a], x)
            zero = np.zeros((n, n))
            return L @ np.block([[Jx, zero], [zero, Jx]]) @ Linv

        return TensorField(bundle, 1, 1, comps, label=f"lifted J{a + 1}")

    Jt = LocalBasisTriple(lifted_member(0), lifted_member(1), lifted_member(2))
    projection = SubmersionMap(
        source=bundle,
        target=base,
        components=lambda c: np.array(c[:n]),
        label="bundle projection",
    )
    return SasakiBundle(
        spec=bundle,
        metric=G,
        triple=Jt,
        projection=projection,
        base_metric=g,
        base_triple=T,
        cfg=cfg,
    )


def lifted_field(bundle: SasakiBundle, X, kind: str) -> TensorField:
    """The canonical bundle extension of a base vector (or (1,0) field).

    kind "h": xi |-> (X(x))^h at xi;  kind "v": xi |-> (X(x))^v.  Constant
    arrays are treated as constant-component base fields.
    """
    n = bundle.base_dim
    base = bundle.base_metric.chart
    if isinstance(X, TensorField):
        if (X.r, X.s) != (1, 0) or X.chart != base:
            raise ValidationError("expected a (1,0) field on the base chart")
        value = lambda x: eval_field(X, x)
    else:
        Xc = np.asarray(X, dtype=float)
        if Xc.shape != (n,):
            raise ShapeError(f"base vector has shape {Xc.shape}, expected ({n},)")
        value = lambda x: Xc
    if kind == "v":
        comps = lambda xi: np.concatenate(
            [np.zeros(n), value(Point(base, xi.coords[:n]))]
        )
    elif kind == "h":
        g, cfg = bundle.base_metric, bundle.cfg

        def comps(xi: Point) -> np.ndarray:
            x = Point(base, xi.coords[:n])
            M = connection_shift(g, xi, cfg)
            Xx = value(x)
            return np.concatenate([Xx, -M @ Xx])

    else:
        raise ValidationError("kind must be 'h' or 'v'")
    return TensorField(bundle.spec, 1, 0, comps, label=f"{kind}-lift")


def _base_data(
    g: MetricField, x: Point, cfg: FdConfig
) -> tuple[np.ndarray, np.ndarray]:
    return christoffel(g, x, cfg).gamma, riemann(g, x, cfg).riem


def _value_and_derivative(
    g: MetricField, X: np.ndarray, Y, x: Point, cfg: FdConfig
) -> tuple[np.ndarray, np.ndarray]:
    """(Y(x), (nabla_X Y)(x)) for Y a constant vector or a (1,0) base field."""
    gam = christoffel(g, x, cfg).gamma
    if isinstance(Y, TensorField):
        Yx = eval_field(Y, x)
        n = g.chart.dim
        dY = np.stack([fd_partial(Y, x, m, cfg) for m in range(n)])
        cov = np.einsum("m,mk->k", X, dY) + np.einsum("kml,m,l->k", gam, X, Yx)
        return Yx, cov
    Yx = np.asarray(Y, dtype=float)
    return Yx, np.einsum("kml,m,l->k", gam, X, Yx)


def oracle_tilde_nabla(
    g: MetricField,
    kind_x: str,
    X,
    kind_y: str,
    Y,
    xi: Point,
    cfg: FdConfig = FdConfig(),
) -> np.ndarray:
    """Closed form of the lifted Levi-Civita connection on canonical lifts.

        nabla~_{X^v} Y^v = 0
        nabla~_{X^h} Y^h = (nabla_X Y)^h - (1/2) (R(X, Y) u)^v
        nabla~_{X^h} Y^v = (nabla_X Y)^v + (1/2) (R(u, Y) X)^h
        nabla~_{X^v} Y^h =                 (1/2) (R(u, X) Y)^h

    X is a base vector (only its value at x enters); Y may be a base vector,
    treated as a constant-component field, or a (1,0) base field.
    """
    x, u = _split_xi(g.chart, xi)
    n = g.chart.dim
    X = np.asarray(X, dtype=float)
    M = connection_shift(g, xi, cfg)
    hl = lambda V: np.concatenate([V, -M @ V])
    vl = lambda V: np.concatenate([np.zeros(n), V])
    if kind_x == "v" and kind_y == "v":
        return np.zeros(2 * n)
    R = riemann(g, x, cfg).riem
    Yx, covXY = _value_and_derivative(g, X, Y, x, cfg)
    if kind_x == "h" and kind_y == "h":
        return hl(covXY) + vl(-0.5 * curvature_operator(R, X, Yx, u))
    if kind_x == "h" and kind_y == "v":
        return vl(covXY) + hl(0.5 * curvature_operator(R, u, Yx, X))
    if kind_x == "v" and kind_y == "h":
        return hl(0.5 * curvature_operator(R, u, X, Yx))
    raise ValidationError("kinds must be 'h' or 'v'")


def oracle_tilde_nabla_J(
    g: MetricField,
    T: LocalBasisTriple,
    a: int,
    kind_x: str,
    X,
    kind_y: str,
    Y,
    xi: Point,
    cfg: FdConfig = FdConfig(),
) -> np.ndarray:
    """Closed form of (nabla~_{X^kx} Jt_a)(Y^ky) at xi (a in {0, 1, 2}).

        (v, v): 0
        (v, h): (1/2) ( R(u, X) J_a Y - J_a R(u, X) Y )^h
        (h, h): ((nabla_X J_a) Y)^h
                - (1/2) ( R(X, J_a Y) u - J_a R(X, Y) u )^v
        (h, v): ((nabla_X J_a) Y)^v
                + (1/2) ( R(u, J_a Y) X - J_a R(u, Y) X )^h

    Tensorial in both slots, so X and Y are plain base vectors.
    """
    if a not in (0, 1, 2):
        raise ValidationError("a must be 0, 1 or 2")
    x, u = _split_xi(g.chart, xi)
    n = g.chart.dim
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    M = connection_shift(g, xi, cfg)
    hl = lambda V: np.concatenate([V, -M @ V])
    vl = lambda V: np.concatenate([np.zeros(n), V])
    if kind_x == "v" and kind_y == "v":
        return np.zeros(2 * n)
    Ja = eval_field(T.fields[a], x)
    R = riemann(g, x, cfg).riem
    Rop = lambda A, B, C: curvature_operator(R, A, B, C)
    if kind_x == "v" and kind_y == "h":
        return hl(0.5 * (Rop(u, X, Ja @ Y) - Ja @ Rop(u, X, Y)))
    DJa = covariant_derivative_11(g, T.fields[a], x, cfg)  # [i, k, j]
    nXJY = np.einsum("ikj,i,j->k", DJa, X, Y)
    if kind_x == "h" and kind_y == "h":
        return vl(-0.5 * (Rop(X, Ja @ Y, u) - Ja @ Rop(X, Y, u))) + hl(nXJY)
    if kind_x == "h" and kind_y == "v":
        return vl(nXJY) + hl(0.5 * (Rop(u, Ja @ Y, X) - Ja @ Rop(u, Y, X)))
    raise ValidationError("kinds must be 'h' or 'v'")


def check_connection_oracle(
    bundle: SasakiBundle, xi: Point, directions: Sequence[np.ndarray] | None = None
) -> float:
    """Max residual between finite differences of the lifted metric's own
    connection and the closed form, over lifts of the given base directions
    (default: the coordinate frame) in all four kind combinations."""
    g, cfg = bundle.base_metric, bundle.cfg
    n = bundle.base_dim
    dirs = (
        [np.eye(n)[i] for i in range(n)]
        if directions is None
        else [np.asarray(d, dtype=float) for d in directions]
    )
    gamG = christoffel(bundle.metric, xi, cfg).gamma
    M = connection_shift(g, xi, cfg)
    worst = 0.0
    for ky in ("h", "v"):
        for Y in dirs:
            W = lifted_field(bundle, Y, ky)
            Wxi = eval_field(W, xi)
            dW = np.stack([fd_partial(W, xi, A, cfg) for A in range(2 * n)])
            for kx in ("h", "v"):
                for X in dirs:
                    U = (
                        np.concatenate([X, -M @ X])
                        if kx == "h"
                        else np.concatenate([np.zeros(n), X])
                    )
                    fd = np.einsum("a,ak->k", U, dW) + np.einsum(
                        "kab,a,b->k", gamG, U, Wxi
                    )
                    closed = oracle_tilde_nabla(g, kx, X, ky, Y, xi, cfg)
                    worst = max(worst, float(np.abs(fd - closed).max()))
    return worst


def check_nabla_j_oracle(bundle: SasakiBundle, xi: Point) -> float:
    """Max residual between finite differences of (nabla~ Jt_a) and the closed
    form, over the lifted coordinate frame and all three members."""
    g, cfg = bundle.base_metric, bundle.cfg
    n = bundle.base_dim
    fr = lift_frame(g, xi, cfg)
    lifts = {"h": fr.horizontal, "v": fr.vertical}
    worst = 0.0
    for a in range(3):
        D = covariant_derivative_11(bundle.metric, bundle.triple.fields[a], xi, cfg)
        for kx in ("h", "v"):
            for i in range(n):
                U = lifts[kx][:, i]
                matU = np.einsum("akj,a->kj", D, U)  # (nabla~_U Jt_a) as a matrix
                for ky in ("h", "v"):
                    for j in range(n):
                        W = lifts[ky][:, j]
                        closed = oracle_tilde_nabla_J(
                            g, bundle.base_triple, a, kx, np.eye(n)[i], ky, np.eye(n)[j], xi, cfg
                        )
                        worst = max(worst, float(np.abs(matU @ W - closed).max()))
    return worst


def check_structure_derivative_span(bundle: SasakiBundle, xi: Point) -> float:
    """Over a flat base, (nabla~ Jt_a) must be the span combination built from
    the base 1-forms pulled back through the projection:

        nabla~_{X^h} Jt_1 = -w3(X) Jt_2 + w2(X) Jt_3   (cyclically for 2, 3)
        nabla~_{X^v} Jt_a = 0

    Returns the max deviation; raises PreconditionFailedError when the base
    curvature is not negligible, since the statement is specific to that case.
    """
    g, T, cfg = bundle.base_metric, bundle.base_triple, bundle.cfg
    n = bundle.base_dim
    x = bundle.base_point(xi)
    base_R = float(np.abs(riemann(g, x, cfg).riem).max())
    if base_R >= FLAT_BASE_TOL:
        raise PreconditionFailedError(
            f"base curvature {base_R:.3e} at {x}; the span form needs a flat base"
        )
    fit = fit_kahler_oneforms(g, T, x, cfg)
    if fit.residual >= FLAT_BASE_TOL:
        raise PreconditionFailedError(
            f"base derivative leaves the span (residual {fit.residual:.3e})"
        )
    Jt = bundle.triple.matrices(xi)
    D = [
        covariant_derivative_11(bundle.metric, f, xi, cfg)
        for f in bundle.triple.fields
    ]  # D[a][A, k, j]
    fr = lift_frame(g, xi, cfg)
    worst = 0.0
    for i in range(n):
        w1, w2, w3 = fit.omega[:, i]
        predicted = (
            -w3 * Jt[1] + w2 * Jt[2],
            w1 * Jt[2] + w3 * Jt[0],
            w2 * Jt[0] + w1 * Jt[1],
        )
        for a in range(3):
            got_h = np.einsum("akj,a->kj", D[a], fr.horizontal[:, i])
            got_v = np.einsum("akj,a->kj", D[a], fr.vertical[:, i])
            worst = max(worst, float(np.abs(got_h - predicted[a]).max()))
            worst = max(worst, float(np.abs(got_v).max()))
    return worst


@dataclass(frozen=True)
class BracketReport:
    """Residuals of the lifted-frame bracket identities at one bundle point,
    for constant-component base vectors X, Y:

        [X^v, Y^v] = 0
        [X^h, Y^v] = (nabla_X Y)^v
        [X^h, Y^h] = -(R(X, Y) u)^v

    hh_flipped_residual is evaluated against +(R(X,Y)u)^v: it stays large
    whenever curvature is present, which pins the curvature sign convention.
    """

    vv_residual: float
    hv_residual: float
    hh_residual: float
    hh_flipped_residual: float

    @property
    def max_residual(self) -> float:
        return max(self.vv_residual, self.hv_residual, self.hh_residual)


def check_bracket(bundle: SasakiBundle, X, Y, xi: Point) -> BracketReport:
    g, cfg = bundle.base_metric, bundle.cfg
    n = bundle.base_dim
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    x, u = _split_xi(g.chart, xi)
    Xh = lifted_field(bundle, X, "h")
    Yh = lifted_field(bundle, Y, "h")
    Xv = lifted_field(bundle, X, "v")
    Yv = lifted_field(bundle, Y, "v")
    vl = lambda V: np.concatenate([np.zeros(n), V])
    gam = christoffel(g, x, cfg).gamma
    R = riemann(g, x, cfg).riem
    covXY = np.einsum("kml,m,l->k", gam, X, Y)
    RXYu = curvature_operator(R, X, Y, u)
    vv = float(np.abs(lie_bracket(Xv, Yv, xi, cfg)).max())
    hv = float(np.abs(lie_bracket(Xh, Yv, xi, cfg) - vl(covXY)).max())
    hh_val = lie_bracket(Xh, Yh, xi, cfg)
    hh = float(np.abs(hh_val - vl(-RXYu)).max())
    hh_flipped = float(np.abs(hh_val - vl(+RXYu)).max())
    return BracketReport(
        vv_residual=vv,
        hv_residual=hv,
        hh_residual=hh,
        hh_flipped_residual=hh_flipped,
    )
