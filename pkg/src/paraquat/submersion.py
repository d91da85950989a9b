"""Semi-Riemannian submersions: vertical/horizontal splitting, the two
fundamental tensors, basic lifts, and descent of the structure 1-forms.

The splitting is computed pointwise from the finite-difference Jacobian:
vertical = ker(df) from an SVD, horizontal = the g-orthogonal complement of
vertical (a second SVD on V^T g, which works in neutral signature as long as
the fiber metric V^T g V stays nondegenerate).  The O'Neill tensors are
assembled by differentiating the *projector* fields — projectors, unlike the
frames themselves, depend smoothly on the point regardless of how the SVD
orders or signs its vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .algebra import LocalBasisTriple
from .connection import MetricField, christoffel
from .errors import (
    DegenerateFiberMetricError,
    NotAFiberError,
    PreconditionFailedError,
    RankDeficientError,
    ShapeError,
    ValidationError,
)
from .fields import FdConfig, ManifoldSpec, Point, TensorField, fd_partial
from .structures import StructureClass, classify_structure, fit_kahler_oneforms

RANK_FLOOR = 1e-8
FIBER_DET_FLOOR = 1e-9
FIBER_IMAGE_TOL = 1e-10


@dataclass(frozen=True)
class SubmersionMap:
    """A smooth map between charts, given componentwise."""

    source: ManifoldSpec
    target: ManifoldSpec
    components: Callable[[np.ndarray], np.ndarray]  # (n,) -> (n',)
    label: str = ""

    def map_point(self, p: Point) -> Point:
        if p.chart != self.source:
            raise ValidationError(f"point lives on {p.chart.coords}, map expects {self.source.coords}")
        y = np.asarray(self.components(p.coords), dtype=float)
        if y.shape != (self.target.dim,):
            raise ShapeError(f"map returned shape {y.shape}, expected ({self.target.dim},)")
        return Point(self.target, y)


def jacobian(f: SubmersionMap, p: Point, cfg: FdConfig = FdConfig()) -> np.ndarray:
    """df at p as an (n', n) matrix; raises RankDeficientError if not onto."""
    n, m = f.source.dim, f.target.dim
    J = np.empty((m, n))
    for i in range(n):
        hi = np.asarray(f.components(p.shifted(i, cfg.step).coords), dtype=float)
        lo = np.asarray(f.components(p.shifted(i, -cfg.step).coords), dtype=float)
        J[:, i] = (hi - lo) / (2.0 * cfg.step)
    sv = np.linalg.svd(J, compute_uv=False)
    if sv.size < m or sv[-1] <= RANK_FLOOR:
        raise RankDeficientError(f"differential drops rank at {p} (singular values {sv})")
    return J


@dataclass(frozen=True)
class SplitFrame:
    """Pointwise vertical/horizontal data: frames and projectors."""

    point: Point
    vertical: np.ndarray    # (n, n - n'), columns span ker(df)
    horizontal: np.ndarray  # (n, n'), columns span the g-complement
    v: np.ndarray           # (n, n) projector onto vertical along horizontal
    h: np.ndarray           # (n, n) projector onto horizontal along vertical


def _split_matrices(J: np.ndarray, gp: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    n = gp.shape[0]
    m = J.shape[0]
    _, _, vt = np.linalg.svd(J)
    V = vt[m:].T  # (n, n-m), orthonormal basis of ker(df)
    fiber_g = V.T @ gp @ V
    if abs(np.linalg.det(fiber_g)) < FIBER_DET_FLOOR:
        raise DegenerateFiberMetricError(
            f"metric restricted to the fiber is degenerate (det {np.linalg.det(fiber_g):.3e})"
        )
    _, _, wt = np.linalg.svd(V.T @ gp)  # H = ker(V^T g): g-orthogonal to V
    H = wt[n - m:].T  # (n, m)
    B = np.hstack([V, H])
    Binv = np.linalg.inv(B)
    Pv = B @ np.diag([1.0] * (n - m) + [0.0] * m) @ Binv
    Ph = np.eye(n) - Pv
    return V, H, Pv, Ph


def vh_split(f: SubmersionMap, g: MetricField, p: Point, cfg: FdConfig = FdConfig()) -> SplitFrame:
    J = jacobian(f, p, cfg)
    V, H, Pv, Ph = _split_matrices(J, g.matrix(p))
    return SplitFrame(point=p, vertical=V, horizontal=H, v=Pv, h=Ph)


def check_semi_riemannian(
    f: SubmersionMap,
    g: MetricField,
    g_target: MetricField,
    pts: Sequence[Point],
    cfg: FdConfig = FdConfig(),
) -> float:
    """max |g(X,Y) - g'(df X, df Y)| over horizontal frames at the sample."""
    worst = 0.0
    for p in pts:
        J = jacobian(f, p, cfg)
        fr = vh_split(f, g, p, cfg)
        down = J @ fr.horizontal
        up = fr.horizontal.T @ g.matrix(p) @ fr.horizontal
        dn = down.T @ g_target.matrix(f.map_point(p)) @ down
        worst = max(worst, float(np.abs(up - dn).max()))
    return worst


def check_paraholomorphic(
    f: SubmersionMap,
    T: LocalBasisTriple,
    T_target: LocalBasisTriple,
    pts: Sequence[Point],
    cfg: FdConfig = FdConfig(),
) -> float:
    """max_a |df o J_a - J'_a o df| over the sample."""
    worst = 0.0
    for p in pts:
        J = jacobian(f, p, cfg)
        up = T.matrices(p)
        dn = T_target.matrices(f.map_point(p))
        for a in range(3):
            worst = max(worst, float(np.abs(J @ up[a] - dn[a] @ J).max()))
    return worst


@dataclass(frozen=True)
class VhInvarianceReport:
    v_residual: float  # leakage of J_a(vertical) into horizontal
    h_residual: float  # leakage of J_a(horizontal) into vertical


def check_vh_invariance(
    f: SubmersionMap,
    g: MetricField,
    T: LocalBasisTriple,
    T_target: LocalBasisTriple,
    pts: Sequence[Point],
    cfg: FdConfig = FdConfig(),
    tol: float = 1e-6,
) -> VhInvarianceReport:
    """Whether each J_a maps vertical to vertical and horizontal to horizontal.

    Only meaningful for a paraholomorphic map, so that is checked first and a
    PreconditionFailedError raised when it fails at tol.
    """
    para = check_paraholomorphic(f, T, T_target, pts, cfg)
    if para >= tol:
        raise PreconditionFailedError(
            f"map is not paraholomorphic (residual {para:.3e} >= {tol:.1e})"
        )
    rv = 0.0
    rh = 0.0
    for p in pts:
        fr = vh_split(f, g, p, cfg)
        J = T.matrices(p)
        for a in range(3):
            rv = max(rv, float(np.abs(fr.h @ J[a] @ fr.vertical).max()))
            rh = max(rh, float(np.abs(fr.v @ J[a] @ fr.horizontal).max()))
    return VhInvarianceReport(v_residual=rv, h_residual=rh)


@dataclass(frozen=True)
class ONeillTensors:
    """Both fundamental tensors at a point, on the coordinate frame.

    a_full[i, j] = h nabla_{h e_i} (v e_j) + v nabla_{h e_i} (h e_j)
    t_full[i, j] = h nabla_{v e_i} (v e_j) + v nabla_{v e_i} (h e_j)

    a_horizontal is the A-tensor contracted onto the horizontal frame of the
    split, shape (n', n', n); its antisymmetry in the first two slots is the
    classical integrability statement.
    """

    point: Point
    a_full: np.ndarray        # (n, n, n)
    t_full: np.ndarray        # (n, n, n)
    a_horizontal: np.ndarray  # (n', n', n)

    @property
    def max_a_horizontal(self) -> float:
        return float(np.abs(self.a_horizontal).max())

    @property
    def antisymmetry_residual(self) -> float:
        return float(np.abs(self.a_horizontal + self.a_horizontal.transpose(1, 0, 2)).max())


def oneill_tensors(
    f: SubmersionMap, g: MetricField, p: Point, cfg: FdConfig = FdConfig()
) -> ONeillTensors:
    n = f.source.dim
    gam = christoffel(g, p, cfg).gamma
    fr = vh_split(f, g, p, cfg)

    def pv_at(q: Point) -> np.ndarray:
        J = jacobian(f, q, cfg)
        return _split_matrices(J, g.matrix(q))[2]

    pv_field = TensorField(f.source, 1, 1, pv_at, label="vertical projector")
    dPv = np.stack([fd_partial(pv_field, p, m, cfg) for m in range(n)])  # (n, n, n)

    def covd(u: np.ndarray, w_proj_is_v: bool, j: int) -> np.ndarray:
        # nabla_u W at p for W(x) = P(x) e_j with P = Pv or Ph = I - Pv
        sgn = 1.0 if w_proj_is_v else -1.0
        dW = sgn * np.einsum("mkl,m->kl", dPv, u)[:, j]  # d(Ph) = -d(Pv)
        wp = (fr.v if w_proj_is_v else fr.h)[:, j]
        return dW + np.einsum("kml,m,l->k", gam, u, wp)

    a_full = np.empty((n, n, n))
    t_full = np.empty((n, n, n))
    for i in range(n):
        he = fr.h[:, i]
        ve = fr.v[:, i]
        for j in range(n):
            a_full[i, j] = fr.h @ covd(he, True, j) + fr.v @ covd(he, False, j)
            t_full[i, j] = fr.h @ covd(ve, True, j) + fr.v @ covd(ve, False, j)
    a_h = np.einsum("li,mj,lmk->ijk", fr.horizontal, fr.horizontal, a_full)
    return ONeillTensors(point=p, a_full=a_full, t_full=t_full, a_horizontal=a_h)


def basic_lift(
    f: SubmersionMap,
    g: MetricField,
    p: Point,
    target_vector: np.ndarray,
    cfg: FdConfig = FdConfig(),
) -> np.ndarray:
    """The unique horizontal vector at p pushing forward to target_vector."""
    w = np.asarray(target_vector, dtype=float)
    if w.shape != (f.target.dim,):
        raise ShapeError(f"target vector has shape {w.shape}, expected ({f.target.dim},)")
    J = jacobian(f, p, cfg)
    fr = vh_split(f, g, p, cfg)
    JH = J @ fr.horizontal
    return fr.horizontal @ np.linalg.solve(JH, w)


@dataclass(frozen=True)
class DescentReport:
    image: Point
    omega_base: np.ndarray  # (3, n'): mean of w_a(basic lift of e'_alpha)
    constancy_residual: float
    fit_residual_max: float
    points_used: int


def descend_one_forms(
    f: SubmersionMap,
    g: MetricField,
    T: LocalBasisTriple,
    fiber_pts: Sequence[Point],
    cfg: FdConfig = FdConfig(),
    tol: float = 1e-6,
) -> DescentReport:
    """Evaluate the fitted 1-forms on basic lifts along one fiber.

    All sample points must map to the same image (else NotAFiberError), and
    the pair upstairs must classify as PQK or LhPK-basis (else
    PreconditionFailedError).  The report carries the per-direction means and
    the largest spread across the fiber; a small spread is what makes the
    forms well defined downstairs.
    """
    if not fiber_pts:
        raise ValidationError("descend_one_forms needs at least one fiber point")
    images = [f.map_point(p) for p in fiber_pts]
    base = images[0]
    for q in images[1:]:
        if float(np.abs(q.coords - base.coords).max()) > FIBER_IMAGE_TOL:
            raise NotAFiberError(
                f"sample points map to different images: {base.coords} vs {q.coords}"
            )
    verdict = classify_structure(g, T, list(fiber_pts), tol=tol, cfg=cfg)
    if verdict.cls not in (StructureClass.PQK, StructureClass.LHPK_BASIS):
        raise PreconditionFailedError(
            f"pair classifies as {verdict.cls.value} along the fiber, need PQK or LhPK-basis"
        )
    m = f.target.dim
    values = np.empty((len(fiber_pts), 3, m))
    fit_max = 0.0
    for k, p in enumerate(fiber_pts):
        fit = fit_kahler_oneforms(g, T, p, cfg)
        fit_max = max(fit_max, fit.residual)
        for alpha in range(m):
            X = basic_lift(f, g, p, np.eye(m)[alpha], cfg)
            values[k, :, alpha] = fit.omega @ X
    spread = float((values.max(axis=0) - values.min(axis=0)).max()) if len(fiber_pts) > 1 else 0.0
    return DescentReport(
        image=base,
        omega_base=values.mean(axis=0),
        constancy_residual=spread,
        fit_residual_max=fit_max,
        points_used=len(fiber_pts),
    )
