"""Split-quaternion arithmetic and local (J1, J2, J3) basis triples.

The signs of the whole package live in the constant ``TAU = (-1, -1, 1)``:
J_a^2 = -tau_a I, J_a J_b = tau_c J_c = -J_b J_a for cyclic (a, b, c), and the
abstract algebra on (1, e1, e2, e3) uses e_a^2 = -tau_a with the same cyclic
products.  Mapping e_a to J_a(p) of a valid triple is an algebra isomorphism,
which the test suite checks against matrix multiplication.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyDomainError,
    IllConditionedError,
    SingularTransitionError,
    ValidationError,
)
from .fields import ManifoldSpec, Point, TensorField, eval_field, sample_points

TAU = (-1.0, -1.0, 1.0)
CYCLIC = ((1, 2, 3), (2, 3, 1), (3, 1, 2))

GRAM_DET_FLOOR = 1e-6
TRANSITION_DET_FLOOR = 1e-9


def _basis_product(a: int, b: int) -> tuple[float, int]:
    """e_a * e_b as (coefficient, basis index); index 0 means the scalar 1."""
    if a == 0:
        return 1.0, b
    if b == 0:
        return 1.0, a
    if a == b:
        return -TAU[a - 1], 0
    for (x, y, z) in CYCLIC:
        if (a, b) == (x, y):
            return TAU[z - 1], z
        if (a, b) == (y, x):
            return -TAU[z - 1], z
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class SplitQuaternion:
    """Coefficients on the basis (1, e1, e2, e3)."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def __add__(self, other):
        return SplitQuaternion(*(self.as_array() + other.as_array()))

    def __sub__(self, other):
        return SplitQuaternion(*(self.as_array() - other.as_array()))

    def __neg__(self):
        return SplitQuaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, SplitQuaternion):
            return splitq_mul(self, other)
        return SplitQuaternion(*(self.as_array() * float(other)))

    def __rmul__(self, scalar):
        return SplitQuaternion(*(float(scalar) * self.as_array()))


def splitq_mul(q: SplitQuaternion, r: SplitQuaternion) -> SplitQuaternion:
    """Product in the split-quaternion algebra, expanded from the basis table."""
    qa, ra = q.as_array(), r.as_array()
    out = np.zeros(4)
    for a in range(4):
        if qa[a] == 0.0:
            continue
        for b in range(4):
            if ra[b] == 0.0:
                continue
            coeff, idx = _basis_product(a, b)
            out[idx] += coeff * qa[a] * ra[b]
    return SplitQuaternion(*out)


@dataclass(frozen=True)
class LocalBasisTriple:
    """Three (1,1) fields on one chart, intended to satisfy the tau algebra."""

    j1: TensorField
    j2: TensorField
    j3: TensorField
    label: str = ""

    def __post_init__(self):
        for f in (self.j1, self.j2, self.j3):
            if (f.r, f.s) != (1, 1):
                raise ValidationError("triple members must be (1,1) fields")
        if not (self.j1.chart == self.j2.chart == self.j3.chart):
            raise ValidationError("triple members must share a chart")

    @property
    def chart(self) -> ManifoldSpec:
        return self.j1.chart

    @property
    def fields(self) -> tuple[TensorField, TensorField, TensorField]:
        return (self.j1, self.j2, self.j3)

    def matrices(self, p: Point) -> np.ndarray:
        """Stacked (3, dim, dim) values at p."""
        return np.stack([eval_field(f, p) for f in self.fields])


def represent(q: SplitQuaternion, triple: LocalBasisTriple, p: Point) -> np.ndarray:
    """Image of q under 1 -> I, e_a -> J_a(p)."""
    J = triple.matrices(p)
    n = triple.chart.dim
    return q.w * np.eye(n) + q.x * J[0] + q.y * J[1] + q.z * J[2]


@dataclass(frozen=True)
class AlgebraReport:
    square_residual: float
    product_residual: float
    anticommute_residual: float
    gram_det: float

    @property
    def max_residual(self) -> float:
        return max(self.square_residual, self.product_residual, self.anticommute_residual)

    def passed(self, tol: float) -> bool:
        return self.max_residual < tol


def frobenius_gram(triple: LocalBasisTriple, p: Point) -> np.ndarray:
    """3x3 Gram matrix of the triple under <A, B> = sum_ij A^i_j B^i_j."""
    J = triple.matrices(p)
    return np.einsum("aij,bij->ab", J, J)


def check_triple_algebra(triple: LocalBasisTriple, p: Point, tol: float = 1e-12) -> AlgebraReport:
    """Residuals of the tau-algebra relations at p.

    square:      max_a  |J_a^2 + tau_a I|
    product:     max    |J_a J_b - tau_c J_c|   over cyclic (a,b,c)
    anticommute: max    |J_a J_b + J_b J_a|     over a != b

    The Gram determinant (Frobenius pairing) is reported alongside; linear
    independence of the three values means |det| > 1e-6.
    """
    J = triple.matrices(p)
    n = triple.chart.dim
    eye = np.eye(n)
    sq = max(
        float(np.abs(J[a - 1] @ J[a - 1] + TAU[a - 1] * eye).max()) for a in (1, 2, 3)
    )
    prod = max(
        float(np.abs(J[a - 1] @ J[b - 1] - TAU[c - 1] * J[c - 1]).max())
        for (a, b, c) in CYCLIC
    )
    anti = max(
        float(np.abs(J[a - 1] @ J[b - 1] + J[b - 1] @ J[a - 1]).max())
        for (a, b, c) in CYCLIC
    )
    det = float(np.linalg.det(frobenius_gram(triple, p)))
    return AlgebraReport(
        square_residual=sq,
        product_residual=prod,
        anticommute_residual=anti,
        gram_det=det,
    )


@dataclass(frozen=True)
class TransitionMap:
    """Pointwise GL(3) change of triple basis: B.J_a = sum_b s[a,b] A.J_b."""

    s: object  # Callable[[Point], np.ndarray (3,3)]
    label: str = ""

    def matrix(self, p: Point) -> np.ndarray:
        m = np.asarray(self.s(p), dtype=float)
        if m.shape != (3, 3):
            raise ValidationError(f"transition must be 3x3, got {m.shape}")
        if abs(np.linalg.det(m)) < TRANSITION_DET_FLOOR:
            raise SingularTransitionError(f"transition singular at {p}")
        return m


def check_transition(
    A: LocalBasisTriple,
    B: LocalBasisTriple,
    s: TransitionMap,
    p: Point,
    tol: float = 1e-10,
) -> float:
    """max_a |B.J_a(p) - sum_b s(p)[a,b] A.J_b(p)| (inf norm)."""
    JA = A.matrices(p)
    JB = B.matrices(p)
    m = s.matrix(p)
    recon = np.einsum("ab,bij->aij", m, JA)
    return float(np.abs(JB - recon).max())


def apply_transition(A: LocalBasisTriple, s: TransitionMap, label: str = "") -> LocalBasisTriple:
    """The triple with values B.J_a(p) = sum_b s(p)[a,b] A.J_b(p)."""
    chart = A.chart

    def member(a: int) -> TensorField:
        def comps(p: Point, a=a):
            return np.einsum("b,bij->ij", s.matrix(p)[a], A.matrices(p))

        return TensorField(chart, 1, 1, comps, label=f"{label or s.label}[{a + 1}]")

    return LocalBasisTriple(member(0), member(1), member(2), label=label or s.label)


def span_gap(A: LocalBasisTriple, B: LocalBasisTriple, p: Point) -> float:
    """Frobenius least-squares distance from each B.J_a to span{A.J_1..3},
    maximized over a.  Zero (to roundoff) iff the pointwise spans agree."""
    JA = A.matrices(p)
    JB = B.matrices(p)
    gram = np.einsum("aij,bij->ab", JA, JA)
    if abs(np.linalg.det(gram)) < 1e-9:
        raise IllConditionedError(f"triple A is numerically dependent at {p}")
    M = JA.reshape(3, -1).T  # columns span the subspace
    worst = 0.0
    for a in range(3):
        target = JB[a].reshape(-1)
        coef, *_ = np.linalg.lstsq(M, target, rcond=None)
        worst = max(worst, float(np.linalg.norm(target - M @ coef)))
    return worst


@dataclass(frozen=True)
class AtlasPatch:
    box: np.ndarray  # (dim, 2)
    triple: LocalBasisTriple

    def __post_init__(self):
        object.__setattr__(self, "box", np.asarray(self.box, dtype=float))


@dataclass(frozen=True)
class AtlasTransition:
    i: int
    j: int
    s: TransitionMap


@dataclass(frozen=True)
class StructureAtlas:
    """Patches with declared overlap transitions gluing their triples."""

    patches: tuple[AtlasPatch, ...]
    transitions: tuple[AtlasTransition, ...]


def overlap_box(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    lo = np.maximum(a[:, 0], b[:, 0])
    hi = np.minimum(a[:, 1], b[:, 1])
    if np.any(lo >= hi):
        raise EmptyDomainError("patches do not overlap")
    return np.stack([lo, hi], axis=1)


def check_atlas(
    atlas: StructureAtlas,
    count: int = 5,
    seed: int = 0,
    tol: float = 1e-10,
) -> float:
    """Worst transition residual over sampled points of each declared overlap."""
    worst = 0.0
    for tr in atlas.transitions:
        pa = atlas.patches[tr.i]
        pb = atlas.patches[tr.j]
        box = overlap_box(pa.box, pb.box)
        chart = ManifoldSpec(coords=pa.triple.chart.coords, domain=box)
        width = float((box[:, 1] - box[:, 0]).min())
        pts = sample_points(chart, count, seed, margin=min(0.05 * width, 1e-2))
        for q in pts:
            # evaluate both triples at the shared coordinates
            p_in_a = Point(pa.triple.chart, q.coords)
            p_in_b = Point(pb.triple.chart, q.coords)
            JA = pa.triple.matrices(p_in_a)
            JB = pb.triple.matrices(p_in_b)
            m = tr.s.matrix(p_in_a)
            worst = max(worst, float(np.abs(JB - np.einsum("ab,bij->aij", m, JA)).max()))
    return worst
