"""
Hyperbolic core: matrix model of the triangle group, the fundamental triangle,
boundary points, geodesics, distances, Busemann values and the angle formulas
used by the convexity checks.

Points of the hyperbolic plane are Python complex numbers in the upper
half-plane. Boundary points are stored as angles on the unit circle of the
Poincare disk (Cayley transform w = (z - i)/(z + i)).
"""

import cmath
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

# ==================== Tolerances ====================
ALGEBRAIC_TOL = 1e-12
PRODUCT_TOL = 1e-9
LIMIT_TOL = 1e-6
HYPERBOLIC_MARGIN = 1e-10
ANGLE_TOL = 1e-10

TWO_PI = 2.0 * math.pi


# ==================== Errors ====================
class TripletError(ValueError):
    """Triplet outside the supported hyperbolic range"""


class NoAxisError(ValueError):
    """Operation needs a hyperbolic isometry"""


# ==================== Triplet ====================
@dataclass(frozen=True, order=True)
class Triplet:
    """Hyperbolic triplet (p, q, r) with 3 <= p <= q <= r"""
    p: int
    q: int
    r: int

    def __post_init__(self):
        p, q, r = self.p, self.q, self.r
        if min(p, q, r) < 2:
            raise TripletError(f"triplet entries must be >= 2 (got {p},{q},{r})")
        if 1.0 / p + 1.0 / q + 1.0 / r >= 1.0:
            raise TripletError(
                f"not hyperbolic: 1/{p} + 1/{q} + 1/{r} >= 1"
            )
        if p < 3:
            raise TripletError(f"unsupported: p >= 3 required (got p={p})")
        if not p <= q <= r:
            raise TripletError(f"expected p <= q <= r (got {p},{q},{r})")

    def __str__(self) -> str:
        return f"({self.p},{self.q},{self.r})"

    @property
    def r_is_odd(self) -> bool:
        return self.r % 2 == 1


# ==================== Isometry ====================
def _normalize_sign(m: np.ndarray) -> np.ndarray:
    tr = m[0, 0] + m[1, 1]
    if tr < 0 or (tr == 0 and m[np.unravel_index(np.argmax(np.abs(m)), m.shape)] < 0):
        m = -m
    return m


@dataclass(frozen=True, eq=False)
class Isometry:
    """Unit-determinant 2x2 real matrix acting on the upper half-plane, up to sign"""
    matrix: np.ndarray

    def __post_init__(self):
        m = _normalize_sign(np.asarray(self.matrix, dtype=float).reshape(2, 2).copy())
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_entries(cls, a: float, b: float, c: float, d: float) -> "Isometry":
        return cls(np.array([[a, b], [c, d]], dtype=float))

    @classmethod
    def identity(cls) -> "Isometry":
        return cls(np.eye(2))

    @property
    def entries(self) -> Tuple[float, float, float, float]:
        m = self.matrix
        return float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1])

    @property
    def trace(self) -> float:
        return float(self.matrix[0, 0] + self.matrix[1, 1])

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return Isometry(self.matrix @ other.matrix)

    def inverse(self) -> "Isometry":
        a, b, c, d = self.entries
        return Isometry.from_entries(d, -b, -c, a)

    def power(self, n: int) -> "Isometry":
        if n < 0:
            return self.inverse().power(-n)
        return Isometry(np.linalg.matrix_power(self.matrix, n))

    def conjugate_by(self, g: "Isometry") -> "Isometry":
        """Return g^-1 * self * g"""
        return g.inverse() @ self @ g

    def apply(self, z: complex) -> complex:
        """Act on a point of the upper half-plane"""
        a, b, c, d = self.entries
        return (a * z + b) / (c * z + d)

    def to_su11(self) -> Tuple[complex, complex]:
        """Disk form (alpha, beta) acting by w -> (alpha w + beta)/(conj(beta) w + conj(alpha))"""
        a, b, c, d = self.entries
        alpha = complex(a + d, b - c) / 2.0
        beta = complex(a - d, -(b + c)) / 2.0
        return alpha, beta

    def apply_disk(self, w: complex) -> complex:
        alpha, beta = self.to_su11()
        return (alpha * w + beta) / (beta.conjugate() * w + alpha.conjugate())

    def apply_boundary(self, xi: "BoundaryPoint") -> "BoundaryPoint":
        return BoundaryPoint.from_complex(self.apply_disk(xi.to_complex()))

    def is_close(self, other: "Isometry", tol: float = PRODUCT_TOL) -> bool:
        """Entrywise comparison up to global sign, relative to the entry scale"""
        scale = max(1.0, float(np.max(np.abs(self.matrix))), float(np.max(np.abs(other.matrix))))
        bound = tol * scale
        return (bool(np.all(np.abs(self.matrix - other.matrix) <= bound))
                or bool(np.all(np.abs(self.matrix + other.matrix) <= bound)))

    def is_identity(self, tol: float = PRODUCT_TOL) -> bool:
        return self.is_close(Isometry.identity(), tol)

    def __repr__(self) -> str:
        a, b, c, d = self.entries
        return f"Isometry([[{a:.6g}, {b:.6g}], [{c:.6g}, {d:.6g}]])"


def rotation_matrix(phi: float) -> Isometry:
    """Rotation about i by angle 2*phi anticlockwise"""
    c, s = math.cos(phi), math.sin(phi)
    return Isometry.from_entries(c, s, -s, c)


def rotation_about(z0: complex, theta: float) -> Isometry:
    """Anticlockwise rotation by theta about the half-plane point z0"""
    x, y = z0.real, z0.imag
    sy = math.sqrt(y)
    t = Isometry.from_entries(sy, x / sy, 0.0, 1.0 / sy)
    return t @ rotation_matrix(theta / 2.0) @ t.inverse()


# ==================== Points and boundary ====================
def to_disk(z: complex) -> complex:
    return (z - 1j) / (z + 1j)


def from_disk(w: complex) -> complex:
    return 1j * (1 + w) / (1 - w)


def hyperbolic_distance(z: complex, w: complex) -> float:
    """Distance between two half-plane points"""
    arg = 1.0 + abs(z - w) ** 2 / (2.0 * z.imag * w.imag)
    return math.acosh(max(1.0, arg))


def angle_at(vertex: complex, p1: complex, p2: complex) -> float:
    """Angle at vertex between the geodesic segments to p1 and p2"""
    v = to_disk(vertex)

    def centered(z: complex) -> complex:
        w = to_disk(z)
        return (w - v) / (1 - v.conjugate() * w)

    u1, u2 = centered(p1), centered(p2)
    return abs(cmath.phase(u2 / u1))


@dataclass(frozen=True)
class BoundaryPoint:
    """Point of the circle at infinity, as a disk angle in [0, 2pi)"""
    angle: float

    def __post_init__(self):
        a = math.fmod(self.angle, TWO_PI)
        if a < 0:
            a += TWO_PI
        if a >= TWO_PI:
            a = 0.0
        object.__setattr__(self, "angle", a)

    @classmethod
    def from_complex(cls, w: complex) -> "BoundaryPoint":
        return cls(cmath.phase(w))

    @classmethod
    def from_real(cls, x: float) -> "BoundaryPoint":
        """Boundary point of the half-plane (math.inf allowed)"""
        if math.isinf(x):
            return cls(0.0)
        return cls.from_complex(to_disk(complex(x, 0.0)))

    def to_complex(self) -> complex:
        return cmath.exp(1j * self.angle)

    def to_half_plane(self) -> float:
        if angular_gap(self.angle, 0.0) < ALGEBRAIC_TOL:
            return math.inf
        return from_disk(self.to_complex()).real

    def close_to(self, other: "BoundaryPoint", tol: float = ANGLE_TOL) -> bool:
        return angular_gap(self.angle, other.angle) < tol


def angular_gap(a: float, b: float) -> float:
    """Unsigned distance between two angles on the circle"""
    d = math.fmod(abs(a - b), TWO_PI)
    return min(d, TWO_PI - d)


def cw_distance(start: float, end: float) -> float:
    """Clockwise angular travel from start to end, in [0, 2pi)"""
    d = math.fmod(start - end, TWO_PI)
    if d < 0:
        d += TWO_PI
    return d


@dataclass(frozen=True)
class Geodesic:
    """Oriented geodesic from endpoint_neg to endpoint_pos"""
    endpoint_neg: BoundaryPoint
    endpoint_pos: BoundaryPoint

    def __post_init__(self):
        if self.endpoint_neg.close_to(self.endpoint_pos, ALGEBRAIC_TOL):
            raise ValueError("geodesic endpoints must be distinct")

    def reversed(self) -> "Geodesic":
        return Geodesic(self.endpoint_pos, self.endpoint_neg)

    def image(self, m: Isometry) -> "Geodesic":
        return Geodesic(m.apply_boundary(self.endpoint_neg), m.apply_boundary(self.endpoint_pos))

    def same_as(self, other: "Geodesic", tol: float = ANGLE_TOL) -> bool:
        """Equality as unoriented geodesics"""
        a1, b1 = self.endpoint_neg, self.endpoint_pos
        a2, b2 = other.endpoint_neg, other.endpoint_pos
        return ((a1.close_to(a2, tol) and b1.close_to(b2, tol))
                or (a1.close_to(b2, tol) and b1.close_to(a2, tol)))


# ==================== Group construction ====================
@dataclass(frozen=True, eq=False)
class GroupData:
    """Fundamental triangle and rotation generators of the triangle group"""
    triplet: Triplet
    a0: complex
    b0: complex
    c0: complex
    gen_a: Isometry
    gen_b: Isometry
    side_ab: float
    side_bc: float
    side_ca: float
    # step_powers["a"][e] = gen_a^e, step_powers["b"][f] = gen_b^-f
    step_powers: Dict[str, Tuple[Isometry, ...]] = field(default_factory=dict, repr=False)

    def step(self, letter: str, exponent: int) -> Isometry:
        """Matrix of the syllable letter^exponent"""
        powers = self.step_powers[letter]
        return powers[exponent % len(powers)]


def _cosine_rule_side(opposite: float, adj1: float, adj2: float) -> float:
    """Side opposite the angle `opposite` from the angle form of the cosine rule"""
    value = (math.cos(adj1) * math.cos(adj2) + math.cos(opposite)) / (math.sin(adj1) * math.sin(adj2))
    return math.acosh(value)


def build_group(t: Triplet) -> GroupData:
    """
    Place the fundamental triangle and build the rotation generators

    A0 = i, B0 = i*e^c on the imaginary axis, C0 anticlockwise above the
    segment so that the order A0 -> B0 -> C0 is anticlockwise.

    Args:
        t: Hyperbolic triplet

    Returns:
        GroupData with gen_a (2pi/p about A0) and gen_b (2pi/q about B0),
        both anticlockwise
    """
    alpha_a, alpha_b, alpha_c = math.pi / t.p, math.pi / t.q, math.pi / t.r
    side_ab = _cosine_rule_side(alpha_c, alpha_a, alpha_b)
    side_bc = _cosine_rule_side(alpha_a, alpha_b, alpha_c)
    side_ca = _cosine_rule_side(alpha_b, alpha_a, alpha_c)

    a0 = 1j
    b0 = 1j * math.exp(side_ab)
    c0 = from_disk(math.tanh(side_ca / 2.0) * cmath.exp(1j * alpha_a))

    gen_a = rotation_matrix(alpha_a)
    ec = math.exp(side_ab)
    cb, sb = math.cos(alpha_b), math.sin(alpha_b)
    gen_b = Isometry.from_entries(cb, ec * sb, -sb / ec, cb)

    step_a = tuple(gen_a.power(e) for e in range(t.p))
    letter_b = gen_b.inverse()
    step_b = tuple(letter_b.power(f) for f in range(t.q))

    return GroupData(
        triplet=t, a0=a0, b0=b0, c0=c0, gen_a=gen_a, gen_b=gen_b,
        side_ab=side_ab, side_bc=side_bc, side_ca=side_ca,
        step_powers={"a": step_a, "b": step_b},
    )


# ==================== Classification ====================
@dataclass(frozen=True)
class ElementClass:
    kind: str  # elliptic | parabolic | hyperbolic
    length: Optional[float]

    @property
    def is_hyperbolic(self) -> bool:
        return self.kind == "hyperbolic"


def translation_length(m: Isometry) -> float:
    return 2.0 * math.acosh(abs(m.trace) / 2.0)


def classify_and_length(m: Isometry, margin: float = HYPERBOLIC_MARGIN) -> ElementClass:
    """Classify by |trace|; length = 2*arccosh(|trace|/2) for hyperbolic elements"""
    tr = abs(m.trace)
    if tr > 2.0 + margin:
        return ElementClass("hyperbolic", translation_length(m))
    if tr >= 2.0 - margin:
        return ElementClass("parabolic", 0.0)
    return ElementClass("elliptic", None)


def fixed_points(m: Isometry) -> Tuple[BoundaryPoint, BoundaryPoint]:
    """
    Attracting and repelling fixed points on the disk boundary

    Raises:
        NoAxisError: m is not hyperbolic
    """
    if not classify_and_length(m).is_hyperbolic:
        raise NoAxisError(f"no axis: |trace| = {abs(m.trace):.12g} <= 2")
    alpha, beta = m.to_su11()
    s = math.sqrt(max(0.0, alpha.real ** 2 - 1.0))
    sign = 1.0 if alpha.real >= 0 else -1.0
    bc = beta.conjugate()
    attracting = complex(sign * s, alpha.imag) / bc
    repelling = complex(-sign * s, alpha.imag) / bc
    return BoundaryPoint.from_complex(attracting), BoundaryPoint.from_complex(repelling)


def axis(m: Isometry) -> Geodesic:
    """Translation axis of a hyperbolic isometry, oriented toward the attracting point"""
    attracting, repelling = fixed_points(m)
    return Geodesic(repelling, attracting)


# ==================== Geodesic geometry ====================
@dataclass(frozen=True)
class GeodesicSeparation:
    distance: float
    relation: str  # disjoint | crossing | asymptotic | equal


def endpoints_interleave(g1: Geodesic, g2: Geodesic) -> bool:
    """True when the endpoints of g2 separate those of g1 on the circle"""
    a, b = g1.endpoint_neg.angle, g1.endpoint_pos.angle
    span = cw_distance(a, b)

    def inside(x: float) -> Optional[bool]:
        d = cw_distance(a, x)
        if d < ALGEBRAIC_TOL or abs(d - span) < ALGEBRAIC_TOL:
            return None
        return d < span

    s1, s2 = inside(g2.endpoint_neg.angle), inside(g2.endpoint_pos.angle)
    if s1 is None or s2 is None:
        return False
    return s1 != s2


def geodesic_distance(g1: Geodesic, g2: Geodesic) -> GeodesicSeparation:
    """
    Distance between two geodesics from the cross ratio of their endpoints

    Crossing or asymptotic geodesics are at distance 0.
    """
    if g1.same_as(g2, ALGEBRAIC_TOL):
        return GeodesicSeparation(0.0, "equal")
    a1, b1 = g1.endpoint_neg.to_complex(), g1.endpoint_pos.to_complex()
    a2, b2 = g2.endpoint_neg.to_complex(), g2.endpoint_pos.to_complex()
    num = (a1 - a2) * (b1 - b2)
    den = (a1 - b2) * (b1 - a2)
    if abs(num) < ALGEBRAIC_TOL or abs(den) < ALGEBRAIC_TOL:
        return GeodesicSeparation(0.0, "asymptotic")
    cross = (num / den).real
    if cross < 0:
        return GeodesicSeparation(0.0, "crossing")
    c = min(cross, 1.0 / cross)
    if c >= 1.0:
        return GeodesicSeparation(0.0, "equal")
    return GeodesicSeparation(math.acosh((1.0 + c) / (1.0 - c)), "disjoint")


def _chart_rotation(points: Iterable[BoundaryPoint]) -> float:
    """Angle of the middle of the widest gap between the given boundary angles"""
    angles = sorted(p.angle for p in points)
    best_gap, best_mid = -1.0, 0.0
    for i, a in enumerate(angles):
        nxt = angles[(i + 1) % len(angles)] + (TWO_PI if i + 1 == len(angles) else 0.0)
        if nxt - a > best_gap:
            best_gap, best_mid = nxt - a, (a + nxt) / 2.0
    return best_mid


def _to_chart(rho: float, xi: BoundaryPoint) -> float:
    """Real boundary coordinate after rotating the disk by -rho"""
    return from_disk(cmath.exp(1j * (xi.angle - rho))).real


def _from_chart(rho: float, z: complex) -> complex:
    return from_disk(to_disk(z) * cmath.exp(1j * rho))


def _semicircle(rho: float, g: Geodesic) -> Tuple[float, float]:
    u, v = _to_chart(rho, g.endpoint_neg), _to_chart(rho, g.endpoint_pos)
    return (u + v) / 2.0, abs(v - u) / 2.0


def geodesic_distance_oracle(g1: Geodesic, g2: Geodesic) -> float:
    """Distance by nested golden-section minimization over arclength parameters"""
    rho = _chart_rotation([g1.endpoint_neg, g1.endpoint_pos, g2.endpoint_neg, g2.endpoint_pos])

    def param(g: Geodesic):
        u, v = sorted((_to_chart(rho, g.endpoint_neg), _to_chart(rho, g.endpoint_pos)))
        scale = math.sqrt(v - u)
        m = Isometry.from_entries(v / scale, u / scale, 1.0 / scale, 1.0 / scale)
        return lambda t: m.apply(1j * math.exp(t))

    path1, path2 = param(g1), param(g2)

    def inner(t1: float) -> float:
        z = path1(t1)
        res = minimize_scalar(lambda t2: hyperbolic_distance(z, path2(t2)),
                              bracket=(-1.0, 1.0), method="golden", tol=1e-12)
        return float(res.fun)

    res = minimize_scalar(inner, bracket=(-1.0, 1.0), method="golden", tol=1e-12)
    return float(res.fun)


def geodesic_through(z1: complex, z2: complex) -> Geodesic:
    """Geodesic through two half-plane points, oriented from z1 to z2"""
    w1, w2 = to_disk(z1), to_disk(z2)
    u = (w2 - w1) / (1 - w1.conjugate() * w2)
    u /= abs(u)

    def back(w: complex) -> complex:
        return (w + w1) / (1 + w1.conjugate() * w)

    return Geodesic(BoundaryPoint.from_complex(back(-u)), BoundaryPoint.from_complex(back(u)))


def geodesic_intersection(g1: Geodesic, g2: Geodesic) -> Optional[complex]:
    """Crossing point of two geodesics in the half-plane, or None"""
    if not endpoints_interleave(g1, g2):
        return None
    rho = _chart_rotation([g1.endpoint_neg, g1.endpoint_pos, g2.endpoint_neg, g2.endpoint_pos])
    c1, r1 = _semicircle(rho, g1)
    c2, r2 = _semicircle(rho, g2)
    x = (r1 ** 2 - r2 ** 2 - c1 ** 2 + c2 ** 2) / (2.0 * (c2 - c1))
    y = math.sqrt(max(0.0, r1 ** 2 - (x - c1) ** 2))
    return _from_chart(rho, complex(x, y))


def same_side(g: Geodesic, z1: complex, z2: complex) -> bool:
    """True when z1 and z2 lie in the same half-plane cut out by g"""
    rho = _chart_rotation([g.endpoint_neg, g.endpoint_pos])
    c, radius = _semicircle(rho, g)

    def inside(z: complex) -> bool:
        w = from_disk(to_disk(z) * cmath.exp(-1j * rho))
        return abs(w - c) < radius

    return inside(z1) == inside(z2)


# ==================== Busemann functions ====================
def busemann(xi: BoundaryPoint, x: complex) -> float:
    """Busemann function at xi normalized at the disk origin, evaluated at half-plane x"""
    w = to_disk(x)
    return math.log(abs(xi.to_complex() - w) ** 2 / (1.0 - abs(w) ** 2))


def busemann_limit(xi: BoundaryPoint, x: complex, t: float = 30.0) -> float:
    """d(x, p_t) - d(origin, p_t) for the point p_t at distance t toward xi"""
    w = to_disk(x)
    p = math.tanh(t / 2.0) * xi.to_complex()
    sech2 = 1.0 / math.cosh(t / 2.0) ** 2
    arg = 1.0 + 2.0 * abs(w - p) ** 2 / ((1.0 - abs(w) ** 2) * sech2)
    return math.acosh(arg) - t


# ==================== Angle formulas ====================
@dataclass(frozen=True)
class TriangleCheckInput:
    """Two lines meeting at angle alpha, isosceles triangle with base angle psi1, far points at s1, s2"""
    alpha: float
    psi1: float
    s1: float
    s2: float
    ell: float
    h: float
    beta: float

    def __post_init__(self):
        if not 0.0 < self.alpha < math.pi:
            raise ValueError(f"alpha must lie in (0, pi), got {self.alpha}")
        if min(self.s1, self.s2, self.ell, self.h) <= 0:
            raise ValueError("lengths must be positive")

    @classmethod
    def from_triangle(cls, alpha: float, psi1: float, s1: float, s2: float) -> "TriangleCheckInput":
        """Derive ell, beta and h from the triangle data"""
        if alpha + 2.0 * psi1 >= math.pi:
            raise ValueError("isosceles triangle with these angles is not hyperbolic")
        ell = math.acosh(1.0 / math.tan(psi1) * (1.0 + math.cos(alpha)) / math.sin(alpha))
        ratio = math.tanh(s1) / math.tanh(s2)
        beta = math.atan((ratio - math.cos(alpha)) / math.sin(alpha))
        h = math.atanh(math.cos(beta) * math.tanh(s2))
        return cls(alpha=alpha, psi1=psi1, s1=s1, s2=s2, ell=ell, h=h, beta=beta)


def triangle_inequality_holds(inp: TriangleCheckInput) -> bool:
    """cosh s1 (tanh s1 / tanh s2 - cos alpha) > (1 - cos alpha) cosh ell"""
    lhs = math.cosh(inp.s1) * (math.tanh(inp.s1) / math.tanh(inp.s2) - math.cos(inp.alpha))
    rhs = (1.0 - math.cos(inp.alpha)) * math.cosh(inp.ell)
    return lhs > rhs


def _third_side(alpha: float, x: float, y: float) -> float:
    return math.acosh(math.cosh(x) * math.cosh(y) - math.sinh(x) * math.sinh(y) * math.cos(alpha))


def _base_angle(near: float, far: float, opposite: float) -> float:
    """Angle at the end of side `near` of a triangle with sides near, far, opposite"""
    cos_val = (math.cosh(near) * math.cosh(opposite) - math.cosh(far)) / (math.sinh(near) * math.sinh(opposite))
    return math.acos(max(-1.0, min(1.0, cos_val)))


def direct_angle_check(inp: TriangleCheckInput) -> bool:
    """psi1' < psi1, with psi1' read off the triangle (P, Q1, Q2) by the cosine laws"""
    base = _third_side(inp.alpha, inp.s1, inp.s2)
    psi1_prime = _base_angle(inp.s1, inp.s2, base)
    return psi1_prime < inp.psi1


def mu_upper_bound(p: int, r: int) -> float:
    """arccot(cot(pi/p) cos(pi/r) / (1 - cos(pi/r))) + pi/p"""
    cr = math.cos(math.pi / r)
    bound = 1.0 / math.tan(math.pi / p) * cr / (1.0 - cr)
    return math.atan2(1.0, bound) + math.pi / p


@dataclass(frozen=True)
class AngleReport:
    phi_q: float
    psi_q: float
    mu_q: float
    nu_q: float
    theta_j: Dict[str, float]
    a_q: float
    b_q: float
    mu_bound: float


def face_polygon(gd: GroupData) -> List[complex]:
    """Vertices of the face polygon around C0, anticlockwise from A0, B0"""
    r = gd.triplet.r
    vertices = []
    for k in range(r):
        rot = rotation_about(gd.c0, TWO_PI * k / r)
        vertices.append(rot.apply(gd.a0))
        vertices.append(rot.apply(gd.b0))
    return vertices


def polygon_angles(gd: GroupData) -> Dict[str, float]:
    """
    Angle between the two antipodal diagonals through the neighbours of a vertex

    For the vertex V with anticlockwise neighbour N and clockwise neighbour M,
    returns angle(N, V, N*) + angle(M, V, M*) where * is the antipode in the
    2r-gon, keyed by the vertex type.
    """
    verts = face_polygon(gd)
    n = len(verts)
    r = gd.triplet.r
    result = {}
    for vtype, idx in (("A", 0), ("B", 1)):
        v = verts[idx]
        nxt, prv = (idx + 1) % n, (idx - 1) % n
        nu = angle_at(v, verts[nxt], verts[(nxt + r) % n])
        mu = angle_at(v, verts[prv], verts[(prv + r) % n])
        result[vtype] = mu + nu
    return result


def trig_pack(t: Triplet) -> AngleReport:
    """
    Evaluate the polygon angles phi_q, psi_q, mu_q, nu_q and theta

    For odd r the triangle (C, A-vertex, B-vertex) with apex angle pi - 2pi/r
    gives phi at the A-vertex and psi at the B-vertex. For even r both
    isosceles configurations are used (A-legs for phi, B-legs for psi).
    """
    gd = build_group(t)
    alpha = math.pi - TWO_PI / t.r
    a_q, b_q = gd.side_bc, gd.side_ca
    if t.r_is_odd:
        base = _third_side(alpha, b_q, a_q)
        phi = _base_angle(b_q, a_q, base)
        psi = _base_angle(a_q, b_q, base)
    else:
        phi = _base_angle(b_q, b_q, _third_side(alpha, b_q, b_q))
        psi = _base_angle(a_q, a_q, _third_side(alpha, a_q, a_q))
    return AngleReport(
        phi_q=phi,
        psi_q=psi,
        mu_q=phi + math.pi / t.p,
        nu_q=psi + math.pi / t.q,
        theta_j=polygon_angles(gd),
        a_q=a_q,
        b_q=b_q,
        mu_bound=mu_upper_bound(t.p, t.r),
    )


# ==================== Matrix index ====================
_KEY_WEIGHTS = (1.0, math.sqrt(2.0), math.sqrt(3.0), math.sqrt(5.0))


class MatrixIndex:
    """
    Hash index of isometries up to sign

    Keys are a rounded linear functional of the sign-normalized entries;
    lookups scan the neighbouring buckets and confirm with is_close.
    """

    def __init__(self, resolution: float = 1e-7, tol: float = PRODUCT_TOL):
        self.resolution = resolution
        self.tol = tol
        self._buckets: Dict[Tuple, List[Tuple[Isometry, object]]] = {}

    def _key(self, m: Isometry) -> int:
        entries = m.entries
        peak = max(abs(x) for x in entries)
        scale = max(1.0, peak)
        # near-zero traces make the stored sign arbitrary; pin it on a large entry
        if abs(m.trace) < 1e-6 * scale:
            lead = next(x for x in entries if abs(x) > 0.25 * peak)
            if lead < 0:
                entries = tuple(-x for x in entries)
        value = sum(w * x for w, x in zip(_KEY_WEIGHTS, entries))
        return int(round(value / (self.resolution * scale)))

    def find(self, m: Isometry, tag: object = None) -> List[object]:
        """Payloads stored for matrices close to m (optionally within one tag space)"""
        key = self._key(m)
        found = []
        for bucket in (key - 1, key, key + 1):
            for other, payload in self._buckets.get((tag, bucket), ()):
                if other.is_close(m, self.tol):
                    found.append(payload)
        return found

    def add(self, m: Isometry, payload: object, tag: object = None) -> None:
        self._buckets.setdefault((tag, self._key(m)), []).append((m, payload))

    def insert_unique(self, m: Isometry, payload: object, tag: object = None) -> bool:
        """Insert unless an equal matrix is present; returns True when inserted"""
        if self.find(m, tag):
            return False
        self.add(m, payload, tag)
        return True

    def __len__(self) -> int:
        return sum(len(v) for v in self._buckets.values())
