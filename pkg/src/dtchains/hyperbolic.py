"""Upper half-plane hyperbolic geometry.

Points are complex numbers z with z.imag > 0.  Isometries are real 2x2
matrices of determinant one acting by Mobius transformations
z -> (az+b)/(cz+d); a matrix and its negative act identically, so
everything here lives in PSL(2,R).

Directions at a point are measured as angles counterclockwise from
"north" (the upward vertical geodesic through the point), which matches
the rotation convention: rotation_about(p, theta) turns tangent
directions at p counterclockwise by theta.
"""

import math
from dataclasses import dataclass

TAU = 2.0 * math.pi

EPS_DET = 1e-12
EPS_CLASS = 1e-9
EPS_ANGLE = 1e-9
EPS_GEOM = 1e-9


def _clamp1(x):
    # keep acos/acosh arguments inside their domain against float fuzz
    if x > 1.0:
        return 1.0
    if x < -1.0:
        return -1.0
    return x


def _acosh_at_least_one(x):
    # arguments within 1e-12 of 1 are degenerate-side fuzz: acosh would
    # amplify them to ~1e-6; snap to an exact zero side instead
    return math.acosh(x) if x > 1.0 + 1e-12 else 0.0


class Isometry:
    """An element of PSL(2,R), stored as a det-1 matrix [[a,b],[c,d]].

    The constructor renormalizes the determinant (divide by sqrt(det))
    so composition chains do not drift; orientation-reversing input
    (det <= 0) is rejected.
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        det = a * d - b * c
        if not math.isfinite(det) or det <= 0.0:
            raise ValueError(f"matrix has non-positive determinant {det}")
        if abs(det - 1.0) > EPS_DET:
            s = math.sqrt(det)
            a, b, c, d = a / s, b / s, c / s, d / s
        self.a, self.b, self.c, self.d = a, b, c, d

    def __mul__(self, other):
        return Isometry(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self):
        return Isometry(self.d, -self.b, -self.c, self.a)

    def apply(self, z):
        return (self.a * z + self.b) / (self.c * z + self.d)

    def trace(self):
        return self.a + self.d

    def matrix(self):
        return ((self.a, self.b), (self.c, self.d))

    def dist_to(self, other):
        """Max entry difference, minimized over the +/- sign ambiguity."""
        plus = max(
            abs(self.a - other.a), abs(self.b - other.b),
            abs(self.c - other.c), abs(self.d - other.d),
        )
        minus = max(
            abs(self.a + other.a), abs(self.b + other.b),
            abs(self.c + other.c), abs(self.d + other.d),
        )
        return min(plus, minus)

    def __repr__(self):
        return f"Isometry({self.a:.6g}, {self.b:.6g}, {self.c:.6g}, {self.d:.6g})"


IDENTITY = Isometry(1.0, 0.0, 0.0, 1.0)


def apply(g, z):
    """Mobius action of g on a point of the upper half plane."""
    return g.apply(z)


def dist(p, q):
    """Hyperbolic distance, in the cancellation-safe asinh form."""
    return 2.0 * math.asinh(abs(p - q) / (2.0 * math.sqrt(p.imag * q.imag)))


def _frame_to(p):
    """The isometry z -> y*z + x taking i to p (an upper-triangular frame)."""
    y = p.imag
    if y <= 0.0:
        raise ValueError(f"point {p} not in the upper half plane")
    r = math.sqrt(y)
    return Isometry(r, p.real / r, 0.0, 1.0 / r)


def rotation_about(p, theta):
    """Elliptic element fixing p, turning directions ccw by theta.

    At p = i this is [[cos(t/2), sin(t/2)], [-sin(t/2), cos(t/2)]], whose
    Mobius derivative at i is e^{i theta}.
    """
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    t = _frame_to(p)
    return t * Isometry(c, s, -s, c) * t.inverse()


@dataclass(frozen=True)
class IsometryClass:
    """Classification of a PSL(2,R) element.

    kind: "identity" | "elliptic" | "parabolic" | "hyperbolic"
    angle: rotation angle in (0, 2pi), elliptic only
    fixed_point: the fixed point in H, elliptic only
    translation_length: hyperbolic only
    near_boundary: |trace| within EPS_CLASS of 2 (parabolic/identity calls)
    """

    kind: str
    angle: float | None = None
    fixed_point: complex | None = None
    translation_length: float | None = None
    near_boundary: bool = False


def classify(g, eps=EPS_CLASS):
    """Sort g into identity / elliptic / parabolic / hyperbolic.

    Elliptic elements carry their fixed point and their rotation angle,
    read off as the argument of the Mobius derivative at the fixed point
    (stable under g -> -g).
    """
    t = abs(g.trace())
    if t < 2.0 - eps:
        # elliptic; c = 0 would force |trace| = |a + 1/a| >= 2
        a, b, c, d = g.a, g.b, g.c, g.d
        x0 = (a - d) / (2.0 * c)
        y0 = math.sqrt(4.0 - t * t) / (2.0 * abs(c))
        z0 = complex(x0, y0)
        w = complex(c * x0 + d, c * y0)
        theta = (-2.0 * math.atan2(w.imag, w.real)) % TAU
        return IsometryClass(kind="elliptic", angle=theta, fixed_point=z0)
    if t > 2.0 + eps:
        return IsometryClass(kind="hyperbolic", translation_length=2.0 * math.acosh(t / 2.0))
    is_id = g.dist_to(IDENTITY) <= eps
    return IsometryClass(kind="identity" if is_id else "parabolic", near_boundary=True)


def direction_at(v, w):
    """Initial direction of the geodesic from v to w.

    Returned as an angle in (-pi, pi], counterclockwise from north.
    East (increasing real part) is -pi/2, west is +pi/2.
    """
    u = (w - v.real) / v.imag  # v moved to i
    x, y = u.real, u.imag
    if y <= 0.0:
        raise ValueError(f"target {w} not in the upper half plane")
    if abs(x) < 1e-15 * max(1.0, abs(y)):
        if abs(y - 1.0) < 1e-15:
            raise ValueError("direction to the point itself is undefined")
        return 0.0 if y > 1.0 else math.pi
    # geodesic through i and u: half-circle centered (xc, 0); tangent at i
    # is perpendicular to the radius (-xc, 1), oriented toward u
    xc = (x * x + (y - 1.0) * (y + 1.0)) / (2.0 * x)
    s = 1.0 if x > 0.0 else -1.0
    tx, ty = s, s * xc
    return math.atan2(-tx, ty)


def point_at(p, psi, s):
    """The point at arc length s from p along direction psi (ccw from north)."""
    g = _frame_to(p) * rotation_about(1j, psi)
    return g.apply(1j * math.exp(s))


def oriented_angle(v, p, q):
    """Counterclockwise angle at v from the ray toward p to the ray toward q.

    Value in [0, 2pi).  Raises if either ray is degenerate.
    """
    if dist(v, p) < EPS_GEOM or dist(v, q) < EPS_GEOM:
        raise ValueError("oriented_angle: degenerate ray")
    return (direction_at(v, q) - direction_at(v, p)) % TAU


def unsigned_angle(v, p, q):
    """Interior-style angle at v between rays toward p and q, in [0, pi]."""
    o = oriented_angle(v, p, q)
    return min(o, TAU - o)


def side_from_angles(a1, a2, a3):
    """Length of the side joining the vertices with angles a1, a2.

    Dual hyperbolic law of cosines: cosh(c) = (cos a3 + cos a1 cos a2)
    / (sin a1 sin a2), where a3 is the angle opposite the side.
    """
    num = math.cos(a3) + math.cos(a1) * math.cos(a2)
    den = math.sin(a1) * math.sin(a2)
    return _acosh_at_least_one(num / den)


def triangle_from_angles(t1, t2, t3):
    """Clockwise triangle with interior angles (t1, t2, t3).

    Canonical frame: first vertex at i, first edge (toward the second
    vertex) going up the imaginary axis.  Requires t1 + t2 + t3 < pi and
    every angle positive; the angle sum equal to pi gives the degenerate
    point triangle.
    """
    if min(t1, t2, t3) <= 0.0:
        raise ValueError("triangle angles must be positive")
    if t1 + t2 + t3 > math.pi + EPS_ANGLE:
        raise ValueError("triangle angle sum exceeds pi")
    d12 = side_from_angles(t1, t2, t3)
    d13 = side_from_angles(t1, t3, t2)
    v1 = 1j
    v2 = point_at(v1, 0.0, d12)
    v3 = point_at(v1, -t1, d13)
    return (v1, v2, v3)


def triangle_area(tri):
    """Area by angle defect: pi minus the interior angle sum.

    Degenerate triangles (two vertices closer than EPS_GEOM) have area 0.
    """
    v1, v2, v3 = tri
    if dist(v1, v2) < EPS_GEOM or dist(v2, v3) < EPS_GEOM or dist(v3, v1) < EPS_GEOM:
        return 0.0
    total = (
        unsigned_angle(v1, v3, v2)
        + unsigned_angle(v2, v1, v3)
        + unsigned_angle(v3, v2, v1)
    )
    return max(math.pi - total, 0.0)
