"""Triangle chains and action-angle coordinates.

A point of the compact component with peripheral angles alpha is encoded
by a chain of n-2 clockwise hyperbolic triangles

    (C_1, C_2, B_1), (B_1, C_3, B_2), ..., (B_{n-3}, C_{n-1}, C_n),

where C_i is the fixed point of rho(c_i) and B_i the fixed point of
rho(b_i).  Interior angles are pi - alpha_i/2 at each exterior vertex
C_i, and pi - beta_i/2 / beta_i/2 on the two sides of each shared vertex
B_i.  The normalized triangle areas are the moment map mu; the angle
coordinate gamma_i is the counterclockwise angle at B_i from the ray
toward C_{i+2} to the ray toward C_{i+1}, defined whenever both adjacent
triangles are non-degenerate.

Canonical frame: C_1 sits at i = (0,1) and the first scan point distinct
from C_1 (normally B_1) lies straight up the imaginary axis, so chains
are comparable without a conjugation search.
"""

import json
import math
from dataclasses import dataclass, field

from .hyperbolic import (
    TAU,
    Isometry,
    classify,
    direction_at,
    dist,
    oriented_angle,
    point_at,
    rotation_about,
    side_from_angles,
    triangle_area,
    unsigned_angle,
)

EPS_AREA = 1e-9


@dataclass(frozen=True)
class AngleVector:
    """Peripheral rotation angles alpha_1..alpha_n, each in (0, 2pi).

    Valid only above the angle condition sum > 2pi(n-1); lam is the
    excess, which equals twice the total chain area.
    """

    alpha: tuple

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        n = len(self.alpha)
        if n < 4:
            raise ValueError(f"need at least 4 punctures, got {n}")
        for k, a in enumerate(self.alpha):
            if not 0.0 < a < TAU:
                raise ValueError(f"alpha[{k}] = {a} outside (0, 2*pi)")
        if self.lam <= 0.0:
            raise ValueError(
                f"angle condition violated: sum(alpha) = {sum(self.alpha)} "
                f"<= 2*pi*(n-1) = {TAU / 2 * (n - 1) * 2}"
            )

    @property
    def n(self):
        return len(self.alpha)

    @property
    def lam(self):
        return math.fsum(self.alpha) - math.pi * 2.0 * (self.n - 1)


@dataclass(frozen=True)
class ActionAngleCoords:
    """beta_1..beta_{n-3} plus the defined angle coordinates.

    gamma maps 1-based slot index to the angle; slots adjacent to a
    degenerate triangle are simply absent.  Extra entries for undefined
    slots are allowed as build inputs (they set the attachment of the
    next non-degenerate triangle) but are never returned by extraction.
    """

    beta: tuple
    gamma: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))
        object.__setattr__(
            self, "gamma", {int(i): float(g) % TAU for i, g in self.gamma.items()}
        )
        for k, b in enumerate(self.beta):
            if not 0.0 < b < TAU:
                raise ValueError(f"beta[{k}] = {b} outside (0, 2*pi)")
        for i in self.gamma:
            if not 1 <= i <= len(self.beta):
                raise ValueError(f"gamma slot {i} out of range")

    def gamma_list(self):
        """gamma as a list with None in undefined slots (JSON shape)."""
        return [self.gamma.get(i) for i in range(1, len(self.beta) + 1)]


@dataclass(frozen=True)
class MomentValues:
    """Normalized triangle areas mu_0..mu_{n-3}; they sum to 1/2."""

    mu: tuple
    lam: float

    def pattern(self, eps=EPS_AREA):
        """Indices of vanishing entries (area below lam-scaled eps)."""
        return frozenset(i for i, m in enumerate(self.mu) if self.lam * m < eps)


@dataclass(frozen=True)
class TriangleChain:
    alpha: AngleVector
    C: tuple
    B: tuple

    def __post_init__(self):
        n = self.alpha.n
        if len(self.C) != n or len(self.B) != n - 3:
            raise ValueError(
                f"chain shape mismatch: n={n}, len(C)={len(self.C)}, len(B)={len(self.B)}"
            )

    @property
    def n(self):
        return self.alpha.n

    def triangles(self):
        """The n-2 triangles in chain order, as vertex triples."""
        n = self.n
        C, B = self.C, self.B
        tris = [(C[0], C[1], B[0])]
        for k in range(2, n - 2):
            tris.append((B[k - 2], C[k], B[k - 1]))
        tris.append((B[n - 4], C[n - 2], C[n - 1]))
        return tris

    def areas(self):
        return [triangle_area(t) for t in self.triangles()]


def moment_map(alpha, beta):
    """Normalized areas of the chain triangles as functions of beta.

    mu_0 = (a1 + a2 + b1 - 4pi) / (2 lam)
    mu_i = (a_{i+2} - b_i + b_{i+1} - 2pi) / (2 lam)   for 1 <= i <= n-4
    mu_{n-3} = (a_{n-1} + a_n - b_{n-3} - 2pi) / (2 lam)

    Negative values are reported, not raised; callers validate.
    """
    if not isinstance(alpha, AngleVector):
        alpha = AngleVector(tuple(alpha))
    a = alpha.alpha
    n = alpha.n
    beta = tuple(float(b) for b in beta)
    if len(beta) != n - 3:
        raise ValueError(f"expected {n - 3} beta values, got {len(beta)}")
    lam = alpha.lam
    two_pi = TAU
    mu = [(a[0] + a[1] + beta[0] - 2.0 * two_pi) / (2.0 * lam)]
    for i in range(1, n - 3):
        mu.append((a[i + 1] - beta[i - 1] + beta[i] - two_pi) / (2.0 * lam))
    mu.append((a[n - 2] + a[n - 1] - beta[n - 4] - two_pi) / (2.0 * lam))
    return MomentValues(tuple(mu), lam)


def _triangle_half_angles(alpha, beta, k):
    """Interior angles of triangle k (1-based) at its three vertices."""
    a = alpha.alpha
    n = alpha.n
    if k == 1:
        return (math.pi - a[0] / 2.0, math.pi - a[1] / 2.0, math.pi - beta[0] / 2.0)
    if k <= n - 3:
        return (beta[k - 2] / 2.0, math.pi - a[k] / 2.0, math.pi - beta[k - 1] / 2.0)
    return (beta[n - 4] / 2.0, math.pi - a[n - 2] / 2.0, math.pi - a[n - 1] / 2.0)


def build_chain(alpha, coords):
    """Realize (beta, gamma) as a triangle chain in the canonical frame.

    Triangle k+1 is attached at B_k: the ray toward its exterior vertex
    is the reference ray [B_k C_{k+1}) turned clockwise by gamma_k, and
    the ray toward B_{k+1} sits a further beta_k/2 clockwise (interior
    angle beta_k/2 on the far side).  Degenerate triangles collapse to
    the shared vertex and the reference direction is carried through
    symbolically.
    """
    if not isinstance(alpha, AngleVector):
        alpha = AngleVector(tuple(alpha))
    n = alpha.n
    beta, gamma = coords.beta, coords.gamma
    if len(beta) != n - 3:
        raise ValueError(f"expected {n - 3} beta values, got {len(beta)}")
    mv = moment_map(alpha, beta)
    lam = mv.lam
    for i, m in enumerate(mv.mu):
        if m < -EPS_AREA / lam:
            raise ValueError(f"coordinates outside polytope: mu_{i} = {m}")
    for i in range(1, n - 2):
        if lam * mv.mu[i - 1] >= EPS_AREA and lam * mv.mu[i] >= EPS_AREA and i not in gamma:
            raise ValueError(f"missing gamma[{i}] for non-degenerate slot")

    C = [None] * n
    B = [None] * (n - 3)

    # triangle 1 in the raw frame: C1 at i, B1 straight north
    t1, t2, t3 = _triangle_half_angles(alpha, beta, 1)
    C[0] = 1j
    dir_third = 0.0
    dir_second = dir_third + (math.pi - alpha.alpha[0] / 2.0)
    B[0] = point_at(C[0], dir_third, side_from_angles(t1, t3, t2))
    C[1] = point_at(C[0], dir_second, side_from_angles(t1, t2, t3))
    if dist(B[0], C[1]) > 1e-7:
        ref = direction_at(B[0], C[1])
    else:
        ref = dir_third + beta[0] / 2.0

    for k in range(2, n - 1):  # triangles 2..n-2
        pivot = B[k - 2]
        t1, t2, t3 = _triangle_half_angles(alpha, beta, k)
        dir_second = ref - gamma.get(k - 1, 0.0)
        dir_third = dir_second - t1
        second = point_at(pivot, dir_second, side_from_angles(t1, t2, t3))
        third = point_at(pivot, dir_third, side_from_angles(t1, t3, t2))
        if k <= n - 3:
            C[k], B[k - 1] = second, third
            if dist(third, second) > 1e-7:
                ref = direction_at(third, second)
            else:
                # carried frame: shared vertices coincide, same tangent space
                ref = dir_third + beta[k - 1] / 2.0
        else:
            C[k], C[k + 1] = second, third

    return canonicalize(TriangleChain(alpha, tuple(C), tuple(B)))


def canonicalize(chain):
    """Move a chain to the canonical frame.

    C_1 goes to i; the first point in the scan order B_1, C_2, C_3, B_2,
    C_4, B_3, ... that is distinct from C_1 is turned to straight north.
    """
    n = chain.n
    C, B = chain.C, chain.B
    y = C[0].imag
    r = math.sqrt(y)
    # z -> (z - Re C1) / Im C1
    a = Isometry(1.0 / r, -C[0].real / r, 0.0, r)
    scan = [B[0], C[1]]
    for k in range(2, n - 2):
        scan.extend((C[k], B[k - 1]))
    scan.extend((C[n - 2], C[n - 1]))
    g = a
    for x in scan:
        if dist(C[0], x) > 1e-9:
            g = rotation_about(1j, -direction_at(1j, a.apply(x))) * a
            break
    return TriangleChain(
        chain.alpha,
        tuple(g.apply(z) for z in C),
        tuple(g.apply(z) for z in B),
    )


def _beta_from_products(chain):
    """beta_i as rotation angles of the generator prefix products.

    rho(b_i) = (rho(c_1)...rho(c_{i+1}))^{-1}, so beta_i = 2pi - angle of
    the prefix product.  Well defined on every stratum.
    """
    a = chain.alpha.alpha
    prefix = rotation_about(chain.C[0], a[0])
    out = []
    for i in range(1, chain.n - 2):
        prefix = prefix * rotation_about(chain.C[i], a[i])
        cls = classify(prefix)
        if cls.kind != "elliptic":
            raise ValueError(f"prefix product c_1..c_{i + 1} is {cls.kind}, chain invalid")
        out.append((TAU - cls.angle) % TAU)
    return out


def extract_coords(chain, eps_area=EPS_AREA):
    """Read (beta, gamma) back off a chain.

    beta_i comes from the interior angle beta_i/2 of triangle i+1 at B_i
    when that triangle is non-degenerate, and from the rotation angle of
    the generator prefix product otherwise.  gamma_i is present iff both
    triangles at B_i are non-degenerate.
    """
    n = chain.n
    tris = chain.triangles()
    areas = [triangle_area(t) for t in tris]
    beta_alg = None
    beta = []
    for i in range(1, n - 2):
        v1, v2, v3 = tris[i]  # triangle i+1, pivot B_i
        if areas[i] >= eps_area:
            beta.append(2.0 * oriented_angle(v1, v3, v2))
        else:
            if beta_alg is None:
                beta_alg = _beta_from_products(chain)
            beta.append(beta_alg[i - 1])
    gamma = {}
    for i in range(1, n - 2):
        if areas[i - 1] >= eps_area and areas[i] >= eps_area:
            gamma[i] = oriented_angle(chain.B[i - 1], chain.C[i + 1], chain.C[i])
    return ActionAngleCoords(tuple(beta), gamma)


def degeneracy_pattern(chain, eps_area=EPS_AREA):
    """The set I of indices i with triangle i+1 collapsed to a point."""
    areas = chain.areas()
    pattern = frozenset(i for i, s in enumerate(areas) if s < eps_area)
    if len(pattern) == len(areas):
        raise ValueError("all triangles degenerate: not a valid chain")
    return pattern


def restrict_chain(chain, nbar):
    """Forget trailing degenerate triangles: the sub-sphere chain.

    Requires mu_i = 0 for all i >= nbar-2.  The first nbar-2 triangles
    carry over verbatim; the last peripheral angle of the restriction is
    alpha_nbar + ... + alpha_n - 2pi(n - nbar), its fixed point the
    collapsed vertex B_{nbar-2}.  The angle excess lam is preserved.
    """
    n = chain.n
    if not 4 <= nbar < n:
        raise ValueError(f"nbar = {nbar} out of range 4..{n - 1}")
    areas = chain.areas()
    for i in range(nbar - 2, n - 2):
        if areas[i] >= EPS_AREA:
            raise ValueError(f"triangle {i + 1} not degenerate: mu_{i} != 0")
    a = chain.alpha.alpha
    tail = math.fsum(a[nbar - 1:]) - TAU / 2.0 * (n - nbar) * 2.0
    if not 0.0 < tail < TAU:
        raise ValueError(f"merged peripheral angle {tail} outside (0, 2*pi)")
    alpha_new = AngleVector(a[: nbar - 1] + (tail,))
    C_new = chain.C[: nbar - 1] + (chain.B[nbar - 3],)
    B_new = chain.B[: nbar - 3]
    return TriangleChain(alpha_new, C_new, B_new)


def chain_to_json(chain):
    """Serialize as {"alpha": [...], "C": [[x,y],...], "B": [[x,y],...]}."""
    return json.dumps(
        {
            "alpha": list(chain.alpha.alpha),
            "C": [[z.real, z.imag] for z in chain.C],
            "B": [[z.real, z.imag] for z in chain.B],
        }
    )


def chain_from_json(text):
    data = json.loads(text)
    alpha = AngleVector(tuple(data["alpha"]))
    pts = []
    for key in ("C", "B"):
        row = []
        for x, y in data[key]:
            if y <= 0.0:
                raise ValueError(f"{key} point ({x}, {y}) not in the upper half plane")
            row.append(complex(x, y))
        pts.append(tuple(row))
    return TriangleChain(alpha, pts[0], pts[1])


def validate_chain(chain, eps_area=EPS_AREA):
    """Residuals of the chain invariants, for test and verify suites.

    Returns a dict with the worst deviations: exterior-vertex interior
    angles from pi - alpha_i/2, shared-vertex angle pairs from
    (pi - beta_i/2, beta_i/2), per-triangle areas from lam * mu_i, and
    the total area from lam / 2.  Degenerate triangles are skipped where
    the angle is undefined.
    """
    n = chain.n
    a = chain.alpha.alpha
    tris = chain.triangles()
    areas = [triangle_area(t) for t in tris]
    coords = extract_coords(chain, eps_area)
    mv = moment_map(chain.alpha, coords.beta)
    ext = 0.0
    # exterior vertices: (triangle, vertex position, alpha index)
    spots = [(0, 0, 0), (0, 1, 1)]
    spots += [(k - 1, 1, k) for k in range(2, n - 2)]
    spots += [(n - 3, 1, n - 2), (n - 3, 2, n - 1)]
    for tk, pos, k in spots:
        if areas[tk] < eps_area:
            continue
        v = tris[tk][pos]
        p, q = (x for j, x in enumerate(tris[tk]) if j != pos)
        ext = max(ext, abs(unsigned_angle(v, p, q) - (math.pi - a[k] / 2.0)))
    shared = 0.0
    for i in range(1, n - 2):
        if areas[i - 1] >= eps_area:
            v1, v2, v3 = tris[i - 1]
            shared = max(
                shared,
                abs(unsigned_angle(v3, v1, v2) - (math.pi - coords.beta[i - 1] / 2.0)),
            )
        if areas[i] >= eps_area:
            v1, v2, v3 = tris[i]
            shared = max(
                shared, abs(unsigned_angle(v1, v2, v3) - coords.beta[i - 1] / 2.0)
            )
    area_res = max(abs(s - mv.lam * m) for s, m in zip(areas, mv.mu))
    total_res = abs(math.fsum(areas) - mv.lam / 2.0)
    return {
        "exterior_angle": ext,
        "shared_angle": shared,
        "triangle_area": area_res,
        "total_area": total_res,
    }
