"""Representations of the punctured-sphere group into PSL(2, R).

A representation in the totally elliptic relative component is stored by
its generator images rho(c_1), ..., rho(c_n): elliptic elements rotating
counterclockwise by alpha_i about the chain vertices C_i, with product
equal to the identity in PSL(2, R).  Simple closed curves are evaluated
through the word tuples of surface.CurveClass; their rotation angles are
the conjugation-invariant observables everything downstream (twists,
flows, brackets, fingerprints) is expressed in.
"""

import json
import math

from .chain import (
    EPS_AREA,
    ActionAngleCoords,
    AngleVector,
    TriangleChain,
    _triangle_half_angles,
    canonicalize,
    moment_map,
)
from .hyperbolic import (
    IDENTITY,
    TAU,
    Isometry,
    classify,
    rotation_about,
    side_from_angles,
)
from .surface import CurveClass, standard_curves

EPS_REL = 1e-9


class Representation:
    """Generator images rho(c_1..c_n) together with the peripheral angles."""

    def __init__(self, alpha, gens):
        if not isinstance(alpha, AngleVector):
            alpha = AngleVector(tuple(alpha))
        gens = tuple(gens)
        if len(gens) != alpha.n:
            raise ValueError(f"expected {alpha.n} generators, got {len(gens)}")
        self.alpha = alpha
        self.gens = gens

    @property
    def n(self):
        return self.alpha.n

    def product(self):
        out = IDENTITY
        for g in self.gens:
            out = out * g
        return out

    def product_residual(self):
        """Entrywise distance of rho(c_1)...rho(c_n) from +-identity."""
        return self.product().dist_to(IDENTITY)

    def __repr__(self):
        return f"Representation(n={self.n})"


def chain_to_rep(chain, eps=EPS_REL):
    """rho(c_i) = ccw rotation by alpha_i about C_i; checks the relation."""
    gens = tuple(
        rotation_about(p, a) for p, a in zip(chain.C, chain.alpha.alpha)
    )
    rep = Representation(chain.alpha, gens)
    res = rep.product_residual()
    if res > eps:
        raise ValueError(f"generator product off identity by {res}")
    return rep


def rep_to_chain(rep, eps=EPS_REL, angle_tol=1e-6):
    """Fixed points of the generators and of the b_i words, reframed.

    C_i is the fixed point of rho(c_i) and B_i the fixed point of
    rho(b_i) = (rho(c_1)...rho(c_{i+1}))^{-1}.  Raises if any generator
    or prefix product fails to be elliptic, or if a generator angle
    drifts from alpha_i.  Long twist iterations pass loose tolerances
    here (conjugation preserves both invariants exactly, so any drift is
    float noise that the rebuild repairs).
    """
    n = rep.n
    C = []
    for k, g in enumerate(rep.gens):
        cls = classify(g)
        if cls.kind != "elliptic":
            raise ValueError(f"generator c_{k + 1} is {cls.kind}, not elliptic")
        d = abs(cls.angle - rep.alpha.alpha[k]) % TAU
        if min(d, TAU - d) > angle_tol:
            raise ValueError(
                f"generator c_{k + 1} rotates by {cls.angle}, expected alpha = "
                f"{rep.alpha.alpha[k]}"
            )
        C.append(cls.fixed_point)
    B = []
    prefix = rep.gens[0]
    for i in range(1, n - 2):
        prefix = prefix * rep.gens[i]
        cls = classify(prefix)
        if cls.kind != "elliptic":
            raise ValueError(f"prefix product c_1..c_{i + 1} is {cls.kind}")
        B.append(cls.fixed_point)
    res = rep.product_residual()
    if res > eps:
        raise ValueError(f"generator product off identity by {res}")
    return canonicalize(TriangleChain(rep.alpha, tuple(C), tuple(B)))


def evaluate_word(rep, word):
    """Product of generator letters: k means rho(c_k), -k its inverse."""
    out = IDENTITY
    for letter in word:
        if letter == 0 or abs(letter) > rep.n:
            raise ValueError(f"letter {letter} out of range for n = {rep.n}")
        g = rep.gens[abs(letter) - 1]
        out = out * (g.inverse() if letter < 0 else g)
    return out


def angle_function(rep, curve):
    """Rotation angle of the curve's image; raises if not elliptic."""
    word = curve.word if isinstance(curve, CurveClass) else tuple(curve)
    cls = classify(evaluate_word(rep, word))
    if cls.kind != "elliptic":
        label = curve.label if isinstance(curve, CurveClass) else str(word)
        raise ValueError(f"image of {label} is {cls.kind}, not elliptic")
    return cls.angle


def fingerprint(rep, curves=None, quantum=1e-6):
    """Quantized angle vector over a curve system, as a stable string.

    Defaults to the standard b, d, e curves.  Angles are binned to the
    given quantum; quantum = inf collapses everything to one bucket.
    """
    if curves is None:
        families = standard_curves(rep.n)
        curves = families["b"] + families["d"] + families["e"]
    parts = []
    for c in curves:
        theta = angle_function(rep, c)
        q = 0 if math.isinf(quantum) else round(theta / quantum)
        parts.append(f"{c.label}:{q}")
    return "|".join(parts)


def conjugate(rep, g):
    """The isometry-equivalent representation g rho(.) g^{-1}."""
    gi = g.inverse()
    return Representation(rep.alpha, tuple(g * h * gi for h in rep.gens))


def _chain_side(alpha, beta, k, which):
    """Side lengths of chain triangle k from the angle data alone.

    which = "12", "13" or "23" picks the pair of vertices in the
    (pivot, exterior, far) order used throughout.
    """
    t1, t2, t3 = _triangle_half_angles(alpha, beta, k)
    if which == "12":
        return side_from_angles(t1, t2, t3)
    if which == "13":
        return side_from_angles(t1, t3, t2)
    return side_from_angles(t2, t3, t1)


def delta_parts(alpha, coords, i):
    """Coefficients (k1, k2) with cos(delta_i/2) = cos(gamma_i) k1 + k2."""
    if not isinstance(alpha, AngleVector):
        alpha = AngleVector(tuple(alpha))
    a = alpha.alpha
    beta = coords.beta
    # d(C_{i+1}, B_i) is a side of triangle i, d(C_{i+2}, B_i) of triangle i+1
    r = _chain_side(alpha, beta, i, "23")
    s = _chain_side(alpha, beta, i + 1, "12")
    h1, h2 = a[i] / 2.0, a[i + 1] / 2.0
    k1 = math.sin(h1) * math.sin(h2) * math.sinh(r) * math.sinh(s)
    k2 = math.cos(h1) * math.cos(h2) - math.sin(h1) * math.sin(h2) * math.cosh(
        r
    ) * math.cosh(s)
    return k1, k2


def delta_closed_form(alpha, coords, i):
    """Angle of rho(d_i) predicted from the coordinates:

    cos(delta_i/2) = cos(gamma_i) k1 + k2 (both neighbours regular).
    """
    k1, k2 = delta_parts(alpha, coords, i)
    if i not in coords.gamma:
        raise ValueError(f"gamma[{i}] undefined: delta closed form needs it")
    x = math.cos(coords.gamma[i]) * k1 + k2
    return 2.0 * math.acos(max(-1.0, min(1.0, x)))


def epsilon_parts(alpha, coords, i):
    """Coefficients (k1, k2) with cos(eps_i/2) = cos(beta_i/2 - gamma_i) k1 + k2."""
    if not isinstance(alpha, AngleVector):
        alpha = AngleVector(tuple(alpha))
    a = alpha.alpha
    beta = coords.beta
    # half-angle at B_{i-1} seen from triangle i; beta_0 = 2pi - alpha_1
    prev = beta[i - 2] / 2.0 if i >= 2 else math.pi - a[0] / 2.0
    r = _chain_side(alpha, beta, i, "13")  # d(B_{i-1}, B_i), B_0 = C_1
    s = _chain_side(alpha, beta, i + 1, "12")  # d(C_{i+2}, B_i)
    h2 = a[i + 1] / 2.0
    k1 = -math.sin(prev) * math.sin(h2) * math.sinh(r) * math.sinh(s)
    k2 = -math.cos(prev) * math.cos(h2) - math.sin(prev) * math.sin(h2) * math.cosh(
        r
    ) * math.cosh(s)
    return k1, k2


def epsilon_closed_form(alpha, coords, i):
    k1, k2 = epsilon_parts(alpha, coords, i)
    if i not in coords.gamma:
        raise ValueError(f"gamma[{i}] undefined: epsilon closed form needs it")
    x = math.cos(coords.beta[i - 1] / 2.0 - coords.gamma[i]) * k1 + k2
    return 2.0 * math.acos(max(-1.0, min(1.0, x)))


def restrict_rep(rep, nbar, eps=1e-6):
    """Merge the last n - nbar + 1 generators into one.

    Defined where the trailing moment values vanish: the merged element
    rho(c_nbar ... c_n) must be elliptic with rotation angle
    alpha_nbar + ... + alpha_n - 2pi(n - nbar).
    """
    n = rep.n
    if not 4 <= nbar < n:
        raise ValueError(f"nbar = {nbar} out of range 4..{n - 1}")
    tail = IDENTITY
    for g in rep.gens[nbar - 1:]:
        tail = tail * g
    expected = math.fsum(rep.alpha.alpha[nbar - 1:]) - TAU / 2.0 * (n - nbar) * 2.0
    cls = classify(tail)
    if cls.kind != "elliptic":
        raise ValueError(f"merged tail is {cls.kind}: point not degenerate enough")
    d = abs(cls.angle - expected) % TAU
    if min(d, TAU - d) > eps:
        raise ValueError(
            f"tail rotates by {cls.angle}, expected {expected}: trailing moment "
            f"values do not vanish"
        )
    alpha_new = AngleVector(rep.alpha.alpha[: nbar - 1] + (expected,))
    return Representation(alpha_new, rep.gens[: nbar - 1] + (tail,))


def rep_to_json(rep):
    return json.dumps(
        {
            "alpha": list(rep.alpha.alpha),
            "gens": [[g.a, g.b, g.c, g.d] for g in rep.gens],
        }
    )


def rep_from_json(text):
    data = json.loads(text)
    gens = tuple(Isometry(*row) for row in data["gens"])
    return Representation(AngleVector(tuple(data["alpha"])), gens)
