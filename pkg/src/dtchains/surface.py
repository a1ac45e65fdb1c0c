"""Combinatorics of the n-punctured sphere.

Presentation: peripheral loops c_1, ..., c_n with the single relation
c_1 c_2 ... c_n = 1.  Curve words are tuples of signed generator indices
(+k for c_k, -k for its inverse), evaluated left to right.

Standard curve families (1 <= i <= n-3):

    b_i = (c_1 ... c_{i+1})^{-1}      pants curves
    d_i = (c_{i+1} c_{i+2})^{-1}
    e_i = (c_1 ... c_i c_{i+2})^{-1}

plus the adjacent pair curves p_j with word c_j c_{j+1} (1 <= j <= n-1),
used by the stratum-clearing twist.  Each labeled curve is separating;
twist_side reports which punctures sit on the side whose generators the
twist conjugates.
"""

from dataclasses import dataclass

_FAMILIES = ("b", "d", "e", "p")


@dataclass(frozen=True)
class SphereTopology:
    """An oriented sphere with n >= 4 punctures."""

    n: int

    def __post_init__(self):
        if self.n < 4:
            raise ValueError(f"need at least 4 punctures, got {self.n}")


@dataclass(frozen=True)
class CurveClass:
    """A labeled simple closed curve on the n-punctured sphere."""

    family: str
    index: int
    n: int

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown curve family {self.family!r}")
        if self.n < 4:
            raise ValueError(f"need at least 4 punctures, got {self.n}")
        hi = self.n - 1 if self.family == "p" else self.n - 3
        if not 1 <= self.index <= hi:
            raise ValueError(
                f"index {self.index} out of range 1..{hi} for family {self.family!r} at n={self.n}"
            )

    @property
    def label(self):
        return f"{self.family}{self.index}"

    @property
    def word(self):
        i = self.index
        if self.family == "b":
            return tuple(range(-(i + 1), 0))  # (-(i+1), ..., -1)
        if self.family == "d":
            return (-(i + 2), -(i + 1))
        if self.family == "e":
            return (-(i + 2),) + tuple(range(-i, 0))
        return (i, i + 1)  # pair curve c_i c_{i+1}

    def __str__(self):
        return self.label


def parse_label(label, n):
    """Inverse of CurveClass.label, e.g. "b3" -> CurveClass("b", 3, n)."""
    label = label.strip()
    if len(label) < 2 or label[0] not in _FAMILIES:
        raise ValueError(f"malformed curve label {label!r}")
    try:
        index = int(label[1:])
    except ValueError:
        raise ValueError(f"malformed curve label {label!r}") from None
    return CurveClass(label[0], index, n)


def standard_curves(n):
    """The three standard families, as {"b": [...], "d": [...], "e": [...]}."""
    if n < 4:
        raise ValueError(f"need at least 4 punctures, got {n}")
    rng = range(1, n - 2)
    return {
        "b": [CurveClass("b", i, n) for i in rng],
        "d": [CurveClass("d", i, n) for i in rng],
        "e": [CurveClass("e", i, n) for i in rng],
    }


def pair_curve(j, n):
    """The curve c_j c_{j+1} encircling the adjacent punctures j, j+1."""
    return CurveClass("p", j, n)


def twist_side(curve, n=None):
    """Partition of {1..n} into (inside, outside) for a labeled curve.

    "Inside" is the side whose peripheral generators the twist along the
    curve conjugates.
    """
    if n is not None and n != curve.n:
        raise ValueError(f"curve lives on n={curve.n}, not n={n}")
    n = curve.n
    i = curve.index
    if curve.family == "b":
        inside = tuple(range(1, i + 2))
    elif curve.family == "d":
        inside = (i + 1, i + 2)
    elif curve.family == "e":
        inside = tuple(range(1, i + 1)) + (i + 2,)
    else:
        inside = (i, i + 1)
    outside = tuple(k for k in range(1, n + 1) if k not in inside)
    return inside, outside


@dataclass(frozen=True)
class PantsDecomposition:
    """The standard pants decomposition: the chain of curves b_1..b_{n-3}."""

    curves: tuple

    @property
    def n(self):
        return self.curves[0].n


def standard_pants(n):
    return PantsDecomposition(tuple(CurveClass("b", i, n) for i in range(1, n - 2)))
