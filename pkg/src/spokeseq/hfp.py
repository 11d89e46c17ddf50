"""Closed-form spoke-graded homotopy of the constant mod-p Eilenberg-MacLane
object: positive cone, a-power-torsion negative cone, and the localized /
completed variants, with their multiplication.

Positive cone: F_p[a, ul]<us> with |a| = (0,-1), |ul| = (2,-2), |us| = (1,-1).
Negative cone: one F_p per triple (eps, j, k), eps in {0,1}, j,k >= 1,
labelled S^-1 * us^eps * ul^-j * a^-k.  Writing theta for the class with
(eps, j, k) = (1, 1, 1), the negative cone is {theta/x : x in positive cone}
and multiplication is division of labels: g * (theta/x) = theta/(x/g) when g
divides x, else 0.  Products of two negative-cone classes are set to zero
(no target classes exist in the relevant degrees).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .algebra import EXT, INV, POLY, GeneratorSpec, Monomial, Presentation, monomials_in_degree
from .errors import ConfigError
from .grading import SpokeDegree

D = SpokeDegree


class HfpVariant(Enum):
    FULL = "full"
    A_FREE = "a_free"
    A_INVERTED = "a_inverted"
    A_COMPLETED_INVERTED = "a_completed_inverted"
    SPOKE_SUSPENSION = "spoke_suspension"


def positive_cone(p: int, a_kind: str = POLY, ul_kind: str = POLY) -> Presentation:
    return Presentation(
        p,
        [
            GeneratorSpec("a", D(0, -1), a_kind),
            GeneratorSpec("ul", D(2, -2), ul_kind),
            GeneratorSpec("us", D(1, -1), EXT),
        ],
    )


def variant_presentation(p: int, variant: HfpVariant) -> Presentation:
    if variant in (HfpVariant.FULL, HfpVariant.A_FREE, HfpVariant.SPOKE_SUSPENSION):
        return positive_cone(p)
    if variant == HfpVariant.A_INVERTED:
        return positive_cone(p, a_kind=INV)
    if variant == HfpVariant.A_COMPLETED_INVERTED:
        return positive_cone(p, a_kind=INV, ul_kind=INV)
    raise ConfigError(f"unknown variant {variant}")


@dataclass(frozen=True, order=True)
class PosClass:
    """Monomial a^i * ul^j * us^eps of the positive cone."""

    a: int
    ul: int
    us: int

    @property
    def degree(self) -> SpokeDegree:
        return D(0, -1) * self.a + D(2, -2) * self.ul + D(1, -1) * self.us

    def label(self) -> str:
        parts = []
        if self.a:
            parts.append("a" if self.a == 1 else f"a^{self.a}")
        if self.ul:
            parts.append("ul" if self.ul == 1 else f"ul^{self.ul}")
        if self.us:
            parts.append("us")
        return "*".join(parts) if parts else "1"


@dataclass(frozen=True, order=True)
class NegClass:
    """S^-1 * us^eps * ul^-j * a^-k with eps in {0,1}, j, k >= 1."""

    eps: int
    j: int
    k: int

    def __post_init__(self):
        if self.eps not in (0, 1) or self.j < 1 or self.k < 1:
            raise ConfigError(f"bad negative-cone label {self!r}")

    @property
    def degree(self) -> SpokeDegree:
        return (
            D(-1, 0)
            + D(1, -1) * self.eps
            + D(-2, 2) * self.j
            + D(0, 1) * self.k
        )

    def label(self) -> str:
        parts = ["S^-1"]
        if self.eps:
            parts.append("us")
        parts.append(f"ul^-{self.j}")
        parts.append(f"a^-{self.k}")
        return "*".join(parts)

    def as_theta_fraction(self) -> PosClass:
        """The x with self = theta/x."""
        return PosClass(a=self.k - 1, ul=self.j - 1, us=1 - self.eps)


THETA = NegClass(eps=1, j=1, k=1)  # degree (lambda - 2) = (-2, 2)


def pos_class_from_monomial(pres: Presentation, mono: Monomial) -> PosClass:
    return PosClass(
        a=mono[pres.index["a"]], ul=mono[pres.index["ul"]], us=mono[pres.index["us"]]
    )


def negative_basis_in_degree(d: SpokeDegree) -> list[NegClass]:
    """Solve for (eps, j, k); at most one solution per degree."""
    eps = (d.m + 1) % 2
    j2 = eps - 1 - d.m
    if j2 % 2:
        return []
    j = j2 // 2
    k = d.n + eps - 2 * j
    if j >= 1 and k >= 1:
        return [NegClass(eps, j, k)]
    return []


def basis_in_degree(p: int, variant: HfpVariant, d: SpokeDegree) -> list[str]:
    """Complete basis labels of the variant in one degree."""
    if variant == HfpVariant.SPOKE_SUSPENSION:
        shifted = d - D(0, 1)
        main = [f"{lab}*1s" for lab in basis_in_degree(p, HfpVariant.FULL, shifted)]
        tilde = []
        # F_p[ul^{+-1}]{1t_i}: degree j*(2,-2) + (0,1)
        if d.m % 2 == 0 and d.n == 1 - d.m:
            j = d.m // 2
            ul_part = "" if j == 0 else ("ul*" if j == 1 else f"ul^{j}*")
            tilde = [f"{ul_part}1t{i}" for i in range(1, p - 1)]
        return main + tilde
    pres = variant_presentation(p, variant)
    labels = [pres.format_monomial(m) for m in monomials_in_degree(pres, d)]
    if variant == HfpVariant.FULL:
        labels += [c.label() for c in negative_basis_in_degree(d)]
    return labels


def dimension(p: int, variant: HfpVariant, d: SpokeDegree) -> int:
    return len(basis_in_degree(p, variant, d))


def multiply_full(x, y):
    """Product of two full-variant classes; returns a class or None (= zero).

    All structure constants are +1: the unit ambiguity in kappa = a*us is
    fixed to 1, and negative x negative products are 0 by decision.
    """
    if isinstance(x, NegClass) and isinstance(y, NegClass):
        return None
    if isinstance(x, PosClass) and isinstance(y, PosClass):
        if x.us and y.us:
            return None
        return PosClass(x.a + y.a, x.ul + y.ul, x.us + y.us)
    pos, neg = (x, y) if isinstance(x, PosClass) else (y, x)
    frac = neg.as_theta_fraction()
    rem = PosClass(frac.a - pos.a, frac.ul - pos.ul, frac.us - pos.us)
    if rem.a < 0 or rem.ul < 0 or rem.us < 0:
        return None
    return NegClass(eps=1 - rem.us, j=rem.ul + 1, k=rem.a + 1)


def a_torsion_order(neg: NegClass) -> int:
    """Smallest t with a^t * neg = 0; equals the a-exponent k of the label."""
    t = 0
    current = neg
    while current is not None:
        current = multiply_full(PosClass(1, 0, 0), current)
        t += 1
    return t


def variant_map(p: int, source: HfpVariant, target: HfpVariant, x):
    """Localization / completion maps on basis classes.

    Supported pairs: full -> a_free (kills the negative cone),
    a_free -> a_inverted and a_inverted -> a_completed_inverted (inclusions).
    """
    pair = (source, target)
    if pair == (HfpVariant.FULL, HfpVariant.A_FREE):
        if isinstance(x, NegClass):
            return None
        return x
    if pair in (
        (HfpVariant.A_FREE, HfpVariant.A_INVERTED),
        (HfpVariant.A_INVERTED, HfpVariant.A_COMPLETED_INVERTED),
    ):
        if not isinstance(x, PosClass):
            raise ConfigError(f"{source.value} element expected, got {x!r}")
        return x
    raise ConfigError(f"unsupported variant map {source.value} -> {target.value}")


def kappa_class() -> PosClass:
    """kappa = a * us, the degree (1,-2) exterior class of the plane."""
    return PosClass(a=1, ul=0, us=1)
