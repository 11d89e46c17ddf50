"""Finitely presented graded-commutative F_p-algebras.

A presentation is an ordered list of generators, each polynomial,
invertible-polynomial, exterior, or truncated-polynomial.  Monomials are
exponent tuples over that list; elements are homogeneous F_p-linear
combinations of monomials.  Exterior generators sit in odd integer degree
(odd m), everything else in even m, and the commutation sign of two
monomials only counts transpositions of exterior factors.

Presentation text format, one generator per line::

    name : degree : kind[^bound]      e.g.  Nm : 2+4@ : trunc^27

with kind one of poly, inv, ext, trunc^k.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import (
    ConfigError,
    HomogeneityError,
    InvertibilityError,
    WindowIncompleteError,
)
from .grading import SpokeDegree

Monomial = tuple[int, ...]

POLY = "poly"
INV = "inv"
EXT = "ext"
TRUNC = "trunc"


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    degree: SpokeDegree
    kind: str
    bound: int | None = None  # x^bound = 0, for kind == trunc

    def __post_init__(self):
        if self.kind not in (POLY, INV, EXT, TRUNC):
            raise ConfigError(f"unknown generator kind {self.kind!r}")
        if self.kind == TRUNC and (self.bound is None or self.bound < 1):
            raise ConfigError(f"truncated generator {self.name} needs bound >= 1")
        if self.kind != TRUNC and self.bound is not None:
            raise ConfigError(f"generator {self.name}: bound only valid for trunc")
        odd = self.degree.koszul_parity == 1
        if self.kind == EXT and not odd:
            raise ConfigError(
                f"exterior generator {self.name} must have odd parity, degree {self.degree}"
            )
        if self.kind != EXT and odd:
            raise ConfigError(
                f"generator {self.name} of kind {self.kind} must have even parity, "
                f"degree {self.degree}"
            )
        if self.degree == SpokeDegree(0, 0):
            raise ConfigError(f"generator {self.name} may not sit in degree 0+0@")


class Presentation:
    """Ordered generator list with unique names."""

    def __init__(self, p: int, generators: Sequence[GeneratorSpec]):
        self.p = p
        self.generators = tuple(generators)
        self.names = tuple(g.name for g in self.generators)
        if len(set(self.names)) != len(self.names):
            raise ConfigError("generator names must be unique")
        self.index = {name: i for i, name in enumerate(self.names)}
        self.degrees = tuple(g.degree for g in self.generators)
        self.kinds = tuple(g.kind for g in self.generators)
        self.bounds = tuple(g.bound for g in self.generators)
        self._ext = tuple(i for i, g in enumerate(self.generators) if g.kind == EXT)

    def __len__(self) -> int:
        return len(self.generators)

    def generator(self, name: str) -> GeneratorSpec:
        return self.generators[self.index[name]]

    def unit_monomial(self) -> Monomial:
        return (0,) * len(self.generators)

    def monomial(self, **exponents: int) -> Monomial:
        exps = [0] * len(self.generators)
        for name, e in exponents.items():
            if name not in self.index:
                raise ConfigError(f"unknown generator {name!r}")
            exps[self.index[name]] = e
        mono = tuple(exps)
        self.check_monomial(mono)
        return mono

    def check_monomial(self, mono: Monomial) -> None:
        if len(mono) != len(self.generators):
            raise ConfigError("monomial length mismatch")
        for e, g in zip(mono, self.generators):
            if g.kind == EXT and e not in (0, 1):
                raise ConfigError(f"exterior {g.name} exponent {e}")
            if g.kind == TRUNC and not (0 <= e < g.bound):
                raise ConfigError(f"truncated {g.name} exponent {e} not in [0,{g.bound})")
            if g.kind == POLY and e < 0:
                raise ConfigError(f"polynomial {g.name} exponent {e} < 0")

    def degree_of(self, mono: Monomial) -> SpokeDegree:
        m = n = 0
        for e, d in zip(mono, self.degrees):
            if e:
                m += e * d.m
                n += e * d.n
        return SpokeDegree(m, n)

    def parity_of(self, mono: Monomial) -> int:
        return sum(mono[i] for i in self._ext) & 1

    def is_unit_monomial(self, mono: Monomial) -> bool:
        """True iff the monomial is invertible (only inv generators occur)."""
        return all(e == 0 or k == INV for e, k in zip(mono, self.kinds))

    def mul_monomials(self, a: Monomial, b: Monomial) -> tuple[Monomial | None, int]:
        """(product, sign); product None when it vanishes (ext square, trunc overflow)."""
        out = []
        for ea, eb, g in zip(a, b, self.generators):
            e = ea + eb
            if g.kind == EXT and e > 1:
                return None, 0
            if g.kind == TRUNC and e >= g.bound:
                return None, 0
            out.append(e)
        sign = 1
        ext_a = [i for i in self._ext if a[i]]
        ext_b = [i for i in self._ext if b[i]]
        for i in ext_a:
            for j in ext_b:
                if i > j:
                    sign = -sign
        return tuple(out), sign

    def format_monomial(self, mono: Monomial) -> str:
        parts = []
        for name, e in zip(self.names, mono):
            if e == 1:
                parts.append(name)
            elif e:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"

    def format(self) -> str:
        lines = []
        for g in self.generators:
            kind = f"trunc^{g.bound}" if g.kind == TRUNC else g.kind
            lines.append(f"{g.name} : {g.degree.format()} : {kind}")
        return "\n".join(lines) + "\n"


def parse_presentation(text: str, p: int) -> Presentation:
    gens = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [part.strip() for part in line.split(":")]
        if len(parts) != 3:
            raise ConfigError(f"line {lineno}: expected 'name : degree : kind'")
        name, deg_text, kind_text = parts
        degree = SpokeDegree.parse(deg_text)
        if kind_text.startswith("trunc^"):
            gens.append(GeneratorSpec(name, degree, TRUNC, int(kind_text[6:])))
        elif kind_text in (POLY, INV, EXT):
            gens.append(GeneratorSpec(name, degree, kind_text))
        else:
            raise ConfigError(f"line {lineno}: unknown kind {kind_text!r}")
    return Presentation(p, gens)


class Element:
    """Homogeneous linear combination of monomials of one presentation.

    ``degree`` is None exactly for the zero element.  Inhomogeneous sums are
    rejected at construction: every object in this engine is graded, and a
    degree mismatch always means a structural bug upstream.
    """

    __slots__ = ("pres", "degree", "coeffs")

    def __init__(self, pres: Presentation, coeffs: Mapping[Monomial, int]):
        self.pres = pres
        self.degree = None
        self.coeffs = {}
        clean: dict[Monomial, int] = {}
        degree: SpokeDegree | None = None
        for mono, c in coeffs.items():
            c %= pres.p
            if not c:
                continue
            d = pres.degree_of(mono)
            if degree is None:
                degree = d
            elif d != degree:
                raise HomogeneityError(
                    f"mixing degrees {degree} and {d} in one element"
                )
            clean[mono] = c
        self.degree = degree
        self.coeffs = dict(sorted(clean.items()))

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(pres: Presentation) -> "Element":
        return Element(pres, {})

    @staticmethod
    def one(pres: Presentation) -> "Element":
        return Element(pres, {pres.unit_monomial(): 1})

    @staticmethod
    def from_monomial(pres: Presentation, mono: Monomial, coeff: int = 1) -> "Element":
        pres.check_monomial(mono)
        return Element(pres, {mono: coeff})

    @staticmethod
    def generator(pres: Presentation, name: str) -> "Element":
        return Element.from_monomial(pres, pres.monomial(**{name: 1}))

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Element)
            and self.pres is other.pres
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash(tuple(self.coeffs.items()))

    def __add__(self, other: "Element") -> "Element":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        acc = dict(self.coeffs)
        for mono, c in other.coeffs.items():
            acc[mono] = acc.get(mono, 0) + c
        return Element(self.pres, acc)

    def __sub__(self, other: "Element") -> "Element":
        return self + other.scale(-1)

    def scale(self, c: int) -> "Element":
        return Element(self.pres, {m: v * c for m, v in self.coeffs.items()})

    def __mul__(self, other: "Element") -> "Element":
        acc: dict[Monomial, int] = {}
        p = self.pres.p
        for ma, ca in self.coeffs.items():
            for mb, cb in other.coeffs.items():
                mono, sign = self.pres.mul_monomials(ma, mb)
                if mono is None:
                    continue
                acc[mono] = (acc.get(mono, 0) + sign * ca * cb) % p
        return Element(self.pres, acc)

    def __pow__(self, k: int) -> "Element":
        if k < 0:
            return invert(self) ** (-k)
        out = Element.one(self.pres)
        for _ in range(k):
            out = out * self
        return out

    def leading_label(self) -> str:
        if self.is_zero():
            return "0"
        labels = sorted(self.pres.format_monomial(m) for m in self.coeffs)
        return labels[0]

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for mono, c in self.coeffs.items():
            label = self.pres.format_monomial(mono)
            parts.append(label if c == 1 else f"{c}*{label}")
        return " + ".join(parts)


def invert(elt: Element) -> Element:
    """Inverse of a unit: one invertible-monomial term plus nilpotent terms.

    Writes elt = c*u + nu with u an invertible monomial and inverts by the
    geometric series, which must terminate (nu nilpotent via truncation or
    exterior relations).
    """
    pres = elt.pres
    units = [(m, c) for m, c in elt.coeffs.items() if pres.is_unit_monomial(m)]
    if len(units) != 1:
        raise InvertibilityError(
            f"element {elt!r} has {len(units)} invertible terms; need exactly 1"
        )
    (u_mono, c) = units[0]
    u_inv = Element.from_monomial(
        pres, tuple(-e for e in u_mono), pow(c, pres.p - 2, pres.p)
    )
    nu = Element(pres, {m: v for m, v in elt.coeffs.items() if m != u_mono})
    if nu.is_zero():
        return u_inv
    # 1/(c*u + nu) = u_inv * sum_k (-nu*u_inv)^k
    step = (nu * u_inv).scale(-1)
    total = Element.one(pres)
    power = Element.one(pres)
    for _ in range(10_000):
        power = power * step
        if power.is_zero():
            return u_inv * total
        total = total + power
    raise InvertibilityError(f"geometric series for {elt!r} does not terminate")


class GradedMap:
    """Multiplicative map defined on generators; target is any element algebra.

    The target context must provide one(), mul(), invert() and elements with
    a ``degree`` attribute.  Every generator image must be homogeneous of the
    generator's own degree; this check is what catches wrong structure-map
    exponents immediately.
    """

    def __init__(self, source: Presentation, target_ctx, images: Mapping[str, object]):
        self.source = source
        self.target_ctx = target_ctx
        self.images = dict(images)
        for name in source.names:
            if name not in self.images:
                raise ConfigError(f"map missing image of generator {name!r}")
            img = self.images[name]
            want = source.generator(name).degree
            got = img.degree
            if got is not None and got != want:
                raise HomogeneityError(
                    f"image of {name} has degree {got}, generator has {want}"
                )
        self._pow_cache: dict[tuple[str, int], object] = {}
        self._mono_cache: dict[Monomial, object] = {}

    def _generator_power(self, name: str, e: int):
        key = (name, e)
        cached = self._pow_cache.get(key)
        if cached is not None:
            return cached
        ctx = self.target_ctx
        if e < 0:
            base = self._generator_power(name, -1) if e != -1 else ctx.invert(self.images[name])
            if e == -1:
                out = base
            else:
                out = ctx.mul(self._generator_power(name, e + 1), self._generator_power(name, -1))
        elif e == 0:
            out = ctx.one()
        elif e == 1:
            out = self.images[name]
        else:
            half = self._generator_power(name, e // 2)
            out = ctx.mul(half, half)
            if e & 1:
                out = ctx.mul(out, self.images[name])
        self._pow_cache[key] = out
        return out

    def apply_monomial(self, mono: Monomial):
        cached = self._mono_cache.get(mono)
        if cached is not None:
            return cached
        ctx = self.target_ctx
        out = ctx.one()
        for name, e in zip(self.source.names, mono):
            if e:
                out = ctx.mul(out, self._generator_power(name, e))
        self._mono_cache[mono] = out
        return out

    def apply(self, elt: Element):
        ctx = self.target_ctx
        out = ctx.zero()
        for mono, c in elt.coeffs.items():
            out = ctx.add(out, ctx.scale(self.apply_monomial(mono), c))
        return out


class RingContext:
    """Element-algebra interface for a plain presentation."""

    def __init__(self, pres: Presentation):
        self.pres = pres
        self.p = pres.p

    def one(self):
        return Element.one(self.pres)

    def zero(self):
        return Element.zero(self.pres)

    def mul(self, a, b):
        return a * b

    def add(self, a, b):
        return a + b

    def scale(self, a, c):
        return a.scale(c)

    def invert(self, a):
        return invert(a)


# ---------------------------------------------------------------------------
# per-degree monomial enumeration


def monomials_in_degree(
    pres: Presentation,
    degree: SpokeDegree,
    cap: int | Mapping[str, int] | None = None,
) -> list[Monomial]:
    """All monomials of the given degree, exponent-lex ordered.

    Completeness is certified per call.  Exterior and truncated generators
    have finite exponent ranges; ``cap`` may impose extra bounds on
    polynomial generators (int for all, or per-name mapping).  What remains
    must be solvable exactly:

    * invertible generators are solved by linear algebra at the leaves
      (at most two, with independent degrees);
    * uncapped polynomial generators are enumerated with budget pruning,
      which requires a positive functional on their degrees that kills the
      invertible ones.

    A presentation outside those shapes raises WindowIncompleteError rather
    than silently returning a partial basis.
    """
    caps: dict[str, int] = {}
    if isinstance(cap, int):
        caps = {g.name: cap for g in pres.generators if g.kind == POLY}
    elif cap:
        caps = dict(cap)

    finite: list[tuple[int, range]] = []  # (gen index, exponent range)
    free_poly: list[int] = []
    inv: list[int] = []
    for i, g in enumerate(pres.generators):
        if g.kind == EXT:
            finite.append((i, range(2)))
        elif g.kind == TRUNC:
            finite.append((i, range(g.bound)))
        elif g.kind == INV:
            inv.append(i)
        elif g.name in caps:
            finite.append((i, range(caps[g.name] + 1)))
        else:
            free_poly.append(i)

    if len(inv) > 2:
        raise WindowIncompleteError("more than two invertible generators")
    if len(inv) == 2:
        w1, w2 = pres.degrees[inv[0]], pres.degrees[inv[1]]
        if w1.m * w2.n - w1.n * w2.m == 0:
            raise WindowIncompleteError("invertible generators with dependent degrees")
        if free_poly:
            raise WindowIncompleteError(
                "uncapped polynomial generators alongside a rank-2 invertible lattice"
            )

    # Functional L with L(invertible degrees) = 0, used to bound free
    # polynomial exponents; with no invertible generators L is unconstrained
    # and we use both coordinates, m first.
    if free_poly:
        if len(inv) == 0:
            # require m >= 0 on free gens; m = 0 gens must share the sign of n
            zero_m_signs = set()
            for i in free_poly:
                d = pres.degrees[i]
                if d.m < 0:
                    raise WindowIncompleteError(
                        f"cannot bound generator {pres.names[i]} with negative m"
                    )
                if d.m == 0:
                    zero_m_signs.add(1 if d.n > 0 else -1)
            if len(zero_m_signs) > 1:
                raise WindowIncompleteError(
                    "unbounded m=0 generators with opposite spoke signs"
                )
            functional = None
        else:
            w = pres.degrees[inv[0]]
            functional = (w.n, -w.m)  # L(d) = w.n*d.m - w.m*d.n, L(w) = 0
            values = []
            for i in free_poly:
                d = pres.degrees[i]
                values.append(functional[0] * d.m + functional[1] * d.n)
            if any(v == 0 for v in values):
                raise WindowIncompleteError(
                    "free polynomial generator parallel to an invertible one"
                )
            if len({1 if v > 0 else -1 for v in values}) > 1:
                raise WindowIncompleteError(
                    "free polynomial generators on both sides of the invertible line"
                )
            if values[0] < 0:
                functional = (-functional[0], -functional[1])

    results: list[Monomial] = []
    exps = [0] * len(pres.generators)

    def solve_leaf(rm: int, rn: int) -> None:
        if len(inv) == 0:
            if rm == 0 and rn == 0:
                results.append(tuple(exps))
            return
        if len(inv) == 1:
            w = pres.degrees[inv[0]]
            if w.m != 0:
                if rm % w.m:
                    return
                z = rm // w.m
            else:
                if rm != 0 or rn % w.n:
                    return
                z = rn // w.n
            if z * w.m == rm and z * w.n == rn:
                exps[inv[0]] = z
                results.append(tuple(exps))
                exps[inv[0]] = 0
            return
        w1, w2 = pres.degrees[inv[0]], pres.degrees[inv[1]]
        det = w1.m * w2.n - w1.n * w2.m
        z1_num = rm * w2.n - rn * w2.m
        z2_num = w1.m * rn - w1.n * rm
        if z1_num % det or z2_num % det:
            return
        exps[inv[0]] = z1_num // det
        exps[inv[1]] = z2_num // det
        results.append(tuple(exps))
        exps[inv[0]] = exps[inv[1]] = 0

    def enum_free(idx: int, rm: int, rn: int) -> None:
        if idx == len(free_order):
            solve_leaf(rm, rn)
            return
        i = free_order[idx]
        d = pres.degrees[i]
        if len(inv) == 0:
            if d.m > 0:
                ub = rm // d.m
            else:
                if rn * d.n < 0:
                    ub = 0
                elif d.n != 0:
                    ub = abs(rn) // abs(d.n)
                else:  # pragma: no cover - excluded at validation
                    ub = 0
        else:
            lv = functional[0] * d.m + functional[1] * d.n
            budget = functional[0] * rm + functional[1] * rn
            ub = budget // lv if budget >= 0 else -1
        for e in range(max(ub, -1) + 1):
            exps[i] = e
            enum_free(idx + 1, rm - e * d.m, rn - e * d.n)
        exps[i] = 0

    # free gens with larger |m| first prunes fastest
    free_order = sorted(free_poly, key=lambda i: -abs(pres.degrees[i].m))

    # with no invertible generators every generator has m >= 0 (validated
    # above for the free ones; enforce for pruning only when true of all)
    can_prune_m = not inv and all(
        pres.degrees[i].m >= 0 for i, _ in finite
    )

    def enum_finite(idx: int, rm: int, rn: int) -> None:
        if can_prune_m and rm < 0:
            return
        if idx == len(finite):
            enum_free(0, rm, rn)
            return
        i, rng = finite[idx]
        d = pres.degrees[i]
        for e in rng:
            if can_prune_m and d.m > 0 and rm - e * d.m < 0:
                break
            exps[i] = e
            enum_finite(idx + 1, rm - e * d.m, rn - e * d.n)
        exps[i] = 0

    enum_finite(0, degree.m, degree.n)
    results.sort()
    return results


def dimensions_over_window(
    pres: Presentation,
    degrees: Iterable[SpokeDegree],
    cap: int | Mapping[str, int] | None = None,
) -> dict[SpokeDegree, int]:
    return {d: len(monomials_in_degree(pres, d, cap)) for d in degrees}
