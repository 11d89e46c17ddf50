"""Cobar complexes and Ext tables for comodules over Hopf algebras/algebroids.

Two independent computations of the same Ext groups live here.

* build_cobar / ext_dimensions: the literal normalized (reduced) cobar
  complex M (x) Gbar^(x)s with the alternating-face differential.  Every
  built slice is validated d o d = 0 on the nose.  Completely general, but
  the slice dimensions grow like |Gbar|^s once the comodule has monomials
  in every low-virtual-dimension degree, so it is the small-window oracle.

* resolution_ext_table: for a finite primitively generated Hopf algebra
  (exterior and p-power-truncated polynomial primitives), comodules are
  modules over the dual algebra, a tensor product of one exterior and
  several height-one truncated polynomial lines.  The explicit periodic
  resolution of F_p over each line tensors to a free resolution whose
  cochain complex has one comodule slot per "z^k x_E x'_J" generator
  monomial: polynomially many columns instead of exponentially many.
  Also validated d o d = 0 and cross-checked against the literal cobar.

Ext tables are keyed by (cohomological degree s, total degree); the internal
degree is total + (s, 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import fp
from .algebra import EXT, INV, TRUNC, Element, Monomial, Presentation, monomials_in_degree
from .errors import BookkeepingError, CompositionError, ConfigError, WindowIncompleteError
from .fp import SparseMatFp
from .grading import DegreeWindow, SpokeDegree
from .hopf import Comodule, HopfAlgebroid, TensorKey

D = SpokeDegree

BasisIndex = tuple[Monomial, tuple[Monomial, ...]]  # (comodule monomial, bar word)


def _is_unit(mono: Monomial) -> bool:
    return not any(mono)


# ---------------------------------------------------------------------------
# bar-word enumeration


def _gamma_bar_candidates(H: HopfAlgebroid, max_m: int) -> list[Monomial]:
    """Non-unit monomials of the coaugmentation coideal, as left-base-module
    basis words (non-base generators only)."""
    total = H.total
    base_names = set(H.base.names)
    free_idx = [i for i, name in enumerate(total.names) if name not in base_names]
    if not free_idx:
        raise ConfigError("total ring has no coideal generators")
    ranges = []
    finite = True
    for i in free_idx:
        g = total.generators[i]
        if g.kind == EXT:
            ranges.append((i, 2))
        elif g.kind == TRUNC:
            ranges.append((i, g.bound))
        else:
            if g.degree.m < 1:
                raise WindowIncompleteError(
                    f"cannot bound coideal generator {g.name} with m = {g.degree.m}"
                )
            finite = False
            ranges.append((i, max(0, max_m // g.degree.m) + 1))
    out: list[Monomial] = []
    exps = [0] * len(total)

    def rec(k: int, used_m: int):
        if k == len(ranges):
            mono = tuple(exps)
            if not _is_unit(mono):
                out.append(mono)
            return
        i, bound = ranges[k]
        gm = total.degrees[i].m
        for e in range(bound):
            if not finite and used_m + e * gm > max_m:
                break
            exps[i] = e
            rec(k + 1, used_m + e * gm)
        exps[i] = 0

    rec(0, 0)
    out.sort()
    return out


@dataclass
class CobarComplex:
    """Per internal degree, the ladder C^0 -> C^1 -> ... with differentials."""

    hopf: HopfAlgebroid
    comodule: Comodule
    window: DegreeWindow
    s_cap: int
    bases: dict[tuple[SpokeDegree, int], list[BasisIndex]]
    diffs: dict[tuple[SpokeDegree, int], SparseMatFp]
    weights: dict[tuple[SpokeDegree, int], list[int]] | None = None

    def basis_labels(self, internal: SpokeDegree, s: int) -> list[str]:
        return [
            format_basis_index(self.comodule.module, self.hopf.total, idx)
            for idx in self.bases.get((internal, s), [])
        ]


def format_basis_index(mpres: Presentation, gpres: Presentation, idx: BasisIndex) -> str:
    m_mono, word = idx
    m_label = mpres.format_monomial(m_mono)
    if not word:
        return m_label
    inner = "|".join(gpres.format_monomial(b) for b in word)
    return f"{m_label}[{inner}]"


def build_cobar(
    H: HopfAlgebroid,
    comodule: Comodule,
    window: DegreeWindow,
    s_cap: int | None = None,
    weight_fn: Callable[[Monomial], int] | None = None,
    validate: bool = True,
) -> CobarComplex:
    """Enumerate slices and differentials for all total degrees in the window.

    Homology at cohomological degree s needs C^(s+1), so slices run to
    window.s_max + 1.  weight_fn assigns a filtration weight to coideal
    monomials; when given, it must be preserved by the differential (checked)
    and per-weight homology becomes available.
    """
    s_cap = window.s_max if s_cap is None else s_cap
    M = comodule.module
    total = H.total

    internals: set[SpokeDegree] = set()
    for d in window.degrees():
        for s in range(s_cap + 1):
            internals.add(d + D(s, 0))
    max_m = max(i.m for i in internals)

    candidates = _gamma_bar_candidates(H, max_m)
    by_degree: dict[SpokeDegree, list[Monomial]] = {}
    for mono in candidates:
        by_degree.setdefault(total.degree_of(mono), []).append(mono)
    bar_degrees = sorted(by_degree, key=lambda d: (d.m, d.n))
    min_bar_m = min((d.m for d in bar_degrees), default=0)

    # pruning: when every module monomial has m >= 0 (no inverted generators
    # with negative m reach), bar words cannot overspend the m budget
    m_nonneg = all(g.kind != INV and g.degree.m >= 0 for g in M.generators)

    def module_monos(d: SpokeDegree) -> list[Monomial]:
        return monomials_in_degree(M, d)

    bases: dict[tuple[SpokeDegree, int], list[BasisIndex]] = {}

    def enumerate_slice(internal: SpokeDegree, s: int) -> list[BasisIndex]:
        out: list[BasisIndex] = []
        word: list[Monomial] = []

        def rec(slots_left: int, remaining: SpokeDegree):
            if slots_left == 0:
                for m_mono in module_monos(remaining):
                    out.append((m_mono, tuple(word)))
                return
            for bd in bar_degrees:
                rest_m = remaining.m - bd.m
                if m_nonneg and rest_m - (slots_left - 1) * min_bar_m < 0:
                    continue
                for b in by_degree[bd]:
                    word.append(b)
                    rec(slots_left - 1, remaining - bd)
                    word.pop()

        rec(s, internal)
        out.sort()
        return out

    for internal in sorted(internals, key=lambda d: (d.m, d.n)):
        for s in range(s_cap + 2):
            bases[(internal, s)] = enumerate_slice(internal, s)

    weights = None
    if weight_fn is not None:
        weights = {
            key: [sum(weight_fn(b) for b in word) for (_, word) in basis]
            for key, basis in bases.items()
        }

    diffs: dict[tuple[SpokeDegree, int], SparseMatFp] = {}
    p = H.p
    for internal in sorted(internals, key=lambda d: (d.m, d.n)):
        for s in range(s_cap + 1):
            src = bases[(internal, s)]
            dst = bases[(internal, s + 1)]
            dst_index = {idx: i for i, idx in enumerate(dst)}
            ctx = H.tensor_power_of((M,) + (total,) * (s + 1))
            columns: list[dict[int, int]] = []
            for (m_mono, word) in src:
                raw: dict[TensorKey, int] = {}
                psi = comodule.psi.apply_monomial(m_mono)
                for key, c in psi.coeffs.items():
                    new_key = (key[0], key[1]) + word
                    raw[new_key] = raw.get(new_key, 0) + c
                for i, b in enumerate(word, start=1):
                    sign = -1 if i % 2 else 1
                    image = H.delta.apply_monomial(b)
                    for key, c in image.coeffs.items():
                        new_key = (
                            (m_mono,) + word[: i - 1] + (key[0], key[1]) + word[i:]
                        )
                        raw[new_key] = raw.get(new_key, 0) + sign * c
                col: dict[int, int] = {}
                for key, c in ctx.element(raw).coeffs.items():
                    if any(_is_unit(b) for b in key[1:]):
                        continue  # degenerate part of the normalized complex
                    row = dst_index.get((key[0], key[1:]))
                    if row is None:
                        raise BookkeepingError(
                            f"cobar image leaves the enumerated slice at {internal}, s={s}"
                        )
                    col[row] = c
                columns.append(col)
            diffs[(internal, s)] = SparseMatFp.from_columns(columns, len(dst), p)

    complex_ = CobarComplex(H, comodule, window, s_cap, bases, diffs, weights)
    if validate:
        validate_dsquare(complex_)
    if weights is not None:
        _validate_weight_preservation(complex_)
    return complex_


def validate_dsquare(cx: CobarComplex) -> None:
    """Full d o d = 0 check on every composable pair of built differentials."""
    for (internal, s), d_low in cx.diffs.items():
        d_high = cx.diffs.get((internal, s + 1))
        if d_high is None:
            continue
        if not d_high.matmul(d_low).is_zero():
            raise CompositionError(
                f"cobar d^2 != 0 at internal {internal}, s={s}"
            )


def _validate_weight_preservation(cx: CobarComplex) -> None:
    for (internal, s), mat in cx.diffs.items():
        src_w = cx.weights[(internal, s)]
        dst_w = cx.weights[(internal, s + 1)]
        for (i, j), _ in mat.entries.items():
            if dst_w[i] != src_w[j]:
                raise BookkeepingError(
                    f"filtration weight not preserved at {internal}, s={s}"
                )


@dataclass
class ExtTable:
    """(s, total degree) -> (dimension, representative labels)."""

    entries: dict[tuple[int, SpokeDegree], tuple[int, tuple[str, ...]]]
    meta: dict = field(default_factory=dict)

    def dim(self, s: int, total: SpokeDegree) -> int:
        return self.entries.get((s, total), (0, ()))[0]

    def dims(self) -> dict[tuple[int, SpokeDegree], int]:
        return {k: v[0] for k, v in self.entries.items() if v[0]}

    def format(self) -> str:
        lines = []
        for (s, total) in sorted(self.entries, key=lambda k: (k[0], k[1].m, k[1].n)):
            dim, labels = self.entries[(s, total)]
            if not dim:
                continue
            lines.append(f"{s} | {total.format()} | {dim} | {' '.join(labels)}")
        return "\n".join(lines) + "\n"


def ext_dimensions(cx: CobarComplex, with_reps: bool = True) -> ExtTable:
    """Cohomology of the cobar ladders, reported per (s, total degree)."""
    entries: dict[tuple[int, SpokeDegree], tuple[int, tuple[str, ...]]] = {}
    M = cx.comodule.module
    G = cx.hopf.total
    for total in cx.window.degrees():
        for s in range(cx.s_cap + 1):
            internal = total + D(s, 0)
            d_out = cx.diffs[(internal, s)]
            if s == 0:
                d_in = SparseMatFp.zero(d_out.cols, 0, cx.hopf.p)
            else:
                d_in = cx.diffs[(internal, s - 1)]
            if with_reps:
                dim, reps = fp.quotient_dimension(d_in, d_out, with_basis=True)
                basis = cx.bases[(internal, s)]
                labels = tuple(
                    _leading_label(vec, basis, M, G) for vec in reps
                )
            else:
                dim = fp.quotient_dimension(d_in, d_out)
                labels = ()
            if dim:
                entries[(s, total)] = (dim, labels)
    return ExtTable(entries, meta={"route": "cobar"})


def _leading_label(vec, basis, mpres, gpres) -> str:
    labelled = [
        (format_basis_index(mpres, gpres, basis[i]), c)
        for i, c in enumerate(vec)
        if c
    ]
    labelled.sort()
    return labelled[0][0]


def ext0_primitives(comodule: Comodule, degrees: Sequence[SpokeDegree]) -> dict[SpokeDegree, int]:
    """Direct primitive count {m : psi(m) = m (x) 1} per degree."""
    M = comodule.module
    p = M.p
    out: dict[SpokeDegree, int] = {}
    for d in degrees:
        monos = monomials_in_degree(M, d)
        if not monos:
            continue
        columns = []
        row_index: dict = {}
        for mono in monos:
            img = comodule.psi.apply_monomial(mono)
            col = {}
            for key, c in img.coeffs.items():
                if _is_unit(key[1]) and key[0] == mono:
                    c = c - 1  # subtract m (x) 1
                if c % p:
                    row = row_index.setdefault(key, len(row_index))
                    col[row] = c % p
            columns.append(col)
        mat = SparseMatFp.from_columns(columns, max(len(row_index), 1), p)
        out[d] = len(fp.kernel_basis(mat))
    return out


# ---------------------------------------------------------------------------
# dual-algebra resolution route


@dataclass(frozen=True)
class Strand:
    """One periodic line of the free resolution over the dual algebra.

    kind "e": dual of an exterior primitive; states k >= 0 and every step
    applies the extraction operator for pi once (z-line, polynomial in Ext).
    kind "y": dual of a height-one truncated polynomial primitive pi; states
    (eps, j) with eps in {0,1}, steps alternate one extraction
    (eps 0 -> 1, the x-class) and p-1 extractions (eps 1 -> 0, j -> j+1,
    the x'-class).
    """

    kind: str
    pi: Monomial
    degree: SpokeDegree  # degree of pi
    weight: int  # filtration weight of pi
    label: str
    prime_label: str = ""
    height: int = 0  # p for y-strands

    def state_s(self, comp) -> int:
        return comp if self.kind == "e" else comp[0] + 2 * comp[1]

    def state_f(self, comp) -> int:
        if self.kind == "e":
            return comp * self.weight
        eps, j = comp
        return (eps + j * self.height) * self.weight

    def state_degree(self, comp) -> SpokeDegree:
        if self.kind == "e":
            return self.degree * comp
        eps, j = comp
        return self.degree * (eps + j * self.height)

    def state_label(self, comp) -> list[str]:
        if self.kind == "e":
            if comp == 0:
                return []
            return [self.label if comp == 1 else f"{self.label}^{comp}"]
        eps, j = comp
        parts = []
        if eps:
            parts.append(self.label)
        if j:
            parts.append(self.prime_label if j == 1 else f"{self.prime_label}^{j}")
        return parts


GenState = tuple


@dataclass
class ResolutionGens:
    strands: tuple[Strand, ...]

    def s_of(self, state: GenState) -> int:
        return sum(st.state_s(c) for st, c in zip(self.strands, state))

    def f_of(self, state: GenState) -> int:
        return sum(st.state_f(c) for st, c in zip(self.strands, state))

    def degree_of(self, state: GenState) -> SpokeDegree:
        total = D(0, 0)
        for st, c in zip(self.strands, state):
            total = total + st.state_degree(c)
        return total

    def label_of(self, state: GenState) -> str:
        parts = []
        for st, c in zip(self.strands, state):
            parts.extend(st.state_label(c))
        return "*".join(parts) if parts else "1"

    def enumerate(self, s_cap: int) -> list[GenState]:
        states: list[GenState] = []

        def rec(i: int, acc: list, s_used: int):
            if i == len(self.strands):
                states.append(tuple(acc))
                return
            st = self.strands[i]
            if st.kind == "e":
                k = 0
                while s_used + k <= s_cap:
                    acc.append(k)
                    rec(i + 1, acc, s_used + k)
                    acc.pop()
                    k += 1
            else:
                j = 0
                while s_used + 2 * j <= s_cap:
                    for eps in (0, 1):
                        if s_used + eps + 2 * j <= s_cap:
                            acc.append((eps, j))
                            rec(i + 1, acc, s_used + eps + 2 * j)
                            acc.pop()
                    j += 1

        rec(0, [], 0)
        states.sort(key=lambda st: (self.s_of(st), st))
        return states

    def steps(self, state: GenState):
        """(strand index, new state, fold) per strand able to move up."""
        out = []
        for i, (st, c) in enumerate(zip(self.strands, state)):
            if st.kind == "e":
                new = state[:i] + (c + 1,) + state[i + 1 :]
                out.append((i, new, 1))
            else:
                eps, j = c
                if eps == 0:
                    new = state[:i] + ((1, j),) + state[i + 1 :]
                    out.append((i, new, 1))
                else:
                    new = state[:i] + ((0, j + 1),) + state[i + 1 :]
                    out.append((i, new, st.height - 1))
        return out


def _p_power_height(bound: int, p: int) -> int:
    n = 0
    while bound > 1:
        if bound % p:
            raise ConfigError(f"truncation bound {bound} is not a power of {p}")
        bound //= p
        n += 1
    return n


def resolution_strands(
    H: HopfAlgebroid, weight_fn: Callable[[Monomial], int] | None = None
) -> ResolutionGens:
    """Strand data for a finite primitively generated Hopf algebra.

    Exterior primitives give z-lines; a truncated polynomial primitive of
    bound p^n splits into n digit lines (the coalgebra is the tensor of the
    digit coalgebras, binomials factoring digit-wise mod p), labelled
    x0..x{n-1} / xp0..xp{n-1}.
    """
    if not H.is_hopf_algebra:
        raise ConfigError("resolution route needs a Hopf algebra over F_p")
    p = H.p
    strands: list[Strand] = []
    e_count = 0
    y_count = 0
    unit = H.total.unit_monomial()
    for g in H.total.generators:
        mono = H.total.monomial(**{g.name: 1})
        want = {(mono, unit): 1, (unit, mono): 1}
        if H.delta.apply_monomial(mono).coeffs != want:
            raise ConfigError(f"generator {g.name} is not primitive")
        if g.kind == EXT:
            label = "z" if e_count == 0 else f"z{e_count}"
            w = weight_fn(mono) if weight_fn else 1
            strands.append(Strand("e", mono, g.degree, w, label))
            e_count += 1
        elif g.kind == TRUNC:
            height = _p_power_height(g.bound, p)
            for t in range(height):
                pim = H.total.monomial(**{g.name: p**t})
                w = weight_fn(pim) if weight_fn else 1
                strands.append(
                    Strand(
                        "y",
                        pim,
                        g.degree * (p**t),
                        w,
                        f"x{y_count}",
                        f"xp{y_count}",
                        height=p,
                    )
                )
                y_count += 1
        else:
            raise ConfigError(f"unsupported coalgebra generator kind {g.kind}")
    return ResolutionGens(tuple(strands))


class DualOperators:
    """Extraction operators on a comodule: for a primitive monomial pi,
    op_pi(m) = the coefficient of pi in psi(m)."""

    def __init__(self, comodule: Comodule):
        self.comodule = comodule
        self.module = comodule.module
        self._cache: dict[tuple[Monomial, Monomial], Element] = {}

    def apply(self, pi: Monomial, m_mono: Monomial) -> Element:
        key = (pi, m_mono)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        img = self.comodule.psi.apply_monomial(m_mono)
        raw = {
            k[0]: c for k, c in img.coeffs.items() if k[1] == pi
        }
        out = Element(self.module, raw)
        self._cache[key] = out
        return out

    def apply_fold(self, pi: Monomial, m_mono: Monomial, fold: int) -> Element:
        current = Element.from_monomial(self.module, m_mono)
        for _ in range(fold):
            acc = Element.zero(self.module)
            for mono, c in current.coeffs.items():
                acc = acc + self.apply(pi, mono).scale(c)
            current = acc
        return current


@dataclass
class ResolutionComplex:
    """Cochain complex Hom(resolution, M): one comodule slot per generator."""

    hopf: HopfAlgebroid
    comodule: Comodule
    window: DegreeWindow
    s_cap: int
    gens: ResolutionGens
    bases: dict[tuple[SpokeDegree, int], list[tuple[Monomial, GenState]]]
    diffs: dict[tuple[SpokeDegree, int], SparseMatFp]

    def basis_labels(self, internal: SpokeDegree, s: int) -> list[str]:
        out = []
        for m_mono, state in self.bases.get((internal, s), []):
            m_label = self.comodule.module.format_monomial(m_mono)
            g_label = self.gens.label_of(state)
            if g_label == "1":
                out.append(m_label)
            elif m_label == "1":
                out.append(g_label)
            else:
                out.append(f"{m_label}*{g_label}")
        return out


def build_resolution_complex(
    H: HopfAlgebroid,
    comodule: Comodule,
    window: DegreeWindow,
    s_cap: int | None = None,
    validate: bool = True,
) -> ResolutionComplex:
    s_cap = window.s_max if s_cap is None else s_cap
    gens = resolution_strands(H)
    M = comodule.module
    ops = DualOperators(comodule)
    p = H.p

    states = gens.enumerate(s_cap + 1)
    by_s: dict[int, list[GenState]] = {}
    for st in states:
        by_s.setdefault(gens.s_of(st), []).append(st)

    internals: set[SpokeDegree] = set()
    for d in window.degrees():
        for s in range(s_cap + 1):
            internals.add(d + D(s, 0))

    bases: dict[tuple[SpokeDegree, int], list[tuple[Monomial, GenState]]] = {}
    for internal in sorted(internals, key=lambda d: (d.m, d.n)):
        for s in range(s_cap + 2):
            basis = []
            for state in by_s.get(s, []):
                rem = internal - gens.degree_of(state)
                for m_mono in monomials_in_degree(M, rem):
                    basis.append((m_mono, state))
            basis.sort(key=lambda idx: (idx[1], idx[0]))
            bases[(internal, s)] = basis

    diffs: dict[tuple[SpokeDegree, int], SparseMatFp] = {}
    for internal in sorted(internals, key=lambda d: (d.m, d.n)):
        for s in range(s_cap + 1):
            src = bases[(internal, s)]
            dst = bases[(internal, s + 1)]
            dst_index = {idx: i for i, idx in enumerate(dst)}
            columns = []
            for m_mono, state in src:
                col: dict[int, int] = {}
                for strand_i, new_state, fold in gens.steps(state):
                    # sign: parity of the cohomological degree left of the strand
                    prefix = sum(
                        gens.strands[i].state_s(state[i]) for i in range(strand_i)
                    )
                    sign = -1 if prefix % 2 else 1
                    image = ops.apply_fold(gens.strands[strand_i].pi, m_mono, fold)
                    for mono, c in image.coeffs.items():
                        row = dst_index.get((mono, new_state))
                        if row is None:
                            raise BookkeepingError(
                                f"resolution image leaves slice at {internal}, s={s}"
                            )
                        col[row] = (col.get(row, 0) + sign * c) % p
                columns.append({k: v for k, v in col.items() if v})
            diffs[(internal, s)] = SparseMatFp.from_columns(columns, len(dst), p)

    cx = ResolutionComplex(H, comodule, window, s_cap, gens, bases, diffs)
    if validate:
        for (internal, s), d_low in cx.diffs.items():
            d_high = cx.diffs.get((internal, s + 1))
            if d_high is not None and not d_high.matmul(d_low).is_zero():
                raise CompositionError(
                    f"resolution d^2 != 0 at internal {internal}, s={s}"
                )
    return cx


def resolution_ext_table(
    H: HopfAlgebroid,
    comodule: Comodule,
    window: DegreeWindow,
    s_cap: int | None = None,
    with_reps: bool = True,
    threads: int = 1,
) -> ExtTable:
    from .concurrency import deterministic_map

    cx = build_resolution_complex(H, comodule, window, s_cap)
    s_top = (cx.s_cap if s_cap is None else s_cap) + 1

    def column(total: SpokeDegree):
        col = []
        for s in range(s_top):
            internal = total + D(s, 0)
            d_out = cx.diffs[(internal, s)]
            if s == 0:
                d_in = SparseMatFp.zero(d_out.cols, 0, H.p)
            else:
                d_in = cx.diffs[(internal, s - 1)]
            if with_reps:
                dim, reps = fp.quotient_dimension(d_in, d_out, with_basis=True)
                labels = []
                basis_labels = cx.basis_labels(internal, s)
                for vec in reps:
                    terms = sorted(basis_labels[i] for i, c in enumerate(vec) if c)
                    labels.append(terms[0])
                labels = tuple(labels)
            else:
                dim = fp.quotient_dimension(d_in, d_out)
                labels = ()
            if dim:
                col.append((s, dim, labels))
        return col

    degrees = window.degrees()
    entries: dict[tuple[int, SpokeDegree], tuple[int, tuple[str, ...]]] = {}
    for total, col in zip(degrees, deterministic_map(column, degrees, threads)):
        for s, dim, labels in col:
            entries[(s, total)] = (dim, labels)
    return ExtTable(entries, meta={"route": "resolution"})


def stabilize_over_n(
    p: int,
    window: DegreeWindow,
    n_max: int,
    beta: int = 1,
    beta_prime: int = 1,
    s_cap: int | None = None,
):
    """Ext tables over increasing truncation height until two consecutive
    heights agree on the window; returns (table, n, stabilized flag)."""
    from .hopf import truncated_hopf

    if n_max < 2:
        raise ConfigError("stabilization needs n_max >= 2")
    tables = {}
    previous = None
    for n in range(1, n_max + 1):
        H, M = truncated_hopf(p, n, beta, beta_prime)
        tables[n] = resolution_ext_table(H, M, window, s_cap)
        if previous is not None and tables[n].dims() == tables[n - 1].dims():
            table = tables[n - 1]
            table.meta.update({"stabilized": True, "n": n - 1})
            return table, n - 1, True
        previous = tables[n]
    table = tables[n_max]
    table.meta.update({"stabilized": False, "n": n_max})
    return table, n_max, False
