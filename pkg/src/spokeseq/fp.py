"""Exact sparse linear algebra over a prime field F_p.

All arithmetic is integer arithmetic mod p; nothing in the engine touches
floating point.  Matrices are immutable after construction and safe to share
across threads.  Elimination uses the first nonzero pivot in (row, col)
order, so every basis the module returns is canonical: independent of entry
insertion order and of thread count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import CompositionError, ConfigError

Vector = tuple[int, ...]


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def check_odd_prime(p: int) -> None:
    if not is_prime(p) or p == 2:
        raise ConfigError(f"p must be an odd prime, got {p}")


def inv_mod(a: int, p: int) -> int:
    return pow(a % p, p - 2, p)


@dataclass(frozen=True)
class SparseMatFp:
    """rows x cols matrix over F_p, stored as {(row, col): value}, values in 1..p-1."""

    rows: int
    cols: int
    p: int
    entries: Mapping[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        clean: dict[tuple[int, int], int] = {}
        for (i, j), v in self.entries.items():
            if not (0 <= i < self.rows and 0 <= j < self.cols):
                raise ConfigError(f"entry ({i},{j}) out of range {self.rows}x{self.cols}")
            v %= self.p
            if v:
                clean[(i, j)] = v
        object.__setattr__(self, "entries", dict(sorted(clean.items())))

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(rows: int, cols: int, p: int) -> "SparseMatFp":
        return SparseMatFp(rows, cols, p, {})

    @staticmethod
    def identity(n: int, p: int) -> "SparseMatFp":
        return SparseMatFp(n, n, p, {(i, i): 1 for i in range(n)})

    @staticmethod
    def from_dense(data: Sequence[Sequence[int]], p: int) -> "SparseMatFp":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        entries = {
            (i, j): v % p
            for i, row in enumerate(data)
            for j, v in enumerate(row)
            if v % p
        }
        return SparseMatFp(rows, cols, p, entries)

    @staticmethod
    def from_columns(
        columns: Sequence[Mapping[int, int]], rows: int, p: int
    ) -> "SparseMatFp":
        """Columns given as {row: value}; matches how differentials are built."""
        entries = {
            (i, j): v % p
            for j, col in enumerate(columns)
            for i, v in col.items()
            if v % p
        }
        return SparseMatFp(rows, len(columns), p, entries)

    # -- basic ops ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.entries

    def dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def transpose(self) -> "SparseMatFp":
        return SparseMatFp(
            self.cols, self.rows, self.p, {(j, i): v for (i, j), v in self.entries.items()}
        )

    def matmul(self, other: "SparseMatFp") -> "SparseMatFp":
        if self.cols != other.rows or self.p != other.p:
            raise ConfigError(
                f"cannot compose {self.rows}x{self.cols} with {other.rows}x{other.cols}"
            )
        by_row: dict[int, list[tuple[int, int]]] = {}
        for (i, k), v in self.entries.items():
            by_row.setdefault(i, []).append((k, v))
        by_col: dict[int, list[tuple[int, int]]] = {}
        for (k, j), v in other.entries.items():
            by_col.setdefault(k, []).append((j, v))
        acc: dict[tuple[int, int], int] = {}
        for i, row in by_row.items():
            for k, v in row:
                for j, w in by_col.get(k, ()):
                    acc[(i, j)] = (acc.get((i, j), 0) + v * w) % self.p
        return SparseMatFp(self.rows, other.cols, self.p, acc)

    def apply(self, vec: Sequence[int]) -> Vector:
        if len(vec) != self.cols:
            raise ConfigError(f"vector length {len(vec)} != cols {self.cols}")
        out = [0] * self.rows
        for (i, j), v in self.entries.items():
            if vec[j]:
                out[i] = (out[i] + v * vec[j]) % self.p
        return tuple(out)


def rref(rows_data: list[list[int]], p: int) -> tuple[list[list[int]], list[int]]:
    """In-place reduced row echelon form; returns (rows, pivot column list)."""
    nrows = len(rows_data)
    ncols = len(rows_data[0]) if nrows else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if rows_data[i][c] % p:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows_data[r], rows_data[pivot_row] = rows_data[pivot_row], rows_data[r]
        inv = inv_mod(rows_data[r][c], p)
        row_r = rows_data[r]
        if inv != 1:
            for j in range(c, ncols):
                if row_r[j]:
                    row_r[j] = row_r[j] * inv % p
        for i in range(nrows):
            if i != r and rows_data[i][c]:
                f = rows_data[i][c]
                row_i = rows_data[i]
                for j in range(c, ncols):
                    if row_r[j]:
                        row_i[j] = (row_i[j] - f * row_r[j]) % p
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows_data[:r], pivots


def rank(mat: SparseMatFp) -> int:
    _, pivots = rref(mat.dense(), mat.p)
    return len(pivots)


def kernel_basis(mat: SparseMatFp) -> list[Vector]:
    """Canonical null-space basis: one vector per free column, RREF-derived."""
    reduced, pivots = rref(mat.dense(), mat.p)
    p = mat.p
    pivot_set = set(pivots)
    basis: list[Vector] = []
    for j in range(mat.cols):
        if j in pivot_set:
            continue
        vec = [0] * mat.cols
        vec[j] = 1
        for i, pc in enumerate(pivots):
            if reduced[i][j]:
                vec[pc] = (-reduced[i][j]) % p
        basis.append(tuple(vec))
    return basis


def image_basis(mat: SparseMatFp) -> list[Vector]:
    """The columns of the matrix at pivot positions (original entries)."""
    _, pivots = rref(mat.dense(), mat.p)
    cols = mat.dense()
    return [tuple(cols[i][j] for i in range(mat.rows)) for j in pivots]


def solve(mat: SparseMatFp, b: Sequence[int]) -> Vector | None:
    """One solution of M x = b, or None; canonical (free variables = 0)."""
    if len(b) != mat.rows:
        raise ConfigError(f"rhs length {len(b)} != rows {mat.rows}")
    p = mat.p
    aug = mat.dense()
    for i in range(mat.rows):
        aug[i].append(b[i] % p)
    reduced, pivots = rref(aug, p)
    for i, pc in enumerate(pivots):
        if pc == mat.cols:
            return None
    x = [0] * mat.cols
    for i, pc in enumerate(pivots):
        x[pc] = reduced[i][mat.cols]
    return tuple(x)


class Subspace:
    """Row-span in RREF form, supporting membership tests and reduction."""

    def __init__(self, vectors: Iterable[Sequence[int]], dim: int, p: int):
        self.dim = dim
        self.p = p
        data = [list(v) for v in vectors]
        for v in data:
            if len(v) != dim:
                raise ConfigError("subspace vector has wrong length")
        self.rows, self.pivots = rref(data, p) if data else ([], [])

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, vec: Sequence[int]) -> Vector:
        """Canonical residue of vec modulo the subspace."""
        out = [v % self.p for v in vec]
        for row, pc in zip(self.rows, self.pivots):
            if out[pc]:
                f = out[pc]
                for j in range(pc, self.dim):
                    if row[j]:
                        out[j] = (out[j] - f * row[j]) % self.p
        return tuple(out)

    def contains(self, vec: Sequence[int]) -> bool:
        return not any(self.reduce(vec))

    def coordinates(self, vec: Sequence[int]) -> Vector | None:
        """Coefficients of vec on the RREF basis rows, or None."""
        out = [v % self.p for v in vec]
        coeffs = []
        for row, pc in zip(self.rows, self.pivots):
            f = out[pc]
            coeffs.append(f)
            if f:
                for j in range(pc, self.dim):
                    if row[j]:
                        out[j] = (out[j] - f * row[j]) % self.p
        if any(out):
            return None
        return tuple(coeffs)


def quotient_basis(
    cycles: Iterable[Sequence[int]], boundaries: Subspace, dim: int, p: int
) -> list[Vector]:
    """Canonical representatives of span(cycles) / boundaries.

    Reduce each cycle vector modulo the boundary subspace, then echelonize
    the residues; the nonzero RREF rows are the representatives.
    """
    residues = [list(boundaries.reduce(v)) for v in cycles]
    residues = [v for v in residues if any(v)]
    if not residues:
        return []
    reduced, _ = rref(residues, p)
    return [tuple(row) for row in reduced if any(row)]


def quotient_dimension(
    d_boundary: SparseMatFp, d_cycle: SparseMatFp, with_basis: bool = False
):
    """Homology dimension at the middle of  X --d_boundary--> Y --d_cycle--> Z.

    Raises CompositionError unless d_cycle o d_boundary = 0 (a nonzero
    composite means a differential upstream is wrong).
    """
    if d_boundary.rows != d_cycle.cols:
        raise ConfigError(
            f"not composable: boundary lands in dim {d_boundary.rows}, "
            f"cycle starts at dim {d_cycle.cols}"
        )
    if not d_cycle.matmul(d_boundary).is_zero():
        raise CompositionError("d_cycle o d_boundary != 0")
    kernel = kernel_basis(d_cycle)
    b_rank = rank(d_boundary)
    dim = len(kernel) - b_rank
    if not with_basis:
        return dim
    image = Subspace(
        [d_boundary.apply([1 if k == j else 0 for k in range(d_boundary.cols)])
         for j in range(d_boundary.cols)],
        d_boundary.rows,
        d_boundary.p,
    )
    reps = quotient_basis(kernel, image, d_cycle.cols, d_cycle.p)
    assert len(reps) == dim
    return dim, reps
