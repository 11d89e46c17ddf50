import random

import pytest
from hypothesis import given, settings, strategies as st

from spokeseq import fp
from spokeseq.errors import CompositionError
from spokeseq.fp import SparseMatFp, Subspace


def dense_rank_oracle(data, p):
    """Textbook dense Gaussian elimination, kept independent of fp.rref."""
    a = [[v % p for v in row] for row in data]
    if not a:
        return 0
    rows, cols = len(a), len(a[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [x * inv % p for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        r += 1
        if r == rows:
            break
    return r


def test_rank_trivial():
    assert fp.rank(SparseMatFp.zero(3, 3, 3)) == 0
    assert fp.rank(SparseMatFp.identity(4, 5)) == 4


def test_rank_weyl_square_p3():
    # gamma on span(mu_1, mu_2) at p=3: gamma(mu_1)=mu_2, gamma(mu_2)=-mu_1-mu_2.
    # (gamma-1)^p = 0 and span(mu_1, mu_2) is a single size-2 Jordan block, so
    # (gamma-1)^2 is already zero: rank 0.
    g = SparseMatFp.from_dense([[0, -1], [1, -1]], 3)
    gm1 = SparseMatFp.from_dense([[-1, -1], [1, -2]], 3)
    sq = gm1.matmul(gm1)
    assert sq.is_zero()
    assert fp.rank(sq) == 0
    # sanity: gamma^3 = 1
    assert g.matmul(g).matmul(g).entries == SparseMatFp.identity(2, 3).entries


def test_kernel_trivial():
    assert fp.kernel_basis(SparseMatFp.identity(2, 3)) == []
    basis = fp.kernel_basis(SparseMatFp.zero(1, 2, 3))
    assert basis == [(1, 0), (0, 1)]


def test_solve():
    m = SparseMatFp.from_dense([[1, 2], [0, 1]], 5)
    x = fp.solve(m, [3, 4])
    assert m.apply(x) == (3, 4)
    unsolvable = SparseMatFp.from_dense([[1, 0], [2, 0]], 5)
    assert fp.solve(unsolvable, [1, 1]) is None


def test_quotient_dimension_trivial():
    z22 = SparseMatFp.zero(2, 2, 3)
    assert fp.quotient_dimension(z22, z22) == 2
    ident = SparseMatFp.identity(2, 3)
    with pytest.raises(CompositionError):
        fp.quotient_dimension(ident, ident)
    assert fp.quotient_dimension(ident, z22) == 0


def test_quotient_with_basis():
    # 0 -> F_3^2 --[1 0;0 0]--> F_3^2: homology = ker / im, dim 1
    d_boundary = SparseMatFp.from_dense([[1, 0], [0, 0]], 3)
    d_cycle = SparseMatFp.from_dense([[0, 0], [0, 1]], 3)
    dim, reps = fp.quotient_dimension(d_boundary, d_cycle, with_basis=True)
    assert dim == 0 and reps == []
    dim, reps = fp.quotient_dimension(d_boundary, SparseMatFp.zero(2, 2, 3), True)
    assert dim == 1 and reps == [(0, 1)]


@st.composite
def random_sparse(draw):
    p = draw(st.sampled_from([3, 5, 7]))
    rows = draw(st.integers(1, 8))
    cols = draw(st.integers(1, 8))
    n_entries = draw(st.integers(0, rows * cols))
    entries = {}
    for _ in range(n_entries):
        i = draw(st.integers(0, rows - 1))
        j = draw(st.integers(0, cols - 1))
        entries[(i, j)] = draw(st.integers(1, p - 1))
    return SparseMatFp(rows, cols, p, entries)


@given(random_sparse())
def test_rank_nullity(mat):
    assert fp.rank(mat) + len(fp.kernel_basis(mat)) == mat.cols


@given(random_sparse())
def test_rank_matches_dense_oracle(mat):
    assert fp.rank(mat) == dense_rank_oracle(mat.dense(), mat.p)


@given(random_sparse(), st.randoms(use_true_random=False))
def test_rank_invariance(mat, rng):
    rows = list(range(mat.rows))
    cols = list(range(mat.cols))
    rng.shuffle(rows)
    rng.shuffle(cols)
    permuted = SparseMatFp(
        mat.rows,
        mat.cols,
        mat.p,
        {(rows[i], cols[j]): v for (i, j), v in mat.entries.items()},
    )
    assert fp.rank(permuted) == fp.rank(mat)
    unit = rng.randrange(1, mat.p)
    scaled = SparseMatFp(
        mat.rows,
        mat.cols,
        mat.p,
        {(i, j): v * unit if i == 0 else v for (i, j), v in mat.entries.items()},
    )
    assert fp.rank(scaled) == fp.rank(mat)


@given(random_sparse())
def test_kernel_vectors_in_kernel(mat):
    for vec in fp.kernel_basis(mat):
        assert not any(mat.apply(vec))


@settings(max_examples=25)
@given(random_sparse())
def test_insertion_order_irrelevant(mat):
    items = sorted(mat.entries.items(), reverse=True)
    rebuilt = SparseMatFp(mat.rows, mat.cols, mat.p, dict(items))
    assert rebuilt.entries == mat.entries
    assert fp.kernel_basis(rebuilt) == fp.kernel_basis(mat)


def test_oracle_at_size_200():
    rng = random.Random(7)
    p = 3
    data = [
        [rng.randrange(p) if rng.random() < 0.05 else 0 for _ in range(200)]
        for _ in range(200)
    ]
    mat = SparseMatFp.from_dense(data, p)
    assert fp.rank(mat) == dense_rank_oracle(data, p)


def test_subspace_reduce():
    sub = Subspace([(1, 1, 0), (0, 0, 1)], 3, 3)
    assert sub.rank == 2
    assert sub.contains((2, 2, 1))
    assert sub.reduce((0, 1, 0)) == (0, 1, 0) or sub.reduce((0, 1, 0)) != (0, 0, 0)
    assert sub.coordinates((1, 1, 2)) == (1, 2)
    assert sub.coordinates((1, 0, 0)) is None


@given(random_sparse())
def test_image_basis_spans_image(mat):
    basis = fp.image_basis(mat)
    assert len(basis) == fp.rank(mat)
    # every image basis vector solves M x = b
    for vec in basis:
        assert fp.solve(mat, list(vec)) is not None
