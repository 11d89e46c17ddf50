import pytest

from spokeseq.algebra import Element
from spokeseq.errors import ConfigError
from spokeseq.fp import SparseMatFp
from spokeseq.grading import DegreeWindow, SpokeDegree
from spokeseq.hopf import (
    base_comodule,
    check_axioms,
    descent_algebroid,
    geometric_algebroid,
    m_k_formula,
    m_k_oracle,
    truncated_hopf,
    weyl_matrix,
)

D = SpokeDegree


def test_descent_right_unit_formulas_p3():
    H = descent_algebroid(3)
    total = H.total
    ul_img = H.eta_R.apply(Element.generator(H.base, "ul"))
    expected = Element.generator(total, "ul") + Element.from_monomial(
        total, total.monomial(a=6, Nm=1)
    )
    assert ul_img == expected
    us_img = H.eta_R.apply(Element.generator(H.base, "us"))
    expected = Element.generator(total, "us") + Element.from_monomial(
        total, total.monomial(a=2, mu=1)
    )
    assert us_img == expected
    a5 = Element.from_monomial(H.base, H.base.monomial(a=5))
    assert H.eta_R.apply(a5) == Element.from_monomial(total, total.monomial(a=5))


def test_descent_right_unit_exponents_forced_general_p():
    for p in (3, 5, 7):
        H = descent_algebroid(p)
        img = H.eta_R.apply(Element.generator(H.base, "ul"))
        monos = set(img.coeffs)
        assert H.total.monomial(a=2 * p, Nm=1) in monos


def test_norm_class_primitive():
    H = descent_algebroid(5)
    d_nm = H.delta.apply(Element.generator(H.total, "Nm"))
    unit = H.total.unit_monomial()
    nm = H.total.monomial(Nm=1)
    assert d_nm.coeffs == {(nm, unit): 1, (unit, nm): 1}


def test_counit_splits_right_unit():
    H = descent_algebroid(3)
    for name in ("a", "ul", "us"):
        x = Element.generator(H.base, name)
        assert H.epsilon.apply(H.eta_R.apply(x)) == x


def test_descent_axioms_window():
    H = descent_algebroid(3)
    report = check_axioms(H, DegreeWindow(-6, 6, -8, 8), comodule=base_comodule(H))
    assert report.ok, report.format()


def test_descent_axioms_p5_small_window():
    H = descent_algebroid(5)
    report = check_axioms(H, DegreeWindow(-4, 4, -5, 5))
    assert report.ok, report.format()


def test_corrupted_right_unit_caught():
    # eta_R(ul) = ul + beta*a^5*Nm is rejected: inhomogeneous
    from spokeseq.errors import HomogeneityError

    H = descent_algebroid(3)
    with pytest.raises(HomogeneityError):
        Element.generator(H.total, "ul") + Element.from_monomial(
            H.total, H.total.monomial(a=5, Nm=1)
        )


def test_truncated_hopf_relations():
    H, M = truncated_hopf(3, 1)
    # Nm^3 = 0 in the truncated algebra
    nm = Element.generator(H.total, "Nm")
    assert (nm * nm * nm).is_zero()
    assert not (nm * nm).is_zero()


def test_truncated_coaction_of_inverse():
    # psi(ul^-1) = ul^-1 (x) 1 - ul^-2 a^6 (x) Nm + ul^-3 a^12 (x) Nm^2  (p=3, n=1)
    H, M = truncated_hopf(3, 1)
    mod = M.module
    img = M.psi.apply(Element.from_monomial(mod, mod.monomial(ul=-1)))
    unit = H.total.unit_monomial()
    expected = {
        (mod.monomial(ul=-1), unit): 1,
        (mod.monomial(ul=-2, a=6), H.total.monomial(Nm=1)): 2,
        (mod.monomial(ul=-3, a=12), H.total.monomial(Nm=2)): 1,
    }
    assert img.coeffs == expected


def test_truncated_primitive_base_powers():
    H, M = truncated_hopf(3, 1)
    mod = M.module
    img = M.psi.apply(Element.from_monomial(mod, mod.monomial(a=3)))
    assert img.coeffs == {(mod.monomial(a=3), H.total.unit_monomial()): 1}


def test_truncated_axioms():
    H, M = truncated_hopf(3, 1, beta=2, beta_prime=1)
    report = check_axioms(H, DegreeWindow(-6, 6, -8, 8), comodule=M)
    assert report.ok, report.format()


def test_ul_power_pn_is_primitive():
    # psi(ul^(p^n)) = ul^(p^n) (x) 1: the Nm-term needs Nm^(p^n) = 0
    for p, n in [(3, 1), (3, 2)]:
        H, M = truncated_hopf(p, n)
        mod = M.module
        img = M.psi.apply(Element.from_monomial(mod, mod.monomial(ul=p**n)))
        assert img.coeffs == {(mod.monomial(ul=p**n), H.total.unit_monomial()): 1}
        img = M.psi.apply(Element.from_monomial(mod, mod.monomial(ul=-(p**n))))
        assert img.coeffs == {(mod.monomial(ul=-(p**n)), H.total.unit_monomial()): 1}


def test_geometric_algebroid():
    H = geometric_algebroid(3)
    y = Element.generator(H.base, "y")
    diff = H.eta_R.apply(y) - H.eta_L.apply(y)
    assert not diff.is_zero()  # yb - y != 0
    assert H.epsilon.apply(Element.generator(H.total, "yb")) == y
    # complete monomial basis of the total ring in degree 2: {y, yb, x*xb}
    from spokeseq.algebra import monomials_in_degree

    labels = {H.total.format_monomial(m) for m in monomials_in_degree(H.total, D(2, 0))}
    assert labels == {"y", "yb", "x*xb"}


def test_geometric_axioms():
    H = geometric_algebroid(3)
    report = check_axioms(H, DegreeWindow(0, 10, 0, 0), comodule=base_comodule(H))
    assert report.ok, report.format()


def test_eta_r_mod_coideal_equals_eta_l():
    # dropping Nm- and mu-terms from eta_R gives eta_L
    H = descent_algebroid(3)
    nm_i, mu_i = H.total.index["Nm"], H.total.index["mu"]
    for name in H.base.names:
        img = H.eta_R.apply(Element.generator(H.base, name))
        linear = {m: c for m, c in img.coeffs.items() if not m[nm_i] and not m[mu_i]}
        assert linear == H.eta_L.apply(Element.generator(H.base, name)).coeffs


def test_weyl_order():
    for p in (3, 5, 7):
        g = weyl_matrix(p)
        power = SparseMatFp.identity(p - 1, p)
        for _ in range(p):
            power = power.matmul(g)
        assert power.entries == SparseMatFp.identity(p - 1, p).entries


def test_mk_formula_values():
    assert m_k_formula(3, 2) == 1  # floor(binom(3,1)/3)
    assert m_k_formula(3, 0) == 0
    assert m_k_formula(3, 1) == 0
    assert [m_k_formula(3, k) for k in range(8)] == [0, 0, 1, 1, 1, 2, 2, 2]


def test_mk_oracle_matches_formula_p3():
    for k in range(13):
        assert m_k_oracle(3, k) == m_k_formula(3, k), k


def test_mk_oracle_matches_formula_p5():
    for k in range(13):
        assert m_k_oracle(5, k) == m_k_formula(5, k), k


def test_bad_parameters():
    with pytest.raises(ConfigError):
        descent_algebroid(4)
    with pytest.raises(ConfigError):
        descent_algebroid(3, beta=3)
    with pytest.raises(ConfigError):
        truncated_hopf(3, 0)
