import random

import pytest
from hypothesis import given, settings, strategies as st

from transverse import config, gf, poly
from transverse.poly import Form, UniPoly


F3 = gf.field_create(3)
F5 = gf.field_create(5)
F7 = gf.field_create(7)
F9 = gf.field_create(3, 2)


def P(field, *coeffs):
    return UniPoly(field, coeffs)


class TestUniPoly:
    def test_trim_and_degree(self):
        assert P(F5, 1, 2, 0, 0).coeffs == (1, 2)
        assert P(F5).degree == -1
        assert P(F5, 3).degree == 0

    def test_gcd_basic(self):
        f = P(F5, 4, 0, 1)  # x^2 - 1
        g = P(F5, 4, 1)  # x - 1
        assert poly.upoly_gcd(f, g).coeffs == (4, 1)

    def test_gcd_with_zero_is_monic_argument(self):
        f = P(F5, 2, 4)
        assert poly.upoly_gcd(f, P(F5)) == f.monic()
        assert poly.upoly_gcd(P(F5), f) == f.monic()

    def test_gcd_planted_common_factor(self):
        rng = random.Random(7)
        for _ in range(20):
            h = P(F7, *[rng.randrange(7) for _ in range(3)], 1)
            f = P(F7, *[rng.randrange(7) for _ in range(2)], 1) * h
            g = P(F7, *[rng.randrange(7) for _ in range(2)], 3) * h
            d = poly.upoly_gcd(f, g)
            assert (d % h.monic()).is_zero() or (h.monic() % d).is_zero()
            assert (f % d).is_zero() and (g % d).is_zero()

    def test_gcd_field_mismatch(self):
        with pytest.raises(ValueError):
            poly.upoly_gcd(P(F5, 1, 1), P(F7, 1, 1))

    def test_squarefree_basic(self):
        assert poly.upoly_squarefree(P(F3, 0, 1) * P(F3, 1, 1))
        assert not poly.upoly_squarefree(P(F3, 0, 1) * P(F3, 0, 1) * P(F3, 1, 1))

    def test_squarefree_vanishing_derivative(self):
        # x^3 - c over F_3 is a cube
        for c in range(3):
            f = P(F3, (-c) % 3, 0, 0, 1)
            assert not poly.upoly_squarefree(f)

    def test_squarefree_zero_rejected(self):
        with pytest.raises(ValueError):
            poly.upoly_squarefree(P(F3))

    def test_squarefree_constant_and_linear(self):
        assert poly.upoly_squarefree(P(F3, 2))
        assert poly.upoly_squarefree(P(F3, 1, 1))

    def test_roots_x2_plus_1_over_f3(self):
        f = P(F3, 1, 0, 1)
        assert poly.upoly_roots_in_extension(f, 1) == []
        roots = poly.upoly_roots_in_extension(f, 2)
        assert len(roots) == 2
        (r1, m1), (r2, m2) = roots
        assert m1 == m2 == 1
        assert (r1 + r2).code == 0

    def test_roots_match_exhaustive_scan(self):
        rng = random.Random(11)
        for _ in range(15):
            deg = rng.randrange(1, 7)
            f = P(F5, *[rng.randrange(5) for _ in range(deg)], 1)
            for k in (1, 2, 3):
                E = gf.extension_field(F5, k)
                lifted = [gf.embed_code(F5, E, c) for c in f.coeffs]
                found = {
                    r.code: m for r, m in poly.upoly_roots_in_extension(f, k)
                }
                from transverse import linalg

                brute = {
                    c for c in E.elements() if linalg.u_eval(E, lifted, c) == 0
                }
                assert set(found) == brute
                for r, m in found.items():
                    # divide out (x - r) exactly m times
                    g = list(lifted)
                    cnt = 0
                    while True:
                        q, rem = linalg.u_divmod(E, g, [E.neg(r), 1])
                        if rem:
                            break
                        g = q
                        cnt += 1
                    assert cnt == m

    def test_roots_multiplicity(self):
        f = P(F5, 1, 1) * P(F5, 1, 1) * P(F5, 2, 1)
        roots = dict(
            (r.code, m) for r, m in poly.upoly_roots_in_extension(f, 1)
        )
        assert roots == {4: 2, 3: 1}

    def test_squarefree_iff_no_repeated_roots_in_splitting_sweep(self):
        rng = random.Random(3)
        for q, F in ((3, F3), (5, F5), (9, F9)):
            for _ in range(10):
                deg = rng.randrange(1, 7)
                f = P(F, *[rng.randrange(F.order) for _ in range(deg)], 1)
                sweep_mults = []
                for k in range(1, deg + 1):
                    if not config.current_caps().field_order_ok(F.p, F.m * k):
                        continue
                    sweep_mults.extend(
                        m for _, m in poly.upoly_roots_in_extension(f, k)
                    )
                # degree <= 6 splits completely by k = 6
                if max(sweep_mults, default=1) >= 2:
                    assert not poly.upoly_squarefree(f)
                else:
                    assert poly.upoly_squarefree(f)


class TestForm:
    def test_homogeneity_enforced(self):
        with pytest.raises(ValueError):
            Form(F5, 2, 2, {(1, 0): 1})

    def test_zero_coeffs_dropped(self):
        f = Form(F5, 2, 2, {(2, 0): 0, (1, 1): 3})
        assert f.terms == {(1, 1): 3}

    def test_eval_fermat_cubic(self):
        f = poly.parse_form(F7, "x0^3 + x1^3 + x2^3")
        assert poly.form_eval(f, [F7.one(), -F7.one(), F7.zero()]).code == 0
        assert poly.form_eval(f, [0, 0, 0]).code == 0

    def test_eval_scaling_homogeneity(self):
        rng = random.Random(5)
        for _ in range(20):
            d = rng.randrange(1, 5)
            terms = {}
            for exps in poly.monomials_of_degree(3, d):
                terms[exps] = rng.randrange(5)
            f = Form(F5, 3, d, terms)
            pt = [rng.randrange(5) for _ in range(3)]
            lam = rng.randrange(1, 5)
            lhs = poly.form_eval(f, [(lam * x) % 5 for x in pt]).code
            rhs = F5.mul(pow(lam, d, 5), poly.form_eval(f, pt).code)
            assert lhs == rhs

    def test_eval_in_extension(self):
        f = poly.parse_form(F3, "x0^2 + x1^2")
        i = poly.upoly_roots_in_extension(P(F3, 1, 0, 1), 2)[0][0]
        assert poly.form_eval(f, [i, F9.one()]).code == 0

    def test_eval_dimension_mismatch(self):
        f = poly.parse_form(F5, "x0^2 + x1^2")
        with pytest.raises(ValueError):
            poly.form_eval(f, [1, 2, 3])

    def test_partials_fermat(self):
        f = poly.parse_form(F7, "x0^3 + x1^3 + x2^3")
        parts = poly.form_partials(f)
        assert parts[0] == poly.parse_form(F7, "3*x0^2", nvars=3)
        assert parts[1] == poly.parse_form(F7, "3*x1^2", nvars=3)
        assert parts[2] == poly.parse_form(F7, "3*x2^2", nvars=3)

    def test_partials_char_divides(self):
        f = poly.parse_form(F3, "x0^3 + x1^3 + x2^3")
        assert all(g.is_zero() for g in poly.form_partials(f))

    def test_euler_identity(self):
        rng = random.Random(9)
        for _ in range(20):
            d = rng.randrange(1, 5)
            terms = {
                exps: rng.randrange(5)
                for exps in poly.monomials_of_degree(3, d)
            }
            f = Form(F5, 3, d, terms)
            parts = poly.form_partials(f)
            acc = Form(F5, 3, d, {})
            x = [
                Form(F5, 3, 1, {tuple(1 if j == i else 0 for j in range(3)): 1})
                for i in range(3)
            ]
            for i in range(3):
                acc = acc + x[i] * parts[i]
            assert acc == f.scale(d % 5)

    def test_restrict_conic_to_lines(self):
        f = poly.parse_form(F5, "x0*x2 - x1^2")
        g = poly.restrict_to_subspace(f, [(1, 0, 0), (0, 1, 0)])
        assert g.nvars == 2 and g.degree == 2
        assert g.terms == {(0, 2): 4}
        h = poly.restrict_to_subspace(f, [(1, 0, 0), (0, 0, 1)])
        assert h.terms == {(1, 1): 1}

    def test_restrict_eval_compatibility(self):
        rng = random.Random(13)
        for _ in range(100):
            d = rng.randrange(1, 4)
            f = Form(
                F5,
                4,
                d,
                {e: rng.randrange(5) for e in poly.monomials_of_degree(4, d)},
            )
            rows = [
                [rng.randrange(5) for _ in range(4)],
                [rng.randrange(5) for _ in range(4)],
            ]
            from transverse import linalg

            red, _ = linalg.rref(F5, [tuple(r) for r in rows])
            basis = [r for r in red if any(r)]
            if len(basis) < 2:
                continue
            g = poly.restrict_to_subspace(f, rows)
            u = [rng.randrange(5) for _ in range(2)]
            pt = [0, 0, 0, 0]
            for i in range(2):
                for j in range(4):
                    pt[j] = F5.add(pt[j], F5.mul(u[i], basis[i][j]))
            assert poly.form_eval(g, u).code == poly.form_eval(f, pt).code

    def test_restrict_whole_space_is_identity(self):
        f = poly.parse_form(F5, "x0^2 + 2*x1*x2")
        g = poly.restrict_to_subspace(f, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
        assert g == f

    def test_restrict_zero_iff_contained(self):
        # x0*x1 vanishes on the line {x0=0} spanned by e1, e2
        f = poly.parse_form(F5, "x0*x1", nvars=3)
        g = poly.restrict_to_subspace(f, [(0, 1, 0), (0, 0, 1)])
        assert g.is_zero() and g.degree == 2

    def test_pow_freshman_dream(self):
        F2 = gf.field_create(2)
        f = poly.parse_form(F2, "x0 + x1")
        assert poly.form_pow(f, 2) == poly.parse_form(F2, "x0^2 + x1^2")

    def test_pow_identity(self):
        f = poly.parse_form(F5, "x0^2 + 2*x1^2")
        assert poly.form_pow(f, 1) == f

    def test_pow_p_matches_repeated_multiplication(self):
        f = poly.parse_form(F5, "x0 + 2*x1")
        fast = poly.form_pow(f, 5)
        slow = f
        for _ in range(4):
            slow = slow * f
        assert fast == slow
        assert fast.terms == {(5, 0): 1, (0, 5): 2}

    def test_pow_cap(self):
        f = poly.parse_form(F5, "x0 + x1")
        with pytest.raises(config.CapExceededError):
            poly.form_pow(f, config.current_caps().max_form_degree + 1)

    def test_binary_squarefree(self):
        g = poly.parse_form(F5, "x0*x1")
        assert poly.binary_squarefree(g)
        assert not poly.binary_squarefree(poly.parse_form(F5, "x1^2"))
        assert not poly.binary_squarefree(poly.parse_form(F5, "x0^2*x1"))
        assert poly.binary_squarefree(poly.parse_form(F5, "x0^2 - x1^2"))
        # x0^2*x1 + x0*x1^2 = x0*x1*(x0+x1): simple root at infinity, f = x^2+x
        m, f = poly.binary_dehomogenize(poly.parse_form(F5, "x0^2*x1 + x0*x1^2"))
        assert m == 1 and f.coeffs == (0, 1, 1)


class TestGrammar:
    def test_parse_examples(self):
        f = poly.parse_form(F9, "x0^3 + 2*x1^2*x2 - (t+1)*x2^3")
        assert f.degree == 3 and f.nvars == 3
        assert f.terms[(3, 0, 0)] == 1
        assert f.terms[(0, 2, 1)] == F9.encode([2])
        assert f.terms[(0, 0, 3)] == F9.neg(F9.encode([1, 1]))

    def test_parse_round_trip(self):
        rng = random.Random(17)
        for F in (F5, F9):
            for _ in range(25):
                d = rng.randrange(1, 4)
                terms = {
                    e: rng.randrange(F.order)
                    for e in poly.monomials_of_degree(3, d)
                    if rng.random() < 0.6
                }
                f = Form(F, 3, d, terms)
                if f.is_zero():
                    continue
                assert poly.parse_form(F, poly.format_form(f), nvars=3) == f

    def test_parse_rejects_inhomogeneous(self):
        with pytest.raises(ValueError, match="homogeneous"):
            poly.parse_form(F5, "x0^2 + x1")

    def test_parse_rejects_bare_t(self):
        with pytest.raises(ValueError, match="parenthesize"):
            poly.parse_form(F9, "t*x0")

    def test_parse_rejects_out_of_range_var(self):
        with pytest.raises(ValueError, match="out of range"):
            poly.parse_form(F5, "x3^2", nvars=3)

    def test_parse_repeated_variable_multiplies(self):
        f = poly.parse_form(F5, "x0*x0")
        assert f.nvars == 1 and f.terms == {(2,): 1}

    def test_format_zero(self):
        assert poly.format_form(Form(F5, 2, 3, {})) == "0"


@settings(max_examples=60, deadline=None)
@given(
    st.integers(min_value=1, max_value=4),
    st.lists(st.integers(min_value=0, max_value=4), min_size=3, max_size=3),
    st.integers(min_value=0, max_value=10**6),
)
def test_property_partials_lower_degree(d, pt, seed):
    rng = random.Random(seed)
    terms = {e: rng.randrange(5) for e in poly.monomials_of_degree(3, d)}
    f = Form(F5, 3, d, terms)
    for g in poly.form_partials(f):
        assert g.degree == max(d - 1, 0)
        assert g.is_zero() or all(sum(e) == d - 1 for e in g.terms)
