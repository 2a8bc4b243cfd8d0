import json

import pytest

from transverse import audit, certify, config, gf, locus, poly, projgeom as pg
from transverse.audit import (
    BOUNDS,
    AuditReport,
    BoundFormula,
    CurveFixture,
    audit_space_filling,
    bad_hyperplane_weight,
    bound_bad_hyperplanes,
    count_bad_hyperplanes,
    count_bad_superspaces,
    count_nontransverse_lines,
    separation_search,
)
from transverse.locus import Hypersurface

F2 = gf.field_create(2)
F3 = gf.field_create(3)
F5 = gf.field_create(5)
F7 = gf.field_create(7)
F13 = gf.field_create(13)


def surf(field, text, nvars=None):
    return Hypersurface(poly.parse_form(field, text, nvars=nvars))


class TestBoundFormulas:
    def test_arithmetic_examples(self):
        assert BOUNDS["reduced-curve-lines"].value(d=2, q=5) == 18
        assert BOUNDS["irreducible-curve-lines"].value(d=3, q=7) == 56
        assert BOUNDS["bad-hyperplanes"].value(d=2, t=2, q=5) == 7
        assert BOUNDS["bad-hyperplanes"].value(d=2, t=0, q=5) == 73
        assert BOUNDS["tangent-superspaces"].value(n=3, d=3, q=13, r=1) == 84
        assert BOUNDS["dual-contained-superspaces"].value(n=3, d=3) == 12
        assert BOUNDS["bad-superspaces"].value(n=3, d=3, q=13, r=1) == 96

    def test_missing_parameter_is_an_error(self):
        with pytest.raises(ValueError):
            BOUNDS["reduced-curve-lines"].value(d=2)

    def test_none_parameters_are_dropped(self):
        assert BOUNDS["reduced-curve-lines"].value(d=2, q=5, r=None, t=None) == 18

    def test_only_arithmetic_evaluates(self):
        evil = BoundFormula("x", "__import__", "not a formula")
        with pytest.raises(ValueError):
            evil.value()
        with pytest.raises(ValueError):
            BoundFormula("y", "d(q)", "call").value(d=1, q=1)

    def test_weight_endpoints(self):
        # endpoint values of the quadratic weight, d = 4
        assert bad_hyperplane_weight(4, 0) == 12
        assert bad_hyperplane_weight(4, 4) == 6
        for d in range(1, 8):
            assert max(bad_hyperplane_weight(d, s) for s in range(d + 1)) == d * (d - 1)

    def test_bound_bad_hyperplanes_validates(self):
        assert bound_bad_hyperplanes(2, 2, 5) == 7
        with pytest.raises(ValueError):
            bound_bad_hyperplanes(2, 3, 5)
        with pytest.raises(ValueError):
            bound_bad_hyperplanes(0, 0, 5)
        with pytest.raises(ValueError):
            bound_bad_hyperplanes(2, 0, 1)


class TestCurveFixture:
    def test_product_and_counters(self):
        C = CurveFixture.from_strings(F7, ["x0", "x1", "x0 + x1"])
        assert C.form == poly.parse_form(F7, "x0^2*x1 + x0*x1^2", 3)
        assert (C.degree, C.ell, C.t) == (3, 3, 3)
        assert C.degrees == (1, 1, 1)

    def test_mixed_degrees(self):
        C = CurveFixture.from_strings(F5, ["x0", "x0*x2 + 4*x1^2"])
        assert (C.degree, C.ell, C.t) == (3, 2, 1)

    def test_proportional_factors_rejected(self):
        with pytest.raises(ValueError):
            CurveFixture.from_strings(F5, ["x0", "2*x0"])

    def test_non_ternary_rejected(self):
        with pytest.raises(ValueError):
            CurveFixture([poly.parse_form(F5, "x0*x1", 4)])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            CurveFixture([])


class TestNontransverseLines:
    def test_smooth_conic_exact_count(self):
        """Six tangents at the six rational points, nothing else."""
        C = CurveFixture.from_strings(F5, ["x0*x2 + 4*x1^2"])
        rep = count_nontransverse_lines(C, seed=0)
        assert rep.observed == 6
        assert rep.bound == 18
        assert rep.passed()
        assert rep.extras == {"pool": 31, "improper": 0, "not_squarefree": 6}
        # one irreducible factor: the sharper component bound rides along
        assert [s.bound for s in rep.subreports] == [12]
        assert rep.subreports[0].observed == 6
        # independent oracle: one tangent per rational curve point
        on_curve = sum(
            1
            for P in pg.enumerate_point_codes(2, F5)
            if poly.form_eval_codes(C.form, P, F5) == 0
        )
        assert rep.observed == on_curve == F5.order + 1

    def test_conic_agrees_with_transversality_predicate(self):
        C = CurveFixture.from_strings(F5, ["x0*x2 + 4*x1^2"])
        X = Hypersurface(C.form)
        via_predicate = sum(
            1 for L in pg.all_lines(2, F5) if not certify.is_transverse(X, L)
        )
        assert via_predicate == count_nontransverse_lines(C).observed

    def test_cuspidal_cubic(self):
        """8 lines through the cusp plus 7 tangents at the smooth points."""
        C = CurveFixture.from_strings(F7, ["x1^2*x2 - x0^3"])
        rep = count_nontransverse_lines(C, seed=0)
        assert rep.observed == 15
        assert rep.subreports[0].bound == 56
        assert rep.passed()
        cusp = pg.ProjectivePoint(F7, (0, 0, 1))
        through_cusp = 0
        elsewhere = 0
        for L in pg.all_lines(2, F7):
            G = poly.restrict_to_subspace(C.form, L)
            if G.is_zero() or not poly.binary_squarefree(G):
                if pg.subspace_contains(L, cusp):
                    through_cusp += 1
                else:
                    elsewhere += 1
        assert through_cusp == 8
        assert elsewhere == 7

    def test_three_concurrent_lines_exact(self):
        C = CurveFixture.from_strings(F7, ["x0", "x1", "x0 + x1"])
        rep = count_nontransverse_lines(C, seed=0)
        assert rep.observed == F7.order + 1
        assert rep.bound == 72
        # the components themselves are the improper sections
        assert rep.extras["improper"] == 3
        assert rep.extras["not_squarefree"] == 5
        assert rep.subreports == ()

    def test_existence_margin_above_gate(self):
        # q = 5 >= (3/2) d (d-1) = 3: a transverse line must remain
        C = CurveFixture.from_strings(F5, ["x0*x2 + 4*x1^2"])
        rep = count_nontransverse_lines(C)
        assert rep.extras["pool"] - rep.observed >= 1

    def test_degree_one_rejected(self):
        with pytest.raises(ValueError):
            count_nontransverse_lines(CurveFixture.from_strings(F5, ["x0"]))

    def test_square_factor_rejected(self):
        # a squared factor slips past the pairwise check but not the
        # squarefreeness gate
        with pytest.raises(ValueError):
            count_nontransverse_lines(CurveFixture.from_strings(F5, ["x0^2", "x1"]))


class TestBadHyperplanes:
    def test_two_planes_exact(self):
        """Both components improper, q-1 more through the double line."""
        X = surf(F5, "x0*x1", nvars=4)
        rep = count_bad_hyperplanes(X, t=2, seed=0)
        assert rep.observed == 6
        assert rep.bound == 7
        assert rep.passed()
        assert rep.extras == {"pool": 156, "improper": 2, "nonreduced": 4}
        assert rep.params == {"n": 3, "d": 2, "q": 5, "r": 2, "t": 2}

    def test_two_planes_nonreduced_sections_identified(self):
        # a section is non-reduced exactly for the hyperplanes a x0 + b x1
        # other than the two components
        X = surf(F5, "x0*x1", nvars=4)
        bad = []
        for H in pg.all_hyperplanes(3, F5):
            G = certify.section_form(X, H)
            if not G.is_zero() and not certify.is_reduced_form(G):
                bad.append(pg.dual(H))
        assert len(bad) == 4
        for W in bad:
            row = W.basis[0]
            assert row[2] == 0 and row[3] == 0

    def test_smooth_quadric_sections_all_reduced(self):
        """Tangent sections are two distinct rulings, so nothing here is
        non-reduced in odd characteristic; the bound is slack."""
        X = surf(F5, "x0*x3 + 4*x1*x2")
        rep = count_bad_hyperplanes(X, t=0, seed=0)
        assert rep.observed == 0
        assert rep.bound == 73
        assert rep.extras["improper"] == 0
        assert rep.extras["nonreduced"] == 0

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            count_bad_hyperplanes(surf(F5, "x0^2*x1", nvars=3), t=0)
        with pytest.raises(ValueError):
            count_bad_hyperplanes(surf(F5, "x0*x1", nvars=4), t=3)
        with pytest.raises(ValueError):
            count_bad_hyperplanes(surf(F5, "x0*x1", nvars=2), t=2)

    def test_deterministic_for_fixed_seed(self):
        X = surf(F5, "x0*x1", nvars=4)
        a = count_bad_hyperplanes(X, t=2, seed=7).to_dict()
        b = count_bad_hyperplanes(X, t=2, seed=7).to_dict()
        a["runtime_ms"] = b["runtime_ms"] = 0
        assert a == b


class TestBadSuperspaces:
    def test_cubic_surface_pencil_of_lines(self):
        X = surf(F13, "x0^3 + x1^3 + x2^3 + x3^3")
        P = pg.subspace_from_rows(F13, [(1, 0, 0, 0)])
        rep = count_bad_superspaces(X, P, 1, seed=0)
        assert rep.observed == 9
        assert rep.bound == 96
        assert rep.passed()
        tangent, dual = rep.subreports
        assert (tangent.observed, tangent.bound) == (9, 84)
        assert (dual.observed, dual.bound) == (0, 12)
        assert rep.extras["pool"] == 183
        assert rep.extras["transverse"] == 174
        # every tangent line contains a tangency point found by the scan
        assert rep.extras["witnessed_tangents"] == rep.extras["tangent"]
        assert rep.extras["witness_points"] == 9

    def test_cubic_surface_planes_through_line(self):
        X = surf(F13, "x0^3 + x1^3 + x2^3 + x3^3")
        L = pg.subspace_from_rows(F13, [(1, 0, 0, 0), (0, 1, 0, 0)])
        rep = count_bad_superspaces(X, L, 2, seed=0)
        tangent, dual = rep.subreports
        assert rep.extras["pool"] == 14
        assert (tangent.observed, tangent.bound) == (3, 12)
        assert dual.observed == 0
        assert rep.extras["witnessed_tangents"] == 3
        # existence with margin: the gate (n-r) d (d-1)^r = 6 <= q = 13
        assert rep.extras["pool"] - rep.observed >= 1

    def test_smooth_quadric_informational(self):
        """d = 2 sits outside the d >= 3 hypotheses but the counts still
        respect the formulas; the tangent lines through an outer point
        sweep the polar section, one per rational point of it."""
        X = surf(F5, "x0*x3 + 4*x1*x2")
        P = None
        for cand in pg.enumerate_points(3, F5):
            H = pg.point_subspace(cand)
            if certify.is_very_transverse(X, H, exact=True):
                P = H
                break
        rep = count_bad_superspaces(X, P, 1, seed=0)
        tangent, dual = rep.subreports
        assert (tangent.observed, tangent.bound) == (6, 12)
        assert dual.observed == 0
        pt = pg.ProjectivePoint(F5, P.basis[0])
        polar = locus.gauss_image(X, pt)  # gradient at P as dual coords
        on_polar_and_X = 0
        for coords in pg.enumerate_point_codes(3, F5):
            if poly.form_eval_codes(X.form, coords, F5) != 0:
                continue
            dot = 0
            for a, b in zip(polar.coords, coords):
                dot = F5.add(dot, F5.mul(a, b))
            if dot == 0:
                on_polar_and_X += 1
        assert tangent.observed == on_polar_and_X

    def test_rejects_bad_input(self):
        X = surf(F13, "x0^3 + x1^3 + x2^3 + x3^3")
        P = pg.subspace_from_rows(F13, [(1, 0, 0, 0)])
        with pytest.raises(ValueError):
            count_bad_superspaces(X, P, 2)  # dim mismatch
        with pytest.raises(ValueError):
            count_bad_superspaces(surf(F5, "x1^2*x2 - x0^3"), P, 1)
        on_X = pg.subspace_from_rows(F13, [(1, 12, 0, 0)])
        with pytest.raises(ValueError):
            count_bad_superspaces(X, on_X, 1)


class TestSpaceFilling:
    def test_plane_over_f2(self):
        rep = audit_space_filling(2, 2, 2)
        assert rep.observed == 0
        assert rep.bound == 0
        assert rep.passed()
        # 7 linear + 63 quadratic forms up to scalars
        assert rep.extras["forms_scanned"] == 70
        assert rep.extras["points"] == 7
        assert rep.extras["witness_degree"] == 3
        assert rep.extras["witness_fills"] is True

    def test_line_over_f2(self):
        rep = audit_space_filling(1, 2, 2)
        assert rep.observed == 0
        assert rep.extras["forms_scanned"] == 10
        assert rep.extras["witness"] == "x0^2*x1 + x0*x1^2"

    def test_plane_over_f3(self):
        rep = audit_space_filling(2, 3, 2)
        assert rep.observed == 0
        assert rep.extras["forms_scanned"] == 13 + 364

    def test_dmax_is_capped_at_q(self):
        full = audit_space_filling(1, 2, 5)
        assert full.params["d"] == 2
        assert full.extras["forms_scanned"] == 10

    def test_validation(self):
        with pytest.raises(ValueError):
            audit_space_filling(0, 2, 2)
        with pytest.raises(ValueError):
            audit_space_filling(1, 2, 0)
        with pytest.raises(ValueError):
            audit_space_filling(1, 6, 2)  # 6 is not a prime power


class TestSeparationSearch:
    def test_smoke_smooth_cubics(self):
        rep = separation_search(3, 3, 3, 2, r=1, seed=2)
        assert rep["verdict"] == "observational"
        assert rep["smooth_sampled"] == 3
        assert rep["observed"] == len(rep["separations"])
        assert rep["bound"] is None

    def test_smooth_quadrics_never_separate(self):
        rep = separation_search(3, 3, 2, 3, r=1, seed=4)
        assert rep["smooth_sampled"] == 3
        assert rep["observed"] == 0

    def test_hyperplanes_never_separate(self):
        rep = separation_search(2, 3, 3, 2, r=2, seed=5)
        assert rep["observed"] == 0

    def test_unsupported_rank(self):
        with pytest.raises(ValueError):
            separation_search(1, 4, 3, 2, r=2)
        with pytest.raises(ValueError):
            separation_search(0, 3, 3, 2)


class TestReportsAndWriters:
    def test_schema_keys_exact(self):
        rep = audit_space_filling(1, 2, 2)
        d = rep.to_dict()
        assert set(d) == {
            "experiment", "params", "observed", "bound", "bound_formula",
            "citation", "verdict", "runtime_ms", "seed",
        }
        assert set(d["params"]) == {"n", "d", "q", "r", "t"}

    def test_json_writer_flattens_subreports(self, tmp_path):
        C = CurveFixture.from_strings(F5, ["x0*x2 + 4*x1^2"])
        rep = count_nontransverse_lines(C, seed=0)
        out = tmp_path / "r.json"
        audit.write_reports_json([rep], out)
        data = json.loads(out.read_text())
        assert [d["experiment"] for d in data] == [
            "nontransverse-lines",
            "nontransverse-lines-irreducible",
        ]

    def test_reports_reproducible_up_to_runtime(self, tmp_path):
        C = CurveFixture.from_strings(F5, ["x0*x2 + 4*x1^2"])
        runs = []
        for _ in range(2):
            data = audit.flatten_reports([count_nontransverse_lines(C, seed=3)])
            for d in data:
                d["runtime_ms"] = 0
            runs.append(json.dumps(data, sort_keys=True))
        assert runs[0] == runs[1]

    def test_csv_writer_mirrors_fields(self, tmp_path):
        rep = audit_space_filling(1, 2, 2)
        sep = separation_search(1, 2, 2, 2, r=1, seed=0)
        out = tmp_path / "r.csv"
        audit.write_reports_csv([rep, sep], out)
        lines = out.read_text().strip().splitlines()
        assert lines[0].startswith("experiment,n,d,q,r,t,observed")
        assert len(lines) == 3
        assert lines[1].startswith("space-filling,1,2,2,,")

    def test_plain_dicts_pass_through(self):
        sep = separation_search(1, 2, 2, 2, r=1, seed=0)
        flat = audit.flatten_reports([sep])
        assert flat[0]["experiment"] == "separation-search"
