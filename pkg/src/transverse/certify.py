"""Exact and Las-Vegas certification: emptiness, dimension, smoothness,
reducedness, transversality.

Emptiness over the algebraic closure is decided by a Macaulay rank test:
the degree-N piece of the ideal spans every degree-N form for some N up to
the classical effective bound N* = (sum of the r+1 largest generator
degrees) - r exactly when the scheme is empty.  Spanning at any N is sound
on its own; failure at N* is conclusive the other way.

Dimension upper bounds come in two strengths.  dim_upper_bound slices by
random hyperplanes over an extension with at least 64 elements: if t+1
slices kill the scheme, its dimension is at most t (sound
unconditionally); after R failures it reports undetermined.
dim_at_most_exact replaces randomness by a scan over the one-parameter
family sum_j c^j x_j of hyperplanes: a point kills at most n parameter
values (Vandermonde), and a positive-dimensional component is contained in
at most n family members, so over a field with more than n * B elements
(B a Bezout bound on the total component count) the scan is complete in
both directions.

Smoothness of a section is emptiness of its Jacobian scheme; reducedness
is the Jacobian dimension dropping below divisor dimension.  Both reuse
the machinery above and keep an exact binary-form fast path for lines.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import config, gf, linalg, locus, poly, projgeom

_LV_MIN_FIELD = 64
_LV_RETRIES = 8
_SECTION_RESCUE_TRIES = 12
_EXACT_BRANCH_BUDGET = 250_000
_WITNESS_KMAX = 6


# ---------------------------------------------------------------------------
# point enumeration


def _specialize_last(g: poly.Form, prefix, E: gf.Field):
    """Coefficients (codes in E) of g(prefix, z) as a polynomial in z."""
    n = g.nvars - 1
    emb = (lambda c: gf.embed_code(g.field, E, c)) if E != g.field else (lambda c: c)
    coeffs = [0] * (g.degree + 1)
    for exps, c in g.terms.items():
        v = emb(c)
        for code, e in zip(prefix, exps):
            if e:
                if code == 0:
                    v = 0
                    break
                v = E.mul(v, E.pow(code, e))
        if v:
            ze = exps[n]
            coeffs[ze] = E.add(coeffs[ze], v)
    return linalg.u_trim(coeffs)


def _points_over(S: locus.SchemeSpec, E: gf.Field, caps: config.Caps):
    """Normalized coordinate tuples of S(E), by sweeping normalized
    prefixes and root-finding in the last coordinate."""
    n = S.ambient
    gens = S.nonzero_gens()
    if not gens:
        raise ValueError("scheme with no nonzero generators is the whole space")
    out = []
    if n == 0:
        pt = (1,)
        if S.vanishes_at_codes(pt, E):
            out.append(pt)
        return out
    caps.check_enum(
        projgeom.count_points(n - 1, E) + 1, "scheme point sweep"
    )
    # the point with all coordinates but the last equal to zero
    last = (0,) * n + (1,)
    if S.vanishes_at_codes(last, E):
        out.append(last)
    for prefix in projgeom.enumerate_point_codes(n - 1, E, caps=caps):
        g = None
        dead = False
        for gen in gens:
            spec = _specialize_last(gen, prefix, E)
            if not spec:
                continue
            g = spec if g is None else linalg.u_gcd(E, g, spec)
            if len(g) == 1:
                dead = True
                break
        if dead:
            continue
        if g is None:
            # every generator vanishes along this affine line
            for z in range(E.order):
                out.append(prefix + (z,))
            continue
        for z in linalg.u_distinct_roots(E, g):
            out.append(prefix + (z,))
    return out


def _residue_degree(coords, E: gf.Field, base_m: int, k: int) -> int:
    """Smallest j dividing k with all coordinates in F_{q^j}, q = p^base_m."""
    for j in range(1, k):
        if k % j:
            continue
        s = base_m * j
        if all(E.frob_power(c, s) == c for c in coords):
            return j
    return k


def scheme_points_upto(S: locus.SchemeSpec, kmax: int, caps: config.Caps | None = None):
    """Every geometric point of residue degree <= kmax, each exactly once.

    A point rational over F_{q^j} also lives in every F_{q^(j*i)}; the
    residue-degree filter reports it only at its exact degree, so the
    sweep over k = 1..kmax never duplicates across subfield embeddings.
    Conjugate points of the same closed point are distinct entries.
    """
    caps = caps or config.current_caps()
    if kmax < 1:
        raise ValueError("kmax must be at least 1")
    base = S.field
    found = []
    for k in range(1, kmax + 1):
        caps.check_field(base.p, base.m * k)
        E = gf.extension_field(base, k, caps=caps)
        pts = []
        for coords in _points_over(S, E, caps):
            if k > 1 and _residue_degree(coords, E, base.m, k) != k:
                continue
            pts.append(coords)
        pts.sort()
        found.extend(projgeom.ProjectivePoint(E, c) for c in pts)
    return found


# ---------------------------------------------------------------------------
# emptiness


@dataclass(frozen=True)
class EmptinessCertificate:
    scheme: locus.SchemeSpec
    degree_N: int
    verdict: str  # "empty" | "nonempty" | "inconclusive"
    witness: projgeom.ProjectivePoint | None = None

    def to_dict(self):
        d = {"verdict": self.verdict, "macaulay_degree": self.degree_N}
        if self.witness is not None:
            d["witness"] = projgeom.format_point(self.witness)
            d["witness_field_degree"] = self.witness.field.m // self.scheme.field.m
        return d


def _monomial_index(n_vars: int, N: int):
    mons = list(poly.monomials_of_degree(n_vars, N))
    return mons, {m: i for i, m in enumerate(mons)}


def _macaulay_spans(gens, fld: gf.Field, nvars: int, N: int) -> bool:
    """Whether degree-N multiples of the generators span all degree-N forms."""
    mons, index = _monomial_index(nvars, N)
    ncols = len(mons)
    rows = []
    for g in gens:
        if g.degree > N:
            continue
        for mult in poly.monomials_of_degree(nvars, N - g.degree):
            row = [0] * ncols
            for exps, c in g.terms.items():
                tot = tuple(a + b for a, b in zip(exps, mult))
                row[index[tot]] = fld.add(row[index[tot]], c)
            rows.append(row)
    if len(rows) < ncols:
        return False
    return linalg.rank(fld, rows, ncols=ncols, stop_at=ncols) == ncols


def macaulay_is_empty(S: locus.SchemeSpec):
    """Exact emptiness over the algebraic closure; returns (bool, N used).

    Requires more generators than the ambient dimension (otherwise the
    scheme cannot be empty and the caller should not ask).
    """
    gens = S.nonzero_gens()
    r = S.ambient
    if any(g.degree == 0 for g in gens):
        return True, 0  # a unit is among the generators
    if len(gens) <= r:
        return False, 0
    degs = sorted((g.degree for g in gens), reverse=True)
    n_star = sum(degs[: r + 1]) - r
    for N in range(degs[0], n_star + 1):
        if _macaulay_spans(gens, S.field, S.nvars, N):
            return True, N
    return False, n_star


def is_empty_projective(
    S: locus.SchemeSpec,
    want_witness: bool = True,
    caps: config.Caps | None = None,
) -> EmptinessCertificate:
    """Certified emptiness of S over the algebraic closure.

    Fewer generators than ambient-dimension-plus-one forces a nonempty
    scheme; otherwise the Macaulay test decides.  Nonempty verdicts carry
    an enumerated witness when one exists at low residue degree.
    """
    caps = caps or config.current_caps()
    gens = S.nonzero_gens()
    r = S.ambient
    if any(g.degree == 0 for g in gens):
        return EmptinessCertificate(S, 0, "empty")
    if not gens:
        # the zero ideal cuts out the whole space
        origin = projgeom.ProjectivePoint(S.field, (1,) + (0,) * r)
        return EmptinessCertificate(S, 0, "nonempty", witness=origin)
    few_gens = len(gens) <= r
    N = 0
    if not few_gens:
        empty, N = macaulay_is_empty(S)
        if empty:
            return EmptinessCertificate(S, N, "empty")
    if want_witness:
        witness = _hunt_witness(S, caps)
        if witness is not None:
            return EmptinessCertificate(S, N, "nonempty", witness=witness)
        if not few_gens:
            # nonemptiness is certain, but no point was exhibited in budget
            return EmptinessCertificate(S, N, "inconclusive")
    return EmptinessCertificate(S, N, "nonempty")


def _hunt_witness(S: locus.SchemeSpec, caps: config.Caps):
    """First point of minimal residue degree within field and enum caps."""
    for k in range(1, _WITNESS_KMAX + 1):
        if not caps.field_order_ok(S.field.p, S.field.m * k):
            return None
        E = gf.extension_field(S.field, k, caps=caps)
        try:
            pts = _points_over(S, E, caps)
        except config.CapExceededError:
            return None
        if pts:
            return projgeom.ProjectivePoint(E, min(pts))
    return None


# ---------------------------------------------------------------------------
# dimension


@dataclass(frozen=True)
class DimensionCertificate:
    scheme: locus.SchemeSpec
    bound: int
    verdict: str  # "at-most" | "undetermined"
    slices: tuple = ()
    retries_used: int = 0
    seed: int | None = None

    def holds(self) -> bool:
        return self.verdict == "at-most"

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "bound": self.bound,
            "retries_used": self.retries_used,
            "seed": self.seed,
            "slices": [list(s) for s in self.slices],
        }


def _lift_scheme(S: locus.SchemeSpec, E: gf.Field) -> locus.SchemeSpec:
    if E == S.field:
        return S
    gens = [
        poly.Form(
            E,
            g.nvars,
            g.degree,
            {e: gf.embed_code(S.field, E, c) for e, c in g.terms.items()},
        )
        for g in S.gens
    ]
    return locus.SchemeSpec(E, S.nvars, gens)


def _slice_by(S: locus.SchemeSpec, row) -> locus.SchemeSpec:
    """Intersect with the hyperplane row . x = 0, rewritten in the
    hyperplane's own coordinates (one variable fewer), so downstream rank
    tests shrink.  Any kernel basis works; emptiness and dimension do not
    see the change of coordinates."""
    rows = linalg.kernel(S.field, [list(row)], S.nvars)
    return locus.SchemeSpec(
        S.field, S.nvars - 1, [poly.substitute_rows(g, rows) for g in S.gens]
    )


def dim_upper_bound(
    S: locus.SchemeSpec,
    t: int,
    retries: int = _LV_RETRIES,
    rng: random.Random | None = None,
    seed: int | None = None,
    caps: config.Caps | None = None,
) -> DimensionCertificate:
    """Las-Vegas certificate that dim S <= t; never certifies falsely.

    Slices by t+1 random hyperplanes over an extension with >= 64
    elements, substituting each one away so the emptiness test runs in a
    progressively smaller ring; emptiness of the fully sliced scheme is
    exact, so "at-most" is sound.  "undetermined" carries no information.
    Each recorded slice is a coefficient row in the coordinates of its own
    level, not of the original ambient space.
    """
    caps = caps or config.current_caps()
    if t < -1:
        raise ValueError("dimension bound below -1 is meaningless")
    if rng is None:
        rng = random.Random(0 if seed is None else seed)
    if t == -1:
        empty, _ = macaulay_is_empty(S)
        return DimensionCertificate(
            S, -1, "at-most" if empty else "undetermined", (), 0, seed
        )
    if t >= S.ambient:
        return DimensionCertificate(S, t, "at-most", (), 0, seed)
    k = 1
    while S.field.order**k < _LV_MIN_FIELD:
        k += 1
    caps.check_field(S.field.p, S.field.m * k)
    E = gf.extension_field(S.field, k, caps=caps)
    lifted = _lift_scheme(S, E)
    for attempt in range(1, retries + 1):
        cur = lifted
        slices = []
        for _ in range(t + 1):
            while True:
                row = tuple(rng.randrange(E.order) for _ in range(cur.nvars))
                if any(row):
                    break
            slices.append(row)
            cur = _slice_by(cur, row)
        empty, _ = macaulay_is_empty(cur)
        if empty:
            return DimensionCertificate(
                S, t, "at-most", tuple(slices), attempt, seed
            )
    return DimensionCertificate(S, t, "undetermined", (), retries, seed)


def _bezout_component_bound(S: locus.SchemeSpec) -> int:
    degs = sorted((g.degree for g in S.nonzero_gens()), reverse=True)
    acc = 1
    for d in degs[: S.ambient]:
        acc *= d
    return acc


def _moment_row(E: gf.Field, nvars: int, c: int):
    row = []
    acc = 1
    for _ in range(nvars):
        row.append(acc)
        acc = E.mul(acc, c)
    return row


def dim_at_most_exact(
    S: locus.SchemeSpec,
    t: int,
    caps: config.Caps | None = None,
) -> bool:
    """Deterministic, exact decision of dim S <= t.

    Scans the hyperplane family sum_j c^j x_j over a field chosen large
    enough that, whenever dim S <= t, some member meets every
    top-dimensional component properly; a chain of t+1 such slices ending
    empty certifies the bound, and exhausting the family refutes it.
    Raises SearchInfeasibleError when the scan tree exceeds the budget.
    """
    caps = caps or config.current_caps()
    if t < -1:
        raise ValueError("dimension bound below -1 is meaningless")
    if t == -1:
        return macaulay_is_empty(S)[0]
    if t >= S.ambient:
        return True
    n = S.ambient
    B = _bezout_component_bound(S)
    need = n * B + 1
    k = 1
    while S.field.order**k < need:
        k += 1
    caps.check_field(S.field.p, S.field.m * k)
    E = gf.extension_field(S.field, k, caps=caps)
    branch = E.order
    work = 1
    for _ in range(t + 1):
        work *= branch
        if work > _EXACT_BRANCH_BUDGET:
            raise config.SearchInfeasibleError(
                f"exact dimension scan needs about {branch}^{t + 1} emptiness "
                f"tests, over the {_EXACT_BRANCH_BUDGET} budget"
            )
    lifted = _lift_scheme(S, E)
    return _exact_scan(lifted, t, E)


def _exact_scan(S: locus.SchemeSpec, t: int, E: gf.Field) -> bool:
    if macaulay_is_empty(S)[0]:
        return True
    if t == -1:
        return False
    # slicing by substitution keeps every deeper emptiness test in a
    # smaller ring; family completeness is unaffected because the member
    # count n*B+1 only shrinks with the ambient dimension
    for c in range(E.order):
        if _exact_scan(_slice_by(S, _moment_row(E, S.nvars, c)), t - 1, E):
            return True
    return False


# ---------------------------------------------------------------------------
# smoothness and reducedness of sections


def section_form(X: locus.Hypersurface, H: projgeom.LinearSubspace) -> poly.Form:
    if H.field != X.field:
        raise ValueError("subspace must live over the base field of X")
    if H.ambient != X.ambient:
        raise ValueError("ambient dimension mismatch")
    return poly.restrict_to_subspace(X.form, H)


def jacobian_scheme(G: poly.Form) -> locus.SchemeSpec:
    gens = [G] + [g for g in poly.form_partials(G) if not g.is_zero()]
    return locus.SchemeSpec(G.field, G.nvars, gens)


def is_smooth_form(G: poly.Form) -> bool:
    """Whether V(G) is smooth over the closure (empty V allowed, P^0 too)."""
    if G.is_zero():
        raise config.NotProperError("zero form does not cut a hypersurface")
    if G.degree == 0:
        return True  # a unit cuts out the empty scheme
    if G.nvars == 1:
        return True  # nonzero form in one variable never vanishes on P^0
    if G.nvars == 2:
        return poly.binary_squarefree(G)
    J = jacobian_scheme(G)
    if len(J.nonzero_gens()) <= J.ambient:
        return False
    return macaulay_is_empty(J)[0]


def is_smooth_section(X: locus.Hypersurface, H: projgeom.LinearSubspace) -> bool:
    """Whether X cap H is smooth as a hypersurface of H ~ P^r.

    The restriction must be nonzero (otherwise the section is improper and
    a NotProperError escapes).  Lines use the exact squarefree fast path;
    higher sections run the Macaulay test on the Jacobian scheme.
    """
    G = section_form(X, H)
    if G.is_zero():
        raise config.NotProperError("the subspace lies inside the hypersurface")
    return is_smooth_form(G)


def is_reduced_form(G: poly.Form, rng: random.Random | None = None) -> bool:
    """Whether the form G is squarefree, i.e. cuts a reduced hypersurface.

    Vanishing of every partial derivative makes G a p-th power (perfect
    coefficient field), hence non-reduced.  Otherwise G is squarefree
    exactly when its Jacobian scheme has dimension at most nvars - 3
    (singular locus smaller than a divisor); tried Las-Vegas first, then
    decided by the exact scan.
    """
    if G.is_zero():
        raise config.NotProperError("zero form does not cut a hypersurface")
    if G.degree == 0:
        return True
    if G.nvars == 1:
        # u0^d: reduced only for d = 1
        return G.degree == 1
    if G.nvars == 2:
        return poly.binary_squarefree(G)
    parts = [g for g in poly.form_partials(G) if not g.is_zero()]
    if not parts:
        return False
    J = locus.SchemeSpec(G.field, G.nvars, [G] + parts)
    t = G.nvars - 3  # divisor dimension minus one, in P^(nvars-1)
    lv = dim_upper_bound(J, t, rng=rng)
    if lv.holds():
        return True
    if G.nvars >= 4 and _squarefree_plane_section(G, rng):
        return True
    return dim_at_most_exact(J, t)


def _squarefree_plane_section(G: poly.Form, rng: random.Random | None) -> bool:
    """One-sided rescue when the dimension chain misses: a square factor of
    G survives into every proper plane restriction, so a single squarefree
    ternary section settles squarefreeness.  False carries no information.
    """
    rng = rng or random.Random(0)
    k = 1
    while G.field.order**k < _LV_MIN_FIELD:
        k += 1
    E = gf.extension_field(G.field, k)
    lifted = poly.Form(
        E,
        G.nvars,
        G.degree,
        {e: gf.embed_code(G.field, E, c) for e, c in G.terms.items()},
    )
    for _ in range(_SECTION_RESCUE_TRIES):
        rows = [
            [rng.randrange(E.order) for _ in range(G.nvars)] for _ in range(3)
        ]
        if linalg.rank(E, [list(r) for r in rows], ncols=G.nvars) < 3:
            continue
        sec = poly.substitute_rows(lifted, rows)
        if sec.is_zero():
            continue
        try:
            if is_reduced_form(sec, rng=rng):
                return True
        except config.SearchInfeasibleError:
            break
    return False


def is_reduced_section(
    X: locus.Hypersurface,
    H: projgeom.LinearSubspace,
    rng: random.Random | None = None,
) -> bool:
    """Whether X cap H is proper and cut by a squarefree restriction."""
    G = section_form(X, H)
    if G.is_zero():
        raise config.NotProperError("the subspace lies inside the hypersurface")
    return is_reduced_form(G, rng=rng)


# ---------------------------------------------------------------------------
# transversality


def ensure_smooth(X: locus.Hypersurface) -> bool:
    """Certified smoothness of X itself, cached on the hypersurface."""
    got = X.cache.get("smooth")
    if got is None:
        S = locus.singular_scheme(X)
        if len(S.nonzero_gens()) <= S.ambient:
            got = False
        else:
            got = macaulay_is_empty(S)[0]
        X.cache["smooth"] = got
    return got


def _meets_singular_locus(X: locus.Hypersurface, H: projgeom.LinearSubspace) -> bool:
    if ensure_smooth(X):
        return False
    cut = [
        poly.Form(
            X.field,
            X.ambient + 1,
            1,
            {
                tuple(1 if j == i else 0 for j in range(X.ambient + 1)): c
                for i, c in enumerate(row)
                if c
            },
        )
        for row in projgeom.dual(H).basis
    ]
    S = locus.singular_scheme(X)
    aug = locus.SchemeSpec(X.field, S.nvars, list(S.gens) + cut)
    if len(aug.nonzero_gens()) <= aug.ambient:
        return True
    return not macaulay_is_empty(aug)[0]


def is_transverse(X: locus.Hypersurface, H: projgeom.LinearSubspace) -> bool:
    """Whether H misses Sing(X) and meets X in a smooth section.

    An improper section (H inside X) reports False rather than raising;
    for a point this reduces to not lying on X.
    """
    if H.ambient != X.ambient or H.field != X.field:
        raise ValueError("subspace and hypersurface do not match")
    try:
        smooth = is_smooth_section(X, H)
    except config.NotProperError:
        return False
    if not smooth:
        return False
    if H.dim < X.ambient and _meets_singular_locus(X, H):
        return False
    return True


def is_very_transverse(
    X: locus.Hypersurface,
    H: projgeom.LinearSubspace,
    rng: random.Random | None = None,
    exact: bool = False,
) -> bool:
    """Whether H extends to a transverse hyperplane inside its tangency cone.

    For hyperplanes this is plain transversality.  For smaller r it adds
    the requirement that the locus of X-points whose tangent hyperplane
    contains H has dimension at most n - r - 2.  With exact=False an
    undetermined dimension certificate is conservatively rejected; with
    exact=True the deterministic scan settles it.
    """
    if not ensure_smooth(X):
        raise ValueError("very-transversality is defined for smooth X only")
    n = X.ambient
    r = H.dim
    if not is_transverse(X, H):
        return False
    if r >= n - 1:
        return True
    t = n - r - 2
    T = locus.tangency_locus(X, H)
    lv = dim_upper_bound(T, t, rng=rng)
    if lv.holds():
        return True
    if exact:
        return dim_at_most_exact(T, t)
    return False
