"""Univariate polynomials and sparse homogeneous forms over finite fields.

UniPoly is a dense coefficient vector, low degree first, always trimmed.
Form keeps a map from exponent vectors to nonzero coefficient codes; every
exponent vector has the same total degree, checked at construction.  Both
are immutable and hashable, so they can be shared freely across threads
and used as cache keys.

The text grammar used by the CLI lives here: terms joined by + and -, a
term being an optional coefficient (integer, or a t-polynomial in
parentheses) times a monomial written as x0^3*x1*x2^2.
"""

from __future__ import annotations

import re

from . import config, gf, linalg


class UniPoly:
    """One-variable polynomial; coeffs are element codes, low degree first."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: gf.Field, coeffs):
        codes = []
        for c in coeffs:
            if isinstance(c, gf.FieldElement):
                if c.field != field:
                    raise ValueError("coefficient from a different field")
                codes.append(c.code)
            else:
                codes.append(int(c))
        trimmed = tuple(linalg.u_trim(codes))
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", trimmed)

    def __setattr__(self, *a):
        raise AttributeError("UniPoly is immutable")

    @property
    def degree(self) -> int:
        # zero polynomial reports degree -1
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return (
            isinstance(other, UniPoly)
            and self.field == other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.field.key, self.coeffs))

    def __add__(self, other):
        self._chk(other)
        return UniPoly(self.field, linalg.u_add(self.field, self.coeffs, other.coeffs))

    def __sub__(self, other):
        self._chk(other)
        return UniPoly(self.field, linalg.u_sub(self.field, self.coeffs, other.coeffs))

    def __mul__(self, other):
        self._chk(other)
        return UniPoly(self.field, linalg.u_mul(self.field, self.coeffs, other.coeffs))

    def __divmod__(self, other):
        self._chk(other)
        q, r = linalg.u_divmod(self.field, self.coeffs, other.coeffs)
        return UniPoly(self.field, q), UniPoly(self.field, r)

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def _chk(self, other):
        if not isinstance(other, UniPoly) or other.field != self.field:
            raise ValueError("operands must be UniPoly over one field")

    def monic(self) -> "UniPoly":
        return UniPoly(self.field, linalg.u_monic(self.field, self.coeffs))

    def deriv(self) -> "UniPoly":
        return UniPoly(self.field, linalg.u_deriv(self.field, self.coeffs))

    def eval_at(self, x) -> gf.FieldElement:
        code = x.code if isinstance(x, gf.FieldElement) else int(x)
        return self.field.element(linalg.u_eval(self.field, self.coeffs, code))

    def __repr__(self):
        if self.is_zero():
            return "0"
        parts = []
        for e in range(self.degree, -1, -1):
            c = self.coeffs[e]
            if c == 0:
                continue
            cs = self.field.format(c)
            mono = "" if e == 0 else ("x" if e == 1 else f"x^{e}")
            if mono and cs == "1":
                parts.append(mono)
            elif mono:
                cs = f"({cs})" if "t" in cs else cs
                parts.append(f"{cs}*{mono}")
            else:
                parts.append(f"({cs})" if "t" in cs else cs)
        return "+".join(parts)


def upoly_gcd(f: UniPoly, g: UniPoly) -> UniPoly:
    if f.field != g.field:
        raise ValueError("gcd operands over different fields")
    return UniPoly(f.field, linalg.u_gcd(f.field, f.coeffs, g.coeffs))


def upoly_squarefree(f: UniPoly) -> bool:
    """Whether f has no repeated root over the algebraic closure.

    A vanishing derivative with positive degree means f is a polynomial in
    x^p, hence a p-th power over the (perfect) coefficient field, hence
    not squarefree; no explicit p-th root is needed for the boolean.
    """
    if f.is_zero():
        raise ValueError("squarefreeness of the zero polynomial is undefined")
    if f.degree == 0:
        return True
    d = f.deriv()
    if d.is_zero():
        return False
    return upoly_gcd(f, d).degree == 0


def upoly_roots_in_extension(f: UniPoly, k: int, caps: config.Caps | None = None):
    """All roots of f lying in the degree-k extension, with multiplicities.

    Returns a list of (FieldElement of F_{q^k}, multiplicity), sorted by
    element code.  Only roots rational over that extension are reported.
    """
    if f.is_zero():
        raise ValueError("root finding on the zero polynomial")
    if k < 1:
        raise ValueError("extension degree must be positive")
    E = gf.extension_field(f.field, k, caps=caps)
    lifted = [gf.embed_code(f.field, E, c) for c in f.coeffs]
    out = [
        (E.element(r), mult)
        for r, mult in linalg.u_roots_with_multiplicity(E, lifted)
    ]
    out.sort(key=lambda pair: pair[0].code)
    return out


# ---------------------------------------------------------------------------
# homogeneous forms


class Form:
    """Homogeneous polynomial in nvars variables x0..x(nvars-1).

    terms maps exponent tuples (length nvars, summing to degree) to nonzero
    coefficient codes.  The zero form keeps its declared degree so that
    restriction and arithmetic preserve grading information.
    """

    __slots__ = ("field", "nvars", "degree", "terms")

    def __init__(self, field: gf.Field, nvars: int, degree: int, terms):
        if nvars < 1:
            raise ValueError("a form needs at least one variable")
        if degree < 0:
            raise ValueError("degree must be nonnegative")
        clean = {}
        for exps, c in dict(terms).items():
            code = c.code if isinstance(c, gf.FieldElement) else int(c)
            if code == 0:
                continue
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps} for {nvars} variables")
            if sum(exps) != degree:
                raise ValueError(
                    f"monomial {exps} has degree {sum(exps)}, form declares {degree}"
                )
            clean[exps] = code
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *a):
        raise AttributeError("Form is immutable")

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return (
            isinstance(other, Form)
            and self.field == other.field
            and self.nvars == other.nvars
            and self.degree == other.degree
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash(
            (self.field.key, self.nvars, self.degree, tuple(sorted(self.terms.items())))
        )

    def __add__(self, other):
        self._chk(other)
        if self.is_zero():
            return other
        F = self.field
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = F.add(terms.get(e, 0), c)
        return Form(F, self.nvars, self.degree, terms)

    def __sub__(self, other):
        self._chk(other)
        if self.is_zero():
            return -other
        F = self.field
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = F.sub(terms.get(e, 0), c)
        return Form(F, self.nvars, self.degree, terms)

    def __neg__(self):
        F = self.field
        return Form(
            F, self.nvars, self.degree, {e: F.neg(c) for e, c in self.terms.items()}
        )

    def __mul__(self, other):
        if isinstance(other, Form):
            if other.field != self.field or other.nvars != self.nvars:
                raise ValueError("forms over different rings")
            F = self.field
            terms: dict = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    terms[e] = F.add(terms.get(e, 0), F.mul(c1, c2))
            return Form(F, self.nvars, self.degree + other.degree, terms)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, c) -> "Form":
        F = self.field
        if isinstance(c, gf.FieldElement):
            if c.field != F:
                raise ValueError("scalar from a different field")
            code = c.code
        else:
            code = int(c) % F.p  # integers act through the prime subfield
        if code == 0:
            return Form(F, self.nvars, self.degree, {})
        return Form(
            F,
            self.nvars,
            self.degree,
            {e: F.mul(v, code) for e, v in self.terms.items()},
        )

    def _chk(self, other):
        if (
            not isinstance(other, Form)
            or other.field != self.field
            or other.nvars != self.nvars
        ):
            raise ValueError("forms over different rings")
        if other.degree != self.degree and not (self.is_zero() or other.is_zero()):
            raise ValueError("adding forms of different degrees")

    def map_coeffs(self, fn) -> "Form":
        return Form(
            self.field,
            self.nvars,
            self.degree,
            {e: fn(c) for e, c in self.terms.items()},
        )

    def __repr__(self):
        return format_form(self)


def form_from_dict(field, nvars, degree, terms) -> Form:
    return Form(field, nvars, degree, terms)


def _coord_codes(F: Form, P):
    """Coordinate codes and the field they live in, embedding F's coefficients."""
    field = F.field
    coords = []
    E = field
    for x in P:
        if isinstance(x, gf.FieldElement):
            if x.field.p != field.p:
                raise ValueError("coordinates of wrong characteristic")
            if x.field.m % field.m != 0:
                raise ValueError("coordinate field does not contain the form's field")
            if x.field.m > E.m:
                E = x.field
        coords.append(x)
    codes = []
    for x in coords:
        if isinstance(x, gf.FieldElement):
            codes.append(gf.embed_code(x.field, E, x.code) if x.field != E else x.code)
        else:
            codes.append(gf.embed_code(field, E, int(x)) if E != field else int(x))
    return E, codes


def form_eval(F: Form, P) -> gf.FieldElement:
    """Value of F at the coordinate vector P.

    Coordinates may be FieldElements of any extension of F's field (they
    are pushed into the largest one present) or raw codes in F's own
    field.  Mixed extensions must share the tower.
    """
    P = list(P)
    if len(P) != F.nvars:
        raise ValueError(f"expected {F.nvars} coordinates, got {len(P)}")
    E, codes = _coord_codes(F, P)
    emb = (lambda c: gf.embed_code(F.field, E, c)) if E != F.field else (lambda c: c)
    acc = 0
    for exps, c in F.terms.items():
        v = emb(c)
        for code, e in zip(codes, exps):
            if e:
                if code == 0:
                    v = 0
                    break
                v = E.mul(v, E.pow(code, e))
        acc = E.add(acc, v)
    return E.element(acc)


def form_eval_codes(F: Form, codes, E: gf.Field) -> int:
    """Hot-path evaluation: coordinates as codes in E, result code in E."""
    emb = (lambda c: gf.embed_code(F.field, E, c)) if E != F.field else (lambda c: c)
    acc = 0
    for exps, c in F.terms.items():
        v = emb(c)
        for code, e in zip(codes, exps):
            if e:
                if code == 0:
                    v = 0
                    break
                v = E.mul(v, E.pow(code, e))
        acc = E.add(acc, v)
    return acc


def form_partials(F: Form):
    """The nvars formal partial derivatives, degree d-1 each (or zero)."""
    out = []
    fld = F.field
    deg = max(F.degree - 1, 0)
    for i in range(F.nvars):
        terms = {}
        for exps, c in F.terms.items():
            e = exps[i]
            if e == 0:
                continue
            coef = fld.mul_int(c, e)
            if coef == 0:
                continue
            ne = exps[:i] + (e - 1,) + exps[i + 1 :]
            terms[ne] = fld.add(terms.get(ne, 0), coef)
        out.append(Form(fld, F.nvars, deg, terms))
    return out


def _rows_of(H):
    rows = getattr(H, "basis", H)
    out = []
    for row in rows:
        out.append(
            tuple(
                c.code if isinstance(c, gf.FieldElement) else int(c) for c in row
            )
        )
    return out


def substitute_rows(F: Form, rows) -> Form:
    """F(u . B) for a raw parametrization matrix B; no basis normalization."""
    fld = F.field
    B = _rows_of(rows)
    k = len(B)
    if any(len(r) != F.nvars for r in B):
        raise ValueError("parametrization rows must have nvars columns")
    # linear forms x_j = sum_i u_i B[i][j] as Forms in k variables
    unit = [tuple(1 if t == i else 0 for t in range(k)) for i in range(k)]
    lin = []
    for j in range(F.nvars):
        terms = {unit[i]: B[i][j] for i in range(k) if B[i][j]}
        lin.append(Form(fld, k, 1, terms))
    one = Form(fld, k, 0, {tuple([0] * k): 1})
    pow_cache: dict = {}

    def lpow(j, e):
        got = pow_cache.get((j, e))
        if got is None:
            got = one
            for _ in range(e):
                got = got * lin[j]
            pow_cache[(j, e)] = got
        return got

    acc = Form(fld, k, F.degree, {})
    for exps, c in F.terms.items():
        term = one.scale(fld.element(c))
        for j, e in enumerate(exps):
            if e:
                term = term * lpow(j, e)
        acc = acc + term
    return acc


def restrict_to_subspace(F: Form, H) -> Form:
    """Restriction of F to a linear subspace, as a form in dim+1 parameters.

    H may be a LinearSubspace (its reduced basis is used as is) or a raw
    matrix of spanning rows, which is first brought to reduced row echelon
    form so the answer does not depend on the presentation.
    """
    if hasattr(H, "basis"):
        rows = [tuple(r) for r in H.basis]
    else:
        raw = _rows_of(H)
        red, _ = linalg.rref(F.field, raw)
        rows = [r for r in red if any(r)]
    if not rows:
        raise ValueError("empty subspace")
    return substitute_rows(F, rows)


def form_pow(F: Form, e: int, caps: config.Caps | None = None) -> Form:
    """F^e, using the Frobenius shortcut when e is a power of the characteristic."""
    if e < 1:
        raise ValueError("exponent must be >= 1")
    caps = caps or config.current_caps()
    caps.check_form_degree(F.degree * e)
    p = F.field.p
    x = e
    while x > 1 and x % p == 0:
        x //= p
    if x == 1 and e > 1:
        # (sum c m)^(p^s) = sum c^(p^s) m^(p^s)
        fld = F.field
        return Form(
            fld,
            F.nvars,
            F.degree * e,
            {
                tuple(ei * e for ei in exps): fld.pow(c, e)
                for exps, c in F.terms.items()
            },
        )
    result = Form(F.field, F.nvars, 0, {tuple([0] * F.nvars): 1})
    base = F
    n = e
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


def binary_squarefree(F: Form) -> bool:
    """Whether a nonzero binary form is a product of distinct linear forms.

    Splits off the multiplicity at [1:0] (the power of x1 dividing F) and
    tests the dehomogenization at x1=1 for squarefreeness.
    """
    if F.nvars != 2:
        raise ValueError("binary forms only")
    if F.is_zero():
        raise ValueError("zero form")
    max_e0 = max(e[0] for e in F.terms)
    inf_mult = F.degree - max_e0
    if inf_mult > 1:
        return False
    coeffs = [0] * (max_e0 + 1)
    for (e0, _e1), c in F.terms.items():
        coeffs[e0] = c
    f = UniPoly(F.field, coeffs)
    if f.degree == 0:
        return True
    return upoly_squarefree(f)


def binary_dehomogenize(F: Form):
    """(multiplicity of the root [1:0], the dehomogenization F(x, 1)).

    deg F(x,1) = degree - that multiplicity; finite roots keep their
    multiplicities in F(x,1).
    """
    if F.nvars != 2:
        raise ValueError("binary forms only")
    if F.is_zero():
        raise ValueError("zero form")
    max_e0 = max(e[0] for e in F.terms)
    coeffs = [0] * (max_e0 + 1)
    for (e0, _e1), c in F.terms.items():
        coeffs[e0] = c
    return F.degree - max_e0, UniPoly(F.field, coeffs)


# ---------------------------------------------------------------------------
# text grammar

_TOKEN = re.compile(r"\s*(\(|\)|\+|-|\*|\^|x\d+|\d+|t)")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"bad form text at offset {pos}: {text!r}")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


def parse_form(field: gf.Field, text: str, nvars: int | None = None) -> Form:
    """Parse the CLI polynomial grammar into a Form.

    Terms are joined by + and -; a term is an optional coefficient
    (integer, or a parenthesized t-polynomial) times a product of x<i>^<e>
    factors.  Homogeneity is enforced; nvars is inferred from the largest
    variable index when not given.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise ValueError("empty form text")
    terms = []  # (coeff code, {var: exp})
    i = 0
    sign = 1
    expect_term = True
    cur_coeff = None
    cur_exps: dict[int, int] = {}
    cur_has_body = False

    def flush():
        nonlocal cur_coeff, cur_exps, cur_has_body, sign
        if not cur_has_body:
            raise ValueError(f"empty term in form text {text!r}")
        code = 1 if cur_coeff is None else cur_coeff
        if sign < 0:
            code = field.neg(code)
        terms.append((code, dict(cur_exps)))
        cur_coeff = None
        cur_exps = {}
        cur_has_body = False
        sign = 1

    while i < len(tokens):
        tok = tokens[i]
        if tok in "+-":
            if expect_term:
                if tok == "-":
                    sign = -sign
                i += 1
                continue
            flush()
            sign = 1 if tok == "+" else -1
            i += 1
            expect_term = True
            continue
        if tok == "(":
            # parenthesized t-polynomial coefficient
            depth = 1
            j = i + 1
            while j < len(tokens) and depth:
                if tokens[j] == "(":
                    depth += 1
                elif tokens[j] == ")":
                    depth -= 1
                j += 1
            if depth:
                raise ValueError(f"unbalanced parentheses in form text {text!r}")
            inner = "".join(tokens[i + 1 : j - 1])
            elt = gf.parse_element(field, inner)
            c = elt.code
            cur_coeff = c if cur_coeff is None else field.mul(cur_coeff, c)
            cur_has_body = True
            expect_term = False
            i = j
            if i < len(tokens) and tokens[i] == "*":
                i += 1
            continue
        if tok.isdigit():
            c = int(tok) % field.p
            code = c if field.m == 1 else field.encode([c])
            cur_coeff = code if cur_coeff is None else field.mul(cur_coeff, code)
            cur_has_body = True
            expect_term = False
            i += 1
            if i < len(tokens) and tokens[i] == "*":
                i += 1
            continue
        if tok == "t":
            raise ValueError(
                f"bare t in form text {text!r}; parenthesize t-polynomial coefficients"
            )
        if tok.startswith("x"):
            var = int(tok[1:])
            e = 1
            i += 1
            if i < len(tokens) and tokens[i] == "^":
                i += 1
                if i >= len(tokens) or not tokens[i].isdigit():
                    raise ValueError(f"bad exponent in form text {text!r}")
                e = int(tokens[i])
                i += 1
            cur_exps[var] = cur_exps.get(var, 0) + e
            cur_has_body = True
            expect_term = False
            if i < len(tokens) and tokens[i] == "*":
                i += 1
            continue
        raise ValueError(f"unexpected {tok!r} in form text {text!r}")
    if expect_term:
        raise ValueError(f"dangling sign in form text {text!r}")
    flush()

    seen_max = max((max(e, default=-1) for _, e in terms), default=-1)
    if nvars is None:
        nvars = seen_max + 1
        if nvars < 1:
            raise ValueError("cannot infer variable count from a constant form")
    elif seen_max >= nvars:
        raise ValueError(f"variable x{seen_max} out of range for {nvars} variables")
    degrees = {sum(e.values()) for _, e in terms}
    if len(degrees) > 1:
        raise ValueError(f"form text is not homogeneous: degrees {sorted(degrees)}")
    degree = degrees.pop()
    acc: dict = {}
    for code, e in terms:
        vec = tuple(e.get(v, 0) for v in range(nvars))
        acc[vec] = field.add(acc.get(vec, 0), code)
    return Form(field, nvars, degree, acc)


def format_form(F: Form) -> str:
    """Canonical text for a form; parse_form(format_form(F)) round-trips."""
    if F.is_zero():
        return "0"
    parts = []
    for exps in sorted(F.terms, reverse=True):
        c = F.terms[exps]
        mono = "*".join(
            f"x{i}^{e}" if e > 1 else f"x{i}" for i, e in enumerate(exps) if e
        )
        cs = F.field.format(c)
        if not mono:
            parts.append(f"({cs})" if "t" in cs else cs)
        elif cs == "1":
            parts.append(mono)
        else:
            cs = f"({cs})" if "t" in cs else cs
            parts.append(f"{cs}*{mono}")
    return " + ".join(parts)


def monomials_of_degree(nvars: int, degree: int):
    """All exponent vectors of the given total degree, lex order."""
    if nvars == 1:
        yield (degree,)
        return
    for first in range(degree, -1, -1):
        for rest in monomials_of_degree(nvars - 1, degree - first):
            yield (first,) + rest


def form_frobenius_coeffs(F: Form, q: int) -> Form:
    """Coefficient-wise q-th power (q a power of the characteristic)."""
    fld = F.field
    p = fld.p
    e = 0
    x = q
    while x > 1:
        if x % p:
            raise ValueError(f"{q} is not a power of the characteristic")
        x //= p
        e += 1
    return F.map_coeffs(lambda c: fld.frob_power(c, e))
