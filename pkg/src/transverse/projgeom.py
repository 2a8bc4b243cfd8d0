"""Projective points, canonical linear subspaces, duality and pencils.

Points are normalized so the first nonzero coordinate is 1; subspaces are
stored as reduced-row-echelon bases over the base field, so equality of
either is plain tuple equality.  All enumerations run in one fixed
lexicographic order to keep audit counts reproducible.

Subspaces live over the base field only; points may live over any
extension in the same tower.  Enumeration of r-planes is always anchored:
either a pencil through a fixed (r-1)-plane, or the aggregation of those
pencils over a point orbit (used for the full line sets in low dimension).
"""

from __future__ import annotations

import itertools

from . import config, gf, linalg


class ProjectivePoint:
    """A point of P^n, coords normalized to leading coefficient one."""

    __slots__ = ("field", "coords")

    def __init__(self, field: gf.Field, coords):
        codes = [
            c.code if isinstance(c, gf.FieldElement) else int(c) for c in coords
        ]
        if not any(codes):
            raise ValueError("the zero vector is not a projective point")
        lead = next(i for i, c in enumerate(codes) if c)
        if codes[lead] != 1:
            inv = field.inv(codes[lead])
            codes = [field.mul(inv, c) for c in codes]
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coords", tuple(codes))

    def __setattr__(self, *a):
        raise AttributeError("ProjectivePoint is immutable")

    @property
    def ambient(self) -> int:
        return len(self.coords) - 1

    def elements(self):
        return tuple(self.field.element(c) for c in self.coords)

    def __eq__(self, other):
        return (
            isinstance(other, ProjectivePoint)
            and self.field == other.field
            and self.coords == other.coords
        )

    def __hash__(self):
        return hash((self.field.key, self.coords))

    def __repr__(self):
        return "[" + ":".join(self.field.format(c) for c in self.coords) + "]"


class LinearSubspace:
    """An r-plane in P^n over the base field, canonical RREF basis."""

    __slots__ = ("field", "basis")

    def __init__(self, field: gf.Field, basis):
        rows = tuple(tuple(int(c) for c in row) for row in basis)
        if not rows:
            raise ValueError("a subspace needs at least one basis row")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "basis", rows)

    def __setattr__(self, *a):
        raise AttributeError("LinearSubspace is immutable")

    @property
    def dim(self) -> int:
        return len(self.basis) - 1

    @property
    def ambient(self) -> int:
        return len(self.basis[0]) - 1

    def __eq__(self, other):
        return (
            isinstance(other, LinearSubspace)
            and self.field == other.field
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash((self.field.key, self.basis))

    def __repr__(self):
        return format_subspace(self)


def subspace_from_rows(field: gf.Field, rows) -> LinearSubspace:
    """Canonical subspace spanned by the rows; idempotent on RREF input."""
    raw = []
    for row in rows:
        raw.append(
            tuple(c.code if isinstance(c, gf.FieldElement) else int(c) for c in row)
        )
    if not raw:
        raise ValueError("no rows given")
    if len({len(r) for r in raw}) != 1:
        raise ValueError("rows of inconsistent length")
    red, _ = linalg.rref(field, raw)
    basis = [r for r in red if any(r)]
    if not basis:
        raise ValueError("rows span only the zero vector")
    return LinearSubspace(field, basis)


def point_subspace(P: ProjectivePoint) -> LinearSubspace:
    """The 0-plane at a base-field point."""
    return LinearSubspace(P.field, [P.coords])


def enumerate_point_codes(n: int, field: gf.Field, caps: config.Caps | None = None):
    """Normalized coordinate tuples of P^n(field), lexicographic by leading
    index then by suffix; the raw-code twin of enumerate_points."""
    caps = caps or config.current_caps()
    Q = field.order
    total = (Q ** (n + 1) - 1) // (Q - 1)
    caps.check_enum(total, "projective point enumeration")
    for lead in range(n + 1):
        prefix = (0,) * lead + (1,)
        for suffix in itertools.product(range(Q), repeat=n - lead):
            yield prefix + suffix


def enumerate_points(n: int, field: gf.Field, caps: config.Caps | None = None):
    """Every point of P^n(field) exactly once, deterministic order."""
    for coords in enumerate_point_codes(n, field, caps=caps):
        yield ProjectivePoint(field, coords)


def count_points(n: int, field: gf.Field) -> int:
    Q = field.order
    return (Q ** (n + 1) - 1) // (Q - 1)


def enumerate_superspaces(H: LinearSubspace, r: int, caps: config.Caps | None = None):
    """All r-planes containing H, for r = dim(H) + 1; each exactly once.

    Cosets of H in the ambient space have unique representatives supported
    on H's non-pivot columns, so the pencil is indexed by the points of a
    projective space of dimension n - r.
    """
    n = H.ambient
    if r != H.dim + 1:
        raise ValueError(f"can only extend dim {H.dim} by one, asked for {r}")
    if r > n:
        raise ValueError(f"no {r}-planes in P^{n}")
    pivots = []
    for row in H.basis:
        pivots.append(next(i for i, c in enumerate(row) if c))
    free = [j for j in range(n + 1) if j not in pivots]
    return _superspace_stream(H, free, caps)


def _superspace_stream(H, free, caps):
    n = H.ambient
    for rep in enumerate_point_codes(len(free) - 1, H.field, caps=caps):
        vec = [0] * (n + 1)
        for j, c in zip(free, rep):
            vec[j] = c
        yield subspace_from_rows(H.field, list(H.basis) + [tuple(vec)])


def all_lines(n: int, field: gf.Field, caps: config.Caps | None = None):
    """Every line of P^n(field), by aggregating the pencils through each
    point and keeping the first appearance."""
    caps = caps or config.current_caps()
    Q = field.order
    npts = count_points(n, field)
    caps.check_enum(npts * count_points(n - 1, field), "line enumeration")
    seen = set()
    for P in enumerate_points(n, field, caps=caps):
        base = point_subspace(P)
        for L in enumerate_superspaces(base, 1, caps=caps):
            if L.basis not in seen:
                seen.add(L.basis)
                yield L


def count_lines(n: int, field: gf.Field) -> int:
    """(number of points) * (pencil size) / (points per line), exact."""
    q = field.order
    num = count_points(n, field) * count_points(n - 1, field)
    return num // (q + 1)


def all_hyperplanes(n: int, field: gf.Field, caps: config.Caps | None = None):
    """Every hyperplane of P^n(field) exactly once, as the kernel of each
    normalized dual point; order follows enumerate_point_codes."""
    for w in enumerate_point_codes(n, field, caps=caps):
        rows = linalg.kernel(field, [list(w)], n + 1)
        yield subspace_from_rows(field, rows)


def dual(H: LinearSubspace) -> LinearSubspace:
    """The annihilator of H in the dual projective space."""
    n = H.ambient
    ker = linalg.kernel(H.field, H.basis, n + 1)
    if not ker:
        raise ValueError("the whole space has empty dual")
    return subspace_from_rows(H.field, ker)


def subspace_contains(H: LinearSubspace, P: ProjectivePoint) -> bool:
    """Whether P (possibly over an extension) lies on H."""
    src, tgt = H.field, P.field
    if src.p != tgt.p or tgt.m % src.m != 0:
        raise ValueError("point field is not an extension of the subspace field")
    if P.ambient != H.ambient:
        raise ValueError("ambient dimension mismatch")
    if src == tgt:
        rows = list(H.basis) + [P.coords]
        return linalg.rank(src, rows) == len(H.basis)
    emb = [tuple(gf.embed_code(src, tgt, c) for c in row) for row in H.basis]
    return linalg.rank(tgt, emb + [P.coords]) == len(H.basis)


def subspace_sum(A: LinearSubspace, B: LinearSubspace) -> LinearSubspace:
    """Smallest subspace containing both."""
    if A.field != B.field or A.ambient != B.ambient:
        raise ValueError("subspaces not in one ambient space")
    return subspace_from_rows(A.field, list(A.basis) + list(B.basis))


def subspace_le(A: LinearSubspace, B: LinearSubspace) -> bool:
    """Whether A is contained in B."""
    if A.field != B.field or A.ambient != B.ambient:
        raise ValueError("subspaces not in one ambient space")
    rows = list(B.basis) + list(A.basis)
    return linalg.rank(A.field, rows) == len(B.basis)


def subspace_point_codes(H: LinearSubspace, ext: gf.Field | None = None):
    """Normalized coordinate tuples of the points of H over an extension."""
    field = ext or H.field
    if field == H.field:
        B = H.basis
    else:
        if field.p != H.field.p or field.m % H.field.m != 0:
            raise ValueError("not an extension of the subspace field")
        B = [
            tuple(gf.embed_code(H.field, field, c) for c in row) for row in H.basis
        ]
    r = len(B) - 1
    ncols = len(B[0])
    for u in enumerate_point_codes(r, field):
        vec = [0] * ncols
        for ui, row in zip(u, B):
            if ui:
                for j, c in enumerate(row):
                    if c:
                        vec[j] = field.add(vec[j], field.mul(ui, c))
        # the parameter map is injective on projective classes, but the
        # image vector still needs its own leading-one normalization
        lead = next(i for i, c in enumerate(vec) if c)
        if vec[lead] != 1:
            inv = field.inv(vec[lead])
            vec = [field.mul(inv, c) for c in vec]
        yield tuple(vec)


def subspace_points(H: LinearSubspace, ext: gf.Field | None = None):
    field = ext or H.field
    for coords in subspace_point_codes(H, ext):
        yield ProjectivePoint(field, coords)


# ---------------------------------------------------------------------------
# text forms: rows separated by ';', entries by ','


def format_subspace(H: LinearSubspace) -> str:
    return "; ".join(
        ",".join(H.field.format(c) for c in row) for row in H.basis
    )


def parse_subspace(field: gf.Field, text: str) -> LinearSubspace:
    rows = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        rows.append([gf.parse_element(field, e).code for e in part.split(",")])
    if not rows:
        raise ValueError(f"no rows in subspace text {text!r}")
    return subspace_from_rows(field, rows)


def format_point(P: ProjectivePoint) -> str:
    return ",".join(P.field.format(c) for c in P.coords)


def parse_point(field: gf.Field, text: str) -> ProjectivePoint:
    parts = [p.strip() for p in text.split(",")]
    if not parts or not any(parts):
        raise ValueError(f"empty point text {text!r}")
    return ProjectivePoint(field, [gf.parse_element(field, p).code for p in parts])
