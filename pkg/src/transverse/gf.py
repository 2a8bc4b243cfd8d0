"""Finite fields, their towers, Frobenius maps and compatible embeddings.

A field F_{p^m} is represented in a single level as F_p[t]/(g(t)) with g
monic irreducible of degree m over the prime field, never as a quotient of
a quotient.  Elements are integer codes: the base-p digit string of the
coefficient vector, little endian, so code(sum c_i t^i) = sum c_i p^i.
Constants therefore keep the same code in every field of characteristic p.

When no modulus is supplied the canonical one is the first monic
irreducible of its degree in the code order above, so two runs always
agree on the representation.  Arithmetic uses discrete-log tables for
orders up to 2^16 and digit-polynomial arithmetic beyond that; tables are
built lazily and cached on the field object.

Embeddings between fields of the same characteristic are computed by
finding a root of the source modulus in the target, chosen compatibly with
every embedding already constructed, so that going up a tower in two steps
agrees with going up in one.  The registry is process wide and lock
protected; lookups after the first are plain dictionary reads.
"""

from __future__ import annotations

import re
import threading

from . import config, linalg

_TABLE_MAX = 1 << 16
_ADD_TABLE_MAX = 1 << 10


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond the field-size cap."""
    if n < 2:
        return False
    for sp in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % sp == 0:
            return n == sp
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = (x * x) % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pp_sub(p, a, b):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else 0
        y = b[i] if i < len(b) else 0
        out.append((x - y) % p)
    return linalg.pp_trim(out)


def _is_irreducible_mod_p(p: int, g) -> bool:
    m = len(g) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    # no factor of degree <= m/2 forces irreducibility for degree m
    for i in range(1, m // 2 + 1):
        h = linalg.pp_powmod(p, [0, 1], p**i, g)
        d = linalg.pp_gcd(p, g, _pp_sub(p, h, [0, 1]))
        if len(d) - 1 > 0:
            return False
    return True


def _canonical_modulus(p: int, m: int):
    if m == 1:
        return (0, 1)
    for v in range(p**m):
        digits = []
        x = v
        for _ in range(m):
            digits.append(x % p)
            x //= p
        g = digits + [1]
        if _is_irreducible_mod_p(p, g):
            return tuple(g)
    raise RuntimeError("no irreducible modulus found")  # unreachable


class Field:
    """F_{p^m} with integer-code element arithmetic.

    Not instantiated directly; use field_create / extension_field so that
    identical parameters share one object and its cached tables.
    """

    def __init__(self, p: int, m: int, modulus):
        self.p = p
        self.m = m
        self.modulus = tuple(int(c) % p for c in modulus)
        self.order = p**m
        self.key = (p, m, self.modulus)
        self._digits = None
        self._exp = None
        self._log = None
        self._frobp = None
        self._addtab = None
        self._negtab = None
        self._redrows = None
        self._lock = threading.Lock()

    # -- identity ----------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, Field) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        if self.m == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.m})"

    # -- codes and digits --------------------------------------------------

    def decode(self, code: int):
        """Digit tuple (c_0, ..., c_{m-1}) of a code."""
        if self._digits is not None:
            return self._digits[code]
        out = []
        x = code
        for _ in range(self.m):
            out.append(x % self.p)
            x //= self.p
        return tuple(out)

    def encode(self, digits) -> int:
        acc = 0
        for c in reversed(list(digits)):
            acc = acc * self.p + (c % self.p)
        return acc

    def elements(self):
        return range(self.order)

    # -- table construction ------------------------------------------------

    def _reduction_rows(self):
        if self._redrows is None:
            p, m = self.p, self.m
            g = self.modulus
            rows = []
            cur = [(-g[i]) % p for i in range(m)]  # t^m mod g
            rows.append(tuple(cur))
            for _ in range(m - 2):
                cur = [0] + cur
                top = cur.pop()
                if top:
                    cur = [(cur[i] + top * rows[0][i]) % p for i in range(m)]
                rows.append(tuple(cur))
            self._redrows = rows
        return self._redrows

    def _mul_general(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        p, m = self.p, self.m
        da, db = self.decode(a), self.decode(b)
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    if y:
                        prod[i + j] = (prod[i + j] + x * y) % p
        if m > 1:
            rows = self._reduction_rows()
            for i in range(2 * m - 2, m - 1, -1):
                c = prod[i]
                if c:
                    row = rows[i - m]
                    for j in range(m):
                        prod[j] = (prod[j] + c * row[j]) % p
        return self.encode(prod[:m])

    def _pow_general(self, a: int, e: int) -> int:
        if a == 0:
            return 0 if e else 1
        e %= self.order - 1
        result = 1
        base = a
        while e:
            if e & 1:
                result = self._mul_general(result, base)
            e >>= 1
            if e:
                base = self._mul_general(base, base)
        return result

    def _find_generator(self) -> int:
        n = self.order - 1
        factors = []
        x = n
        d = 2
        while d * d <= x:
            if x % d == 0:
                factors.append(d)
                while x % d == 0:
                    x //= d
            d += 1
        if x > 1:
            factors.append(x)
        for cand in range(1, self.order):
            if all(self._pow_general(cand, n // f) != 1 for f in factors):
                return cand
        raise RuntimeError("no multiplicative generator found")  # unreachable

    def _ensure_tables(self):
        if self._exp is not None or self.order > _TABLE_MAX:
            return self._exp is not None
        with self._lock:
            if self._exp is not None:
                return True
            q = self.order
            self._digits = [self.decode(c) for c in range(q)]
            g = self._find_generator()
            exp = [0] * (2 * (q - 1))
            log = [0] * q
            acc = 1
            for i in range(q - 1):
                exp[i] = acc
                exp[i + q - 1] = acc
                log[acc] = i
                acc = self._mul_general(acc, g)
            p = self.p
            self._negtab = [
                self.encode([(-d) % p for d in self._digits[c]]) for c in range(q)
            ]
            self._frobp = [0] * q
            for c in range(1, q):
                self._frobp[c] = exp[(log[c] * p) % (q - 1)]
            if p != 2 and self.m > 1 and q <= _ADD_TABLE_MAX:
                dig = self._digits
                enc = self.encode
                self._addtab = [
                    [
                        enc([(x + y) % p for x, y in zip(dig[a], dig[b])])
                        for b in range(q)
                    ]
                    for a in range(q)
                ]
            self._exp, self._log = exp, log
        return True

    # -- arithmetic on codes ------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        if self._addtab is None and self.order <= _ADD_TABLE_MAX:
            self._ensure_tables()
        if self._addtab is not None:
            return self._addtab[a][b]
        p = self.p
        da, db = self.decode(a), self.decode(b)
        return self.encode([(x + y) % p for x, y in zip(da, db)])

    def neg(self, a: int) -> int:
        if self.m == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        if self._negtab is None:
            self._ensure_tables()
        if self._negtab is not None:
            return self._negtab[a]
        p = self.p
        return self.encode([(-d) % p for d in self.decode(a)])

    def sub(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a - b) % self.p
        if self.p == 2:
            return a ^ b
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        if self._exp is not None:
            return self._exp[self._log[a] + self._log[b]]
        if self._ensure_tables():
            return self._exp[self._log[a] + self._log[b]]
        return self._mul_general(a, b)

    def mul_int(self, a: int, k: int) -> int:
        """a times the integer k, i.e. k-fold addition."""
        k %= self.p
        if k == 0 or a == 0:
            return 0
        return self.mul(a, k if self.m == 1 else self.encode([k]))

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        if self._ensure_tables():
            return self._exp[self.order - 1 - self._log[a]]
        return self._pow_general(a, self.order - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if self.m == 1:
            return pow(a, e, self.p) if (a or e == 0) else 0
        if a == 0:
            return 0 if e else 1
        if self._ensure_tables():
            return self._exp[(self._log[a] * e) % (self.order - 1)]
        return self._pow_general(a, e)

    def frob(self, a: int) -> int:
        """a^p."""
        if self.m == 1:
            return a
        if self._ensure_tables():
            return self._frobp[a]
        return self._pow_general(a, self.p)

    def frob_power(self, a: int, s: int) -> int:
        """a^(p^s)."""
        s %= self.m
        for _ in range(s):
            a = self.frob(a)
        return a

    # -- element objects and text ------------------------------------------

    def element(self, code: int) -> "FieldElement":
        code = int(code)
        if not 0 <= code < self.order:
            raise ValueError(f"code {code} out of range for {self!r}")
        return FieldElement(self, code)

    def const(self, c: int) -> "FieldElement":
        return FieldElement(self, c % self.p)

    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def parse(self, text: str) -> "FieldElement":
        return parse_element(self, text)

    def format(self, code_or_element) -> str:
        code = getattr(code_or_element, "code", code_or_element)
        return format_element(self, code)


class FieldElement:
    """A value of one specific field; immutable, hashable, operator aware."""

    __slots__ = ("field", "code")

    def __init__(self, field: Field, code: int):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "code", code)

    def __setattr__(self, *a):
        raise AttributeError("FieldElement is immutable")

    @property
    def coeffs(self):
        return self.field.decode(self.code)

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other.code
        if isinstance(other, int):
            return other % self.field.p
        return NotImplemented

    def __add__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.add(self.code, c))

    __radd__ = __add__

    def __sub__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.sub(self.code, c))

    def __rsub__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.sub(c, self.code))

    def __mul__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.mul(self.code, c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.div(self.code, c))

    def __rtruediv__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.div(c, self.code))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.code, e))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.code))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.code == other.code
        if isinstance(other, int):
            return self.code == other % self.field.p
        return NotImplemented

    def __hash__(self):
        return hash((self.field.key, self.code))

    def __bool__(self):
        return self.code != 0

    def __repr__(self):
        return format_element(self.field, self.code)


# ---------------------------------------------------------------------------
# construction and registry

_FIELDS: dict = {}
_REG_LOCK = threading.RLock()


def field_create(p: int, m: int = 1, modulus=None, caps: config.Caps | None = None) -> Field:
    """The field F_{p^m}, with the canonical modulus unless one is given."""
    caps = caps or config.current_caps()
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if not isinstance(m, int) or m < 1:
        raise ValueError("extension degree must be a positive integer")
    caps.check_field(p, m)
    if modulus is None:
        key = (p, m, None)
        with _REG_LOCK:
            if key in _FIELDS:
                return _FIELDS[key]
        mod = _canonical_modulus(p, m)
    else:
        mod = tuple(int(c) % p for c in modulus)
        if len(mod) != m + 1:
            raise ValueError(f"modulus must have degree {m}")
        if mod[-1] != 1:
            raise ValueError("modulus must be monic")
        if not _is_irreducible_mod_p(p, list(mod)):
            raise ValueError(f"modulus {mod} is reducible over GF({p})")
        key = None
    with _REG_LOCK:
        fkey = (p, m, mod)
        if fkey not in _FIELDS:
            _FIELDS[fkey] = Field(p, m, mod)
            if key is not None:
                _FIELDS[key] = _FIELDS[fkey]
        elif key is not None and key not in _FIELDS:
            _FIELDS[key] = _FIELDS[fkey]
        return _FIELDS[fkey]


def extension_field(base: Field, k: int, caps: config.Caps | None = None) -> Field:
    """Canonical degree-k extension of ``base`` (single level over the prime)."""
    if k < 1:
        raise ValueError("extension degree must be positive")
    return field_create(base.p, base.m * k, caps=caps)


# ---------------------------------------------------------------------------
# embeddings

_EMBED: dict = {}
_EMB_MAPS: dict = {}


def _hom_eval_digits(src: Field, tgt: Field, rho: int, code: int) -> int:
    """Image of a source code under t |-> rho, evaluated in the target."""
    digits = src.decode(code)
    acc = 0
    for c in reversed(digits):
        acc = tgt.add(tgt.mul(acc, rho), c)
    return acc


def _generator_image(src: Field, tgt: Field) -> int:
    key = (src.key, tgt.key)
    if key in _EMBED:
        return _EMBED[key]
    with _REG_LOCK:
        if key in _EMBED:
            return _EMBED[key]
        if src.key == tgt.key:
            rho = src.encode([0, 1]) if src.m > 1 else 0
            _EMBED[key] = rho
            return rho
        # prefer composing through an already linked intermediate
        mids = sorted(
            b for (a, b) in _EMBED if a == src.key and (b, tgt.key) in _EMBED
        )
        if mids:
            routes = {
                _hom_eval_digits(
                    _FIELDS[b], tgt, _EMBED[(b, tgt.key)], _EMBED[(src.key, b)]
                )
                for b in mids
            }
            if len(routes) > 1:
                raise RuntimeError("embedding lattice constraints are inconsistent")
            rho = routes.pop()
            _EMBED[key] = rho
            return rho
        coeffs = list(src.modulus)  # constants share codes in every char-p field
        cands = linalg.u_distinct_roots(tgt, coeffs, seed=hash(key))
        if not cands:
            raise ValueError(
                f"modulus of {src!r} has no root in {tgt!r}; not a valid tower"
            )
        for (akey, bkey), img in list(_EMBED.items()):
            if bkey == src.key and (akey, tgt.key) in _EMBED:
                # D -> src -> tgt must agree with the stored D -> tgt
                want = _EMBED[(akey, tgt.key)]
                cands = [r for r in cands if _hom_eval_digits(src, tgt, r, img) == want]
            if akey == src.key and (tgt.key, bkey) in _EMBED:
                # src -> tgt -> G must agree with the stored src -> G
                G = _FIELDS[bkey]
                rho_up = _EMBED[(tgt.key, bkey)]
                cands = [r for r in cands if _hom_eval_digits(tgt, G, rho_up, r) == img]
        if not cands:
            raise RuntimeError("embedding lattice constraints are inconsistent")
        _EMBED[key] = cands[0]
        return cands[0]


def embed_code(src: Field, tgt: Field, code: int) -> int:
    """Image of a source element code in the target field."""
    if src.key == tgt.key:
        return code
    if src.m == 1:
        return code  # constants keep their codes
    mkey = (src.key, tgt.key)
    cache = _EMB_MAPS.get(mkey)
    if cache is None:
        cache = _EMB_MAPS.setdefault(mkey, {})
    got = cache.get(code)
    if got is None:
        rho = _generator_image(src, tgt)
        got = _hom_eval_digits(src, tgt, rho, code)
        cache[code] = got
    return got


def embed(a: FieldElement, target: Field) -> FieldElement:
    """Move ``a`` into ``target`` along the canonical compatible embedding."""
    src = a.field
    if src.p != target.p:
        raise ValueError("fields of different characteristic")
    if target.m % src.m != 0:
        raise ValueError(
            f"degree {src.m} does not divide {target.m}; no embedding exists"
        )
    return FieldElement(target, embed_code(src, target, a.code))


def frobenius_q(a: FieldElement, q: int) -> FieldElement:
    """a^q for q a power of the characteristic (q = 1 allowed)."""
    p = a.field.p
    e = 0
    x = q
    while x > 1:
        if x % p:
            raise ValueError(f"{q} is not a power of the characteristic {p}")
        x //= p
        e += 1
    if q < 1:
        raise ValueError("q must be a positive power of the characteristic")
    return FieldElement(a.field, a.field.frob_power(a.code, e))


def in_subfield(a: FieldElement, j: int, q: int | None = None) -> bool:
    """Whether ``a`` lies in the subfield of order q^j (default q = p).

    The element lives in some F_{p^M}; the test requires the candidate
    subfield to be a genuine subfield, i.e. j * log_p(q) must divide M.
    """
    F = a.field
    p = F.p
    base = p if q is None else q
    e = 0
    x = base
    while x > 1:
        if x % p:
            raise ValueError(f"{base} is not a power of the characteristic {p}")
        x //= p
        e += 1
    if e == 0 or j < 1:
        raise ValueError("subfield degree must be positive")
    if F.m % (e * j) != 0:
        raise ValueError(
            f"F_{{{base}^{j}}} is not a subfield of F_{{{p}^{F.m}}}"
        )
    return F.frob_power(a.code, e * j) == a.code


# ---------------------------------------------------------------------------
# element text form: bare integers, or polynomials in t such as 2*t^2+t+1

_ELT_TOKEN = re.compile(r"\s*(\d+|t|\^|\*|\+|-)")


def parse_element(field: Field, text: str) -> FieldElement:
    s = text.strip()
    if not s:
        raise ValueError("empty element text")
    pos = 0
    sign = 1
    coeffs: dict[int, int] = {}
    tokens = []
    while pos < len(s):
        mt = _ELT_TOKEN.match(s, pos)
        if not mt:
            raise ValueError(f"bad element text {text!r} at offset {pos}")
        tokens.append(mt.group(1))
        pos = mt.end()
    i = 0
    expect_term = True
    while i < len(tokens):
        tok = tokens[i]
        if tok in "+-":
            if expect_term and tok == "-":
                sign = -sign
                i += 1
                continue
            if expect_term:
                i += 1
                continue
            sign = 1 if tok == "+" else -1
            i += 1
            expect_term = True
            continue
        # parse one term
        coef = None
        exp = 0
        if tok.isdigit():
            coef = int(tok)
            i += 1
            if i < len(tokens) and tokens[i] == "*":
                i += 1
        if i < len(tokens) and tokens[i] == "t":
            exp = 1
            i += 1
            if i < len(tokens) and tokens[i] == "^":
                i += 1
                if i >= len(tokens) or not tokens[i].isdigit():
                    raise ValueError(f"bad exponent in element text {text!r}")
                exp = int(tokens[i])
                i += 1
        if coef is None and exp == 0:
            raise ValueError(f"bad element text {text!r}")
        if coef is None:
            coef = 1
        coeffs[exp] = coeffs.get(exp, 0) + sign * coef
        sign = 1
        expect_term = False
    if expect_term:
        raise ValueError(f"dangling sign in element text {text!r}")
    # evaluate sum coef * t^exp inside the field
    t_code = field.encode([0, 1]) if field.m > 1 else (-field.modulus[0]) % field.p
    acc = 0
    for exp, coef in coeffs.items():
        c = coef % field.p
        if c == 0:
            continue
        term = field.mul(c if field.m == 1 else field.encode([c]), field.pow(t_code, exp))
        acc = field.add(acc, term)
    return FieldElement(field, acc)


def format_element(field: Field, code: int) -> str:
    if field.m == 1:
        return str(code)
    digits = field.decode(code)
    parts = []
    for e in range(field.m - 1, -1, -1):
        c = digits[e]
        if c == 0:
            continue
        if e == 0:
            parts.append(str(c))
        elif e == 1:
            parts.append("t" if c == 1 else f"{c}*t")
        else:
            parts.append(f"t^{e}" if c == 1 else f"{c}*t^{e}")
    return "+".join(parts) if parts else "0"
