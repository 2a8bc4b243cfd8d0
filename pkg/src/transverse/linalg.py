"""Exact arithmetic kernels shared across the package.

Univariate polynomials are plain lists/tuples of integer codes in ascending
power order with no trailing zeros; the zero polynomial is the empty tuple.
Routines that need field arithmetic take the field object first and go
through its integer-code methods (add, mul, inv, ...), so this module does
not import the field implementation.  A separate mini-kit works directly
modulo a prime, for use before any field object exists.

Gaussian elimination has a vectorised numpy path for prime fields and a
generic path for extension fields; matrices are lists of rows of codes.
"""

from __future__ import annotations

import random

import numpy as np

# ---------------------------------------------------------------------------
# univariate polynomials over a field object


def u_trim(cs):
    cs = list(cs)
    while cs and cs[-1] == 0:
        cs.pop()
    return cs


def u_deg(cs):
    return len(cs) - 1


def u_add(F, a, b):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else 0
        y = b[i] if i < len(b) else 0
        out.append(F.add(x, y))
    return u_trim(out)


def u_sub(F, a, b):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else 0
        y = b[i] if i < len(b) else 0
        out.append(F.sub(x, y))
    return u_trim(out)


def u_scale(F, a, c):
    if c == 0:
        return []
    return u_trim([F.mul(x, c) for x in a])


def u_mul(F, a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y == 0:
                continue
            out[i + j] = F.add(out[i + j], F.mul(x, y))
    return u_trim(out)


def u_divmod(F, a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [0] * max(0, len(a) - len(b) + 1)
    inv_lead = F.inv(b[-1])
    while len(a) >= len(b):
        a = u_trim(a)
        if len(a) < len(b):
            break
        c = F.mul(a[-1], inv_lead)
        k = len(a) - len(b)
        q[k] = c
        for i, y in enumerate(b):
            if y:
                a[k + i] = F.sub(a[k + i], F.mul(c, y))
        a.pop()
    return u_trim(q), u_trim(a)


def u_mod(F, a, b):
    return u_divmod(F, a, b)[1]


def u_monic(F, a):
    if not a:
        return []
    if a[-1] == 1:
        return list(a)
    return u_scale(F, a, F.inv(a[-1]))


def u_gcd(F, a, b):
    """Monic gcd; gcd with the zero polynomial is the other one made monic."""
    a, b = u_trim(a), u_trim(b)
    while b:
        a, b = b, u_mod(F, a, b)
    return u_monic(F, a)


def u_eval(F, a, x):
    acc = 0
    for c in reversed(a):
        acc = F.add(F.mul(acc, x), c)
    return acc


def u_deriv(F, a):
    out = []
    for i in range(1, len(a)):
        out.append(F.mul_int(a[i], i))
    return u_trim(out)


def u_powmod(F, base, e, mod):
    """base**e reduced mod ``mod``; e is a nonnegative (possibly huge) int."""
    if len(mod) <= 1:
        return []
    result = [1]
    b = u_mod(F, base, mod)
    while e:
        if e & 1:
            result = u_mod(F, u_mul(F, result, b), mod)
        e >>= 1
        if e:
            b = u_mod(F, u_mul(F, b, b), mod)
    return result


def _split_into_roots(F, g, rng):
    """Roots of g, a monic nonconstant product of distinct linear factors."""
    d = u_deg(g)
    if d <= 0:
        return []
    if d == 1:
        return [F.neg(g[0])]
    q = F.order
    for _ in range(64):
        if F.p == 2:
            # trace splitter: sum of (c x)^(2^i) takes values 0/1 on roots
            c = rng.randrange(1, q)
            term = u_mod(F, [0, c], g)
            tr = list(term)
            for _ in range(F.m - 1):
                term = u_mod(F, u_mul(F, term, term), g)
                tr = u_add(F, tr, term)
            h = u_gcd(F, tr, g)
        else:
            a = rng.randrange(q)
            h = u_powmod(F, [a, 1], (q - 1) // 2, g)
            h = u_sub(F, h, [1])
            h = u_gcd(F, h, g)
        if 0 < u_deg(h) < d:
            rest = u_divmod(F, g, h)[0]
            return _split_into_roots(F, h, rng) + _split_into_roots(F, rest, rng)
    raise RuntimeError("root splitting failed to make progress")


def u_distinct_roots(F, a, seed=0):
    """Distinct roots of ``a`` lying in F itself, sorted by code.

    Computed through gcd with x^|F| - x, then recursive random splitting;
    no exhaustive scan of the field.
    """
    a = u_trim(a)
    if not a:
        raise ValueError("root extraction from the zero polynomial")
    if u_deg(a) == 0:
        return []
    xq = u_powmod(F, [0, 1], F.order, a)
    g = u_gcd(F, u_sub(F, xq, [0, 1]), a)
    if u_deg(g) <= 0:
        return []
    rng = random.Random((seed, F.p, F.m, tuple(a)).__hash__())
    return sorted(_split_into_roots(F, g, rng))


def u_roots_with_multiplicity(F, a, seed=0):
    roots = u_distinct_roots(F, a, seed)
    out = []
    for r in roots:
        lin = [F.neg(r), 1]
        m = 0
        rest = list(a)
        while True:
            quo, rem = u_divmod(F, rest, lin)
            if rem:
                break
            m += 1
            rest = quo
        out.append((r, m))
    return out


# ---------------------------------------------------------------------------
# polynomials modulo a prime, used before any field object exists


def pp_trim(cs):
    cs = list(cs)
    while cs and cs[-1] == 0:
        cs.pop()
    return cs


def pp_mul(p, a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return pp_trim(out)


def pp_divmod(p, a, b):
    if not b:
        raise ZeroDivisionError
    a = list(a)
    q = [0] * max(0, len(a) - len(b) + 1)
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        a = pp_trim(a)
        if len(a) < len(b):
            break
        c = (a[-1] * inv_lead) % p
        k = len(a) - len(b)
        q[k] = c
        for i, y in enumerate(b):
            if y:
                a[k + i] = (a[k + i] - c * y) % p
        a.pop()
    return pp_trim(q), pp_trim(a)


def pp_gcd(p, a, b):
    a, b = pp_trim(a), pp_trim(b)
    while b:
        a, b = b, pp_divmod(p, a, b)[1]
    if a and a[-1] != 1:
        inv = pow(a[-1], p - 2, p)
        a = [(c * inv) % p for c in a]
    return a


def pp_powmod(p, base, e, mod):
    result = [1]
    b = pp_divmod(p, base, mod)[1]
    while e:
        if e & 1:
            result = pp_divmod(p, pp_mul(p, result, b), mod)[1]
        e >>= 1
        if e:
            b = pp_divmod(p, pp_mul(p, b, b), mod)[1]
    return result


# ---------------------------------------------------------------------------
# Gaussian elimination

_NP_PRIME_LIMIT = 1 << 20


def rank(F, rows, ncols=None, stop_at=None):
    """Rank of the matrix; stops early once ``stop_at`` is reached."""
    rows = [r for r in rows if any(r)]
    if not rows:
        return 0
    if ncols is None:
        ncols = len(rows[0])
    if F.m == 1 and F.p < _NP_PRIME_LIMIT:
        return _rank_np(F.p, rows, ncols, stop_at)
    return _rank_generic(F, [list(r) for r in rows], ncols, stop_at)


def _rank_np(p, rows, ncols, stop_at):
    arr = np.array(rows, dtype=np.int64) % p
    r = 0
    nrows = arr.shape[0]
    for col in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(arr[r:, col])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            arr[[r, piv]] = arr[[piv, r]]
        inv = pow(int(arr[r, col]), p - 2, p)
        arr[r] = (arr[r] * inv) % p
        below = arr[r + 1 :, col]
        mask = below != 0
        if mask.any():
            arr[r + 1 :][mask] = (
                arr[r + 1 :][mask] - np.outer(below[mask], arr[r])
            ) % p
        r += 1
        if stop_at is not None and r >= stop_at:
            return r
    return r


def _rank_generic(F, rows, ncols, stop_at):
    r = 0
    nrows = len(rows)
    for col in range(ncols):
        if r == nrows:
            break
        piv = None
        for i in range(r, nrows):
            if rows[i][col]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = F.inv(rows[r][col])
        if inv != 1:
            rows[r] = [F.mul(inv, x) for x in rows[r]]
        for i in range(r + 1, nrows):
            c = rows[i][col]
            if c:
                ri, rr = rows[i], rows[r]
                rows[i] = [F.sub(ri[k], F.mul(c, rr[k])) for k in range(ncols)]
        r += 1
        if stop_at is not None and r >= stop_at:
            return r
    return r


def rref(F, rows):
    """Reduced row echelon form; returns (rows, pivot column indices)."""
    rows = [list(r) for r in rows if any(r)]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for col in range(ncols):
        piv = None
        for i in range(r, len(rows)):
            if rows[i][col]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = F.inv(rows[r][col])
        if inv != 1:
            rows[r] = [F.mul(inv, x) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                c = rows[i][col]
                ri, rr = rows[i], rows[r]
                rows[i] = [F.sub(ri[k], F.mul(c, rr[k])) for k in range(ncols)]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    rows = [r_ for r_ in rows if any(r_)]
    return [tuple(r_) for r_ in rows], pivots


def kernel(F, rows, ncols):
    """Basis of the right null space {y : M y = 0}, rows of length ncols."""
    red, pivots = rref(F, rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [0] * ncols
        vec[fc] = 1
        for i, pc in enumerate(pivots):
            # pivot row i reads: y[pc] + sum over free cols of coeff*y[free]
            vec[pc] = F.neg(red[i][fc])
        basis.append(tuple(vec))
    return basis
