"""Search demo: a certified very transverse flag on a random smooth
hypersurface.

Draws random forms of the requested degree until one passes the exact
smoothness check, then builds the flag level by level and prints each
subspace with the predicate that certified it.
"""

import argparse
import json
import random
import sys

from transverse import certify, gf, locus, poly, projgeom, search


def random_smooth(field, nvars, degree, rng):
    tried = 0
    while True:
        tried += 1
        terms = {}
        for exps in poly.monomials_of_degree(nvars, degree):
            terms[exps] = rng.randrange(field.order)
        G = poly.Form(field, nvars, degree, terms)
        if not G.is_zero() and certify.ensure_smooth(locus.Hypersurface(G)):
            return locus.Hypersurface(G), tried


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=13, help="field characteristic")
    ap.add_argument("--m", type=int, default=1, help="extension degree")
    ap.add_argument("--n", type=int, default=3, help="ambient dimension")
    ap.add_argument("--d", type=int, default=3, help="hypersurface degree")
    ap.add_argument("--r", type=int, default=2, help="top flag dimension")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    field = gf.field_create(args.p, args.m)
    rng = random.Random(args.seed)
    X, tried = random_smooth(field, args.n + 1, args.d, rng)
    print(f"smooth {args.d}-form over F_{field.order} "
          f"after {tried} draws: {poly.format_form(X.form)}")

    out = search.find_very_transverse_flag(X, args.r, seed=args.seed)
    if not out.succeeded():
        print(f"no flag: {out.note}")
        return 1
    for H, cert in zip(out.found.levels, out.found.certificates):
        print(f"  dim {H.dim}: {projgeom.format_subspace(H)}  [{cert['predicate']}]")
    print(json.dumps(out.to_dict(), indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
