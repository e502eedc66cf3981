"""Independent exact-arithmetic oracles used to validate the chirotope code.

Everything here works directly with Fraction matrices and Gaussian
elimination, deliberately sharing no code with the chirotope formulas it is
used to check.
"""

from fractions import Fraction
from math import comb

from omdp.core import Chirotope, GroundSet


def nullspace_vector(rows):
    """A nonzero rational vector spanning the kernel of a nullity-1 matrix.

    ``rows`` is a list of Fraction rows.  Plain Gaussian elimination: reduce,
    set the single free variable to 1, back-substitute.
    """
    mat = [list(r) for r in rows]
    ncols = len(mat[0])
    pivots = {}  # column -> row
    prow = 0
    for col in range(ncols):
        piv = next((i for i in range(prow, len(mat)) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[prow], mat[piv] = mat[piv], mat[prow]
        lead = mat[prow][col]
        mat[prow] = [x / lead for x in mat[prow]]
        for i in range(len(mat)):
            if i != prow and mat[i][col] != 0:
                factor = mat[i][col]
                mat[i] = [a - factor * b for a, b in zip(mat[i], mat[prow])]
        pivots[col] = prow
        prow += 1
    free = [c for c in range(ncols) if c not in pivots]
    assert len(free) == 1, f"expected nullity 1, free columns {free}"
    vec = [Fraction(0)] * ncols
    vec[free[0]] = Fraction(1)
    for col, row in pivots.items():
        vec[col] = -mat[row][free[0]]
    return vec


def sign(x) -> int:
    return (x > 0) - (x < 0)


def circuit_signs_by_elimination(columns, support):
    """Sign vector of the kernel of the chosen columns (support size r+1)."""
    r = len(columns[0])
    sub = [[columns[e - 1][i] for e in support] for i in range(r)]
    kern = nullspace_vector(sub)
    out = [0] * len(columns)
    for e, val in zip(support, kern):
        out[e - 1] = sign(val)
    return tuple(out)


def cocircuit_signs_by_elimination(columns, zeroset):
    """Sign vector of the row-space vector vanishing on the zero set."""
    r = len(columns[0])
    # coefficient vector c with c . column_z = 0 for all z in the zero set
    sub = [[columns[z - 1][i] for i in range(r)] for z in zeroset]
    coeff = nullspace_vector(sub)
    vals = [sum(c * col[i] for i, c in enumerate(coeff)) for col in columns]
    return tuple(sign(v) for v in vals)


def normalize_on(signs, element):
    """Flip a +-1/0 tuple so the 1-indexed element is positive."""
    s = signs[element - 1]
    assert s != 0
    return signs if s > 0 else tuple(-x for x in signs)


def random_rational_columns(rng, r, m, lo=-9, hi=9):
    """A random rank-r configuration with all maximal minors nonzero."""
    while True:
        cols = [
            tuple(Fraction(rng.randint(lo, hi)) for _ in range(r)) for _ in range(m)
        ]
        try:
            ground = GroundSet(n=m - 2, d=r - 1)
            chi = Chirotope.from_rational_columns(ground, cols)
        except Exception:
            continue
        return cols, chi


def program_columns(inequality_rows, rhs, objective, beta):
    """Ground-set columns of the program {max c.x : A x <= b}.

    Facet i contributes the column (-a_i, b_i); the objective element
    contributes (c, beta); the element at infinity contributes (0,...,0,1).
    """
    d = len(objective)
    cols = []
    for a, b in zip(inequality_rows, rhs):
        cols.append(tuple(-Fraction(x) for x in a) + (Fraction(b),))
    cols.append(tuple(Fraction(x) for x in objective) + (Fraction(beta),))
    cols.append(tuple(Fraction(0) for _ in range(d)) + (Fraction(1),))
    return cols


def cube_program(d, seed=0):
    """A perturbed d-cube with objective increasing in every coordinate.

    Facet k (k=1..d) is roughly x_k >= 0 and facet d+k roughly x_k <= 1+k/7,
    with small generic tilts so no two facets are parallel (an exact cube has
    vanishing minors against the element at infinity).  The objective is
    sum((1 + k/11) x_k) + 1/13.  Returns (ground, chirotope).
    """
    import random

    rng = random.Random(seed)
    while True:
        def tilt():
            return Fraction(rng.randint(-3, 3), 150)

        rows, rhs = [], []
        for k in range(1, d + 1):
            rows.append([-1 if i == k else tilt() for i in range(1, d + 1)])
            rhs.append(tilt())
        for k in range(1, d + 1):
            rows.append([1 if i == k else tilt() for i in range(1, d + 1)])
            rhs.append(Fraction(7 + k, 7) + tilt())
        objective = [Fraction(11 + k, 11) for k in range(1, d + 1)]
        cols = program_columns(rows, rhs, objective, Fraction(1, 13))
        ground = GroundSet(n=2 * d, d=d)
        try:
            return ground, Chirotope.from_rational_columns(ground, cols)
        except Exception:
            continue  # degenerate tilt, redraw


def halfline_program():
    """The 1-dimensional program {max x : x >= 1, x >= 2}, feasible on [2, oo)."""
    cols = program_columns([[-1], [-1]], [-1, -2], [1], 0)
    ground = GroundSet(n=2, d=1)
    return ground, Chirotope.from_rational_columns(ground, cols)
