"""Exact-rational simplex for small linear programs.

One routine, one canonical form: maximize c.x subject to A x <= rhs, x >= 0,
with rhs >= 0 so the all-slack basis is feasible and no phase-1 is needed.
Bland's rule guarantees termination. Everything is Fraction arithmetic; the
returned objective, solution, and duals are exact.
"""

from __future__ import annotations

from .core import Rat


def simplex_max(
    c: list[Rat],
    rows: list[list[Rat]],
    rhs: list[Rat],
) -> tuple[Rat, list[Rat], list[Rat]]:
    """Solve max c.x s.t. rows[i] . x <= rhs[i], x >= 0.

    Requires rhs[i] >= 0 for all i and a bounded optimum. Returns
    (objective, x, duals) where duals[i] is the optimal multiplier of row i.
    """
    nvar = len(c)
    nrow = len(rows)
    if any(r < 0 for r in rhs):
        raise ValueError("simplex_max requires rhs >= 0")
    zero = Rat(0)
    # Tableau columns: nvar structural, nrow slacks, then the rhs column.
    width = nvar + nrow
    tab = []
    for i in range(nrow):
        row = list(rows[i]) + [zero] * nrow + [rhs[i]]
        row[nvar + i] = Rat(1)
        tab.append(row)
    obj = list(c) + [zero] * (nrow + 1)
    basis = [nvar + i for i in range(nrow)]

    while True:
        enter = -1
        for j in range(width):
            if obj[j] > 0:
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        best: Rat | None = None
        for i in range(nrow):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][width] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            raise ValueError("simplex_max: unbounded objective")
        pivot = tab[leave][enter]
        prow = tab[leave]
        if pivot != 1:
            tab[leave] = prow = [a / pivot for a in prow]
        for i in range(nrow):
            if i == leave:
                continue
            factor = tab[i][enter]
            if factor != 0:
                row = tab[i]
                tab[i] = [row[j] - factor * prow[j] for j in range(width + 1)]
        factor = obj[enter]
        if factor != 0:
            obj = [obj[j] - factor * prow[j] for j in range(width + 1)]
        basis[leave] = enter

    x = [zero] * nvar
    for i, var in enumerate(basis):
        if var < nvar:
            x[var] = tab[i][width]
    duals = [-obj[nvar + i] for i in range(nrow)]
    return -obj[width], x, duals
