"""Exact-coefficient linear inequality systems and their projections.

Rows are a . x <= rhs with rational coefficients and real right-hand
sides: the coefficient arithmetic of Fourier-Motzkin elimination is
exact, while right-hand sides (mutual informations in practice) stay
floating and every rhs comparison uses a tolerance.  Equalities are
encoded as paired inequalities so elimination has a single code path.

Infeasibility is not an error: contradictory systems surface as
all-zero rows with negative rhs, which are preserved by elimination and
reported by is_trivially_infeasible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import UsageError

RHS_TOL = 1e-9

#: Pre-screen margin for dropping clearly redundant rows before the
#: exact certification pass; must stay well above RHS_TOL.
PRESCREEN_MARGIN = 1e-6

#: Box used to expose unbounded directions when pre-screening; far
#: beyond any geometry these desk-scale systems produce.
PRESCREEN_BOX = 1e6

Row = tuple[tuple[Fraction, ...], float]


@dataclass(frozen=True, eq=False)
class InequalitySystem:
    variables: tuple[str, ...]
    rows: tuple[Row, ...]

    def __post_init__(self):
        for coeffs, rhs in self.rows:
            if len(coeffs) != len(self.variables):
                raise UsageError("row length does not match variable list")
            if not np.isfinite(rhs):
                raise UsageError("row rhs must be finite")

    @property
    def dim(self) -> int:
        return len(self.variables)


def make_system(variables, rows) -> InequalitySystem:
    """Build a system, coercing coefficients to exact Fractions."""
    vs = tuple(variables)
    out = tuple((tuple(Fraction(c) for c in coeffs), float(rhs))
                for coeffs, rhs in rows)
    return InequalitySystem(vs, out)


def with_equality(system: InequalitySystem, coeffs, rhs: float) -> InequalitySystem:
    """Append coeffs . x = rhs as the pair of opposite inequalities."""
    c = tuple(Fraction(v) for v in coeffs)
    neg = tuple(-v for v in c)
    return InequalitySystem(system.variables,
                            system.rows + ((c, float(rhs)), (neg, -float(rhs))))


def extend_system(system: InequalitySystem, variables) -> InequalitySystem:
    """Re-express the system over a superset of variables (zero padding)."""
    vs = tuple(variables)
    pos = {}
    for name in system.variables:
        if name not in vs:
            raise UsageError(f"variable {name!r} missing from the new list")
        pos[name] = vs.index(name)
    rows = []
    for coeffs, rhs in system.rows:
        padded = [Fraction(0)] * len(vs)
        for name, c in zip(system.variables, coeffs):
            padded[pos[name]] = c
        rows.append((tuple(padded), rhs))
    return InequalitySystem(vs, tuple(rows))


def concat_systems(a: InequalitySystem, b: InequalitySystem) -> InequalitySystem:
    if a.variables != b.variables:
        raise UsageError("systems must share a variable list")
    return InequalitySystem(a.variables, a.rows + b.rows)


def is_trivially_infeasible(system: InequalitySystem, tol: float = RHS_TOL) -> bool:
    """True when some all-zero row demands 0 <= rhs < 0."""
    return any(not any(coeffs) and rhs < -tol for coeffs, rhs in system.rows)


def _canonical(coeffs: tuple[Fraction, ...], rhs: float) -> Row:
    """Scale so the first nonzero coefficient has absolute value 1."""
    for c in coeffs:
        if c:
            scale = abs(c)
            return tuple(v / scale for v in coeffs), rhs / float(scale)
    return coeffs, rhs


def _dedup(rows) -> list[Row]:
    """Drop duplicate directions (keep min rhs) and trivially true rows."""
    best: dict[tuple[Fraction, ...], float] = {}
    order: list[tuple[Fraction, ...]] = []
    markers: list[Row] = []
    for coeffs, rhs in rows:
        coeffs, rhs = _canonical(coeffs, rhs)
        if not any(coeffs):
            if rhs < -RHS_TOL:
                markers.append((coeffs, rhs))  # infeasibility witness
            continue
        if coeffs not in best:
            best[coeffs] = rhs
            order.append(coeffs)
        elif rhs < best[coeffs]:
            best[coeffs] = rhs
    return [(c, best[c]) for c in order] + markers


def eliminate_variable(system: InequalitySystem, var: str) -> InequalitySystem:
    """Project the solution set onto the remaining variables.

    Classic Fourier-Motzkin: every row with a positive coefficient on
    var (an upper bound) combines with every row with a negative one (a
    lower bound) using exact positive rational multipliers; rows not
    involving var pass through.
    """
    if var not in system.variables:
        raise UsageError(f"variable {var!r} is not in the system")
    idx = system.variables.index(var)
    keep_vars = tuple(v for v in system.variables if v != var)

    def strip(coeffs):
        return coeffs[:idx] + coeffs[idx + 1:]

    zero, upper, lower = [], [], []
    for coeffs, rhs in system.rows:
        c = coeffs[idx]
        if c == 0:
            zero.append((strip(coeffs), rhs))
        elif c > 0:
            upper.append((strip(coeffs), rhs, c))
        else:
            lower.append((strip(coeffs), rhs, c))
    rows = list(zero)
    for cu, bu, pu in upper:
        for cl, bl, pl in lower:
            # pu * v <= bu - cu.x  and  (-pl) * v >= -(bl - cl.x)
            coeffs = tuple((-pl) * a + pu * b for a, b in zip(cu, cl))
            rhs = float(-pl) * bu + float(pu) * bl
            rows.append((coeffs, rhs))
    return InequalitySystem(keep_vars, tuple(_dedup(rows)))


def eliminate_variables(system: InequalitySystem, names) -> InequalitySystem:
    for name in names:
        system = eliminate_variable(system, name)
    return system


# ---------------------------------------------------------------------------
# Redundancy removal: duplicate directions go first, then each surviving
# row is certified against the others by exact-arithmetic LP (rhs values
# are converted to exact rationals; the comparison carries the
# tolerance).  Systems with many rows in two variables are pre-screened
# geometrically to keep the LP count small.
# ---------------------------------------------------------------------------

def remove_redundant(system: InequalitySystem, tol: float = RHS_TOL) -> InequalitySystem:
    rows = _dedup(system.rows)
    if any(not any(c) for c, _ in rows):  # infeasible: keep the witness intact
        return InequalitySystem(system.variables, tuple(rows))
    if system.dim == 2 and len(rows) > 12:
        rows = _prescreen_2d(rows)
    keep = list(rows)
    i = 0
    while i < len(keep):
        coeffs, rhs = keep[i]
        others = keep[:i] + keep[i + 1:]
        status, value = _lp_maximize(others, coeffs)
        if status == "optimal" and value <= Fraction(rhs) + Fraction(tol):
            keep.pop(i)
        else:
            i += 1
    return InequalitySystem(system.variables, tuple(keep))


def _prescreen_2d(rows) -> list[Row]:
    """Drop 2D rows redundant by a wide margin (candidate-vertex test).

    For each row, the maximum of its direction over the others is taken
    over all pairwise line intersections (plus a huge box standing in
    for unbounded directions).  Only rows redundant by PRESCREEN_MARGIN
    are dropped; borderline rows are left for the exact LP pass.
    """
    a = np.array([[float(c) for c in coeffs] for coeffs, _ in rows])
    b = np.array([rhs for _, rhs in rows])
    box = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    box_b = np.full(4, PRESCREEN_BOX)
    A = np.vstack([a, box])
    B = np.concatenate([b, box_b])
    cands = []
    for i in range(len(A)):
        for j in range(i + 1, len(A)):
            det = A[i, 0] * A[j, 1] - A[i, 1] * A[j, 0]
            if abs(det) < 1e-12:
                continue
            x = (B[i] * A[j, 1] - A[i, 1] * B[j]) / det
            y = (A[i, 0] * B[j] - B[i] * A[j, 0]) / det
            cands.append((x, y))
    if not cands:
        return list(rows)
    pts = np.array(cands)
    sat = pts @ a.T <= b + PRESCREEN_MARGIN / 2  # (cands, rows)
    in_box = (np.abs(pts) <= PRESCREEN_BOX + 1.0).all(axis=1)
    keep = []
    for i in range(len(rows)):
        mask = in_box & np.delete(sat, i, axis=1).all(axis=1)
        if not mask.any():
            keep.append(rows[i])  # others empty; let the LP pass decide
            continue
        best = (pts[mask] @ a[i]).max()
        if best > b[i] - PRESCREEN_MARGIN:
            keep.append(rows[i])
    return keep


def vertices_2d(system: InequalitySystem, tol: float = RHS_TOL):
    """Vertices of the feasible polygon within the nonnegative quadrant.

    Returns the polygon counterclockwise, deduplicated within 1e-9;
    empty when infeasible.  The system must be bounded inside the
    quadrant for the polygon to be meaningful.
    """
    if system.dim != 2:
        raise UsageError("vertex enumeration is limited to two variables")
    if is_trivially_infeasible(system, tol):
        return []
    a = np.array([[float(c) for c in coeffs] for coeffs, _ in system.rows]
                 ).reshape(len(system.rows), 2)
    b = np.array([rhs for _, rhs in system.rows])
    lines_a = np.vstack([a, [[-1.0, 0.0], [0.0, -1.0]]])
    lines_b = np.concatenate([b, [0.0, 0.0]])
    cands = []
    for i in range(len(lines_a)):
        for j in range(i + 1, len(lines_a)):
            det = lines_a[i, 0] * lines_a[j, 1] - lines_a[i, 1] * lines_a[j, 0]
            if abs(det) < 1e-14:
                continue
            x = (lines_b[i] * lines_a[j, 1] - lines_a[i, 1] * lines_b[j]) / det
            y = (lines_a[i, 0] * lines_b[j] - lines_b[i] * lines_a[j, 0]) / det
            cands.append((x, y))
    if not cands:
        return []
    pts = np.array(cands)
    ok = (pts >= -tol).all(axis=1)
    if len(system.rows):
        ok &= (pts @ a.T <= b + tol).all(axis=1)
    pts = pts[ok]
    verts: list[tuple[float, float]] = []
    for x, y in pts:
        if not any(abs(x - vx) <= 1e-9 and abs(y - vy) <= 1e-9 for vx, vy in verts):
            verts.append((float(x), float(y)))
    if len(verts) <= 2:
        return verts
    cx = sum(v[0] for v in verts) / len(verts)
    cy = sum(v[1] for v in verts) / len(verts)
    verts.sort(key=lambda v: np.arctan2(v[1] - cy, v[0] - cx))
    return verts


def system_to_json(system: InequalitySystem) -> dict:
    return {
        "variables": list(system.variables),
        "rows": [{"coeffs": [f"{c.numerator}/{c.denominator}" for c in coeffs],
                  "rhs": rhs} for coeffs, rhs in system.rows],
    }


def system_from_json(doc: dict) -> InequalitySystem:
    rows = [(tuple(Fraction(c) for c in row["coeffs"]), float(row["rhs"]))
            for row in doc["rows"]]
    return InequalitySystem(tuple(doc["variables"]), tuple(rows))


# ---------------------------------------------------------------------------
# Self-contained exact simplex (Bland's rule, two phases).  Variables are
# free: each is split into a difference of nonnegative parts.  Small and
# deterministic; meant for desk-scale redundancy certification, not bulk
# optimization.
# ---------------------------------------------------------------------------

def _lp_maximize(rows, objective):
    """Maximize objective . x over {x : rows}, x free, exactly.

    Returns (status, value) with status in {"optimal", "unbounded",
    "infeasible"}; value is a Fraction when optimal, else None.
    """
    m = len(rows)
    n = len(objective)
    if m == 0:
        if any(objective):
            return "unbounded", None
        return "optimal", Fraction(0)
    # columns: (u_j, w_j) pairs for the free variables x_j = u_j - w_j,
    # then one slack per row, then artificials for flipped rows.
    ns = 2 * n
    body = []
    rhs = []
    for coeffs, b in rows:
        r = [Fraction(0)] * (ns + m)
        for j, c in enumerate(coeffs):
            fc = Fraction(c)
            r[2 * j] = fc
            r[2 * j + 1] = -fc
        body.append(r)
        rhs.append(Fraction(b))
    flipped = []
    for i in range(m):
        body[i][ns + i] = Fraction(1)
        if rhs[i] < 0:
            body[i] = [-v for v in body[i]]
            rhs[i] = -rhs[i]
            flipped.append(i)
    art_col = {i: ns + m + k for k, i in enumerate(flipped)}
    total = ns + m + len(flipped)
    tab = []
    basis = []
    for i in range(m):
        row = body[i] + [Fraction(0)] * len(flipped) + [rhs[i]]
        if i in art_col:
            row[art_col[i]] = Fraction(1)
            basis.append(art_col[i])
        else:
            basis.append(ns + i)
        tab.append(row)
    live = list(range(m))

    def pivot(r, c):
        piv = tab[r][c]
        tab[r] = [v / piv for v in tab[r]]
        for i in live:
            if i != r and tab[i][c] != 0:
                f = tab[i][c]
                tab[i] = [x - f * y for x, y in zip(tab[i], tab[r])]
        basis[r] = c

    def run(costs, ncols_allowed):
        """Minimize costs . z with Bland's rule; returns the optimum."""
        while True:
            cb = {i: costs[basis[i]] for i in live}
            entering = -1
            for j in range(ncols_allowed):
                rc = costs[j] - sum(cb[i] * tab[i][j] for i in live)
                if rc < 0:
                    entering = j
                    break
            if entering < 0:
                return "optimal", sum(cb[i] * tab[i][-1] for i in live)
            ratio, leave = None, -1
            for i in live:
                if tab[i][entering] > 0:
                    r = tab[i][-1] / tab[i][entering]
                    if ratio is None or r < ratio or (r == ratio and basis[i] < basis[leave]):
                        ratio, leave = r, i
            if leave < 0:
                return "unbounded", None
            pivot(leave, entering)

    if flipped:
        costs1 = [Fraction(0)] * total
        for c in art_col.values():
            costs1[c] = Fraction(1)
        _, value = run(costs1, total)
        if value != 0:
            return "infeasible", None
        for i in list(live):
            if basis[i] >= ns + m:  # degenerate artificial still basic
                for j in range(ns + m):
                    if tab[i][j] != 0:
                        pivot(i, j)
                        break
                else:
                    live.remove(i)  # all-zero row: redundant constraint
    costs2 = [Fraction(0)] * total
    for j in range(n):
        c = Fraction(objective[j])
        costs2[2 * j] = -c
        costs2[2 * j + 1] = c
    status, value = run(costs2, ns + m)
    if status != "optimal":
        return "unbounded", None
    return "optimal", -value
