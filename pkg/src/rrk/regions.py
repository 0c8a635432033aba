"""Rate regions as expression trees over multiple-access polytopes.

A receiver that must recover the senders in its demand set D can decode
any superset S of D and treat the rest as noise; each choice of S yields
the multiple-access polytope

    R_T <= I(X_T; Y_l | X_{S \\ T}, Q)   for every nonempty T subset of S,

with rates outside S unconstrained.  The receiver's region is the union
of these polytopes over supersets S of D, and the network's region is
the intersection over receivers.  The equivalent "min form" replaces the
union by saturating minima over effective interference rates; both are
implemented and cross-checked.

Membership uses closed-region semantics with a symmetric tolerance band:
a point is Inside when it satisfies every relevant constraint tightened
by tol, Outside when it misses even the relaxed version, and Boundary in
between.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import UsageError
from .probability import JointDistribution, NetworkSpec

DEFAULT_TOL = 1e-9

#: Enumerating unions over decode supersets is exponential in K.
MAX_SENDERS = 10


class Verdict(enum.Enum):
    INSIDE = 1
    BOUNDARY = 0
    OUTSIDE = -1


@dataclass(frozen=True)
class LinearRateInequality:
    """coeffs . rates <= rhs with exact rational coefficients (bits)."""

    coeffs: tuple[Fraction, ...]
    rhs: float

    def __post_init__(self):
        if not any(self.coeffs):
            raise UsageError("inequality needs at least one nonzero coefficient")
        if not np.isfinite(self.rhs):
            raise UsageError("inequality right-hand side must be finite")


@dataclass(frozen=True)
class Polytope:
    """Conjunction of rate inequalities plus implicit nonnegativity."""

    dimension: int
    inequalities: tuple[LinearRateInequality, ...]
    _matrix: np.ndarray = field(repr=False, hash=False, compare=False, default=None)
    _rhs: np.ndarray = field(repr=False, hash=False, compare=False, default=None)

    def __post_init__(self):
        for ineq in self.inequalities:
            if len(ineq.coeffs) != self.dimension:
                raise UsageError("inequality dimension mismatch")
        mat = np.array([[float(c) for c in q.coeffs] for q in self.inequalities],
                       dtype=float).reshape(len(self.inequalities), self.dimension)
        rhs = np.array([q.rhs for q in self.inequalities], dtype=float)
        object.__setattr__(self, "_matrix", mat)
        object.__setattr__(self, "_rhs", rhs)

    def satisfied(self, points: np.ndarray, slack: float) -> np.ndarray:
        if not self.inequalities:
            return np.ones(len(points), dtype=bool)
        return (points @ self._matrix.T <= self._rhs + slack).all(axis=1)


@dataclass(frozen=True)
class Union:
    children: tuple

    def satisfied(self, points: np.ndarray, slack: float) -> np.ndarray:
        out = np.zeros(len(points), dtype=bool)
        for child in self.children:
            out |= child.satisfied(points, slack)
        return out


@dataclass(frozen=True)
class Intersection:
    children: tuple

    def satisfied(self, points: np.ndarray, slack: float) -> np.ndarray:
        out = np.ones(len(points), dtype=bool)
        for child in self.children:
            out &= child.satisfied(points, slack)
        return out


def region_dimension(region) -> int:
    if hasattr(region, "dimension"):
        return region.dimension
    dims = {region_dimension(c) for c in region.children}
    if len(dims) != 1:
        raise UsageError("region leaves disagree on dimension")
    return dims.pop()


def _check_points(points: np.ndarray, dim: int) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != dim:
        raise UsageError(f"points have dimension {pts.shape[1]}, region has {dim}")
    if not np.isfinite(pts).all() or (pts < 0).any():
        raise UsageError("rate tuples must be finite and nonnegative")
    return pts


def member_many(region, points, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Vectorized membership; returns an array of Verdict values."""
    if tol <= 0:
        raise UsageError("tol must be positive")
    pts = _check_points(points, region_dimension(region))
    relaxed = region.satisfied(pts, +tol)
    tight = region.satisfied(pts, -tol)
    codes = np.where(tight, 1, np.where(relaxed, 0, -1))
    return np.array([Verdict(c) for c in codes], dtype=object)


def member(region, point, tol: float = DEFAULT_TOL) -> Verdict:
    """Three-valued membership of one rate tuple in a region."""
    return member_many(region, [point], tol)[0]


# ---------------------------------------------------------------------------
# Entropy bookkeeping.  Sender subsets are bitmasks (bit k = sender k,
# 0-based).  All mutual informations used by the region constructions
# reduce to differences of H(Y_l | X_mask, Q).
# ---------------------------------------------------------------------------

_H_TABLES: "weakref.WeakKeyDictionary" = None  # populated lazily


def output_entropy_table(joint: JointDistribution, receiver: int, K: int) -> np.ndarray:
    """h[mask] = H(Y_{receiver} | X_mask, Q) in bits, for all 2^K masks."""
    global _H_TABLES
    if _H_TABLES is None:
        import weakref

        _H_TABLES = weakref.WeakKeyDictionary()
    cache = _H_TABLES.setdefault(joint, {})
    key = (receiver, K)
    if key not in cache:
        y = f"Y{receiver + 1}"
        h = np.empty(1 << K)
        for mask in range(1 << K):
            given = ["Q"] + [f"X{k + 1}" for k in range(K) if mask >> k & 1]
            h[mask] = joint.conditional_entropy([y], given)
        h.setflags(write=False)
        cache[key] = h
    return cache[key]


def mi_from_table(h: np.ndarray, targets: int, given: int) -> float:
    """I(X_targets; Y | X_given, Q) from an output-entropy table."""
    if targets & given:
        raise UsageError("target and conditioning sender sets overlap")
    return h[given] - h[given | targets]


def _submasks(mask: int):
    """Nonempty submasks of mask, in increasing integer order."""
    out = []
    sub = mask
    while sub:
        out.append(sub)
        sub = (sub - 1) & mask
    return sorted(out)


def _mask_of(senders) -> int:
    mask = 0
    for k in senders:
        mask |= 1 << k
    return mask


def mac_region(joint: JointDistribution, decode_set, receiver: int,
               K: int | None = None) -> Polytope:
    """Multiple-access polytope for decoding the senders in decode_set.

    One inequality per nonempty subset T of the decode set; rates of
    senders outside it stay unconstrained.
    """
    if K is None:
        K = sum(1 for a in joint.axes if a.startswith("X"))
    s_mask = _mask_of(decode_set)
    if not s_mask:
        raise UsageError("decode set must be nonempty")
    if s_mask >> K:
        raise UsageError("decode set mentions unknown senders")
    h = output_entropy_table(joint, receiver, K)
    rows = []
    for t_mask in _submasks(s_mask):
        coeffs = tuple(Fraction(t_mask >> k & 1) for k in range(K))
        rows.append(LinearRateInequality(coeffs, mi_from_table(h, t_mask, s_mask & ~t_mask)))
    return Polytope(K, tuple(rows))


def receiver_region(joint: JointDistribution, spec: NetworkSpec,
                    receiver: int) -> Union:
    """Union of MAC polytopes over decode supersets of the demand set."""
    K = spec.K
    if K > MAX_SENDERS:
        raise UsageError(f"sender count {K} over the enumeration cap {MAX_SENDERS}")
    d_mask = _mask_of(spec.demands[receiver])
    rest = [k for k in range(K) if not d_mask >> k & 1]
    leaves = []
    for extra in range(1 << len(rest)):
        s_mask = d_mask | _mask_of(k for i, k in enumerate(rest) if extra >> i & 1)
        leaves.append(mac_region(joint, _mask_bits(s_mask, K), receiver, K))
    leaves.sort(key=lambda p: len(p.inequalities))
    return Union(tuple(leaves))


def _mask_bits(mask: int, K: int):
    return [k for k in range(K) if mask >> k & 1]


def optimal_region(joint: JointDistribution, spec: NetworkSpec) -> Intersection:
    """Intersection over receivers of their decode-superset unions."""
    return Intersection(tuple(receiver_region(joint, spec, l)
                              for l in range(spec.L)))


# ---------------------------------------------------------------------------
# Min form: for every nonempty D inside the demand set and every
# interferer subset U, the demanded sum rate plus the saturating minimum
#
#     min over U' of U  [ R_{U'} + I(X_{U\U'}; Y | X_{[K]\(U\U')}, Q) ]
#
# must stay below I(X_{D u U}; Y | X_{[K]\(D u U)}, Q).  The inner
# minimum is the effective rate contributed by the interfering senders.
# ---------------------------------------------------------------------------

def _min_form_constraints(joint, spec, receiver):
    """List of (d_mask, rhs, [(u'_mask, const), ...]) for the receiver."""
    K = spec.K
    full = (1 << K) - 1
    h = output_entropy_table(joint, receiver, K)
    d_all = _mask_of(spec.demands[receiver])
    out = []
    u_universe = full & ~d_all
    for d_mask in _submasks(d_all):
        for u_mask in [0] + (_submasks(u_universe) if u_universe else []):
            rhs = mi_from_table(h, d_mask | u_mask, full & ~(d_mask | u_mask))
            terms = []
            for u_prime in [0] + (_submasks(u_mask) if u_mask else []):
                gone = u_mask & ~u_prime
                terms.append((u_prime, mi_from_table(h, gone, full & ~gone)))
            out.append((d_mask, rhs, terms))
    return out


def _rate_sums(points: np.ndarray, masks, K: int) -> dict[int, np.ndarray]:
    sums = {}
    for mask in masks:
        sel = [k for k in range(K) if mask >> k & 1]
        sums[mask] = points[:, sel].sum(axis=1) if sel else np.zeros(len(points))
    return sums


@dataclass(frozen=True, eq=False)
class MinFormRegion:
    """Membership-only region defined by the saturating-min constraints."""

    dimension: int
    constraints: tuple  # (d_mask, rhs, ((u'_mask, const), ...)) triples

    def satisfied(self, points: np.ndarray, slack: float) -> np.ndarray:
        masks = {m for d, _, terms in self.constraints
                 for m in [d] + [u for u, _ in terms]}
        sums = _rate_sums(points, masks, self.dimension)
        out = np.ones(len(points), dtype=bool)
        for d_mask, rhs, terms in self.constraints:
            eff = np.full(len(points), np.inf)
            for u_prime, const in terms:
                eff = np.minimum(eff, sums[u_prime] + const)
            out &= sums[d_mask] + eff <= rhs + slack
        return out


def min_form_region(joint: JointDistribution, spec: NetworkSpec,
                    receiver: int) -> MinFormRegion:
    cons = tuple((d, rhs, tuple(terms))
                 for d, rhs, terms in _min_form_constraints(joint, spec, receiver))
    return MinFormRegion(spec.K, cons)


def min_form_member(joint: JointDistribution, spec: NetworkSpec, receiver: int,
                    point, tol: float = DEFAULT_TOL) -> Verdict:
    """Min-form membership of one rate tuple; equivalent to the MAC form."""
    return member(min_form_region(joint, spec, receiver), point, tol)


# ---------------------------------------------------------------------------
# 2D boundary extraction and export.
# ---------------------------------------------------------------------------

def boundary_2d(region, grid: int, r1_max: float, r2_cap: float = 64.0,
                tol: float = DEFAULT_TOL, precision: float = 1e-6):
    """Upper envelope of a downward-closed 2D region.

    For each R1 on the grid, bisects for the largest R2 whose pair is not
    Outside; columns whose fiber is empty report NaN, and columns still
    inside at r2_cap report r2_cap.  Spot-checks downward closure along
    the way.
    """
    if grid < 2:
        raise UsageError("grid must be at least 2")
    if region_dimension(region) != 2:
        raise UsageError("boundary extraction needs a 2D region")
    pts = []
    for r1 in np.linspace(0.0, r1_max, grid):
        r1 = float(r1)

        def inside(r2: float) -> bool:
            return region.satisfied(np.array([[r1, r2]]), +tol)[0]

        if not inside(0.0):
            pts.append((r1, float("nan")))
            continue
        if inside(r2_cap):
            pts.append((r1, r2_cap))
            continue
        lo, hi = 0.0, r2_cap
        while hi - lo > precision:
            mid = 0.5 * (lo + hi)
            if inside(mid):
                lo = mid
            else:
                hi = mid
        _spot_check_downward(region, r1, lo, tol)
        pts.append((r1, lo))
    return pts


def _spot_check_downward(region, r1: float, r2: float, tol: float) -> None:
    from .errors import ConsistencyError

    for f in (0.25, 0.7):
        probe = np.array([[r1 * f, r2 * f]])
        if not region.satisfied(probe, +tol)[0]:
            raise ConsistencyError(
                f"region is not downward closed near ({r1:.6f}, {r2:.6f})")


def region_to_json(region) -> dict:
    if isinstance(region, Polytope):
        return {
            "type": "polytope",
            "dimension": region.dimension,
            "inequalities": [
                {"coeffs": [[c.numerator, c.denominator] for c in q.coeffs],
                 "rhs": q.rhs}
                for q in region.inequalities
            ],
        }
    kind = "union" if isinstance(region, Union) else "intersection"
    return {"type": kind, "children": [region_to_json(c) for c in region.children]}


def region_from_json(doc: dict):
    if doc["type"] == "polytope":
        rows = tuple(
            LinearRateInequality(tuple(Fraction(n, d) for n, d in q["coeffs"]),
                                 float(q["rhs"]))
            for q in doc["inequalities"])
        return Polytope(int(doc["dimension"]), rows)
    node = Union if doc["type"] == "union" else Intersection
    return node(tuple(region_from_json(c) for c in doc["children"]))


def boundary_to_csv(points) -> str:
    lines = ["r1,r2"]
    lines += [f"{r1:.9f},{r2:.9f}" for r1, r2 in points]
    return "\n".join(lines) + "\n"


def boundary_to_svg(points, width: int = 480, height: int = 360) -> str:
    """Minimal SVG polyline of a boundary curve (quick-look only)."""
    finite = [(r1, r2) for r1, r2 in points if np.isfinite(r2)]
    if not finite:
        return f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}"/>'
    xs = [p[0] for p in finite]
    ys = [p[1] for p in finite]
    x_max = max(max(xs), 1e-12)
    y_max = max(max(ys), 1e-12)
    pad = 10
    sx = (width - 2 * pad) / x_max
    sy = (height - 2 * pad) / y_max
    coords = " ".join(
        f"{pad + x * sx:.2f},{height - pad - y * sy:.2f}" for x, y in finite)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">'
        f'<polyline fill="none" stroke="black" points="{coords}"/></svg>'
    )
