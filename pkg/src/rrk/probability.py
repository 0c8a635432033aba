"""Finite-alphabet probability machinery for interference networks.

A network is a memoryless conditional pmf p(y_1..y_L | x_1..x_K) together
with per-receiver demand sets.  A coding ensemble is a time-sharing pmf
p(q) and per-sender conditionals p(x_k | q).  Everything downstream works
on the dense single-letter joint

    p(q, x_1..x_K, y_1..y_L) = p(q) * prod_k p(x_k|q) * p(y^L | x^K),

so all information quantities reduce to entropy sums over marginals of
one table.  Units are bits throughout (log base 2), with 0*log 0 = 0.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, UsageError

# Probability mass below this is treated as exact zero in entropy sums.
ZERO_MASS = 1e-15

# Normalization slack accepted when validating pmfs.
PMF_TOL = 1e-12

DEFAULT_TABLE_CAP = 10_000_000


def table_cap() -> int:
    """Dense-table entry cap; RRK_MAX_TABLE overrides the default."""
    return int(os.environ.get("RRK_MAX_TABLE", DEFAULT_TABLE_CAP))


def _check_pmf(p: np.ndarray, what: str) -> None:
    if np.any(p < 0):
        raise ConfigurationError(f"{what} has negative entries")
    s = p.sum()
    if abs(s - 1.0) > PMF_TOL:
        raise ConfigurationError(f"{what} sums to {s!r}, expected 1")


@dataclass(frozen=True, eq=False)
class NetworkSpec:
    """A (K, L) discrete memoryless interference network.

    channel has shape input_sizes + output_sizes; entry
    channel[x1, .., xK, y1, .., yL] = p(y_1..y_L | x_1..x_K).
    demands[l] is the 0-based set of senders receiver l must recover.
    """

    input_sizes: tuple[int, ...]
    output_sizes: tuple[int, ...]
    channel: np.ndarray
    demands: tuple[frozenset[int], ...]

    def __post_init__(self):
        if any(s < 1 for s in self.input_sizes + self.output_sizes):
            raise ConfigurationError("alphabet sizes must be >= 1")
        expected = self.input_sizes + self.output_sizes
        if self.channel.shape != expected:
            raise ConfigurationError(
                f"channel shape {self.channel.shape} != {expected}")
        if np.any(self.channel < 0):
            raise ConfigurationError("channel has negative entries")
        axes = tuple(range(self.K, self.K + self.L))
        slices = self.channel.sum(axis=axes)
        if np.max(np.abs(slices - 1.0)) > PMF_TOL:
            raise ConfigurationError("channel conditional slices must sum to 1")
        if len(self.demands) != self.L:
            raise ConfigurationError("need one demand set per receiver")
        for l, d in enumerate(self.demands):
            if not d or not d <= set(range(self.K)):
                raise ConfigurationError(f"demand set {l} invalid: {set(d)}")
        self.channel.setflags(write=False)

    @property
    def K(self) -> int:
        return len(self.input_sizes)

    @property
    def L(self) -> int:
        return len(self.output_sizes)

    def receiver_channel(self, receiver: int) -> np.ndarray:
        """Marginal p(y_l | x_1..x_K), shape input_sizes + (|Y_l|,)."""
        axes = tuple(self.K + j for j in range(self.L) if j != receiver)
        return self.channel.sum(axis=axes)


@dataclass(frozen=True, eq=False)
class InputEnsemble:
    """Time-sharing pmf p(q) and per-sender conditionals p(x_k | q).

    p_x_given_q[k] has shape (|Q|, |X_k|); rows are pmfs.
    """

    p_q: np.ndarray
    p_x_given_q: tuple[np.ndarray, ...]

    def __post_init__(self):
        _check_pmf(self.p_q, "p(q)")
        for k, cond in enumerate(self.p_x_given_q):
            if cond.ndim != 2 or cond.shape[0] != self.q_size:
                raise ConfigurationError(f"conditional {k} has bad shape")
            if np.any(cond < 0):
                raise ConfigurationError(f"conditional {k} has negative entries")
            if np.max(np.abs(cond.sum(axis=1) - 1.0)) > PMF_TOL:
                raise ConfigurationError(f"conditional {k} rows must sum to 1")
        self.p_q.setflags(write=False)
        for cond in self.p_x_given_q:
            cond.setflags(write=False)

    @property
    def q_size(self) -> int:
        return len(self.p_q)

    @property
    def K(self) -> int:
        return len(self.p_x_given_q)

    def input_sizes(self) -> tuple[int, ...]:
        return tuple(c.shape[1] for c in self.p_x_given_q)


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Dense joint over (Q, X_1..X_K, Y_1..Y_L) with named axes."""

    table: np.ndarray
    axes: tuple[str, ...]
    _index: dict = field(repr=False, hash=False, compare=False, default=None)

    def __post_init__(self):
        if self.table.ndim != len(self.axes):
            raise ConfigurationError("axis names do not match table rank")
        _check_pmf(self.table, "joint table")
        object.__setattr__(self, "_index",
                           {name: i for i, name in enumerate(self.axes)})
        self.table.setflags(write=False)

    def axis(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UsageError(f"unknown variable {name!r}; have {self.axes}")

    def marginal(self, names) -> np.ndarray:
        """Marginal table over the given variables, in the given order."""
        keep = [self.axis(n) for n in names]
        drop = tuple(i for i in range(self.table.ndim) if i not in keep)
        m = self.table.sum(axis=drop)
        # summing preserved ascending axis order; permute to requested order
        ranks = np.argsort(np.argsort(keep))
        return np.transpose(m, ranks) if keep else m

    def entropy(self, names) -> float:
        """H(names) in bits; H of the empty set is 0."""
        names = list(names)
        return _entropy(self.marginal(names)) if names else 0.0

    def conditional_entropy(self, targets, given) -> float:
        """H(targets | given) in bits."""
        targets, given = list(targets), list(given)
        if set(targets) & set(given):
            raise UsageError("targets and conditioning variables overlap")
        return self.entropy(targets + given) - self.entropy(given)

    def mutual_information(self, left, right, given=()) -> float:
        """I(left; right | given) in bits."""
        left, right, given = list(left), list(right), list(given)
        sets = [set(left), set(right), set(given)]
        if sets[0] & sets[1] or sets[0] & sets[2] or sets[1] & sets[2]:
            raise UsageError("variable sets must be disjoint")
        return (self.entropy(left + given) + self.entropy(right + given)
                - self.entropy(left + right + given) - self.entropy(given))


def _entropy(table: np.ndarray) -> float:
    p = table[table > ZERO_MASS]
    return float(-(p * np.log2(p)).sum())


def joint_axis_names(K: int, L: int) -> tuple[str, ...]:
    return ("Q",) + tuple(f"X{k + 1}" for k in range(K)) \
        + tuple(f"Y{l + 1}" for l in range(L))


def build_joint(spec: NetworkSpec, ensemble: InputEnsemble) -> JointDistribution:
    """Materialize p(q) * prod_k p(x_k|q) * p(y^L | x^K)."""
    if ensemble.K != spec.K or ensemble.input_sizes() != spec.input_sizes:
        raise ConfigurationError("ensemble alphabets do not match the network")
    size = ensemble.q_size * int(np.prod(spec.input_sizes, dtype=np.int64)) \
        * int(np.prod(spec.output_sizes, dtype=np.int64))
    if size > table_cap():
        raise ConfigurationError(
            f"joint table would hold {size} entries, over the cap "
            f"{table_cap()} (raise RRK_MAX_TABLE to override)")
    # p(q, x_1..x_K) by successive outer products along fresh trailing axes
    p_inputs = ensemble.p_q
    for cond in ensemble.p_x_given_q:
        wide = cond.reshape((ensemble.q_size,) + (1,) * (p_inputs.ndim - 1)
                            + (cond.shape[1],))
        p_inputs = p_inputs[..., None] * wide
    table = p_inputs.reshape(p_inputs.shape + (1,) * spec.L) * spec.channel[None, ...]
    return JointDistribution(table, joint_axis_names(spec.K, spec.L))


def compose_virtual_channel(base: NetworkSpec, maps, demands=None) -> NetworkSpec:
    """Replace each physical input by a deterministic combination of virtual ones.

    maps[k] is an integer array whose shape gives the virtual alphabets
    feeding physical input k, and whose values are symbols of X_k.  The
    composed network has one sender per virtual input (in map order) and
    channel p(y^L | u_1..u_M) = p_base(y^L | x_1(u..), .., x_K(u..)).

    By default each base demand set expands to all the virtual senders of
    its members; pass explicit 0-based demand sets to override.
    """
    if len(maps) != base.K:
        raise ConfigurationError("need one symbol map per physical input")
    maps = [np.asarray(m, dtype=np.int64) for m in maps]
    virt_sizes: list[int] = []
    owners: list[list[int]] = []  # virtual sender indices per physical input
    for k, m in enumerate(maps):
        if m.min() < 0 or m.max() >= base.input_sizes[k]:
            raise ConfigurationError(
                f"map {k} produces symbols outside alphabet of size "
                f"{base.input_sizes[k]}")
        owners.append(list(range(len(virt_sizes), len(virt_sizes) + m.ndim)))
        virt_sizes.extend(m.shape)
    M = len(virt_sizes)
    grids = np.meshgrid(*[np.arange(s) for s in virt_sizes], indexing="ij")
    phys = [m[tuple(grids[i] for i in owners[k])] for k, m in enumerate(maps)]
    channel = base.channel[tuple(phys)]
    if demands is None:
        demands = tuple(
            frozenset(v for k in d for v in owners[k]) for d in base.demands)
    else:
        demands = tuple(frozenset(d) for d in demands)
    return NetworkSpec(tuple(virt_sizes), base.output_sizes, channel, demands)


# ---------------------------------------------------------------------------
# JSON ingestion.  Index order is fixed: the flat channel array is C
# row-major over (x_1, .., x_K, y_1, .., y_L), so y_L varies fastest and
# x_1 slowest.  Demand sets are written 1-based in files, 0-based in code.
# ---------------------------------------------------------------------------

def network_spec_from_dict(doc: dict) -> NetworkSpec:
    try:
        K, L = int(doc["K"]), int(doc["L"])
        input_sizes = tuple(int(s) for s in doc["input_alphabet_sizes"])
        output_sizes = tuple(int(s) for s in doc["output_alphabet_sizes"])
        demands = tuple(frozenset(int(k) - 1 for k in d) for d in doc["demands"])
        flat = np.asarray(doc["channel"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"malformed network document: {exc}") from exc
    if len(input_sizes) != K or len(output_sizes) != L:
        raise ConfigurationError("alphabet size lists do not match K, L")
    want = int(np.prod(input_sizes + output_sizes, dtype=np.int64))
    if flat.size != want:
        raise ConfigurationError(
            f"channel array has {flat.size} entries, expected {want}")
    channel = flat.reshape(input_sizes + output_sizes)
    return NetworkSpec(input_sizes, output_sizes, channel, demands)


def ensemble_from_dict(doc: dict) -> InputEnsemble:
    try:
        q_size = int(doc["q_size"])
        p_q = np.asarray(doc["p_q"], dtype=float)
        conds = tuple(np.asarray(m, dtype=float).reshape(q_size, -1)
                      for m in doc["p_x_given_q"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"malformed ensemble document: {exc}") from exc
    if p_q.shape != (q_size,):
        raise ConfigurationError("p_q length must equal q_size")
    return InputEnsemble(p_q, conds)


def load_network_spec(path) -> NetworkSpec:
    with open(path) as fh:
        return network_spec_from_dict(json.load(fh))


def load_ensemble(path) -> InputEnsemble:
    with open(path) as fh:
        return ensemble_from_dict(json.load(fh))


def uniform_ensemble(spec: NetworkSpec, q_size: int = 1) -> InputEnsemble:
    """Uniform inputs, no time sharing beyond a |Q|-ary uniform Q."""
    p_q = np.full(q_size, 1.0 / q_size)
    conds = tuple(np.full((q_size, s), 1.0 / s) for s in spec.input_sizes)
    return InputEnsemble(p_q, conds)
