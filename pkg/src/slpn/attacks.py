"""Decoding attacks and the oracle machinery built on them.

Exhaustive search is the ground truth at small sizes; the information-set
decoders are the generic benchmark at working sizes. Attacks only ever look
at (matrix, word); retained witnesses are for verification by tests.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional

from .gf2 import BitMat, BitVec, pair_weight_int
from .reductions import Decision, Oracle
from .sampling import Instance, InstanceKind, Rng

__all__ = [
    "AttackResult",
    "brute_force_search_symplpn",
    "brute_force_search",
    "brute_force_decide",
    "make_brute_oracle",
    "make_coin_oracle",
    "witness_oracle",
    "prange_isd",
    "pair_aware_isd",
    "min_distance",
    "eta_weight",
]

BRUTE_FORCE_LIMIT = 24


@dataclass(frozen=True)
class AttackResult:
    success: bool
    secret: Optional[BitVec]
    error: Optional[BitVec]
    iterations: int
    wall_time: float

    def to_json(self) -> dict:
        return {
            "success": self.success,
            "secret": self.secret.to_json() if self.secret else None,
            "error": self.error.to_json() if self.error else None,
            "iterations": self.iterations,
            "wall_time": self.wall_time,
        }


def _error_weight(instance_kind: InstanceKind, value: int, nrows: int) -> int:
    if instance_kind is InstanceKind.LPN:
        return value.bit_count()
    return pair_weight_int(value, nrows // 2)


def _expected_error_weight(instance: Instance) -> float:
    if instance.kind is InstanceKind.LPN:
        return instance.matrix.nrows * instance.p
    return instance.n * instance.p


def brute_force_search(instance: Instance) -> tuple[BitVec, BitVec]:
    """Minimum-weight consistent (secret, error), lowest secret on ties.

    Walks all secrets in Gray-code order while tracking word + matrix @ x
    incrementally; the metric is pair weight for symplectic kinds and
    Hamming weight for plain parity instances.
    """
    k = instance.matrix.ncols
    if k > BRUTE_FORCE_LIMIT:
        raise ValueError("secret space too large to enumerate")
    cols = [c.value for c in instance.matrix.cols()]
    nrows = instance.matrix.nrows
    current = instance.word.value  # error for x = 0
    best_w = _error_weight(instance.kind, current, nrows)
    best_x = 0
    best_e = current
    gray = 0
    for i in range(1, 1 << k):
        j = (i & -i).bit_length() - 1
        gray ^= 1 << j
        current ^= cols[j]
        w = _error_weight(instance.kind, current, nrows)
        if w < best_w or (w == best_w and gray < best_x):
            best_w, best_x, best_e = w, gray, current
    return BitVec(k, best_x), BitVec(nrows, best_e)


def brute_force_search_symplpn(instance: Instance) -> tuple[BitVec, BitVec]:
    """Exhaustive decoder for symplectic instances: min pair-weight error."""
    if instance.kind is not InstanceKind.SYMPLPN:
        raise ValueError("expected a symplectic instance")
    return brute_force_search(instance)


def brute_force_decide(instance: Instance, weight_threshold: Optional[float] = None) -> Decision:
    """Structured iff the minimum consistent error weight is at most the
    threshold (default twice the expected error weight)."""
    if weight_threshold is None:
        weight_threshold = 2.0 * _expected_error_weight(instance)
    _, e = brute_force_search(instance)
    w = _error_weight(instance.kind, e.value, instance.matrix.nrows)
    return Decision.STRUCTURED if w <= weight_threshold else Decision.UNSTRUCTURED


def make_brute_oracle(weight_threshold: Optional[float] = None) -> Oracle:
    def oracle(instance: Instance) -> Decision:
        return brute_force_decide(instance, weight_threshold)

    return oracle


def make_coin_oracle(rng: Rng) -> Oracle:
    def oracle(instance: Instance) -> Decision:
        return Decision.STRUCTURED if rng.bit() else Decision.UNSTRUCTURED

    return oracle


def witness_oracle(instance: Instance) -> Decision:
    """Upper-anchor oracle that reads the generator's ground truth."""
    if instance.witness is None:
        raise ValueError("instance carries no witness")
    return Decision.STRUCTURED if instance.witness.structured else Decision.UNSTRUCTURED


def _solve_full_rank(rows: list[int], ncols: int, rhs: list[int]) -> Optional[int]:
    """Solve a stacked system assuming zero error on these rows.

    Returns the packed solution if the rows have full column rank and the
    system is consistent, else None.
    """
    aug = [r | (b << ncols) for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    nrows = len(aug)
    for c in range(ncols):
        bit = 1 << c
        pivot = next((i for i in range(r, nrows) if aug[i] & bit), None)
        if pivot is None:
            return None  # rank deficient: not an information set
        aug[r], aug[pivot] = aug[pivot], aug[r]
        prow = aug[r]
        for i in range(nrows):
            if i != r and aug[i] & bit:
                aug[i] ^= prow
        pivots.append((r, c))
        r += 1
    for i in range(r, nrows):
        if aug[i] >> ncols:
            return None  # inconsistent: the zero-error hypothesis failed
    x = 0
    for row, col in pivots:
        x |= ((aug[row] >> ncols) & 1) << col
    return x


def _default_isd_threshold(instance: Instance) -> int:
    return math.ceil(2.5 * _expected_error_weight(instance))


def _finish(instance, x_val, start, iters):
    k = instance.matrix.ncols
    x = BitVec(k, x_val)
    e = instance.word ^ instance.matrix.matvec(x)
    return AttackResult(True, x, e, iters, time.perf_counter() - start)


def prange_isd(
    rng: Rng,
    instance: Instance,
    max_iters: int,
    weight_threshold: Optional[int] = None,
) -> AttackResult:
    """Classic information-set decoding: guess an error-free row subset of
    size k, invert, accept when the residual weight is plausible.

    Singular information sets are discarded, not repaired.
    """
    if weight_threshold is None:
        weight_threshold = _default_isd_threshold(instance)
    nrows = instance.matrix.nrows
    k = instance.matrix.ncols
    word = instance.word
    start = time.perf_counter()
    gen = rng.numpy()
    for it in range(1, max_iters + 1):
        picks = gen.permutation(nrows)[:k]
        rows = [instance.matrix.rows[i] for i in picks]
        rhs = [word.bit(int(i)) for i in picks]
        x_val = _solve_full_rank(rows, k, rhs)
        if x_val is None:
            continue
        e = word.value ^ instance.matrix.matvec(BitVec(k, x_val)).value
        if _error_weight(instance.kind, e, nrows) <= weight_threshold:
            return _finish(instance, x_val, start, it)
    return AttackResult(False, None, None, max_iters, time.perf_counter() - start)


def pair_aware_isd(
    rng: Rng,
    instance: Instance,
    max_iters: int,
    weight_threshold: Optional[int] = None,
) -> AttackResult:
    """Information-set decoding that selects whole index pairs (j, n+j).

    Pair noise hits both rows of a pair together, so sampling the set in
    pairs buys a better clean-set probability per row; the extra rows of an
    odd cover double as free parity checks. Some codes leave every pure pair
    selection rank-deficient (e.g. codes supported in one half), so a
    deficient draw is topped up with individual rows that still extend the
    rank, all under the same zero-error hypothesis.
    """
    if instance.matrix.nrows % 2:
        raise ValueError("pair-aware decoding needs 2n rows")
    if weight_threshold is None:
        weight_threshold = _default_isd_threshold(instance)
    n = instance.matrix.nrows // 2
    k = instance.matrix.ncols
    npairs = (k + 1) // 2
    word = instance.word
    mrows = instance.matrix.rows
    start = time.perf_counter()
    gen = rng.numpy()
    for it in range(1, max_iters + 1):
        pairs = gen.permutation(n)[:npairs]
        picks = [int(j) for j in pairs] + [int(j) + n for j in pairs]
        basis = _Echelon()
        for i in picks:
            basis.add(mrows[i])
        if basis.size() < k:
            chosen = set(picks)
            for i in gen.permutation(2 * n):
                i = int(i)
                if i in chosen:
                    continue
                if basis.add(mrows[i]):
                    picks.append(i)
                    if basis.size() == k:
                        break
            if basis.size() < k:
                continue  # the whole matrix is rank deficient
        rows = [mrows[i] for i in picks]
        rhs = [word.bit(i) for i in picks]
        x_val = _solve_full_rank(rows, k, rhs)
        if x_val is None:
            continue
        e = word.value ^ instance.matrix.matvec(BitVec(k, x_val)).value
        if _error_weight(instance.kind, e, instance.matrix.nrows) <= weight_threshold:
            return _finish(instance, x_val, start, it)
    return AttackResult(False, None, None, max_iters, time.perf_counter() - start)


class _Echelon:
    def __init__(self):
        self.rows: list[int] = []

    def add(self, v: int) -> bool:
        for r in self.rows:
            if v ^ r < v:
                v ^= r
        if v == 0:
            return False
        self.rows.append(v)
        self.rows.sort(reverse=True)
        return True

    def size(self) -> int:
        return len(self.rows)


def min_distance(code: BitMat, pair_metric: bool = False) -> int:
    """Minimum weight of a nonzero codeword of im(code), by enumeration."""
    k = code.ncols
    if k > BRUTE_FORCE_LIMIT:
        raise ValueError("code too large to enumerate")
    if k == 0:
        raise ValueError("empty code has no nonzero codeword")
    if pair_metric and code.nrows % 2:
        raise ValueError("pair metric needs 2n rows")
    n = code.nrows // 2
    cols = [c.value for c in code.cols()]
    best = code.nrows + 1
    current = 0
    gray = 0
    for i in range(1, 1 << k):
        j = (i & -i).bit_length() - 1
        gray ^= 1 << j
        current ^= cols[j]
        if gray == 0 or current == 0:
            continue
        w = pair_weight_int(current, n) if pair_metric else current.bit_count()
        if w < best:
            best = w
    return best


def eta_weight(w: int, p: float) -> float:
    """Lower bound on Pr[b . e = 1] for a weight-w vector b against pair noise:
    (1 - (1 - 4p/3)^(w/2)) / 2."""
    if w < 0:
        raise ValueError("negative weight")
    if not 0.0 <= p <= 0.75:
        raise ValueError("p out of range")
    return (1.0 - (1.0 - (4.0 / 3.0) * p) ** (w / 2.0)) / 2.0
