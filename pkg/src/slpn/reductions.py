"""Executable reductions between the noisy-codeword decision problems.

Each reduction transforms instances so that structured inputs map to the
structured distribution of the target problem and unstructured inputs stay
uniform, then forwards a decision oracle's answer. Oracles are plain
callables so the same code runs against brute-force deciders, planted-answer
oracles, and random coins.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from . import diagnostics
from .gf2 import (
    BitMat,
    BitVec,
    permute_pairs,
    permute_rows_pairs,
    rank,
    solve,
    symp_dual_basis,
    symp_vec_mat,
)
from .harness import wilson_interval
from .sampling import (
    HyperplaneRotation,
    Instance,
    InstanceKind,
    Rng,
    gen_symplpn,
)

__all__ = [
    "Decision",
    "Branch",
    "Oracle",
    "ReductionReport",
    "HyperplaneDimensionError",
    "lsn_to_symplpn",
    "convolve_param",
    "symmetrize_noise",
    "default_flood_count",
    "drop_bit_transform",
    "drop_logical_bit",
    "interpolation_select",
    "dual_mode_transform",
    "lpn_drop_bits",
    "measure_lsn_reduction",
    "measure_drop_bit",
]


class Decision(enum.Enum):
    STRUCTURED = "structured"
    UNSTRUCTURED = "unstructured"


class Branch(enum.Enum):
    PLAIN = "plain"
    FLOODED = "flooded"


Oracle = Callable[[Instance], Decision]


class HyperplaneDimensionError(RuntimeError):
    """The code has no vector with first coordinate 1, so the restriction
    to the hyperplane does not lose a dimension; callers resample."""


@dataclass(frozen=True)
class ReductionReport:
    trials: int
    successes: int
    advantage: float
    ci_lo: float
    ci_hi: float
    branch: Optional[Branch] = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.successes > self.trials:
            raise ValueError("successes exceed trials")

    def to_json(self) -> dict:
        obj = {
            "trials": self.trials,
            "successes": self.successes,
            "advantage": self.advantage,
            "ci": [self.ci_lo, self.ci_hi],
            "details": self.details,
        }
        if self.branch is not None:
            obj["branch"] = self.branch.value
        return obj


def lsn_to_symplpn(rng: Rng, instance: Instance, oracle: Oracle) -> BitVec:
    """Guess the logical part of a stabilizer-style sample with one oracle call.

    Strips the b columns, asks the decision oracle about (a, word): a
    structured verdict means the logical part was zero, anything else gets a
    uniform nonzero guess.
    """
    if instance.kind is not InstanceKind.LSN:
        raise ValueError("expected an LSN instance")
    k, n = instance.k, instance.n
    sub = Instance(
        InstanceKind.SYMPLPN,
        instance.lsn_a_part(),
        instance.word,
        k=n,
        n=n,
        p=instance.p,
    )
    if oracle(sub) is Decision.STRUCTURED:
        return BitVec.zeros(k)
    return BitVec(k, rng.integer((1 << k) - 1) + 1)


def convolve_param(p: float, q: float) -> float:
    """The rate u with pair-noise(p) + pair-noise(u) distributed as pair-noise(q)."""
    if not 0.0 <= p <= 0.75:
        raise ValueError("p out of range")
    if not p <= q <= 0.75:
        raise ValueError("q out of range")
    return (q - p) / (1.0 - (4.0 / 3.0) * p)


def symmetrize_noise(rng: Rng, vec, noisy_pairs: Iterable[int], n: int):
    """Scramble noise that is confined to a known pair set into symmetric pair noise.

    Draws T ~ Binomial(n, 4m/3n) (resampling while T < m, counted under
    ``reductions.symmetrize_resample``), overlays uniform pair noise on the
    noisy set plus the lowest T - m other indices, and applies a uniform
    pair permutation. Returns (vector, permutation). The binomial parameter
    is clamped to 1 when m > 3n/4.
    """
    pairs = sorted(set(int(j) for j in noisy_pairs))
    m = len(pairs)
    if pairs and not 0 <= pairs[0] <= pairs[-1] < n:
        raise ValueError("pair index out of range")
    p_t = min(1.0, (4.0 * m) / (3.0 * n))
    while True:
        t = rng.binomial(n, p_t)
        if t >= m:
            break
        diagnostics.bump("reductions.symmetrize_resample")
    chosen = set(pairs)
    for j in range(n):
        if len(chosen) == t:
            break
        if j not in chosen:
            chosen.add(j)
    overlay = rng.bits(2 * len(chosen))
    flips = []
    for i, j in enumerate(sorted(chosen)):
        if overlay.bit(2 * i):
            flips.append(j)
        if overlay.bit(2 * i + 1):
            flips.append(n + j)
    carrier = vec.v if hasattr(vec, "v") else vec
    noised = carrier.flip_bits(flips)
    perm = rng.permutation(n)
    out = permute_pairs(noised, perm)
    if hasattr(vec, "v"):
        from .gf2 import SympVec

        return SympVec(n, out), perm
    return out, perm


def default_flood_count(n: int, p: float) -> int:
    """Number of pairs to flood before symmetrizing: log2(n)^2 / (1 - 4p/3),
    clamped so the symmetrization binomial stays valid."""
    raw = (math.log2(n) ** 2) / (1.0 - (4.0 / 3.0) * p)
    return max(1, min((3 * n) // 4, math.ceil(raw)))


def drop_bit_transform(
    rng: Rng, instance: Instance, branch: Branch, m: Optional[int] = None
) -> Instance:
    """Map an n-logical-bit sample to an (n-1)-logical-bit sample.

    Pipeline: (flooded branch only: add uniform bits to pair 1) -> restrict
    the code to the hyperplane of first-coordinate-zero vectors, fixing the
    word up by a code vector when its first bit is 1 -> apply a random
    symplectic hyperplane rotation -> overlay a uniform pair at the rotation's
    pivot index -> flood m - 1 more pairs -> symmetrize the planted noise.

    Raises HyperplaneDimensionError when the hyperplane does not drop a
    dimension (no code vector has first coordinate 1).
    """
    if instance.kind is not InstanceKind.SYMPLPN or instance.k != instance.n:
        raise ValueError("expected a square symplectic instance (k == n)")
    n, p = instance.n, instance.p
    if n < 2:
        raise ValueError("need n >= 2")
    u = instance.word
    if branch is Branch.FLOODED:
        u = u.flip_bits(j for j, b in ((0, rng.bit()), (n, rng.bit())) if b)

    a = instance.matrix
    cols = a.cols()
    pivot = next((c for c in cols if c.bit(0)), None)
    if pivot is None:
        raise HyperplaneDimensionError("code lies inside the hyperplane")
    hyper_cols = [c ^ pivot if c.bit(0) else c for c in cols if c is not pivot]
    basis = BitMat.from_cols(hyper_cols, nrows=2 * n)
    a0 = basis.matmul(_random_invertible(rng, n - 1))

    if u.bit(0):
        u = u ^ pivot

    rot = HyperplaneRotation.sample(rng, n)
    while rot.k_pair is None:
        diagnostics.bump("reductions.rotation_identity_resample")
        rot = HyperplaneRotation.sample(rng, n)
    b = rot.c.matmul(a0)
    w = rot.c.matvec(u)

    kk = rot.k_pair - 1
    w = w.flip_bits(j for j, bit in ((kk, rng.bit()), (n + kk, rng.bit())) if bit)

    count = default_flood_count(n, p) if m is None else int(m)
    if count < 1:
        raise ValueError("flood count must be positive")
    extras = [j for j in range(n) if j != kk][: count - 1]
    flood_bits = rng.bits(2 * len(extras))
    flips = []
    for i, j in enumerate(extras):
        if flood_bits.bit(2 * i):
            flips.append(j)
        if flood_bits.bit(2 * i + 1):
            flips.append(n + j)
    w = w.flip_bits(flips)

    noisy = [kk] + extras
    w, perm = symmetrize_noise(rng, w, noisy, n)
    b = permute_rows_pairs(b, perm)
    # the symmetrized flood convolves with the carried noise: rate
    # p + (count/n)(1 - 4p/3), which is p + log2(n)^2/n at the default count
    p_prime = p + (count / n) * (1.0 - (4.0 / 3.0) * p)
    return Instance(InstanceKind.SYMPLPN, b, w, k=n - 1, n=n, p=p_prime)


def _random_invertible(rng: Rng, n: int) -> BitMat:
    if n == 0:
        return BitMat(0, 0, [])
    while True:
        m = rng.bitmat(n, n)
        if rank(m) == n:
            return m


def drop_logical_bit(
    rng: Rng,
    instance: Instance,
    oracle: Oracle,
    branch: Branch,
    m: Optional[int] = None,
) -> Decision:
    """Decide an n-logical-bit instance with one call to an (n-1)-bit oracle."""
    return oracle(drop_bit_transform(rng, instance, branch, m))


def interpolation_select(
    report_plain: ReductionReport, report_flooded: ReductionReport
) -> Branch:
    """Pick the branch with the larger measured advantage; ties go to PLAIN."""
    if abs(report_flooded.advantage) > abs(report_plain.advantage):
        return Branch.FLOODED
    return Branch.PLAIN


def dual_mode_transform(rng: Rng, instance: Instance) -> tuple[BitMat, BitVec]:
    """Syndrome-style repackaging of an (n-1)-logical-bit sample.

    Extends the code to a maximal isotropic im(b) by a dual vector outside the
    code, appends a dual vector outside im(b), and pairs the word against all
    n + 1 columns. Structured words produce exactly (h, f * h); uniform words
    produce a uniform target because h has full column rank.
    """
    if instance.kind is not InstanceKind.SYMPLPN or instance.k != instance.n - 1:
        raise ValueError("expected an (n-1)-column symplectic instance")
    n = instance.n
    a = instance.matrix
    dual = symp_dual_basis(a)  # dimension n + 1
    u = _sample_dual_outside(rng, dual, a)
    extended = a.hstack(BitMat.from_cols([u], nrows=2 * n))
    b = extended.matmul(_random_invertible(rng, n))
    v = _sample_dual_outside(rng, dual, b)
    h = b.hstack(BitMat.from_cols([v], nrows=2 * n))
    w = symp_vec_mat(instance.word, h)
    return h, w


def _sample_dual_outside(rng: Rng, dual: BitMat, span: BitMat) -> BitVec:
    while True:
        v = dual.matvec(rng.bits(dual.ncols))
        if solve(span, v) is None:
            return v


def lpn_drop_bits(instance: Instance, k_prime: int, oracle: Oracle) -> Decision:
    """Decide a k-secret-bit parity instance via an oracle for k - k' bits,
    by discarding the last k' matrix columns."""
    if instance.kind is not InstanceKind.LPN:
        raise ValueError("expected an LPN instance")
    if not 0 < k_prime < instance.k:
        raise ValueError("k_prime out of range")
    trunc = instance.matrix.take_cols(range(instance.k - k_prime))
    sub = Instance(
        InstanceKind.LPN,
        trunc,
        instance.word,
        k=instance.k - k_prime,
        n=instance.n,
        p=instance.p,
    )
    return oracle(sub)


def measure_lsn_reduction(
    rng: Rng, oracle: Oracle, k: int, n: int, p: float, trials: int
) -> ReductionReport:
    """Success rate of the logical-part guesser over fresh samples.

    ``advantage`` is the success rate minus the 1/2^k guessing baseline.
    """
    from .sampling import gen_lsn

    successes = 0
    for _ in range(trials):
        inst = gen_lsn(rng, k, n, p, keep_witness=True)
        guess = lsn_to_symplpn(rng, inst.without_witness(), oracle)
        truth = inst.witness.secret.sub(n, n + k)
        successes += guess == truth
    lo, hi = wilson_interval(successes, trials)
    baseline = 1.0 / (1 << k)
    return ReductionReport(
        trials,
        successes,
        successes / trials - baseline,
        lo - baseline,
        hi - baseline,
        None,
        {"success_rate": successes / trials, "baseline": baseline},
    )


def measure_drop_bit(
    rng: Rng,
    oracle: Oracle,
    n: int,
    p: float,
    branch: Branch,
    trials: int,
    m: Optional[int] = None,
) -> ReductionReport:
    """Distinguishing advantage of the one-bit-drop pipeline with a given oracle."""
    counts = {True: [0, 0], False: [0, 0]}  # structured? -> [trials, said-structured]
    for i in range(trials):
        structured = i % 2 == 0
        while True:
            inst = gen_symplpn(rng, n, n, p, structured=structured)
            try:
                verdict = drop_logical_bit(rng, inst, oracle, branch, m)
                break
            except HyperplaneDimensionError:
                diagnostics.bump("reductions.hyperplane_resample")
        counts[structured][0] += 1
        counts[structured][1] += verdict is Decision.STRUCTURED
    (ts, ss), (tu, su) = counts[True], counts[False]
    p_s, p_u = ss / ts, su / tu
    lo_s, hi_s = wilson_interval(ss, ts)
    lo_u, hi_u = wilson_interval(su, tu)
    adv = abs(p_s - p_u)
    slack = (hi_s - lo_s + hi_u - lo_u) / 2.0
    correct = ss + (tu - su)
    return ReductionReport(
        trials,
        correct,
        adv,
        max(0.0, adv - slack),
        min(1.0, adv + slack),
        branch,
        {"p_structured": p_s, "p_unstructured": p_u},
    )
