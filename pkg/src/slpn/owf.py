"""One-way-function family over stabilizer-style matrix pairs.

The index is a pair of isotropic matrices with jointly full rank; evaluation
is the noisy-codeword map (r, y, e) -> a @ r + b @ y + e with the error
capped in pair weight. Inverting recovers both logical parts, which is what
ties the family's security to the underlying decoding problems.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .gf2 import BitMat, BitVec, IsotropicCode, SympVec, rank
from .sampling import Rng, sample_depolarizing, sample_lsn_matrices

__all__ = [
    "OwfIndex",
    "OwfInput",
    "owf_gen",
    "owf_sample",
    "owf_eval",
    "owf_verify_preimage",
    "weight_cap",
    "qgv_predicate",
]


@dataclass(frozen=True)
class OwfIndex:
    n: int
    k: int
    p: float
    a: IsotropicCode
    b: IsotropicCode

    def joint(self) -> BitMat:
        return self.a.mat.hstack(self.b.mat)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "p": self.p,
            "a": self.a.to_json(),
            "b": self.b.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "OwfIndex":
        idx = cls(
            int(obj["n"]),
            int(obj["k"]),
            float(obj["p"]),
            IsotropicCode.from_json(obj["a"]),
            IsotropicCode.from_json(obj["b"]),
        )
        if rank(idx.joint()) != idx.n + idx.k:
            raise ValueError("matrices are not jointly full rank")
        return idx


@dataclass(frozen=True)
class OwfInput:
    r: BitVec
    y: BitVec
    e: SympVec

    def to_json(self) -> dict:
        return {"r": self.r.to_json(), "y": self.y.to_json(), "e": self.e.v.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> "OwfInput":
        e = BitVec.from_json(obj["e"])
        return cls(
            BitVec.from_json(obj["r"]),
            BitVec.from_json(obj["y"]),
            SympVec(e.nbits // 2, e),
        )


def weight_cap(index: OwfIndex) -> int:
    """Domain cap floor(2.01 n p) on the error's pair weight."""
    return math.floor(2.01 * index.n * index.p)


def owf_gen(rng: Rng, k: int, n: int, p: float) -> OwfIndex:
    """Sample an index: the same matrix pair the instance generator uses."""
    if k > n:
        raise ValueError("joint rank n + k cannot exceed 2n")
    a, b = sample_lsn_matrices(rng, k, n)
    return OwfIndex(n, k, p, IsotropicCode.trusted(a), IsotropicCode.trusted(b))


def owf_sample(rng: Rng, index: OwfIndex, p: float | None = None) -> OwfInput:
    """Uniform logical parts plus capped pair noise; over-cap draws fall back
    to the zero error so sampling never leaves the domain."""
    p = index.p if p is None else p
    r = rng.bits(index.n)
    y = rng.bits(index.k)
    e = sample_depolarizing(rng, index.n, p)
    if e.pair_weight() > weight_cap(index):
        e = SympVec.zeros(index.n)
    return OwfInput(r, y, e)


def owf_eval(index: OwfIndex, x: OwfInput) -> BitVec:
    """a @ r + b @ y + e; the public index itself is not re-emitted."""
    if x.r.nbits != index.n or x.y.nbits != index.k or x.e.n != index.n:
        raise ValueError("input dimensions do not match the index")
    return index.a.mat.matvec(x.r) ^ index.b.mat.matvec(x.y) ^ x.e.v


def owf_verify_preimage(index: OwfIndex, candidate: OwfInput, target: BitVec) -> bool:
    """True iff the candidate respects the weight cap and evaluates to target."""
    if candidate.e.pair_weight() > weight_cap(index):
        return False
    return owf_eval(index, candidate) == target


def qgv_predicate(delta: float, rate: float) -> bool:
    """Quantum Gilbert-Varshamov condition H2(delta) + delta log2(3) < 1 - rate."""
    if not 0.0 < delta < 1.0 or not 0.0 < rate < 1.0:
        raise ValueError("arguments must lie in (0, 1)")
    h2 = -delta * math.log2(delta) - (1.0 - delta) * math.log2(1.0 - delta)
    return h2 + delta * math.log2(3.0) < 1.0 - rate
