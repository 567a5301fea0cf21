"""Strongly uniform keys: deterministic seed expansion and its randomized inverse.

``expand`` turns a uniform 4n^2-bit seed into a uniform full-rank isotropic
2n x n matrix by growing columns inside canonically ordered dual bases;
``invert`` maps a matrix back to a seed whose marginal is uniform, with
``expand(invert(a)) == a`` except with negligible probability. The public-key
wrapper stores the seed in place of the matrix, making the key a plain
bitstring.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import diagnostics
from .gf2 import BitMat, BitVec, IsotropicCode, SympVec, is_isotropic, rank, swap_halves
from .gf2 import _kernel_ints
from .pke import Ciphertext, PublicKey, SecretKey, dec as _pke_dec, enc_traced as _pke_enc_traced
from .sampling import Rng, sample_depolarizing

__all__ = [
    "Seed",
    "SuPublicKey",
    "expand",
    "invert",
    "su_gen",
    "su_gen_traced",
    "su_enc",
    "su_enc_traced",
    "su_dec",
]


@dataclass(frozen=True)
class Seed:
    """Exactly 4n^2 uniform bits; n is recovered from the length."""

    bits: BitVec

    def __post_init__(self):
        n = math.isqrt(self.bits.nbits // 4)
        if 4 * n * n != self.bits.nbits or n == 0:
            raise ValueError("seed length must be 4n^2")

    @property
    def n(self) -> int:
        return math.isqrt(self.bits.nbits // 4)

    def to_hex(self) -> str:
        return self.bits.to_hex()

    @classmethod
    def from_hex(cls, n: int, hexstr: str) -> "Seed":
        return cls(BitVec.from_hex(4 * n * n, hexstr))


def _ordered_dual_vectors(cols: list[int], n: int) -> tuple[list[int], tuple[int, ...]]:
    """Canonical basis of the symplectic dual of span(cols), ordered by the
    free columns of the reduced pairing system. Identical for any column set
    with the same span, which is what lets expansion and inversion agree."""
    pairing = [swap_halves(c, n) for c in cols]
    return _kernel_ints(pairing, 2 * n)


class _CanonicalDual:
    """The canonical dual basis, maintained incrementally.

    Invariant: ``vecs[i]`` has bit ``free[i]`` set and no other free bits, so
    the basis equals the one `_ordered_dual_vectors` computes from scratch.
    Restricting by a new column v reduces v's pairing row against the current
    solution basis; its support lands exactly on the free columns, and
    eliminating the lowest supported free column keeps the form canonical.
    """

    def __init__(self, n: int):
        self.n = n
        self.vecs = [1 << i for i in range(2 * n)]
        self.free = list(range(2 * n))

    def restrict(self, v: int) -> None:
        sv = swap_halves(v, self.n)
        flags = [(vec & sv).bit_count() & 1 for vec in self.vecs]
        try:
            j = flags.index(1)
        except ValueError:
            return  # v already orthogonal to the whole dual
        witness = self.vecs[j]
        self.vecs = [
            vec ^ witness if f and i != j else vec
            for i, (vec, f) in enumerate(zip(self.vecs, flags))
            if i != j
        ]
        del self.free[j]

    def coefficients(self, w: int) -> int:
        coeffs = 0
        for i, f in enumerate(self.free):
            coeffs |= ((w >> f) & 1) << i
        return coeffs


def _combine(vectors: list[int], coeffs: int) -> int:
    v = 0
    while coeffs:
        j = (coeffs & -coeffs).bit_length() - 1
        v ^= vectors[j]
        coeffs &= coeffs - 1
    return v


class _SpanTracker:
    def __init__(self):
        self.rows: list[int] = []

    def add_if_independent(self, v: int) -> bool:
        for r in self.rows:
            if v ^ r < v:
                v ^= r
        if v == 0:
            return False
        self.rows.append(v)
        self.rows.sort(reverse=True)
        return True


def expand(seed: Seed) -> BitMat:
    """Deterministically expand a seed into a 2n x n isotropic matrix.

    For each of 2n steps, consume d_i seed bits (bit index ascending) as
    combination coefficients over the ordered dual basis of the span so far,
    then keep the first n independent columns. The zero-padding fallback
    (rank below n after all steps) bumps the ``supke.expand_zero_pad``
    counter; it occurs with probability at most 4^-(n+1).
    """
    n = seed.n
    bits = seed.bits.value
    pos = 0
    tracker = _SpanTracker()
    real: list[int] = []
    dual = _CanonicalDual(n)
    for _ in range(2 * n):
        d = len(dual.vecs)
        coeffs = (bits >> pos) & ((1 << d) - 1)
        pos += d
        w = _combine(dual.vecs, coeffs)
        if len(real) < n and tracker.add_if_independent(w):
            real.append(w)
            dual.restrict(w)
    assert pos <= 4 * n * n, "dual dimensions exceeded the seed budget"
    if len(real) < n:
        diagnostics.bump("supke.expand_zero_pad")
        real.extend([0] * (n - len(real)))
    return BitMat.from_cols([BitVec(2 * n, v) for v in real], nrows=2 * n)


def invert(rng: Rng, a: BitMat) -> Seed:
    """Sample a seed that expands back to ``a``, marginally uniform over seeds.

    Mirrors expansion step by step: with probability 1 - 2^(2n-d)/2^d insert
    the next column of a, otherwise a random vector already in the span of
    the inserted columns; then read the combination coefficients off the
    ordered dual basis and pad the reconstructed prefix with fresh bits.
    """
    if a.nrows % 2 or a.ncols * 2 != a.nrows:
        raise ValueError("expected a 2n x n matrix")
    n = a.ncols
    if rank(a) != n:
        raise ValueError("matrix is not full rank")
    if not is_isotropic(a):
        raise ValueError("matrix is not isotropic")
    a_cols = [c.value for c in a.cols()]
    while True:
        prefix: list[tuple[int, int]] = []  # (coeffs, width) per step
        real: list[int] = []
        dual = _CanonicalDual(n)
        for _ in range(2 * n):
            d = len(dual.vecs)
            r = len(real)
            took_real = r < n and rng.random() >= 4.0 ** (r - n)
            if took_real:
                w = a_cols[r]
            else:
                w = _combine(real, rng.bits(r).value) if r else 0
            coeffs = dual.coefficients(w)
            if _combine(dual.vecs, coeffs) != w:
                raise RuntimeError("column is outside the dual basis")
            prefix.append((coeffs, d))
            if took_real:
                real.append(w)
                dual.restrict(w)
        if len(real) == n:
            break
        diagnostics.bump("supke.invert_retry")
    value = 0
    pos = 0
    for coeffs, width in prefix:
        value |= coeffs << pos
        pos += width
    padding = rng.bits(4 * n * n - pos)
    value |= padding.value << pos
    return Seed(BitVec(4 * n * n, value))


@dataclass(frozen=True)
class SuPublicKey:
    """Public key whose matrix part is a seed: 4n^2 + 2n bits in total."""

    n: int
    p: float
    seed: Seed
    b: BitVec

    def bit_length(self) -> int:
        return self.seed.bits.nbits + self.b.nbits

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "seed_hex": self.seed.to_hex(),
            "b": self.b.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SuPublicKey":
        n = int(obj["n"])
        seed = Seed.from_hex(n, obj["seed_hex"])
        b = BitVec.from_json(obj["b"])
        if b.nbits != 2 * n:
            raise ValueError("inconsistent public key")
        return cls(n, float(obj["p"]), seed, b)


def su_gen(rng: Rng, n: int, p: float) -> tuple[SuPublicKey, SecretKey]:
    pk, sk, _ = su_gen_traced(rng, n, p)
    return pk, sk


def su_gen_traced(rng: Rng, n: int, p: float) -> tuple[SuPublicKey, SecretKey, SympVec]:
    if not 0.0 < p < 1.0:
        raise ValueError("p out of range")
    seed = Seed(rng.bits(4 * n * n))
    a = expand(seed)
    x = rng.bits(n)
    e = sample_depolarizing(rng, n, p)
    b = a.matvec(x) ^ e.v
    return SuPublicKey(n, p, seed, b), SecretKey(n, x), e


def _as_plain_key(pk: SuPublicKey) -> PublicKey:
    return PublicKey(pk.n, pk.p, IsotropicCode.trusted(expand(pk.seed)), pk.b)


def su_enc(rng: Rng, pk: SuPublicKey, mu: int, p: float | None = None) -> Ciphertext:
    ct, _ = su_enc_traced(rng, pk, mu, p)
    return ct


def su_enc_traced(
    rng: Rng, pk: SuPublicKey, mu: int, p: float | None = None
) -> tuple[Ciphertext, SympVec]:
    """Expand the seed, then encrypt exactly as with a plain public key."""
    return _pke_enc_traced(rng, _as_plain_key(pk), mu, p)


def su_dec(sk: SecretKey, ct: Ciphertext) -> int:
    return _pke_dec(sk, ct)
