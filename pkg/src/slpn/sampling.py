"""Seeded randomness and the distribution/instance samplers.

Everything here is reproducible: an ``Rng`` is a counter-based (Philox) stream
keyed by a 64-bit seed, and independent child streams are derived from
(parent seed, child index), so experiments can be parallelized without
coordination. Identical seed and call sequence gives an identical stream on
every platform.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .gf2 import BitMat, BitVec, SympVec, is_isotropic, swap_halves

__all__ = [
    "Rng",
    "InstanceKind",
    "Witness",
    "Instance",
    "sample_depolarizing",
    "sample_bernoulli",
    "sample_isotropic",
    "sample_lsn_matrices",
    "gen_symplpn",
    "gen_lsn",
    "gen_lpn",
    "HyperplaneRotation",
    "sample_hyperplane_rotation",
]


class Rng:
    """Counter-based keyed generator with explicit stream splitting.

    Single-owner: do not share one instance across threads; derive children
    with :meth:`split` instead.
    """

    def __init__(self, seed: int, _spawn_key: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.spawn_key = tuple(int(i) for i in _spawn_key)
        ss = np.random.SeedSequence(self.seed, spawn_key=self.spawn_key)
        self._gen = np.random.Generator(np.random.Philox(ss))

    def split(self, index: int) -> "Rng":
        """Independent child stream identified by (this seed, index)."""
        return Rng(self.seed, self.spawn_key + (int(index),))

    # -- primitives ----------------------------------------------------
    def bit(self) -> int:
        return int(self._gen.integers(0, 2))

    def bits(self, count: int) -> BitVec:
        if count == 0:
            return BitVec.zeros(0)
        raw = self._gen.bytes((count + 7) // 8)
        return BitVec(count, int.from_bytes(raw, "little"))

    def bitmat(self, nrows: int, ncols: int) -> BitMat:
        flat = self.bits(nrows * ncols).value
        mask = (1 << ncols) - 1
        return BitMat(nrows, ncols, [(flat >> (i * ncols)) & mask for i in range(nrows)])

    def integer(self, bound: int) -> int:
        """Uniform integer in [0, bound)."""
        return int(self._gen.integers(0, bound))

    def random(self) -> float:
        return float(self._gen.random())

    def binomial(self, n: int, p: float) -> int:
        return int(self._gen.binomial(n, p))

    def permutation(self, n: int) -> tuple[int, ...]:
        return tuple(int(i) for i in self._gen.permutation(n))

    def numpy(self) -> np.random.Generator:
        """Escape hatch for vectorized draws; consumes this stream's state."""
        return self._gen


def sample_depolarizing(rng: Rng, n: int, p: float) -> SympVec:
    """Per-pair noise: (0,0) w.p. 1-p, each of the other three patterns w.p. p/3."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p out of range")
    gen = rng.numpy()
    noisy = gen.random(n) < p
    patterns = gen.integers(1, 4, size=n)
    patterns = np.where(noisy, patterns, 0)
    lo = (patterns & 1).astype(np.uint8)
    hi = (patterns >> 1).astype(np.uint8)
    return SympVec(n, BitVec.from_numpy(np.concatenate([lo, hi])))


def sample_bernoulli(rng: Rng, n: int, p: float) -> BitVec:
    """Each bit independently 1 with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p out of range")
    gen = rng.numpy()
    return BitVec.from_numpy((gen.random(n) < p).astype(np.uint8))


class _EchelonSet:
    """Mutable echelon form for span-membership tests over int rows."""

    def __init__(self):
        self.rows: list[int] = []  # kept with strictly decreasing high bits

    def reduce(self, v: int) -> int:
        for r in self.rows:
            if v ^ r < v:
                v ^= r
        return v

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0

    def add(self, v: int) -> bool:
        v = self.reduce(v)
        if v == 0:
            return False
        self.rows.append(v)
        self.rows.sort(reverse=True)
        return True


class _DualBasis:
    """Incrementally maintained basis of the symplectic dual of a growing span."""

    def __init__(self, n: int):
        self.n = n
        self.rows: list[int] = [1 << i for i in range(2 * n)]

    def restrict(self, v: int) -> None:
        """Shrink to the vectors symplectically orthogonal to v."""
        sv = swap_halves(v, self.n)
        flags = [(r & sv).bit_count() & 1 for r in self.rows]
        try:
            j = flags.index(1)
        except ValueError:
            return
        witness = self.rows[j]
        self.rows = [
            r ^ witness if f and i != j else r
            for i, (r, f) in enumerate(zip(self.rows, flags))
            if i != j
        ]

    def random_element(self, rng: Rng) -> int:
        coeffs = rng.bits(len(self.rows)).value
        v = 0
        while coeffs:
            j = (coeffs & -coeffs).bit_length() - 1
            v ^= self.rows[j]
            coeffs &= coeffs - 1
        return v


def sample_isotropic(rng: Rng, n: int, k: int) -> BitMat:
    """Uniform 2n x k full-column-rank matrix with symplectically orthogonal columns.

    Built column by column: each new column is uniform in the symplectic dual
    of the previous ones, rejecting vectors inside their span.
    """
    if k > n:
        raise ValueError("an isotropic subspace of Z_2^{2n} has dimension at most n")
    dual = _DualBasis(n)
    span = _EchelonSet()
    cols = []
    while len(cols) < k:
        v = dual.random_element(rng)
        if not span.add(v):
            continue
        cols.append(BitVec(2 * n, v))
        dual.restrict(v)
    return BitMat.from_cols(cols, nrows=2 * n)


def sample_lsn_matrices(rng: Rng, k: int, n: int) -> tuple[BitMat, BitMat]:
    """The stabilizer-style matrix pair: isotropic a (2n x n), isotropic b (2n x k),
    with [a | b] jointly full rank.

    b is grown column by column: each column is uniform among vectors
    symplectically orthogonal to the previous b columns and outside the span
    of everything sampled so far, so its first column is equally likely to be
    any vector outside im(a).
    """
    if k > n:
        raise ValueError("joint rank n + k cannot exceed 2n")
    a = sample_isotropic(rng, n, n)
    joint = _EchelonSet()
    for col in a.cols():
        joint.add(col.value)
    b_dual = _DualBasis(n)
    b_cols: list[BitVec] = []
    attempts = 0
    while len(b_cols) < k:
        v = b_dual.random_element(rng)
        if not joint.add(v):
            attempts += 1
            if attempts > 64 * (n + k):
                raise RuntimeError("rejection sampling stalled; invalid parameters")
            continue
        b_cols.append(BitVec(2 * n, v))
        b_dual.restrict(v)
    return a, BitMat.from_cols(b_cols, nrows=2 * n)


class InstanceKind(str, enum.Enum):
    LPN = "lpn"
    SYMPLPN = "symplpn"
    LSN = "lsn"


@dataclass(frozen=True)
class Witness:
    """Ground truth retained by a generator; never consulted by attacks."""

    structured: bool
    secret: Optional[BitVec] = None
    error: Optional[BitVec] = None


@dataclass(frozen=True)
class Instance:
    """A decision/search instance: (matrix, word) plus parameters.

    For LSN the matrix is [a | b] split at column n. Witness retention is
    opt-in at generation time.
    """

    kind: InstanceKind
    matrix: BitMat
    word: BitVec
    k: int
    n: int
    p: float
    witness: Optional[Witness] = None

    def __post_init__(self):
        if self.word.nbits != self.matrix.nrows:
            raise ValueError("word length does not match matrix rows")

    def lsn_a_part(self) -> BitMat:
        if self.kind is not InstanceKind.LSN:
            raise ValueError("not an LSN instance")
        return self.matrix.take_cols(range(self.n))

    def lsn_b_part(self) -> BitMat:
        if self.kind is not InstanceKind.LSN:
            raise ValueError("not an LSN instance")
        return self.matrix.take_cols(range(self.n, self.n + self.k))

    def without_witness(self) -> "Instance":
        return Instance(self.kind, self.matrix, self.word, self.k, self.n, self.p)

    def to_json(self) -> dict:
        obj = {
            "kind": self.kind.value,
            "k": self.k,
            "n": self.n,
            "p": self.p,
            "matrix": self.matrix.to_json(),
            "word": self.word.to_json(),
        }
        if self.witness is not None:
            w = {"structured": self.witness.structured}
            if self.witness.secret is not None:
                w["secret"] = self.witness.secret.to_json()
            if self.witness.error is not None:
                w["error"] = self.witness.error.to_json()
            obj["witness"] = w
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "Instance":
        kind = InstanceKind(obj["kind"])
        matrix = BitMat.from_json(obj["matrix"])
        word = BitVec.from_json(obj["word"])
        if word.nbits != matrix.nrows:
            raise ValueError("word length does not match matrix rows")
        if kind in (InstanceKind.SYMPLPN, InstanceKind.LSN):
            if kind is InstanceKind.SYMPLPN and not is_isotropic(matrix):
                raise ValueError("matrix is not isotropic")
            if kind is InstanceKind.LSN:
                n = int(obj["n"])
                if not is_isotropic(matrix.take_cols(range(n))):
                    raise ValueError("a-part is not isotropic")
                if not is_isotropic(matrix.take_cols(range(n, matrix.ncols))):
                    raise ValueError("b-part is not isotropic")
        witness = None
        if "witness" in obj:
            w = obj["witness"]
            witness = Witness(
                structured=bool(w["structured"]),
                secret=BitVec.from_json(w["secret"]) if "secret" in w else None,
                error=BitVec.from_json(w["error"]) if "error" in w else None,
            )
        return cls(kind, matrix, word, int(obj["k"]), int(obj["n"]), float(obj["p"]), witness)


def gen_symplpn(
    rng: Rng, k: int, n: int, p: float, structured: bool, keep_witness: bool = False
) -> Instance:
    """Structured: word = a @ x + e with x uniform and e depolarizing(p).
    Unstructured: word uniform."""
    a = sample_isotropic(rng, n, k)
    if structured:
        x = rng.bits(k)
        e = sample_depolarizing(rng, n, p)
        word = a.matvec(x) ^ e.v
        witness = Witness(True, x, e.v) if keep_witness else None
    else:
        word = rng.bits(2 * n)
        witness = Witness(False) if keep_witness else None
    return Instance(InstanceKind.SYMPLPN, a, word, k, n, p, witness)


def gen_lsn(
    rng: Rng,
    k: int,
    n: int,
    p: float,
    keep_witness: bool = False,
    force_y: Optional[BitVec] = None,
) -> Instance:
    """word = a @ r + b @ y + e with r, y uniform and e depolarizing(p).

    force_y is a test hook: with y = 0 the pair (a-part, word) is exactly a
    structured 2n-row instance over the isotropic code a.
    """
    a, b = sample_lsn_matrices(rng, k, n)
    r = rng.bits(n)
    y = rng.bits(k) if force_y is None else force_y
    if y.nbits != k:
        raise ValueError("forced y has wrong length")
    e = sample_depolarizing(rng, n, p)
    word = a.matvec(r) ^ b.matvec(y) ^ e.v
    witness = Witness(True, r.concat(y), e.v) if keep_witness else None
    return Instance(InstanceKind.LSN, a.hstack(b), word, k, n, p, witness)


def gen_lpn(
    rng: Rng, k: int, n: int, p: float, structured: bool, keep_witness: bool = False
) -> Instance:
    """Plain parity-with-noise sample: uniform n x k matrix, Bernoulli(p) errors."""
    a = rng.bitmat(n, k)
    if structured:
        x = rng.bits(k)
        e = sample_bernoulli(rng, n, p)
        word = a.matvec(x) ^ e
        witness = Witness(True, x, e) if keep_witness else None
    else:
        word = rng.bits(n)
        witness = Witness(False) if keep_witness else None
    return Instance(InstanceKind.LPN, a, word, k, n, p, witness)


@dataclass(frozen=True)
class HyperplaneRotation:
    """A sparse symplectic map rotating the hyperplane normal f_1 to a random vector.

    ``k_pair`` is the 1-indexed pair whose second-half bit of r fired, or None
    for the identity fallback (no second-half bit set). When k_pair is set,
    c @ f_1 equals r exactly.
    """

    c: BitMat
    r: BitVec
    k_pair: Optional[int]

    @property
    def is_identity_fallback(self) -> bool:
        return self.k_pair is None

    @classmethod
    def from_vector(cls, r: BitVec) -> "HyperplaneRotation":
        if r.nbits % 2:
            raise ValueError("rotation lives on Z_2^{2n}")
        n = r.nbits // 2
        if n < 2:
            raise ValueError("need n >= 2")
        k = next((j for j in range(1, n + 1) if r.bit(n + j - 1)), None)
        if k is None:
            return cls(BitMat.identity(2 * n), r, None)
        kk = k - 1
        # r' is r with pair 1 and pair k exchanged; its (n+1)st bit is then 1
        rp = r.value
        if kk != 0:
            rp = _swap_bits(rp, 0, kk)
            rp = _swap_bits(rp, n, n + kk)
        cols = [0] * (2 * n)
        cols[0] = 1  # e_1 -> e_1
        cols[n] = rp  # f_1 -> r'
        rp_sw = swap_halves(rp, n)
        e1 = 1
        for j in range(2, n + 1):
            ej = 1 << (j - 1)
            fj = 1 << (n + j - 1)
            # e_j -> e_j + (r' . e_j) e_1 and f_j -> f_j + (r' . f_j) e_1
            cols[j - 1] = ej ^ (e1 if rp_sw & ej else 0)
            cols[n + j - 1] = fj ^ (e1 if rp_sw & fj else 0)
        # compose with the pair swap (1 <-> k) acting on the output coordinates
        if kk != 0:
            cols = [_swap_bits(_swap_bits(c, 0, kk), n, n + kk) for c in cols]
        mat = BitMat.from_cols([BitVec(2 * n, c) for c in cols], nrows=2 * n)
        return cls(mat, r, k)

    @classmethod
    def sample(cls, rng: Rng, n: int) -> "HyperplaneRotation":
        if n < 2:
            raise ValueError("need n >= 2")
        return cls.from_vector(rng.bits(2 * n))


def _swap_bits(v: int, i: int, j: int) -> int:
    bi = (v >> i) & 1
    bj = (v >> j) & 1
    if bi != bj:
        v ^= (1 << i) | (1 << j)
    return v


def sample_hyperplane_rotation(rng: Rng, n: int) -> BitMat:
    """Random symplectic hyperplane rotation (2n x 2n); identity when no
    second-half bit of the drawn vector is set."""
    return HyperplaneRotation.sample(rng, n).c
