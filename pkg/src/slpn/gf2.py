"""Bit-packed linear algebra over GF(2), plus the symplectic pairing on Z_2^{2n}.

Vectors and matrix rows are stored as Python integers: bit i of a row lives at
word i // 64, position i mod 64 (LSB first), which is exactly the little-endian
bit order of ``int``. Row XOR is a single integer op and inner products are
popcounts, so all kernels here run on machine words.

All values are immutable after construction and safe to share across threads.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "BitVec",
    "BitMat",
    "SympVec",
    "IsotropicCode",
    "rank",
    "solve",
    "kernel_basis",
    "kernel_basis_info",
    "column_space_basis",
    "symp_inner",
    "symp_vec_mat",
    "symp_dual_basis",
    "radical_basis",
    "symplectic_subspace_basis",
    "is_isotropic",
    "swap_halves",
    "pair_weight_int",
    "permute_pairs",
    "permute_rows_pairs",
]


def _mask(nbits: int) -> int:
    return (1 << nbits) - 1


def swap_halves(value: int, n: int) -> int:
    """Exchange the two length-n halves of a 2n-bit value."""
    lo = value & _mask(n)
    return (value >> n) | (lo << n)


def pair_weight_int(value: int, n: int) -> int:
    """Number of pairs (j, n+j) of a 2n-bit value that differ from (0, 0)."""
    return ((value | (value >> n)) & _mask(n)).bit_count()


class BitVec:
    """Immutable bit vector over GF(2)."""

    __slots__ = ("nbits", "value")

    def __init__(self, nbits: int, value: int = 0):
        if nbits < 0:
            raise ValueError("negative length")
        object.__setattr__(self, "nbits", nbits)
        object.__setattr__(self, "value", value & _mask(nbits))

    def __setattr__(self, name, val):  # pragma: no cover - guard only
        raise AttributeError("BitVec is immutable")

    # -- constructors -------------------------------------------------
    @classmethod
    def zeros(cls, nbits: int) -> "BitVec":
        return cls(nbits, 0)

    @classmethod
    def unit(cls, nbits: int, index: int) -> "BitVec":
        if not 0 <= index < nbits:
            raise IndexError(index)
        return cls(nbits, 1 << index)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVec":
        value = 0
        n = 0
        for b in bits:
            value |= (int(b) & 1) << n
            n += 1
        return cls(n, value)

    @classmethod
    def from_bytes(cls, nbits: int, data: bytes) -> "BitVec":
        return cls(nbits, int.from_bytes(data, "little"))

    @classmethod
    def from_hex(cls, nbits: int, hexstr: str) -> "BitVec":
        return cls.from_bytes(nbits, bytes.fromhex(hexstr))

    @classmethod
    def from_numpy(cls, bits: np.ndarray) -> "BitVec":
        packed = np.packbits(bits.astype(np.uint8), bitorder="little")
        return cls(len(bits), int.from_bytes(packed.tobytes(), "little"))

    # -- access -------------------------------------------------------
    def bit(self, index: int) -> int:
        if not 0 <= index < self.nbits:
            raise IndexError(index)
        return (self.value >> index) & 1

    def bits(self) -> list[int]:
        return [(self.value >> i) & 1 for i in range(self.nbits)]

    def to_numpy(self) -> np.ndarray:
        raw = np.frombuffer(self.to_bytes(), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.nbits].copy()

    def __len__(self) -> int:
        return self.nbits

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitVec)
            and self.nbits == other.nbits
            and self.value == other.value
        )

    def __hash__(self) -> int:
        return hash((self.nbits, self.value))

    def __repr__(self) -> str:
        return f"BitVec({self.nbits}, 0b{self.value:0{max(self.nbits, 1)}b})"

    # -- arithmetic ---------------------------------------------------
    def __xor__(self, other: "BitVec") -> "BitVec":
        if self.nbits != other.nbits:
            raise ValueError("length mismatch")
        return BitVec(self.nbits, self.value ^ other.value)

    def __and__(self, other: "BitVec") -> "BitVec":
        if self.nbits != other.nbits:
            raise ValueError("length mismatch")
        return BitVec(self.nbits, self.value & other.value)

    def flip_bits(self, indices: Iterable[int]) -> "BitVec":
        v = self.value
        for i in indices:
            if not 0 <= i < self.nbits:
                raise IndexError(i)
            v ^= 1 << i
        return BitVec(self.nbits, v)

    def weight(self) -> int:
        return self.value.bit_count()

    def dot(self, other: "BitVec") -> int:
        if self.nbits != other.nbits:
            raise ValueError("length mismatch")
        return (self.value & other.value).bit_count() & 1

    def concat(self, other: "BitVec") -> "BitVec":
        return BitVec(self.nbits + other.nbits, self.value | (other.value << self.nbits))

    def sub(self, lo: int, hi: int) -> "BitVec":
        if not 0 <= lo <= hi <= self.nbits:
            raise IndexError((lo, hi))
        return BitVec(hi - lo, self.value >> lo)

    def is_zero(self) -> bool:
        return self.value == 0

    # -- serialization ------------------------------------------------
    def to_bytes(self) -> bytes:
        return self.value.to_bytes((self.nbits + 7) // 8, "little")

    def to_hex(self) -> str:
        return self.to_bytes().hex()

    def to_json(self) -> dict:
        return {"len": self.nbits, "hex": self.to_hex()}

    @classmethod
    def from_json(cls, obj: dict) -> "BitVec":
        v = cls.from_hex(int(obj["len"]), obj["hex"])
        if v.value != v.value & _mask(v.nbits):
            raise ValueError("trailing bits set")
        return v


class BitMat:
    """Immutable row-major bit matrix over GF(2)."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: Sequence[int]):
        if len(rows) != nrows:
            raise ValueError("row count mismatch")
        m = _mask(ncols)
        object.__setattr__(self, "nrows", nrows)
        object.__setattr__(self, "ncols", ncols)
        object.__setattr__(self, "rows", tuple(r & m for r in rows))

    def __setattr__(self, name, val):  # pragma: no cover - guard only
        raise AttributeError("BitMat is immutable")

    # -- constructors -------------------------------------------------
    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BitMat":
        return cls(nrows, ncols, [0] * nrows)

    @classmethod
    def identity(cls, n: int) -> "BitMat":
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def from_rows(cls, rows: Sequence["BitVec"], ncols: Optional[int] = None) -> "BitMat":
        if rows:
            ncols = rows[0].nbits if ncols is None else ncols
            if any(r.nbits != ncols for r in rows):
                raise ValueError("ragged rows")
        elif ncols is None:
            ncols = 0
        return cls(len(rows), ncols, [r.value for r in rows])

    @classmethod
    def from_cols(cls, cols: Sequence["BitVec"], nrows: Optional[int] = None) -> "BitMat":
        if cols:
            nrows = cols[0].nbits if nrows is None else nrows
            if any(c.nbits != nrows for c in cols):
                raise ValueError("ragged columns")
        elif nrows is None:
            nrows = 0
        if not cols:
            return cls(nrows, 0, [0] * nrows)
        laid_as_rows = cls(len(cols), nrows, [c.value for c in cols])
        return laid_as_rows.transpose()

    @classmethod
    def from_numpy(cls, arr: np.ndarray) -> "BitMat":
        arr = np.asarray(arr, dtype=np.uint8) & 1
        if arr.ndim != 2:
            raise ValueError("expected 2-d array")
        packed = np.packbits(arr, axis=1, bitorder="little")
        rows = [int.from_bytes(packed[i].tobytes(), "little") for i in range(arr.shape[0])]
        return cls(arr.shape[0], arr.shape[1], rows)

    # -- access -------------------------------------------------------
    def row(self, i: int) -> BitVec:
        return BitVec(self.ncols, self.rows[i])

    def col(self, j: int) -> BitVec:
        if not 0 <= j < self.ncols:
            raise IndexError(j)
        v = 0
        for i in range(self.nrows):
            v |= ((self.rows[i] >> j) & 1) << i
        return BitVec(self.nrows, v)

    def cols(self) -> list[BitVec]:
        return [c for c in self.transpose().row_vecs()]

    def row_vecs(self) -> list[BitVec]:
        return [BitVec(self.ncols, r) for r in self.rows]

    def to_numpy(self) -> np.ndarray:
        if self.nrows == 0:
            return np.zeros((0, self.ncols), dtype=np.uint8)
        nbytes = (self.ncols + 7) // 8
        raw = np.frombuffer(
            b"".join(r.to_bytes(nbytes, "little") for r in self.rows), dtype=np.uint8
        ).reshape(self.nrows, nbytes)
        return np.unpackbits(raw, axis=1, bitorder="little")[:, : self.ncols].copy()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitMat)
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def __hash__(self) -> int:
        return hash((self.nrows, self.ncols, self.rows))

    def __repr__(self) -> str:
        return f"BitMat({self.nrows}x{self.ncols})"

    def is_zero(self) -> bool:
        return all(r == 0 for r in self.rows)

    # -- arithmetic ---------------------------------------------------
    def matvec(self, x: BitVec) -> BitVec:
        """Return m @ x; x indexes columns."""
        if x.nbits != self.ncols:
            raise ValueError("dimension mismatch")
        xv = x.value
        out = 0
        for i, r in enumerate(self.rows):
            out |= ((r & xv).bit_count() & 1) << i
        return BitVec(self.nrows, out)

    def matmul(self, other: "BitMat") -> "BitMat":
        if self.ncols != other.nrows:
            raise ValueError("dimension mismatch")
        # row i of product = XOR of other's rows selected by bits of row i
        out = []
        for r in self.rows:
            acc = 0
            rr = r
            while rr:
                j = (rr & -rr).bit_length() - 1
                acc ^= other.rows[j]
                rr &= rr - 1
            out.append(acc)
        return BitMat(self.nrows, other.ncols, out)

    def transpose(self) -> "BitMat":
        return _transpose_bitmat(self)

    def hstack(self, other: "BitMat") -> "BitMat":
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch")
        sh = self.ncols
        rows = [a | (b << sh) for a, b in zip(self.rows, other.rows)]
        return BitMat(self.nrows, self.ncols + other.ncols, rows)

    def take_rows(self, indices: Sequence[int]) -> "BitMat":
        return BitMat(len(indices), self.ncols, [self.rows[i] for i in indices])

    def take_cols(self, indices: Sequence[int]) -> "BitMat":
        rows = []
        for r in self.rows:
            v = 0
            for pos, j in enumerate(indices):
                v |= ((r >> j) & 1) << pos
            rows.append(v)
        return BitMat(self.nrows, len(indices), rows)

    # -- serialization ------------------------------------------------
    def to_hex(self) -> str:
        nbytes = (self.ncols + 7) // 8
        return b"".join(r.to_bytes(nbytes, "little") for r in self.rows).hex()

    def to_json(self) -> dict:
        return {"rows": self.nrows, "cols": self.ncols, "hex": self.to_hex()}

    @classmethod
    def from_json(cls, obj: dict) -> "BitMat":
        nrows, ncols = int(obj["rows"]), int(obj["cols"])
        data = bytes.fromhex(obj["hex"])
        nbytes = (ncols + 7) // 8
        if len(data) != nrows * nbytes:
            raise ValueError("payload length mismatch")
        rows = [
            int.from_bytes(data[i * nbytes : (i + 1) * nbytes], "little")
            for i in range(nrows)
        ]
        if any(r != r & _mask(ncols) for r in rows):
            raise ValueError("trailing bits set")
        return cls(nrows, ncols, rows)


def _transpose_bitmat(m: BitMat) -> BitMat:
    if m.nrows == 0 or m.ncols == 0:
        return BitMat(m.ncols, m.nrows, [0] * m.ncols)
    if m.nrows * m.ncols <= 4096:
        # numpy round-trips cost more than direct bit walks at this size
        out = [0] * m.ncols
        for i, row in enumerate(m.rows):
            while row:
                j = (row & -row).bit_length() - 1
                out[j] |= 1 << i
                row &= row - 1
        return BitMat(m.ncols, m.nrows, out)
    return BitMat.from_numpy(m.to_numpy().T)


@dataclass(frozen=True)
class SympVec:
    """Length-2n bit vector with the pairing convention (index j, index n+j)."""

    n: int
    v: BitVec

    def __post_init__(self):
        if self.v.nbits != 2 * self.n:
            raise ValueError("SympVec needs a 2n-bit carrier")

    @classmethod
    def zeros(cls, n: int) -> "SympVec":
        return cls(n, BitVec.zeros(2 * n))

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[int, int]]) -> "SympVec":
        n = len(pairs)
        v = 0
        for j, (a, b) in enumerate(pairs):
            v |= (a & 1) << j
            v |= (b & 1) << (n + j)
        return cls(n, BitVec(2 * n, v))

    def pair(self, j: int) -> tuple[int, int]:
        return self.v.bit(j), self.v.bit(self.n + j)

    def pairs(self) -> list[tuple[int, int]]:
        return [self.pair(j) for j in range(self.n)]

    def pair_weight(self) -> int:
        return pair_weight_int(self.v.value, self.n)

    def __xor__(self, other: "SympVec") -> "SympVec":
        return SympVec(self.n, self.v ^ other.v)


def _as_symp_bits(x) -> tuple[int, int]:
    """Coerce a SympVec or even-length BitVec to (value, n)."""
    if isinstance(x, SympVec):
        return x.v.value, x.n
    if isinstance(x, BitVec):
        if x.nbits % 2:
            raise ValueError("odd length has no symplectic splitting")
        return x.value, x.nbits // 2
    raise TypeError(type(x))


def symp_inner(u, w) -> int:
    """Symplectic inner product a1.b2 + a2.b1 mod 2, halves split at index n."""
    uv, un = _as_symp_bits(u)
    wv, wn = _as_symp_bits(w)
    if un != wn:
        raise ValueError("dimension mismatch")
    # single pass: pair u against the half-swapped w
    return (uv & swap_halves(wv, wn)).bit_count() & 1


def symp_vec_mat(f, m: BitMat) -> BitVec:
    """Row vector of per-column symplectic products (f against each column of m).

    Computed as one pass over the rows of m selected by the half-swapped f, so
    the cost is O(weight(f)) row XORs.
    """
    fv, fn = _as_symp_bits(f)
    if m.nrows != 2 * fn:
        raise ValueError("dimension mismatch")
    sel = swap_halves(fv, fn)
    acc = 0
    while sel:
        i = (sel & -sel).bit_length() - 1
        acc ^= m.rows[i]
        sel &= sel - 1
    return BitVec(m.ncols, acc)


# -- elimination core ----------------------------------------------------


def _rref(rows: list[int], ncols: int) -> tuple[list[int], list[tuple[int, int]]]:
    """Reduced row echelon form; pivot search takes the lowest row index first.

    Returns (rows, pivots) where pivots is a list of (row, col).
    """
    rows = list(rows)
    pivots: list[tuple[int, int]] = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        bit = 1 << c
        pivot = next((i for i in range(r, nrows) if rows[i] & bit), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        prow = rows[r]
        for i in range(nrows):
            if i != r and rows[i] & bit:
                rows[i] ^= prow
        pivots.append((r, c))
        r += 1
        if r == nrows:
            break
    return rows, pivots


def rank(m: BitMat) -> int:
    """Rank over GF(2)."""
    _, pivots = _rref(list(m.rows), m.ncols)
    return len(pivots)


def solve(m: BitMat, b: BitVec) -> Optional[BitVec]:
    """Some x with m @ x = b, or None if inconsistent.

    Deterministic: lowest-index pivots, free variables set to zero.
    """
    if b.nbits != m.nrows:
        raise ValueError("dimension mismatch")
    aug_col = m.ncols
    rows = [row | (((b.value >> i) & 1) << aug_col) for i, row in enumerate(m.rows)]
    red, pivots = _rref(rows, m.ncols + 1)
    if any(c == aug_col for _, c in pivots):
        return None
    x = 0
    for r, c in pivots:
        x |= ((red[r] >> aug_col) & 1) << c
    return BitVec(m.ncols, x)


def _kernel_ints(rows: list[int], ncols: int) -> tuple[list[int], tuple[int, ...]]:
    """Kernel basis vectors (as ints) plus the free columns indexing them."""
    red, pivots = _rref(rows, ncols)
    pivot_cols = {c for _, c in pivots}
    free_cols = tuple(c for c in range(ncols) if c not in pivot_cols)
    basis = []
    for f in free_cols:
        v = 1 << f
        for r, c in pivots:
            if (red[r] >> f) & 1:
                v |= 1 << c
        basis.append(v)
    return basis, free_cols


def kernel_basis_info(m: BitMat) -> tuple[BitMat, tuple[int, ...]]:
    """Kernel basis plus the free-column indices it is indexed by.

    Basis vector for free column f has bit f set and all other free-column
    bits clear, so combination coefficients can be read back off a kernel
    element at the free columns. The basis is canonical for the row space.
    """
    basis, free_cols = _kernel_ints(list(m.rows), m.ncols)
    return (
        BitMat.from_cols([BitVec(m.ncols, v) for v in basis], nrows=m.ncols),
        free_cols,
    )


def kernel_basis(m: BitMat) -> BitMat:
    """Columns form a basis of {x : m @ x = 0}; count is ncols - rank."""
    basis, _ = kernel_basis_info(m)
    return basis


def column_space_basis(m: BitMat) -> BitMat:
    """Canonical basis of the column space (RREF rows of the transpose)."""
    red, pivots = _rref([c.value for c in m.cols()], m.nrows)
    return BitMat.from_cols([BitVec(m.nrows, red[r]) for r, _ in pivots], nrows=m.nrows)


# -- symplectic structure --------------------------------------------------


def _require_even_rows(m: BitMat) -> int:
    if m.nrows % 2:
        raise ValueError("odd row count has no symplectic splitting")
    return m.nrows // 2


def symp_dual_basis(s: BitMat) -> BitMat:
    """Basis of {v : v symplectically orthogonal to every column of s}.

    The dual of an empty matrix is all of Z_2^{2n}. Dimension is always
    2n - rank(s).
    """
    n = _require_even_rows(s)
    if s.ncols == 0:
        return BitMat.identity(2 * n)
    pairing = BitMat(
        s.ncols, 2 * n, [swap_halves(c.value, n) for c in s.cols()]
    )
    return kernel_basis(pairing)


def radical_basis(s: BitMat) -> BitMat:
    """Basis of im(s) intersected with its own symplectic dual."""
    n = _require_even_rows(s)
    if s.ncols == 0:
        return BitMat(2 * n, 0, [0] * (2 * n))
    dual = symp_dual_basis(s)
    if dual.ncols == 0:
        return BitMat(2 * n, 0, [0] * (2 * n))
    joint = s.hstack(dual)
    members = []
    ker = kernel_basis(joint)
    for col in ker.cols():
        x = col.sub(0, s.ncols)
        members.append(s.matvec(x))
    if not members:
        return BitMat(2 * n, 0, [0] * (2 * n))
    return column_space_basis(BitMat.from_cols(members, nrows=2 * n))


def is_isotropic(m: BitMat) -> bool:
    """True iff all column pairs have zero symplectic inner product."""
    n = _require_even_rows(m)
    cols = [c.value for c in m.cols()]
    swapped = [swap_halves(c, n) for c in cols]
    for i in range(len(cols)):
        ci = cols[i]
        for j in range(i + 1, len(cols)):
            if (ci & swapped[j]).bit_count() & 1:
                return False
    return True


def symplectic_subspace_basis(s: BitMat) -> tuple[BitMat, BitMat, BitMat]:
    """Split a basis of im(s) into radical vectors and hyperbolic pairs.

    Returns (u_part, v_part, w_part): u vectors lie in im(s)'s symplectic
    dual, and v_i, w_j satisfy v_i * v_j = w_i * w_j = 0, v_i * w_j = delta_ij.
    """
    n = _require_even_rows(s)
    working = [c.value for c in column_space_basis(s).cols()]
    u_part: list[BitVec] = []
    v_part: list[BitVec] = []
    w_part: list[BitVec] = []
    while working:
        z = working.pop(0)
        zs = swap_halves(z, n)
        partner_idx = next(
            (i for i, t in enumerate(working) if (t & zs).bit_count() & 1), None
        )
        if partner_idx is None:
            u_part.append(BitVec(2 * n, z))
            continue
        w = working.pop(partner_idx)
        ws = swap_halves(w, n)
        for i, t in enumerate(working):
            if (t & ws).bit_count() & 1:
                t ^= z
            if (t & zs).bit_count() & 1:
                t ^= w
            working[i] = t
        v_part.append(BitVec(2 * n, z))
        w_part.append(BitVec(2 * n, w))
    return (
        BitMat.from_cols(u_part, nrows=2 * n),
        BitMat.from_cols(v_part, nrows=2 * n),
        BitMat.from_cols(w_part, nrows=2 * n),
    )


def permute_pairs(v, perm: Sequence[int]):
    """Apply the same permutation to both halves: pair j moves to perm[j].

    Accepts a SympVec or a 2n-bit BitVec and returns the same type.
    """
    val, n = _as_symp_bits(v)
    out = 0
    for j in range(n):
        d = perm[j]
        out |= ((val >> j) & 1) << d
        out |= ((val >> (n + j)) & 1) << (n + d)
    res = BitVec(2 * n, out)
    return SympVec(n, res) if isinstance(v, SympVec) else res


def permute_rows_pairs(m: BitMat, perm: Sequence[int]) -> BitMat:
    """Permute the 2n rows of m pairwise: rows (j, n+j) move to (d, n+d)."""
    n = _require_even_rows(m)
    rows = [0] * (2 * n)
    for j in range(n):
        d = perm[j]
        rows[d] = m.rows[j]
        rows[n + d] = m.rows[n + j]
    return BitMat(2 * n, m.ncols, rows)


@dataclass(frozen=True)
class IsotropicCode:
    """Full-column-rank 2n x k matrix with pairwise symplectically orthogonal columns."""

    mat: BitMat

    @property
    def n(self) -> int:
        return self.mat.nrows // 2

    @property
    def k(self) -> int:
        return self.mat.ncols

    @classmethod
    def trusted(cls, mat: BitMat) -> "IsotropicCode":
        """Wrap without validation; for samplers whose output is correct by construction."""
        return cls(mat)

    @classmethod
    def checked(cls, mat: BitMat) -> "IsotropicCode":
        if mat.nrows % 2:
            raise ValueError("odd row count")
        if rank(mat) != mat.ncols:
            raise ValueError("columns are not independent")
        if not is_isotropic(mat):
            raise ValueError("columns are not symplectically orthogonal")
        return cls(mat)

    def to_json(self) -> dict:
        return self.mat.to_json()

    @classmethod
    def from_json(cls, obj: dict) -> "IsotropicCode":
        return cls.checked(BitMat.from_json(obj))
