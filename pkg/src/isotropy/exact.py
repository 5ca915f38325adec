"""Exact Gaussian-rational scalars and dense matrices over Q(i).

Everything here is exact: there is no floating point anywhere, so every
identity checked downstream is an equality, not a tolerance.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from operator import itemgetter
from typing import Iterable, Sequence

from gmpy2 import mpq

__all__ = [
    "GaussianRational",
    "ExactMatrix",
    "SingularMatrixError",
    "ZERO",
    "ONE",
    "gq",
    "as_scalar",
    "scalar_to_json",
    "scalar_from_json",
    "sparse_rank",
]


class SingularMatrixError(ArithmeticError):
    """Raised when an inverse is requested for a matrix with zero determinant."""


def _to_mpq(x) -> mpq:
    if isinstance(x, str):
        return mpq(x.strip())
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a string or Fraction")
    return mpq(x)


class GaussianRational(tuple):
    """A complex number ``re + im*i`` with arbitrary-precision rational parts."""

    __slots__ = ()

    re = property(itemgetter(0))
    im = property(itemgetter(1))

    def __new__(cls, re=0, im=0):
        return tuple.__new__(cls, (_to_mpq(re), _to_mpq(im)))

    @classmethod
    def _raw(cls, re: mpq, im: mpq) -> "GaussianRational":
        return tuple.__new__(cls, (re, im))

    # -- predicates -------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self[0]) or bool(self[1])

    @property
    def is_zero(self) -> bool:
        return not self[0] and not self[1]

    @property
    def is_real(self) -> bool:
        return not self[1]

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, GaussianRational):
            other = as_scalar(other)
        return _raw(self[0] + other[0], self[1] + other[1])

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, GaussianRational):
            other = as_scalar(other)
        return _raw(self[0] - other[0], self[1] - other[1])

    def __rsub__(self, other):
        return as_scalar(other) - self

    def __neg__(self):
        return _raw(-self[0], -self[1])

    def __pos__(self):
        return self

    def __mul__(self, other):
        if not isinstance(other, GaussianRational):
            other = as_scalar(other)
        a, b = self
        c, d = other
        if not b and not d:
            return _raw(a * c, _Q0)
        return _raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, GaussianRational):
            other = as_scalar(other)
        c, d = other
        if not c and not d:
            raise ZeroDivisionError("division by zero Gaussian rational")
        a, b = self
        if not d:
            return _raw(a / c, b / c)
        norm = c * c + d * d
        return _raw((a * c + b * d) / norm, (b * c - a * d) / norm)

    def __rtruediv__(self, other):
        return as_scalar(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer powers are exact")
        if k < 0:
            return (ONE / self) ** (-k)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "GaussianRational":
        return _raw(self[0], -self[1])

    # -- comparison / hashing --------------------------------------------
    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self[0] == other[0] and self[1] == other[1]
        if isinstance(other, (int, Rational)) or type(other) is type(_Q0):
            return not self[1] and self[0] == other
        return NotImplemented

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        if not self[1]:
            return hash(self[0])
        return hash((self[0], self[1]))

    def __repr__(self):
        if not self[1]:
            return f"GaussianRational({str(self[0])!r})"
        return f"GaussianRational({str(self[0])!r}, {str(self[1])!r})"

    def __str__(self):
        a, b = self
        if not b:
            return str(a)
        if not a:
            return f"{b}i"
        sign = "+" if b > 0 else "-"
        return f"{a}{sign}{abs(b)}i"


_Q0 = mpq(0)
_Q1 = mpq(1)
_raw = GaussianRational._raw
ZERO = _raw(_Q0, _Q0)
ONE = _raw(_Q1, _Q0)
I_UNIT = _raw(_Q0, _Q1)


def gq(re=0, im=0) -> GaussianRational:
    """Shorthand constructor: ``gq(1, '1/2')`` is ``1 + i/2``."""
    return GaussianRational(re, im)


def as_scalar(x) -> GaussianRational:
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, complex):
        raise TypeError("complex floats are not exact")
    return _raw(_to_mpq(x), _Q0)


def _frac_str(q: mpq) -> str:
    return f"{q.numerator}/{q.denominator}"


def scalar_to_json(x: GaussianRational) -> dict:
    return {"re": _frac_str(x[0]), "im": _frac_str(x[1])}


def scalar_from_json(obj) -> GaussianRational:
    if isinstance(obj, dict):
        if set(obj) - {"re", "im"}:
            raise ValueError(f"unknown scalar fields: {sorted(set(obj) - {'re', 'im'})}")
        return GaussianRational(str(obj.get("re", "0")), str(obj.get("im", "0")))
    if isinstance(obj, (int, str)):
        return GaussianRational(str(obj))
    raise ValueError(f"cannot decode scalar from {obj!r}")


class ExactMatrix:
    """Dense immutable matrix over Q(i), stored row-major.

    Products skip zero entries, which matters because almost every matrix in
    this package (permutations, Jordan forms, block Toeplitz) is sparse.
    """

    __slots__ = ("rows", "cols", "_data", "_nz")

    def __init__(self, data: Iterable[Iterable] = (), rows: int | None = None, cols: int | None = None):
        data = tuple(tuple(as_scalar(x) for x in row) for row in data)
        if rows is None:
            rows = len(data)
        if cols is None:
            cols = len(data[0]) if data else 0
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ValueError("ragged or mis-sized matrix data")
        self.rows = rows
        self.cols = cols
        self._data = data
        self._nz = None

    @classmethod
    def _wrap(cls, data: tuple, rows: int, cols: int) -> "ExactMatrix":
        m = object.__new__(cls)
        m.rows, m.cols, m._data, m._nz = rows, cols, data, None
        return m

    # -- constructors -----------------------------------------------------
    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "ExactMatrix":
        cols = rows if cols is None else cols
        row = (ZERO,) * cols
        return cls._wrap((row,) * rows, rows, cols)

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls._wrap(
            tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)), n, n
        )

    @classmethod
    def scalar(cls, n: int, value) -> "ExactMatrix":
        v = as_scalar(value)
        return cls._wrap(
            tuple(tuple(v if i == j else ZERO for j in range(n)) for i in range(n)), n, n
        )

    @classmethod
    def diag(cls, values: Sequence) -> "ExactMatrix":
        vals = [as_scalar(v) for v in values]
        n = len(vals)
        return cls._wrap(
            tuple(tuple(vals[i] if i == j else ZERO for j in range(n)) for i in range(n)), n, n
        )

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: dict) -> "ExactMatrix":
        """Build from a ``{(i, j): value}`` mapping; missing entries are zero."""
        data = [[ZERO] * cols for _ in range(rows)]
        for (i, j), v in entries.items():
            data[i][j] = as_scalar(v)
        return cls._wrap(tuple(map(tuple, data)), rows, cols)

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence["ExactMatrix | None"]],
                    row_sizes: Sequence[int] | None = None,
                    col_sizes: Sequence[int] | None = None) -> "ExactMatrix":
        """Assemble a block matrix; ``None`` blocks are zero of the implied size."""
        nr = len(blocks)
        nc = len(blocks[0]) if nr else 0
        if row_sizes is None:
            row_sizes = [next(b.rows for b in blocks[i] if b is not None) for i in range(nr)]
        if col_sizes is None:
            col_sizes = [next(blocks[i][j].cols for i in range(nr) if blocks[i][j] is not None)
                         for j in range(nc)]
        out = []
        for i in range(nr):
            for ii in range(row_sizes[i]):
                row = []
                for j in range(nc):
                    b = blocks[i][j]
                    if b is None:
                        row.extend((ZERO,) * col_sizes[j])
                    else:
                        if b.rows != row_sizes[i] or b.cols != col_sizes[j]:
                            raise ValueError(f"block ({i},{j}) has wrong size")
                        row.extend(b._data[ii])
                out.append(tuple(row))
        return cls._wrap(tuple(out), sum(row_sizes), sum(col_sizes))

    # -- access -----------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, idx):
        i, j = idx
        return self._data[i][j]

    def row(self, i: int) -> tuple:
        return self._data[i]

    def tolist(self) -> list[list[GaussianRational]]:
        return [list(r) for r in self._data]

    def entries(self) -> list[GaussianRational]:
        return [x for r in self._data for x in r]

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> "ExactMatrix":
        return ExactMatrix._wrap(tuple(r[c0:c1] for r in self._data[r0:r1]), r1 - r0, c1 - c0)

    def _nonzeros(self):
        if self._nz is None:
            self._nz = tuple(tuple((j, x) for j, x in enumerate(r) if x) for r in self._data)
        return self._nz

    def nnz(self) -> int:
        return sum(len(r) for r in self._nonzeros())

    # -- algebra ----------------------------------------------------------
    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        onz = other._nonzeros()
        cols = other.cols
        out = []
        for row in self._nonzeros():
            acc: dict[int, GaussianRational] = {}
            for k, a in row:
                for j, b in onz[k]:
                    p = a * b
                    if j in acc:
                        acc[j] = acc[j] + p
                    else:
                        acc[j] = p
            if acc:
                line = [ZERO] * cols
                for j, v in acc.items():
                    line[j] = v
                out.append(tuple(line))
            else:
                out.append((ZERO,) * cols)
        return ExactMatrix._wrap(tuple(out), self.rows, cols)

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same(other)
        return ExactMatrix._wrap(
            tuple(tuple(a + b if b else a for a, b in zip(r, s)) for r, s in zip(self._data, other._data)),
            self.rows, self.cols)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same(other)
        return ExactMatrix._wrap(
            tuple(tuple(a - b if b else a for a, b in zip(r, s)) for r, s in zip(self._data, other._data)),
            self.rows, self.cols)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix._wrap(tuple(tuple(-a for a in r) for r in self._data), self.rows, self.cols)

    def __mul__(self, scalar) -> "ExactMatrix":
        if isinstance(scalar, ExactMatrix):
            raise TypeError("use @ for matrix products")
        s = as_scalar(scalar)
        return ExactMatrix._wrap(tuple(tuple(a * s if a else a for a in r) for r in self._data),
                                 self.rows, self.cols)

    __rmul__ = __mul__

    def _check_same(self, other):
        if not isinstance(other, ExactMatrix) or self.shape != other.shape:
            raise ValueError("shape mismatch")

    @property
    def T(self) -> "ExactMatrix":
        return ExactMatrix._wrap(tuple(zip(*self._data)) if self.rows else (), self.cols, self.rows)

    def transpose(self) -> "ExactMatrix":
        return self.T

    def __pow__(self, k: int) -> "ExactMatrix":
        if not self.is_square:
            raise ValueError("power of a non-square matrix")
        if k < 0:
            return self.inverse() ** (-k)
        result, base = ExactMatrix.identity(self.rows), self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def is_zero(self) -> bool:
        return not any(self._nonzeros())

    def first_nonzero(self):
        """Return ``(i, j, value)`` of the first nonzero entry, or ``None``."""
        for i, r in enumerate(self._nonzeros()):
            if r:
                j, v = r[0]
                return i, j, v
        return None

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self):
        return hash((self.rows, self.cols, self._data))

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self._data)
        return f"ExactMatrix({self.rows}x{self.cols}: [{body}])"

    # -- elimination ------------------------------------------------------
    def _work(self) -> list[list[GaussianRational]]:
        return [list(r) for r in self._data]

    def rref(self) -> tuple["ExactMatrix", list[int]]:
        """Reduced row echelon form and pivot columns (first-nonzero pivoting)."""
        m = self._work()
        pivots = _rref_inplace(m, self.cols)
        return ExactMatrix._wrap(tuple(map(tuple, m)), self.rows, self.cols), pivots

    def rank(self) -> int:
        return len(_rref_inplace(self._work(), self.cols))

    def nullspace(self) -> list["ExactMatrix"]:
        """Basis of the right nullspace as column vectors."""
        m = self._work()
        pivots = _rref_inplace(m, self.cols)
        free = [j for j in range(self.cols) if j not in set(pivots)]
        basis = []
        for f in free:
            v = [ZERO] * self.cols
            v[f] = ONE
            for i, p in enumerate(pivots):
                v[p] = -m[i][f]
            basis.append(ExactMatrix._wrap(tuple((x,) for x in v), self.cols, 1))
        return basis

    def det(self) -> GaussianRational:
        if not self.is_square:
            raise ValueError("determinant of a non-square matrix")
        m = self._work()
        n = self.rows
        det = ONE
        for c in range(n):
            p = next((i for i in range(c, n) if m[i][c]), None)
            if p is None:
                return ZERO
            if p != c:
                m[c], m[p] = m[p], m[c]
                det = -det
            piv = m[c][c]
            det = det * piv
            inv = ONE / piv
            for i in range(c + 1, n):
                f = m[i][c]
                if f:
                    f = f * inv
                    ri, rc = m[i], m[c]
                    for j in range(c, n):
                        if rc[j]:
                            ri[j] = ri[j] - f * rc[j]
        return det

    def inverse(self) -> "ExactMatrix":
        if not self.is_square:
            raise ValueError("inverse of a non-square matrix")
        n = self.rows
        m = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(self._data)]
        pivots = _rref_inplace(m, n)
        if len(pivots) < n:
            raise SingularMatrixError("matrix is singular")
        return ExactMatrix._wrap(tuple(tuple(r[n:]) for r in m), n, n)

    def solve(self, rhs: "ExactMatrix") -> "ExactMatrix":
        """Solve ``self @ X = rhs`` for nonsingular square ``self``."""
        n = self.rows
        if not self.is_square or rhs.rows != n:
            raise ValueError("shape mismatch in solve")
        m = [list(r) + list(s) for r, s in zip(self._data, rhs._data)]
        pivots = _rref_inplace(m, n)
        if len(pivots) < n:
            raise SingularMatrixError("matrix is singular")
        return ExactMatrix._wrap(tuple(tuple(r[n:]) for r in m), n, rhs.cols)

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols,
                "data": [scalar_to_json(x) for r in self._data for x in r]}

    @classmethod
    def from_json(cls, obj: dict) -> "ExactMatrix":
        extra = set(obj) - {"rows", "cols", "data"}
        if extra:
            raise ValueError(f"unknown matrix fields: {sorted(extra)}")
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
        if len(data) != rows * cols:
            raise ValueError("matrix data length does not match rows*cols")
        vals = [scalar_from_json(x) for x in data]
        return cls._wrap(tuple(tuple(vals[i * cols:(i + 1) * cols]) for i in range(rows)), rows, cols)


def _rref_inplace(m: list[list[GaussianRational]], ncols: int) -> list[int]:
    """Gauss-Jordan on the first ``ncols`` columns; extra columns ride along."""
    nrows = len(m)
    width = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        rowr = m[r]
        inv = ONE / rowr[c]
        if inv != ONE:
            for j in range(c, width):
                if rowr[j]:
                    rowr[j] = rowr[j] * inv
        nzr = [j for j in range(c, width) if rowr[j]]
        for i in range(nrows):
            if i != r:
                f = m[i][c]
                if f:
                    ri = m[i]
                    for j in nzr:
                        ri[j] = ri[j] - f * rowr[j]
        pivots.append(c)
        r += 1
    return pivots


def sparse_rank(rows: Iterable[dict[int, GaussianRational]]) -> int:
    """Exact rank of a sparse system given as ``{column: coefficient}`` rows.

    Rows are reduced against the current echelon basis one at a time, so the
    basis stays sparse when the system is (e.g. Kronecker-linearized
    commutation equations).
    """
    basis: dict[int, dict[int, GaussianRational]] = {}
    for row in rows:
        v = {j: x for j, x in row.items() if x}
        while v:
            lead = min(v)
            b = basis.get(lead)
            if b is None:
                inv = ONE / v[lead]
                basis[lead] = {j: x * inv for j, x in v.items()}
                break
            f = v[lead]
            for j, x in b.items():
                y = v.get(j, ZERO) - f * x
                if y:
                    v[j] = y
                else:
                    v.pop(j, None)
    return len(basis)
