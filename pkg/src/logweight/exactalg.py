"""Exact dense linear algebra over the rationals and prime fields.

Scalars are `fractions.Fraction` over Q and plain ints in [0, p) over F_p.
Everything downstream (complexes, filtrations, spectral sequences) reduces to
row echelon computations here, so subspaces are kept in a canonical reduced
row echelon form: two subspaces are equal iff their representations are equal.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence


class FieldError(ValueError):
    pass


class LinAlgError(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class Field:
    """The rationals (p=None) or the prime field F_p."""

    def __init__(self, p: int | None = None):
        if p is not None:
            if not _is_prime(p):
                raise FieldError(f"{p} is not prime")
        self.p = p

    @property
    def char(self) -> int:
        return self.p or 0

    def of(self, x):
        """Coerce an int, Fraction or scalar string into the field."""
        if isinstance(x, str):
            return self.parse(x)
        if self.p is None:
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise FieldError(f"denominator not invertible mod {self.p}")
            return x.numerator * pow(x.denominator, self.p - 2, self.p) % self.p
        return int(x) % self.p

    @property
    def zero(self):
        return Fraction(0) if self.p is None else 0

    @property
    def one(self):
        return Fraction(1) if self.p is None else 1

    def add(self, a, b):
        return a + b if self.p is None else (a + b) % self.p

    def sub(self, a, b):
        return a - b if self.p is None else (a - b) % self.p

    def mul(self, a, b):
        return a * b if self.p is None else (a * b) % self.p

    def neg(self, a):
        return -a if self.p is None else (-a) % self.p

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.p is None:
            return 1 / a
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def parse(self, s) -> object:
        """Parse "num/den" (rationals) or an integer literal."""
        if isinstance(s, (int, Fraction)):
            return self.of(s)
        s = s.strip()
        if self.p is None:
            return Fraction(s)
        if "/" in s:
            num, den = s.split("/")
            return self.div(self.of(int(num)), self.of(int(den)))
        return self.of(int(s))

    def format(self, a) -> str:
        if self.p is None:
            return f"{a.numerator}/{a.denominator}" if a.denominator != 1 else str(a.numerator)
        return str(a)

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return "Q" if self.p is None else f"F{self.p}"


QQ = Field()

_gf_cache: dict[int, Field] = {}


def GF(p: int) -> Field:
    if p not in _gf_cache:
        _gf_cache[p] = Field(p)
    return _gf_cache[p]


class Mat:
    """Dense matrix with entries in a fixed field, stored as rows."""

    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, field: Field, data: Sequence[Sequence], rows: int | None = None,
                 cols: int | None = None):
        self.field = field
        self.data = [[field.of(x) for x in row] for row in data]
        self.rows = len(self.data) if rows is None else rows
        self.cols = (len(self.data[0]) if self.data else 0) if cols is None else cols
        for row in self.data:
            if len(row) != self.cols:
                raise LinAlgError("ragged rows")

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> "Mat":
        z = field.zero
        return cls(field, [[z] * cols for _ in range(rows)], rows, cols)

    @classmethod
    def identity(cls, field: Field, n: int) -> "Mat":
        m = cls.zeros(field, n, n)
        for i in range(n):
            m.data[i][i] = field.one
        return m

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def copy(self) -> "Mat":
        return Mat(self.field, [row[:] for row in self.data], self.rows, self.cols)

    def __eq__(self, other):
        return (isinstance(other, Mat) and other.field == self.field
                and other.shape == self.shape and other.data == self.data)

    def __hash__(self):
        return hash((self.field, self.rows, self.cols, tuple(map(tuple, self.data))))

    def __repr__(self):
        return f"Mat({self.field}, {self.rows}x{self.cols})"

    def is_zero(self) -> bool:
        z = self.field.zero
        return all(x == z for row in self.data for x in row)

    def add(self, other: "Mat") -> "Mat":
        if self.shape != other.shape:
            raise LinAlgError("shape mismatch in add")
        f = self.field
        return Mat(f, [[f.add(a, b) for a, b in zip(r1, r2)]
                       for r1, r2 in zip(self.data, other.data)], self.rows, self.cols)

    def sub(self, other: "Mat") -> "Mat":
        return self.add(other.scale(self.field.neg(self.field.one)))

    def scale(self, c) -> "Mat":
        f = self.field
        c = f.of(c)
        return Mat(f, [[f.mul(c, a) for a in row] for row in self.data], self.rows, self.cols)

    def mul(self, other: "Mat") -> "Mat":
        if self.cols != other.rows:
            raise LinAlgError(f"shape mismatch in mul: {self.shape} * {other.shape}")
        f = self.field
        z = f.zero
        out = Mat.zeros(f, self.rows, other.cols)
        for i in range(self.rows):
            row = self.data[i]
            orow = out.data[i]
            for k in range(self.cols):
                a = row[k]
                if a == z:
                    continue
                brow = other.data[k]
                for j in range(other.cols):
                    b = brow[j]
                    if b != z:
                        orow[j] = f.add(orow[j], f.mul(a, b))
        return out

    def apply(self, vec: Sequence) -> list:
        """Matrix times column vector, returned as a list."""
        if len(vec) != self.cols:
            raise LinAlgError("vector length mismatch")
        f = self.field
        vec = [f.of(x) for x in vec]
        out = []
        for row in self.data:
            s = f.zero
            for a, x in zip(row, vec):
                if a != f.zero and x != f.zero:
                    s = f.add(s, f.mul(a, x))
            out.append(s)
        return out

    def transpose(self) -> "Mat":
        return Mat(self.field, [[self.data[i][j] for i in range(self.rows)]
                                for j in range(self.cols)], self.cols, self.rows)

    def hstack(self, other: "Mat") -> "Mat":
        if self.rows != other.rows:
            raise LinAlgError("row count mismatch in hstack")
        return Mat(self.field, [r1 + r2 for r1, r2 in zip(self.data, other.data)],
                   self.rows, self.cols + other.cols)

    def vstack(self, other: "Mat") -> "Mat":
        if self.cols != other.cols:
            raise LinAlgError("col count mismatch in vstack")
        return Mat(self.field, self.data + other.data, self.rows + other.rows, self.cols)

    def submatrix(self, row_idx: Iterable[int], col_idx: Iterable[int]) -> "Mat":
        ri, ci = list(row_idx), list(col_idx)
        return Mat(self.field, [[self.data[i][j] for j in ci] for i in ri], len(ri), len(ci))

    def to_lists(self) -> list[list]:
        return [row[:] for row in self.data]

    def format_entries(self) -> list[list[str]]:
        f = self.field
        return [[f.format(x) for x in row] for row in self.data]

    def rref(self) -> tuple["Mat", tuple[int, ...]]:
        """Reduced row echelon form and the pivot column indices."""
        f = self.field
        m = self.copy()
        pivots: list[int] = []
        r = 0
        for c in range(m.cols):
            pr = None
            for i in range(r, m.rows):
                if m.data[i][c] != f.zero:
                    pr = i
                    break
            if pr is None:
                continue
            m.data[r], m.data[pr] = m.data[pr], m.data[r]
            inv = f.inv(m.data[r][c])
            m.data[r] = [f.mul(inv, x) for x in m.data[r]]
            for i in range(m.rows):
                if i != r and m.data[i][c] != f.zero:
                    t = m.data[i][c]
                    m.data[i] = [f.sub(x, f.mul(t, y)) for x, y in zip(m.data[i], m.data[r])]
            pivots.append(c)
            r += 1
            if r == m.rows:
                break
        return m, tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])


def solve(M: Mat, b: Sequence) -> list | None:
    """One solution of M x = b with free variables set to zero, or None."""
    f = M.field
    bcol = Mat(f, [[f.of(x)] for x in b], len(list(b)), 1)
    if bcol.rows != M.rows:
        raise LinAlgError("rhs length mismatch")
    aug, pivots = M.hstack(bcol).rref()
    if M.cols in pivots:
        return None
    x = [f.zero] * M.cols
    for r, c in enumerate(pivots):
        x[c] = aug.data[r][M.cols]
    return x


class Subspace:
    """A subspace of k^n held as a reduced row echelon basis.

    The representation is canonical, so equality of subspaces is equality of
    the stored data. Vectors are rows.
    """

    __slots__ = ("field", "ambient_dim", "basis", "pivots")

    def __init__(self, field: Field, ambient_dim: int, basis: Mat, pivots: tuple[int, ...]):
        self.field = field
        self.ambient_dim = ambient_dim
        self.basis = basis
        self.pivots = pivots

    @classmethod
    def from_rows(cls, field: Field, ambient_dim: int, rows: Sequence[Sequence]) -> "Subspace":
        m = Mat(field, [list(r) for r in rows], cols=ambient_dim) if rows else \
            Mat.zeros(field, 0, ambient_dim)
        r, pivots = m.rref()
        basis = r.submatrix(range(len(pivots)), range(ambient_dim))
        return cls(field, ambient_dim, basis, pivots)

    @classmethod
    def zero(cls, field: Field, ambient_dim: int) -> "Subspace":
        return cls(field, ambient_dim, Mat.zeros(field, 0, ambient_dim), ())

    @classmethod
    def full(cls, field: Field, ambient_dim: int) -> "Subspace":
        return cls(field, ambient_dim, Mat.identity(field, ambient_dim),
                   tuple(range(ambient_dim)))

    @property
    def dim(self) -> int:
        return self.basis.rows

    def __eq__(self, other):
        return (isinstance(other, Subspace) and other.field == self.field
                and other.ambient_dim == self.ambient_dim and other.basis == self.basis)

    def __hash__(self):
        return hash((self.field, self.ambient_dim, self.basis))

    def __repr__(self):
        return f"Subspace(dim {self.dim} of k^{self.ambient_dim} over {self.field})"

    def reduce_mod(self, vec: Sequence) -> list:
        """Subtract the projection onto this subspace along its pivot columns."""
        f = self.field
        v = [f.of(x) for x in vec]
        if len(v) != self.ambient_dim:
            raise LinAlgError("vector length mismatch")
        for i, c in enumerate(self.pivots):
            t = v[c]
            if t != f.zero:
                brow = self.basis.data[i]
                v = [f.sub(x, f.mul(t, y)) for x, y in zip(v, brow)]
        return v

    def contains_vec(self, vec: Sequence) -> bool:
        z = self.field.zero
        return all(x == z for x in self.reduce_mod(vec))

    def contains(self, other: "Subspace") -> bool:
        return all(self.contains_vec(row) for row in other.basis.data)

    def coords(self, vec: Sequence) -> list:
        """Coordinates of a member vector in the echelon basis."""
        if not self.contains_vec(vec):
            raise LinAlgError("vector not in subspace")
        f = self.field
        v = [f.of(x) for x in vec]
        return [v[c] for c in self.pivots]

    def sum(self, other: "Subspace") -> "Subspace":
        self._check_ambient(other)
        return Subspace.from_rows(self.field, self.ambient_dim,
                                  self.basis.data + other.basis.data)

    def intersection(self, other: "Subspace") -> "Subspace":
        """Intersection via the kernel of [B_U^T | -B_V^T]."""
        self._check_ambient(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.field, self.ambient_dim)
        bu_t = self.basis.transpose()
        bv_t = other.basis.transpose().scale(self.field.neg(self.field.one))
        ker = kernel_basis(bu_t.hstack(bv_t))
        rows = []
        for kv in ker.basis.data:
            a = kv[:self.dim]
            rows.append(self.basis.transpose().apply(a))
        return Subspace.from_rows(self.field, self.ambient_dim, rows)

    def preimage(self, M: Mat) -> "Subspace":
        """{x : M x in self}, a subspace of the domain of M."""
        if M.rows != self.ambient_dim:
            raise LinAlgError("codomain dimension mismatch")
        if self.dim == 0:
            return kernel_basis(M)
        stacked = M.hstack(self.basis.transpose().scale(self.field.neg(self.field.one)))
        ker = kernel_basis(stacked)
        rows = [kv[:M.cols] for kv in ker.basis.data]
        return Subspace.from_rows(self.field, M.cols, rows)

    def image(self, M: Mat) -> "Subspace":
        """The image M(self) inside the codomain of M."""
        if M.cols != self.ambient_dim:
            raise LinAlgError("domain dimension mismatch")
        rows = [M.apply(b) for b in self.basis.data]
        return Subspace.from_rows(self.field, M.rows, rows)

    def quotient_basis(self, sub: "Subspace") -> Mat:
        """Canonical representatives of self/sub (requires sub <= self).

        Returns the rows of self's echelon basis whose pivots are not pivots
        of sub; their classes form a basis of the quotient, and they reduce to
        themselves mod sub.
        """
        self._check_ambient(sub)
        if not self.contains(sub):
            raise LinAlgError("quotient by a non-subspace")
        keep = [i for i, c in enumerate(self.pivots) if c not in sub.pivots]
        return self.basis.submatrix(keep, range(self.ambient_dim))

    def quotient_coords(self, sub: "Subspace", vec: Sequence) -> list:
        """Coordinates of [vec] in the quotient_basis classes (vec in self)."""
        red = sub.reduce_mod(vec)
        if not self.contains_vec(red):
            raise LinAlgError("vector not in subspace")
        qpivots = [c for c in self.pivots if c not in sub.pivots]
        return [red[c] for c in qpivots]

    def annihilator_matrix(self) -> Mat:
        """A square matrix whose kernel is exactly this subspace.

        Realizes x |-> x - (projection onto the echelon basis read off at the
        pivot columns); vanishes precisely on members.
        """
        f = self.field
        n = self.ambient_dim
        a = Mat.identity(f, n)
        for i, c in enumerate(self.pivots):
            brow = self.basis.data[i]
            for j in range(n):
                a.data[j][c] = f.sub(a.data[j][c], brow[j])
        return a

    def _check_ambient(self, other: "Subspace"):
        if other.field != self.field or other.ambient_dim != self.ambient_dim:
            raise LinAlgError("ambient mismatch")


def kernel_basis(M: Mat) -> Subspace:
    """The kernel {x : M x = 0} as a canonical subspace of k^cols."""
    f = M.field
    r, pivots = M.rref()
    free = [c for c in range(M.cols) if c not in pivots]
    rows = []
    for c in free:
        v = [f.zero] * M.cols
        v[c] = f.one
        for i, pc in enumerate(pivots):
            v[pc] = f.neg(r.data[i][c])
        rows.append(v)
    return Subspace.from_rows(f, M.cols, rows)
