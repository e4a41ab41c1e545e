"""Bounded cochain complexes of finite dimensional vector spaces.

Sign conventions, fixed once and used by every construction downstream:

* cone(f)^n = target^n (+) source^{n+1} with d(y, x) = (dy + fx, -dx);
* shift(C, m)^n = C^{n+m} with differential (-1)^m d;
* dual(C)^n = (C^{-n})^* with differential (-1)^{n+1} (d^{-n-1})^T;
* tensor differential d(x (x) y) = dx (x) y + (-1)^{|x|} x (x) dy.

Truncation tau^{<=n} is the subcomplex (... -> C^{n-1} -> ker d^n -> 0).
"""

from __future__ import annotations

from typing import Callable, Sequence

from .exactalg import Field, LinAlgError, Mat, Subspace, kernel_basis, solve


class ComplexError(ValueError):
    pass


class Complex:
    """A bounded cochain complex, dims and differentials keyed by degree."""

    def __init__(self, field: Field, dims: dict[int, int], d: dict[int, Mat],
                 check: bool = True):
        self.field = field
        self.dims = {n: k for n, k in dims.items() if k > 0}
        self.d = {}
        for n, m in d.items():
            if self.dim(n) == 0 or self.dim(n + 1) == 0:
                continue
            self.d[n] = m
        if check:
            self._validate()

    def _validate(self):
        for n, m in self.d.items():
            if m.field != self.field:
                raise ComplexError("field mismatch in differential")
            if m.shape != (self.dim(n + 1), self.dim(n)):
                raise ComplexError(f"differential at degree {n} has shape {m.shape}, "
                                   f"expected {(self.dim(n + 1), self.dim(n))}")
        for n in self.d:
            if self.dim(n + 2) > 0:
                if not self.diff(n + 1).mul(self.diff(n)).is_zero():
                    raise ComplexError(f"d o d != 0 at degree {n}")

    def dim(self, n: int) -> int:
        return self.dims.get(n, 0)

    def diff(self, n: int) -> Mat:
        if n in self.d:
            return self.d[n]
        return Mat.zeros(self.field, self.dim(n + 1), self.dim(n))

    @property
    def support(self) -> tuple[int, int]:
        """(lo, hi) degrees with nonzero spaces; (0, -1) for the zero complex."""
        if not self.dims:
            return (0, -1)
        return (min(self.dims), max(self.dims))

    def degrees(self):
        lo, hi = self.support
        return range(lo, hi + 1)

    @classmethod
    def zero(cls, field: Field) -> "Complex":
        return cls(field, {}, {})

    @classmethod
    def point(cls, field: Field, degree: int = 0, dim: int = 1) -> "Complex":
        return cls(field, {degree: dim}, {})

    def __eq__(self, other):
        return (isinstance(other, Complex) and other.field == self.field
                and other.dims == self.dims and other.d == self.d)

    def __repr__(self):
        lo, hi = self.support
        dims = [self.dim(n) for n in range(lo, hi + 1)] if self.dims else []
        return f"Complex({self.field}, degrees {lo}..{hi}, dims {dims})"

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def euler(self) -> int:
        return sum((-1) ** n * k for n, k in self.dims.items())

    def cocycles(self, n: int) -> Subspace:
        if self.dim(n) == 0:
            return Subspace.zero(self.field, 0)
        return kernel_basis(self.diff(n))

    def coboundaries(self, n: int) -> Subspace:
        if self.dim(n) == 0:
            return Subspace.zero(self.field, 0)
        prev = self.diff(n - 1)
        return Subspace.full(self.field, prev.cols).image(prev) if prev.cols else \
            Subspace.zero(self.field, self.dim(n))

    def cohomology(self, n: int) -> tuple[int, Mat]:
        """Dimension of H^n and canonical representative rows."""
        z = self.cocycles(n)
        b = self.coboundaries(n)
        reps = z.quotient_basis(b)
        return reps.rows, reps

    def h_dims(self) -> dict[int, int]:
        out = {}
        for n in self.degrees():
            h = self.cohomology(n)[0]
            if h:
                out[n] = h
        return out

    def is_acyclic(self) -> bool:
        return not self.h_dims()

    def cohomology_class(self, n: int, vec: Sequence) -> list:
        """Coordinates of a cocycle's class in the canonical H^n basis."""
        z = self.cocycles(n)
        b = self.coboundaries(n)
        return z.quotient_coords(b, vec)

    def shift(self, m: int) -> "Complex":
        sign = self.field.one if m % 2 == 0 else self.field.neg(self.field.one)
        dims = {n - m: k for n, k in self.dims.items()}
        d = {n - m: mat.scale(sign) for n, mat in self.d.items()}
        return Complex(self.field, dims, d, check=False)

    def dual(self) -> "Complex":
        dims = {-n: k for n, k in self.dims.items()}
        d = {}
        for n in dims:
            src = self.diff(-n - 1)
            if src.rows and src.cols:
                sign = self.field.one if (n + 1) % 2 == 0 else self.field.neg(self.field.one)
                d[n] = src.transpose().scale(sign)
        return Complex(self.field, dims, d, check=False)

    def direct_sum(self, other: "Complex") -> "Complex":
        f = self.field
        dims = {}
        for n in set(self.dims) | set(other.dims):
            dims[n] = self.dim(n) + other.dim(n)
        d = {}
        for n in dims:
            if dims.get(n + 1, 0) == 0:
                continue
            a, b = self.diff(n), other.diff(n)
            top = a.hstack(Mat.zeros(f, a.rows, b.cols))
            bot = Mat.zeros(f, b.rows, a.cols).hstack(b)
            d[n] = top.vstack(bot)
        return Complex(f, dims, d, check=False)

    def tensor(self, other: "Complex") -> "Complex":
        return tensor_complex(self, other)


def _tensor_blocks(c: Complex, d: Complex, n: int) -> list[tuple[int, int]]:
    """Ascending (p, q) pairs with p + q = n and both factors nonzero."""
    out = []
    for p in sorted(c.dims):
        q = n - p
        if d.dim(q) > 0:
            out.append((p, q))
    return out


def tensor_index(c: Complex, d: Complex, n: int, p: int, i: int, j: int) -> int:
    """Flat index of basis vector e_i (x) e_j from block (p, n-p)."""
    off = 0
    for (bp, bq) in _tensor_blocks(c, d, n):
        if bp == p:
            return off + i * d.dim(bq) + j
        off += c.dim(bp) * d.dim(bq)
    raise ComplexError("block not present")


def tensor_complex(c: Complex, d: Complex) -> Complex:
    f = c.field
    if d.field != f:
        raise ComplexError("field mismatch in tensor")
    dims: dict[int, int] = {}
    lo1, hi1 = c.support
    lo2, hi2 = d.support
    if c.dims and d.dims:
        for n in range(lo1 + lo2, hi1 + hi2 + 1):
            k = sum(c.dim(p) * d.dim(n - p) for p, _ in _tensor_blocks(c, d, n))
            if k:
                dims[n] = k
    diffs: dict[int, Mat] = {}
    for n in dims:
        if dims.get(n + 1, 0) == 0:
            continue
        m = Mat.zeros(f, dims[n + 1], dims[n])
        for (p, q) in _tensor_blocks(c, d, n):
            sign = f.one if p % 2 == 0 else f.neg(f.one)
            dc, dd = c.diff(p), d.diff(q)
            for i in range(c.dim(p)):
                for j in range(d.dim(q)):
                    col = tensor_index(c, d, n, p, i, j)
                    if c.dim(p + 1):
                        for a in range(c.dim(p + 1)):
                            v = dc.data[a][i]
                            if v != f.zero:
                                row = tensor_index(c, d, n + 1, p + 1, a, j)
                                m.data[row][col] = f.add(m.data[row][col], v)
                    if d.dim(q + 1):
                        for b in range(d.dim(q + 1)):
                            v = dd.data[b][j]
                            if v != f.zero:
                                row = tensor_index(c, d, n + 1, p, i, b)
                                m.data[row][col] = f.add(m.data[row][col], f.mul(sign, v))
        diffs[n] = m
    return Complex(f, dims, diffs)


class ChainMap:
    """A degreewise linear map commuting with the differentials."""

    def __init__(self, source: Complex, target: Complex, blocks: dict[int, Mat],
                 check: bool = True):
        self.source = source
        self.target = target
        self.blocks = {n: m for n, m in blocks.items()
                       if source.dim(n) > 0 and target.dim(n) > 0}
        if check:
            self._validate()

    def _validate(self):
        s, t = self.source, self.target
        for n, m in self.blocks.items():
            if m.shape != (t.dim(n), s.dim(n)):
                raise ComplexError(f"chain map block at {n} has shape {m.shape}, "
                                   f"expected {(t.dim(n), s.dim(n))}")
        lo = min(s.support[0], t.support[0]) if (s.dims or t.dims) else 0
        hi = max(s.support[1], t.support[1]) if (s.dims or t.dims) else -1
        for n in range(lo, hi + 1):
            left = t.diff(n).mul(self.block(n))
            right = self.block(n + 1).mul(s.diff(n))
            if left != right:
                raise ComplexError(f"square at degree {n} does not commute")

    def block(self, n: int) -> Mat:
        if n in self.blocks:
            return self.blocks[n]
        return Mat.zeros(self.source.field, self.target.dim(n), self.source.dim(n))

    @classmethod
    def identity(cls, c: Complex) -> "ChainMap":
        return cls(c, c, {n: Mat.identity(c.field, k) for n, k in c.dims.items()},
                   check=False)

    @classmethod
    def zero(cls, source: Complex, target: Complex) -> "ChainMap":
        return cls(source, target, {}, check=False)

    def compose(self, first: "ChainMap") -> "ChainMap":
        """self o first."""
        if first.target is not self.source and first.target != self.source:
            raise ComplexError("composition mismatch")
        blocks = {}
        for n in set(self.blocks) | set(first.blocks):
            blocks[n] = self.block(n).mul(first.block(n))
        return ChainMap(first.source, self.target, blocks, check=False)

    def add(self, other: "ChainMap") -> "ChainMap":
        blocks = {}
        for n in set(self.blocks) | set(other.blocks):
            blocks[n] = self.block(n).add(other.block(n))
        return ChainMap(self.source, self.target, blocks, check=False)

    def scale(self, c) -> "ChainMap":
        return ChainMap(self.source, self.target,
                        {n: m.scale(c) for n, m in self.blocks.items()}, check=False)

    def cone(self) -> Complex:
        return cone(self)

    def is_quasi_iso(self) -> bool:
        return cone(self).is_acyclic()

    def induced_cohomology_map(self, n: int) -> Mat:
        """The induced map H^n(source) -> H^n(target) on canonical bases."""
        hs, reps = self.source.cohomology(n)
        ht, _ = self.target.cohomology(n)
        cols = []
        for i in range(hs):
            img = self.block(n).apply(reps.data[i])
            cols.append(self.target.cohomology_class(n, img))
        m = Mat.zeros(self.source.field, ht, hs)
        for j, col in enumerate(cols):
            for i in range(ht):
                m.data[i][j] = col[i]
        return m

    def dual(self) -> "ChainMap":
        """The dual map dual(target) -> dual(source), transposed blocks."""
        blocks = {-n: m.transpose() for n, m in self.blocks.items()}
        return ChainMap(self.target.dual(), self.source.dual(), blocks, check=False)

    def shift(self, m: int) -> "ChainMap":
        blocks = {n - m: mat for n, mat in self.blocks.items()}
        return ChainMap(self.source.shift(m), self.target.shift(m), blocks, check=False)


def direct_sum_map(f: ChainMap, g: ChainMap) -> ChainMap:
    """Blockwise direct sum of two chain maps."""
    src = f.source.direct_sum(g.source)
    tgt = f.target.direct_sum(g.target)
    k = src.field
    blocks = {}
    for n in src.dims:
        fb, gb = f.block(n), g.block(n)
        top = fb.hstack(Mat.zeros(k, fb.rows, gb.cols))
        bot = Mat.zeros(k, gb.rows, fb.cols).hstack(gb)
        blocks[n] = top.vstack(bot)
    return ChainMap(src, tgt, blocks, check=False)


def cone(f: ChainMap) -> Complex:
    """Mapping cone, target in place with source shifted up by one."""
    s, t = f.source, f.target
    k = s.field
    dims = {}
    lo = min(s.support[0] - 1, t.support[0]) if (s.dims or t.dims) else 0
    hi = max(s.support[1] - 1, t.support[1]) if (s.dims or t.dims) else -1
    for n in range(lo, hi + 1):
        d = t.dim(n) + s.dim(n + 1)
        if d:
            dims[n] = d
    diffs = {}
    for n in dims:
        if dims.get(n + 1, 0) == 0:
            continue
        dt, ds = t.diff(n), s.diff(n + 1)
        fb = f.block(n + 1)
        top = dt.hstack(fb)
        bot = Mat.zeros(k, ds.rows, dt.cols).hstack(ds.scale(k.neg(k.one)))
        diffs[n] = top.vstack(bot)
    return Complex(k, dims, diffs, check=False)


def cone_inclusion(f: ChainMap) -> ChainMap:
    """Canonical inclusion of the target into cone(f)."""
    c = cone(f)
    t = f.target
    k = t.field
    blocks = {}
    for n, dim in t.dims.items():
        m = Mat.zeros(k, c.dim(n), dim)
        for i in range(dim):
            m.data[i][i] = k.one
        blocks[n] = m
    return ChainMap(t, c, blocks, check=False)


def fib(f: ChainMap) -> Complex:
    """cone(f)[-1]; the homotopy fiber of f."""
    return cone(f).shift(-1)


def cone_map(f: ChainMap, g: ChainMap, a: ChainMap, b: ChainMap) -> ChainMap:
    """The map cone(f) -> cone(g) induced by a square b f = g a."""
    for n in set(b.blocks) | set(f.blocks) | set(g.blocks) | set(a.blocks):
        if b.block(n).mul(f.block(n)) != g.block(n).mul(a.block(n)):
            raise ComplexError(f"square does not commute at degree {n}")
    cf, cg = cone(f), cone(g)
    k = cf.field
    blocks = {}
    for n in cf.dims:
        m = Mat.zeros(k, cg.dim(n), cf.dim(n))
        bb, ab = b.block(n), a.block(n + 1)
        for i in range(bb.rows):
            for j in range(bb.cols):
                m.data[i][j] = bb.data[i][j]
        ro, co = g.target.dim(n), f.target.dim(n)
        for i in range(ab.rows):
            for j in range(ab.cols):
                m.data[ro + i][co + j] = ab.data[i][j]
        blocks[n] = m
    return ChainMap(cf, cg, blocks, check=False)


def fib_map(f: ChainMap, g: ChainMap, a: ChainMap, b: ChainMap) -> ChainMap:
    """The map fib(f) -> fib(g) induced by a square b f = g a."""
    return cone_map(f, g, a, b).shift(-1)


def fib_projection(f: ChainMap) -> ChainMap:
    """Canonical projection of fib(f) onto the source."""
    fc = fib(f)
    s, t = f.source, f.target
    k = s.field
    blocks = {}
    for n, dim in s.dims.items():
        # fib^n = target^{n-1} (+) source^n
        m = Mat.zeros(k, dim, fc.dim(n))
        off = t.dim(n - 1)
        for i in range(dim):
            m.data[i][off + i] = k.one
        blocks[n] = m
    return ChainMap(fc, s, blocks, check=False)


def chain_section(f: ChainMap) -> ChainMap | None:
    """A chain map s with f . s = id on the target, or None.

    Solves the linear system in the entries of s, so the answer is exact: a
    surjection of complexes splits iff this returns a map.
    """
    a, b = f.source, f.target
    field = a.field
    degs = sorted(set(a.dims) | set(b.dims))
    offs = {}
    total = 0
    for n in degs:
        offs[n] = total
        total += a.dim(n) * b.dim(n)

    def var(n, i, j):
        return offs[n] + i * b.dim(n) + j

    rows = []
    rhs = []
    for n in degs:
        fb = f.block(n)
        for i in range(b.dim(n)):
            for j in range(b.dim(n)):
                row = [field.zero] * total
                for k in range(a.dim(n)):
                    row[var(n, k, j)] = fb.data[i][k]
                rows.append(row)
                rhs.append(field.one if i == j else field.zero)
    for n in degs:
        da = a.diff(n)
        db = b.diff(n)
        for i in range(a.dim(n + 1)):
            for j in range(b.dim(n)):
                row = [field.zero] * total
                for k in range(a.dim(n)):
                    row[var(n, k, j)] = da.data[i][k]
                for k in range(b.dim(n + 1)):
                    if db.data[k][j] != field.zero:
                        row[var(n + 1, i, k)] = field.sub(
                            row[var(n + 1, i, k)], db.data[k][j])
                rows.append(row)
                rhs.append(field.zero)
    sol = solve(Mat(field, rows, rows=len(rows), cols=total), rhs)
    if sol is None:
        return None
    blocks = {}
    for n in degs:
        if a.dim(n) and b.dim(n):
            m = Mat.zeros(field, a.dim(n), b.dim(n))
            for i in range(a.dim(n)):
                for j in range(b.dim(n)):
                    m.data[i][j] = sol[var(n, i, j)]
            blocks[n] = m
    return ChainMap(b, a, blocks)


def hom_blocks(c: Complex, d: Complex, n: int) -> list[int]:
    """Source degrees p contributing a block Hom(C^p, D^{p+n}) to Hom^n."""
    return [p for p in sorted(c.dims) if d.dim(p + n) > 0]


def hom_offset(c: Complex, d: Complex, n: int, p: int) -> int:
    """Flat offset of the block Hom(C^p, D^{p+n}) inside Hom^n."""
    off = 0
    for bp in hom_blocks(c, d, n):
        if bp == p:
            return off
        off += c.dim(bp) * d.dim(bp + n)
    raise ComplexError("block not present")


def hom_complex(c: Complex, d: Complex) -> Complex:
    """Hom^n = (+)_p Hom(C^p, D^{p+n}); H^0 is chain maps modulo homotopy.

    Coordinates flatten each block row-major: entry (a, b) of the component
    C^p -> D^{p+n} sits at hom_offset(p) + a * dim C^p + b.
    """
    f = c.field
    if d.field != f:
        raise ComplexError("field mismatch in hom")
    if not c.dims or not d.dims:
        return Complex.zero(f)
    lo = d.support[0] - c.support[1]
    hi = d.support[1] - c.support[0]

    def blocks_at(n):
        return hom_blocks(c, d, n)

    def offset(n, p):
        return hom_offset(c, d, n, p)

    dims = {}
    for n in range(lo, hi + 1):
        k = sum(c.dim(p) * d.dim(p + n) for p in blocks_at(n))
        if k:
            dims[n] = k
    diffs = {}
    for n in dims:
        if dims.get(n + 1, 0) == 0:
            continue
        sign = f.one if n % 2 == 0 else f.neg(f.one)
        m = Mat.zeros(f, dims[n + 1], dims[n])
        # (delta f)_p = d_D o f_p - (-1)^n f_{p+1} o d_C
        for p in blocks_at(n + 1):
            dcp, ddp = c.dim(p), d.dim(p + n + 1)
            row0 = offset(n + 1, p)
            if d.dim(p + n) > 0:
                dd = d.diff(p + n)
                for a in range(ddp):
                    for b in range(dcp):
                        row = row0 + a * dcp + b
                        for x in range(d.dim(p + n)):
                            v = dd.data[a][x]
                            if v != f.zero:
                                col = offset(n, p) + x * dcp + b
                                m.data[row][col] = f.add(m.data[row][col], v)
            if c.dim(p + 1) > 0 and d.dim(p + n + 1) > 0 and d.dim(p + 1 + n) > 0:
                dc = c.diff(p)
                for a in range(ddp):
                    for b in range(dcp):
                        row = row0 + a * dcp + b
                        for x in range(c.dim(p + 1)):
                            v = dc.data[x][b]
                            if v != f.zero:
                                col = offset(n, p + 1) + a * c.dim(p + 1) + x
                                m.data[row][col] = f.sub(m.data[row][col], f.mul(sign, v))
        diffs[n] = m
    return Complex(f, dims, diffs)


def smart_truncate(c: Complex, n: int) -> dict[int, Subspace]:
    """Subspace chain of tau^{<=n}: full below n, cocycles at n, zero above."""
    out = {}
    for m in c.degrees():
        if m < n:
            out[m] = Subspace.full(c.field, c.dim(m))
        elif m == n:
            out[m] = c.cocycles(n)
        else:
            out[m] = Subspace.zero(c.field, c.dim(m))
    return out


def check_d_closed(c: Complex, chain: dict[int, Subspace]) -> bool:
    for n, sub in chain.items():
        nxt = chain.get(n + 1)
        if nxt is None:
            if c.dim(n + 1) > 0 and sub.dim > 0:
                img = sub.image(c.diff(n))
                if img.dim > 0:
                    return False
            continue
        for row in sub.basis.data:
            if not nxt.contains_vec(c.diff(n).apply(row)):
                return False
    return True


def subcomplex(c: Complex, chain: dict[int, Subspace]) -> tuple[Complex, ChainMap]:
    """The subcomplex spanned by a d-closed subspace chain, with its inclusion."""
    if not check_d_closed(c, chain):
        raise ComplexError("subspace chain is not closed under d")
    f = c.field
    dims = {n: s.dim for n, s in chain.items() if s.dim > 0}
    diffs = {}
    for n, k in dims.items():
        if dims.get(n + 1, 0) == 0:
            continue
        up = chain[n + 1]
        m = Mat.zeros(f, up.dim, k)
        for j, row in enumerate(chain[n].basis.data):
            col = up.coords(c.diff(n).apply(row))
            for i in range(up.dim):
                m.data[i][j] = col[i]
        diffs[n] = m
    sub = Complex(f, dims, diffs, check=False)
    incl = {n: chain[n].basis.transpose() for n in dims}
    return sub, ChainMap(sub, c, incl, check=False)


def quotient_complex(c: Complex, chain: dict[int, Subspace]) -> tuple[Complex, ChainMap]:
    """The quotient by a d-closed subspace chain, with its projection."""
    full = {n: Subspace.full(c.field, c.dim(n)) for n in c.degrees()}
    quot = subquotient(c, full, chain)
    f = c.field
    proj = {}
    for n in quot.dims:
        m = Mat.zeros(f, quot.dim(n), c.dim(n))
        for j in range(c.dim(n)):
            e = [f.zero] * c.dim(n)
            e[j] = f.one
            col = full[n].quotient_coords(chain.get(n, Subspace.zero(f, c.dim(n))), e)
            for i in range(quot.dim(n)):
                m.data[i][j] = col[i]
        proj[n] = m
    return quot, ChainMap(c, quot, proj, check=False)


def subquotient(c: Complex, upper: dict[int, Subspace], lower: dict[int, Subspace]) -> Complex:
    """The complex upper/lower for nested d-closed chains lower <= upper."""
    f = c.field
    reps = {}
    for n in c.degrees():
        u = upper.get(n, Subspace.zero(f, c.dim(n)))
        l = lower.get(n, Subspace.zero(f, c.dim(n)))
        reps[n] = u.quotient_basis(l)
    dims = {n: r.rows for n, r in reps.items() if r.rows > 0}
    diffs = {}
    for n, k in dims.items():
        if dims.get(n + 1, 0) == 0:
            continue
        u1 = upper.get(n + 1, Subspace.zero(f, c.dim(n + 1)))
        l1 = lower.get(n + 1, Subspace.zero(f, c.dim(n + 1)))
        m = Mat.zeros(f, dims[n + 1], k)
        for j, row in enumerate(reps[n].data):
            col = u1.quotient_coords(l1, c.diff(n).apply(row))
            for i in range(dims[n + 1]):
                m.data[i][j] = col[i]
        diffs[n] = m
    return Complex(f, dims, diffs)
