"""Filtered cochain complexes: truncation towers, decalage, spectral sequences.

Filtrations are increasing and exhaustive, indexed over a closed window
[lo, hi]: level(p) is the zero chain below the window and the full chain at
hi and above. A decreasing filtration F^p enters through the reindex
F^p = level(-p); the spectral sequence is reported in that decreasing
convention, so d_r maps (p, q) to (p + r, q - r + 1).
"""

from __future__ import annotations

from .exactalg import Mat, Subspace, kernel_basis
from .complexes import (
    ChainMap, Complex, ComplexError, check_d_closed, cone, hom_blocks,
    hom_complex, hom_offset, smart_truncate, subcomplex, subquotient,
)


def zero_chain(c: Complex) -> dict[int, Subspace]:
    return {n: Subspace.zero(c.field, c.dim(n)) for n in c.degrees()}


def full_chain(c: Complex) -> dict[int, Subspace]:
    return {n: Subspace.full(c.field, c.dim(n)) for n in c.degrees()}


class FilteredComplex:
    """An increasing filtration of a complex by d-closed subspace chains.

    Levels are canonical subspaces, so equality of filtered complexes is
    plain equality of the stored data (after normalize()).
    """

    def __init__(self, c: Complex, levels: dict[int, dict[int, Subspace]],
                 lo: int, hi: int, check: bool = True):
        self.c = c
        self.lo = lo
        self.hi = hi
        self.levels = {p: dict(levels[p]) for p in range(lo, hi + 1)}
        if check:
            self._validate()

    def _validate(self):
        if self.lo > self.hi:
            raise ComplexError("empty filtration window")
        for p, chain in self.levels.items():
            for n in self.c.degrees():
                if n not in chain:
                    raise ComplexError(f"level {p} missing degree {n}")
                if chain[n].ambient_dim != self.c.dim(n):
                    raise ComplexError(f"level {p} has wrong ambient at degree {n}")
            if not check_d_closed(self.c, chain):
                raise ComplexError(f"level {p} is not closed under d")
        for p in range(self.lo, self.hi):
            for n in self.c.degrees():
                if not self.levels[p + 1][n].contains(self.levels[p][n]):
                    raise ComplexError(f"levels {p} and {p + 1} are not nested")
        top = self.levels[self.hi]
        for n in self.c.degrees():
            if top[n].dim != self.c.dim(n):
                raise ComplexError("top level is not the whole complex")

    def level(self, p: int) -> dict[int, Subspace]:
        if p < self.lo:
            return zero_chain(self.c)
        if p > self.hi:
            return full_chain(self.c)
        return self.levels[p]

    def subspace(self, p: int, n: int) -> Subspace:
        if self.c.dim(n) == 0:
            return Subspace.zero(self.c.field, 0)
        return self.level(p)[n]

    def __eq__(self, other):
        return (isinstance(other, FilteredComplex) and other.c == self.c
                and other.lo == self.lo and other.hi == self.hi
                and other.levels == self.levels)

    def __repr__(self):
        return f"FilteredComplex(levels {self.lo}..{self.hi} on {self.c!r})"

    def normalize(self) -> "FilteredComplex":
        """Trim redundant window ends (zero bottom levels, full next-to-top)."""
        while self.lo < self.hi and self.levels[self.lo] == zero_chain(self.c):
            del self.levels[self.lo]
            self.lo += 1
        while self.hi > self.lo and self.levels[self.hi - 1] == full_chain(self.c):
            del self.levels[self.hi]
            self.hi -= 1
        return self

    @classmethod
    def concentrated(cls, c: Complex, level: int = 0) -> "FilteredComplex":
        """Everything sits in one filtration level."""
        return cls(c, {level: full_chain(c)}, level, level, check=False)

    @classmethod
    def truncation_tower(cls, c: Complex) -> "FilteredComplex":
        """level(j) = tau^{<=j} C; graded pieces are H^j(C) in degree j."""
        if not c.dims:
            return cls.concentrated(c)
        lo, hi = c.support
        levels = {j: smart_truncate(c, j) for j in range(lo, hi + 1)}
        return cls(c, levels, lo, hi, check=False)

    def reindex(self, k: int) -> "FilteredComplex":
        return FilteredComplex(self.c, {p + k: ch for p, ch in self.levels.items()},
                               self.lo + k, self.hi + k, check=False)

    def shift(self, m: int) -> "FilteredComplex":
        """Transport to c[m]; level p of the shift at degree n is level p at n+m."""
        sc = self.c.shift(m)
        levels = {}
        for p in range(self.lo, self.hi + 1):
            levels[p] = {n: self.subspace(p, n + m) for n in sc.degrees()}
        return FilteredComplex(sc, levels, self.lo, self.hi, check=False)

    def decalage(self) -> "FilteredComplex":
        """Dec(F)_p C^n = F_{p-n} C^n intersect d^{-1}(F_{p-n-1} C^{n+1})."""
        c = self.c
        if not c.dims:
            return FilteredComplex.concentrated(c, self.lo)
        s_lo, s_hi = c.support
        lo, hi = self.lo + s_lo, self.hi + s_hi + 1
        levels = {}
        for p in range(lo, hi + 1):
            chain = {}
            for n in c.degrees():
                base = self.subspace(p - n, n)
                pre = self.subspace(p - n - 1, n + 1).preimage(c.diff(n))
                chain[n] = base.intersection(pre)
            levels[p] = chain
        return FilteredComplex(c, levels, lo, hi, check=False).normalize()

    def graded_piece(self, j: int) -> Complex:
        return subquotient(self.c, self.level(j), self.level(j - 1))

    def gr_dims(self) -> dict[int, dict[int, int]]:
        out = {}
        for j in range(self.lo, self.hi + 1):
            row = {}
            for n in self.c.degrees():
                k = self.subspace(j, n).dim - self.subspace(j - 1, n).dim
                if k:
                    row[n] = k
            if row:
                out[j] = row
        return out

    def gr_h_dims(self) -> dict[int, dict[int, int]]:
        """Cohomology of each graded piece; the first page in level terms."""
        out = {}
        for j in range(self.lo, self.hi + 1):
            h = self.graded_piece(j).h_dims()
            if h:
                out[j] = h
        return out

    def h_level_dim(self, p: int, n: int) -> int:
        """dim of the induced level p on H^n: image of H^n(level p) in H^n."""
        z = self.c.cocycles(n)
        b = self.c.coboundaries(n)
        zp = z.intersection(self.subspace(p, n))
        return zp.sum(b).dim - b.dim

    def h_graded_dims(self, n: int) -> dict[int, int]:
        out = {}
        for p in range(self.lo, self.hi + 1):
            k = self.h_level_dim(p, n) - self.h_level_dim(p - 1, n)
            if k:
                out[p] = k
        return out


class SpectralSequence:
    """Pages of the spectral sequence of a filtered complex.

    Decreasing convention via F^p = level(-p): entry (p, q) sits in total
    degree p + q and d_r goes (p, q) -> (p + r, q - r + 1). Pages are dicts
    (p, q) -> dim; differentials are matrices on the canonical bases of the
    page entries. Everything is stable from stable_page on.
    """

    def __init__(self, fc: FilteredComplex):
        self.fc = fc
        self.p_min, self.p_max = -fc.hi, -fc.lo
        self.stable_page = max(1, self.p_max - self.p_min + 1)
        self._zmemo: dict = {}
        self.pages: dict[int, dict[tuple[int, int], int]] = {}
        self.differentials: dict[int, dict[tuple[int, int], Mat]] = {}
        for r in range(self.stable_page + 1):
            self._compute_page(r)

    def _f(self, p: int, n: int) -> Subspace:
        return self.fc.subspace(-p, n)

    def _z(self, r: int, p: int, n: int) -> Subspace:
        """Z_r = F^p C^n intersect d^{-1}(F^{p+r} C^{n+1}); Z_0 = F^p."""
        if r <= 0:
            return self._f(p, n)
        key = (r, p, n)
        if key not in self._zmemo:
            base = self._f(p, n)
            pre = self._f(p + r, n + 1).preimage(self.fc.c.diff(n))
            self._zmemo[key] = base.intersection(pre)
        return self._zmemo[key]

    def _b(self, r: int, p: int, n: int) -> Subspace:
        """Z_{r-1}^{p+1} + d Z_{r-1}^{p-r+1}, the part killed inside Z_r."""
        z1 = self._z(r - 1, p + 1, n)
        z2 = self._z(r - 1, p - r + 1, n - 1)
        return z1.sum(z2.image(self.fc.c.diff(n - 1)))

    def _compute_page(self, r: int):
        c = self.fc.c
        dims: dict[tuple[int, int], int] = {}
        reps: dict[tuple[int, int], Mat] = {}
        for n in c.degrees():
            for p in range(self.p_min, self.p_max + 1):
                z = self._z(r, p, n)
                b = self._b(r, p, n)
                k = z.dim - b.dim
                if k > 0:
                    dims[(p, n - p)] = k
                    reps[(p, n - p)] = z.quotient_basis(b)
        self.pages[r] = dims
        diffs: dict[tuple[int, int], Mat] = {}
        for (p, q), rep in reps.items():
            tgt = (p + r, q - r + 1)
            if tgt not in dims:
                continue
            n = p + q
            zt = self._z(r, p + r, n + 1)
            bt = self._b(r, p + r, n + 1)
            m = Mat.zeros(c.field, dims[tgt], dims[(p, q)])
            nonzero = False
            for j, row in enumerate(rep.data):
                col = zt.quotient_coords(bt, c.diff(n).apply(row))
                for i, v in enumerate(col):
                    m.data[i][j] = v
                    if v != c.field.zero:
                        nonzero = True
            if nonzero:
                diffs[(p, q)] = m
        self.differentials[r] = diffs

    def page(self, r: int) -> dict[tuple[int, int], int]:
        if r > self.stable_page:
            r = self.stable_page
        if r < 0:
            raise ComplexError("no negative pages")
        return self.pages[r]

    def differential(self, r: int, p: int, q: int) -> Mat:
        dims = self.page(r)
        rows = dims.get((p + r, q - r + 1), 0)
        cols = dims.get((p, q), 0)
        m = self.differentials.get(r, {}).get((p, q))
        return m if m is not None else Mat.zeros(self.fc.c.field, rows, cols)

    def e_infinity(self) -> dict[tuple[int, int], int]:
        return self.pages[self.stable_page]


def level_preserving(f: ChainMap, fs: FilteredComplex, ft: FilteredComplex) -> bool:
    """Does f carry every filtration level of the source into the target's?"""
    lo = min(fs.lo, ft.lo)
    hi = max(fs.hi, ft.hi)
    for p in range(lo, hi + 1):
        for n in f.source.degrees():
            tgt = ft.subspace(p, n)
            for row in fs.subspace(p, n).basis.data:
                if not tgt.contains_vec(f.block(n).apply(row)):
                    return False
    return True


def filtered_cone(f: ChainMap, fs: FilteredComplex, ft: FilteredComplex) -> FilteredComplex:
    """cone(f) filtered levelwise: level p = target level p (+) source level p."""
    if not level_preserving(f, fs, ft):
        raise ComplexError("map does not preserve filtration levels")
    co = cone(f)
    k = co.field
    lo = min(fs.lo, ft.lo)
    hi = max(fs.hi, ft.hi)
    levels = {}
    for p in range(lo, hi + 1):
        chain = {}
        for n in co.degrees():
            td = f.target.dim(n)
            sd = f.source.dim(n + 1)
            rows = []
            for row in ft.subspace(p, n).basis.data:
                rows.append(list(row) + [k.zero] * sd)
            for row in fs.subspace(p, n + 1).basis.data:
                rows.append([k.zero] * td + list(row))
            chain[n] = Subspace.from_rows(k, co.dim(n), rows)
        levels[p] = chain
    return FilteredComplex(co, levels, lo, hi, check=False)


def graded_map(f: ChainMap, fs: FilteredComplex, ft: FilteredComplex, p: int) -> ChainMap:
    """The induced map on level-p graded pieces of a level-preserving map."""
    gs = fs.graded_piece(p)
    gt = ft.graded_piece(p)
    blocks = {}
    for n in gs.dims:
        upper = ft.subspace(p, n)
        lower = ft.subspace(p - 1, n)
        reps = fs.subspace(p, n).quotient_basis(fs.subspace(p - 1, n))
        m = Mat.zeros(f.source.field, gt.dim(n), gs.dim(n))
        for j, row in enumerate(reps.data):
            col = upper.quotient_coords(lower, f.block(n).apply(row))
            for i, v in enumerate(col):
                m.data[i][j] = v
        blocks[n] = m
    return ChainMap(gs, gt, blocks, check=False)


def filtered_quasi_iso(f: ChainMap, fs: FilteredComplex, ft: FilteredComplex) -> bool:
    """Level preserving and a quasi-iso on every graded piece."""
    if not level_preserving(f, fs, ft):
        return False
    lo = min(fs.lo, ft.lo)
    hi = max(fs.hi, ft.hi)
    return all(graded_map(f, fs, ft, p).is_quasi_iso() for p in range(lo, hi + 1))


def filtered_hom_subcomplex(fs: FilteredComplex, ft: FilteredComplex) -> Complex:
    """Subcomplex of hom(C, D) of maps preserving every filtration level.

    H^0 counts level-preserving chain maps modulo level-preserving homotopies.
    """
    c, d = fs.c, ft.c
    h = hom_complex(c, d)
    field = c.field
    lo = min(fs.lo, ft.lo)
    hi = max(fs.hi, ft.hi)
    chain = {}
    for n in h.degrees():
        rows = []
        for p in range(lo, hi + 1):
            for k in hom_blocks(c, d, n):
                tgt = ft.subspace(p, k + n)
                if tgt.dim == d.dim(k + n):
                    continue
                ann = tgt.annihilator_matrix()
                src = fs.subspace(p, k)
                off = hom_offset(c, d, n, k)
                for v in src.basis.data:
                    for a in range(d.dim(k + n)):
                        row = [field.zero] * h.dim(n)
                        for cc in range(d.dim(k + n)):
                            coef = ann.data[a][cc]
                            if coef == field.zero:
                                continue
                            for bcol in range(c.dim(k)):
                                if v[bcol] != field.zero:
                                    row[off + cc * c.dim(k) + bcol] = \
                                        field.mul(coef, v[bcol])
                        rows.append(row)
        m = Mat(field, rows, cols=h.dim(n)) if rows else Mat.zeros(field, 0, h.dim(n))
        chain[n] = kernel_basis(m)
    return subcomplex(h, chain)[0]


def filtered_hom_classes(fs: FilteredComplex, ft: FilteredComplex) -> int:
    return filtered_hom_subcomplex(fs, ft).cohomology(0)[0]


def is_truncation_tower(fc: FilteredComplex) -> bool:
    """Is each level a connective cover: H^n(level j) -> H^n iso for n <= j,
    H^n(level j) = 0 above, with graded pieces H^j in degree j?"""
    c = fc.c
    h = c.h_dims()
    for j in range(fc.lo, fc.hi + 1):
        sub, incl = subcomplex(c, fc.level(j))
        sub_h = sub.h_dims()
        for n in c.degrees():
            if n > j:
                if sub_h.get(n, 0) != 0:
                    return False
            else:
                if sub_h.get(n, 0) != h.get(n, 0):
                    return False
                if incl.induced_cohomology_map(n).rank() != h.get(n, 0):
                    return False
        expect = {j: h[j]} if h.get(j) else {}
        if fc.graded_piece(j).h_dims() != expect:
            return False
    return True


def diagonal_connective_cover(fc: FilteredComplex) -> FilteredComplex:
    """Truncate level j at degree j: new level j = tau^{<=j}(level j).

    Applied to the reindexed form of a decreasing filtration this picks out,
    in each level, the part that is connective in the matching degree range.
    """
    c = fc.c
    if not c.dims:
        return FilteredComplex.concentrated(c, fc.lo)
    s_lo, s_hi = c.support
    lo = max(s_lo, fc.lo)
    hi = max(fc.hi, s_hi)
    levels = {}
    for j in range(lo, hi + 1):
        chain = {}
        for n in c.degrees():
            if n < j:
                chain[n] = fc.subspace(j, n)
            elif n == j:
                chain[n] = fc.subspace(j, n).intersection(c.cocycles(n))
            else:
                chain[n] = Subspace.zero(c.field, c.dim(n))
        levels[j] = chain
    return FilteredComplex(c, levels, lo, hi, check=False).normalize()
