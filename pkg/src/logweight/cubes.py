"""Cubical diagrams of complexes and their total (co)fibers.

A cube of dimension r is a covariant diagram on the subsets of {1..r}:
one complex per subset and one edge map per (subset, missing axis). Total
cofibers and fibers are computed by collapsing axes in ascending order,
taking a cone or fiber at each step.

cube_shift trades the initial vertex for a total fiber (axis by axis);
cube_unshift is the mirror construction with cones. They are inverse to
each other up to quasi-isomorphism and shift.
"""

from __future__ import annotations

from itertools import combinations

from .exactalg import Mat, Subspace
from .complexes import (
    ChainMap, Complex, ComplexError, cone, cone_inclusion, cone_map,
    direct_sum_map, fib, fib_map, fib_projection, subcomplex, subquotient,
)


def axes_set(r: int) -> frozenset:
    return frozenset(range(1, r + 1))


def maps_equal(x: ChainMap, y: ChainMap) -> bool:
    return all(x.block(n) == y.block(n) for n in set(x.blocks) | set(y.blocks))


def subsets(r: int):
    base = sorted(axes_set(r))
    for k in range(r + 1):
        for combo in combinations(base, k):
            yield frozenset(combo)


def bitmask(subset: frozenset) -> int:
    return sum(1 << (i - 1) for i in subset)


class CubeDiagram:
    """A covariant diagram of complexes on the subsets of {1..r}."""

    def __init__(self, r: int, vertices: dict[frozenset, Complex],
                 edges: dict[tuple[frozenset, int], ChainMap], check: bool = True):
        self.r = r
        self.vertices = dict(vertices)
        self.edges = dict(edges)
        if check:
            self._validate()

    def _validate(self):
        for s in subsets(self.r):
            if s not in self.vertices:
                raise ComplexError(f"missing vertex {sorted(s)}")
        for s in subsets(self.r):
            for i in axes_set(self.r) - s:
                e = self.edges.get((s, i))
                if e is None:
                    raise ComplexError(f"missing edge {sorted(s)} -> axis {i}")
                if e.source != self.vertices[s] or e.target != self.vertices[s | {i}]:
                    raise ComplexError(f"edge {sorted(s)} axis {i} has wrong ends")
        for s in subsets(self.r):
            for i, j in combinations(sorted(axes_set(self.r) - s), 2):
                left = self.edge(s | {i}, j).compose(self.edge(s, i))
                right = self.edge(s | {j}, i).compose(self.edge(s, j))
                if not maps_equal(left, right):
                    raise ComplexError(
                        f"face at {sorted(s)} axes {i},{j} does not commute")

    def vertex(self, subset) -> Complex:
        return self.vertices[frozenset(subset)]

    def edge(self, subset, axis: int) -> ChainMap:
        return self.edges[(frozenset(subset), axis)]

    @property
    def initial(self) -> Complex:
        return self.vertices[frozenset()]

    @property
    def terminal(self) -> Complex:
        return self.vertices[axes_set(self.r)]

    def _relabel(self, axis: int):
        """Old axis -> new label once `axis` is removed."""
        rest = sorted(axes_set(self.r) - {axis})
        return {old: new + 1 for new, old in enumerate(rest)}

    def face(self, axis: int, bit: int) -> "CubeDiagram":
        """The (r-1)-cube at a fixed coordinate of one axis, axes relabeled."""
        lab = self._relabel(axis)
        inv = {v: k for k, v in lab.items()}
        fixed = {axis} if bit else frozenset()
        verts = {}
        edges = {}
        for s in subsets(self.r - 1):
            old = frozenset(inv[i] for i in s) | fixed
            verts[s] = self.vertices[old]
            for i in axes_set(self.r - 1) - s:
                edges[(s, i)] = self.edge(old, inv[i])
        return CubeDiagram(self.r - 1, verts, edges, check=False)

    def edge_transformation(self, axis: int) -> "CubeMap":
        """The axis viewed as a map of (r-1)-cubes, face 0 to face 1."""
        lab = self._relabel(axis)
        inv = {v: k for k, v in lab.items()}
        comps = {}
        for s in subsets(self.r - 1):
            old = frozenset(inv[i] for i in s)
            comps[s] = self.edge(old, axis)
        return CubeMap(self.face(axis, 0), self.face(axis, 1), comps, check=False)

    def permute_axes(self, sigma: dict[int, int]) -> "CubeDiagram":
        verts = {}
        edges = {}
        for s in subsets(self.r):
            image = frozenset(sigma[i] for i in s)
            verts[image] = self.vertices[s]
            for i in axes_set(self.r) - s:
                edges[(image, sigma[i])] = self.edges[(s, i)]
        return CubeDiagram(self.r, verts, edges, check=False)

    def to_dict(self) -> dict:
        out = {"r": self.r, "vertices": {}}
        for s in subsets(self.r):
            c = self.vertices[s]
            out["vertices"][str(bitmask(s))] = {
                "dims": {str(n): k for n, k in sorted(c.dims.items())},
                "h": {str(n): k for n, k in sorted(c.h_dims().items())},
            }
        return out


class CubeMap:
    """A map of r-cubes: one chain map per subset, commuting with edges."""

    def __init__(self, source: CubeDiagram, target: CubeDiagram,
                 components: dict[frozenset, ChainMap], check: bool = True):
        self.source = source
        self.target = target
        self.components = dict(components)
        if check:
            self._validate()

    def _validate(self):
        r = self.source.r
        if self.target.r != r:
            raise ComplexError("cube dimension mismatch")
        for s in subsets(r):
            if s not in self.components:
                raise ComplexError(f"missing component {sorted(s)}")
        for s in subsets(r):
            for i in axes_set(r) - s:
                left = self.component(s | {i}).compose(self.source.edge(s, i))
                right = self.target.edge(s, i).compose(self.component(s))
                if not maps_equal(left, right):
                    raise ComplexError(
                        f"cube map square at {sorted(s)} axis {i} fails")

    def component(self, subset) -> ChainMap:
        return self.components[frozenset(subset)]

    def face(self, axis: int, bit: int) -> "CubeMap":
        lab = self.source._relabel(axis)
        inv = {v: k for k, v in lab.items()}
        fixed = {axis} if bit else frozenset()
        comps = {}
        for s in subsets(self.source.r - 1):
            old = frozenset(inv[i] for i in s) | fixed
            comps[s] = self.components[old]
        return CubeMap(self.source.face(axis, bit), self.target.face(axis, bit),
                       comps, check=False)


def glue(face0: CubeDiagram, face1: CubeDiagram,
         axis_edges: dict[frozenset, ChainMap]) -> CubeDiagram:
    """Assemble an (r+1)-cube with the new axis first; face axes move up by 1."""
    r = face0.r
    verts = {}
    edges = {}
    for s in subsets(r):
        up = frozenset(i + 1 for i in s)
        verts[up] = face0.vertices[s]
        verts[up | {1}] = face1.vertices[s]
        edges[(up, 1)] = axis_edges[s]
        for i in axes_set(r) - s:
            edges[(up, i + 1)] = face0.edges[(s, i)]
            edges[(up | {1}, i + 1)] = face1.edges[(s, i)]
    return CubeDiagram(r + 1, verts, edges, check=False)


def cube_direct_sum(c1: CubeDiagram, c2: CubeDiagram) -> CubeDiagram:
    if c1.r != c2.r:
        raise ComplexError("cube dimension mismatch")
    verts = {s: c1.vertices[s].direct_sum(c2.vertices[s]) for s in subsets(c1.r)}
    edges = {}
    for s in subsets(c1.r):
        for i in axes_set(c1.r) - s:
            edges[(s, i)] = direct_sum_map(c1.edges[(s, i)], c2.edges[(s, i)])
    return CubeDiagram(c1.r, verts, edges, check=False)


def conecube(cm: CubeMap) -> CubeDiagram:
    """Vertexwise cone of a map of cubes, with the induced edge maps."""
    r = cm.source.r
    verts = {s: cone(cm.component(s)) for s in subsets(r)}
    edges = {}
    for s in subsets(r):
        for i in axes_set(r) - s:
            edges[(s, i)] = cone_map(cm.component(s), cm.component(s | {i}),
                                     cm.source.edge(s, i), cm.target.edge(s, i))
    return CubeDiagram(r, verts, edges, check=False)


def fibcube(cm: CubeMap) -> CubeDiagram:
    r = cm.source.r
    verts = {s: fib(cm.component(s)) for s in subsets(r)}
    edges = {}
    for s in subsets(r):
        for i in axes_set(r) - s:
            edges[(s, i)] = fib_map(cm.component(s), cm.component(s | {i}),
                                    cm.source.edge(s, i), cm.target.edge(s, i))
    return CubeDiagram(r, verts, edges, check=False)


def conecube_map(f: CubeMap, g: CubeMap, a: CubeMap, b: CubeMap) -> CubeMap:
    """conecube functoriality for a commuting square of cube maps."""
    comps = {}
    for s in subsets(f.source.r):
        comps[s] = cone_map(f.component(s), g.component(s),
                            a.component(s), b.component(s))
    return CubeMap(conecube(f), conecube(g), comps, check=False)


def fibcube_map(f: CubeMap, g: CubeMap, a: CubeMap, b: CubeMap) -> CubeMap:
    comps = {}
    for s in subsets(f.source.r):
        comps[s] = fib_map(f.component(s), g.component(s),
                           a.component(s), b.component(s))
    return CubeMap(fibcube(f), fibcube(g), comps, check=False)


def total_cofiber(cube: CubeDiagram) -> Complex:
    """Iterated cone over the axes in ascending order."""
    if cube.r == 0:
        return cube.initial
    return cone(total_cofiber_map(cube.edge_transformation(1)))


def total_cofiber_map(cm: CubeMap) -> ChainMap:
    if cm.source.r == 0:
        return cm.component(frozenset())
    f = total_cofiber_map(cm.source.edge_transformation(1))
    g = total_cofiber_map(cm.target.edge_transformation(1))
    a = total_cofiber_map(cm.face(1, 0))
    b = total_cofiber_map(cm.face(1, 1))
    return cone_map(f, g, a, b)


def total_fiber(cube: CubeDiagram) -> Complex:
    """Iterated fiber over the axes in ascending order."""
    if cube.r == 0:
        return cube.initial
    return fib(total_fiber_map(cube.edge_transformation(1)))


def total_fiber_map(cm: CubeMap) -> ChainMap:
    if cm.source.r == 0:
        return cm.component(frozenset())
    f = total_fiber_map(cm.source.edge_transformation(1))
    g = total_fiber_map(cm.target.edge_transformation(1))
    a = total_fiber_map(cm.face(1, 0))
    b = total_fiber_map(cm.face(1, 1))
    return fib_map(f, g, a, b)


def cube_shift(cube: CubeDiagram) -> CubeDiagram:
    """Replace the with-axis faces by fibers, one axis at a time.

    The initial vertex of the result is the total fiber of the input and the
    total cofiber of the result matches the terminal vertex of the input.
    """
    if cube.r == 0:
        return cube
    eta = cube.edge_transformation(1)
    sh_eta = cube_shift_map(eta)
    face0 = fibcube(sh_eta)
    face1 = cube_shift(cube.face(1, 0))
    axis_edges = {s: fib_projection(sh_eta.component(s))
                  for s in subsets(cube.r - 1)}
    return glue(face0, face1, axis_edges)


def cube_shift_map(cm: CubeMap) -> CubeMap:
    if cm.source.r == 0:
        return cm
    eta_s = cm.source.edge_transformation(1)
    eta_t = cm.target.edge_transformation(1)
    a = cube_shift_map(cm.face(1, 0))
    b = cube_shift_map(cm.face(1, 1))
    f0 = fibcube_map(cube_shift_map(eta_s), cube_shift_map(eta_t), a, b)
    comps = {}
    r1 = cm.source.r - 1
    for s in subsets(r1):
        up = frozenset(i + 1 for i in s)
        comps[up] = f0.component(s)
        comps[up | {1}] = a.component(s)
    return CubeMap(cube_shift(cm.source), cube_shift(cm.target), comps, check=False)


def cube_unshift(cube: CubeDiagram) -> CubeDiagram:
    """Mirror of cube_shift: replace the without-axis faces by cones."""
    if cube.r == 0:
        return cube
    eta = cube.edge_transformation(1)
    un_eta = cube_unshift_map(eta)
    face0 = cube_unshift(cube.face(1, 1))
    face1 = conecube(un_eta)
    axis_edges = {s: cone_inclusion(un_eta.component(s))
                  for s in subsets(cube.r - 1)}
    return glue(face0, face1, axis_edges)


def cube_unshift_map(cm: CubeMap) -> CubeMap:
    if cm.source.r == 0:
        return cm
    eta_s = cm.source.edge_transformation(1)
    eta_t = cm.target.edge_transformation(1)
    a = cube_unshift_map(cm.face(1, 0))
    b = cube_unshift_map(cm.face(1, 1))
    f1 = conecube_map(cube_unshift_map(eta_s), cube_unshift_map(eta_t), a, b)
    comps = {}
    r1 = cm.source.r - 1
    for s in subsets(r1):
        up = frozenset(i + 1 for i in s)
        comps[up] = b.component(s)
        comps[up | {1}] = f1.component(s)
    return CubeMap(cube_unshift(cm.source), cube_unshift(cm.target), comps,
                   check=False)


def inclusion_map(ambient: Complex, small: dict[int, Subspace],
                  big: dict[int, Subspace]) -> ChainMap:
    """The map between subcomplexes induced by a containment of chains."""
    sub_s, _ = subcomplex(ambient, small)
    sub_b, _ = subcomplex(ambient, big)
    blocks = {}
    for n in sub_s.dims:
        m = Mat.zeros(ambient.field, sub_b.dim(n), sub_s.dim(n))
        for j, row in enumerate(small[n].basis.data):
            col = big[n].coords(row)
            for i, v in enumerate(col):
                m.data[i][j] = v
        blocks[n] = m
    return ChainMap(sub_s, sub_b, blocks, check=False)


def subquotient_map(ambient: Complex, upper: dict[int, Subspace],
                    lower_small: dict[int, Subspace],
                    lower_big: dict[int, Subspace]) -> ChainMap:
    """upper/lower_small -> upper/lower_big for nested lower chains."""
    qs = subquotient(ambient, upper, lower_small)
    qb = subquotient(ambient, upper, lower_big)
    blocks = {}
    for n in qs.dims:
        reps = upper[n].quotient_basis(lower_small[n])
        m = Mat.zeros(ambient.field, qb.dim(n), qs.dim(n))
        for j, row in enumerate(reps.data):
            col = upper[n].quotient_coords(lower_big[n], row)
            for i, v in enumerate(col):
                m.data[i][j] = v
        blocks[n] = m
    return ChainMap(qs, qb, blocks, check=False)


def sum_chains(ambient: Complex, chains) -> dict[int, Subspace]:
    out = {n: Subspace.zero(ambient.field, ambient.dim(n))
           for n in ambient.degrees()}
    for ch in chains:
        for n in ambient.degrees():
            out[n] = out[n].sum(ch[n])
    return out


class LatticeDiagram:
    """A cube of subcomplexes extended by quotients to {-1, 0, 1} coordinates.

    The input is a monotone family of d-closed subspace chains S_I of one
    ambient complex, indexed by subsets of {1..r}. A lattice position x puts
    axis i "at -1" (drop i), "at 0" (keep i), or "at 1" (quotient by the
    chain without i). Exactness of every axis line encodes that the chains
    intersect transversally: S_{Z-i} meets a sum of S_{Z-j} in the expected
    smaller sum.
    """

    def __init__(self, ambient: Complex, r: int,
                 chains: dict[frozenset, dict[int, Subspace]], check: bool = True):
        self.ambient = ambient
        self.r = r
        self.chains = {frozenset(k): dict(v) for k, v in chains.items()}
        if check:
            self._validate()

    def _validate(self):
        from .complexes import check_d_closed
        for s in subsets(self.r):
            if s not in self.chains:
                raise ComplexError(f"missing chain {sorted(s)}")
            ch = self.chains[s]
            for n in self.ambient.degrees():
                if n not in ch or ch[n].ambient_dim != self.ambient.dim(n):
                    raise ComplexError(f"chain {sorted(s)} bad at degree {n}")
            if not check_d_closed(self.ambient, ch):
                raise ComplexError(f"chain {sorted(s)} not closed under d")
        for s in subsets(self.r):
            for i in axes_set(self.r) - s:
                big = self.chains[s | {i}]
                for n in self.ambient.degrees():
                    if not big[n].contains(self.chains[s][n]):
                        raise ComplexError(
                            f"chains not monotone at {sorted(s)} axis {i}")

    def chain(self, subset) -> dict[int, Subspace]:
        return self.chains[frozenset(subset)]

    def position(self, coords: tuple[int, ...]) -> Complex:
        """The complex at a lattice position in {-1, 0, 1}^r."""
        z = frozenset(i + 1 for i, x in enumerate(coords) if x >= 0)
        ones = [i + 1 for i, x in enumerate(coords) if x == 1]
        upper = self.chain(z)
        lower = sum_chains(self.ambient, [self.chain(z - {i}) for i in ones])
        return subquotient(self.ambient, upper, lower)

    def check_exact_columns(self) -> bool:
        """Degreewise exactness of every axis line through the lattice."""
        for z in subsets(self.r):
            for i in sorted(z):
                for osize in range(len(z)):
                    for combo in combinations(sorted(z - {i}), osize):
                        o = frozenset(combo)
                        if not o:
                            continue
                        left = sum_chains(self.ambient,
                                          [self.chain(z - {j}) for j in o])
                        small = sum_chains(self.ambient,
                                           [self.chain(z - {i} - {j}) for j in o])
                        zi = self.chain(z - {i})
                        for n in self.ambient.degrees():
                            meet = zi[n].intersection(left[n])
                            if meet != small[n]:
                                return False
        return True

    def input_cube(self) -> CubeDiagram:
        """The cube of subcomplexes at coordinates in {-1, 0}."""
        verts = {}
        edges = {}
        for s in subsets(self.r):
            verts[s] = subcomplex(self.ambient, self.chain(s))[0]
            for i in axes_set(self.r) - s:
                edges[(s, i)] = inclusion_map(self.ambient, self.chain(s),
                                              self.chain(s | {i}))
        return CubeDiagram(self.r, verts, edges, check=False)

    def restrict_unshift(self) -> CubeDiagram:
        """The {0, 1}-restriction: quotients of the full chain by sub-sums."""
        full = self.chain(axes_set(self.r))
        verts = {}
        edges = {}
        for s in subsets(self.r):
            lower = sum_chains(self.ambient,
                               [self.chain(axes_set(self.r) - {i}) for i in s])
            verts[s] = subquotient(self.ambient, full, lower)
        for s in subsets(self.r):
            for i in axes_set(self.r) - s:
                lo_s = sum_chains(self.ambient,
                                  [self.chain(axes_set(self.r) - {j}) for j in s])
                lo_b = sum_chains(self.ambient,
                                  [self.chain(axes_set(self.r) - {j})
                                   for j in (s | {i})])
                edges[(s, i)] = subquotient_map(self.ambient, full, lo_s, lo_b)
        return CubeDiagram(self.r, verts, edges, check=False)


class PosetPairing:
    """Pairings between a covariant and a contravariant family on a poset.

    F is covariant (maps go up), G is contravariant (maps go down). For every
    related pair a <= b there is a bilinear pairing F(a)^m x G(b)^{D-m} -> k,
    stored as one matrix per degree m. The pairing must be closed under the
    differentials; moving the left argument up and the right argument down
    must preserve values. On the diagonal the pairing curries to a chain map
    F(a) -> dual(G(a))[-D]; the pairing is perfect when these are all
    quasi-isomorphisms.
    """

    def __init__(self, elements: list, leq, F: dict, f_maps: dict,
                 G: dict, g_maps: dict, pairings: dict, degree: int,
                 check: bool = True):
        self.elements = list(elements)
        self.leq = leq
        self.F = F
        self.f_maps = f_maps
        self.G = G
        self.g_maps = g_maps
        self.pairings = pairings
        self.degree = degree
        if check:
            self.validate()

    def related(self):
        for a in self.elements:
            for b in self.elements:
                if self.leq(a, b):
                    yield a, b

    def f_map(self, a, b) -> ChainMap:
        if a == b:
            return ChainMap.identity(self.F[a])
        return self.f_maps[(a, b)]

    def g_map(self, a, b) -> ChainMap:
        """G(b) -> G(a) for a <= b."""
        if a == b:
            return ChainMap.identity(self.G[a])
        return self.g_maps[(a, b)]

    def pairing_matrix(self, a, b, m: int) -> Mat:
        fa, gb = self.F[a], self.G[b]
        stored = self.pairings.get((a, b), {}).get(m)
        if stored is not None:
            return stored
        return Mat.zeros(fa.field, fa.dim(m), gb.dim(self.degree - m))

    def validate(self):
        for a, b in self.related():
            if a == b:
                continue
            f = self.f_maps.get((a, b))
            if f is None or f.source != self.F[a] or f.target != self.F[b]:
                raise ComplexError(f"bad covariant map {a} -> {b}")
            g = self.g_maps.get((a, b))
            if g is None or g.source != self.G[b] or g.target != self.G[a]:
                raise ComplexError(f"bad contravariant map {b} -> {a}")
        for a, b in self.related():
            for c in self.elements:
                if a != b and b != c and self.leq(b, c):
                    left = self.f_map(b, c).compose(self.f_map(a, b))
                    if not maps_equal(left, self.f_map(a, c)):
                        raise ComplexError("covariant maps do not compose")
                    right = self.g_map(a, b).compose(self.g_map(b, c))
                    if not maps_equal(right, self.g_map(a, c)):
                        raise ComplexError("contravariant maps do not compose")
        for a, b in self.related():
            self._check_closed(a, b)
        self._check_naturality()

    def _check_closed(self, a, b):
        fa, gb = self.F[a], self.G[b]
        dd = self.degree
        for m in fa.degrees():
            if gb.dim(dd - 1 - m) == 0:
                continue
            lhs = fa.diff(m).transpose().mul(self.pairing_matrix(a, b, m + 1))
            rhs = self.pairing_matrix(a, b, m).mul(gb.diff(dd - 1 - m))
            if m % 2:
                rhs = rhs.scale(fa.field.neg(fa.field.one))
            if lhs.add(rhs) != Mat.zeros(fa.field, lhs.rows, lhs.cols):
                raise ComplexError(f"pairing ({a},{b}) not closed at degree {m}")

    def _check_naturality(self):
        for a, b in self.related():
            for a2 in self.elements:
                if a != a2 and self.leq(a, a2) and self.leq(a2, b):
                    f = self.f_map(a, a2)
                    for m in self.F[a].degrees():
                        lhs = f.block(m).transpose().mul(
                            self.pairing_matrix(a2, b, m))
                        if lhs != self.pairing_matrix(a, b, m):
                            raise ComplexError(
                                f"naturality fails moving {a}->{a2} under {b}")
            for b2 in self.elements:
                if b != b2 and self.leq(a, b2) and self.leq(b2, b):
                    g = self.g_map(b2, b)
                    for m in self.F[a].degrees():
                        lhs = self.pairing_matrix(a, b2, m).mul(
                            g.block(self.degree - m))
                        if lhs != self.pairing_matrix(a, b, m):
                            raise ComplexError(
                                f"naturality fails moving {b}->{b2} over {a}")

    def dual_transformation(self, a) -> ChainMap:
        """Curried diagonal pairing F(a) -> dual(G(a)) shifted to degree D."""
        fa, ga = self.F[a], self.G[a]
        target = ga.dual().shift(-self.degree)
        blocks = {}
        for m in fa.degrees():
            if fa.dim(m) and ga.dim(self.degree - m):
                blocks[m] = self.pairing_matrix(a, a, m).transpose()
        return ChainMap(fa, target, blocks)

    def perfect(self) -> bool:
        return all(self.dual_transformation(a).is_quasi_iso()
                   for a in self.elements)
