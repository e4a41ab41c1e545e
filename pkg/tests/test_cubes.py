from itertools import permutations

from logweight.exactalg import GF, Mat, QQ, Subspace
from logweight.complexes import ChainMap, Complex, ComplexError, smart_truncate, tensor_complex
from logweight.cubes import (
    CubeDiagram, CubeMap, LatticeDiagram, PosetPairing, axes_set, bitmask,
    cube_direct_sum, cube_shift, cube_unshift, subsets, total_cofiber, total_fiber,
)

from test_complexes import block_complex, interval, three_term


def free_cube(field, r, support, c):
    """c at every subset containing `support`, zero elsewhere."""
    support = frozenset(support)
    zero = Complex.zero(field)
    verts = {s: (c if support <= s else zero) for s in subsets(r)}
    edges = {}
    for s in subsets(r):
        for i in axes_set(r) - s:
            if support <= s:
                edges[(s, i)] = ChainMap.identity(c)
            else:
                edges[(s, i)] = ChainMap.zero(verts[s], verts[s | {i}])
    return CubeDiagram(r, verts, edges)


def scalar_cube(field, r, c, scalars):
    """c everywhere, axis i acting by the scalar scalars[i-1]."""
    verts = {s: c for s in subsets(r)}
    edges = {}
    for s in subsets(r):
        for i in axes_set(r) - s:
            blocks = {n: Mat.identity(field, k).scale(scalars[i - 1])
                      for n, k in c.dims.items()}
            edges[(s, i)] = ChainMap(c, c, blocks, check=False)
    return CubeDiagram(r, verts, edges)


def scalar_complex(field, value):
    """cone of multiplication by value on the point: k -> k in degrees -1, 0."""
    return Complex(field, {-1: 1, 0: 1}, {-1: Mat(field, [[value]])})


def test_free_cube_total_cofiber():
    c = three_term()
    for r in (1, 2, 3):
        full = free_cube(QQ, r, axes_set(r), c)
        assert total_cofiber(full).h_dims() == c.h_dims()
        assert total_fiber(full).h_dims() == {n + r: h for n, h in c.h_dims().items()}
        partial = free_cube(QQ, r, axes_set(r) - {1}, c)
        assert total_cofiber(partial).is_acyclic()
        assert total_fiber(partial).is_acyclic()


def test_identity_axis_forces_acyclic():
    c = block_complex(GF(5), [("point", 0), ("interval", 1)])
    cube = scalar_cube(GF(5), 2, c, [1, 3])
    assert total_cofiber(cube).is_acyclic()
    assert total_fiber(cube).is_acyclic()


def test_scalar_cube_matches_koszul_tensor_oracle():
    for field, scalars in [(QQ, [0, 0]), (GF(2), [2, 1]), (GF(3), [3, 3])]:
        c = block_complex(field, [("point", 0), ("point", 2), ("interval", 0)])
        cube = scalar_cube(field, 2, c, scalars)
        expected = c
        for v in scalars:
            expected = tensor_complex(expected, scalar_complex(field, v))
        assert total_cofiber(cube).h_dims() == expected.h_dims()


def test_total_cofiber_axis_permutation_invariance():
    c1 = free_cube(QQ, 3, {1, 2, 3}, three_term())
    c2 = free_cube(QQ, 3, {2}, Complex.point(QQ, 1))
    c3 = scalar_cube(QQ, 3, Complex.point(QQ), [0, 1, 0])
    cube = cube_direct_sum(cube_direct_sum(c1, c2), c3)
    cube._validate()
    base_co = total_cofiber(cube).h_dims()
    base_fi = total_fiber(cube).h_dims()
    for perm in permutations([1, 2, 3]):
        sigma = {i + 1: perm[i] for i in range(3)}
        moved = cube.permute_axes(sigma)
        assert total_cofiber(moved).h_dims() == base_co
        assert total_fiber(moved).h_dims() == base_fi


def sample_cubes():
    yield free_cube(QQ, 1, {1}, three_term())
    yield scalar_cube(GF(2), 2, block_complex(GF(2), [("point", 0), ("interval", 0)]),
                      [2, 1])
    yield cube_direct_sum(free_cube(QQ, 2, {1, 2}, three_term()),
                          free_cube(QQ, 2, set(), Complex.point(QQ, 1)))
    yield free_cube(QQ, 3, {1, 3}, interval(QQ, 0))


def test_cube_shift_initial_is_total_fiber():
    for cube in sample_cubes():
        sh = cube_shift(cube)
        sh._validate()
        assert sh.initial == total_fiber(cube)
        assert total_cofiber(sh).h_dims() == cube.terminal.h_dims()


def test_cube_unshift_terminal_is_total_cofiber():
    for cube in sample_cubes():
        un = cube_unshift(cube)
        un._validate()
        assert un.terminal == total_cofiber(cube)
        assert un.initial == cube.terminal


def test_shift_unshift_degree_relation():
    for cube in sample_cubes():
        r = cube.r
        fib_h = total_fiber(cube).h_dims()
        cof_h = total_cofiber(cube).h_dims()
        assert fib_h == {n + r: h for n, h in cof_h.items()}


def test_cube_validation_catches_bad_faces():
    c = Complex.point(QQ)
    verts = {s: c for s in subsets(2)}
    edges = {}
    for s in subsets(2):
        for i in axes_set(2) - s:
            val = 2 if (s, i) == (frozenset(), 1) else 1
            edges[(s, i)] = ChainMap(c, c, {0: Mat(QQ, [[val]])})
    try:
        CubeDiagram(2, verts, edges)
        assert False, "expected ComplexError"
    except ComplexError:
        pass


def two_line_lattice(field=QQ):
    """Two transversal lines in the plane, everything in degree 0."""
    amb = Complex(field, {0: 2}, {})
    chains = {
        frozenset(): {0: Subspace.zero(field, 2)},
        frozenset({1}): {0: Subspace.from_rows(field, 2, [[1, 0]])},
        frozenset({2}): {0: Subspace.from_rows(field, 2, [[0, 1]])},
        frozenset({1, 2}): {0: Subspace.full(field, 2)},
    }
    return LatticeDiagram(amb, 2, chains)


def test_lattice_positions_and_exactness():
    lat = two_line_lattice()
    assert lat.check_exact_columns()
    assert lat.position((-1, -1)).total_dim() == 0
    assert lat.position((0, -1)).total_dim() == 1
    assert lat.position((0, 0)).total_dim() == 2
    assert lat.position((1, 0)).total_dim() == 1
    assert lat.position((1, 1)).total_dim() == 0


def test_lattice_detects_non_transversal_chains():
    field = QQ
    amb = Complex(field, {0: 2}, {})
    line = {0: Subspace.from_rows(field, 2, [[1, 0]])}
    chains = {
        frozenset(): {0: Subspace.zero(field, 2)},
        frozenset({1}): dict(line),
        frozenset({2}): dict(line),
        frozenset({1, 2}): {0: Subspace.full(field, 2)},
    }
    lat = LatticeDiagram(amb, 2, chains)
    assert not lat.check_exact_columns()


def test_lattice_restriction_matches_cube_unshift():
    c = three_term()
    chains = {
        frozenset(): smart_truncate(c, 0),
        frozenset({1}): {n: Subspace.full(QQ, c.dim(n)) for n in c.degrees()},
    }
    lat = LatticeDiagram(c, 1, chains)
    assert lat.check_exact_columns()
    restricted = lat.restrict_unshift()
    restricted._validate()
    unshifted = cube_unshift(lat.input_cube())
    for s in subsets(1):
        assert restricted.vertex(s).h_dims() == unshifted.vertex(s).h_dims()

    lat2 = two_line_lattice()
    restricted2 = lat2.restrict_unshift()
    restricted2._validate()
    unshifted2 = cube_unshift(lat2.input_cube())
    for s in subsets(2):
        assert restricted2.vertex(s).h_dims() == unshifted2.vertex(s).h_dims()


def test_cube_to_dict_uses_bitmask_keys():
    cube = free_cube(QQ, 2, {1, 2}, Complex.point(QQ))
    d = cube.to_dict()
    assert d["r"] == 2
    assert set(d["vertices"]) == {"0", "1", "2", "3"}
    assert d["vertices"]["3"]["h"] == {"0": 1}
    assert d["vertices"]["0"]["h"] == {}


def chain_pairing_example(field=QQ):
    """Two-element chain 0 <= 1 with interval complexes and a closed pairing."""
    c = interval(field, 0)
    els = [0, 1]
    leq = lambda a, b: a <= b
    F = {0: c, 1: c}
    G = {0: c, 1: c}
    ident = ChainMap.identity(c)
    f_maps = {(0, 1): ident}
    g_maps = {(0, 1): ident}
    m0 = Mat(field, [[1]])
    m1 = Mat(field, [[-1]])
    pairings = {(a, b): {0: m0, 1: m1} for a in els for b in els if a <= b}
    return PosetPairing(els, leq, F, f_maps, G, g_maps, pairings, degree=1)


def test_poset_pairing_validates_and_is_perfect_on_acyclics():
    pp = chain_pairing_example()
    pt = pp.dual_transformation(0)
    assert pt.source.h_dims() == {} and pt.target.h_dims() == {}
    assert pp.perfect()


def test_poset_pairing_point_case():
    field = QQ
    p = Complex.point(field)
    els = [0]
    pp = PosetPairing(els, lambda a, b: True, {0: p}, {}, {0: p}, {},
                      {(0, 0): {0: Mat(field, [[1]])}}, degree=0)
    assert pp.perfect()
    zero = PosetPairing(els, lambda a, b: True, {0: p}, {}, {0: p}, {},
                        {}, degree=0)
    assert not zero.perfect()


def test_poset_pairing_rejects_unclosed_matrix():
    field = QQ
    c = interval(field, 0)
    try:
        PosetPairing([0], lambda a, b: True, {0: c}, {}, {0: c}, {},
                     {(0, 0): {0: Mat(field, [[1]]), 1: Mat(field, [[1]])}},
                     degree=1)
        assert False, "expected ComplexError"
    except ComplexError:
        pass


def test_poset_pairing_naturality_violation():
    field = QQ
    p = Complex.point(field)
    els = [0, 1]
    double = ChainMap(p, p, {0: Mat(field, [[2]])})
    pairings = {(a, b): {0: Mat(field, [[1]])} for a in els for b in els if a <= b}
    try:
        PosetPairing(els, lambda a, b: a <= b, {0: p, 1: p}, {(0, 1): double},
                     {0: p, 1: p}, {(0, 1): ChainMap.identity(p)},
                     pairings, degree=0)
        assert False, "expected ComplexError"
    except ComplexError:
        pass
