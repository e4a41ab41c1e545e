from collections import Counter

from hypothesis import given, settings, strategies as st

from logweight.exactalg import GF, Mat, QQ, Subspace
from logweight.complexes import (
    ChainMap, Complex, ComplexError, chain_section, cone, cone_inclusion, fib,
    fib_projection, hom_complex, quotient_complex, smart_truncate, subcomplex,
    subquotient, tensor_complex,
)


def three_term(field=QQ):
    # 0 -> k^2 -> k^2 -> k -> 0 in degrees 0..2, H concentrated in degree 0
    return Complex(field, {0: 2, 1: 2, 2: 1},
                   {0: Mat(field, [[1, 1], [0, 0]]), 1: Mat(field, [[0, 1]])})


def interval(field, deg):
    return Complex(field, {deg: 1, deg + 1: 1}, {deg: Mat(field, [[1]])})


def block_complex(field, blocks):
    c = Complex.zero(field)
    for kind, deg in blocks:
        piece = Complex.point(field, deg) if kind == "point" else interval(field, deg)
        c = c.direct_sum(piece)
    return c


def predicted_h(blocks):
    return dict(Counter(deg for kind, deg in blocks if kind == "point"))


def unipotent(field, n, entries):
    """I + strictly upper triangular, with its exact inverse."""
    g = Mat.identity(field, n)
    nil = Mat.zeros(field, n, n)
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            v = field.of(entries[k % len(entries)]) if entries else field.zero
            g.data[i][j] = v
            nil.data[i][j] = v
            k += 1
    inv = Mat.identity(field, n)
    term = Mat.identity(field, n)
    for _ in range(n):
        term = term.mul(nil).scale(field.neg(field.one))
        inv = inv.add(term)
    return g, inv


def conjugate(c, entries):
    gs, invs = {}, {}
    for n, k in c.dims.items():
        gs[n], invs[n] = unipotent(c.field, k, entries)
    d = {}
    for n in c.d:
        g_up = gs.get(n + 1, Mat.identity(c.field, c.dim(n + 1)))
        inv = invs.get(n, Mat.identity(c.field, c.dim(n)))
        d[n] = g_up.mul(c.diff(n)).mul(inv)
    cprime = Complex(c.field, dict(c.dims), d)
    return cprime, ChainMap(c, cprime, gs)


fields = st.sampled_from([QQ, GF(2), GF(5)])
block_lists = st.lists(
    st.tuples(st.sampled_from(["point", "interval"]), st.integers(-3, 3)),
    min_size=0, max_size=5)
entry_lists = st.lists(st.integers(-3, 3), min_size=1, max_size=6)


def test_three_term_cohomology_frozen():
    c = three_term()
    assert c.h_dims() == {0: 1}
    dim, reps = c.cohomology(0)
    assert dim == 1 and reps == Mat(QQ, [[1, -1]])
    assert c.euler() == 1
    assert c.cohomology(1) == (0, Mat(QQ, [], rows=0, cols=2))


def test_cohomology_class_of_coboundary_vanishes():
    c = three_term()
    img = c.diff(0).apply([2, 5])
    assert c.cohomology_class(1, img) == []


def test_mult_by_two_quasi_iso_only_in_char_zero():
    for field, expect in [(QQ, True), (GF(2), False), (GF(5), True)]:
        p = Complex.point(field)
        f = ChainMap(p, p, {0: Mat(field, [[2]])})
        assert f.is_quasi_iso() is expect


def test_cone_of_identity_is_acyclic():
    c = three_term()
    assert cone(ChainMap.identity(c)).is_acyclic()


def test_cone_inclusion_and_fib_projection_commute():
    c = three_term()
    f = ChainMap(c, c, {n: Mat.identity(QQ, k).scale(3) for n, k in c.dims.items()})
    cone_inclusion(f)._validate()
    fib_projection(f)._validate()
    # fib of an iso is acyclic too
    assert fib(f).is_acyclic()


def test_tensor_square_kunneth_frozen():
    a = Complex(QQ, {0: 1, 1: 1}, {})
    sq = tensor_complex(a, a)
    assert sq.dims == {0: 1, 1: 2, 2: 1}
    assert sq.h_dims() == {0: 1, 1: 2, 2: 1}
    assert tensor_complex(interval(QQ, 0), a).is_acyclic()


def test_hom_from_point_recovers_target():
    d = three_term()
    h = hom_complex(Complex.point(QQ), d)
    assert h.dims == d.dims and all(h.diff(n) == d.diff(n) for n in d.degrees())


def test_hom_h0_counts_maps_up_to_homotopy():
    b = interval(QQ, 0)
    assert hom_complex(b, b).cohomology(0)[0] == 0
    p = Complex.point(QQ)
    assert hom_complex(p, p).cohomology(0)[0] == 1


def test_dual_flips_degrees_and_is_exact():
    c = three_term().shift(1)
    assert c.h_dims() == {-1: 1}
    assert c.dual().h_dims() == {1: 1}


def test_dual_of_chain_map_is_chain_map():
    c = three_term()
    f = ChainMap(c, c, {n: Mat.identity(QQ, k).scale(2) for n, k in c.dims.items()})
    f.dual()._validate()
    f.shift(1)._validate()
    f.shift(-1)._validate()


def test_shift_signs_square_to_zero():
    c = three_term()
    for m in (-2, -1, 1, 2, 3):
        Complex(c.field, c.shift(m).dims, c.shift(m).d)  # re-validate


def test_smart_truncate_subcomplex_frozen():
    c = three_term()
    chain = smart_truncate(c, 1)
    sub, incl = subcomplex(c, chain)
    assert sub.dims == {0: 2, 1: 1}
    assert sub.diff(0) == Mat(QQ, [[1, 1]])
    assert sub.h_dims() == {0: 1}
    incl._validate()
    quot, proj = quotient_complex(c, chain)
    assert quot.dims == {1: 1, 2: 1}
    assert quot.is_acyclic()
    proj._validate()


def test_truncation_graded_piece_is_cohomology():
    c = three_term()
    for j in range(-1, 4):
        gr = subquotient(c, smart_truncate(c, j), smart_truncate(c, j - 1))
        expect = {j: c.h_dims()[j]} if j in c.h_dims() else {}
        assert gr.h_dims() == expect


def test_subcomplex_rejects_unclosed_chain():
    c = three_term()
    chain = {0: Subspace.full(QQ, 2), 1: Subspace.zero(QQ, 2),
             2: Subspace.zero(QQ, 1)}
    try:
        subcomplex(c, chain)
        assert False, "expected ComplexError"
    except ComplexError:
        pass


def test_induced_map_on_cohomology_frozen():
    c = three_term()
    f = ChainMap(c, c, {n: Mat.identity(QQ, k).scale(3) for n, k in c.dims.items()})
    assert f.induced_cohomology_map(0) == Mat(QQ, [[3]])
    assert ChainMap.identity(c).induced_cohomology_map(0) == Mat(QQ, [[1]])


def test_chain_section_of_split_surjection():
    c = three_term()
    quot, proj = quotient_complex(c, smart_truncate(c, 1))
    s = chain_section(proj)
    assert s is not None
    comp = proj.compose(s)
    for n in quot.degrees():
        assert comp.block(n) == Mat.identity(QQ, quot.dim(n))


def test_chain_section_missing_when_not_split():
    # interval -> point: the only candidate degree-0 block must be killed by d
    b = interval(QQ, 0)
    q = Complex.point(QQ)
    proj = ChainMap(b, q, {0: Mat(QQ, [[1]])})
    assert chain_section(proj) is None


@given(fields, block_lists)
@settings(max_examples=60, deadline=None)
def test_block_sums_have_predicted_cohomology(field, blocks):
    c = block_complex(field, blocks)
    assert c.h_dims() == predicted_h(blocks)
    assert c.euler() == sum((-1) ** n * h for n, h in c.h_dims().items())


@given(fields, block_lists, entry_lists)
@settings(max_examples=60, deadline=None)
def test_conjugation_preserves_cohomology(field, blocks, entries):
    c = block_complex(field, blocks)
    cprime, g = conjugate(c, entries)
    assert cprime.h_dims() == c.h_dims()
    assert g.is_quasi_iso() or not c.dims
    if c.dims:
        n = min(c.dims)
        assert g.induced_cohomology_map(n).rank() == c.cohomology(n)[0]


@given(fields, block_lists, st.integers(-2, 2))
@settings(max_examples=40, deadline=None)
def test_shift_and_dual_move_cohomology(field, blocks, m):
    c = block_complex(field, blocks)
    h = c.h_dims()
    assert c.shift(m).h_dims() == {n - m: k for n, k in h.items()}
    assert c.dual().h_dims() == {-n: k for n, k in h.items()}


@given(fields, block_lists, block_lists)
@settings(max_examples=40, deadline=None)
def test_tensor_kunneth(field, blocks_a, blocks_b):
    a, b = block_complex(field, blocks_a), block_complex(field, blocks_b)
    ha, hb = a.h_dims(), b.h_dims()
    expect = {}
    for p, x in ha.items():
        for q, y in hb.items():
            expect[p + q] = expect.get(p + q, 0) + x * y
    assert tensor_complex(a, b).h_dims() == expect
