import pytest
from hypothesis import given, settings, strategies as st

from logweight.exactalg import GF, Mat, QQ, kernel_basis
from logweight.filtered import SpectralSequence
from logweight.loggeom import (
    CechModel, P1Arrangement, ScenarioError, SncdScenario, bundled_scenario_names,
    compare_sides, cone_closed_form, cone_weights, dual_complex_report,
    field_by_name, grw0_compactly_supported, load_scenario,
    p1_compactly_supported, p1_log_hodge_complexes, poincare_pairing_check,
    pole_order_filtrations, pole_order_side, residue_lattice,
    residue_localization_report, weight_filtrations, weight_side,
)


# --- oracle: cohomology of a twist on the line, by straight Cech windows ---

def line_bundle_h(field, m, window=8):
    """H^0 and H^1 of the degree-m twist, from the two-chart cover.

    Chart sections are polynomial windows, the overlap a Laurent window wide
    enough that the comparison map (f0, f1) -> f0 - t^m f1(1/t) never
    truncates; then h^0 is its kernel and h^1 its cokernel.
    """
    w = window
    lo, hi = min(0, m - w), max(w, m)
    rows = []
    for j in range(w + 1):                       # chart 0 basis t^j
        v = [field.zero] * (hi - lo + 1)
        v[j - lo] = field.one
        rows.append(v)
    for j in range(w + 1):                       # chart 1 basis, sent to -t^(m-j)
        v = [field.zero] * (hi - lo + 1)
        v[m - j - lo] = field.neg(field.one)
        rows.append(v)
    d = Mat(field, rows).transpose()
    h0 = kernel_basis(d).dim
    h1 = d.rows - (d.cols - h0)
    return h0, h1


def test_oracle_matches_closed_form():
    for field in (QQ, GF(3)):
        for m in range(-5, 6):
            assert line_bundle_h(field, m) == (max(0, m + 1), max(0, -m - 1))


def expected_log_h(field, k):
    """Hypercohomology of (trivial twist -> twist by k-2); the connecting
    map kills constants, so the degrees just add up."""
    h0_tw, h1_tw = line_bundle_h(field, k - 2)
    h0_o, h1_o = line_bundle_h(field, 0)
    return {0: h0_o, 1: h1_o + h0_tw, 2: h1_tw}


def expected_compact_h(field, k):
    """Same for (twist by -k -> twist by -2): the compactly supported side."""
    h0_a, h1_a = line_bundle_h(field, -k)
    h0_b, h1_b = line_bundle_h(field, -2)
    return {0: h0_a, 1: h1_a + h0_b, 2: h1_b}


def line_arr(field, k):
    pts = {0: [], 1: [0], 2: [0, "inf"]}.get(k)
    if pts is None:
        pts = list(range(k - 1)) + ["inf"]
    return P1Arrangement(field, pts)


def expected_weight_gr(k):
    out = {(0, 0): 1}
    if k == 0:
        out[(2, 2)] = 1
    elif k >= 2:
        out[(2, 1)] = k - 1
    return out


# --- the Cech model against the oracle ---

FIELD_CAPS = [("Q", 5), ("F5", 5), ("F3", 4), ("F2", 3)]


def test_model_total_cohomology():
    for name, cap in FIELD_CAPS:
        field = field_by_name(name)[1]
        for k in range(cap + 1):
            model = CechModel(line_arr(field, k))
            want = {m: d for m, d in expected_log_h(field, k).items() if d}
            assert model.total.h_dims() == want, (name, k)


def test_compactly_supported_cohomology():
    for name, cap in FIELD_CAPS:
        field = field_by_name(name)[1]
        for k in range(cap + 1):
            fc, _ = p1_compactly_supported(line_arr(field, k))
            want = {m: d for m, d in expected_compact_h(field, k).items() if d}
            assert fc.c.h_dims() == want, (name, k)


def test_window_stability():
    field = QQ
    base = CechModel(line_arr(field, 2)).total.h_dims()
    for w in (4, 6, 9):
        assert CechModel(line_arr(field, 2), window=w).total.h_dims() == base


def test_window_too_small_rejected():
    with pytest.raises(ValueError):
        CechModel(line_arr(QQ, 3), window=3)


def test_repeated_point_rejected():
    with pytest.raises(ScenarioError):
        P1Arrangement(GF(3), [0, 3])


def test_pole_graded_pieces():
    # level 0 is the no-pole complex on the whole line, level 1 adds the
    # logarithmic classes: one skyscraper class per marked point
    for k in (0, 1, 3):
        model = CechModel(line_arr(QQ, k))
        pole = model.pole_filtration()
        assert pole.graded_piece(0).h_dims() == {0: 1, 2: 1}
        assert pole.graded_piece(1).h_dims() == ({1: k} if k else {})


def test_hodge_pieces_cohomology():
    # form-degree pieces: functions give H^0 only, log one-forms carry the
    # rest, one class per puncture beyond the first plus the compact class
    for k in (0, 1, 3):
        _, graded = p1_log_hodge_complexes(line_arr(QQ, k))
        assert graded[0].c.h_dims() == {0: 1}
        want = {1: max(0, k - 1), 2: 1 if k == 0 else 0}
        assert graded[1].c.h_dims() == {m: d for m, d in want.items() if d}


@given(st.sampled_from(["Q", "F5"]),
       st.lists(st.sampled_from([0, 1, -1, 2, "inf"]), unique=True, max_size=4))
@settings(max_examples=20, deadline=None)
def test_model_h_depends_only_on_count(name, pts):
    field = field_by_name(name)[1]
    model = CechModel(P1Arrangement(field, pts))
    want = {m: d for m, d in expected_log_h(field, len(pts)).items() if d}
    assert model.total.h_dims() == want


# --- the pole-order route, frozen weight tables ---

def test_pole_side_line_tables():
    for k in range(4):
        reps = pole_order_side(load_scenario(f"line-k{k}-q"), "all")
        gr = expected_weight_gr(k)
        assert reps["dr"].gr == gr
        assert reps["dr"].e1 == gr
        assert reps["j0"].gr == {(0, 0): 1}
        j1 = {kk: d for kk, d in gr.items() if kk != (0, 0)}
        assert reps["j1"].gr == j1


def test_filtered_tracks_share_objects():
    fcs = pole_order_filtrations(load_scenario("line-k2-q"), "all")
    assert fcs["phi0"] is fcs["dr"]
    assert fcs["phi1"] is fcs["j1"]
    wfs = weight_filtrations(load_scenario("triangle"), "all")
    assert wfs["phi0"] is wfs["dr"]
    assert wfs["phi2"] is wfs["j2"]


def test_hodge_tracks_sum_to_de_rham():
    for src in ("line-k3-q", "line-k2-f2", "triangle"):
        scn = load_scenario(src)
        side = pole_order_side if scn.mode == "explicit" else weight_side
        reps = side(scn, "all")
        js = [k for k in reps if k.startswith("j")]
        for m, d in reps["dr"].h.items():
            assert sum(reps[j].h.get(m, 0) for j in js) == d


def test_weight_side_triangle_and_conic():
    reps = weight_side(load_scenario("triangle"), "dr")
    assert reps["dr"].h == {0: 1, 1: 2, 2: 1}
    assert reps["dr"].gr == {(0, 0): 1, (2, 1): 2, (4, 2): 1}
    assert reps["dr"].e1 == reps["dr"].gr
    reps = weight_side(load_scenario("f5-conic-line"), "dr")
    assert reps["dr"].gr == {(0, 0): 1, (2, 1): 1, (4, 2): 1}


def test_both_routes_agree():
    for src in ("line-k0-q", "line-k1-f5", "line-k2-f3", "line-k3-q",
                "line-k3-f2"):
        res = compare_sides(load_scenario(src), "all")
        assert res["equal"], (src, res)


# --- lowest weight with compact supports, incidence complexes ---

def test_grw0_tables():
    want = {"line-k0-q": {0: 1}, "line-k1-q": {}, "line-k3-q": {1: 2},
            "f5-conic-line": {2: 1}, "triangle": {2: 1},
            "line-k5-f5": {1: 4}}
    for src, g in want.items():
        assert grw0_compactly_supported(load_scenario(src)) == g, src


def test_dual_complex_reports():
    r = dual_complex_report(load_scenario("triangle"))
    assert r["faces"] == [[1], [2], [3], [1, 2], [1, 3], [2, 3]]
    assert r["reduced_h"] == [[1, 1]]          # a circle
    assert r["constants_scalar"] and r["shift_match"] is True
    r = dual_complex_report(load_scenario("line-k3-q"))
    assert r["vertices"] == [1, 2, 3] and r["reduced_h"] == [[0, 2]]
    assert r["shift_match"] is True
    r = dual_complex_report(load_scenario("line-k0-q"))
    assert r["reduced_h"] == [[-1, 1]] and r["shift_match"] is True
    r = dual_complex_report(load_scenario("f5-conic-line"))
    assert not r["constants_scalar"] and r["shift_match"] is None
    assert r["faces"] == [[1], [2], [1, 2]]


def test_dual_complex_needs_connected_strata():
    raw = {
        "version": 1, "field": "Q", "mode": "tabulated", "n": 2,
        "components": 2,
        "strata": [
            {"subset": [], "components": [{"hodge": [[0, 0, 1]]}]},
            {"subset": [1], "components": [{"hodge": [[0, 0, 1]]}]},
            {"subset": [2], "components": [{"hodge": [[0, 0, 1]]}]},
            {"subset": [1, 2], "components": [{"hodge": [[0, 0, 1]]},
                                              {"hodge": [[0, 0, 1]]}]},
        ],
        "pullbacks": [
            {"from": [], "to": [1], "p": 0, "q": 0, "matrix": [[1]]},
            {"from": [], "to": [2], "p": 0, "q": 0, "matrix": [[1]]},
            {"from": [1], "to": [1, 2], "p": 0, "q": 0, "matrix": [[1], [1]]},
            {"from": [2], "to": [1, 2], "p": 0, "q": 0, "matrix": [[1], [1]]},
        ],
    }
    with pytest.raises(ScenarioError, match="at most one"):
        dual_complex_report(SncdScenario.from_json(raw))


# --- punctured cone weights ---

def test_cone_weights_closed_form():
    for src in ("cone-line", "cone-plane"):
        scn = load_scenario(src)
        table = scn.stratum_table(frozenset())
        assert cone_weights(table, scn.field) == cone_closed_form(table)


def test_cone_weights_closed_form_is_the_stated_one():
    table = {(0, 0): 1, (1, 1): 1}
    assert cone_closed_form(table) == {(0, 0): 1, (1, 1): 1, (2, 2): 1}
    got = cone_weights(table, QQ)
    assert got == {(0, 0): 1, (1, 1): 1, (2, 2): 1}


def test_cone_weights_rejects_bad_bases():
    with pytest.raises(ScenarioError, match="H\\^0-row"):
        cone_weights({(0, 0): 2, (1, 1): 1}, QQ)
    with pytest.raises(ScenarioError, match="zero-dimensional"):
        cone_weights({(0, 0): 1}, QQ)


# --- residues, localization, duality ---

def test_residue_localization_k2():
    rep = residue_localization_report(line_arr(QQ, 2))
    assert rep["exact"] and rep["gr_split"]
    for pt in rep["points"]:
        assert pt["residue_quotient_h"] == [[1, 1]]
        assert pt["localization_quotient_h"] == [[0, 1]]


def test_residue_lattice_positions():
    lat = residue_lattice(line_arr(GF(5), 2))
    lat.check_exact_columns()
    sub = lat.position((1, -1))
    assert sub.h_dims() == {1: 1}


def test_pairing_perfect_small():
    assert poincare_pairing_check(line_arr(QQ, 0))["perfect"]
    rep = poincare_pairing_check(line_arr(GF(3), 2))
    assert rep["perfect"]
    assert set(rep["components"]) == {"[]", "[1]", "[2]", "[1, 2]"}


def test_pairing_top_rank_k3():
    from logweight.loggeom import wedge_residue_pairing
    pp = wedge_residue_pairing(line_arr(GF(5), 3))
    top = max(pp.elements, key=lambda s: (len(s), sorted(s)))
    dt = pp.dual_transformation(top)
    assert dt.induced_cohomology_map(1).rank() == 2


# --- scenario validation ---

BAD_SCENARIOS = [
    ({"version": 2}, "version: unsupported"),
    ({"version": 1, "mode": "explicit", "n": 1, "components": 0,
      "points": []}, "field: missing"),
    ({"version": 1, "field": "F4", "mode": "explicit", "n": 1,
      "components": 0, "points": []}, "field: unknown field"),
    ({"version": 1, "field": "Q", "mode": "neither", "n": 1,
      "components": 0}, "mode: expected"),
    ({"version": 1, "field": "Q", "mode": "explicit", "n": 2,
      "components": 0, "points": []}, "n: explicit mode needs"),
    ({"version": 1, "field": "Q", "mode": "explicit", "n": 1,
      "components": 1, "points": [0, 1]}, "components: must equal"),
    ({"version": 1, "field": "F3", "mode": "explicit", "n": 1,
      "components": 1, "points": ["1/3"]}, "points\\[0\\]: not a field"),
    ({"version": 1, "field": "Q", "mode": "tabulated", "n": 1,
      "components": 0, "points": []}, "points: only allowed"),
    ({"version": 1, "field": "Q", "mode": "tabulated", "n": 1,
      "components": 0, "strata": []}, "strata: missing subset"),
]


def test_scenario_validation_messages():
    for raw, pat in BAD_SCENARIOS:
        with pytest.raises(ScenarioError, match=pat):
            SncdScenario.from_json(raw)


def test_nonfunctorial_pullbacks_rejected():
    raw = {
        "version": 1, "field": "Q", "mode": "tabulated", "n": 2,
        "components": 2,
        "strata": [
            {"subset": [], "components": [{"hodge": [[0, 0, 1]]}]},
            {"subset": [1], "components": [{"hodge": [[0, 0, 1]]}]},
            {"subset": [2], "components": [{"hodge": [[0, 0, 1]]}]},
            {"subset": [1, 2], "components": []},
        ],
        "pullbacks": [
            {"from": [], "to": [1], "p": 0, "q": 0, "matrix": [[1]]},
            {"from": [], "to": [2], "p": 0, "q": 0, "matrix": [[1]]},
        ],
    }
    # fine: the double intersection is empty, nothing to compose into
    SncdScenario.from_json(raw)
    raw["strata"][3]["components"] = [{"hodge": [[0, 0, 1]]}]
    raw["pullbacks"] += [
        {"from": [1], "to": [1, 2], "p": 0, "q": 0, "matrix": [[1]]},
        {"from": [2], "to": [1, 2], "p": 0, "q": 0, "matrix": [[-1]]},
    ]
    with pytest.raises(ScenarioError, match="non-functorial"):
        SncdScenario.from_json(raw)


def test_bundled_corpus_loads():
    names = bundled_scenario_names()
    assert len(names) == 25
    for name in names:
        scn = load_scenario(name)
        assert scn.name == name
        if scn.mode == "explicit":
            assert scn.n == 1


def test_spectral_sequence_weight_keys():
    # the page-1 report keys are (weight, degree) = (-p, p+q)
    fcs = pole_order_filtrations(load_scenario("line-k3-q"), "dr")
    page = SpectralSequence(fcs["dr"]).page(1)
    assert {(-p, p + q): d for (p, q), d in page.items()} == expected_weight_gr(3)
