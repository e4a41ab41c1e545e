"""Weight filtrations on the cohomology of open varieties, two ways.

The pole-order route works on an explicit two-chart model of the projective
line with marked points removed: the de Rham complex with logarithmic poles
carries the filtration by pole order, and its decalage induces the weight
filtration directly.  The stratum route only sees Hodge-number tables of the
closed strata of a normal crossing divisor together with pullback matrices,
builds a cube of truncation-tower-filtered complexes out of them, and takes
a filtered total cofiber.  For scenarios on the line both routes apply and
their reports must agree track by track.

Conventions fixed here once and for all: the second chart coordinate is
s = 1/t; the pole-order filtration has two levels, 0 (no log poles) and 1
(everything); a table entry (p, q, dim) of the stratum cut out by I feeds
the Hodge-degree-j track with j = n - p, placed in degree 2n - p - q; weight
reports key graded pieces by (weight, degree).
"""

from __future__ import annotations

import json
import os
import re
from importlib import resources

from .complexes import (ChainMap, Complex, ComplexError, chain_section,
                        quotient_complex, subcomplex, subquotient)
from .cubes import (CubeDiagram, LatticeDiagram, PosetPairing, axes_set,
                    inclusion_map, subquotient_map, subsets,
                    total_cofiber_map, total_fiber)
from .exactalg import GF, FieldError, Mat, QQ, Subspace, kernel_basis
from .filtered import (FilteredComplex, SpectralSequence, filtered_cone,
                       full_chain, graded_map, zero_chain)

INF = "inf"

TRACKS = ("dr", "hodge", "hodge-filtered", "all")


class ScenarioError(ValueError):
    """Invalid scenario input; the message names the offending field."""


def field_by_name(name) -> tuple:
    """Resolve "Q" or "F<p>" to a field, returning (name, field)."""
    if not isinstance(name, str):
        raise ScenarioError("field: expected a string")
    if name == "Q":
        return name, QQ
    m = re.fullmatch(r"F(\d+)", name)
    if m:
        try:
            return name, GF(int(m.group(1)))
        except FieldError:
            pass
    raise ScenarioError(f"field: unknown field {name!r}")


def _pow(field, a, e: int):
    if e < 0:
        return _pow(field, field.inv(a), -e)
    out = field.one
    for _ in range(e):
        out = field.mul(out, a)
    return out


def _point_str(field, x) -> str:
    return INF if x == INF else field.format(x)


class P1Arrangement:
    """Distinct marked points on the projective line over an exact field.

    Points live on the chart with coordinate t; the string "inf" marks the
    point at infinity, visible only on the s = 1/t chart.
    """

    def __init__(self, field, points):
        self.field = field
        self.points = []
        for i, x in enumerate(points):
            if x == INF:
                v = INF
            else:
                try:
                    v = field.parse(x) if isinstance(x, str) else field.of(x)
                except (ValueError, ZeroDivisionError):
                    raise ScenarioError(f"points[{i}]: not a field element") from None
            if v in self.points:
                raise ScenarioError(f"points[{i}]: repeated point")
            self.points.append(v)

    @property
    def k(self) -> int:
        return len(self.points)

    @property
    def window(self) -> int:
        return max(2, self.k + 2)

    @property
    def finite_points(self) -> list:
        return [x for x in self.points if x != INF]

    @property
    def chart1_points(self) -> list:
        """Second-chart coordinates of the marked points visible there."""
        out = []
        for x in self.points:
            if x == INF:
                out.append(self.field.zero)
            elif x != self.field.zero:
                out.append(self.field.inv(x))
        return out

    def __repr__(self):
        pts = ", ".join(_point_str(self.field, x) for x in self.points)
        return f"P1Arrangement({self.field}, [{pts}])"


class CechModel:
    """Finite monomial-window cochain model of log forms on the line.

    Degree 0 holds polynomial functions on the two charts, degree 1 the
    Laurent functions on the overlap plus logarithmic 1-forms on the charts,
    degree 2 Laurent 1-forms on the overlap.  Every basis vector carries a
    label, so distinguished subcomplexes are spans of labels or kernels of
    explicit evaluation constraints.

    Labels: ("f0", j) = t^j and ("f1", j) = s^j in degree 0; ("h", j) = t^j
    on the overlap, ("w0", j) = t^j dt, ("p0", a) = dt/(t-a) (dt/t for
    a = 0), ("w1", j) = s^j ds, ("p1", b) = ds/(s-b) in degree 1; ("e", j) =
    t^j dt and ("q", a) = dt/(t-a) on the overlap in degree 2.
    """

    def __init__(self, arr: P1Arrangement, window: int | None = None):
        self.arr = arr
        self.field = arr.field
        self.window = arr.window if window is None else window
        if self.window < arr.window:
            raise ValueError("window too small for the marked points")
        self.labels = self._build_labels()
        self.index = {n: {lab: i for i, lab in enumerate(labs)}
                      for n, labs in self.labels.items()}
        self.total = self._build_complex()

    def _build_labels(self) -> dict[int, list]:
        M = self.window
        arr = self.arr
        deg0 = [("f0", j) for j in range(M + 1)]
        deg0 += [("f1", j) for j in range(M + 1)]
        deg1 = [("h", j) for j in range(-M, M + 1)]
        deg1 += [("w0", j) for j in range(M)]
        deg1 += [("p0", a) for a in arr.finite_points]
        deg1 += [("w1", j) for j in range(M)]
        deg1 += [("p1", b) for b in arr.chart1_points]
        deg2 = [("e", j) for j in range(-(M + 1), M)]
        deg2 += [("q", a) for a in arr.finite_points if a != self.field.zero]
        return {0: deg0, 1: deg1, 2: deg2}

    def _build_complex(self) -> Complex:
        # d(f0, f1) = (f0 - f1 on the overlap, df0, df1)
        # d(h, w0, w1) = dh - w0 + w1 on the overlap
        F = self.field
        dims = {n: len(labs) for n, labs in self.labels.items()}
        d0 = Mat.zeros(F, dims[1], dims[0])
        d1 = Mat.zeros(F, dims[2], dims[1])
        ix1, ix2 = self.index[1], self.index[2]
        one = F.one
        for (kind, j), col in self.index[0].items():
            if kind == "f0":
                d0.data[ix1[("h", j)]][col] = one
                if j >= 1:
                    d0.data[ix1[("w0", j - 1)]][col] = F.of(j)
            else:
                d0.data[ix1[("h", -j)]][col] = F.neg(one)
                if j >= 1:
                    d0.data[ix1[("w1", j - 1)]][col] = F.of(j)
        for (kind, v), col in self.index[1].items():
            if kind == "h":
                if v != 0:
                    d1.data[ix2[("e", v - 1)]][col] = F.of(v)
            elif kind == "w0":
                d1.data[ix2[("e", v)]][col] = F.neg(one)
            elif kind == "p0":
                if v == F.zero:
                    d1.data[ix2[("e", -1)]][col] = F.neg(one)
                else:
                    d1.data[ix2[("q", v)]][col] = F.neg(one)
            elif kind == "w1":
                # s^v ds = -t^{-v-2} dt
                d1.data[ix2[("e", -v - 2)]][col] = F.neg(one)
            else:
                if v == F.zero:
                    # ds/s = -dt/t
                    d1.data[ix2[("e", -1)]][col] = F.neg(one)
                else:
                    # ds/(s-b) = dt/(t-1/b) - dt/t
                    d1.data[ix2[("q", F.inv(v))]][col] = one
                    d1.data[ix2[("e", -1)]][col] = F.neg(one)
        return Complex(F, dims, {0: d0, 1: d1})

    def log_chain(self, points) -> dict[int, Subspace]:
        """Span of labels with log poles allowed only at the given points."""
        F = self.field
        finite = [x for x in points if x != INF]
        chart1 = []
        for x in points:
            if x == INF:
                chart1.append(F.zero)
            elif x != F.zero:
                chart1.append(F.inv(x))
        keep_q = [x for x in finite if x != F.zero]
        out = {}
        for n, labs in self.labels.items():
            rows = []
            for i, lab in enumerate(labs):
                kind = lab[0]
                if kind == "p0":
                    ok = lab[1] in finite
                elif kind == "p1":
                    ok = lab[1] in chart1
                elif kind == "q":
                    ok = lab[1] in keep_q
                else:
                    ok = True
                if ok:
                    row = [F.zero] * len(labs)
                    row[i] = F.one
                    rows.append(row)
            out[n] = Subspace.from_rows(F, len(labs), rows)
        return out

    def compact_chain(self, points) -> dict[int, Subspace]:
        """Forms with no log poles whose functions vanish at the points."""
        F = self.field
        finite = [x for x in points if x != INF]
        chart1 = []
        for x in points:
            if x == INF:
                chart1.append(F.zero)
            elif x != F.zero:
                chart1.append(F.inv(x))
        out = {}
        for n, labs in self.labels.items():
            rows = []
            if n == 0:
                for a in finite:
                    rows.append([_pow(F, a, lab[1]) if lab[0] == "f0" else F.zero
                                 for lab in labs])
                for b in chart1:
                    rows.append([_pow(F, b, lab[1]) if lab[0] == "f1" else F.zero
                                 for lab in labs])
            elif n == 1:
                for a in finite:
                    if a != F.zero:
                        rows.append([_pow(F, a, lab[1]) if lab[0] == "h" else F.zero
                                     for lab in labs])
                for i, lab in enumerate(labs):
                    if lab[0] in ("p0", "p1"):
                        row = [F.zero] * len(labs)
                        row[i] = F.one
                        rows.append(row)
            else:
                for i, lab in enumerate(labs):
                    if lab[0] == "q":
                        row = [F.zero] * len(labs)
                        row[i] = F.one
                        rows.append(row)
            if rows:
                out[n] = kernel_basis(Mat(F, rows))
            else:
                out[n] = Subspace.full(F, len(labs))
        return out

    def hodge_chain(self, phi: int) -> dict[int, Subspace]:
        """Stupid filtration by form degree as an ambient chain."""
        F = self.field
        if phi <= 0:
            return full_chain(self.total)
        if phi >= 2:
            return zero_chain(self.total)
        labs = self.labels[1]
        rows = []
        for i, lab in enumerate(labs):
            if lab[0] != "h":
                row = [F.zero] * len(labs)
                row[i] = F.one
                rows.append(row)
        return {0: Subspace.zero(F, len(self.labels[0])),
                1: Subspace.from_rows(F, len(labs), rows),
                2: Subspace.full(F, len(self.labels[2]))}

    def pole_filtration(self) -> FilteredComplex:
        """Level 0: no log poles at the marked points; level 1: everything."""
        return FilteredComplex(self.total,
                               {0: self.log_chain([]), 1: full_chain(self.total)},
                               0, 1)

    def hodge_graded(self, j: int) -> FilteredComplex:
        """Form-degree-j graded piece with its induced pole filtration."""
        sigma = self.hodge_chain(1)
        p0 = self.log_chain([])
        if j == 0:
            quot, _ = quotient_complex(self.total, sigma)
            lv0 = project_chain(self.total, sigma, p0)
            return FilteredComplex(quot, {0: lv0, 1: full_chain(quot)}, 0, 1)
        if j == 1:
            sub, _ = subcomplex(self.total, sigma)
            inter = {n: p0[n].intersection(sigma[n]) for n in self.total.degrees()}
            return FilteredComplex(sub, {0: restrict_chain(sigma, inter),
                                         1: full_chain(sub)}, 0, 1)
        raise ValueError("form degree on a curve is 0 or 1")


def restrict_chain(big: dict[int, Subspace],
                   small: dict[int, Subspace]) -> dict[int, Subspace]:
    """Rewrite a chain contained in `big` in the coordinates of `big`."""
    out = {}
    for n, sp in big.items():
        rows = [sp.coords(v) for v in small[n].basis.data]
        out[n] = Subspace.from_rows(sp.field, sp.dim, rows)
    return out


def project_chain(amb: Complex, lower: dict[int, Subspace],
                  sub: dict[int, Subspace]) -> dict[int, Subspace]:
    """Image of a chain in the quotient of `amb` by `lower`."""
    F = amb.field
    out = {}
    for n in amb.degrees():
        full = Subspace.full(F, amb.dim(n))
        rows = [full.quotient_coords(lower[n], v) for v in sub[n].basis.data]
        out[n] = Subspace.from_rows(F, amb.dim(n) - lower[n].dim, rows)
    return out


def p1_log_hodge_complexes(arr: P1Arrangement):
    """The pole-order filtered log model and its Hodge graded pieces."""
    model = CechModel(arr)
    return model.pole_filtration(), {0: model.hodge_graded(0),
                                     1: model.hodge_graded(1)}


def p1_compactly_supported(arr: P1Arrangement):
    """Compactly supported model, filtered in a single weight-zero level,
    with the localization maps dropping one marked point each."""
    model = CechModel(arr)
    call = model.compact_chain(arr.points)
    sub, _ = subcomplex(model.total, call)
    fc = FilteredComplex.concentrated(sub, 0)
    loc = {}
    for i, x in enumerate(arr.points):
        rest = [p for p in arr.points if p != x]
        loc[i] = inclusion_map(model.total, call, model.compact_chain(rest))
    return fc, loc


class WeightReport:
    """Cohomology, graded weight table and first-page table of a filtered
    complex; graded dimensions must sum to the cohomology degreewise."""

    def __init__(self, h: dict[int, int], gr: dict, e1: dict):
        self.h = {m: d for m, d in h.items() if d}
        self.gr = {k: d for k, d in gr.items() if d}
        self.e1 = {k: d for k, d in e1.items() if d}
        sums = {}
        for (w, m), d in self.gr.items():
            sums[m] = sums.get(m, 0) + d
        if sums != self.h:
            raise ComplexError("graded weights do not sum to cohomology")

    @classmethod
    def of(cls, fc: FilteredComplex) -> "WeightReport":
        h = {n: d for n, d in fc.c.h_dims().items() if d}
        gr = {}
        for n in fc.c.degrees():
            for w, d in fc.h_graded_dims(n).items():
                if d:
                    gr[(w, n)] = d
        e1 = {}
        for (p, q), d in SpectralSequence(fc).page(1).items():
            if d:
                e1[(-p, p + q)] = d
        return cls(h, gr, e1)

    def to_dict(self) -> dict:
        return {"h": [[m, d] for m, d in sorted(self.h.items())],
                "gr": [[w, m, d] for (w, m), d in sorted(self.gr.items())],
                "e1": [[w, m, d] for (w, m), d in sorted(self.e1.items())]}

    def __eq__(self, other):
        return (isinstance(other, WeightReport) and self.h == other.h
                and self.gr == other.gr and self.e1 == other.e1)

    def __repr__(self):
        return f"WeightReport(h={self.h}, gr={self.gr})"


def report_diff(a: WeightReport, b: WeightReport) -> dict:
    """Entry-by-entry difference of two reports; empty means equal."""
    out = {}
    for name in ("h", "gr", "e1"):
        da, db = getattr(a, name), getattr(b, name)
        rows = []
        for key in sorted(set(da) | set(db)):
            va, vb = da.get(key, 0), db.get(key, 0)
            if va != vb:
                k = list(key) if isinstance(key, tuple) else [key]
                rows.append(k + [va, vb])
        if rows:
            out[name] = rows
    return out


def _track_plan(n: int, track: str) -> list:
    plan = []
    if track in ("dr", "all"):
        plan.append(("dr", list(range(n + 1))))
    if track in ("hodge", "all"):
        plan.extend((f"j{j}", [j]) for j in range(n + 1))
    if track in ("hodge-filtered", "all"):
        plan.extend((f"phi{p}", list(range(p, n + 1))) for p in range(n + 1))
    if not plan:
        raise ScenarioError(f"track: unknown track {track!r}")
    return plan


def _unique_reports(fcs: dict) -> dict:
    seen = {}
    out = {}
    for key, fc in fcs.items():
        if id(fc) not in seen:
            seen[id(fc)] = WeightReport.of(fc)
        out[key] = seen[id(fc)]
    return out


def pole_order_filtrations(source, track: str = "all") -> dict[str, FilteredComplex]:
    """Decalage of the pole-order filtration, one filtered complex per track.

    Tracks: "dr" is the whole log complex; "j0"/"j1" are the Hodge graded
    pieces; "phi0"/"phi1" are the stupid-filtration steps, which on a curve
    coincide with "dr" and "j1".
    """
    arr = _as_arrangement(source)
    model = CechModel(arr)
    cache = {}

    def dec(piece):
        if piece not in cache:
            base = (model.pole_filtration() if piece == "full"
                    else model.hodge_graded(int(piece[1])))
            cache[piece] = base.decalage()
        return cache[piece]

    out = {}
    for key, js in _track_plan(1, track):
        piece = "full" if len(js) == 2 else f"j{js[0]}"
        out[key] = dec(piece)
    return out


def pole_order_side(source, track: str = "all") -> dict[str, WeightReport]:
    return _unique_reports(pole_order_filtrations(source, track))


def _as_arrangement(source) -> P1Arrangement:
    if isinstance(source, P1Arrangement):
        return source
    if isinstance(source, SncdScenario):
        return source.arrangement()
    raise ScenarioError("mode: pole-order route needs an explicit scenario")


# ---------------------------------------------------------------------------
# scenarios


def _parse_subset(val, r: int, where: str) -> frozenset:
    if not isinstance(val, list) or any(
            isinstance(v, bool) or not isinstance(v, int) for v in val):
        raise ScenarioError(f"{where}: expected a list of component indices")
    if any(v < 1 or v > r for v in val) or len(set(val)) != len(val):
        raise ScenarioError(f"{where}: expected distinct indices in 1..{r}")
    return frozenset(val)


def _parse_hodge(val, cap: int, where: str) -> dict:
    if not isinstance(val, list):
        raise ScenarioError(f"{where}: expected a list of [p, q, dim] triples")
    table = {}
    seen = set()
    for t, item in enumerate(val):
        ok = (isinstance(item, list) and len(item) == 3
              and all(isinstance(v, int) and not isinstance(v, bool) and v >= 0
                      for v in item))
        if not ok:
            raise ScenarioError(
                f"{where}[{t}]: expected [p, q, dim] with nonnegative integers")
        p, q, d = item
        if p > cap or q > cap:
            raise ScenarioError(f"{where}[{t}]: (p, q) outside the stratum dimension")
        if (p, q) in seen:
            raise ScenarioError(f"{where}: repeated (p, q)")
        seen.add((p, q))
        if d:
            table[(p, q)] = d
    return table


def _check_entry(field, e, where: str):
    if isinstance(e, bool) or not isinstance(e, (int, str)):
        raise ScenarioError(f"{where}: not a field element")
    try:
        field.parse(e) if isinstance(e, str) else field.of(e)
    except (ValueError, ZeroDivisionError):
        raise ScenarioError(f"{where}: not a field element") from None


def _parse_matrix(val, rows: int, cols: int, field, where: str) -> list:
    shape_msg = f"{where}: expected {rows} rows of {cols} entries"
    if not isinstance(val, list) or len(val) != rows:
        raise ScenarioError(shape_msg)
    out = []
    for i, row in enumerate(val):
        if not isinstance(row, list) or len(row) != cols:
            raise ScenarioError(shape_msg)
        for j, e in enumerate(row):
            _check_entry(field, e, f"{where}[{i}][{j}]")
        out.append(list(row))
    return out


def _coerce(field, e):
    return field.parse(e) if isinstance(e, str) else field.of(e)


class SncdScenario:
    """A normal crossing setup given by stratum Hodge tables and pullbacks.

    Tabulated mode lists, for every subset I of the r divisor components,
    the Hodge numbers of the closed stratum cut out by I (one table per
    connected component) and the pullback matrices along inclusions of
    adjacent strata.  Explicit mode gives marked points on the line instead
    and tabulates itself.  Built through `from_json`; raw matrix entries are
    kept as given and coerced per use, so the constants computation can run
    over a different coefficient field.
    """

    def __init__(self, name, field_name, field, mode, n, r, strata, pullbacks,
                 points=None, arr=None):
        self.name = name
        self.field_name = field_name
        self.field = field
        self.mode = mode
        self.n = n
        self.r = r
        self._strata = strata
        self._pullbacks = pullbacks
        self.points = points
        self._arr = arr
        self._tables = {}
        for s, comps in strata.items():
            merged = {}
            for comp in comps:
                for key, d in comp.items():
                    merged[key] = merged.get(key, 0) + d
            self._tables[s] = merged

    @classmethod
    def from_json(cls, data, name: str = "scenario") -> "SncdScenario":
        if not isinstance(data, dict):
            raise ScenarioError("scenario: expected a JSON object")
        if data.get("version") != 1:
            raise ScenarioError(
                f"version: unsupported value {data.get('version')!r}")
        if "field" not in data:
            raise ScenarioError("field: missing")
        field_name, field = field_by_name(data["field"])
        mode = data.get("mode")
        if mode not in ("tabulated", "explicit"):
            raise ScenarioError("mode: expected 'tabulated' or 'explicit'")
        n = data.get("n")
        if isinstance(n, bool) or not isinstance(n, int) or n < 0:
            raise ScenarioError("n: expected a nonnegative integer")
        r = data.get("components")
        if isinstance(r, bool) or not isinstance(r, int) or r < 0:
            raise ScenarioError("components: expected a nonnegative integer")
        if r > 10:
            raise ScenarioError("components: at most 10 supported")

        if mode == "explicit":
            if "strata" in data:
                raise ScenarioError("strata: not allowed in explicit mode")
            if "pullbacks" in data:
                raise ScenarioError("pullbacks: not allowed in explicit mode")
            if n != 1:
                raise ScenarioError("n: explicit mode needs n = 1")
            points = data.get("points")
            if not isinstance(points, list):
                raise ScenarioError("points: expected a list")
            if len(points) != r:
                raise ScenarioError("components: must equal the number of points")
            arr = P1Arrangement(field, points)
            strata = {frozenset(): [{(0, 0): 1, (1, 1): 1}]}
            pulls = {}
            for i in range(1, r + 1):
                strata[frozenset([i])] = [{(0, 0): 1}]
                pulls[(frozenset(), frozenset([i]), 0, 0)] = [[1]]
            for s in subsets(r):
                if len(s) >= 2:
                    strata[s] = []
            return cls(name, field_name, field, mode, n, r, strata, pulls,
                       points=list(points), arr=arr)

        if "points" in data:
            raise ScenarioError("points: only allowed in explicit mode")
        raw_strata = data.get("strata")
        if not isinstance(raw_strata, list):
            raise ScenarioError("strata: expected a list")
        strata = {}
        for i, entry in enumerate(raw_strata):
            if not isinstance(entry, dict):
                raise ScenarioError(f"strata[{i}]: expected an object")
            sub = _parse_subset(entry.get("subset"), r, f"strata[{i}].subset")
            if sub in strata:
                raise ScenarioError(f"strata: duplicate subset {sorted(sub)}")
            comps = entry.get("components")
            if not isinstance(comps, list):
                raise ScenarioError(f"strata[{i}].components: expected a list")
            tables = []
            for j, comp in enumerate(comps):
                if not isinstance(comp, dict) or "hodge" not in comp:
                    raise ScenarioError(
                        f"strata[{i}].components[{j}]: expected an object "
                        "with a 'hodge' table")
                tables.append(_parse_hodge(comp["hodge"], n - len(sub),
                                           f"strata[{i}].components[{j}].hodge"))
            strata[sub] = tables
        for s in subsets(r):
            if s not in strata:
                raise ScenarioError(f"strata: missing subset {sorted(s)}")

        merged = {}
        for s, comps in strata.items():
            table = {}
            for comp in comps:
                for key, d in comp.items():
                    table[key] = table.get(key, 0) + d
            merged[s] = table

        raw_pulls = data.get("pullbacks", [])
        if not isinstance(raw_pulls, list):
            raise ScenarioError("pullbacks: expected a list")
        pulls = {}
        for i, entry in enumerate(raw_pulls):
            if not isinstance(entry, dict):
                raise ScenarioError(f"pullbacks[{i}]: expected an object")
            small = _parse_subset(entry.get("from"), r, f"pullbacks[{i}].from")
            big = _parse_subset(entry.get("to"), r, f"pullbacks[{i}].to")
            if not (small < big and len(big) == len(small) + 1):
                raise ScenarioError(
                    f"pullbacks[{i}]: 'to' must be 'from' plus one component")
            p, q = entry.get("p"), entry.get("q")
            for label, v in (("p", p), ("q", q)):
                if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                    raise ScenarioError(
                        f"pullbacks[{i}].{label}: expected a nonnegative integer")
            key = (small, big, p, q)
            if key in pulls:
                raise ScenarioError(
                    f"pullbacks: duplicate entry {sorted(small)} -> {sorted(big)} "
                    f"at (p, q) = ({p}, {q})")
            pulls[key] = _parse_matrix(entry.get("matrix"),
                                       merged[big].get((p, q), 0),
                                       merged[small].get((p, q), 0),
                                       field, f"pullbacks[{i}].matrix")

        scn = cls(name, field_name, field, mode, n, r, strata, pulls)
        scn._check_pullbacks_complete()
        scn._check_functorial()
        return scn

    def _check_pullbacks_complete(self):
        for small in subsets(self.r):
            for i in axes_set(self.r) - small:
                big = small | {i}
                for key, d in self._tables[small].items():
                    if d and self._tables[big].get(key, 0):
                        if (small, big) + key not in self._pullbacks:
                            raise ScenarioError(
                                f"pullbacks: missing {sorted(small)} -> "
                                f"{sorted(big)} at (p, q) = {key}")

    def _check_functorial(self):
        for base in subsets(self.r):
            rest = sorted(axes_set(self.r) - base)
            for ii, i in enumerate(rest):
                for j in rest[ii + 1:]:
                    top = base | {i, j}
                    keys = set(self._tables[base]) & set(self._tables[top])
                    for key in sorted(keys):
                        via_i = self.pullback_matrix(base | {i}, top, *key).mul(
                            self.pullback_matrix(base, base | {i}, *key))
                        via_j = self.pullback_matrix(base | {j}, top, *key).mul(
                            self.pullback_matrix(base, base | {j}, *key))
                        if via_i != via_j:
                            raise ScenarioError(
                                f"pullbacks: non-functorial {sorted(base)} -> "
                                f"{sorted(top)} at (p, q) = {key}")

    def components_of(self, subset: frozenset) -> int:
        return len(self._strata[frozenset(subset)])

    def stratum_table(self, subset: frozenset) -> dict:
        return self._tables[frozenset(subset)]

    def stratum_dim(self, subset: frozenset, p: int, q: int) -> int:
        return self._tables[frozenset(subset)].get((p, q), 0)

    def pullback_matrix(self, small, big, p: int, q: int, field=None) -> Mat:
        """Restriction matrix on H^{p,q} for the stratum inclusion, over the
        scenario field or any requested one; absent entries are zero."""
        F = self.field if field is None else field
        small, big = frozenset(small), frozenset(big)
        rows = self.stratum_dim(big, p, q)
        cols = self.stratum_dim(small, p, q)
        raw = self._pullbacks.get((small, big, p, q))
        if raw is None:
            return Mat.zeros(F, rows, cols)
        return Mat(F, [[_coerce(F, e) for e in row] for row in raw], rows, cols)

    def arrangement(self) -> P1Arrangement:
        if self.mode != "explicit":
            raise ScenarioError("mode: pole-order route needs an explicit scenario")
        return self._arr

    def __repr__(self):
        return (f"SncdScenario({self.name!r}, {self.field_name}, {self.mode}, "
                f"n={self.n}, components={self.r})")


def bundled_scenario_names() -> list[str]:
    root = resources.files(__package__) / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_scenario(source) -> SncdScenario:
    """Load a scenario from a dict, a bundled name, or a JSON file path."""
    if isinstance(source, dict):
        return SncdScenario.from_json(source)
    if not isinstance(source, str):
        raise ScenarioError("scenario: expected a name, path or object")
    if re.fullmatch(r"[\w-]+", source) and source in bundled_scenario_names():
        text = (resources.files(__package__) / "scenarios" /
                f"{source}.json").read_text()
        name = source
    elif os.path.exists(source):
        with open(source) as fh:
            text = fh.read()
        name = os.path.splitext(os.path.basename(source))[0]
    else:
        raise ScenarioError(f"scenario: no such scenario or file {source!r}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"scenario: invalid JSON ({e})") from None
    return SncdScenario.from_json(data, name=name)


# ---------------------------------------------------------------------------
# the stratum route


def _block_diag(field, blocks) -> Mat:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    out = Mat.zeros(field, rows, cols)
    r0 = c0 = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                out.data[r0 + i][c0 + j] = b.data[i][j]
        r0 += b.rows
        c0 += b.cols
    return out


def _weight_vertex(scn: SncdScenario, stratum: frozenset, js) -> Complex:
    dims = {}
    for j in js:
        for (p, q), d in scn.stratum_table(stratum).items():
            if p == scn.n - j and d:
                m = scn.n + j - q
                dims[m] = dims.get(m, 0) + d
    return Complex(scn.field, dims, {})


def _weight_cube(scn: SncdScenario, js) -> CubeDiagram:
    """Cube of dualized stratum tables for the chosen Hodge degrees.

    The vertex at K carries the stratum cut out by the complement of K, so
    the terminal vertex is the ambient space; edges transpose the stored
    pullback matrices, one diagonal block per Hodge degree."""
    n, r = scn.n, scn.r
    axes = axes_set(r)
    verts = {K: _weight_vertex(scn, axes - K, js) for K in subsets(r)}
    edges = {}
    for K in subsets(r):
        stratum = axes - K
        for i in stratum:
            src, tgt = verts[K], verts[K | {i}]
            blocks = {}
            for m in src.degrees():
                if src.dim(m) and tgt.dim(m):
                    parts = [scn.pullback_matrix(stratum - {i}, stratum,
                                                 n - j, n + j - m).transpose()
                             for j in js]
                    blocks[m] = _block_diag(scn.field, parts)
            edges[(K, i)] = ChainMap(src, tgt, blocks)
    return CubeDiagram(r, verts, edges)


def _face_towers(r: int, towers: dict, bit: int) -> dict:
    out = {}
    for s in subsets(r - 1):
        old = frozenset(j + 1 for j in s) | ({1} if bit else frozenset())
        out[s] = towers[old]
    return out


def _filtered_total_cofiber(cube: CubeDiagram, towers: dict) -> FilteredComplex:
    """Total cofiber with the filtration induced by per-vertex towers."""
    if cube.r == 0:
        return towers[frozenset()]
    f = total_cofiber_map(cube.edge_transformation(1))
    fs = _filtered_total_cofiber(cube.face(1, 0), _face_towers(cube.r, towers, 0))
    ft = _filtered_total_cofiber(cube.face(1, 1), _face_towers(cube.r, towers, 1))
    return filtered_cone(f, fs, ft)


def weight_filtrations(scn: SncdScenario, track: str = "all") -> dict[str, FilteredComplex]:
    """Filtered total cofibers of the stratum cubes, one per track."""
    cache = {}
    out = {}
    for key, js in _track_plan(scn.n, track):
        t = tuple(js)
        if t not in cache:
            cube = _weight_cube(scn, js)
            towers = {s: FilteredComplex.truncation_tower(cube.vertex(s))
                      for s in subsets(scn.r)}
            cache[t] = _filtered_total_cofiber(cube, towers)
        out[key] = cache[t]
    return out


def weight_side(scn: SncdScenario, track: str = "all") -> dict[str, WeightReport]:
    return _unique_reports(weight_filtrations(scn, track))


def compare_sides(scn: SncdScenario, track: str = "all") -> dict:
    """Run both routes on an explicit scenario and diff the reports."""
    wr = weight_side(scn, track)
    pr = pole_order_side(scn, track)
    tracks = {}
    equal = True
    for key in sorted(wr):
        d = report_diff(pr[key], wr[key])
        tracks[key] = {"pole_order": pr[key].to_dict(),
                       "weight": wr[key].to_dict(), "equal": not d}
        if d:
            tracks[key]["diff"] = d
            equal = False
    return {"equal": equal, "tracks": tracks}


# ---------------------------------------------------------------------------
# weight zero with compact supports, and the incidence complex


def grw0_compactly_supported(scn: SncdScenario, field=None) -> dict[int, int]:
    """Lowest weight of compactly supported cohomology of the open part,
    from constants on the strata: the total fiber of the restriction cube."""
    R = scn.field if field is None else field
    r = scn.r
    verts = {s: Complex(R, {0: scn.stratum_dim(s, 0, 0)}, {}) for s in subsets(r)}
    edges = {}
    for s in subsets(r):
        for i in axes_set(r) - s:
            m = scn.pullback_matrix(s, s | {i}, 0, 0, field=R)
            edges[(s, i)] = ChainMap(verts[s], verts[s | {i}], {0: m})
    cube = CubeDiagram(r, verts, edges)
    return {m: d for m, d in total_fiber(cube).h_dims().items() if d}


class SimplicialComplexT(object):
    """A finite abstract simplicial complex on sortable vertices."""

    def __init__(self, vertices, faces):
        self.vertices = sorted(set(vertices))
        vs = set(self.vertices)
        fs = {frozenset(f) for f in faces if f}
        for f in fs:
            if not f <= vs:
                raise ValueError("face uses an unknown vertex")
            for v in f:
                if len(f) > 1 and (f - {v}) not in fs:
                    raise ValueError("faces are not closed under subsets")
        self.faces = sorted(fs, key=lambda f: (len(f), sorted(f)))

    def __repr__(self):
        return f"SimplicialComplexT({self.vertices}, {len(self.faces)} faces)"


def _augmented_cochain(sc: SimplicialComplexT, field) -> Complex:
    by_dim = {-1: [()]}
    for f in sc.faces:
        by_dim.setdefault(len(f) - 1, []).append(tuple(sorted(f)))
    for d in by_dim:
        by_dim[d].sort()
    index = {d: {f: i for i, f in enumerate(v)} for d, v in by_dim.items()}
    dims = {d: len(v) for d, v in by_dim.items()}
    diffs = {}
    for d in sorted(by_dim):
        if d + 1 not in by_dim:
            continue
        m = Mat.zeros(field, dims[d + 1], dims[d])
        for g, row in index[d + 1].items():
            for i, v in enumerate(g):
                sub = tuple(x for x in g if x != v)
                sign = field.one if i % 2 == 0 else field.neg(field.one)
                col = index[d][sub]
                m.data[row][col] = field.add(m.data[row][col], sign)
        diffs[d] = m
    return Complex(field, dims, diffs)


def reduced_cohomology(sc: SimplicialComplexT, field) -> dict[int, int]:
    """Reduced simplicial cohomology; the empty complex has one class in
    degree -1."""
    return {n: d for n, d in _augmented_cochain(sc, field).h_dims().items() if d}


def dual_complex(scn: SncdScenario) -> SimplicialComplexT:
    """Incidence complex of the divisor: a subset of components spans a face
    when the corresponding closed stratum is nonempty."""
    faces = []
    for s in subsets(scn.r):
        if not s:
            continue
        c = scn.components_of(s)
        if c == 0:
            continue
        if len(s) >= 2 and c > 1:
            raise ScenarioError(
                f"strata: subset {sorted(s)} has {c} components; the incidence "
                "complex needs at most one")
        faces.append(s)
    verts = sorted({v for f in faces for v in f})
    return SimplicialComplexT(verts, faces)


def dual_complex_report(scn: SncdScenario, field=None) -> dict:
    """Incidence complex, its reduced cohomology, and the comparison with
    the lowest-weight compactly supported table (shifted by one), asserted
    only when every stratum has scalar constants."""
    R = scn.field if field is None else field
    sc = dual_complex(scn)
    red = reduced_cohomology(sc, R)
    g = grw0_compactly_supported(scn, R)
    trivial = all(comp.get((0, 0), 0) == 1
                  for s in subsets(scn.r) for comp in scn._strata[s])
    match = None
    if trivial:
        match = g == {m + 1: d for m, d in red.items()}
    return {"vertices": list(sc.vertices),
            "faces": [sorted(f) for f in sc.faces],
            "reduced_h": [[m, d] for m, d in sorted(red.items())],
            "grw0": [[m, d] for m, d in sorted(g.items())],
            "constants_scalar": trivial,
            "shift_match": match}


# ---------------------------------------------------------------------------
# weights on the punctured cone


def _as_hodge_table(table) -> dict:
    if isinstance(table, dict):
        items = list(table.items())
    elif isinstance(table, list):
        items = []
        for t in table:
            if not isinstance(t, list) or len(t) != 3:
                raise ScenarioError("hodge: expected [p, q, dim] triples")
            items.append(((t[0], t[1]), t[2]))
    else:
        raise ScenarioError("hodge: expected a table")
    out = {}
    for (p, q), d in items:
        if not all(isinstance(v, int) and not isinstance(v, bool) and v >= 0
                   for v in (p, q, d)):
            raise ScenarioError("hodge: expected [p, q, dim] triples")
        if d:
            out[(p, q)] = out.get((p, q), 0) + d
    return out


def cone_weights(table, field) -> dict:
    """Weight table of the punctured affine cone over a smooth projective
    variety with the given Hodge numbers, via filtered fibers of the
    blowup-to-base comparison, keyed (weight - hodge, hodge)."""
    t = _as_hodge_table(table)
    if t.get((0, 0)) != 1 or any(p == 0 and q > 0 for (p, q) in t):
        raise ScenarioError("hodge: H^0-row not one-dimensional")
    dim_x = max(p for (p, q) in t)
    if dim_x == 0:
        raise ScenarioError("hodge: base is zero-dimensional")
    F = field
    out = {}
    for j in range(dim_x + 2):
        splits = {}
        for m in range(2 * dim_x + 3):
            a = t.get((j, m - j), 0)
            b = t.get((j - 1, m - j - 1), 0)
            c = 1 if j == 0 and m == 0 else 0
            if a + b + c:
                splits[m] = (a, b, c)
        if not splits:
            continue
        src = Complex(F, {m: a + b + c for m, (a, b, c) in splits.items()}, {})
        tgt = Complex(F, {m: a for m, (a, b, c) in splits.items() if a}, {})
        blocks = {}
        for m, (a, b, c) in splits.items():
            if a:
                mm = Mat.zeros(F, a, a + b + c)
                for i in range(a):
                    mm.data[i][i] = F.one
                if c:
                    mm.data[0][a + b] = F.neg(F.one)
                blocks[m] = mm
        alpha = ChainMap(src, tgt, blocks)
        if tgt.total_dim() == 0:
            fc = FilteredComplex.truncation_tower(src)
        else:
            fc = filtered_cone(alpha, FilteredComplex.truncation_tower(src),
                               FilteredComplex.truncation_tower(tgt)).shift(-1)
        for (w, m), d in WeightReport.of(fc).gr.items():
            if w != m:
                raise ComplexError("cone weights drifted off the diagonal")
            out[(m - j, j)] = out.get((m - j, j), 0) + d
    return {k: d for k, d in out.items() if d}


def cone_closed_form(table) -> dict:
    """What the cone weights must be: constants plus every base class moved
    by one step in both indices."""
    t = _as_hodge_table(table)
    out = {(0, 0): 1}
    for (p, q), d in t.items():
        out[(q + 1, p + 1)] = out.get((q + 1, p + 1), 0) + d
    return out


# ---------------------------------------------------------------------------
# residues, localization, duality


def residue_lattice(arr: P1Arrangement) -> LatticeDiagram:
    """Log subcomplexes of all sub-arrangements as one lattice diagram."""
    model = CechModel(arr)
    chains = {s: model.log_chain([arr.points[i - 1] for i in sorted(s)])
              for s in subsets(arr.k)}
    return LatticeDiagram(model.total, arr.k, chains)


def residue_localization_report(arr: P1Arrangement) -> dict:
    """Per marked point: the residue sequence (log forms without the point
    into all log forms) and the localization sequence (compact forms into
    compact forms off the point), with exactness, the quotient cohomology,
    and sections of the graded pieces of the residue projection."""
    model = CechModel(arr)
    total = model.total
    pole = model.pole_filtration()
    call = model.compact_chain(arr.points)
    entries = []
    for x in arr.points:
        rest = [p for p in arr.points if p != x]
        log_small = model.log_chain(rest)
        sub, incl = subcomplex(total, log_small)
        quot, proj = quotient_complex(total, log_small)
        exact = all(sub.dim(n) + quot.dim(n) == total.dim(n)
                    for n in total.degrees())
        comp = proj.compose(incl)
        exact = exact and all(comp.block(n).is_zero() for n in total.degrees())

        c_rest = model.compact_chain(rest)
        loc_incl = inclusion_map(total, call, c_rest)
        loc_quot = subquotient(total, c_rest, call)
        loc_proj = subquotient_map(total, c_rest, zero_chain(total), call)
        loc_exact = all(
            call[n].dim + loc_quot.dim(n) == c_rest[n].dim
            for n in total.degrees())
        loc_comp = loc_proj.compose(loc_incl)
        loc_exact = loc_exact and all(loc_comp.block(n).is_zero()
                                      for n in total.degrees())

        quot_fc = FilteredComplex.concentrated(quot, 1)
        secs = all(chain_section(graded_map(proj, pole, quot_fc, lvl)) is not None
                   for lvl in (0, 1))
        entries.append({
            "point": _point_str(arr.field, x),
            "residue_quotient_h": [[n, d] for n, d in sorted(quot.h_dims().items()) if d],
            "localization_quotient_h": [[n, d] for n, d in sorted(loc_quot.h_dims().items()) if d],
            "exact": exact and loc_exact,
            "gr_split": secs,
        })
    return {"points": entries,
            "exact": all(e["exact"] for e in entries),
            "gr_split": all(e["gr_split"] for e in entries)}


def _chart0_form_terms(field, lab):
    """First-chart 1-form of a degree-1 label as (coef, exp, pole) terms."""
    kind, v = lab
    if kind == "w0":
        return [(field.one, v, None)]
    if kind == "p0":
        if v == field.zero:
            return [(field.one, -1, None)]
        return [(field.one, 0, v)]
    return []


def _chart1_form_terms(field, lab):
    """Second-chart 1-form of a degree-1 label, rewritten on the overlap."""
    kind, v = lab
    one = field.one
    if kind == "w1":
        return [(field.neg(one), -v - 2, None)]
    if kind == "p1":
        if v == field.zero:
            return [(field.neg(one), -1, None)]
        return [(one, 0, field.inv(v)), (field.neg(one), -1, None)]
    return []


def _overlap_terms(field, lab):
    """A degree-2 label as (coef, exp, pole) terms."""
    kind, v = lab
    if kind == "e":
        return [(field.one, v, None)]
    return [(field.one, 0, v)]


def _res0(field, terms):
    """Residue at t = 0 of a sum of terms c * t^e dt / (t - a)."""
    total = field.zero
    for c, e, a in terms:
        if a is None:
            if e == -1:
                total = field.add(total, c)
        elif e <= -1:
            total = field.sub(total, field.mul(c, _pow(field, a, e)))
    return total


def _shift_terms(field, coef, exp, terms):
    return [(field.mul(coef, c), e + exp, a) for c, e, a in terms]


def _ambient_pairing(model: CechModel) -> dict[int, Mat]:
    """The residue pairing of the whole model against itself, one matrix per
    left degree; cup takes the first-chart part in front and the
    second-chart part behind."""
    F = model.field
    labs0, labs1, labs2 = model.labels[0], model.labels[1], model.labels[2]
    p0 = Mat.zeros(F, len(labs0), len(labs2))
    for i, (kind, v) in enumerate(labs0):
        if kind != "f0":
            continue
        for j, lab2 in enumerate(labs2):
            p0.data[i][j] = _res0(F, _shift_terms(F, F.one, v,
                                                  _overlap_terms(F, lab2)))
    p1 = Mat.zeros(F, len(labs1), len(labs1))
    for i, labx in enumerate(labs1):
        for j, laby in enumerate(labs1):
            val = F.zero
            if laby[0] == "h":
                val = F.add(val, _res0(F, _shift_terms(
                    F, F.one, laby[1], _chart0_form_terms(F, labx))))
            if labx[0] == "h":
                val = F.sub(val, _res0(F, _shift_terms(
                    F, F.one, labx[1], _chart1_form_terms(F, laby))))
            p1.data[i][j] = val
    p2 = Mat.zeros(F, len(labs2), len(labs0))
    for i, lab2 in enumerate(labs2):
        for j, (kind, v) in enumerate(labs0):
            if kind != "f1":
                continue
            p2.data[i][j] = _res0(F, _shift_terms(F, F.one, -v,
                                                  _overlap_terms(F, lab2)))
    return {0: p0, 1: p1, 2: p2}


def wedge_residue_pairing(arr: P1Arrangement) -> PosetPairing:
    """Log forms of sub-arrangements against compactly supported forms, all
    matrices cut from one ambient residue pairing, over the subset poset."""
    model = CechModel(arr)
    pamb = _ambient_pairing(model)
    elems = sorted(subsets(arr.k), key=lambda s: (len(s), sorted(s)))
    pts = {s: [arr.points[i - 1] for i in sorted(s)] for s in elems}
    fch = {s: model.log_chain(pts[s]) for s in elems}
    gch = {s: model.compact_chain(pts[s]) for s in elems}
    fobj = {s: subcomplex(model.total, fch[s])[0] for s in elems}
    gobj = {s: subcomplex(model.total, gch[s])[0] for s in elems}
    fmaps, gmaps, pairings = {}, {}, {}
    for a in elems:
        for b in elems:
            if a < b:
                fmaps[(a, b)] = inclusion_map(model.total, fch[a], fch[b])
                gmaps[(a, b)] = inclusion_map(model.total, gch[b], gch[a])
            if a <= b:
                mats = {}
                for m in range(3):
                    if fch[a][m].dim and gch[b][2 - m].dim:
                        mats[m] = fch[a][m].basis.mul(pamb[m]).mul(
                            gch[b][2 - m].basis.transpose())
                pairings[(a, b)] = mats
    return PosetPairing(elems, lambda a, b: a <= b, fobj, fmaps, gobj, gmaps,
                        pairings, degree=2)


def poincare_pairing_check(arr: P1Arrangement) -> dict:
    """Build the wedge-residue pairing (validating closedness and
    naturality) and test perfectness on every sub-arrangement."""
    pp = wedge_residue_pairing(arr)
    comps = {}
    for s in pp.elements:
        comps[str(sorted(s))] = pp.dual_transformation(s).is_quasi_iso()
    return {"elements": [sorted(s) for s in pp.elements],
            "perfect": all(comps.values()),
            "components": comps}
