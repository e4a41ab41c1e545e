"""Service layer: one handler per command, plus the HTTP routes.

Handlers take a scenario source (bundled name, file path, or inline dict)
and return a JSON-ready dict carrying the package version and a schema tag.
The FastAPI routes and the command line call the same handlers, so the two
interfaces cannot drift apart.  Reports are deterministic given the inputs.
"""

from typing import Union

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from . import __version__
from .complexes import ComplexError
from .filtered import SpectralSequence
from .loggeom import (ScenarioError, bundled_scenario_names, compare_sides,
                      cone_closed_form, cone_weights, dual_complex_report,
                      grw0_compactly_supported, load_scenario,
                      pole_order_filtrations, weight_filtrations, weight_side)
from .selftest import run_all

SCHEMA = 1


def _head(command: str, scn) -> dict:
    return {"schema": SCHEMA, "version": __version__, "command": command,
            "scenario": scn.name, "field": scn.field_name, "mode": scn.mode}


def handle_compare(scenario, track: str = "all") -> dict:
    """Both routes on an explicit scenario, with a diff where they differ."""
    scn = load_scenario(scenario)
    res = compare_sides(scn, track)
    tracks = []
    for key in sorted(res["tracks"]):
        ent = res["tracks"][key]
        item = {"track": key, "equal": ent["equal"],
                "pole_order": ent["pole_order"], "weight": ent["weight"]}
        if not ent["equal"]:
            item["diff"] = ent["diff"]
        tracks.append(item)
    out = _head("compare", scn)
    out.update({"track": track, "equal": res["equal"], "tracks": tracks,
                "ok": res["equal"]})
    return out


def handle_weights(scenario, track: str = "all") -> dict:
    """Weight tables from the stratum route, with the lowest compactly
    supported weight alongside."""
    scn = load_scenario(scenario)
    reports = weight_side(scn, track)
    g0 = grw0_compactly_supported(scn)
    out = _head("weights", scn)
    out.update({"track": track,
                "tracks": [dict({"track": key}, **reports[key].to_dict())
                           for key in sorted(reports)],
                "grw0": [[m, d] for m, d in sorted(g0.items())],
                "ok": True})
    return out


def handle_ss(scenario, track: str = "all") -> dict:
    """All pages of the relevant filtration's spectral sequence: the pole
    order side for explicit scenarios, the stratum side otherwise."""
    scn = load_scenario(scenario)
    if scn.mode == "explicit":
        fcs = pole_order_filtrations(scn, track)
        side = "pole-order"
    else:
        fcs = weight_filtrations(scn, track)
        side = "weight"
    tracks = []
    for key in sorted(fcs):
        ss = SpectralSequence(fcs[key])
        pages = [{"r": r, "entries": [[p, q, d] for (p, q), d
                                      in sorted(ss.page(r).items())]}
                 for r in range(1, ss.stable_page + 1)]
        tracks.append({"track": key, "pages": pages,
                       "e_infinity": [[p, q, d] for (p, q), d
                                      in sorted(ss.e_infinity().items())]})
    out = _head("ss", scn)
    out.update({"track": track, "side": side, "tracks": tracks, "ok": True})
    return out


def handle_dual_complex(scenario) -> dict:
    scn = load_scenario(scenario)
    rep = dual_complex_report(scn)
    out = _head("dual-complex", scn)
    out.update(rep)
    out["ok"] = rep["shift_match"] is not False
    return out


def handle_cone(scenario) -> dict:
    """Punctured cone weights over a closed smooth base, against the
    closed form."""
    scn = load_scenario(scenario)
    if scn.r != 0:
        raise ScenarioError(
            "components: cone weights need a closed smooth base "
            "(components = 0)")
    table = scn.stratum_table(frozenset())
    got = cone_weights(table, scn.field)
    want = cone_closed_form(table)
    out = _head("cone", scn)
    out.update({"hodge": [[p, q, d] for (p, q), d in sorted(table.items())],
                "weights": [[a, b, d] for (a, b), d in sorted(got.items())],
                "closed_form": [[a, b, d] for (a, b), d
                                in sorted(want.items())],
                "match": got == want, "ok": got == want})
    return out


def handle_selftest(seed: int = 0) -> dict:
    rep = run_all(seed)
    return {"schema": SCHEMA, "version": __version__, "command": "selftest",
            "seed": rep["seed"], "suites": rep["suites"], "ok": rep["ok"]}


def handle_scenarios() -> dict:
    return {"schema": SCHEMA, "version": __version__,
            "scenarios": sorted(bundled_scenario_names())}


# ---------------------------------------------------------------------------
# HTTP


class ScenarioRequest(BaseModel):
    scenario: Union[str, dict]
    track: str = "all"


class SourceRequest(BaseModel):
    scenario: Union[str, dict]


class SelftestRequest(BaseModel):
    seed: int = 0


app = FastAPI(title="logweight", version=__version__,
              description="Weight filtrations on logarithmic de Rham and "
                          "Hodge cohomology, computed two independent ways "
                          "in exact arithmetic.")


def _guard(fn, *args):
    try:
        return fn(*args)
    except ScenarioError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except ComplexError as e:
        raise HTTPException(status_code=500, detail=str(e))


@app.post("/compare")
def compare_route(req: ScenarioRequest) -> dict:
    return _guard(handle_compare, req.scenario, req.track)


@app.post("/weights")
def weights_route(req: ScenarioRequest) -> dict:
    return _guard(handle_weights, req.scenario, req.track)


@app.post("/ss")
def ss_route(req: ScenarioRequest) -> dict:
    return _guard(handle_ss, req.scenario, req.track)


@app.post("/dual-complex")
def dual_complex_route(req: SourceRequest) -> dict:
    return _guard(handle_dual_complex, req.scenario)


@app.post("/cone")
def cone_route(req: SourceRequest) -> dict:
    return _guard(handle_cone, req.scenario)


@app.post("/selftest")
def selftest_route(req: SelftestRequest) -> dict:
    return handle_selftest(req.seed)


@app.get("/scenarios")
def scenarios_route() -> dict:
    return handle_scenarios()


@app.get("/health")
def health_route() -> dict:
    return {"status": "ok", "version": __version__}
