"""Command line front end.

A thin in-process client over the service handlers: parse arguments, run the
handler, render the report.  Structured output is the JSON report itself;
the human rendering is derived from the same dict, so both carry the same
facts.  Exit status: 0 when every asserted equality holds, 1 on a
mathematical mismatch, 2 on invalid input.
"""

import argparse
import json
import sys

from .complexes import ComplexError
from .loggeom import TRACKS, ScenarioError
from .service import (handle_compare, handle_cone, handle_dual_complex,
                      handle_selftest, handle_ss, handle_weights)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="logweight",
        description="Weight filtrations on log cohomology, two ways, exactly.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_, track=True, scenario=True, seed=False):
        c = sub.add_parser(name, help=help_)
        if scenario:
            c.add_argument("--scenario", required=True,
                           help="bundled scenario name or path to a JSON file")
        if track:
            c.add_argument("--track", default="all", choices=TRACKS)
        if seed:
            c.add_argument("--seed", type=int, default=0)
        c.add_argument("--format", default="human",
                       choices=("human", "structured"))
        c.add_argument("--out", help="write the report to this path")
        return c

    add("compare", "run both routes and diff the graded tables")
    add("weights", "weight tables from the stratum route")
    add("ss", "spectral sequence pages of the underlying filtration")
    add("dual-complex", "incidence complex against the lowest weight",
        track=False)
    add("cone", "punctured cone weights against the closed form", track=False)
    add("selftest", "randomized identity suites", track=False, scenario=False,
        seed=True)
    return p


def _rows(lines, rows, fmt):
    for row in rows:
        lines.append(fmt.format(*row))


def render_human(report: dict) -> str:
    lines = []
    cmd = report["command"]
    if cmd == "selftest":
        lines.append(f"selftest, seed {report['seed']}")
        for s in report["suites"]:
            tag = "ok" if not s["failures"] else f"{len(s['failures'])} FAILED"
            lines.append(f"  {s['name']}: {s['count']} cases, {tag}")
            for f in s["failures"][:5]:
                lines.append(f"    {f}")
        lines.append("all identities hold" if report["ok"]
                     else "some identities FAILED")
        return "\n".join(lines) + "\n"

    lines.append(f"{cmd}: scenario {report['scenario']} "
                 f"({report['field']}, {report['mode']})")
    if cmd == "compare":
        for t in report["tracks"]:
            lines.append(f"track {t['track']}: "
                         + ("equal" if t["equal"] else "MISMATCH"))
            _rows(lines, t["weight"]["gr"], "  gr_W({0}) H^{1}: dim {2}")
            if not t["equal"]:
                for name in sorted(t["diff"]):
                    for row in t["diff"][name]:
                        key, va, vb = row[:-2], row[-2], row[-1]
                        lines.append(f"  diff {name}{tuple(key)}: "
                                     f"pole order {va} != weight {vb}")
        lines.append("both routes agree" if report["equal"]
                     else "the routes DISAGREE")
    elif cmd == "weights":
        for t in report["tracks"]:
            lines.append(f"track {t['track']}:")
            _rows(lines, t["h"], "  H^{0}: dim {1}")
            _rows(lines, t["gr"], "  gr_W({0}) H^{1}: dim {2}")
        lines.append("lowest weight, compact supports:")
        if report["grw0"]:
            _rows(lines, report["grw0"], "  gr_W(0) H_c^{0}: dim {1}")
        else:
            lines.append("  zero")
    elif cmd == "ss":
        lines.append(f"side: {report['side']}")
        for t in report["tracks"]:
            lines.append(f"track {t['track']}:")
            for page in t["pages"]:
                ent = ", ".join(f"({p},{q})={d}"
                                for p, q, d in page["entries"]) or "zero"
                lines.append(f"  page {page['r']}: {ent}")
    elif cmd == "dual-complex":
        lines.append(f"vertices: {report['vertices']}")
        lines.append(f"faces: {report['faces']}")
        _rows(lines, report["reduced_h"], "reduced H^{0}: dim {1}")
        _rows(lines, report["grw0"], "gr_W(0) H_c^{0}: dim {1}")
        if report["shift_match"] is None:
            lines.append("shift comparison not asserted "
                         "(non-scalar stratum constants)")
        else:
            lines.append("lowest weight is the reduced cohomology shifted "
                         + ("(match)" if report["shift_match"]
                            else "(MISMATCH)"))
    elif cmd == "cone":
        _rows(lines, report["hodge"], "base h^({0},{1}) = {2}")
        _rows(lines, report["weights"], "cone ({0},{1}): dim {2}")
        lines.append("matches the closed form" if report["match"]
                     else "closed form MISMATCH")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "compare":
            report = handle_compare(args.scenario, args.track)
        elif args.command == "weights":
            report = handle_weights(args.scenario, args.track)
        elif args.command == "ss":
            report = handle_ss(args.scenario, args.track)
        elif args.command == "dual-complex":
            report = handle_dual_complex(args.scenario)
        elif args.command == "cone":
            report = handle_cone(args.scenario)
        else:
            report = handle_selftest(args.seed)
    except ScenarioError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ComplexError as e:
        print(f"internal check failed: {e}", file=sys.stderr)
        return 1

    if args.format == "structured":
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    else:
        text = render_human(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report.get("ok") else 1


if __name__ == "__main__":
    sys.exit(main())
