"""Command-line front end.

Each subcommand reads one JSON request (or a JSON list of requests, evaluated with
``--jobs`` worker threads) and writes a JSON or TSV report. Exit status is 0 on
success, 2 when the input fails validation and 3 on a numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import jsonschema

from . import freesets, serialization as ser, witness
from .criterion import criterion_sdp
from .errors import FisherWitError, NumericalFailure, Unsupported
from .fisher import classical_fisher, quantum_fisher_family, sld
from .operations import OperationGame, channel_nc_gap
from .reproduce import SCENARIOS, emit_curve, run_scenario
from .robustness import generalized_robustness, standard_robustness
from .witness import build_discrimination_task, n_c, n_q, nc_from_witness, nc_upper_bound_binary

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 2, 3
log = logging.getLogger("fisherwit")


def _cfi(req):
    task = ser.decode_task(req["task"])
    rho = ser.decode_state(req["state"])
    out = {"cfi": classical_fisher(task, rho), "theta": task.theta, "flags": []}
    if math.isinf(out["cfi"]):
        out["flags"].append("divergent-cfi")
    if "grid" in req:
        out["curve"] = emit_curve(task, rho, req["grid"])
    return out


def _qfi(req):
    fam = ser.decode_family(req["family"])
    rho = ser.decode_state(req["state"])
    theta = float(req.get("theta", 0.0))
    out_state, d = fam.output(rho, theta), fam.derivative(rho, theta)
    return {"qfi": quantum_fisher_family(fam, rho, theta), "theta": theta, "sld": sld(out_state, d)}


def _nc(req):
    return n_c(ser.decode_task(req["task"]), ser.decode_state(req["state"]),
               ser.decode_free_set(req["free_set"])).to_dict()


def _nq(req):
    return n_q(ser.decode_family(req["family"]), ser.decode_state(req["state"]),
               ser.decode_free_set(req["free_set"]), float(req.get("theta", 0.0))).to_dict()


def _robustness(req):
    rho = ser.decode_state(req["state"])
    F = ser.decode_free_set(req["free_set"])
    r, wit = generalized_robustness(rho, F)
    flags = [] if math.isfinite(r) else ["infinite-robustness"]
    try:
        rs = standard_robustness(rho, F)
    except Unsupported:
        rs = None
        flags.append("standard-robustness-unsupported")
    if rs is not None and math.isinf(rs):
        flags.append("infinite-standard-robustness")
    return {"generalized_robustness": r, "standard_robustness": rs,
            "witness": None if wit is None else wit.operator, "flags": flags}


def _witness_task(req):
    rho = ser.decode_state(req["state"])
    F = ser.decode_free_set(req["free_set"])
    branch = req.get("zero_branch", "regularized")
    rep = nc_from_witness(rho, F, zero_branch=branch)
    out = rep.to_dict()
    if math.isfinite(rep.n_value):
        _, wit = generalized_robustness(rho, F)
        out["witness"] = wit.operator
        out["curve"] = emit_curve(build_discrimination_task(wit, F, zero_branch=branch), rho,
                                  req.get("grid", [0.0]))
    return out


def _nc_bounds(req):
    task = ser.decode_task(req["task"])
    rho = ser.decode_state(req["state"])
    F = ser.decode_free_set(req["free_set"])
    out = nc_upper_bound_binary(task, rho, F).to_dict()
    out["n_value"] = n_c(task, rho, F).n_value
    return out


def _criterion(req):
    return criterion_sdp(ser.decode_matrix(req["generator"]), ser.decode_free_set(req["free_set"])).to_dict()


def _op_witness(req):
    g = req["game"]
    povm = [ser.decode_matrix(e) for e in g["povm"]["elements"]]
    game = OperationGame([(e["p"], ser.decode_state(e["state"])) for e in g["ensemble"]], povm,
                         [ser.decode_channel(c) for c in g["free_ops"]], g.get("ancilla_dim", 1))
    return channel_nc_gap(ser.decode_channel(req["channel"]), game).to_dict()


HANDLERS = {
    "cfi": _cfi, "qfi": _qfi, "nc": _nc, "nq": _nq, "robustness": _robustness,
    "witness-task": _witness_task, "nc-bounds": _nc_bounds, "criterion": _criterion,
    "op-witness": _op_witness,
}


def handle(subcommand: str, request) -> dict:
    """Validate one request against its schema and dispatch it."""
    ser.validate(request, ser.REQUESTS[subcommand])
    return HANDLERS[subcommand](request)


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], obj


def to_tsv(report) -> str:
    """A curve becomes a ``theta p0 cfi`` table; anything else key/value lines."""
    report = ser.to_jsonable(report)
    if isinstance(report, dict) and "curve" in report and len(report) >= 1:
        cols = ["theta", "p0", "cfi"]
        extra = [k for k in (report["curve"][0] if report["curve"] else {}) if k not in cols]
        lines = ["\t".join(cols + extra)]
        lines += ["\t".join(str(row[c]) for c in cols + extra) for row in report["curve"]]
        return "\n".join(lines) + "\n"
    return "".join(f"{k}\t{json.dumps(v) if isinstance(v, list) else v}\n" for k, v in _flatten(report))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fisherwit", description=__doc__.splitlines()[0])
    parser.add_argument("--log-level", default="WARNING")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in list(HANDLERS) + ["reproduce"]:
        p = sub.add_parser(name)
        if name == "reproduce":
            p.add_argument("scenario", choices=sorted(SCENARIOS))
        else:
            p.add_argument("--input", "-i", default="-", help="request JSON file, or - for stdin")
            p.add_argument("--json", help="inline request JSON (overrides --input)")
            p.add_argument("--jobs", type=int, default=1, help="worker threads for a list of requests")
        p.add_argument("--output", "-o", default="-")
        p.add_argument("--format", choices=["json", "tsv"], default="json")
        p.add_argument("--tolerance", type=float, help="override membership and sandwich tolerances")
    return parser


def _read_request(args):
    if args.json is not None:
        return json.loads(args.json)
    if args.input == "-":
        return json.load(sys.stdin)
    with open(args.input) as fh:
        return json.load(fh)


def _write(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
    if args.tolerance is not None:
        freesets.MEMBER_TOL = args.tolerance
        witness.SANDWICH_TOL = args.tolerance
    try:
        if args.subcommand == "reproduce":
            report = run_scenario(args.scenario)
        else:
            request = _read_request(args)
            if isinstance(request, list):
                with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
                    report = list(pool.map(lambda r: handle(args.subcommand, r), request))
            else:
                report = handle(args.subcommand, request)
    except NumericalFailure as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        log.error("invalid input at %s: %s", path, exc.message)
        return EXIT_INPUT
    except (FisherWitError, ValueError, KeyError, TypeError, OSError) as exc:
        log.error("invalid input: %s: %s", type(exc).__name__, exc)
        return EXIT_INPUT
    if args.format == "tsv":
        if isinstance(report, list):
            text = "".join(to_tsv(r) for r in report)
        else:
            text = to_tsv(report)
    else:
        text = ser.dumps(report, indent=2, sort_keys=True) + "\n"
    _write(text, args.output)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
