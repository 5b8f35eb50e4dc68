"""Command-line interface.

Exit codes: 0 success, 1 parse error, 2 precondition violation,
3 verification failure. JSON (or CSV for ``simulate``) goes to stdout,
diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Optional

from . import endo, graph, jsonio, kinetics
from .dynamics import BlowUpError, simulate, verify_bound
from .errors import PreconditionError, VerificationError
from .netparse import NetworkParseError, load_network, network_to_json, parse_with_diagnostics, serialize_network
from .network import ReactionNetwork

log = logging.getLogger("crnkit")

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_VERIFY = 0, 1, 2, 3


class _ColorFormatter(logging.Formatter):
    COLORS = {logging.WARNING: "\033[33m", logging.ERROR: "\033[31m"}

    def __init__(self, color: bool):
        super().__init__("%(levelname)s: %(message)s")
        self.color = color

    def format(self, record):
        text = super().format(record)
        if self.color and record.levelno in self.COLORS:
            return f"{self.COLORS[record.levelno]}{text}\033[0m"
        return text


def _setup_logging(verbose: bool) -> None:
    mode = os.environ.get("CRN_COLOR", "auto").lower()
    color = mode != "never" and sys.stderr.isatty()
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(_ColorFormatter(color))
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel(logging.DEBUG if verbose else logging.WARNING)


def _vector(text: str, d: int, what: str) -> list:
    from fractions import Fraction

    parts = [p.strip() for p in text.split(",") if p.strip()]
    try:
        values = [Fraction(p) for p in parts]
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"{what}: cannot parse {text!r}") from exc
    if len(values) != d:
        raise ValueError(f"{what} has {len(values)} entries, network has {d} species")
    return values


def _load(path: Path) -> ReactionNetwork:
    if path.suffix.lower() == ".json":
        return load_network(path)
    net, diags = parse_with_diagnostics(path.read_text(encoding="utf-8"))
    for g in diags:
        (log.error if g.severity == "error" else log.warning)("%s:%s", path, g)
    if net is None:
        raise NetworkParseError(diags)
    return net


def _require_first_order(net: ReactionNetwork) -> None:
    if net.is_empty():
        raise PreconditionError("network is empty")
    if not (net.is_first_order() and net.is_integral()):
        raise PreconditionError("this command needs a first-order network with integer complexes")


# -- verbs -------------------------------------------------------------------------------

def cmd_classify(net: ReactionNetwork, args) -> tuple[object, int]:
    out: dict = {"species": list(net.species), "d": net.d, "reactions": len(net)}
    out["order"] = None if net.is_empty() else net.order()
    out["net_order"] = None if net.is_empty() else net.net_order()
    out["first_order"] = net.is_first_order()
    out["monomolecular"] = net.is_monomolecular()
    out["weakly_reversible"] = graph.is_weakly_reversible(net)
    out.update(graph.deficiency_report(net).to_json())
    if out["deficiency_paper"] < 0:
        log.warning("deficiency with the strong-component count is negative (%d)", out["deficiency_paper"])
    out["sccs"] = graph.blocks_json(net, graph.strongly_connected_components(net))
    out["wccs"] = graph.blocks_json(net, graph.weakly_connected_components(net))
    g0, gb = graph.zero_component_split(net)
    out["G0"] = graph.edges_json(g0)
    out["Gbullet"] = graph.edges_json(gb)
    out["Glir"] = graph.edges_json(graph.lir_subgraph(net))
    out["Gstar"] = None if net.is_empty() else graph.edges_json(graph.highest_order_subgraph(net))
    out["homogeneous"] = None if net.is_empty() else graph.is_homogeneous(net)
    out["stoichiometric_subspace"] = graph.stoichiometric_subspace(net).to_json()
    out["conservation_laws"] = graph.conservation_laws(net).to_json()
    if not net.is_empty() and net.is_first_order() and net.zero in set(net.vertices):
        out["jkl"] = graph.jkl_sets(net).names(net.species)
    return out, EXIT_OK


def cmd_endotactic(net: ReactionNetwork, args) -> tuple[object, int]:
    if args.vector:
        u = _vector(args.vector, net.d, "--vector")
        verdict = endo.u_strongly_endotactic(net, u) if args.strong else endo.u_endotactic(net, u)
    else:
        verdict = endo.analyze(net, strong=args.strong, all_witnesses=args.all_witnesses, jobs=args.jobs)
    return verdict.to_json(net), EXIT_OK


def cmd_realize(net: ReactionNetwork, args) -> tuple[object, int]:
    _require_first_order(net)
    spade = kinetics.spade_realization(net)
    cert = kinetics.flux_match_certificate(net, spade)
    out = {
        "dsl": serialize_network(spade, "dsl"),
        "network": network_to_json(spade),
        "weakly_reversible": graph.is_weakly_reversible(spade),
        "deficiency_paper": graph.deficiency_report(spade).paper,
        "certificate": cert,
    }
    return out, EXIT_OK if cert["holds"] else EXIT_VERIFY


def _equilibrium(net: ReactionNetwork, x0, force: bool):
    _require_first_order(net)
    sys_ = kinetics.flux_system(net)
    cert = endo.first_order_endotactic(net)
    if not cert.endotactic and force:
        log.warning("network is not endotactic; forcing b(-A)^-1 without guarantees")
    return sys_, cert, kinetics.equilibrium(sys_, x0, certificate=cert, force=force)


def cmd_equilibrium(net: ReactionNetwork, args) -> tuple[object, int]:
    x0 = [float(v) for v in _vector(args.init, net.d, "--init")]
    _, _, res = _equilibrium(net, x0, args.force)
    return res.to_json(net.species), EXIT_OK


def cmd_simulate(net: ReactionNetwork, args) -> tuple[object, int]:
    x0 = [float(v) for v in _vector(args.init, net.d, "--init")]
    if args.closed_form:
        _require_first_order(net)
    traj = simulate(net, x0, args.t_end, args.dt, closed_form=args.closed_form)
    if args.out:
        traj.to_csv(args.out)
        return {"out": str(args.out), "rows": len(traj), "final": list(map(float, traj.final)),
                "meta": traj.meta}, EXIT_OK
    if getattr(args, "_batch", False):
        return {"rows": len(traj), "final": list(map(float, traj.final)), "meta": traj.meta}, EXIT_OK
    return traj.to_csv(), EXIT_OK


def cmd_verify_bound(net: ReactionNetwork, args) -> tuple[object, int]:
    x0 = [float(v) for v in _vector(args.init, net.d, "--init")]
    sys_, cert, eq = _equilibrium(net, x0, False)
    spec = kinetics.spectral_report(sys_, certified=True)
    traj = simulate(net, x0, args.t_end, args.dt, closed_form=args.closed_form)
    rep = verify_bound(traj, eq.x_star, spec)
    out = {
        "equilibrium": eq.to_json(net.species),
        "spectral": spec.to_json(),
        "rho": spec.rho,
        "bound": rep.to_json(),
        "pass": rep.passed,
    }
    return out, EXIT_OK if rep.passed else EXIT_VERIFY


VERBS: dict[str, Callable] = {
    "classify": cmd_classify,
    "endotactic": cmd_endotactic,
    "realize": cmd_realize,
    "equilibrium": cmd_equilibrium,
    "simulate": cmd_simulate,
    "verify-bound": cmd_verify_bound,
}


def run_file(path: Path, args) -> tuple[object, int]:
    """Run one verb on one file, mapping failures to exit codes."""
    try:
        net = _load(path)
        return VERBS[args.verb](net, args)
    except NetworkParseError as exc:
        return {"error": "parse", "diagnostics": [g.to_json() for g in exc.diagnostics]}, EXIT_PARSE
    except (VerificationError, BlowUpError) as exc:
        out = {"error": "verification", "message": str(exc)}
        if isinstance(exc, BlowUpError):
            out["last_valid_time"] = exc.last_time
        return out, EXIT_VERIFY
    except (PreconditionError, ValueError) as exc:
        return {"error": "precondition", "message": str(exc)}, EXIT_PRECONDITION


def _run_file_star(item):
    path, args = item
    return run_file(path, args)


def _batch(directory: Path, args) -> tuple[object, int]:
    files = sorted(p for p in directory.iterdir() if p.suffix.lower() in (".crn", ".json"))
    args._batch = True
    jobs, args.jobs = args.jobs, 1  # parallelise over files, not inside them
    if jobs > 1 and len(files) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_file_star, [(p, args) for p in files]))
    else:
        results = [run_file(p, args) for p in files]
    out = [{"file": p.name, "exit_code": code, "output": payload} for p, (payload, code) in zip(files, results)]
    return {"results": out}, max((code for _, code in results), default=EXIT_OK)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crnkit", description="Analyze mass-action reaction networks.")
    p.add_argument("--timestamp", action="store_true", help="add a UTC timestamp field to JSON output")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for direction scans and directories")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="verb", required=True)

    def add(name: str, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help)
        sp.add_argument("input", type=Path, help=".crn or .json file, or a directory of them")
        return sp

    add("classify", "structural report")
    sp = add("endotactic", "endotacticity verdict with witnesses")
    sp.add_argument("--vector", help="test a single direction u, e.g. '1,0,-1'")
    sp.add_argument("--strong", action="store_true", help="strong endotacticity")
    sp.add_argument("--all-witnesses", action="store_true", help="collect every violating pair")
    add("realize", "monomolecular strong realization and flux certificate")
    sp = add("equilibrium", "equilibrium in the compatibility class of --init")
    sp.add_argument("--init", required=True)
    sp.add_argument("--force", action="store_true", help="skip the endotacticity certificate")
    for name, help in (("simulate", "integrate the ODE (CSV output)"), ("verify-bound", "check the decay bound")):
        sp = add(name, help)
        sp.add_argument("--init", required=True)
        sp.add_argument("--t-end", type=float, default=10.0)
        sp.add_argument("--dt", type=float, default=1e-3)
        sp.add_argument("--closed-form", action="store_true")
        if name == "simulate":
            sp.add_argument("--out", type=Path)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _setup_logging(args.verbose)
    for name in ("vector", "strong", "all_witnesses", "force", "closed_form", "out"):
        if not hasattr(args, name):
            setattr(args, name, None)
    args.jobs = max(1, args.jobs)
    if args.input.is_dir():
        payload, code = _batch(args.input, args)
    elif not args.input.exists():
        log.error("no such file: %s", args.input)
        payload, code = {"error": "precondition", "message": f"no such file: {args.input}"}, EXIT_PRECONDITION
    else:
        payload, code = run_file(args.input, args)
    if isinstance(payload, dict) and payload.get("error") not in (None, "parse"):
        log.error("%s", payload.get("message") or payload["error"])
    if isinstance(payload, str):
        sys.stdout.write(payload)
    else:
        if args.timestamp:
            payload = {**payload, "timestamp": datetime.now(timezone.utc).isoformat()}
        sys.stdout.write(jsonio.dumps(payload) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
