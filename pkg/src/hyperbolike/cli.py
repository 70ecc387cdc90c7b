"""Command line entry point: ``hyperbolike <command> [options]``.

Exit codes: 0 success, 2 invariant violation, 3 budget or cap exhausted,
4 input error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from . import ratfun as rf
from .backends import BackendConfig, BackendError, make_oracle
from .certify import CertificationError, VonDyckRepresentation, certify_normal_forms
from .graph_core import (BallConstructionError, TooLargeError, ball_automorphism_count, build_ball,
                         dead_end_census, estimate_delta, read_graph_file)
from .rewrite import Presentation, RewriteError, RewriteSystem, kb_complete
from .series import (growth_json, growth_rate_check, omega_analytic, omega_empirical, sphere_and_ball_series,
                     subgraph_series)
from .tournament import CLOSED, IntegrityError, TypeCollision, fit_automaton

log = logging.getLogger("hyperbolike")

EXIT_OK, EXIT_INVARIANT, EXIT_BUDGET, EXIT_INPUT = 0, 2, 3, 4

DEFAULTS = {
    "backend": {
        "kind": "freeproduct",
        "orders": "inf inf",
        "presentation": "",
        "rws": "",
        "kb_max_rules": "500",
        "kb_max_len": "40",
        "certify": "",
        "k": "3",
        "graph": "",
    },
    "params": {
        "delta": "auto",
        "max_delta": "4",
        "explore_radius": "8",
        "validation_radius": "",
        "exhaustive_radius": "",
        "reps_per_type": "4",
        "radius": "8",
        "guard": "4",
        "K": "20",
        "tol": "1e-9",
        "N_max": "64",
        "omega_terms": "400",
        "delta_samples": "20000",
        "seed": "0",
        "aut_cap": "2000",
    },
    "output": {
        "dir": ".",
        "prefix": "run",
    },
}


class InvariantViolation(RuntimeError):
    pass


class BudgetExhausted(RuntimeError):
    pass


def load_config(path: str | None) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser()
    cfg.optionxform = str
    cfg.read_dict(DEFAULTS)
    if path:
        p = Path(path)
        if not p.exists():
            raise FileNotFoundError(f"config file {path} not found")
        text = p.read_text()
        lines = text.splitlines()
        if lines and lines[0].startswith("format"):
            if lines[0].split()[1:] != ["config", "v1"]:
                raise ValueError(f"{path}: unsupported header {lines[0]!r}")
            text = "\n".join(lines[1:])
        cfg.read_string(text, source=str(path))
        base = p.parent
        for key in ("presentation", "rws", "graph"):
            v = cfg["backend"].get(key, "")
            if v and not Path(v).is_absolute():
                cfg["backend"][key] = str(base / v)
    return cfg


def print_config(cfg) -> str:
    lines = ["format config v1"]
    for section in cfg.sections():
        lines.append(f"[{section}]")
        for k, v in cfg[section].items():
            lines.append(f"{k} = {v}")
        lines.append("")
    return "\n".join(lines)


def _opt_int(s):
    return int(s) if s not in ("", None) else None


def oracle_from_config(cfg):
    b = cfg["backend"]
    kind = b["kind"].strip().lower()
    if kind == "freeproduct":
        return make_oracle(BackendConfig("freeproduct", orders=tuple(b["orders"].split())))
    if kind == "quasitree":
        return make_oracle(BackendConfig("quasitree", k=int(b["k"])))
    if kind == "explicit":
        if not b["graph"]:
            raise ValueError("explicit backend needs 'graph = <file>'")
        return make_oracle(BackendConfig("explicit", path=b["graph"]))
    if kind == "cayley":
        if b["rws"]:
            rs = RewriteSystem.from_text(Path(b["rws"]).read_text())
        elif b["presentation"]:
            p = Presentation.from_file(b["presentation"])
            rs = kb_complete(p, int(b["kb_max_rules"]), int(b["kb_max_len"]))
        else:
            raise ValueError("cayley backend needs 'presentation' or 'rws'")
        L = None
        if not rs.is_confluent:
            spec = b["certify"].split()
            if len(spec) != 4 or spec[0] != "vondyck":
                raise BudgetExhausted("rewriting system is not confluent and no 'certify = vondyck l m n' is configured")
            rep = VonDyckRepresentation(*map(int, spec[1:]), symbols=rs.alphabet)
            L = certify_normal_forms(rs, rep, int(b["kb_max_len"]) + 1)
            log.info("normal forms certified up to length %d", L)
        return make_oracle(BackendConfig("cayley", rewriting=rs, certified_length=L))
    raise ValueError(f"unknown backend kind {kind!r}")


def _fit(cfg, oracle):
    p = cfg["params"]
    rep = fit_automaton(
        oracle,
        int(p["explore_radius"]),
        delta=p["delta"].strip(),
        max_delta=int(p["max_delta"]),
        validation_radius=_opt_int(p["validation_radius"]),
        exhaustive_radius=_opt_int(p["exhaustive_radius"]),
        reps_per_type=int(p["reps_per_type"]),
    )
    if rep.violations:
        raise InvariantViolation("; ".join(rep.violations[:5]))
    if rep.automaton.closure != CLOSED:
        raise BudgetExhausted(f"automaton is {rep.automaton.closure}; raise explore_radius")
    return rep


def _out_path(cfg, args, suffix):
    d = Path(cfg["output"]["dir"])
    d.mkdir(parents=True, exist_ok=True)
    return d / f"{cfg['output']['prefix']}{suffix}"


def _emit(args, text):
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_ball(cfg, args):
    oracle = oracle_from_config(cfg)
    R = int(cfg["params"]["radius"])
    ball = build_ball(oracle, R)
    info = {
        "base": ball.base,
        "radius": R,
        "sphere_sizes": ball.sphere_sizes,
        "ball_sizes": ball.ball_sizes,
    }
    if R >= 2:
        d = estimate_delta(ball, int(cfg["params"]["delta_samples"]), int(cfg["params"]["seed"]))
        info["delta_estimate"] = str(d)
    try:
        info["automorphisms"] = ball_automorphism_count(ball, cap=int(cfg["params"]["aut_cap"]))
    except TooLargeError as exc:
        info["automorphisms"] = f"skipped: {exc}"
    _emit(args, json.dumps(info, indent=2, sort_keys=True))


def cmd_deadends(cfg, args):
    oracle = oracle_from_config(cfg)
    ball = build_ball(oracle, int(cfg["params"]["radius"]))
    rep = dead_end_census(ball)
    lines = ["n,sphere,dead_ends,density"]
    for lv in rep.levels:
        lines.append(f"{lv.level},{lv.sphere},{lv.dead_ends},{lv.density}")
    _emit(args, "\n".join(lines) + "\n")


def cmd_automaton(cfg, args):
    oracle = oracle_from_config(cfg)
    rep = _fit(cfg, oracle)
    a = rep.automaton
    _out_path(cfg, args, ".aut").write_text(a.to_text())
    _out_path(cfg, args, ".dot").write_text(a.to_dot())
    _emit(args, json.dumps({"closure": a.closure, "delta": a.delta, "r": a.r, "states": a.n_states,
                            "edges": len(a.edges), "predicted": rep.predicted, "bfs": rep.bfs_spheres,
                            "validated_up_to": rep.validated_up_to,
                            "note": "delta chosen by escalation; heuristic, not a certified hyperbolicity constant"},
                           indent=2, sort_keys=True))


def _series(cfg, oracle):
    rep = _fit(cfg, oracle)
    p = cfg["params"]
    sphere, ball = sphere_and_ball_series(rep.automaton, rep.bfs_spheres[: rep.validated_up_to + 1], int(p["guard"]))
    balls = [int(x) for x in rf.series_expand(ball, len(rep.bfs_spheres) - 1)]
    return rep, sphere, ball, growth_rate_check(sphere, balls)


def cmd_series(cfg, args):
    oracle = oracle_from_config(cfg)
    rep, sphere, ball, growth = _series(cfg, oracle)
    p = cfg["params"]
    coeffs = rf.series_expand(sphere, int(p["omega_terms"]))
    omega = omega_analytic(sphere, int(p["K"]), float(p["tol"]), check=coeffs)
    _emit(args, growth_json(sphere, ball, growth, omega))


def cmd_subcount(cfg, args):
    Y, _ = read_graph_file(args.graph)
    oracle = oracle_from_config(cfg)
    R = int(cfg["params"]["radius"])
    ball = build_ball(oracle, R)
    counts, fitted = subgraph_series(Y, ball, guard=int(cfg["params"]["guard"]))
    obj = {"counts": counts, "fitted": fitted.to_json() if fitted else {"nofit": fitted.reason}}
    if args.images:
        from .refine import automorphism_count

        aut = automorphism_count(Y.adjacency)
        obj["images"] = [c // aut for c in counts]
    _emit(args, json.dumps(obj, indent=2, sort_keys=True))
    if not fitted:
        return EXIT_BUDGET
    return EXIT_OK


def _read_coeffs(path):
    out = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("format"):
            continue
        for tok in line.replace(",", " ").split():
            try:
                out.append(Fraction(tok))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: {tok!r} is not an exact rational") from None
    return out


def cmd_omega(cfg, args):
    p = cfg["params"]
    K, tol, N_max = int(p["K"]), float(p["tol"]), int(p["N_max"])
    if args.coeffs:
        coeffs = _read_coeffs(args.coeffs)
        res = omega_empirical(coeffs, K, tol, N_max)
    else:
        if args.ratfun:
            f = rf.RatFun.from_text(Path(args.ratfun).read_text())
        else:
            _, f, _, _ = _series(cfg, oracle_from_config(cfg))
        coeffs = rf.series_expand(f, int(p["omega_terms"]))
        res = omega_analytic(f, K, tol, check=coeffs) if args.method == "analytic" \
            else omega_empirical(coeffs, K, tol, N_max)
    _emit(args, json.dumps(res.to_json(), indent=2, sort_keys=True))
    if res.N is None:
        return EXIT_BUDGET
    return EXIT_OK


def cmd_kb(cfg, args):
    p = Presentation.from_file(args.presentation)
    b = cfg["backend"]
    rs = kb_complete(p, args.max_rules or int(b["kb_max_rules"]), args.max_len or int(b["kb_max_len"]))
    _emit(args, rs.to_text())
    log.info("%s, %d rules", rs.status, len(rs.rules))
    return EXIT_OK if rs.is_confluent else EXIT_BUDGET


def cmd_check(cfg, args):
    oracle = oracle_from_config(cfg)
    rep, sphere, ball, growth = _series(cfg, oracle)
    summary = {
        "delta": rep.automaton.delta,
        "states": rep.automaton.n_states,
        "closure": rep.automaton.closure,
        "vertices_checked": rep.checked_vertices,
        "cone_pairs_checked": rep.cone_pairs,
        "violations": rep.violations,
        "validated_up_to": rep.validated_up_to,
        "lambda_simple": growth.simple,
        "flags": growth.flags,
    }
    _emit(args, json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_INVARIANT if growth.flags and not growth.simple else EXIT_OK


COMMANDS = {
    "ball": cmd_ball,
    "deadends": cmd_deadends,
    "automaton": cmd_automaton,
    "series": cmd_series,
    "subcount": cmd_subcount,
    "omega": cmd_omega,
    "kb": cmd_kb,
    "check": cmd_check,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hyperbolike", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="sectioned key = value config file")
    ap.add_argument("--print-config", action="store_true", help="print the effective configuration and exit")
    ap.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE", help="override a config value")
    ap.add_argument("--json-diagnostics", action="store_true", help="diagnostics on stderr as JSON")
    ap.add_argument("--threads", type=int, default=1, help="worker cap (results never depend on it)")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command")
    for name in ("ball", "deadends", "automaton", "series", "check"):
        sp = sub.add_parser(name)
        sp.add_argument("--out")
    sp = sub.add_parser("subcount")
    sp.add_argument("graph")
    sp.add_argument("--images", action="store_true", help="also report counts divided by |Aut(Y)|")
    sp.add_argument("--out")
    sp = sub.add_parser("omega")
    src = sp.add_mutually_exclusive_group()
    src.add_argument("--coeffs")
    src.add_argument("--ratfun")
    sp.add_argument("--method", choices=("analytic", "empirical"), default="analytic")
    sp.add_argument("--out")
    sp = sub.add_parser("kb")
    sp.add_argument("presentation")
    sp.add_argument("--max-rules", type=int)
    sp.add_argument("--max-len", type=int)
    sp.add_argument("--out")
    return ap


def _diagnose(args, code, exc):
    if args.json_diagnostics:
        sys.stderr.write(json.dumps({"exit": code, "error": type(exc).__name__, "message": str(exc)}) + "\n")
    else:
        sys.stderr.write(f"error: {exc}\n")
    return code


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        for item in args.set:
            key, _, value = item.partition("=")
            section, _, opt = key.partition(".")
            if section not in cfg or not opt:
                raise ValueError(f"bad --set {item!r}")
            cfg[section][opt] = value
    except (OSError, ValueError, configparser.Error) as exc:
        return _diagnose(args, EXIT_INPUT, exc)
    if args.print_config:
        sys.stdout.write(print_config(cfg))
        return EXIT_OK
    if not args.command:
        ap.print_help()
        return EXIT_INPUT
    try:
        rc = COMMANDS[args.command](cfg, args)
        return EXIT_OK if rc is None else rc
    except (TypeCollision, IntegrityError, InvariantViolation, CertificationError) as exc:
        return _diagnose(args, EXIT_INVARIANT, exc)
    except (BudgetExhausted, TooLargeError) as exc:
        return _diagnose(args, EXIT_BUDGET, exc)
    except (BackendError, RewriteError, BallConstructionError, OSError, ValueError) as exc:
        return _diagnose(args, EXIT_INPUT, exc)


if __name__ == "__main__":
    sys.exit(main())
