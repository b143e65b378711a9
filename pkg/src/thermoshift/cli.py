"""Command-line entry point: ``thermoshift <command> --graph G.json [options]``.

Exit status is 0 on success, 1 on bad input and 2 when a computed check
fails (the report is still written).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .gibbs import DELTA_0, gibbs_ratio_bounds, search_K_delta, wb_bound, weak_bernoulli_statistic
from .graph import (DirectedGraph, GraphError, is_transitive, period, spectral_decomposition,
                    transitive_components)
from .io import InputError, csv_text, dumps, load_graph, load_manifest, load_potential, potential_to_dict
from .potentials import LocallyConstantPotential, PotentialError, constant_potential
from .rotation import (build_rotation_factor, entropy_identity_check, power_potential_pressure_check,
                       product_structure_witness)
from .rpf import (ConvergenceError, equilibrium_measure, solve_rpf, truncation_pressure_sequence)
from .sinai import certify_one_sided, sinai_reduce

COMMANDS = ("analyze", "reduce", "equilibrium", "gibbs-check", "mixing", "factorize", "truncate")
RESIDUAL_TOL = 1e-10


@dataclass
class RunConfig:
    command: str
    graph_path: str | None = None
    potential_path: str | None = None
    params: dict = field(default_factory=dict)


@dataclass
class Outcome:
    text: str
    ok: bool = True


def _label(state) -> str:
    if isinstance(state, tuple):
        return " ".join(_label(s) for s in state)
    return str(state)


def _threads() -> int:
    raw = os.environ.get("THERMOSHIFT_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"THERMOSHIFT_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InputError(f"THERMOSHIFT_THREADS must be a positive integer, got {raw!r}")
    return n


def _inputs(cfg: RunConfig) -> tuple[DirectedGraph, LocallyConstantPotential]:
    if cfg.graph_path is None:
        raise InputError(f"{cfg.command} needs --graph")
    g = load_graph(cfg.graph_path)
    if cfg.potential_path is None:
        return g, constant_potential(g, 0.0)
    return g, load_potential(cfg.potential_path, g)


def _one_sided(phi: LocallyConstantPotential) -> LocallyConstantPotential:
    return phi if phi.one_sided else sinai_reduce(phi).phi


def _states(tokens: str | None, states: tuple, flag: str):
    """Parse ``a,b`` (or block words ``a b,b a``) into a set of measure states."""
    if tokens is None:
        return None
    out = []
    for tok in tokens.split(","):
        word = tuple(tok.split())
        if not word:
            raise InputError(f"{flag}: empty entry")
        hits = [s for s in states if s[:len(word)] == word]
        if not hits:
            raise InputError(f"{flag}: {tok!r} is not a vertex of the graph")
        out.extend(hits)
    return tuple(dict.fromkeys(out))


def _measure(cfg: RunConfig):
    g, phi = _inputs(cfg)
    sol = solve_rpf(g, _one_sided(phi))
    return g, sol, equilibrium_measure(sol)


def cmd_analyze(cfg: RunConfig) -> Outcome:
    if cfg.graph_path is None:
        raise InputError("analyze needs --graph")
    g = load_graph(cfg.graph_path)
    trans = is_transitive(g)
    report = {"vertices": len(g.vertices), "edges": len(g.edges), "removed": list(g.removed),
              "transitive": trans}
    if trans:
        dec = spectral_decomposition(g)
        report["period"] = period(g)
        report["classes"] = [sorted(c) for c in dec.classes]
    report["components"] = [list(h.vertices) for h in transitive_components(g)]
    return Outcome(dumps(report))


def cmd_reduce(cfg: RunConfig) -> Outcome:
    g, psi = _inputs(cfg)
    if cfg.potential_path is None:
        raise InputError("reduce needs --potential")
    try:
        red = sinai_reduce(psi)
    except PotentialError as exc:
        return Outcome(dumps({"error": str(exc)}), ok=False)
    return Outcome(dumps(potential_to_dict(red.phi)), ok=certify_one_sided(red.phi))


def cmd_equilibrium(cfg: RunConfig) -> Outcome:
    g, sol, mu = _measure(cfg)
    res = sol.residuals()
    labels = [_label(s) for s in mu.states]
    report = {
        "lambda": sol.lam,
        "pressure": sol.pressure,
        "block_length": sol.transfer.k,
        "iterations": sol.iterations,
        "h": dict(zip(labels, sol.h)),
        "nu": dict(zip(labels, sol.nu)),
        "pi": dict(zip(labels, mu.pi)),
        "P": {a: {b: mu.P[i, j] for j, b in enumerate(labels) if mu.P[i, j] > 0} for i, a in enumerate(labels)},
        "residuals": res,
    }
    return Outcome(dumps(report), ok=all(v <= RESIDUAL_TOL for v in res.values()))


def cmd_gibbs(cfg: RunConfig) -> Outcome:
    g, sol, mu = _measure(cfg)
    s_star = _states(cfg.params.get("s_star"), mu.states, "--s-star")
    cert = gibbs_ratio_bounds(mu, s_star, cfg.params.get("max_len") or 3)
    case, a, c = cert.worst_pair
    report = {
        "s_star": [_label(s) for s in cert.s_star],
        "c_star": cert.c_star,
        "c1": cert.c1,
        "c2": cert.c2,
        "m_const": cert.m_const,
        "m_average": cert.m_average,
        "c_star_m_const": cert.c_star_m,
        "observed_min": cert.observed[0],
        "observed_max": cert.observed[1],
        "c_star_observed": cert.c_star_observed,
        "worst_pair": {"case": case, "a": _label(a), "c": _label(c)},
        "pairs": cert.n_pairs,
        "holds": cert.holds(),
    }
    return Outcome(dumps(report), ok=cert.holds())


def cmd_mixing(cfg: RunConfig) -> Outcome:
    g, sol, mu = _measure(cfg)
    delta = cfg.params.get("delta") or 0.1
    if not 0 < delta < DELTA_0:
        raise InputError(f"--delta must lie in (0, {DELTA_0})")
    v_prime = _states(cfg.params.get("v_prime"), mu.states, "--v-prime")
    report = weak_bernoulli_statistic(mu, v_prime, cfg.params.get("n_max") or 4, cfg.params.get("k_max") or 20,
                                      delta, workers=_threads())
    try:
        K = search_K_delta(mu, delta).K
    except ConvergenceError:
        K = None
    bound = wb_bound(delta)
    # a row passes only if the bound holds and the measure was certified mixing
    rows = [(n, k, wb, bound, str(K is not None and wb < bound).lower()) for n, k, wb in report.rows()]
    ok = K is not None and all(wb < bound for n, k, wb in report.rows() if k > K)
    if cfg.params.get("format") == "json":
        text = dumps({"delta": delta, "bound": bound, "K_delta": K, "mixing": K is not None,
                      "rows": [{"n": n, "k": k, "wb": wb, "pass": p == "true"} for n, k, wb, _, p in rows]})
    else:
        text = csv_text(("n", "k", "wb", "bound", "pass"), rows)
    return Outcome(text, ok=ok)


def cmd_factorize(cfg: RunConfig) -> Outcome:
    g, psi = _inputs(cfg)
    if not is_transitive(g):
        raise GraphError("factorize needs a transitive graph")
    sol = solve_rpf(g, _one_sided(psi))
    mu = equilibrium_measure(sol)
    # work on the block graph the measure lives on; it has the same period
    g, phi = sol.transfer.graph, sol.transfer.potential
    rf = build_rotation_factor(g, mu)
    lhs, rhs = entropy_identity_check(rf, mu)
    p_times, power = power_potential_pressure_check(g, phi)
    wit = product_structure_witness(rf, mu)
    ent_ok = all(abs(v - rhs) <= 1e-9 for v in lhs)
    pres_ok = all(abs(v - p_times) <= 1e-9 for v in power)
    report = {
        "p": rf.p,
        "classes": [[_label(v) for v in sorted(c)] for c in rf.classes],
        "mu_Xi": list(rf.class_mass),
        "entropy_check": {"conditioned": lhs, "p_times_entropy": rhs, "ok": ent_ok},
        "pressure_check": {"p_times_pressure": p_times, "power": power, "ok": pres_ok},
        "witness": {"index_process": wit.index_process, "pushforward_ok": wit.pushforward_ok,
                    "entropy_ok": wit.entropy_ok},
    }
    return Outcome(dumps(report), ok=ent_ok and pres_ok and wit.passed)


def cmd_truncate(cfg: RunConfig) -> Outcome:
    manifest = cfg.params.get("manifest")
    if manifest is None:
        raise InputError("truncate needs --manifest")
    gs = [load_graph(p) for p in load_manifest(manifest)]
    phi = None if cfg.potential_path is None else load_potential(cfg.potential_path, gs[-1])
    pressures = truncation_pressure_sequence(gs, phi)
    rows = [(i, len(h.vertices), len(h.edges), pr) for i, (h, pr) in enumerate(zip(gs, pressures))]
    ok = all(b >= a for a, b in zip(pressures, pressures[1:]))
    if cfg.params.get("format") == "json":
        return Outcome(dumps([{"index": i, "vertices": v, "edges": e, "pressure": pr} for i, v, e, pr in rows]), ok)
    return Outcome(csv_text(("index", "vertices", "edges", "pressure"), rows), ok)


HANDLERS = {
    "analyze": cmd_analyze,
    "reduce": cmd_reduce,
    "equilibrium": cmd_equilibrium,
    "gibbs-check": cmd_gibbs,
    "mixing": cmd_mixing,
    "factorize": cmd_factorize,
    "truncate": cmd_truncate,
}


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    """Execute one command; returns the exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    if cfg.command not in HANDLERS:
        print(f"error: unknown command {cfg.command!r}", file=stderr)
        return 1
    try:
        out = HANDLERS[cfg.command](cfg)
    except (InputError, GraphError, PotentialError, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    except ConvergenceError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    path = cfg.params.get("out")
    if path:
        try:
            Path(path).write_text(out.text)
        except OSError as exc:
            print(f"error: cannot write --out {path}: {exc.strerror}", file=stderr)
            return 1
    else:
        stdout.write(out.text)
    if not out.ok:
        print(f"{cfg.command}: check failed", file=stderr)
        return 2
    return 0


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _real(text: str) -> float:
    x = float(text)
    if not math.isfinite(x):
        raise argparse.ArgumentTypeError("must be finite")
    return x


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", metavar="PATH")
    common.add_argument("--potential", metavar="PATH")
    common.add_argument("--manifest", metavar="PATH", help="list of nested graph files (truncate)")
    common.add_argument("--delta", type=_real)
    common.add_argument("--n-max", type=_positive)
    common.add_argument("--k-max", type=_positive)
    common.add_argument("--max-len", type=_positive)
    common.add_argument("--s-star", metavar="a,b")
    common.add_argument("--v-prime", metavar="a,b")
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--format", choices=("json", "csv"))
    parser = argparse.ArgumentParser(prog="thermoshift",
                                     description="Thermodynamic formalism on finite Markov shifts.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    params = {k: getattr(args, k) for k in ("manifest", "delta", "n_max", "k_max", "max_len", "s_star",
                                            "v_prime", "out", "format")}
    return run(RunConfig(args.command, args.graph, args.potential, params))


if __name__ == "__main__":
    sys.exit(main())
