"""Command-line front end and machine-readable reporting.

Subcommands: ``pressure``, ``gurevich``, ``loops``, ``group-ext``,
``flow``, ``fixtures``, ``selftest``.  Exit codes: 0 success, 2 validation
error, 3 convergence or resource error, 4 when the mathematical answer is
an infinity (a legitimate result; ``--allow-infinite`` downgrades it to 0).

Reports are JSON by default; the ``results`` section is a pure function
of the configuration, so identical configs produce byte-identical result
payloads.  CSV output is available for sequence-valued runs.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__
from .config import RunConfig, ValidationError
from .errors import ConvergenceError, DomainError, PreconditionError, ResourceError
from .fixtures import farey_tail_majorant, list_fixtures
from .flows import savchenko_entropy, flow_pressure, FlowSpec
from .groups import (
    ExtensionShift,
    FiniteTableGroup,
    FreeGroup,
    ZPowerGroup,
    irreducibility_report,
    pressure_gap,
)
from .loops import enumerate_simple_loops, loop_pressure
from .potentials import zero
from .pressure import (
    estimate_pressure_window,
    exhaustion_sequence,
    pseudo_inverse_pressure,
)
from .shifts import Truncation, periodic_at, truncate_range

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_CONVERGENCE = 3
EXIT_DIVERGENCE = 4


def run(config: RunConfig, command: str) -> dict:
    """Dispatch a validated configuration and assemble the report."""
    t0 = time.perf_counter()
    results = _dispatch(config, command)
    wall = time.perf_counter() - t0
    return {
        "version": __version__,
        "command": command,
        "config_hash": config.config_hash(),
        "config": config.normalized(),
        "results": results,
        "wall_time_s": wall,
    }


def _truncation(config: RunConfig, spec) -> Truncation:
    n = int(config.data["run"]["trunc"])
    return truncate_range(spec, n)


def _auto_tail(config, spec, phi, psi, cap):
    """Fixture-declared tail majorant, when the run matches one."""
    if config.data["run"].get("tail") == "none":
        return None
    if (
        spec.family == "renewal"
        and psi.name == "alpha_farey_geometric"
        and phi.name in ("zero", "const(0)")
        and int(config.data["run"]["at"]) == 1
    ):
        return farey_tail_majorant(cap)
    return None


def _dispatch(config: RunConfig, command: str) -> list:
    run_cfg = config.data["run"]
    if command == "fixtures":
        return [{"fixtures": list_fixtures()}]
    if command == "selftest":
        return selftest()
    if command == "group-ext":
        ext = _build_extension(config)
        rep = pressure_gap(ext, int(config.data["group"]["nmax"]))
        out = rep.to_dict()
        out["irreducibility"] = irreducibility_report(ext).to_dict()
        return [out]

    spec = config.build_shift()
    phi = config.build_potential("phi")
    psi = config.build_potential("psi")
    collection = config.parse_collection(run_cfg["collection"])
    trunc = _truncation(config, spec)
    tol = float(run_cfg["tol"])

    if command == "loops":
        at = int(run_cfg["at"])
        inv = enumerate_simple_loops(
            spec, periodic_at(at), trunc, int(run_cfg["loop_cap"])
        )
        counts = inv.counts()
        return [{
            "kind": inv.kind,
            "counts": {str(n): str(c) for n, c in counts.items()},
            "total": str(sum(counts.values())),
            "complete_below": inv.complete_below(min(inv.max_len, len(trunc))),
        }]

    if command == "gurevich":
        at = int(run_cfg["at"])
        cap = int(run_cfg["loop_cap"])
        inv = enumerate_simple_loops(spec, periodic_at(at), trunc, cap)
        res = loop_pressure(inv, phi, psi, tol=tol,
                            tail_majorant=_auto_tail(config, spec, phi, psi, cap))
        return [res.to_dict()]

    if command == "flow":
        flow = FlowSpec(spec, psi, phi)  # psi is the height, phi the observable
        res = flow_pressure(flow, trunc, int(run_cfg["loop_cap"]),
                            at=int(run_cfg["at"]) if run_cfg.get("at") else None,
                            tol=tol)
        return [res.to_dict()]

    if command == "pressure":
        method = run_cfg["method"]
        if method == "auto":
            method = "pseudo" if collection.kind in ("all", "periodic_at") else "window"
        if method == "pseudo":
            res = pseudo_inverse_pressure(trunc, phi, psi, collection, tol=tol)
        elif method == "loop":
            at = int(run_cfg["at"])
            cap = int(run_cfg["loop_cap"])
            inv = enumerate_simple_loops(spec, periodic_at(at), trunc, cap)
            res = loop_pressure(inv, phi, psi, tol=tol,
                                tail_majorant=_auto_tail(config, spec, phi, psi, cap))
        elif method == "window":
            tmax = float(run_cfg["tmax"])
            eta = float(run_cfg["eta"])
            grid = [eta * k for k in range(1, max(2, int(tmax / eta)) + 1)]
            res = estimate_pressure_window(
                spec, phi, psi, collection, trunc,
                eta=eta, t_grid=grid, length_cap=int(run_cfg["length_cap"]),
            )
        else:  # exhaust
            n = int(run_cfg["trunc"])
            sizes = sorted({max(1, n // 8), max(1, n // 4), max(1, n // 2), n})
            res = exhaustion_sequence(
                spec, phi, psi, collection,
                [range(1, m + 1) for m in sizes], tol=tol,
            )
        return [res.to_dict()]

    raise ValidationError(f"unknown command {command!r}")


def _build_extension(config: RunConfig) -> ExtensionShift:
    g = config.data["group"]
    kind = str(g["kind"])
    if kind.startswith("z^"):
        group = ZPowerGroup(int(kind[2:]))
    elif kind.startswith("free:"):
        group = FreeGroup(int(kind.split(":", 1)[1]))
    elif kind.startswith("file:"):
        group = load_table_group(kind.split(":", 1)[1])
    else:
        raise ValidationError(f"group.kind: cannot parse {kind!r}")
    return ExtensionShift(group, g["variant"])


def load_table_group(path: str) -> FiniteTableGroup:
    """Multiplication table file: a header line of element names, then
    one whitespace-separated row of the table per element."""
    with open(path) as fh:
        rows = [line.split() for line in fh if line.strip()]
    if len(rows) < 2:
        raise ValidationError(f"{path}: need a header line and table rows")
    names = rows[0]
    index = {nm: i for i, nm in enumerate(names)}
    if len(rows) != len(names) + 1:
        raise ValidationError(f"{path}: expected {len(names)} table rows")
    table = []
    for r in rows[1:]:
        if len(r) != len(names):
            raise ValidationError(f"{path}: ragged table row {r}")
        try:
            table.append([index[x] for x in r])
        except KeyError as e:
            raise ValidationError(f"{path}: unknown element {e.args[0]!r}") from None
    return FiniteTableGroup(names, table)


# -- selftest --------------------------------------------------------------


def selftest() -> list:
    """Golden fixture values plus a quick pass of the pressure laws."""
    import math

    import numpy as np

    from .potentials import alpha_farey_geometric, combine, constant, from_table
    from .shifts import from_matrix, renewal_shift, truncate

    checks = []

    def check(name, got, want, tol):
        ok = abs(got - want) <= tol
        checks.append({"check": name, "value": got, "expected": want, "pass": ok})

    rn = renewal_shift()
    psi = alpha_farey_geometric()
    cap = 20000
    tr = truncate_range(rn, cap)
    inv = enumerate_simple_loops(rn, periodic_at(1), tr, cap)
    check(
        "farey loop pressure (zero potential)",
        loop_pressure(inv, zero(), psi, tail_majorant=farey_tail_majorant(cap)).value,
        1.0, 1e-5,
    )
    check("farey unit-scaling pressure", loop_pressure(inv, zero(), constant(1.0)).value,
          math.log(2.0), 1e-9)

    from .shifts import full_shift

    fs = full_shift(2)
    trf = truncate(fs, fs.symbols)
    check("full-shift entropy", pseudo_inverse_pressure(trf, zero(), constant(1.0)).value,
          math.log(2.0), 1e-9)
    check("unit suspension entropy",
          savchenko_entropy(fs, trf, 60, height=constant(1.0)).value, math.log(2.0), 1e-9)

    ext = ExtensionShift(ZPowerGroup(1), "plain")
    rep = pressure_gap(ext, 512)
    checks.append({"check": "walk extension verdict", "value": rep.verdict,
                   "expected": "amenable-consistent",
                   "pass": rep.verdict == "amenable-consistent"})

    rng = np.random.default_rng(20240901)
    laws_ok = True
    for _ in range(5):
        rows = (rng.random((5, 5)) < 0.6).astype(int)
        for i in range(5):
            rows[i, (i + 1) % 5] = 1
        spec = from_matrix(rows)
        t = truncate(spec, spec.symbols)
        phi = from_table(1, {s: v for s, v in zip(spec.symbols, rng.uniform(-1, 1, 5))})
        psi2 = from_table(
            1, {s: v for s, v in zip(spec.symbols, rng.uniform(0.5, 2, 5))},
            strictly_positive=True,
        )
        psi_vals = [psi2((s,)) for s in spec.symbols]
        base = pseudo_inverse_pressure(t, phi, psi2).value
        up = pseudo_inverse_pressure(t, combine(phi, constant(0.5), (1, 1)), psi2).value
        laws_ok &= up >= base - 1e-9
        laws_ok &= 0.5 / max(psi_vals) - 1e-9 <= up - base <= 0.5 / min(psi_vals) + 1e-9
        two = pseudo_inverse_pressure(t, combine(phi, zero(), (2, 0)), psi2).value
        laws_ok &= two <= 2 * base + 1e-9
        from .potentials import coboundary

        h = from_table(1, {s: v for s, v in zip(spec.symbols, rng.uniform(-1, 1, 5))})
        moved = pseudo_inverse_pressure(
            t, combine(phi, coboundary(h), (1, 1)), psi2
        ).value
        laws_ok &= abs(moved - base) <= 1e-9
    checks.append({"check": "pressure laws (monotone/translation/subhomogeneous/"
                            "cocycle) on random shifts",
                   "value": bool(laws_ok), "expected": True, "pass": bool(laws_ok)})
    return checks


# -- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="induced-pressure",
        description="Scaling-induced topological pressure on Markov shifts",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, group=False):
        sp.add_argument("--config", help="TOML run configuration")
        sp.add_argument("--json", action="store_true", help="force JSON output")
        sp.add_argument("--format", choices=["json", "csv", "text"])
        sp.add_argument("--allow-infinite", action="store_true",
                        help="exit 0 on an infinite verdict")
        sp.add_argument("--out", help="write the report to this file")

    for name, help_ in [
        ("pressure", "induced pressure of phi in psi-time over a collection"),
        ("gurevich", "loop-route pressure over periodic words at a symbol"),
        ("loops", "enumerate/count simple loops"),
        ("flow", "semi-flow pressure/entropy (psi is the height)"),
    ]:
        sp = sub.add_parser(name, help=help_)
        common(sp)
        sp.add_argument("--shift", help="full:N | renewal | config-provided")
        sp.add_argument("--phi", help="potential: zero|constant:C|alpha_farey_geometric|first_symbol_negated")
        sp.add_argument("--psi", help="potential (same forms); flow height")
        sp.add_argument("--tau", help="alias for --psi in flows")
        sp.add_argument("--delta-g", dest="delta_g", help="alias for --phi in flows")
        sp.add_argument("--collection", help="all | periodic | periodic@A | starting:A,B")
        sp.add_argument("--method", choices=["window", "pseudo", "exhaust", "loop", "auto"])
        sp.add_argument("--trunc", type=int, help="retain symbols 1..N")
        sp.add_argument("--eta", type=float, help="window width")
        sp.add_argument("--tmax", type=float, help="largest window endpoint")
        sp.add_argument("--length-cap", dest="length_cap", type=int)
        sp.add_argument("--max-len", dest="loop_cap", type=int, help="loop length cap")
        sp.add_argument("--at", type=int, help="base symbol for loops/flows")
        sp.add_argument("--counts-only", action="store_true")
        sp.add_argument("--tail", choices=["auto", "none"],
                        help="use a fixture tail majorant when available")

    sp = sub.add_parser("group-ext", help="amenability gap of a group extension")
    common(sp)
    sp.add_argument("--group", help="z^d | free:k | file:TABLE")
    sp.add_argument("--variant", choices=["plain", "nobacktrack"])
    sp.add_argument("--nmax", type=int)

    sp = sub.add_parser("fixtures", help="list built-in fixtures and expected values")
    common(sp)
    sp = sub.add_parser("selftest", help="run golden-value and pressure-law checks")
    common(sp)
    return p


def _config_from_args(args) -> RunConfig:
    if getattr(args, "config", None):
        with open(args.config) as fh:
            cfg = RunConfig.from_text(fh.read())
    else:
        cfg = RunConfig.from_dict({})
    shift = getattr(args, "shift", None)
    if shift:
        if shift == "renewal":
            cfg.data["shift"] = {"family": "renewal"}
        elif shift.startswith("full:"):
            cfg.data["shift"] = {"family": "full", "n": int(shift.split(":", 1)[1])}
        else:
            raise ValidationError(f"--shift: cannot parse {shift!r}")
    for pot, flag in (("phi", "phi"), ("psi", "psi")):
        text = getattr(args, flag, None)
        if pot == "phi" and getattr(args, "delta_g", None):
            text = args.delta_g
        if pot == "psi" and getattr(args, "tau", None):
            text = args.tau
        if text:
            cfg.data[pot] = _parse_potential_text(text)
    for key in ("method", "collection", "trunc", "eta", "tmax", "length_cap",
                "loop_cap", "at", "tail"):
        cfg.override("run", key, getattr(args, key, None))
    for key in ("group", "variant", "nmax"):
        v = getattr(args, key, None)
        if v is not None:
            cfg.data["group"]["kind" if key == "group" else key] = v
    if getattr(args, "format", None):
        cfg.data["output"]["format"] = args.format
    if getattr(args, "json", False):
        cfg.data["output"]["format"] = "json"
    if getattr(args, "allow_infinite", False):
        cfg.data["output"]["allow_infinite"] = True
    cfg.validate()
    return cfg


def _parse_potential_text(text: str) -> dict:
    if text in ("zero", "alpha_farey_geometric", "first_symbol_negated"):
        return {"builtin": text}
    if text.startswith("constant:"):
        return {"builtin": "constant", "c": float(text.split(":", 1)[1])}
    try:
        return {"builtin": "constant", "c": float(text)}
    except ValueError:
        raise ValidationError(f"cannot parse potential {text!r}") from None


def _emit(report: dict, config: RunConfig, args) -> None:
    fmt = config.data["output"]["format"]
    if fmt == "csv":
        lines = []
        for res in report["results"]:
            seq = res.get("sequence")
            if seq is not None:
                lines.append("index,value")
                lines.extend(f"{i},{v}" for i, v in enumerate(seq, start=1))
            elif "fit" in res:
                lines.append("n,log_count_over_n")
                for n, v in res["diagnostics"]["sequence_tail"]:
                    lines.append(f"{n},{v}")
        text = "\n".join(lines) + "\n"
    elif fmt == "text":
        parts = []
        for res in report["results"]:
            parts.append(json.dumps(res, indent=2, sort_keys=True))
        text = "\n".join(parts) + "\n"
    else:
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    out = getattr(args, "out", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _has_infinite(results: list) -> bool:
    for res in results:
        if isinstance(res, dict) and res.get("verdict") in ("+inf", "-inf"):
            return True
    return False


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        report = run(config, args.command)
    except ValidationError as e:
        print(f"validation error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except (DomainError, PreconditionError) as e:
        print(f"validation error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ConvergenceError, ResourceError) as e:
        print(f"computation error: {e}", file=sys.stderr)
        return EXIT_CONVERGENCE
    if args.command == "selftest":
        failed = [c for c in report["results"] if not c["pass"]]
        for c in report["results"]:
            status = "PASS" if c["pass"] else "FAIL"
            print(f"[{status}] {c['check']}: {c['value']} (expected {c['expected']})")
        return EXIT_OK if not failed else 1
    _emit(report, config, args)
    if _has_infinite(report["results"]) and not config.data["output"]["allow_infinite"]:
        return EXIT_DIVERGENCE
    return EXIT_OK


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
