"""``dlimit`` command line.

Exit status: 0 on success, 1 on a bad argument or input file, 2 when a
numerical routine fails. Each subcommand accepts ``--config FILE`` (a JSON
object keyed by the flag names in snake_case); explicit flags win over the
file, and the file wins over built-in defaults.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
from typing import Optional, Sequence

from . import io as dio
from .dynamics import EscapeSpec, PerturbedPower, PowerPoly, RealPower, escape_radius
from .experiments import (
    SweepConfig,
    boundary_circle_probe,
    certified_members,
    julia_annulus_probe,
    m2_emptiness_probe,
    mandelbrot_template,
    r0_annulus_probe,
    run_sweep,
)
from .geometry import (
    critical_fixed_solutions,
    parse_complex,
    parse_target,
    superattracting_center,
    verify_center_dynamics,
)
from .hausdorff import hausdorff_raster, hausdorff_to_target
from .raster import (
    GridSpec,
    boundary_raster,
    filled_julia_raster,
    parameter_escape_radius,
    parameter_raster,
)

ROOTS_HEADER = ("n", "k", "re_w", "im_w", "re_a", "im_a", "residual",
                "sector_theta_low", "sector_theta_high")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def parse_grid(text: str, nx: int, ny: Optional[int] = None) -> GridSpec:
    """``x_min,y_min,x_max,y_max`` plus pixel counts."""
    parts = text.split(",")
    if len(parts) != 4:
        raise ValueError(f"grid must be x_min,y_min,x_max,y_max, got {text!r}")
    x0, y0, x1, y1 = (float(p) for p in parts)
    return GridSpec(x0, x1, y0, y1, nx, ny if ny is not None else nx)


def parse_int_list(text) -> list[int]:
    if isinstance(text, list):
        return [int(v) for v in text]
    return [int(v) for v in str(text).split(",") if v.strip()]


# flag name -> (type, default); None default means required or optional
_COMMON = {
    "grid": (str, "-2,-2,2,2"),
    "px": (int, 512),
    "py": (int, None),
    "max_iter": (int, None),
    "radius": (float, None),
}

SPECS = {
    "render": {
        **_COMMON,
        "family": (str, "P"), "n": (int, 2), "t": (float, None), "c": (str, "0"),
        "a": (str, None), "sampling": (str, "center"), "boundary": (bool, False),
        "out": (str, None),
    },
    "mset": {
        **_COMMON,
        "family": (str, "P"), "n": (int, 2), "t": (float, None), "c": (str, None),
        "mode": (str, "one"), "seed_members": (bool, False), "out": (str, None),
    },
    "hausdorff": {
        "raster": (str, None), "other": (str, None), "target": (str, None),
        "samples": (int, 4096), "out": (str, None),
    },
    "sweep": {
        "out_csv": (str, None), "out_dir": (str, None), "manifest": (str, None),
        "deterministic": (bool, False),
    },
    "centers": {"n": (int, None), "out": (str, None)},
    "roots": {"n": (int, None), "c": (str, None), "out": (str, None)},
    "probe": {
        **_COMMON,
        "kind": (str, None), "c": (str, None), "eta": (float, None), "eps": (float, None),
        "n_list": (str, None), "sampling": (str, "cell"), "out": (str, None),
    },
}

HELP = {
    "render": "rasterize a filled Julia set (or its boundary) to PGM/PNG",
    "mset": "rasterize a parameter-space set to PGM/PNG",
    "hausdorff": "Hausdorff distance between a raster and another raster or a target",
    "sweep": "run a convergence sweep from a JSON config",
    "centers": "superattracting centers a_n^k with their dynamics check (CSV)",
    "roots": "roots of 2w^n - w + c sorted into sectors (CSV)",
    "probe": "annulus / boundary-circle / m2 probes (CSV)",
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dlimit", description="Degree-limit experiments for z^n + c and relatives.")
    p.add_argument("--threads", type=int, default=None, help="worker cap (overrides DLIMIT_THREADS)")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    for name, spec in SPECS.items():
        sp = sub.add_parser(name, help=HELP[name], description=HELP[name])
        sp.add_argument("--config", default=None, help="JSON file with defaults for these flags")
        for key, (typ, _default) in spec.items():
            flag = "--" + key.replace("_", "-")
            if typ is bool:
                sp.add_argument(flag, dest=key, action="store_const", const=True, default=None)
            else:
                sp.add_argument(flag, dest=key, type=typ, default=None)
    return p


_NEGATIVE_VALUE = re.compile(r"^-[\d.]")


def _join_negative_values(argv: Sequence[str]) -> list[str]:
    """``--grid -1,-1,1,1`` -> ``--grid=-1,-1,1,1`` so values may start with '-'."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and i + 1 < len(argv)
                and _NEGATIVE_VALUE.match(argv[i + 1])):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def resolve(command: str, args: argparse.Namespace) -> dict:
    """Merge flag > config file > default for one subcommand."""
    spec = SPECS[command]
    cfg = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise ValueError("config file must hold a JSON object")
    out = {}
    for key, (typ, default) in spec.items():
        v = getattr(args, key)
        if v is None and key in cfg:
            v = cfg[key]
            if v is not None and typ in (int, float):
                v = typ(v)
        out[key] = default if v is None else v
    out["_config"] = cfg
    return out


def _grid(o: dict) -> GridSpec:
    return parse_grid(o["grid"], o["px"], o["py"])


def _complex(text, name: str) -> Optional[complex]:
    if text is None:
        return None
    if isinstance(text, (int, float)):
        return complex(text)
    try:
        return parse_complex(str(text))
    except ValueError:
        raise ValueError(f"--{name}: bad complex number {text!r}") from None


def _need(o: dict, *keys):
    for k in keys:
        if o[k] is None:
            raise ValueError(f"--{k.replace('_', '-')} is required")


def _emit(text: str, out: Optional[str]):
    if out:
        dio.atomic_write(out, text.encode("utf-8"))
    else:
        sys.stdout.write(text)


def cmd_render(o: dict) -> None:
    _need(o, "out")
    fam = o["family"].upper()
    c = _complex(o["c"], "c")
    if fam == "P":
        f = PowerPoly(o["n"], c)
    elif fam == "F":
        _need(o, "t")
        f = RealPower(o["t"], c)
    elif fam == "R":
        _need(o, "a")
        f = PerturbedPower(o["n"], c, _complex(o["a"], "a"))
    else:
        raise ValueError(f"--family must be P, F or R, got {o['family']!r}")
    spec = EscapeSpec(o["radius"] or escape_radius(f), o["max_iter"] or 512)
    r = filled_julia_raster(f, _grid(o), spec, o["sampling"])
    if o["boundary"]:
        r = boundary_raster(r)
    dio.write_raster(r, o["out"])


def cmd_mset(o: dict) -> None:
    _need(o, "out")
    fam = o["family"]
    if fam not in ("P", "F", "R0", "Rc"):
        raise ValueError(f"--family must be P, F, R0 or Rc, got {fam!r}")
    value = o["t"] if fam == "F" else o["n"]
    if value is None:
        raise ValueError("--t is required for family F")
    c = _complex(o["c"], "c")
    tpl = mandelbrot_template(fam, value, c)
    grid = _grid(o)
    spec = EscapeSpec(o["radius"] or parameter_escape_radius(tpl, grid), o["max_iter"] or 256)
    seeds = certified_members(fam, int(value), c, o["mode"]) if o["seed_members"] and fam != "F" else None
    dio.write_raster(parameter_raster(tpl, grid, spec, o["mode"], members=seeds), o["out"])


def cmd_hausdorff(o: dict) -> None:
    _need(o, "raster")
    a = dio.read_raster(o["raster"])
    if (o["other"] is None) == (o["target"] is None):
        raise ValueError("give exactly one of --other and --target")
    if o["other"] is not None:
        rep = hausdorff_raster(a, dio.read_raster(o["other"]))
    else:
        rep = hausdorff_to_target(a, parse_target(o["target"]), o["samples"])
    d = rep.to_dict(grid=a.grid.as_dict(), meta=dict(a.meta))
    _emit(dio.encode_json(d).decode("utf-8"), o["out"])


def cmd_sweep(o: dict) -> None:
    cfg_dict = {k: v for k, v in o["_config"].items() if k not in SPECS["sweep"]}
    for key in SPECS["sweep"]:
        if o[key] not in (None, False) or key in o["_config"]:
            cfg_dict[key] = o[key]
    if not cfg_dict:
        raise ValueError("sweep needs --config")
    table = run_sweep(SweepConfig.from_dict(cfg_dict))
    if not o["out_csv"]:
        sys.stdout.write(table.csv_bytes(o["deterministic"]).decode("utf-8"))
    sys.stdout.write(table.footer() + "\n")


def cmd_centers(o: dict) -> None:
    _need(o, "n")
    rows = []
    for k in range(o["n"] - 1):
        rep = verify_center_dynamics(o["n"], k)
        a = superattracting_center(o["n"], k)
        rows.append((o["n"], k, rep.v_plus.real, rep.v_plus.imag, a.real, a.imag,
                     rep.residual, None, None))
    _emit(dio.encode_csv(ROOTS_HEADER, rows).decode("utf-8"), o["out"])


def cmd_roots(o: dict) -> None:
    _need(o, "n", "c")
    sols = critical_fixed_solutions(o["n"], _complex(o["c"], "c"))
    rows = [
        (o["n"], "none" if s.k is None else s.k, s.w.real, s.w.imag, s.a.real, s.a.imag,
         s.residual, s.theta_low, s.theta_high)
        for s in sols
    ]
    _emit(dio.encode_csv(ROOTS_HEADER, rows).decode("utf-8"), o["out"])


def cmd_probe(o: dict) -> None:
    _need(o, "kind", "n_list")
    kind = o["kind"]
    n_list = parse_int_list(o["n_list"])
    max_iter = o["max_iter"]
    if kind == "annulus":
        if o["eps"] is not None:
            probe = r0_annulus_probe(o["eps"], n_list, _grid(o), max_iter or 256)
        else:
            _need(o, "c", "eta")
            probe = julia_annulus_probe(_complex(o["c"], "c"), o["eta"], n_list, _grid(o),
                                        max_iter or 512, o["sampling"])
        header = ("n", "contained", "interior_covered", "min_modulus", "max_modulus", "eps")
        rows = [(r.n, r.contained, r.interior_covered, r.min_modulus, r.max_modulus, r.eps)
                for r in probe.rows]
        footer = f"# empirical_n = {probe.empirical_n}\n"
    elif kind == "boundary-circle":
        _need(o, "c")
        res = boundary_circle_probe(_complex(o["c"], "c"), n_list, max_iter or 512)
        header = ("n", "member", "certified", "residual")
        rows = [(r.n, r.member, r.certified, r.residual) for r in res]
        footer = ""
    elif kind == "m2":
        _need(o, "c")
        probe = m2_emptiness_probe(_complex(o["c"], "c"), n_list, _grid(o), max_iter or 256)
        header = ("n", "set_cells")
        rows = [(r.n, r.set_cells) for r in probe.rows]
        footer = f"# threshold = {probe.threshold}\n"
    else:
        raise ValueError(f"--kind must be annulus, boundary-circle or m2, got {kind!r}")
    _emit(dio.encode_csv(header, rows).decode("utf-8") + footer, o["out"])


COMMANDS = {
    "render": cmd_render, "mset": cmd_mset, "hausdorff": cmd_hausdorff, "sweep": cmd_sweep,
    "centers": cmd_centers, "roots": cmd_roots, "probe": cmd_probe,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_join_negative_values(argv))
        if args.command is None:
            raise UsageError(parser.format_usage() + "dlimit: error: a command is required")
        if args.threads is not None:
            if args.threads < 1:
                raise ValueError("--threads must be >= 1")
            os.environ["DLIMIT_THREADS"] = str(args.threads)
        COMMANDS[args.command](resolve(args.command, args))
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (ArithmeticError, FloatingPointError, AssertionError) as exc:
        print(f"dlimit: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"dlimit: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
