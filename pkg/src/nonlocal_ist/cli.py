"""Command line: ``python -m nonlocal_ist <command> [flags]``.

Commands
--------
generate     write a potential file (zero, gaussian, shifted_gaussian, box)
scatter      potential -> scattering data (a, b, d)
reflect      scattering data (or potential) -> reflection pair
evolve       reflection pair -> reflection pair at a later time
reconstruct  reflection pair -> potential
roundtrip    potential -> scatter -> reconstruct, with error report
pde          split-step reference solution
compare      IST solution vs split-step at time t
invariants   structural checks on a potential / scattering / reflection file

Settings come from flags, then from ``--config`` (flat ``key = value``
lines, ``#`` comments; keys are the long flag names without dashes, e.g.
``nk = 2048`` or ``tol-det = 1e-7``), then from built-in defaults.

Exit status: 0 success, 1 numerical failure or (with ``--strict``) a
failed check, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__, config
from .diagnostics import CHECKS, SuiteInputs, run_invariant_suite
from .errors import ConfigurationError, InvalidInputError, ISTError, NumericalError
from .evolution import evolve_reflection, ist_solve
from .grid import UniformGrid
from .io import load_json, save_csv, save_json
from .reconstruction import reconstruct_both, reconstruct_q, relative_l2, roundtrip_report
from .report import DiagnosticsReport, info, upper
from .rh import dump_psi_csv, solve_rh_many
from .scattering import (Potential, ReflectionPair, ScatteringData, box_potential, gaussian_potential,
                         reflection_coefficients, scattering_coefficients, zero_potential)
from .splitstep import conserved_quantity, split_step

COMMANDS = ("generate", "scatter", "reflect", "evolve", "reconstruct", "roundtrip", "pde", "compare",
            "invariants")

DEFAULTS = {
    "kmin": -24.0, "kmax": 24.0, "nk": 1024,
    "xmin": -16.0, "xmax": 16.0, "nx": 512,
    "t": 0.0, "dt": 1e-3, "sigma": None, "workers": 1, "strict": False,
    "kind": "gaussian", "amplitude": 0.08, "shift": 0.0, "width": 1.0, "left": 0.0, "right": 1.0,
    "dealias": False, "linear": False, "mirror": False, "select": ",".join(CHECKS),
}
_TYPES = {"kmin": float, "kmax": float, "nk": int, "xmin": float, "xmax": float, "nx": int, "t": float,
          "dt": float, "sigma": int, "workers": int, "amplitude": float, "shift": float, "width": float,
          "left": float, "right": float, "kind": str, "select": str}
_BOOLS = {"strict", "dealias", "linear", "mirror"}


class UsageError(ISTError):
    pass


def read_config(path) -> dict:
    """Flat ``key = value`` file (``key: value`` accepted too)."""
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    for num, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":" if ":" in line else None
        if sep is None:
            raise ConfigurationError(f"{path}:{num}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split(sep, 1))
        out[key.replace("_", "-").lstrip("-")] = value
    return out


def _convert(key: str, value):
    if value is None or not isinstance(value, str):
        return value
    try:
        if key in _BOOLS:
            low = value.lower()
            if low not in ("1", "0", "true", "false", "yes", "no", "on", "off"):
                raise ValueError(value)
            return low in ("1", "true", "yes", "on")
        if key.startswith("tol-"):
            return float(value)
        return _TYPES.get(key, str)(value)
    except ValueError as exc:
        raise ConfigurationError(f"bad value for {key}: {value!r}") from exc


def resolve(args: argparse.Namespace) -> dict:
    """Merge flags, config file and defaults into one settings dict."""
    file_cfg = read_config(args.config) if args.config else {}
    known = set(DEFAULTS) | {f"tol-{k}" for k in config.TOLERANCES}
    unknown = sorted(set(file_cfg) - known - {"input", "out"})
    if unknown:
        raise ConfigurationError(f"unknown config keys: {', '.join(unknown)}")
    settings = {}
    for key in DEFAULTS:
        flag = getattr(args, key.replace("-", "_"), None)
        if flag is not None and not (key in _BOOLS and flag is False):
            settings[key] = flag
        elif key in file_cfg:
            settings[key] = _convert(key, file_cfg[key])
        else:
            settings[key] = DEFAULTS[key]
    tolerances = {}
    for name in config.TOLERANCES:
        flag = getattr(args, f"tol_{name}", None)
        if flag is not None:
            tolerances[name] = flag
        elif f"tol-{name}" in file_cfg:
            tolerances[name] = _convert(f"tol-{name}", file_cfg[f"tol-{name}"])
    settings["tolerances"] = tolerances
    for key in ("input", "out"):
        val = getattr(args, key, None) or file_cfg.get(key)
        settings[key] = val
    return settings


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nonlocal_ist", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", metavar="command")
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input")
        p.add_argument("--out")
        p.add_argument("--config")
        p.add_argument("--strict", action="store_true", default=None)
        p.add_argument("--workers", type=int)
        p.add_argument("--sigma", type=int, choices=(1, -1))
        for key in ("kmin", "kmax", "xmin", "xmax", "t", "dt"):
            p.add_argument(f"--{key}", type=float)
        p.add_argument("--nk", type=int)
        p.add_argument("--nx", type=int)
        for tol in config.TOLERANCES:
            p.add_argument(f"--tol-{tol}", type=float, dest=f"tol_{tol}")
        if name == "generate":
            p.add_argument("--kind", choices=("zero", "gaussian", "shifted_gaussian", "box"))
            for key in ("amplitude", "shift", "width", "left", "right"):
                p.add_argument(f"--{key}", type=float)
        if name in ("reflect",):
            p.add_argument("--csv", help="also write r1, r2 as CSV")
        if name == "reconstruct":
            p.add_argument("--mirror", action="store_true", default=None,
                           help="use the conj(q(-x)) formula instead of the primary one")
            p.add_argument("--dump-psi", help="CSV dump of Psi- per x")
        if name in ("pde", "compare"):
            p.add_argument("--dealias", action="store_true", default=None)
        if name == "pde":
            p.add_argument("--linear", action="store_true", default=None, help="disable the nonlinear substep")
        if name == "compare":
            p.add_argument("--ist-out")
            p.add_argument("--pde-out")
        if name == "invariants":
            p.add_argument("--select", help=f"comma-separated subset of {', '.join(CHECKS)}")
    return parser


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _kgrid(s) -> UniformGrid:
    return UniformGrid(s["kmin"], s["kmax"], s["nk"])


def _xgrid(s) -> UniformGrid:
    return UniformGrid(s["xmin"], s["xmax"], s["nx"])


def _provenance(command: str, s: dict) -> dict:
    cfg = {k: v for k, v in s.items() if k != "tolerances"}
    cfg["tolerances"] = {**config.TOLERANCES, **s["tolerances"]}
    cfg["input"] = Path(s["input"]).name if s["input"] else None
    cfg["out"] = Path(s["out"]).name if s["out"] else None
    return {"package": "nonlocal_ist", "version": __version__, "command": command, "config": cfg}


def _load(s, *types):
    if not s["input"]:
        raise UsageError("--input is required")
    obj = load_json(s["input"])
    if types and not isinstance(obj, types):
        names = " or ".join(t.__name__ for t in types)
        raise UsageError(f"{s['input']}: expected {names}, got {type(obj).__name__}")
    if isinstance(obj, Potential) and s["sigma"] is not None and s["sigma"] != obj.sigma:
        obj = Potential(obj.field, s["sigma"], obj.metadata)
    return obj


def _save(obj, s, command):
    if s["out"]:
        save_json(obj, s["out"], _provenance(command, s))


def _derived(s, suffix):
    out = Path(s["out"]) if s["out"] else Path("compare.json")
    return out.with_name(f"{out.stem}_{suffix}.json")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def generate_potential(kind: str, params: dict, xgrid: UniformGrid, sigma: int = 1):
    """Build a named potential; ``||q||_1 >= 1`` is refused, ``>= 1/6`` only warned about."""
    if kind == "zero":
        q = zero_potential(xgrid, sigma)
    elif kind in ("gaussian", "shifted_gaussian"):
        shift = params.get("shift", 0.0) if kind == "shifted_gaussian" else 0.0
        if kind == "shifted_gaussian" and shift == 0.0:
            shift = 0.5
        q = gaussian_potential(xgrid, params.get("amplitude", 0.08), shift, params.get("width", 1.0), sigma)
    elif kind == "box":
        q = box_potential(xgrid, params.get("amplitude", 0.1), params.get("left", 0.0),
                          params.get("right", 1.0), sigma)
    else:
        raise InvalidInputError(f"unknown potential kind {kind!r}")
    warn = []
    if q.l1_norm >= config.JOST_NORM_THRESHOLD:
        raise InvalidInputError(f"||q||_1 = {q.l1_norm:.4f} >= 1: Jost solutions are not guaranteed to exist")
    if not q.small_norm:
        warn.append(f"||q||_1 = {q.l1_norm:.4f} >= 1/6: small-norm hypothesis fails")
    if not q.decayed:
        warn.append(f"|q| = {q.edge_magnitude:.2g} at the grid ends: enlarge the x interval before scattering")
    return q, warn


def cmd_generate(s):
    params = {k: s[k] for k in ("amplitude", "shift", "width", "left", "right")}
    q, warn = generate_potential(s["kind"], params, _xgrid(s), s["sigma"] or 1)
    rep = DiagnosticsReport(warnings=warn)
    rep.add(info("l1_norm", q.l1_norm, "plumbing"))
    rep.add(info("small_norm", float(q.small_norm), "||q||_1 < 1/6"))
    _save(q, s, "generate")
    return rep


def _scatter_report(data: ScatteringData, q: Potential, s) -> DiagnosticsReport:
    return run_invariant_suite(SuiteInputs(potential=q, data=data),
                               ["determinant", "symmetry", "wronskian", "tail", "no_resonance"], s["tolerances"])


def cmd_scatter(s):
    q = _load(s, Potential)
    data = scattering_coefficients(q, _kgrid(s), config.tolerance("det", s["tolerances"]), workers=s["workers"])
    _save(data, s, "scatter")
    return _scatter_report(data, q, s)


def cmd_reflect(s):
    obj = _load(s, Potential, ScatteringData)
    rep = DiagnosticsReport()
    if isinstance(obj, Potential):
        data = scattering_coefficients(obj, _kgrid(s), workers=s["workers"])
        rep.extend(_scatter_report(data, obj, s))
    else:
        data = obj
    refl = reflection_coefficients(data, config.tolerance("division", s["tolerances"]))
    rep.add(info("sup_r", refl.sup_r, "|r1|, |r2| < 1 in the small-norm regime"))
    _save(refl, s, "reflect")
    if s.get("csv"):
        save_csv(refl, s["csv"])
    return rep


def cmd_evolve(s):
    refl = _load(s, ReflectionPair)
    out = evolve_reflection(refl, s["t"])
    rep = DiagnosticsReport()
    rep.add(upper("modulus_change", max(np.max(np.abs(np.abs(out.r1) - np.abs(refl.r1))),
                                        np.max(np.abs(np.abs(out.r2) - np.abs(refl.r2)))), 1e-12,
                  "unimodular evolution of r1, r2"))
    _save(out, s, "evolve")
    return rep


def cmd_reconstruct(s):
    refl = _load(s, ReflectionPair)
    xg = _xgrid(s)
    rh_opts = {"update_tol": config.tolerance("rh_update", s["tolerances"]),
               "max_iter": int(config.tolerance("rh_max_iter", s["tolerances"]))}
    sols = solve_rh_many(refl, xg.nodes, workers=s["workers"], **rh_opts)
    primary, mirror = (reconstruct_q(refl, xg, solutions=sols), None)
    if s.get("mirror"):
        from .reconstruction import reconstruct_q_mirror
        mirror = reconstruct_q_mirror(refl, xg, solutions=sols)
    rep = DiagnosticsReport()
    rep.add(upper("max_jump_residual", primary.metadata["max_jump_residual"],
                  config.tolerance("rh_residual", s["tolerances"]), "M+ - M- = M- S"))
    rep.add(info("max_iterations", primary.metadata["max_iterations"], "plumbing"))
    if not refl.realizable:
        rep.warnings.append("reflection data flagged non-realizable: tests the inverse map only")
    if s.get("dump_psi"):
        dump_psi_csv(sols, s["dump_psi"])
    _save(mirror if mirror is not None else primary, s, "reconstruct")
    return rep


def cmd_roundtrip(s):
    q = _load(s, Potential)
    rep = roundtrip_report(q, _kgrid(s), s["tolerances"], workers=s["workers"])
    _save(rep, s, "roundtrip")
    return rep


def cmd_pde(s):
    q = _load(s, Potential)
    out = split_step(q, s["t"], s["dt"], nonlinear=not s["linear"], dealias=s["dealias"])
    rep = DiagnosticsReport()
    dQ = abs(conserved_quantity(out) - conserved_quantity(q))
    rep.add(upper("conservation_Q", dQ, config.tolerance("conservation", s["tolerances"]),
                  "conservation laws of the nonlocal equation"))
    _save(out, s, "pde")
    return rep


def cmd_compare(s):
    q = _load(s, Potential)
    ist = ist_solve(q, s["t"], _kgrid(s), q.grid, workers=s["workers"])
    pde = split_step(q, s["t"], s["dt"], dealias=s["dealias"])
    dist = float(np.max(np.abs(ist.values - pde.values)))
    rep = DiagnosticsReport(warnings=list(ist.metadata.get("warnings", [])))
    rep.add(upper("ist_vs_split_step_linf", dist, config.tolerance("compare", s["tolerances"]),
                  "IST solution of the Cauchy problem"))
    rep.add(info("relative_l2", relative_l2(ist.values, pde.values, q.grid.spacing), "plumbing"))
    rep.add(info("sampling_number", ist.metadata["sampling_number"], "plumbing", "must stay <= pi/4"))
    prov = _provenance("compare", s)
    save_json(ist, s.get("ist_out") or _derived(s, "ist"), prov)
    save_json(pde, s.get("pde_out") or _derived(s, "pde"), prov)
    _save(rep, s, "compare")
    return rep


def cmd_invariants(s):
    obj = _load(s, Potential, ScatteringData, ReflectionPair)
    inputs = SuiteInputs(kgrid=_kgrid(s))
    if isinstance(obj, Potential):
        inputs.potential = obj
    elif isinstance(obj, ScatteringData):
        inputs.data = obj
    else:
        inputs.reflection = obj
    select = [c.strip() for c in s["select"].split(",") if c.strip()]
    rep = run_invariant_suite(inputs, select, s["tolerances"], workers=s["workers"])
    _save(rep, s, "invariants")
    return rep


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not args.command:
        parser.print_help(sys.stderr)
        return 2
    try:
        s = resolve(args)
        for extra in ("csv", "dump_psi", "ist_out", "pde_out"):
            s[extra] = getattr(args, extra, None)
        rep = HANDLERS[args.command](s)
    except (UsageError, InvalidInputError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    print(rep.table())
    if s["strict"] and not rep.overall:
        print("strict mode: failed checks " + ", ".join(i.name for i in rep.failed()), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
