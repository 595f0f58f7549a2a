"""Command line front end: ``radial-nls catalog|verify|reduce ...``.

Exit codes: 0 pass, 1 check or integration failure, 2 usage or constraint
error, 3 internal numeric error.  Defaults can come from a ``key = value``
file named by RADIAL_NLS_CONFIG; flags always win.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import warnings
from dataclasses import dataclass, fields

from .core import (ConstraintError, DomainError, Grid, NumericError, ParameterError,
                   RadialNLSError, parse_real, validate_params)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
CONFIG_ENV = "RADIAL_NLS_CONFIG"


class UsageError(RadialNLSError):
    kind = "usage"


# config ----------------------------------------------------------------------------

@dataclass
class Config:
    tol: float | None = None
    grid: str | None = None
    fixtures: str | None = None
    out_dir: str | None = None
    jobs: int = 1
    ode_tol: float = 1e-10
    samples: int = 50


def load_config(path: str | None = None) -> Config:
    path = path or os.environ.get(CONFIG_ENV)
    cfg = Config()
    if not path:
        return cfg
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as e:
        raise RadialNLSError(f"cannot read config {path}: {e}", kind="config")
    types = {f.name: f.type for f in fields(Config)}
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = (s.strip() for s in line.partition("="))
        if not sep or key not in types:
            raise RadialNLSError(f"{path}:{no}: bad config line {raw!r}", kind="config")
        try:
            if key in ("tol", "ode_tol"):
                value = parse_real(val)
            elif key in ("jobs", "samples"):
                value = int(val)
            else:
                value = val
        except (ValueError, RadialNLSError):
            raise RadialNLSError(f"{path}:{no}: bad value for {key}", kind="config")
        setattr(cfg, key, value)
    if cfg.grid is not None:
        Grid.parse(cfg.grid)
    return cfg


# output ----------------------------------------------------------------------------

def fmt(v) -> str:
    """Shortest round-trip decimal for floats, plain text otherwise."""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (int, float)):
        return repr(float(v)) if isinstance(v, float) else str(v)
    return str(v)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def emit(text: str, out: str | None, cfg: Config) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    if cfg.out_dir and not os.path.isabs(out):
        out = os.path.join(cfg.out_dir, out)
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# catalog ---------------------------------------------------------------------------

def _params(a):
    return validate_params(parse_real(a.n), parse_real(a.p), parse_real(a.k))


def _constants(items, signs):
    from .catalog import FamilyConstants
    vals = {}
    for item in items or ():
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--const expects name=value, got {item!r}")
        vals[key.strip()] = parse_real(val)
    sg = [int(s) for s in signs.split(",")] if signs else []
    return FamilyConstants.from_mapping(vals, sg)


def cmd_catalog(a, cfg: Config) -> int:
    from .catalog import domain_sample, get_family, instantiate, list_families
    if a.action == "list":
        # the formula text carries the family's parameter constraints
        rows = [(f.id, f.formula, f.behaviour_tag, f.theorem_anchor) for f in list_families()]
        emit(csv_text(("id", "formula_and_constraints", "behaviour_tag", "theorem_anchor"),
                      rows), a.out, cfg)
        return EXIT_PASS
    if not a.family:
        raise UsageError("catalog eval needs --family")
    fd = get_family(a.family)
    P = _params(a)
    fc = _constants(a.const, a.sign)
    grid_spec = a.grid or cfg.grid
    if grid_spec is None:
        raise UsageError("catalog eval needs --grid (or grid in the config file)")
    pts = domain_sample(fd, P, fc, Grid.parse(grid_spec))
    s = instantiate(fd, P, fc)
    rows = []
    for pt in pts:
        u = s(pt.t, pt.r)
        rows.append((pt.t, pt.r, u.real, u.imag, abs(u)))
    emit(csv_text(("t", "r", "u_re", "u_im", "u_abs"), rows), a.out, cfg)
    return EXIT_PASS


# verify ----------------------------------------------------------------------------

def _witnesses(a, cfg: Config):
    from .catalog import load_witnesses
    path = a.fixtures or cfg.fixtures
    try:
        ws = load_witnesses(path)
    except OSError as e:
        raise RadialNLSError(f"fixture file unavailable: {e}", kind="config")
    sel = [(i, w) for i, w in enumerate(ws) if a.family is None or w.family == a.family]
    if a.family is not None and not sel:
        raise UsageError(f"no fixture for family {a.family!r}")
    return sel


def cmd_verify(a, cfg: Config) -> int:
    from . import verify as V
    header = ("fixture", "check", "status", "max_defect")
    if a.action == "suite":
        summary = V.run_fixture_suite(a.filter, a.jobs or cfg.jobs, a.fixtures or cfg.fixtures)
        rows = [(r.fixture, r.check, r.status, r.max_defect) for r in summary.results]
        emit(csv_text(header, rows), a.out, cfg)
        print(f"{summary.fixtures} fixtures, {len(rows)} checks, "
              f"{sum(r.status != 'pass' for r in summary.results)} not passing, "
              f"{summary.elapsed:.1f} s", file=sys.stderr)
        return EXIT_PASS if summary.passed else EXIT_FAIL
    rows = []
    for i, w in _witnesses(a, cfg):
        label = V.fixture_label(i, w)
        s, pts = w.solution(), w.points()
        if a.action == "residual":
            tol = a.tol if a.tol is not None else (cfg.tol or w.tolerance)
            rep = V.pde_residual(w.params, s, pts, tol)
            rows.append((label, "residual", "pass" if rep.passed else "fail",
                         rep.max_relative))
        elif a.action == "orbit":
            from .symmetry import GroupAction
            tol = a.tol if a.tol is not None else (cfg.tol or V.ORBIT_THRESHOLD)
            opts = V._subsample(pts, V.ORBIT_POINTS)
            kinds = [a.action_kind] if a.action_kind else V.applicable_actions(w.params)
            for kind in kinds:
                for val in V.ORBIT_PARAMETERS[kind]:
                    rep = V.orbit_check(w.params, GroupAction(kind, val), s, opts, tol)
                    rows.append((label, f"orbit:{kind}({val:g})",
                                 "pass" if rep.passed else "fail", rep.max_relative))
        else:
            from .conserve import applicable_rows, conservation_check
            tol = a.tol if a.tol is not None else (cfg.tol or 1e-5)
            cpts = V._subsample(pts, V.CONSERVE_POINTS)
            for row in ([a.row] if a.row else applicable_rows(w.params)):
                rep = conservation_check(w.params, row, s, cpts, tol)
                rows.append((label, f"conserve:{row}", "pass" if rep.passed else "fail",
                             rep.max_relative))
    emit(csv_text(header, rows), a.out, cfg)
    return EXIT_PASS if all(r[2] == "pass" for r in rows) else EXIT_FAIL


# reduce ----------------------------------------------------------------------------

SUBGROUPS = {"trans": ("trans_phase", "nu"), "scal": ("scal_phase", "mu"),
             "conf": ("conf_phase", "kappa")}


def _init(text: str):
    parts = [parse_real(x) for x in text.split(",")]
    if len(parts) != 4:
        raise UsageError("--init expects re,im,re',im'")
    return complex(parts[0], parts[1]), complex(parts[2], parts[3])


def _samples(xi0: float, xiend: float, m: int) -> list:
    return [xi0 + (xiend - xi0) * j / (m - 1) for j in range(m)] if m > 1 else [xiend]


def cmd_reduce(a, cfg: Config) -> int:
    from . import reduce as R
    from .symmetry import SubgroupSpec
    P = _params(a)
    tol = a.tol if a.tol is not None else cfg.ode_tol
    m = a.samples or cfg.samples
    xs = _samples(a.xi0, a.xiend, m)
    if a.action == "integrate":
        kind, pname = SUBGROUPS[a.subgroup]
        sg = SubgroupSpec(kind, getattr(a, pname) or 0.0)
        ode = R.reduced_ode(P, sg)
        if a.init is None:
            raise UsageError("reduce integrate needs --init re,im,re',im'")
        U0, dU0 = _init(a.init)
        traj = R.integrate_reduced(ode, a.xi0, U0, dU0, a.xiend, tol, xs)
        rows = R.trajectory_rows(P, sg, traj)
    else:
        spec = R.BlowupSpec(a.regime, a.omega, a.T)
        rhs = R.blowup_ode(P, spec)
        if a.init is None:
            U0, dU0 = complex(R.blowup_constant_profile(P, spec)), 0j
        else:
            U0, dU0 = _init(a.init)
        traj = R.integrate_ode(rhs, a.xi0, U0, dU0, a.xiend, tol, xs)
        # the critical profile equation is the translation reduction with nu = omega
        sg = SubgroupSpec("trans_phase", a.omega)
        rows = R.trajectory_rows(P, sg, traj)
        if a.regime != "critical":
            rows = [r[:5] + (math.nan,) for r in rows]
    emit(R.trajectory_csv(rows), a.out, cfg)
    return EXIT_PASS


# parser ----------------------------------------------------------------------------

def _real(text: str) -> float:
    try:
        return parse_real(text)
    except RadialNLSError as e:
        raise argparse.ArgumentTypeError(str(e))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="radial-nls", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help=f"key = value defaults file (else ${CONFIG_ENV})")
    sub = ap.add_subparsers(dest="command", required=True)

    def pnk(p, required=True):
        for name in ("n", "p", "k"):
            p.add_argument(f"--{name}", required=required, help="real or rational like 4/3")

    cat = sub.add_parser("catalog", help="list or evaluate solution families")
    csub = cat.add_subparsers(dest="action", required=True)
    c_list = csub.add_parser("list", help="print the family registry")
    c_list.add_argument("--out")
    c_eval = csub.add_parser("eval", help="evaluate one family on a grid")
    c_eval.add_argument("--family", required=True)
    pnk(c_eval)
    c_eval.add_argument("--const", action="append", metavar="NAME=VALUE")
    c_eval.add_argument("--sign", help="comma separated +1/-1 branch choices")
    c_eval.add_argument("--grid", help="t0,t1,nt,r0,r1,nr")
    c_eval.add_argument("--out")

    ver = sub.add_parser("verify", help="residual, orbit, conservation and suite checks")
    vsub = ver.add_subparsers(dest="action", required=True)
    for name, helptext in (("residual", "PDE residual of fixtures"),
                           ("orbit", "symmetry orbit closure of fixtures"),
                           ("conserve", "local conservation defects of fixtures"),
                           ("suite", "every check on every fixture")):
        v = vsub.add_parser(name, help=helptext)
        v.add_argument("--fixtures", help="witness file (default: bundled)")
        v.add_argument("--out")
        if name == "suite":
            v.add_argument("--filter", help="family id prefix")
            v.add_argument("--jobs", type=int, default=None)
        else:
            v.add_argument("--family")
            v.add_argument("--tol", type=_real)
        if name == "orbit":
            v.add_argument("--action", dest="action_kind",
                           choices=("phase", "time_translate", "scale", "invert"))
        if name == "conserve":
            v.add_argument("--row", choices=("charge", "energy", "dilation_energy",
                                             "pc_energy"))

    red = sub.add_parser("reduce", help="integrate reduced ODEs")
    rsub = red.add_subparsers(dest="action", required=True)
    r_int = rsub.add_parser("integrate", help="profile ODE of an optimal subgroup")
    r_int.add_argument("--subgroup", choices=tuple(SUBGROUPS), required=True)
    for name in ("nu", "mu", "kappa"):
        r_int.add_argument(f"--{name}", type=_real)
    r_blow = rsub.add_parser("blowup", help="self-similar blow-up profile ODE")
    r_blow.add_argument("--regime", choices=("critical", "supercritical"), required=True)
    r_blow.add_argument("--omega", type=_real, default=-1.0)
    r_blow.add_argument("--T", type=_real, default=1.0, help="blow-up time")
    for r in (r_int, r_blow):
        pnk(r)
        r.add_argument("--xi0", type=_real, required=True)
        r.add_argument("--xiend", type=_real, required=True)
        r.add_argument("--init", help="re,im,re',im' of U and U' at xi0")
        r.add_argument("--tol", type=_real)
        r.add_argument("--samples", type=int, help="number of output rows")
        r.add_argument("--out")
    return ap


COMMANDS = {"catalog": cmd_catalog, "verify": cmd_verify, "reduce": cmd_reduce}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:  # argparse: --help gives 0, usage errors give 2
        return int(e.code or 0)
    from .reduce import IntegrationError
    try:
        cfg = load_config(a.config)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            code = COMMANDS[a.command](a, cfg)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        return code
    except IntegrationError as e:
        print(f"error(integration): {e}", file=sys.stderr)
        return EXIT_FAIL
    except NumericError as e:
        print(f"error({e.kind}): {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConstraintError, ParameterError, DomainError, RadialNLSError) as e:
        print(f"error({e.kind}): {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error(io): {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
