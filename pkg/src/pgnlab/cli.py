"""Command-line interface.

Exit status: 0 when every verdict passes, 1 when any fails, 2 when the only
non-passing verdicts are inconclusive, 3 for operational errors and 64 for
usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Sequence
from xml.sax.saxutils import escape

from . import approx, transfer, volume
from .geometry import Family, InvalidParameter, make_body
from .minima import (DEFAULT_BUDGET, CertificationFailed, ProfileTable, log_grid, minkowski_check, psi_profile,
                     psi_range_violations)
from .realnum import TargetParseError, parse_target
from .transfer import FAIL, INCONCLUSIVE, PASS, Verdict, summarize

EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_ERROR, EXIT_USAGE = 0, 1, 2, 3, 64
SUBCOMMANDS = ("profile", "exponents", "volume", "approx", "verify", "plot")
FORMATS = ("csv", "json", "svg", "text")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    target: str | None = None
    n: int = 1
    Qmin: float = 10.0
    Qmax: float = 1e5
    Qpoints: int = 41
    H: int | None = None
    H_grid: tuple[int, ...] | None = None
    tol: float = transfer.DEFAULT_TOL
    budget: int = DEFAULT_BUDGET
    seed: int = 0
    out: str | None = None
    format: str | None = None
    dump_body: str | None = None
    report: str = "json"
    force: bool = False
    input: str | None = None

    def argv(self) -> list[str]:
        """Arguments that parse back to this configuration."""
        out = [self.command]
        defaults = RunConfig(self.command)
        for f in fields(self):
            if f.name == "command":
                continue
            v = getattr(self, f.name)
            if v == getattr(defaults, f.name):
                continue
            flag = "--" + f.name.replace("_", "-")
            if f.name == "force":
                out.append(flag)
            elif f.name == "H_grid":
                out += [flag, ",".join(map(str, v))]
            else:
                out += [flag, repr(v) if isinstance(v, float) else str(v)]
        return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive_int(text: str) -> int:
    v = int(float(text))
    if v <= 0 or v != float(text):
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _h_grid(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad height grid {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pgnlab", description="Successive minima profiles, exponents and volume checks.")
    p.add_argument("command", choices=SUBCOMMANDS)
    p.add_argument("--target", help="rat:p/q, alg:c0,c1,...@[lo,hi], lac:base,factorial or dec:digits")
    p.add_argument("--n", type=_positive_int, default=1)
    p.add_argument("--Qmin", type=_positive_float, default=10.0)
    p.add_argument("--Qmax", type=_positive_float, default=1e5)
    p.add_argument("--Qpoints", type=_positive_int, default=41)
    p.add_argument("--H", type=_positive_int)
    p.add_argument("--H-grid", dest="H_grid", type=_h_grid)
    p.add_argument("--tol", type=_positive_float, default=transfer.DEFAULT_TOL)
    p.add_argument("--budget", type=_positive_int, default=DEFAULT_BUDGET)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output path (default: standard output)")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--dump-body", dest="dump_body", help="write the body specifications of the grid as JSON")
    p.add_argument("--report", choices=("json", "text"), default="json")
    p.add_argument("--force", action="store_true", help="estimate exponents even for low-degree algebraic targets")
    p.add_argument("--input", help="profile CSV for the plot subcommand")
    return p


def parse_config(argv: Sequence[str]) -> RunConfig:
    ns = build_parser().parse_args(list(argv))
    cfg = RunConfig(**vars(ns))
    if cfg.Qmin <= 1 or cfg.Qmax < cfg.Qmin:
        raise UsageError("need 1 < Qmin <= Qmax")
    if cfg.command != "plot" and not cfg.target:
        raise UsageError(f"{cfg.command} needs --target")
    if cfg.command == "plot" and not cfg.input:
        raise UsageError("plot needs --input")
    return cfg


# -- output helpers -----------------------------------------------------------------

def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out and cfg.out != "-":
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _exit_for(verdicts: Sequence[Verdict]) -> int:
    return {PASS: EXIT_PASS, FAIL: EXIT_FAIL, INCONCLUSIVE: EXIT_INCONCLUSIVE}[summarize(verdicts)]


def _verdict_text(verdicts: Sequence[Verdict]) -> str:
    return "\n".join([v.line() for v in verdicts] + [f"overall: {summarize(verdicts)}"]) + "\n"


def _grid(cfg: RunConfig) -> list[Fraction]:
    return log_grid(cfg.Qmin, cfg.Qmax, cfg.Qpoints)


def _dump_bodies(cfg: RunConfig, target, grid) -> None:
    if not cfg.dump_body:
        return
    bodies = [make_body(fam, cfg.n, Q, target).to_json() for fam in (Family.PRIMAL, Family.LINEAR_FORM) for Q in grid]
    with open(cfg.dump_body, "w", encoding="utf-8") as fh:
        fh.write(_json(bodies))


def _profiles(cfg: RunConfig, target) -> tuple[ProfileTable, ProfileTable]:
    grid = _grid(cfg)
    _dump_bodies(cfg, target, grid)
    return (psi_profile(target, cfg.n, Family.PRIMAL, grid, cfg.budget),
            psi_profile(target, cfg.n, Family.LINEAR_FORM, grid, cfg.budget))


def profiles_csv(primal: ProfileTable, dual: ProfileTable) -> str:
    a = primal.to_csv()
    b = dual.to_csv().split("\n", 1)[1]
    return a + b


def _refusal(cfg: RunConfig, target) -> list[Verdict] | None:
    reason = transfer.refusal_reason(target, cfg.n)
    if reason and not cfg.force:
        return [transfer.refused_verdict(reason)]
    return None


# -- SVG diagram --------------------------------------------------------------------------

def profile_svg(primal: ProfileTable, dual: ProfileTable | None = None, width: int = 800, height: int = 500) -> str:
    """``psi_j`` as solid lines and ``-nu_{n+2-j}`` dashed, against ``log10 Q``."""
    n = primal.n
    series = []
    rows = primal.ok_rows()
    for j in range(1, n + 2):
        series.append((f"psi_{j}", "", [(math.log10(float(r.Q)), r.psi(j)) for r in rows]))
    if dual is not None:
        drows = dual.ok_rows()
        for j in range(1, n + 2):
            k = n + 2 - j
            series.append((f"-nu_{k}", "6,4", [(math.log10(float(r.Q)), -r.psi(k)) for r in drows]))
    pts = [p for _, _, s in series for p in s]
    if not pts:
        raise InvalidParameter("nothing to plot")
    x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
    y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    ml, mr, mt, mb = 70, 120, 30, 50
    sx = lambda x: ml + (x - x0) / (x1 - x0) * (width - ml - mr)
    sy = lambda y: height - mb - (y - y0) / (y1 - y0) * (height - mt - mb)
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"]
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
           f'<title>{escape(primal.target)} n={n}</title>',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<line x1="{ml}" y1="{height - mb}" x2="{width - mr}" y2="{height - mb}" stroke="black"/>',
           f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{height - mb}" stroke="black"/>',
           f'<text x="{(ml + width - mr) / 2:.1f}" y="{height - 12}" text-anchor="middle">log₁₀ Q</text>',
           f'<text x="18" y="{(mt + height - mb) / 2:.1f}" text-anchor="middle" '
           f'transform="rotate(-90 18 {(mt + height - mb) / 2:.1f})">ψ</text>',
           f'<text x="{ml - 6}" y="{sy(y0):.1f}" text-anchor="end">{y0:.3g}</text>',
           f'<text x="{ml - 6}" y="{sy(y1):.1f}" text-anchor="end">{y1:.3g}</text>',
           f'<text x="{sx(x0):.1f}" y="{height - mb + 16}" text-anchor="middle">{x0:.3g}</text>',
           f'<text x="{sx(x1):.1f}" y="{height - mb + 16}" text-anchor="middle">{x1:.3g}</text>']
    if y0 < 0 < y1:
        out.append(f'<line x1="{ml}" y1="{sy(0):.2f}" x2="{width - mr}" y2="{sy(0):.2f}" stroke="#bbbbbb"/>')
    for i, (label, dash, s) in enumerate(series):
        color = colors[(i % (n + 1)) % len(colors)]
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in s)
        style = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<polyline data-series="{escape(label)}" fill="none" stroke="{color}" stroke-width="1.5"{style} '
                   f'points="{coords}"/>')
        out.append(f'<text x="{width - mr + 8}" y="{mt + 16 * (i + 1)}" fill="{color}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def split_profile_csv(text: str) -> list[ProfileTable]:
    """Inverse of :func:`profiles_csv`: one table per body family, in file order."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise InvalidParameter("empty profile CSV") from None
    groups: dict[str, list[list[str]]] = {}
    for row in reader:
        if row:
            groups.setdefault(row[0], []).append(row)
    if not groups:
        raise InvalidParameter("profile CSV has no rows")
    tables = []
    for rows in groups.values():
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        tables.append(ProfileTable.from_csv(buf.getvalue()))
    return tables


# -- subcommands -------------------------------------------------------------------------

def cmd_profile(cfg: RunConfig) -> int:
    target = parse_target(cfg.target)
    refused = _refusal(cfg, target)
    if refused:
        _emit(cfg, _json({"verdicts": [v.to_json() for v in refused]}) if cfg.format != "text" else _verdict_text(refused))
        return EXIT_INCONCLUSIVE
    primal, dual = _profiles(cfg, target)
    fmt = cfg.format or "csv"
    if fmt == "csv":
        _emit(cfg, profiles_csv(primal, dual))
    elif fmt == "json":
        _emit(cfg, _json({"primal": primal.to_json(), "linear_form": dual.to_json()}))
    elif fmt == "svg":
        _emit(cfg, profile_svg(primal, dual))
    else:
        lines = []
        for t in (primal, dual):
            for r in t.rows:
                vals = " ".join(f"{m.psi_mid:+.4f}" for m in r.records) if r.ok else (r.error or "")
                lines.append(f"{t.family.value:<10} Q={float(r.Q):<12.6g} {vals}")
        _emit(cfg, "\n".join(lines) + "\n")
    failed = [r for t in (primal, dual) for r in t.rows if not r.ok]
    return EXIT_INCONCLUSIVE if failed else EXIT_PASS


def cmd_exponents(cfg: RunConfig) -> int:
    target = parse_target(cfg.target)
    refused = _refusal(cfg, target)
    if refused:
        rep = transfer.ExponentReport(cfg.n, target.label, refused=refused[0].note, verdicts=refused)
    else:
        primal, dual = _profiles(cfg, target)
        rep = transfer.exponent_report(primal, dual, target, tol=cfg.tol, force=cfg.force)
    _emit(cfg, rep.to_text() + "\n" if _text(cfg) else _json(rep.to_json()))
    return _exit_for(rep.verdicts)


def _text(cfg: RunConfig) -> bool:
    return cfg.format == "text" or (cfg.format is None and cfg.report == "text")


def _grid_points(cfg: RunConfig, k: int = 5) -> list[Fraction]:
    return log_grid(cfg.Qmin, cfg.Qmax, min(k, cfg.Qpoints))


def cmd_volume(cfg: RunConfig) -> int:
    target = parse_target(cfg.target)
    if cfg.n < 2:
        raise InvalidParameter("the compressed body is studied for n >= 2")
    Qs = _grid_points(cfg)
    sols = [volume.solve_compression(cfg.n, Q, target) for Q in Qs]
    c0 = sols[0].c
    verdicts = [
        Verdict("compression residual < 2^-50", PASS if all(abs(s.residual).hi < Fraction(1, 2 ** 50) for s in sols) else FAIL,
                max(float(abs(s.residual).hi) for s in sols), 2.0 ** -50, 0.0),
        Verdict("compression factor independent of Q", PASS if all(s.c == c0 for s in sols) else FAIL,
                float(c0.mid), float(c0.mid), 0.0, f"{len(Qs)} grid values"),
    ]
    rhos = [Fraction(1, 2 ** k) for k in range(0, 12)]
    sweep = volume.lemma_sweep(cfg.n, target, Qs, rhos)
    E, F = sweep.E, sweep.F
    verdicts.append(Verdict("normalised volume ratio bounded", PASS if 0 < F <= E < math.inf else FAIL,
                            float(F), float(E), 0.0, f"B = {float(sweep.B):.6g}"))
    if cfg.format == "csv":
        _emit(cfg, sweep.to_csv())
    elif _text(cfg):
        lines = [f"c = {float(c0.mid):.17g}  (target volume {sols[0].target_volume})",
                 f"ratio band [{float(F):.6g}, {float(E):.6g}]  B = {float(sweep.B):.6g}"]
        _emit(cfg, "\n".join(lines) + "\n" + _verdict_text(verdicts))
    else:
        _emit(cfg, _json({"compression": [s.to_json() for s in sols], "sweep_E": str(E), "sweep_F": str(F),
                          "B": str(sweep.B), "verdicts": [v.to_json() for v in verdicts]}))
    return _exit_for(verdicts)


def _heights(cfg: RunConfig) -> list[int]:
    if cfg.H_grid:
        return list(cfg.H_grid)
    return approx.height_grid(cfg.H or 100)


def cmd_approx(cfg: RunConfig) -> int:
    target = parse_target(cfg.target)
    try:
        prof = approx.wstar_profile(target, cfg.n, _heights(cfg))
    except approx.TargetIsAlgebraicOfLowHeight as exc:
        v = Verdict("w* profile", INCONCLUSIVE, math.nan, math.nan, 0.0,
                    f"target is a root of {approx.poly_str(exc.coeffs)}")
        _emit(cfg, _verdict_text([v]) if _text(cfg) else _json({"verdicts": [v.to_json()]}))
        return EXIT_INCONCLUSIVE
    if cfg.format == "csv":
        _emit(cfg, prof.to_csv())
    elif _text(cfg):
        lines = [f"H={r.H:<8} w*={r.wstar:.6f}  " + (approx.poly_str(r.result.record.coeffs) if r.result else r.error)
                 for r in prof.rows]
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        _emit(cfg, _json(prof.to_json()))
    return EXIT_INCONCLUSIVE if any(r.result is None for r in prof.rows) else EXIT_PASS


def uniform_table(n_max: int = 50) -> list[Verdict]:
    rows = [transfer.uniform_lower_bound(n) for n in range(2, n_max + 1)]
    devs = [abs(float(r.deviation.mid)) for r in rows]
    out = [
        Verdict("U(n) >= (n+1)/2 for n = 2..%d" % n_max,
                PASS if all(r.value.lo >= Fraction(r.n + 1, 2) for r in rows) else FAIL,
                min(float(r.value.lo) - (r.n + 1) / 2 for r in rows), 0.0, 0.0),
        Verdict("|U(n) - (n/2 + 3/2)| decreasing", PASS if all(b < a for a, b in zip(devs, devs[1:])) else FAIL,
                devs[-1], devs[0], 0.0),
        Verdict("crossing value equals U(n)", PASS if all(r.crossing.overlaps(r.value) for r in rows) else FAIL,
                float(rows[0].crossing.mid), rows[0].float_value, 0.0),
    ]
    return out


def cmd_verify(cfg: RunConfig) -> int:
    target = parse_target(cfg.target)
    verdicts: list[Verdict] = []
    primal, dual = _profiles(cfg, target)
    bad = 0
    for r in dual.ok_rows():
        try:
            minkowski_check(r, cfg.n)
        except CertificationFailed:
            bad += 1
    verdicts.append(Verdict("Minkowski product bounds", PASS if bad == 0 else FAIL, bad, 0, 0.0,
                            f"{len(dual.ok_rows())} rows certified" if bad == 0 else f"{bad} rows outside the bounds"))
    outside = psi_range_violations(primal) + psi_range_violations(dual)
    verdicts.append(Verdict("log-minima range (psi in [-1, 1/n], nu in [-1/n, 1])", PASS if not outside else FAIL, len(outside), 0, 0.0,
                            "every row inside" if not outside
                            else f"Q={float(outside[0].Q):.6g} j={outside[0].j} {outside[0].side}"))
    missing = [r for t in (primal, dual) for r in t.rows if not r.ok]
    if missing:
        verdicts.append(Verdict("profile rows computed", INCONCLUSIVE, len(missing), 0, 0.0, missing[0].error or ""))
    verdicts.extend(transfer.mahler_check(primal, dual))
    verdicts.extend(transfer.mixing_check(primal, target=target, force=cfg.force))
    verdicts.extend(transfer.mixing_check(dual, target=target, force=cfg.force))
    h_max = cfg.H or (max(cfg.H_grid) if cfg.H_grid else 100)
    wstar = None
    if cfg.H_grid:
        wstar = approx.wstar_profile(target, cfg.n, cfg.H_grid) if not _refusal(cfg, target) else None
    cons = transfer.theorem_consistency_report(target, cfg.n, tol=cfg.tol, h_max=h_max, force=cfg.force,
                                               primal=primal, dual=dual, wstar=wstar)
    verdicts.extend(cons.verdicts)
    if cfg.n >= 2:
        verdicts.extend(uniform_table())
    if _text(cfg):
        _emit(cfg, _verdict_text(verdicts))
    else:
        _emit(cfg, _json({"target": target.label, "n": cfg.n, "verdicts": [v.to_json() for v in verdicts],
                          "exponents": cons.exponents.to_json(), "status": summarize(verdicts)}))
    return _exit_for(verdicts)


def cmd_plot(cfg: RunConfig) -> int:
    with open(cfg.input, encoding="utf-8") as fh:
        text = fh.read()
    tables = split_profile_csv(text)
    primal = next((t for t in tables if t.family is Family.PRIMAL), tables[0])
    dual = next((t for t in tables if t.family is Family.LINEAR_FORM), None)
    _emit(cfg, profile_svg(primal, dual))
    return EXIT_PASS


COMMANDS = {"profile": cmd_profile, "exponents": cmd_exponents, "volume": cmd_volume,
            "approx": cmd_approx, "verify": cmd_verify, "plot": cmd_plot}


def run(cfg: RunConfig) -> int:
    return COMMANDS[cfg.command](cfg)


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"pgnlab: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return run(cfg)
    except TargetParseError as exc:
        print(f"pgnlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidParameter, OSError, ValueError, ArithmeticError) as exc:
        print(f"pgnlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
