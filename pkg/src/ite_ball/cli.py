"""Command-line driver: ``ite-ball zeros | verify | dnmap``.

Runs are configured by an INI file.  Every output embeds the normalized
configuration, so a run can be repeated from its own output.  Exit codes:
0 ok, 2 configuration error, 3 numerical failure, 4 a verification
assertion failed.
"""

from __future__ import annotations

import argparse
import configparser
import datetime
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import rootfind as rf
from . import survey as sv
from .errors import DomainError, IteError
from .transmission import (
    Medium,
    MediumPair,
    dn_symbol,
    make_mode,
    parse_medium,
    rho_tilde,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_ASSERT = 0, 2, 3, 4
SUITES = ("thm21", "thm31", "g45", "strip", "progression")


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    d: int
    media_text: tuple  # ((c, n), (c, n)) as given
    pair: MediumPair
    rect: rf.Rectangle
    l_max: int
    settings: rf.ContourSettings
    options: dict = field(default_factory=dict)

    def snapshot(self) -> dict:
        return {
            "d": self.d,
            "medium1": {"c": self.media_text[0][0], "n": self.media_text[0][1]},
            "medium2": {"c": self.media_text[1][0], "n": self.media_text[1][1]},
            "rect": self.rect.as_list(),
            "l_max": self.l_max,
            "settings": asdict(self.settings),
            "options": dict(sorted(self.options.items())),
            "condition": self.pair.condition,
        }


def _floats(text: str):
    return [float(x) for x in text.replace(";", ",").split(",") if x.strip()]


def _complexes(text: str):
    return [complex(x.strip().replace(" ", "").replace("i", "j")) for x in text.replace(";", ",").split(",") if x.strip()]


def parse_multiple_of_pi(text: str) -> float:
    """'4*pi', '2pi', 'pi' or a plain float."""
    t = text.replace(" ", "").lower()
    if t.endswith("pi"):
        k = t[:-2].rstrip("*")
        return (float(k) if k else 1.0) * math.pi
    return float(t)


def load_config(path: str | None) -> RunConfig:
    cp = configparser.ConfigParser()
    if path is not None:
        if not os.path.exists(path):
            raise ConfigError(f"config file {path} not found")
        cp.read(path)
    try:
        run = cp["run"] if cp.has_section("run") else {}
        d = int(run.get("d", "3"))
        l_max = int(run.get("l_max", "0"))
        if d < 2 or l_max < 0:
            raise ConfigError("need d >= 2 and l_max >= 0")
        texts = []
        media = []
        for i, default in ((1, ("1", "1")), (2, ("1", "4"))):
            sec = cp[f"medium{i}"] if cp.has_section(f"medium{i}") else {}
            c, n = sec.get("c", default[0]), sec.get("n", default[1])
            texts.append((c, n))
            media.append(parse_medium(c, n, float(sec.get("flat", "0.1"))))
        pair = MediumPair(tuple(media), d)
        rs = cp["rect"] if cp.has_section("rect") else {}
        re = _floats(rs.get("re", "0.5, 10"))
        im = _floats(rs.get("im", "-1, 1"))
        if len(re) != 2 or len(im) != 2:
            raise ConfigError("rect needs re = a, b and im = c, d")
        rect = rf.Rectangle(tuple(re), tuple(im))
        if rect.re_range[0] < 1e-2:
            raise ConfigError("rectangle must stay clear of lambda = 0 (Re >= 1e-2)")
        kw = {}
        if cp.has_section("settings"):
            types = {f.name: f.type for f in fields(rf.ContourSettings)}
            for k, v in cp["settings"].items():
                if k not in types:
                    raise ConfigError(f"unknown setting {k}")
                kw[k] = int(v) if types[k] in ("int", int) else float(v)
        settings = rf.ContourSettings(**kw)
        options = dict(cp["options"]) if cp.has_section("options") else {}
    except ConfigError:
        raise
    except (ValueError, KeyError, DomainError) as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(d, tuple(texts), pair, rect, l_max, settings, options)


def header_lines(cfg: RunConfig, command: str):
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    return [f"generated {stamp}", f"command {command}", "config " + json.dumps(cfg.snapshot(), sort_keys=True)]


def _paths(out: str, stem: str, fmt: str):
    os.makedirs(out, exist_ok=True)
    csv_path = os.path.join(out, stem + ".csv") if fmt in ("csv", "both") else None
    json_path = os.path.join(out, stem + ".json") if fmt in ("json", "both") else None
    return csv_path, json_path


# ----------------------------------------------------------------------------
# commands


def cmd_zeros(cfg: RunConfig, out: str, fmt: str = "both", jobs: int = 1) -> int:
    try:
        records, report = rf.all_zeros(cfg.pair, cfg.d, cfg.l_max, cfg.rect, cfg.settings, jobs=jobs, with_report=True)
    except DomainError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    failed = [m for m in report["per_mode"] if m["error"]]
    csv_path, json_path = _paths(out, "zeros", fmt)
    if csv_path:
        rf.write_zeros_csv(records, csv_path, header_lines(cfg, "zeros"))
    if json_path:
        extra = {"config": cfg.snapshot(), "report": report, "partial": bool(failed)}
        rf.write_zeros_json(records, json_path, cfg.settings, extra)
    for m in failed:
        print(f"mode l={m['l']}: {m['error']}", file=sys.stderr)
    return EXIT_NUMERIC if failed else EXIT_OK


def _suite_psi_rho(cfg):
    lams = _complexes(cfg.options.get("lambdas", "100+5j, 100+10j, 100+20j, 200+5j, 200+10j, 200+20j, 400+5j, 400+10j, 400+20j"))
    thr = float(cfg.options.get("gap_threshold", "0.1"))
    rows, summary = sv.psi_rho_sweep(lams, d=cfg.d)
    checks = [{"check": f"sup_gap at {s['lambda']}", "value": s["sup"], "limit": thr, "pass": s["sup"] <= thr} for s in summary]
    sups = {complex(*s["lambda"]): s["sup"] for s in summary}
    first, last = lams[0], max(lams, key=lambda z: (z.real, z.imag))
    checks.append({"check": f"sup at {last} <= sup at {first}", "value": sups[last], "limit": sups[first], "pass": sups[last] <= sups[first]})
    return sv.PSI_SWEEP_COLUMNS, rows, checks


def _suite_dn_error(cfg):
    lam = complex(cfg.options.get("lambda", "300+20j").replace("i", "j"))
    nu_max = float(cfg.options.get("nu_max", "1200"))
    thr = float(cfg.options.get("dn_threshold", "0.1"))
    medium = cfg.pair.media[0]
    half = complex(lam.real, lam.imag / 2)
    rows = sv.dn_error_sweep([lam, half], medium, cfg.d, nu_max)
    e1, e2 = rows[0][3], rows[1][3]
    checks = [
        {"check": f"dn error at {lam}", "value": e1, "limit": thr, "pass": e1 <= thr},
        {"check": "halving Im at most doubles", "value": e2 / e1, "limit": 2.0, "pass": e2 <= 2 * e1},
    ]
    return ("re_lambda", "im_lambda", "nu_max", "error"), rows, checks


def _suite_g_bound(cfg):
    lams = _complexes(cfg.options.get("lambdas", "100+10j, 200+10j, 400+10j"))
    limit = float(cfg.options.get("spread_limit", "0.2"))
    rows, fits, k = sv.g_bound_sweep(cfg.pair, lams)
    spread = sv.relative_spread([c for _, c in fits])
    checks = [{"check": f"C spread (k={k:+d})", "value": spread, "limit": limit, "pass": spread < limit}]
    return ("re_lambda", "im_lambda", "sigma", "abs_g", "c_local"), rows, checks


def _suite_strip(cfg):
    report = sv.strip_scan(cfg.pair, cfg.d, cfg.l_max, cfg.rect.re_range[1], cfg.rect.im_range[1], cfg.settings, int(cfg.options.get("doublings", "1")))
    checks = [{"check": "C_emp growth < 5% per doubling", "value": report.c_emp, "limit": sv.STRIP_GROWTH_LIMIT, "pass": report.stable}]
    if "c_emp_max" in cfg.options:
        cmax = float(cfg.options["c_emp_max"])
        checks.append({"check": "C_emp bound", "value": report.c_emp, "limit": cmax, "pass": report.c_emp <= cmax})
    if report.failures:
        raise IteError(f"strip scan failed in {len(report.failures)} boxes: {report.failures[0]}")
    rows = [rf.record_row(z) for z in report.zeros]
    return rf.CSV_COLUMNS, rows, checks


def _suite_progression(cfg):
    l = int(cfg.options.get("mode", "0"))
    tol = float(cfg.options.get("tol", "1e-6"))
    mode = make_mode(l, cfg.d)
    recs, _, _, _ = rf.localize_with_jitter(rf.mode_evaluator(mode, cfg.pair), cfg.rect, cfg.settings, mode)
    rep = sv.progression_detect(recs, tol)
    checks = [
        {"check": "progression matched", "value": rep.matched_count, "limit": len(rep.residuals), "pass": rep.matched},
        {"check": "Im beta nonzero", "value": rep.beta.imag, "limit": tol, "pass": rep.im_beta_nonzero},
    ]
    if "expect_alpha" in cfg.options:
        ea = parse_multiple_of_pi(cfg.options["expect_alpha"])
        checks.append({"check": "alpha", "value": rep.alpha, "limit": ea, "pass": abs(rep.alpha - ea) <= tol})
    rows = [(rf.record_row(z)) for z in recs]
    return rf.CSV_COLUMNS, rows, checks


SUITE_FUNCS = {
    "thm21": _suite_psi_rho,
    "thm31": _suite_dn_error,
    "g45": _suite_g_bound,
    "strip": _suite_strip,
    "progression": _suite_progression,
}


def cmd_verify(cfg: RunConfig, suite: str, out: str, fmt: str = "both") -> int:
    if suite not in SUITE_FUNCS:
        print(f"unknown suite {suite}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        columns, rows, checks = SUITE_FUNCS[suite](cfg)
    except DomainError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IteError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    ok = all(c["pass"] for c in checks)
    csv_path, json_path = _paths(out, f"verify_{suite}", fmt)
    if csv_path:
        sv.write_rows_csv(csv_path, columns, rows, header_lines(cfg, f"verify {suite}"))
    if json_path:
        sv.write_json(json_path, {"suite": suite, "config": cfg.snapshot(), "checks": checks, "pass": ok})
    for c in checks:
        print(f"{'PASS' if c['pass'] else 'FAIL'} {c['check']}: {c['value']:.6g} (limit {c['limit']:.6g})")
    return EXIT_OK if ok else EXIT_ASSERT


DNMAP_COLUMNS = ("mode_l", "nu", "re_lambda", "im_lambda", "dn_re", "dn_im", "rho_tilde_re", "rho_tilde_im", "approx_error")


def cmd_dnmap(cfg: RunConfig, out: str, fmt: str = "both") -> int:
    n_re = int(cfg.options.get("n_re", "5"))
    n_im = int(cfg.options.get("n_im", "3"))
    medium = cfg.pair.media[int(cfg.options.get("medium", "1")) - 1]
    if not isinstance(medium, Medium):
        print("config error: dnmap needs a constant medium", file=sys.stderr)
        return EXIT_CONFIG
    res = np.linspace(*cfg.rect.re_range, n_re)
    ims = np.linspace(*cfg.rect.im_range, n_im)
    rows = []
    try:
        for l in range(cfg.l_max + 1):
            mode = make_mode(l, cfg.d)
            for x in res:
                for y in ims:
                    lam = complex(x, y)
                    dn = dn_symbol(mode, lam, medium)
                    rt = rho_tilde(mode.mu2, lam, medium, cfg.d)
                    err = math.sqrt(1 + mode.nu**2 / abs(lam) ** 2) * abs(dn + rt - (cfg.d - 2) / (2 * lam))
                    rows.append((l, mode.nu, float(x), float(y), dn.real, dn.imag, rt.real, rt.imag, err))
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    csv_path, json_path = _paths(out, "dnmap", fmt)
    if csv_path:
        sv.write_rows_csv(csv_path, DNMAP_COLUMNS, rows, header_lines(cfg, "dnmap"))
    if json_path:
        sv.write_json(json_path, {"config": cfg.snapshot(), "columns": DNMAP_COLUMNS, "rows": rows})
    return EXIT_OK


# ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ite-ball", description="Transmission eigenvalues of layered balls")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("zeros", "verify", "dnmap"):
        s = sub.add_parser(name)
        s.add_argument("--config", default=None, help="INI file")
        s.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
        s.add_argument("--out", default=".")
        s.add_argument("--format", choices=("csv", "json", "both"), default="both")
        if name == "verify":
            s.add_argument("--suite", choices=SUITES, required=True)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "zeros":
        return cmd_zeros(cfg, args.out, args.format, max(1, args.jobs))
    if args.command == "verify":
        return cmd_verify(cfg, args.suite, args.out, args.format)
    return cmd_dnmap(cfg, args.out, args.format)


if __name__ == "__main__":
    sys.exit(main())
