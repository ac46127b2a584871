"""``effimetrics`` command-line entry point.

    effimetrics <hurst|apen|predict|pipeline|synth|scatter> [--config FILE]
                [--out DIR] [--seed N] [--input CSV ...] [key=value ...]

Settings come from a flat ``key = value`` config file; ``key=value`` arguments
and flags override it. Any rejection from the library ends the run with exit
status 2 and a JSON diagnostic on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import io
from .apen import ApEnConfig, compute_apen
from .dfa import DfaConfig, estimate_hurst
from .nn import EmbeddingConfig, walk_forward_hit_rate
from .pipeline import MarketSummary, cross_market_correlations, run_panel
from .synthetic import fgn_panel, surrogate_panel
from .timeseries import (TRADING_DAYS_PER_YEAR, ReturnSeries, WindowPlan, build_window_plan,
                         final_estimation_period, log_returns, prices_from_returns)

log = logging.getLogger("effimetrics")

COMMANDS = ("hurst", "apen", "predict", "pipeline", "synth", "scatter")

DEFAULTS = {
    "inputs": "",
    "summary": "",
    "out": "out",
    "seed": "0",
    "workers": "1",
    "formats": "csv,json",
    "estimation_len": str(5 * TRADING_DAYS_PER_YEAR),
    "shift_len": str(TRADING_DAYS_PER_YEAR),
    "prediction_len": str(TRADING_DAYS_PER_YEAR),
    "dfa.scales": "16,32,64,128,256",
    "dfa.degree": "1",
    "dfa.fit_range": "",
    "dfa.double_cover": "false",
    "apen.m": "2",
    "apen.r_fraction": "0.2",
    "nn.m": "2",
    "nn.tau": "1",
    "nn.k": "20",
    "panel.kind": "fgn",
    "panel.markets": "27",
    "panel.h_low": "0.45",
    "panel.h_high": "0.70",
    "panel.years": "15",
    "panel.scale": "0.01",
}


class ConfigError(ValueError):
    pass


def parse_config_text(text: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _ints(s: str) -> tuple[int, ...]:
    return tuple(int(v) for v in s.split(",") if v.strip())


def _bool(s: str) -> bool:
    if s.lower() in ("1", "true", "yes", "on"):
        return True
    if s.lower() in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {s!r}")


@dataclass
class RunConfig:
    inputs: list[Path]
    out: Path
    seed: int
    plan: WindowPlan
    dfa: DfaConfig
    apen: ApEnConfig
    nn: EmbeddingConfig
    formats: frozenset[str]
    workers: int = 1
    summary: Optional[Path] = None
    panel: dict = field(default_factory=dict)

    @classmethod
    def from_settings(cls, s: dict[str, str]) -> "RunConfig":
        unknown = set(s) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        s = {**DEFAULTS, **s}
        try:
            fit = _ints(s["dfa.fit_range"])
            formats = frozenset(f.strip() for f in s["formats"].split(",") if f.strip())
            if not formats <= {"csv", "json"}:
                raise ConfigError(f"formats must be drawn from csv,json; got {s['formats']!r}")
            inputs = []
            for p in (v.strip() for v in s["inputs"].split(",") if v.strip()):
                path = Path(p)
                inputs.extend(sorted(path.glob("*.csv")) if path.is_dir() else [path])
            return cls(
                inputs=inputs,
                out=Path(s["out"]),
                seed=int(s["seed"]),
                plan=WindowPlan(int(s["estimation_len"]), int(s["shift_len"]),
                                int(s["prediction_len"])),
                dfa=DfaConfig(_ints(s["dfa.scales"]), int(s["dfa.degree"]),
                              tuple(fit) if fit else None, _bool(s["dfa.double_cover"])),
                apen=ApEnConfig(int(s["apen.m"]), float(s["apen.r_fraction"])),
                nn=EmbeddingConfig(int(s["nn.m"]), int(s["nn.tau"]), int(s["nn.k"])),
                formats=formats,
                workers=int(s["workers"]),
                summary=Path(s["summary"]) if s["summary"] else None,
                panel={
                    "kind": s["panel.kind"],
                    "n_markets": int(s["panel.markets"]),
                    "h_low": float(s["panel.h_low"]),
                    "h_high": float(s["panel.h_high"]),
                    "years": int(s["panel.years"]),
                    "scale": float(s["panel.scale"]),
                },
            )
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="effimetrics",
                                description="Market efficiency vs. predictability toolkit")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", type=Path, help="flat key = value settings file")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int, help="seed for synthetic panels")
    p.add_argument("--input", action="append", default=[], help="price CSV (repeatable)")
    p.add_argument("--summary", help="summary.json to read (scatter)")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("overrides", nargs="*", metavar="key=value")
    return p


def load_config(args: argparse.Namespace) -> RunConfig:
    settings = parse_config_text(args.config.read_text()) if args.config else {}
    for item in args.overrides:
        if "=" not in item:
            raise ConfigError(f"override must look like key=value, got {item!r}")
        k, v = item.split("=", 1)
        settings[k.strip()] = v.strip()
    if args.out is not None:
        settings["out"] = args.out
    if args.seed is not None:
        settings["seed"] = str(args.seed)
    if args.input:
        settings["inputs"] = ",".join(args.input)
    if args.summary:
        settings["summary"] = args.summary
    return RunConfig.from_settings(settings)


# --- inputs -----------------------------------------------------------------

def _panel(cfg: RunConfig):
    pc = cfg.panel
    if pc["kind"] not in ("fgn", "surrogate"):
        raise ConfigError(f"panel.kind must be fgn or surrogate, got {pc['kind']!r}")
    panel = fgn_panel(pc["n_markets"], pc["h_low"], pc["h_high"],
                      pc["years"] * TRADING_DAYS_PER_YEAR, cfg.seed, pc["scale"])
    if pc["kind"] == "surrogate":
        panel = surrogate_panel(panel, cfg.seed)
    return panel


def _market_returns(cfg: RunConfig, allow_panel: bool = False) -> list[ReturnSeries]:
    if cfg.inputs:
        return [log_returns(io.ingest_csv(p)) for p in cfg.inputs]
    if allow_panel:
        return [m.returns for m in _panel(cfg)]
    raise ConfigError("no input CSVs given (use --input or inputs = ...)")


# --- commands -----------------------------------------------------------------

def cmd_synth(cfg: RunConfig) -> None:
    panel = _panel(cfg)
    manifest = []
    for m in panel:
        prices = prices_from_returns(m.market_id, m.returns.returns)
        io.write_price_csv(cfg.out / f"{m.market_id}.csv", prices)
        manifest.append({"market": m.market_id, "hurst_target": m.hurst_target,
                         "n_prices": len(prices)})
    io.write_json(cfg.out / "panel.json", {"seed": cfg.seed, "kind": cfg.panel["kind"],
                                           "markets": manifest})


def _windows(r: ReturnSeries, plan: WindowPlan):
    subs = build_window_plan(len(r), plan)
    return [(s.t, s.estimation_range) for s in subs] + [
        (len(subs) + 1, final_estimation_period(len(r), plan).estimation_range)]


def cmd_hurst(cfg: RunConfig) -> None:
    cfg.plan.check_scales(cfg.dfa.max_scale)
    report, degenerate = [], []
    for r in _market_returns(cfg):
        for t, (lo, hi) in _windows(r, cfg.plan):
            res = estimate_hurst(r.returns[lo:hi], cfg.dfa)
            report.append({"market": r.market_id, "t": t, "start": r.dates[lo].isoformat(),
                           "end": r.dates[hi - 1].isoformat(), "hurst": res.hurst,
                           "log_intercept": res.log_intercept, "r_squared": res.r_squared,
                           "degenerate": res.degenerate})
            if "csv" in cfg.formats:
                io.write_rows(cfg.out / "hurst_scales" / f"{r.market_id}_t{t}.csv",
                              ("scale", "fluctuation"), res.per_scale)
            if res.degenerate:
                degenerate.append(f"{r.market_id} t={t}")
    if "json" in cfg.formats:
        io.write_json(cfg.out / "hurst.json", report)
    if degenerate:
        raise ValueError("degenerate DFA window (zero fluctuation): " + ", ".join(degenerate))


def cmd_apen(cfg: RunConfig) -> None:
    report = []
    for r in _market_returns(cfg):
        for t, (lo, hi) in _windows(r, cfg.plan):
            res = compute_apen(r.returns[lo:hi], cfg.apen)
            report.append({"market": r.market_id, "t": t, "apen": res.value,
                           "phi_m": res.phi_m, "phi_m_plus_1": res.phi_m_plus_1,
                           "n_used": res.n_used, "r": res.r})
    if "json" in cfg.formats:
        io.write_json(cfg.out / "apen.json", report)
    if "csv" in cfg.formats:
        io.write_rows(cfg.out / "apen.csv", ("market", "t", "apen"),
                      ((d["market"], d["t"], d["apen"]) for d in report))


def cmd_predict(cfg: RunConfig) -> None:
    report = []
    for r in _market_returns(cfg):
        trace = []
        for sub in build_window_plan(len(r), cfg.plan):
            res = walk_forward_hit_rate(r, sub, cfg.nn)
            report.append({"market": r.market_id, "t": sub.t, "hits": res.hits,
                           "total": res.total, "hit_rate": res.hit_rate})
            trace.extend((r.dates[d].isoformat(), p.value, a.value, int(p == a))
                         for d, p, a in zip(res.days, res.predicted, res.actual))
        if "csv" in cfg.formats:
            io.write_rows(cfg.out / "predict_trace" / f"{r.market_id}.csv",
                          ("date", "predicted", "actual", "hit"), trace)
    if "json" in cfg.formats:
        io.write_json(cfg.out / "predict.json", report)


def cmd_pipeline(cfg: RunConfig) -> None:
    series = _market_returns(cfg, allow_panel=True)
    summaries = run_panel(series, cfg.plan, cfg.dfa, cfg.apen, cfg.nn, cfg.workers)
    report = None
    if len(summaries) >= 3:
        report = cross_market_correlations(summaries)
    else:
        log.warning("fewer than 3 markets: cross-market correlations not computed")
    if "json" in cfg.formats:
        io.write_json(cfg.out / "summary.json", [s.to_dict() for s in summaries])
        if report is not None:
            io.write_json(cfg.out / "correlations.json", report.to_dict())
    if "csv" in cfg.formats:
        header = ("market", "t", "H", "A", "NN")
        all_rows = []
        for s in summaries:
            rows = [(s.market_id, r.t, r.hurst, r.apen, r.hit_rate) for r in s.per_subperiod]
            io.write_rows(cfg.out / "markets" / f"{s.market_id}.csv", header, rows)
            all_rows.extend(rows)
        io.write_rows(cfg.out / "subperiods.csv", header, all_rows)
        io.write_rows(cfg.out / "means.csv", ("market", "H_mean", "A_mean", "NN_mean"),
                      ((s.market_id, s.mean_hurst, s.mean_apen, s.mean_hit_rate)
                       for s in summaries))
        if report is not None:
            io.write_rows(cfg.out / "correlations.csv",
                          ("rho_H_A", "rho_NN_H", "rho_NN_A", "n_markets"),
                          [(report.rho_H_A, report.rho_NN_H, report.rho_NN_A,
                            report.n_markets)])


SCATTERS = {
    # name: (x field, y field)
    "HA": ("mean_apen", "mean_hurst"),
    "NNA": ("mean_apen", "mean_hit_rate"),
    "NNH": ("mean_hurst", "mean_hit_rate"),
}


def cmd_scatter(cfg: RunConfig) -> None:
    path = cfg.summary or cfg.out / "summary.json"
    summaries = [MarketSummary.from_dict(d) for d in io.read_json(path)]
    for name, (xf, yf) in SCATTERS.items():
        rows = [(getattr(s, xf), getattr(s, yf), s.market_id) for s in summaries]
        io.write_rows(cfg.out / f"scatter_{name}.csv", ("x", "y", "label"), rows)


HANDLERS = {
    "hurst": cmd_hurst,
    "apen": cmd_apen,
    "predict": cmd_predict,
    "pipeline": cmd_pipeline,
    "synth": cmd_synth,
    "scatter": cmd_scatter,
}


def main(argv=None) -> int:
    args = build_parser().parse_intermixed_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args)
        HANDLERS[args.command](cfg)
    except (ValueError, OSError) as exc:
        diag = {"command": args.command, "error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(diag), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
