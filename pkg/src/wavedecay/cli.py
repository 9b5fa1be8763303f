"""Command-line entry point: engine runs, simulations, measurements, checks and sweeps.

Every subcommand writes its artifacts into ``--out`` (default: the current
directory) together with ``manifest.json``, which echoes the command, hashes
the canonical config text, lists every file written and records wall-clock
timings.  Apart from the manifest's timings, all outputs are byte-for-byte
reproducible.

Exit codes: 0 success, 1 runtime failure, 2 usage error, 3 config parse
failure, 4 blowup detected (the blowup time is stored in the manifest).
"""
from __future__ import annotations

import argparse
import concurrent.futures as cf
import json
import math
import os
import sys
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import kvconfig as kv

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CONFIG, EXIT_BLOWUP = 0, 1, 2, 3, 4
MANIFEST = "manifest.json"


@dataclass
class RunManifest:
    command: List[str]
    config_hash: str = ""
    outputs: List[str] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)
    status: int = EXIT_OK
    extra: Dict[str, object] = field(default_factory=dict)

    def add(self, *paths) -> None:
        for p in paths:
            p = os.fspath(p)
            if p not in self.outputs:
                self.outputs.append(p)

    @contextmanager
    def timed(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = round(time.perf_counter() - t0, 6)

    def to_dict(self) -> Dict[str, object]:
        return {"command": self.command, "config_hash": self.config_hash,
                "outputs": self.outputs, "timings": self.timings, "status": self.status,
                "extra": self.extra}

    def write(self, out_dir) -> str:
        path = os.path.join(out_dir, MANIFEST)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path


def read_manifest(path) -> Dict[str, object]:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


class UsageError(Exception):
    pass


class ConfigFailure(Exception):
    pass


# --- argument types --------------------------------------------------------------

def _sigma(text: str) -> Fraction:
    try:
        s = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational p/q: {text!r}")
    if not 0 < s < Fraction(1, 2):
        raise argparse.ArgumentTypeError("sigma must lie strictly between 0 and 1/2")
    return s


def _kinds(text: str) -> List[str]:
    from .inequality_checker import KINDS
    kinds = [k.strip() for k in text.split(",") if k.strip()]
    if text.strip() == "all":
        return list(KINDS)
    bad = [k for k in kinds if k not in KINDS]
    if bad or not kinds:
        raise argparse.ArgumentTypeError(f"unknown kinds {bad}; choose from {', '.join(KINDS)} or 'all'")
    return kinds


def _vary(text: str) -> Tuple[str, List[str]]:
    key, sep, vals = text.partition("=")
    values = [v.strip() for v in vals.split(",") if v.strip()]
    if not sep or not key.strip() or not values:
        raise argparse.ArgumentTypeError(f"expected key=v1,v2,...: {text!r}")
    return key.strip(), values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="directory for outputs and manifest.json")
    plot = argparse.ArgumentParser(add_help=False)
    plot.add_argument("--plot", action="store_true",
                      help="also render PNG figures from the plot-ready text files")

    p = argparse.ArgumentParser(prog="wavedecay", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    it = sub.add_parser("iterate", parents=[common], help="run the exact decay-bound iteration")
    it.add_argument("--sigma", type=_sigma, required=True, help="loss parameter p/q in (0, 1/2)")
    it.add_argument("--region", choices=("exterior", "interior", "both"), default="both")

    sm = sub.add_parser("simulate", parents=[common], help="evolve a config and store the trajectory")
    sm.add_argument("--config", required=True, help="key = value config file")
    sm.add_argument("--name", default=None, help="trajectory file stem (default: config stem)")

    ms = sub.add_parser("measure", parents=[common, plot], help="norms, envelopes or decay fits")
    ms.add_argument("--traj", required=True, help="trajectory file")
    ms.add_argument("--suite", choices=("norms", "envelopes", "fit"), required=True)
    ms.add_argument("--reference", default=None,
                    help="same-lattice trajectory subtracted for the interior fit")
    ms.add_argument("--t-min", type=int, default=16,
                    help="smallest dyadic T of the v-band fit")
    ms.add_argument("--horizon", type=float, default=200.0,
                    help="energy growth horizon for the envelopes suite")

    ck = sub.add_parser("check", parents=[common, plot], help="inequality suites over dyadic sweeps")
    ck.add_argument("--traj", default=None,
                    help="trajectory file (closed-form subjects are used when omitted)")
    ck.add_argument("--kinds", type=_kinds, required=True, help="comma-separated kinds, or 'all'")

    sw = sub.add_parser("sweep", parents=[common, plot], help="parallel runs over one config key")
    sw.add_argument("--config", required=True)
    sw.add_argument("--vary", type=_vary, required=True, help="key=v1,v2,...")
    sw.add_argument("--suite", choices=("fit", "envelopes", "norms", "none"), default="fit")
    sw.add_argument("--subtract-free", action="store_true",
                    help="also evolve the flat linear run of each config and use it as the fit reference")
    sw.add_argument("--jobs", type=int, default=0, help="worker processes (default: CPU count)")
    return p


# --- shared helpers -----------------------------------------------------------------

def _read_config(path):
    from .wave_lab import ConfigError, SimConfig
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigFailure(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        return SimConfig.from_text(text, os.fspath(path))
    except (kv.ConfigParseError, ConfigError) as exc:
        raise ConfigFailure(str(exc)) from exc


def _load(path):
    from .wave_lab import load_trajectory
    try:
        return load_trajectory(path)
    except OSError as exc:
        raise UsageError(f"cannot read trajectory {path}: {exc.strerror}") from exc
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _fit_doc(samples, name: str):
    from .norm_instrumentation import fit_decay_exponents
    from .wave_lab import DomainError
    try:
        f = fit_decay_exponents(samples)
    except DomainError as exc:
        return None, {"error": str(exc), "samples": [list(s) for s in samples]}
    return f, {"slope": f.slope, "intercept": f.intercept, "residual": f.residual, "n": f.n}


def _traj_hash(traj, **extra) -> str:
    items = dict(traj.config.to_mapping())
    items.update({k: str(v) for k, v in extra.items()})
    return kv.config_hash(items)


# --- subcommands ----------------------------------------------------------------------

def cmd_iterate(args, man: RunManifest, out: Path) -> int:
    from .decay_calculus import EngineConfig, run_exterior_iteration, run_interior_iteration, write_trace
    s = args.sigma
    man.config_hash = kv.config_hash({"sigma": f"{s.numerator}/{s.denominator}", "region": args.region})
    cfg = EngineConfig(s)
    with man.timed("exterior"):
        ext = run_exterior_iteration(cfg)
    traces = []
    if args.region in ("exterior", "both"):
        traces.append(ext)
    if args.region in ("interior", "both"):
        with man.timed("interior"):
            traces.append(run_interior_iteration(cfg, ext))
    for tr in traces:
        path = out / f"{tr.region.value}_sigma_{s.numerator}_{s.denominator}.trace"
        write_trace(tr, path)
        man.add(path)
        man.extra[tr.region.value] = {"steps": len(tr.states) - 1, "terminated": tr.terminated,
                                      "phase1_length": tr.phase1_length,
                                      "final": tr.states[-1].line()}
    return EXIT_OK


def _simulate(cfg, out: Path, stem: str, man: RunManifest, key: str = "evolve"):
    """Evolve, persist the canonical config and the trajectory; returns the trajectory or None on blowup."""
    from .wave_lab import BlowupDetected, evolve, save_trajectory
    cfg_path = out / f"{stem}.cfg"
    cfg_path.write_text(cfg.to_text(), encoding="ascii")
    man.add(cfg_path)
    try:
        with man.timed(key):
            traj = evolve(cfg)
    except BlowupDetected as exc:
        man.extra["blowup_time"] = exc.time
        man.extra["blowup_value"] = exc.value
        man.status = EXIT_BLOWUP
        return None
    with man.timed(f"{key}_write"):
        man.add(*save_trajectory(traj, out / f"{stem}.traj"))
    return traj


def cmd_simulate(args, man: RunManifest, out: Path) -> int:
    cfg = _read_config(args.config)
    man.config_hash = kv.config_hash(cfg.to_mapping())
    stem = args.name or Path(args.config).stem
    traj = _simulate(cfg, out, stem, man)
    if traj is not None:
        man.extra["snapshots"] = len(traj.times)
    return man.status


def _measure(traj, suite: str, out: Path, man: RunManifest, reference=None,
             horizon: float = 200.0, plot: bool = False, source: str = "",
             t_min: int = 16) -> Dict[str, object]:
    from . import norm_instrumentation as ni
    rows: List[ni.ReportRow] = []
    fits: Dict[str, object] = {}
    extra: Dict[str, object] = {}
    figures = []
    t_end = float(traj.times[-1])

    if suite == "norms":
        with man.timed("norms"):
            for word in ni.words_up_to(1):
                w = "".join(word)
                for kind in ("LE", "LE1", "LEstar"):
                    rows.append(ni.ReportRow(kind, None, None, w,
                                             ni.weighted_dyadic_norm(traj, kind, 0.0, t_end, word).value))
            for T in ni.dyadic_T(t_end):
                for g in ni.cover(T):
                    for word in ((), ("t",)):
                        rows.append(ni.ReportRow(f"RegionSup:{g.kind.value}", T, g.scale, "".join(word),
                                                 ni.region_sup(traj, g, word).value))
        with man.timed("energy"):
            for order in (0, 1):
                hist = ni.energy_history(traj, order)
                path = out / f"energy_E{order}.dat"
                man.add(ni.write_two_column(hist, path, f"t E_{order}(t)"))
                if plot:
                    figures.append((hist, path.with_suffix(".png"), f"E_{order}(t) / E_{order}(0)"))
                extra[f"E{order}_ratio_max"] = max(v for _, v in hist) / hist[0][1] if hist[0][1] > 0 else None

    elif suite == "envelopes":
        eps = traj.config.data.epsilon
        Ts = ni.dyadic_T(t_end, 16)
        with man.timed("envelopes"):
            env = ni.envelope_constants(traj, Ts, eps)
        for name, pts in env.items():
            rows.extend(ni.ReportRow(f"envelope:{name}", T, None, "", v) for T, v in pts)
            vals = [v for _, v in pts]
            extra[f"envelope_{name}"] = {"max": max(vals), "min": min(vals),
                                         "spread": max(vals) / min(vals) if min(vals) > 0 else math.inf}
            man.add(ni.write_two_column(pts, out / f"envelope_{name}.dat", f"T sup_{name} weighted / eps"))
        with man.timed("energy"):
            hist = [(t, v) for t, v in ni.energy_history(traj, 0) if t <= horizon + 1e-9]
        man.add(ni.write_two_column(hist, out / "energy_E0.dat", "t E_0(t)"))
        ratio = max(v for _, v in hist) / hist[0][1] if hist and hist[0][1] > 0 else math.inf
        extra["E0_ratio_max"] = ratio
        extra["energy_horizon"] = min(horizon, t_end)
        if plot:
            from . import plotting
            man.add(plotting.plot_envelopes(env, out / "envelopes.png"))
            man.add(plotting.plot_history(hist, out / "energy_E0.png", limit=2.0))

    elif suite == "fit":
        with man.timed("fit"):
            us, vs, T_u, notes = ni.decay_samples(traj, reference, T_min=t_min)
        for name, samples, label in (("u", us, "U"), ("v", vs, "T")):
            f, doc = _fit_doc(samples, name)
            fits[name] = doc
            for x, y in samples:
                T, X = (T_u, x) if name == "u" else (x, 1)
                rows.append(ni.ReportRow(f"{name}_band", T, X, "", y))
            path = out / f"fit_{name}.dat"
            man.add(ni.write_two_column(samples, path, f"{label} sup|phi| ({name}-band)"))
            if plot:
                from . import plotting
                man.add(plotting.plot_fit(samples, f.slope if f else None, f.intercept if f else None,
                                          out / f"fit_{name}.png", xlabel=label))
        extra["T_u"] = T_u
        extra["notes"] = notes

    if figures:
        from . import plotting
        for hist, path, label in figures:
            man.add(plotting.plot_history(hist, path, ylabel=label))

    man.add(ni.write_csv(rows, out / f"{suite}.csv"))
    doc = ni.summary_document(source, rows, fits=fits, extra=extra)
    man.add(ni.write_json(doc, out / f"{suite}.json"))
    return doc


def cmd_measure(args, man: RunManifest, out: Path) -> int:
    traj = _load(args.traj)
    ref = _load(args.reference) if args.reference else None
    man.config_hash = _traj_hash(traj, suite=args.suite, reference=bool(ref))
    _measure(traj, args.suite, out, man, ref, args.horizon, args.plot, source=Path(args.traj).name,
             t_min=args.t_min)
    return EXIT_OK


def cmd_check(args, man: RunManifest, out: Path) -> int:
    from . import norm_instrumentation as ni
    from .inequality_checker import DEFAULT_SWEEPS, SYNTHETIC_KINDS, default_subject, run_suite
    traj = _load(args.traj) if args.traj else None
    missing = [k for k in args.kinds if traj is None and k not in SYNTHETIC_KINDS]
    if missing:
        raise UsageError(f"kinds {', '.join(missing)} need --traj")
    man.config_hash = (_traj_hash(traj, kinds=",".join(args.kinds)) if traj is not None
                       else kv.config_hash({"kinds": ",".join(args.kinds), "subject": "closed-form"}))
    rows, checks = [], {}
    for kind in args.kinds:
        subject = traj if traj is not None else default_subject(kind)
        with man.timed(kind):
            res = run_suite(kind, subject, DEFAULT_SWEEPS[kind])
        for rep in res.reports:
            sc = rep.scales
            T = sc.get("T", sc.get("t"))
            X = next((sc[k] for k in ("R", "U") if k in sc), None)
            for part in ("lhs", "rhs", "ratio"):
                rows.append(ni.ReportRow(f"{kind}:{part}", T, X, "", getattr(rep, part)))
        checks[kind] = {"ratios": res.ratios, "spread": res.spread, "passed": res.passed,
                        "notes": [n for rep in res.reports for n in rep.notes]}
    man.add(ni.write_csv(rows, out / "checks.csv"))
    doc = ni.summary_document(Path(args.traj).name if args.traj else "closed-form", rows, checks=checks)
    man.add(ni.write_json(doc, out / "checks.json"))
    if args.plot:
        from . import plotting
        man.add(plotting.plot_ratios({k: v["ratios"] for k, v in checks.items()}, out / "checks.png"))
    man.extra["passed"] = {k: v["passed"] for k, v in checks.items()}
    return EXIT_OK


def _sweep_job(job) -> Dict[str, object]:
    """One sweep member: simulate (plus the free reference if asked) and measure, in its own directory."""
    from .wave_lab import CoefficientProfile, Nonlinearity, SimConfig
    mapping, out, stem, suite, subtract, plot, command = job
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = SimConfig.from_mapping(mapping)
    man = RunManifest(command, kv.config_hash(cfg.to_mapping()))
    traj = _simulate(cfg, out, stem, man)
    ref = None
    if traj is not None and subtract:
        free = cfg.with_(coeffs=CoefficientProfile(0, 0, 0, 0, cfg.coeffs.sigma),
                         nonlinearity=Nonlinearity.NONE)
        ref = _simulate(free, out, f"{stem}_free", man, key="evolve_free")
    doc = None
    if traj is not None and suite != "none":
        doc = _measure(traj, suite, out, man, ref, plot=plot, source=f"{stem}.traj")
    man.write(out)
    return {"dir": os.fspath(out), "status": man.status, "outputs": man.outputs,
            "fits": (doc or {}).get("fits", {}), "blowup_time": man.extra.get("blowup_time")}


def cmd_sweep(args, man: RunManifest, out: Path) -> int:
    from .wave_lab import ConfigError, SimConfig
    base = _read_config(args.config)
    key, values = args.vary
    mapping = base.to_mapping()
    if key not in mapping:
        raise ConfigFailure(f"unknown config key {key!r}")
    jobs = []
    for v in values:
        m = dict(mapping)
        m[key] = v
        try:
            SimConfig.from_mapping(m)
        except (kv.ConfigParseError, ConfigError) as exc:
            raise ConfigFailure(f"{key} = {v}: {exc}") from exc
        tag = f"{key}_{v}".replace("/", "_")
        jobs.append((m, os.fspath(out / tag), tag, args.suite, args.subtract_free, args.plot,
                     man.command + [f"[{key}={v}]"]))
    man.config_hash = kv.config_hash(dict(mapping, **{key: ",".join(values)}))
    workers = args.jobs if args.jobs > 0 else (os.cpu_count() or 1)
    workers = min(workers, len(jobs))
    with man.timed("sweep"):
        if workers == 1:
            results = [_sweep_job(j) for j in jobs]
        else:
            with cf.ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_sweep_job, jobs))
    members = []
    for v, res in zip(values, results):
        man.add(*res["outputs"], os.path.join(res["dir"], MANIFEST))
        members.append({"value": v, "dir": res["dir"], "status": res["status"],
                        "fits": res["fits"], "blowup_time": res["blowup_time"]})
    man.extra["key"] = key
    man.extra["members"] = members
    slopes = {n: [m["fits"][n]["slope"] for m in members if "slope" in m["fits"].get(n, {})]
              for n in ("u", "v")}
    man.extra["slope_spread"] = {n: (max(s) - min(s) if s else None) for n, s in slopes.items()}
    if any(m["status"] == EXIT_BLOWUP for m in members):
        man.extra["blowup_time"] = min(m["blowup_time"] for m in members if m["blowup_time"] is not None)
        return EXIT_BLOWUP
    return EXIT_OK


COMMANDS = {"iterate": cmd_iterate, "simulate": cmd_simulate, "measure": cmd_measure,
            "check": cmd_check, "sweep": cmd_sweep}


def dispatch(argv: Sequence[str]) -> Tuple[int, Optional[RunManifest]]:
    argv = list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (exc.code if isinstance(exc.code, int) else EXIT_USAGE), None
    out = Path(args.out)
    man = RunManifest(["wavedecay"] + argv)
    try:
        out.mkdir(parents=True, exist_ok=True)
        with man.timed("total"):
            status = COMMANDS[args.command](args, man, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"wavedecay: error: {exc}", file=sys.stderr)
        status = EXIT_USAGE
    except ConfigFailure as exc:
        print(f"wavedecay: config error: {exc}", file=sys.stderr)
        status = EXIT_CONFIG
    except Exception as exc:   # anything else is a runtime failure, still recorded
        print(f"wavedecay: {type(exc).__name__}: {exc}", file=sys.stderr)
        man.extra["error"] = f"{type(exc).__name__}: {exc}"
        status = EXIT_FAIL
    man.status = status
    if status == EXIT_BLOWUP:
        print(f"wavedecay: blowup detected at t = {man.extra.get('blowup_time')}", file=sys.stderr)
    if out.is_dir():
        man.write(out)
    return status, man


def main(argv: Optional[Sequence[str]] = None) -> int:
    status, _ = dispatch(sys.argv[1:] if argv is None else argv)
    return status


if __name__ == "__main__":
    sys.exit(main())
