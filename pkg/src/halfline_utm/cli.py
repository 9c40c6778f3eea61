"""Command-line front end: ``solve``, ``reunify``, ``verify`` and ``kernel-scan``.

Every run can be described by a JSON RunConfig (``--config``); flags
override individual fields. Outputs go to ``--out`` or ``$UTM_HALFLINE_OUT``
(default ``./utm_out``) together with a manifest that reproduces the run.

Config grammar (JSON object)::

    {"schema": "halfline-utm/run-config", "version": 1, "command": "solve",
     "solve": {...}, "verify": {...}, "kernel_scan": {...}, "out_dir": null}

Unknown keys are rejected; missing keys take the defaults below.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import warnings
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import __version__
from .io import signal_to_csv, write_field, write_field_csv
from .kernels import ScanConfig, decay_scan
from .profiles import named_boundary_profile
from .signals import DomainError, Grid, NormSpec, NumericalWarning, SpaceProfile, TimeSignal
from .utm import BoundaryKind, reunify_solve, utm_solve

SCHEMA = "halfline-utm/run-config"
SCHEMA_VERSION = 1
OUT_ENV = "UTM_HALFLINE_OUT"
DEFAULT_OUT = "utm_out"
COMMANDS = ("solve", "reunify", "verify", "kernel-scan")
PROFILES = ("zero", "bump", "chirp", "pulse")
INITIAL_PROFILES = ("zero", "gaussian")


class ConfigError(ValueError):
    pass


@dataclass
class SolveConfig:
    kind: str = "dirichlet"
    profile: str = "bump"
    input_csv: Optional[str] = None
    T: float = 1.0
    dt: float = 0.0025
    n_t: int = 101
    x_max: float = 10.0
    dx: float = 0.05
    reunify: bool = False
    initial: str = "zero"
    T_prime_factor: float = 1.25


@dataclass
class VerifyConfig:
    theorem: str = "3.4"
    pairs: List[str] = field(default_factory=lambda: ["inf:2", "8:4", "6:6"])
    s: List[float] = field(default_factory=lambda: [0.0, 0.25, 1.0])
    seed: int = 0
    base_size: int = 50
    enriched_size: int = 200
    T_primes: List[float] = field(default_factory=lambda: [1.0, 2.0, 4.0])
    dt: float = 0.0025
    n_t: int = 101
    dx: float = 0.04


@dataclass
class KernelScanConfig:
    lemmas: List[str] = field(default_factory=lambda: ["4.1", "4.2", "4.3"])
    refine: int = 2
    tau_max: float = 50.0
    tau_n: int = 101
    t_min: float = 1e-2
    t_max: float = 10.0
    t_n: int = 25
    x_values: List[float] = field(default_factory=lambda: [0.0, 0.1, 1.0, 10.0])
    b_values: List[float] = field(default_factory=lambda: [1e2, 1e3, 1e4])
    k_max: float = 100.0
    k_n: int = 201


@dataclass
class RunConfig:
    command: str = "solve"
    out_dir: Optional[str] = None
    solve: SolveConfig = field(default_factory=SolveConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)
    kernel_scan: KernelScanConfig = field(default_factory=KernelScanConfig)

    def to_dict(self) -> dict:
        d = {"schema": SCHEMA, "version": SCHEMA_VERSION}
        d.update(asdict(self))
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        if d.pop("schema", SCHEMA) != SCHEMA:
            raise ConfigError("not a halfline-utm run config")
        version = d.pop("version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported config version {version}")
        sections = {"solve": SolveConfig, "verify": VerifyConfig, "kernel_scan": KernelScanConfig}
        kw = {}
        for key, value in d.items():
            if key in sections:
                kw[key] = _section(sections[key], value, key)
            elif key in ("command", "out_dir"):
                kw[key] = value
            else:
                raise ConfigError(f"unknown config key {key!r}")
        cfg = cls(**kw)
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        s = self.solve
        try:
            BoundaryKind.parse(s.kind)
        except DomainError as exc:
            raise ConfigError(str(exc)) from None
        if s.profile not in PROFILES and s.input_csv is None:
            raise ConfigError(f"unknown profile {s.profile!r}; choose from {PROFILES}")
        if s.initial not in INITIAL_PROFILES:
            raise ConfigError(f"unknown initial profile {s.initial!r}")
        for name in ("T", "dt", "x_max", "dx"):
            if not getattr(s, name) > 0:
                raise ConfigError(f"solve.{name} must be positive")
        if s.n_t < 2:
            raise ConfigError("solve.n_t must be >= 2")
        if s.T_prime_factor <= 1:
            raise ConfigError("solve.T_prime_factor must exceed 1")
        v = self.verify
        if v.theorem not in ("3.4", "3.5h", "3.5i"):
            raise ConfigError(f"unknown theorem {v.theorem!r}; choose 3.4, 3.5h or 3.5i")
        if v.base_size < 0 or v.enriched_size < 0:
            raise ConfigError("ensemble sizes must be >= 0")
        if not v.T_primes or min(v.T_primes) <= 0:
            raise ConfigError("verify.T_primes must be positive")
        for spec in self.norm_specs():
            if not spec.admissible:
                raise ConfigError(f"pair ({spec.lam}, {spec.r}) is not admissible")
            if v.theorem == "3.5i" and spec.s < 0.5:
                raise ConfigError("theorem 3.5i needs s >= 1/2")
        for lemma in self.kernel_scan.lemmas:
            if lemma not in ("4.1", "4.2", "4.3"):
                raise ConfigError(f"unknown lemma {lemma!r}")
        if self.kernel_scan.refine < 1:
            raise ConfigError("kernel_scan.refine must be >= 1")

    def norm_specs(self) -> List[NormSpec]:
        out = []
        for pair in self.verify.pairs:
            try:
                lam, r = pair.split(":")
                for s in self.verify.s:
                    out.append(NormSpec(float(s), lam, r))
            except (ValueError, DomainError) as exc:
                raise ConfigError(f"bad pair {pair!r}: {exc}") from None
        return out


def _section(cls, value, name):
    if not isinstance(value, dict):
        raise ConfigError(f"config section {name!r} must be an object")
    known = {f.name for f in fields(cls)}
    extra = set(value) - known
    if extra:
        raise ConfigError(f"unknown keys in {name!r}: {sorted(extra)}")
    return cls(**value)


# ----------------------------------------------------------------- helpers

def _out_dir(cfg: RunConfig) -> Path:
    p = Path(cfg.out_dir or os.environ.get(OUT_ENV) or DEFAULT_OUT)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (str, int, float, bool)) or v is None:
        return v
    return repr(v)


def _write_manifest(out: Path, cfg: RunConfig, files: List[str], extra: dict):
    manifest = {"package_version": __version__, "config": cfg.to_dict(),
                "files": {f: _sha256(out / f) for f in files}}
    manifest.update(_jsonable(extra))
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def _initial_profile(name, xg: Grid) -> SpaceProfile:
    x = xg.points
    if name == "zero":
        v = np.zeros(x.size, complex)
    else:
        v = np.exp(-((x - 4.0) ** 2) / 2).astype(complex)
    return SpaceProfile(v, xg.start, xg.step, "half_line")


# ---------------------------------------------------------------- commands

def cmd_solve(cfg: RunConfig) -> int:
    s = cfg.solve
    kind = BoundaryKind.parse(s.kind)
    out = _out_dir(cfg)
    T_prime = s.T_prime_factor * s.T
    xg = Grid(0.0, s.dx, int(round(s.x_max / s.dx)) + 1)
    extra = {"T": s.T, "T_prime": T_prime}
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NumericalWarning)
        if s.reunify:
            n = int(round(s.T / s.dt)) + 1
            tg = Grid(0.0, s.dt, n)
            if s.input_csv:
                from .io import read_signal_csv
                g = read_signal_csv(s.input_csv)
                if g.samples.size != n or abs(g.dt - s.dt) > 1e-12:
                    raise ConfigError(f"boundary CSV must be sampled on [0, T] with dt={s.dt}")
            else:
                full = named_boundary_profile(s.profile, s.T, s.dt)
                g = TimeSignal(full.samples[:n].copy(), 0.0, s.dt, s.T + s.dt)
            y0 = _initial_profile(s.initial, xg)
            u = reunify_solve(y0, None, g, kind, tg, T_prime_factor=s.T_prime_factor)
            h = g
            extra["reunify"] = {k: v for k, v in u.meta.items() if k != "h"}
            trace = TimeSignal(u.values[:, 0] if kind is BoundaryKind.DIRICHLET else _dx_trace(u),
                               tg.start, tg.step)
        else:
            if s.input_csv:
                from .io import read_signal_csv
                h = read_signal_csv(s.input_csv)
            else:
                h = named_boundary_profile(s.profile, s.T, s.dt, T_prime)
            tg = Grid(0.0, s.T / (s.n_t - 1), s.n_t)
            dec = utm_solve(h, kind, xg, tg)
            u = dec.u
            extra.update(dec.meta)
            trace = dec.boundary_trace(derivative=kind is BoundaryKind.NEUMANN)
    extra["warnings"] = [str(w.message) for w in caught]
    write_field(out / "field.bin", u)
    write_field_csv(out / "field.csv", u)
    (out / "boundary.csv").write_text(signal_to_csv(h))
    (out / "trace.csv").write_text(signal_to_csv(trace))
    files = ["field.bin", "field.csv", "boundary.csv", "trace.csv"]
    m = _write_manifest(out, cfg, files, extra)
    print(f"wrote {', '.join(files)} to {out} (field sha256 {m['files']['field.bin'][:16]})")
    for w in extra["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    return 0


def _dx_trace(u):
    from .spectral import fd_derivative
    return fd_derivative(u.values[:, :5], u.x_grid.step)[:, 0]


def cmd_verify(cfg: RunConfig) -> int:
    from .verify import Resolution, SuiteConfig, stability_suite
    v = cfg.verify
    specs = cfg.norm_specs()
    out = _out_dir(cfg)
    res = Resolution(v.dt, v.n_t, v.dx)
    suite = SuiteConfig(v.seed, v.base_size, v.enriched_size, tuple(v.T_primes), res)
    reports = stability_suite(v.theorem, specs, suite) if specs and v.base_size else []
    files, lines, flags = [], [], []
    for rep in reports:
        name = f"ratios_{v.theorem}_{rep.spec.label().replace(',', '_').replace('=', '')}.csv"
        (out / name).write_text(rep.to_csv())
        files.append(name)
        lines.append(rep.summary())
        flags.append({"spec": rep.spec.label(), "stable": rep.stable, "max_ratio": rep.max_ratio,
                      "gates": [{"name": g.name, "drift": g.drift, "passed": g.passed}
                                for g in rep.gates],
                      "t_prime_spread": rep.meta.get("t_prime_spread")})
    (out / "summary.txt").write_text("\n".join(lines) + ("\n" if lines else ""))
    files.append("summary.txt")
    _write_manifest(out, cfg, files, {"reports": flags})
    print("\n".join(lines) if lines else "empty suite")
    return 0 if all(f["stable"] for f in flags) else 1


def cmd_kernel_scan(cfg: RunConfig) -> int:
    k = cfg.kernel_scan
    scan = ScanConfig(k.tau_max, k.tau_n, k.t_min, k.t_max, k.t_n, tuple(k.x_values),
                      tuple(k.b_values), k.k_max, k.k_n, tuple(k.lemmas))
    out = _out_dir(cfg)
    reports = decay_scan(scan, refine=k.refine)
    files, lines, summary = [], [], []
    for rep in reports:
        name = f"scan_lemma_{rep.lemma}.csv"
        (out / name).write_text(rep.to_csv())
        files.append(name)
        lines.append(rep.summary())
        summary.append({"lemma": rep.lemma, "sup": rep.sup_constant,
                        "refined": rep.refined_constant,
                        "refinement_ratio": rep.refinement_ratio,
                        "b_doubling_change": rep.b_doubling_change})
    (out / "summary.txt").write_text("\n".join(lines) + "\n")
    files.append("summary.txt")
    _write_manifest(out, cfg, files, {"reports": summary})
    print("\n".join(lines))
    finite = all(r.sup_constant is None or math.isfinite(r.sup_constant) for r in reports)
    return 0 if finite else 1


# ------------------------------------------------------------------ parser

def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _strings(text):
    return [v.strip() for v in text.split(",") if v.strip()]


# flag name -> (section, field, converter)
_FLAGS = {
    "solve": [("kind", str), ("profile", str), ("input_csv", str), ("T", float), ("dt", float),
              ("n_t", int), ("x_max", float), ("dx", float), ("initial", str),
              ("T_prime_factor", float)],
    "verify": [("theorem", str), ("pairs", _strings), ("s", _floats), ("seed", int),
               ("base_size", int), ("enriched_size", int), ("T_primes", _floats),
               ("dt", float), ("n_t", int), ("dx", float)],
    "kernel_scan": [("lemmas", _strings), ("refine", int), ("tau_max", float), ("tau_n", int),
                    ("t_min", float), ("t_max", float), ("t_n", int), ("x_values", _floats),
                    ("b_values", _floats), ("k_max", float), ("k_n", int)],
}
_SECTION_OF = {"solve": "solve", "reunify": "solve", "verify": "verify",
               "kernel-scan": "kernel_scan"}
_ALIASES = {"lemmas": ["--lemma"], "T_primes": ["--T-primes"], "s": ["--s"], "T": ["--T"]}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="halfline-utm",
                                description="Half-line Schroedinger solves and estimate checks.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for cmd in COMMANDS:
        sp = sub.add_parser(cmd)
        sp.add_argument("--config", help="JSON RunConfig; flags override its fields")
        sp.add_argument("--out", dest="out_dir", help=f"output directory (default ${OUT_ENV})")
        sp.add_argument("--dump-config", action="store_true",
                        help="print the effective config and exit")
        section = _SECTION_OF[cmd]
        for name, conv in _FLAGS[section]:
            flag = "--" + name.replace("_", "-")
            names = _ALIASES.get(name, []) + ([flag] if flag not in _ALIASES.get(name, []) else [])
            sp.add_argument(*names, dest=f"{section}.{name}", type=conv, default=None)
        if section == "solve" and cmd == "solve":
            sp.add_argument("--reunify", dest="solve.reunify", action="store_const", const=True,
                            default=None)
    return p


def config_from_args(args) -> RunConfig:
    if args.config:
        cfg = RunConfig.from_json(Path(args.config).read_text())
    else:
        cfg = RunConfig()
    cfg = replace(cfg, command=args.command)
    if args.out_dir:
        cfg.out_dir = args.out_dir
    for key, value in vars(args).items():
        if "." in key and value is not None:
            section, name = key.split(".")
            setattr(getattr(cfg, section), name, value)
    if args.command == "reunify":
        cfg.solve.reunify = True
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.dump_config:
            print(cfg.to_json())
            return 0
        if cfg.command in ("solve", "reunify"):
            return cmd_solve(cfg)
        if cfg.command == "verify":
            return cmd_verify(cfg)
        return cmd_kernel_scan(cfg)
    except (ConfigError, DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
