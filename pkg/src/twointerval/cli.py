"""Command-line front end: scenarios, sweeps and comparison reports.

Configuration is one JSON document; command-line flags override its top-level
fields. Every CSV starts with a ``# provenance: {...}`` line.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import model
from .errors import ConfigurationError, NumericalError
from .gaussian_core import (CovarianceKind, Geometry, build_covariance, fmt,
                            spectrum)
from .observables import (ObservableRow, entropy_change, entropy_change_exact,
                          negativity_exact, observables_csv)
from .orthopoly import Growth, det_ratio
from .provenance import provenance, render_table
from .rh.asymptotics import DEFAULT_PHASE, PHASE_VARIANTS, det_ratio_asymptotic
from .rh.density import spectral_density_change
from .symbol import (OccupationSymbol, constant_symbol, from_occupation,
                     from_step)
from .verify import MUTATIONS, default_symbols, full_suite, select_phase

log = logging.getLogger("twointerval")

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3
EXECUTION_FIELDS = ("out", "jobs")


# -- configuration --------------------------------------------------------------
@dataclass
class ScenarioConfig:
    """Effective scenario after merging the JSON document and flags."""

    symbol: dict | None = None
    geometries: list = field(default_factory=list)
    kind: str = "plain"
    which: str = "grow_l"
    lambdas: list = field(default_factory=lambda: [[0.0, 2.0]])
    phase: str = DEFAULT_PHASE
    density_grid: dict | None = None
    observables: bool = True
    momenta: int = 64
    out: str = "out"
    jobs: int | None = None
    verify: dict = field(default_factory=lambda: {"select_phase": False})

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise ConfigurationError(f"unknown config fields: {sorted(extra)}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        geos = []
        for g in self.geometries:
            if len(g) != 3:
                raise ConfigurationError(f"geometry {g!r} must be [k, l, n]")
            k, l, n = (int(v) for v in g)
            if n < k + 1:
                raise ConfigurationError(
                    f"geometry ({k},{l},{n}) violates n >= k + 1 (intervals overlap)")
            Geometry(k, l, n)
            geos.append([k, l, n])
        self.geometries = geos
        try:
            CovarianceKind.parse(self.kind)
            Growth.parse(self.which)
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from None
        if self.phase not in PHASE_VARIANTS:
            raise ConfigurationError(f"phase must be one of {sorted(PHASE_VARIANTS)}")
        lams = []
        for lam in self.lambdas:
            if len(lam) != 2:
                raise ConfigurationError(f"lambda {lam!r} must be [re, im]")
            lams.append([float(lam[0]), float(lam[1])])
        if not lams:
            raise ConfigurationError("lambda list is empty")
        self.lambdas = lams
        if self.jobs is not None and int(self.jobs) < 1:
            raise ConfigurationError("--jobs must be >= 1")
        if int(self.momenta) < 2:
            raise ConfigurationError("momenta must be >= 2")

    def require_geometries(self) -> list[Geometry]:
        if not self.geometries:
            raise ConfigurationError("no geometry given (use --geometry k,l,n or 'geometries')")
        return [Geometry(*g) for g in self.geometries]

    @property
    def lambda_values(self) -> list[complex]:
        return [complex(re, im) for re, im in self.lambdas]

    def to_dict(self) -> dict:
        return asdict(self)

    def result_dict(self) -> dict:
        """Fields that can change results; output location and worker count cannot."""
        data = self.to_dict()
        for name in EXECUTION_FIELDS:
            data.pop(name)
        return data


def build_symbol(spec: dict | None) -> OccupationSymbol:
    """Symbol from its config entry; ``None`` means the half-filled step."""
    if spec is None:
        return from_step(math.pi / 2)
    kind = spec.get("type", "step")
    try:
        if kind == "step":
            return from_step(float(spec.get("p_fermi", math.pi / 2)))
        if kind == "constant":
            return constant_symbol(float(spec["value"]))
        if kind == "reservoir":
            return from_occupation(model.as_spec(spec["spec"]),
                                   grid_size=int(spec.get("grid_size", 64)))
        if kind == "sampled":
            text = Path(spec["path"]).read_text(encoding="utf-8")
            return OccupationSymbol.from_json(text)
    except KeyError as exc:
        raise ConfigurationError(f"symbol spec misses field {exc}") from None
    except OSError as exc:
        raise ConfigurationError(f"cannot read symbol file: {exc}") from None
    raise ConfigurationError(f"unknown symbol type {kind!r}")


def parse_geometries(text: str) -> list[list[int]]:
    out = []
    for chunk in text.split(":"):
        parts = chunk.split(",")
        if len(parts) != 3:
            raise ConfigurationError(f"geometry {chunk!r} must be k,l,n")
        try:
            out.append([int(p) for p in parts])
        except ValueError:
            raise ConfigurationError(f"geometry {chunk!r} must be integers") from None
    return out


def parse_lambda(text: str) -> list[float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigurationError(f"--lambda {text!r} must be RE,IM")
    try:
        return [float(parts[0]), float(parts[1])]
    except ValueError:
        raise ConfigurationError(f"--lambda {text!r} must be numeric") from None


def load_config(args) -> ScenarioConfig:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot load config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigurationError("config must be a JSON object")
    if args.geometry:
        data["geometries"] = parse_geometries(args.geometry)
    if args.lam:
        data["lambdas"] = [parse_lambda(v) for v in args.lam]
    if args.out:
        data["out"] = args.out
    if args.jobs is not None:
        data["jobs"] = args.jobs
    if getattr(args, "kind", None):
        data["kind"] = args.kind
    if args.command == "negativity":
        data["kind"] = "negativity"
    return ScenarioConfig.from_dict(data)


# -- execution helpers -----------------------------------------------------------
def ordered_map(fn, items, jobs: int | None):
    """``map`` with a process pool when ``jobs > 1``; results keep input order."""
    items = list(items)
    jobs = jobs or os.cpu_count() or 1
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items))


def write_output(out_dir: Path, name: str, text: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def _stem(geo: Geometry) -> str:
    return geo.label().replace(",", "_")


def _prov(cfg: ScenarioConfig, **choices) -> dict:
    choices.setdefault("r11_phase", cfg.phase)
    return provenance(cfg.result_dict(), choices)


# -- subcommands --------------------------------------------------------------------
def _spectrum_task(item):
    sym, geo, kind = item
    res = spectrum(build_covariance(sym, geo, kind))
    return res.eigenvalues, (res.log_negativity if kind is CovarianceKind.NEGATIVITY else None)


def cmd_spectrum(cfg: ScenarioConfig) -> int:
    sym = build_symbol(cfg.symbol)
    kind = CovarianceKind.parse(cfg.kind)
    geos = cfg.require_geometries()
    results = ordered_map(_spectrum_task, [(sym, g, kind) for g in geos], cfg.jobs)
    for geo, (eigs, neg) in zip(geos, results):
        rows = []
        for i, lam in enumerate(eigs):
            nup, num = (1 + lam) / 2, (1 - lam) / 2
            rows.append((str(i), fmt(lam.real), fmt(lam.imag), fmt(nup.real), fmt(num.real)))
        if neg is not None:
            rows.append(("log_negativity", fmt(neg), "", "", ""))
        text = render_table(("index", "re_lambda", "im_lambda", "nu_plus", "nu_minus"),
                            rows, _prov(cfg, kind=kind.name))
        path = write_output(Path(cfg.out), f"spectrum_{kind.name.lower()}_{_stem(geo)}.csv", text)
        print(path)
    return EXIT_OK


def _compare_task(item):
    sym, geo, lam, kind, which, phase = item
    exact = det_ratio(sym, geo, lam, kind, which)
    pred = det_ratio_asymptotic(sym, geo, lam, kind, which, phase)
    return exact, pred


def _observable_task(item):
    sym, geo, kind, which, phase = item
    rows = [ObservableRow("entropy_change", geo.label(), kind.name,
                          entropy_change(sym, geo, kind, which, phase),
                          entropy_change_exact(sym, geo, kind, which))]
    if kind is CovarianceKind.NEGATIVITY:
        rows.append(ObservableRow("log_negativity", geo.label(), kind.name, None,
                                  negativity_exact(sym, geo)))
    return rows


def cmd_compare(cfg: ScenarioConfig) -> int:
    sym = build_symbol(cfg.symbol)
    kind = CovarianceKind.parse(cfg.kind)
    which = Growth.parse(cfg.which)
    geos = cfg.require_geometries()
    lams = cfg.lambda_values
    items = [(sym, g, lam, kind, which, cfg.phase) for g in geos for lam in lams]
    results = ordered_map(_compare_task, items, cfg.jobs)
    rows, errors = [], {}
    for (_, geo, lam, *_), (exact, pred) in zip(items, results):
        err = abs(pred / exact - 1)
        errors[(geo.label(), lam)] = err
        rows.append((geo.label(), fmt(lam.real), fmt(lam.imag), kind.name, which.value,
                     fmt(exact.real), fmt(exact.imag), fmt(pred.real), fmt(pred.imag), fmt(err)))
    header = ("geometry", "re_lambda", "im_lambda", "kind", "which", "exact_re",
              "exact_im", "asymptotic_re", "asymptotic_im", "rel_error")
    out = Path(cfg.out)
    print(write_output(out, "compare.csv", render_table(header, rows, _prov(cfg))))
    summary = []
    for lam in lams:
        for g0, g1 in zip(geos[:-1], geos[1:]):
            e0, e1 = errors[(g0.label(), lam)], errors[(g1.label(), lam)]
            ratio = e0 / e1 if e1 > 0 else math.inf
            summary.append((fmt(lam.real), fmt(lam.imag), g0.label(), g1.label(), fmt(e0),
                            fmt(e1), fmt(ratio) if math.isfinite(ratio) else "inf"))
            print(f"lambda={lam}: {g0.label()} -> {g1.label()} error {e0:.3e} -> {e1:.3e}"
                  f" (ratio {ratio:.3g})")
    print(write_output(out, "compare_summary.csv", render_table(
        ("re_lambda", "im_lambda", "geometry_from", "geometry_to", "error_from",
         "error_to", "error_ratio"), summary, _prov(cfg))))
    if cfg.observables and sym.has_jump:
        obs = ordered_map(_observable_task, [(sym, g, kind, which, cfg.phase) for g in geos],
                          cfg.jobs)
        print(write_output(out, "observables.csv",
                           observables_csv([r for rs in obs for r in rs], _prov(cfg))))
    if cfg.density_grid:
        grid = np.linspace(float(cfg.density_grid["start"]), float(cfg.density_grid["stop"]),
                           int(cfg.density_grid["count"]))
        for geo in geos:
            dens = spectral_density_change(sym, geo, grid, kind, which, cfg.phase)
            print(write_output(out, f"density_{_stem(geo)}.csv", dens.to_csv(_prov(cfg))))
    return EXIT_OK


def cmd_verify(cfg: ScenarioConfig, mutation: str | None = None) -> int:
    if cfg.symbol is not None:
        label = cfg.symbol.get("type", "step")
        symbols = [(label, build_symbol(cfg.symbol),
                    model.as_spec(cfg.symbol["spec"]) if label == "reservoir" else None)]
        asym = (label,)
    else:
        symbols = default_symbols()
        asym = ("step",)
    rep = full_suite(symbols, cfg.phase, mutation, asymptotic_symbols=asym)
    lines = rep.lines()
    choice = None
    if cfg.verify.get("select_phase"):
        chosen, totals = select_phase()
        choice = {"selected": chosen, "totals": totals}
        status = "PASS" if chosen == DEFAULT_PHASE else "FAIL"
        lines.append(f"{status} phase_selection selected={chosen} default={DEFAULT_PHASE} "
                     + " ".join(f"{k}={v:.4f}" for k, v in sorted(totals.items())))
    passed = all(not ln.startswith("FAIL") for ln in lines)
    for ln in lines:
        print(ln)
    print(f"{'PASS' if passed else 'FAIL'} suite ({len(lines)} checks, {rep.seconds:.1f} s)")
    rows = [(r.name, r.symbol, fmt(r.residual), fmt(r.threshold), r.comparison,
             "pass" if r.passed else "fail") for r in rep.results]
    prov = _prov(cfg, mutation=mutation, phase_selection=choice)
    write_output(Path(cfg.out), "verify.csv",
                 render_table(("identity", "symbol", "residual", "threshold",
                               "comparison", "status"), rows, prov))
    return EXIT_OK if passed else EXIT_VERIFY


def cmd_model_occupation(cfg: ScenarioConfig) -> int:
    if not cfg.symbol or cfg.symbol.get("type") != "reservoir":
        raise ConfigurationError("model-occupation needs a symbol of type 'reservoir'")
    spec = model.as_spec(cfg.symbol["spec"])
    pf = model.fermi_momentum(spec)
    p = model.sample_momenta(int(cfg.momenta))
    occ = model.occupation_grid(spec, p, side="inside")
    _, weights = model.dispersion_roots_grid(spec, p)
    half = math.pi / int(cfg.momenta)
    rows = [(fmt(pi), fmt(o), fmt(w.sum()), "1" if abs(abs(pi) - pf) <= half else "0")
            for pi, o, w in zip(p, occ, weights)]
    text = render_table(("p", "occupation", "weight_sum", "fermi_marker"), rows,
                        _prov(cfg, p_fermi=fmt(pf)))
    print(write_output(Path(cfg.out), "occupation.csv", text))
    return EXIT_OK


COMMANDS = {"spectrum": cmd_spectrum, "negativity": cmd_spectrum,
            "compare": cmd_compare, "model-occupation": cmd_model_occupation}


# -- entry point ---------------------------------------------------------------------
def _failing_module(exc: BaseException) -> str:
    mod = "twointerval"
    for frame in traceback.extract_tb(exc.__traceback__):
        parts = Path(frame.filename).parts
        if "twointerval" in parts:
            idx = parts.index("twointerval")
            mod = ".".join(parts[idx:]).removesuffix(".py")
    return mod


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twointerval",
                                     description="Two-interval free-fermion spectra and asymptotics.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("spectrum", "negativity", "compare", "verify", "model-occupation"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON scenario file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--jobs", type=int, help="worker processes (default: all cores)")
        p.add_argument("--lambda", dest="lam", action="append",
                       help="spectral parameter RE,IM (repeatable)")
        p.add_argument("--geometry", help="k,l,n[:k2,l2,n2...]")
        if name in ("spectrum", "compare", "verify"):
            p.add_argument("--kind", choices=["plain", "negativity"])
        if name == "verify":
            p.add_argument("--inject", choices=MUTATIONS,
                           help="inject a known error to test the suite")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args)
        if args.command == "verify":
            return cmd_verify(cfg, getattr(args, "inject", None))
        return COMMANDS[args.command](cfg)
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure in {_failing_module(exc)}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
