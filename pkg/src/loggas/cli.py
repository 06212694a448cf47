"""Command-line front end.

    loggas canonical --config run.cfg [--out result.json] [--format json|csv]

Exit status: 0 success, 1 a verification check failed, 2 bad configuration,
3 quadrature did not converge.  LOGGAS_QUAD_PROFILE picks the quadrature
preset (fast, default, paranoid); explicit config keys override it.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from typing import Sequence

import numpy as np

from . import debruijn, ensemble, oracle
from .config import QUAD_KEYS, RunConfig, echo_inputs, parse_config
from .errors import ConfigError, DomainError, QuadratureError, ResourceError
from .quadrature import Measure, QuadratureSpec, profile
from .wronskian import make_family

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
DEFAULT_TOLERANCE = 1e-6

RANDOM_SHAPES = {
    "all_even": [(2,), (2, 2), (4, 2), (2, 2, 2)],
    "all_odd_even_count": [(1, 1), (3, 1), (1, 1, 1, 1), (3, 3)],
    "all_odd_odd_count": [(1,), (3,), (1, 1, 1), (3, 1, 1)],
    "mixed": [(2, 1), (1, 2), (2, 1, 1), (1, 2, 3)],
}


def _num(v) -> dict:
    v = complex(v) if np.iscomplexobj(v) else float(v)
    if isinstance(v, complex):
        return {"value": v.real, "value_imag": v.imag}
    return {"value": v}


class Report:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.results: dict = {}
        self.oracle: dict = {}
        self.checks: list[dict] = []
        self.timings: dict = {}
        self._clock = time.perf_counter()

    def timed(self, name: str, fn, *args, **kwargs):
        t = time.perf_counter()
        out = fn(*args, **kwargs)
        self.timings[name] = time.perf_counter() - t
        return out

    def record(self, target: dict, name: str, est, **extra):
        entry = _num(est.value)
        entry["error"] = float(np.max(np.abs(est.error)))
        entry.update(extra)
        target[name] = entry

    def check(self, name: str, lhs, rhs, bounds: float, tolerance: float, **extra) -> bool:
        residual = abs(complex(lhs) - complex(rhs))
        threshold = tolerance * max(1.0, abs(complex(rhs)))
        ok = bool(residual <= threshold)
        entry = {"name": name, **{f"lhs_{k}": v for k, v in _num(lhs).items()},
                 **{f"rhs_{k}": v for k, v in _num(rhs).items()},
                 "residual": residual, "error_bounds": float(bounds), "tolerance": tolerance,
                 "threshold": threshold, "pass": ok}
        entry.update(extra)
        self.checks.append(entry)
        return ok

    def document(self) -> dict:
        self.timings["total"] = time.perf_counter() - self._clock
        doc = {"inputs": echo_inputs(self.cfg), "results": self.results}
        if self.oracle:
            doc["oracle"] = self.oracle
        doc["checks"] = self.checks
        doc["status"] = "ok" if all(c["pass"] for c in self.checks) else "verification_failed"
        doc["timings"] = self.timings
        return doc


def quad_from(cfg: RunConfig) -> QuadratureSpec:
    base = profile()
    overrides = {k: cfg.values[k] for k in QUAD_KEYS if k in cfg.values}
    return replace(base, **overrides) if overrides else base


def ensemble_from(cfg: RunConfig, populations=None, total=None) -> ensemble.EnsembleSpec:
    domain = cfg.get("domain", "line")
    if domain == "interval":
        raise ConfigError("ensembles live on the line or the circle")
    if populations is None and total is None:
        populations = cfg.get("populations")
        total = None if populations is not None else cfg.get("total_charge")
    return ensemble.EnsembleSpec(
        charges=cfg.values["charges"], populations=populations, total_charge=total,
        fugacities=cfg.get("fugacities"), potential=cfg.get("potential", (0.0, 0.0, 1.0)),
        beta=cfg.get("beta", 1.0), domain=domain)


def family_for(cfg: RunConfig, spec: ensemble.EnsembleSpec, kind: str | None = None):
    return make_family(kind or cfg.get("family", "monomial"), spec.normalized().total_charge)


def _run_canonical(rep: Report, quad: QuadratureSpec):
    spec = ensemble_from(rep.cfg)
    est = rep.timed("canonical", ensemble.canonical_partition, spec, family_for(rep.cfg, spec), quad)
    rep.record(rep.results, "canonical", est)


def _run_grand(rep: Report, quad: QuadratureSpec):
    spec = ensemble_from(rep.cfg)
    est = rep.timed("grand", ensemble.grand_partition, spec, family_for(rep.cfg, spec), quad)
    rep.record(rep.results, "grand", est)


def _run_pfaffian(rep: Report, quad: QuadratureSpec):
    spec = ensemble_from(rep.cfg)
    est = rep.timed("pfaffian", ensemble.single_species_pfaffian, spec, family_for(rep.cfg, spec), quad)
    rep.record(rep.results, "pfaffian", est)


def _label(m) -> str:
    return "M=" + ",".join(map(str, m))


def _run_verify(rep: Report, quad: QuadratureSpec):
    cfg = rep.cfg
    tol = cfg.get("tolerance", DEFAULT_TOLERANCE)
    charges = cfg.values["charges"]
    if "populations" in cfg.values:
        cases = [cfg.values["populations"]]
    else:
        cases = ensemble.feasible_populations(charges, cfg.values["total_charge"])
    canon = {}
    for m in cases:
        spec = ensemble_from(cfg, populations=m)
        fam = family_for(cfg, spec)
        label = _label(m)
        est = rep.timed(f"canonical {label}", ensemble.canonical_partition, spec, fam, quad)
        canon[m] = est
        rep.record(rep.results, f"canonical {label}", est)
        alt = ensemble.canonical_partition(spec, fam, quad, route="pairings")
        rep.check(f"words_vs_pairings {label}", est.value, alt.value, est.error + alt.error, tol)
        other = "hermite" if fam.kind == "monomial" else "monomial"
        fam2 = ensemble.canonical_partition(spec, family_for(cfg, spec, other), quad)
        rep.check(f"family_invariance {label}", est.value, fam2.value, est.error + fam2.error, tol)
        if spec.species == 1:
            pf = ensemble.single_species_pfaffian(spec, fam, quad)
            rep.record(rep.results, f"pfaffian {label}", pf)
            rep.check(f"pfaffian_vs_canonical {label}", pf.value, est.value, pf.error + est.error, tol)
        if sum(m) <= oracle.PARTICLE_CAP:
            ref = rep.timed(f"oracle {label}", oracle.direct_canonical, spec, fam, quad,
                            cfg.get("oracle_nodes"))
            rep.record(rep.oracle, f"direct {label}", ref)
            rep.check(f"canonical_vs_oracle {label}", est.value, ref.value, est.error + ref.error, tol)
    if "total_charge" in cfg.values and "populations" not in cfg.values:
        spec = ensemble_from(cfg, total=cfg.values["total_charge"])
        grand = rep.timed("grand", ensemble.grand_partition, spec, family_for(cfg, spec), quad)
        rep.record(rep.results, "grand", grand)
        z = spec.fugacities or (1.0,) * spec.species
        total = sum(math.prod(zj ** mj for zj, mj in zip(z, m)) * canon[m].value for m in cases)
        bound = grand.error + sum(math.prod(zj ** mj for zj, mj in zip(z, m)) * canon[m].error for m in cases)
        rep.check("grand_vs_canonical_sum", grand.value, total, bound, tol)


def _block_measure(cfg: RunConfig) -> Measure:
    domain = cfg.get("domain", "line")
    if domain == "circle":
        raise ConfigError("debruijn-check supports the line and finite intervals")
    if domain == "interval":
        a, b = cfg.get("interval", (0.0, 1.0))
        return Measure.interval(a, b)
    return Measure.line(cfg.get("potential", (0.0, 0.0, 1.0)))


def _debruijn_pair(spec: debruijn.BlockMatrixSpec, quad: QuadratureSpec):
    return debruijn.debruijn_lhs(spec, quad), debruijn.debruijn_rhs(spec, quad)


def _run_debruijn(rep: Report, quad: QuadratureSpec, seed: int, jobs: int):
    cfg = rep.cfg
    tol = cfg.get("tolerance", DEFAULT_TOLERANCE)
    measure = _block_measure(cfg)
    if cfg.blocks:
        spec = debruijn.BlockMatrixSpec(tuple(b.rows for b in cfg.blocks), measure)
        if any(len(b.rows) != spec.size for b in cfg.blocks):
            raise ConfigError(f"every block needs N = {spec.size} rows")
        lhs, rhs = rep.timed("debruijn", _debruijn_pair, spec, quad)
        expected = debruijn.identity_holds(spec)
        rep.record(rep.results, "lhs", lhs)
        rep.record(rep.results, "rhs", rhs)
        rep.check("lhs_vs_rhs", lhs.value, rhs.value, lhs.error + rhs.error, tol, identity_expected=expected)
        if len(set(spec.blocks)) == 1:
            cor = debruijn.corollary_pfaffian(spec, quad)
            rep.record(rep.results, "pfaffian_form", cor)
            rep.check("lhs_vs_pfaffian_form", lhs.value, cor.value, lhs.error + cor.error, tol)
        if len(spec.lengths) <= 3:
            ref = rep.timed("bruteforce", debruijn.lhs_bruteforce, spec, cfg.get("oracle_nodes") or 64, quad)
            rep.oracle["bruteforce_lhs"] = {"value": ref}
            rep.check("lhs_vs_bruteforce", lhs.value, ref, lhs.error, tol)
    trials = cfg.get("random_trials", 0)
    if trials:
        rng = np.random.default_rng(seed)
        names = list(RANDOM_SHAPES)
        specs = []
        for i in range(trials):
            kind = names[i % len(names)]
            shapes = RANDOM_SHAPES[kind]
            lengths = shapes[int(rng.integers(len(shapes)))]
            specs.append((kind, debruijn.random_block_spec(rng, lengths, measure)))
        t = time.perf_counter()
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                pairs = list(pool.map(_debruijn_pair, [s for _, s in specs], [quad] * len(specs)))
        else:
            pairs = [_debruijn_pair(s, quad) for _, s in specs]
        rep.timings["random_trials"] = time.perf_counter() - t
        for i, ((kind, spec), (lhs, rhs)) in enumerate(zip(specs, pairs)):
            rep.check(f"random {i} {kind} L={','.join(map(str, spec.lengths))}", lhs.value, rhs.value,
                      lhs.error + rhs.error, tol, identity_expected=debruijn.identity_holds(spec))


def run(cfg: RunConfig, seed: int = 0, jobs: int = 1) -> tuple[int, dict]:
    rep = Report(cfg)
    quad = quad_from(cfg)
    handlers = {
        "canonical": lambda: _run_canonical(rep, quad),
        "grand": lambda: _run_grand(rep, quad),
        "pfaffian": lambda: _run_pfaffian(rep, quad),
        "verify": lambda: _run_verify(rep, quad),
        "debruijn-check": lambda: _run_debruijn(rep, quad, seed, jobs),
    }
    handlers[cfg.command]()
    doc = rep.document()
    return (EXIT_OK if doc["status"] == "ok" else EXIT_FAILED), doc


def to_csv(doc: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["section", "name", "field", "value"])

    def cell(v):
        if isinstance(v, float):
            return format(v, ".17g")
        return str(v)

    for key, value in doc["inputs"].items():
        if key == "blocks":
            for i, b in enumerate(value, start=1):
                writer.writerow(["inputs", f"block {i}", "length", b["length"]])
                for r in b["rows"]:
                    writer.writerow(["inputs", f"block {i}", "row", r])
        else:
            writer.writerow(["inputs", key, "", value])
    for section in ("results", "oracle"):
        for name, entry in doc.get(section, {}).items():
            for f, v in entry.items():
                writer.writerow([section, name, f, cell(v)])
    for c in doc["checks"]:
        for f, v in c.items():
            if f != "name":
                writer.writerow(["checks", c["name"], f, cell(v)])
    writer.writerow(["status", "", "", doc["status"]])
    for name, v in doc["timings"].items():
        writer.writerow(["timings", name, "seconds", cell(v)])
    return buf.getvalue()


def render(doc: dict, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(doc)
    return json.dumps(doc, indent=2) + "\n"


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="loggas", description="Log-gas partition functions via Berezin integrals.")
    parser.add_argument("command", nargs="?", help="override the config's command")
    parser.add_argument("--config", required=True, help="path to the key = value config file")
    parser.add_argument("--out", help="write the result document here instead of stdout")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized suites")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for randomized suites")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
        if args.command:
            text = f"command = {args.command}\n" + "\n".join(
                line for line in text.splitlines() if line.split("=")[0].strip() != "command")
        cfg = parse_config(text)
        if args.jobs < 1:
            raise ConfigError("--jobs must be at least 1")
        status, doc = run(cfg, seed=args.seed, jobs=args.jobs)
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigError, DomainError, ResourceError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QuadratureError as exc:
        print(f"quadrature did not converge: {exc} (estimate {exc.estimate!r}, error {exc.error!r})",
              file=sys.stderr)
        return EXIT_NUMERIC
    _emit(render(doc, args.format), args.out)
    if status != EXIT_OK:
        failed = [c["name"] for c in doc["checks"] if not c["pass"]]
        print(f"verification failed: {', '.join(failed)}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
