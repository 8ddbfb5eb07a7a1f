"""Config-driven sweeps over missing rates, methods and repeats.

A config is a JSON object; see ``CONFIG_SCHEMA`` for every accepted key.
Each (rate, repeat) cell draws one feature split and one missingness pattern
from a seed derived from ``base_seed``, and every method in the cell sees the
same views (paired comparison).
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import jsonschema
import numpy as np

from .completion import CoklConfig
from .errors import ConfigError, CoklError, InvalidData
from .data import LabeledDataset, inject_missing, load_csv, load_seeds, load_view_csv, split_features
from .kcca import KccaConfig
from .kernels import KernelSpec
from .pipeline import COKL_METHODS, COMPLETE_DATA_METHODS, METHODS, MethodSpec, run_method

logger = logging.getLogger(__name__)

RUNS_FILE = "runs.jsonl"
AGGREGATES_FILE = "aggregates.csv"
CONVERGENCE_FILE = "convergence.csv"
METADATA_FILE = "metadata.json"

_number = {"type": "number"}
_kernel_schema = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": ["rbf", "linear", "polynomial"]},
        "bandwidth": {"oneOf": [{"type": "number", "exclusiveMinimum": 0}, {"const": "median"}]},
        "degree": {"type": "integer", "minimum": 1},
        "coef0": _number,
    },
}
_cokl_schema = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "max_iters": {"type": "integer", "minimum": 1},
        "rel_tol": {"type": "number", "exclusiveMinimum": 0},
        "laplacian_jitter": {"type": "number", "minimum": 0},
    },
}
_kcca_schema = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "n_components": {"type": ["integer", "null"], "minimum": 1},
        "kappa": {"type": ["number", "null"], "minimum": 0},
        "kappa_scale": {"type": "number", "minimum": 0},
        "eig_tol": {"type": "number", "exclusiveMinimum": 0},
    },
}
_file_view = {
    "type": "object",
    "additionalProperties": False,
    "required": ["path"],
    "properties": {"path": {"type": "string"}, "delimiter": {"type": "string"}},
}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["dataset", "views", "missing_rates", "methods"],
    "properties": {
        "dataset": {
            "type": "object",
            "additionalProperties": False,
            "required": ["path", "label_column"],
            "properties": {
                "path": {"type": "string"},
                "label_column": {"type": "string"},
                "format": {"enum": ["csv", "uci_seeds"]},
                "delimiter": {"type": "string"},
                "kind_overrides": {
                    "type": "object",
                    "additionalProperties": {"enum": ["continuous", "discrete"]},
                },
            },
        },
        "views": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_views": {"type": "integer", "minimum": 1},
                "columns": {"type": "array", "minItems": 1,
                            "items": {"type": "array", "minItems": 1, "items": {"type": "string"}}},
                "files": {"type": "array", "minItems": 1, "items": _file_view},
            },
        },
        "missing_rates": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        },
        "methods": {"type": "array", "minItems": 1, "items": {"enum": list(METHODS)}},
        "n_clusters": {"type": "integer", "minimum": 2},
        "repeats": {"type": "integer", "minimum": 1},
        "base_seed": {"type": "integer", "minimum": 0},
        "restarts": {"type": "integer", "minimum": 1},
        "standardize": {"type": "boolean"},
        "projection_space": {"enum": ["concat", "average"]},
        "pca_cap": {"type": "integer", "minimum": 1},
        "kernel": _kernel_schema,
        "cokl": _cokl_schema,
        "kcca": _kcca_schema,
        "output_dir": {"type": "string"},
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: dict
    views: dict
    missing_rates: tuple
    methods: tuple
    n_clusters: int | None = None
    repeats: int = 1
    base_seed: int = 0
    restarts: int = 30
    standardize: bool = True
    projection_space: str = "concat"
    pca_cap: int = 10
    kernel: KernelSpec = KernelSpec()
    cokl: CoklConfig = CoklConfig()
    kcca: KccaConfig = KccaConfig()
    output_dir: str | None = None
    # directory that relative dataset paths are resolved against
    base_dir: str = field(default=".", compare=False)

    @classmethod
    def from_dict(cls, raw: dict, base_dir=".") -> "ExperimentConfig":
        violations = config_violations(raw)
        if violations:
            raise ConfigError(violations)
        ds = dict(raw["dataset"])
        ds.setdefault("format", "csv")
        ds.setdefault("delimiter", ",")
        ds.setdefault("kind_overrides", {})
        views = dict(raw["views"])
        return cls(
            dataset=ds,
            views=views,
            missing_rates=tuple(float(r) for r in raw["missing_rates"]),
            methods=tuple(raw["methods"]),
            n_clusters=raw.get("n_clusters"),
            repeats=raw.get("repeats", 1),
            base_seed=raw.get("base_seed", 0),
            restarts=raw.get("restarts", 30),
            standardize=raw.get("standardize", True),
            projection_space=raw.get("projection_space", "concat"),
            pca_cap=raw.get("pca_cap", 10),
            kernel=KernelSpec(**raw.get("kernel", {})),
            cokl=CoklConfig(**raw.get("cokl", {})),
            kcca=KccaConfig(**raw.get("kcca", {})),
            output_dir=raw.get("output_dir"),
            base_dir=str(base_dir),
        )

    def to_dict(self) -> dict:
        out = {
            "dataset": dict(self.dataset),
            "views": dict(self.views),
            "missing_rates": list(self.missing_rates),
            "methods": list(self.methods),
            "n_clusters": self.n_clusters,
            "repeats": self.repeats,
            "base_seed": self.base_seed,
            "restarts": self.restarts,
            "standardize": self.standardize,
            "projection_space": self.projection_space,
            "pca_cap": self.pca_cap,
            "kernel": {"kind": self.kernel.kind, "bandwidth": self.kernel.bandwidth,
                       "degree": self.kernel.degree, "coef0": self.kernel.coef0},
            "cokl": {"max_iters": self.cokl.max_iters, "rel_tol": self.cokl.rel_tol,
                     "laplacian_jitter": self.cokl.laplacian_jitter},
            "kcca": {"n_components": self.kcca.n_components, "kappa": self.kcca.kappa,
                     "kappa_scale": self.kcca.kappa_scale, "eig_tol": self.kcca.eig_tol},
        }
        if self.n_clusters is None:
            del out["n_clusters"]
        if self.output_dir is not None:
            out["output_dir"] = self.output_dir
        return out

    def resolve(self, path) -> Path:
        p = Path(path)
        return p if p.is_absolute() else Path(self.base_dir) / p


def _field_path(error) -> str:
    parts = []
    for p in error.absolute_path:
        if isinstance(p, int):
            parts.append(f"[{p}]")
        else:
            parts.append(("." if parts else "") + str(p))
    return "".join(parts) or "<root>"


def _describe(error) -> str:
    where = _field_path(error)
    if error.validator == "required":
        missing = error.message.split("'")[1] if "'" in error.message else error.message
        prefix = "" if where == "<root>" else where + "."
        return f"{prefix}{missing}: required field is missing"
    if error.validator == "additionalProperties":
        return f"{where}: {error.message}"
    if error.validator == "exclusiveMaximum" and "missing_rates" in where:
        return f"{where}: rate must be < 1 (got {error.instance})"
    return f"{where}: {error.message}"


def config_violations(raw) -> list:
    """Every problem with ``raw`` as a list of 'field.path: message' strings."""
    if not isinstance(raw, dict):
        return ["<root>: config must be a JSON object"]
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    out = [_describe(e) for e in errors]
    views = raw.get("views")
    if isinstance(views, dict):
        modes = [m for m in ("n_views", "columns", "files") if m in views]
        if len(modes) != 1:
            out.append("views: exactly one of n_views, columns, files is required")
    methods = raw.get("methods")
    if isinstance(methods, list) and len(set(map(str, methods))) != len(methods):
        out.append("methods: duplicate method names")
    return out


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError([f"<root>: invalid JSON ({exc})"]) from exc
    return ExperimentConfig.from_dict(raw, base_dir=path.parent)


validate_config = load_config


def derive_seed(base_seed: int, rate: float, repeat: int) -> int:
    """base_seed XOR a stable 31-bit hash of (rate, repeat)."""
    digest = hashlib.sha256(f"{rate:.10g}|{repeat}".encode()).digest()
    return (base_seed ^ int.from_bytes(digest[:4], "big")) & 0x7FFFFFFF


def load_dataset(config: ExperimentConfig) -> LabeledDataset:
    """Labels (and, unless views come from separate files, features) for the sweep."""
    ds = config.dataset
    path = config.resolve(ds["path"])
    if ds["format"] == "uci_seeds":
        return load_seeds(path)
    return load_csv(path, ds["label_column"], ds["kind_overrides"], ds["delimiter"])


def build_views(config: ExperimentConfig, ds: LabeledDataset, seed: int) -> list:
    spec = config.views
    if "n_views" in spec:
        return split_features(ds, spec["n_views"], seed)
    if "columns" in spec:
        names = list(ds.feature_names)
        views = []
        for cols in spec["columns"]:
            missing = [c for c in cols if c not in names]
            if missing:
                raise InvalidData(f"unknown columns {missing}")
            views.append(ds.as_view([names.index(c) for c in cols]))
        return views
    views = []
    for entry in spec["files"]:
        view = load_view_csv(config.resolve(entry["path"]), entry.get("delimiter", ","))
        if view.n_total != ds.n:
            raise InvalidData(f"{entry['path']}: {view.n_total} rows but dataset has {ds.n} labels")
        views.append(view)
    return views


@dataclass
class CellOutcome:
    rate: float
    repeat: int
    records: list
    projections: dict
    labels: np.ndarray | None = None


def _method_spec(config: ExperimentConfig, name: str, k: int, seed: int) -> MethodSpec:
    return MethodSpec(name=name, k=k, kernel=config.kernel, cokl=config.cokl, kcca=config.kcca,
                      restarts=config.restarts, rng_seed=seed, standardize=config.standardize,
                      projection_space=config.projection_space, pca_cap=config.pca_cap)


def run_cell(config: ExperimentConfig, ds: LabeledDataset, rate: float, repeat: int,
             methods=None, want_projection: bool = False) -> CellOutcome:
    seed = derive_seed(config.base_seed, rate, repeat)
    k = config.n_clusters or ds.n_classes
    methods = config.methods if methods is None else methods
    full = build_views(config, ds, seed)
    incomplete, _ = inject_missing(full, rate, seed)
    cache = {}
    records, projections = [], {}
    for name in methods:
        start = time.perf_counter()
        rec = {"method": name, "rate": rate, "repeat": repeat, "seed": seed,
               "nmi": None, "purity": None, "iterations": None}
        try:
            views = full if name in COMPLETE_DATA_METHODS else incomplete
            out = run_method(_method_spec(config, name, k, seed), views, ds.labels, cache)
            rec["nmi"] = out.record.nmi
            rec["purity"] = out.record.purity
            rec["iterations"] = out.iterations
            if want_projection:
                projections[name] = out.projection
        except (CoklError, np.linalg.LinAlgError, ValueError, ArithmeticError) as exc:
            rec["error"] = f"{type(exc).__name__}: {exc}"
            logger.warning("%s rate=%g repeat=%d failed: %s", name, rate, repeat, rec["error"])
        rec["wall_time_ms"] = round((time.perf_counter() - start) * 1000.0, 3)
        records.append(rec)
    return CellOutcome(rate, repeat, records, projections, ds.labels if projections else None)


def _cell_job(args):
    config, ds, rate, repeat, methods, want_projection = args
    return run_cell(config, ds, rate, repeat, methods, want_projection)


@dataclass
class ExperimentResult:
    records: list
    aggregates: list
    convergence: list
    output_dir: Path | None = None

    @property
    def all_failed(self) -> bool:
        return bool(self.records) and all("error" in r for r in self.records)


def aggregate(records, methods, rates) -> list:
    rows = []
    for m in methods:
        for r in rates:
            vals = [x for x in records if x["method"] == m and x["rate"] == r and "error" not in x]
            nmis = np.array([x["nmi"] for x in vals], dtype=float)
            purs = np.array([x["purity"] for x in vals], dtype=float)
            if not vals:
                rows.append({"method": m, "rate": r, "nmi_mean": None, "nmi_std": None,
                             "purity_mean": None, "purity_std": None})
                continue
            rows.append({"method": m, "rate": r,
                         "nmi_mean": float(nmis.mean()), "nmi_std": float(nmis.std()),
                         "purity_mean": float(purs.mean()), "purity_std": float(purs.std())})
    return rows


def convergence_table(records, rates) -> list:
    """Mean CoKL iteration count per rate, counting each (rate, repeat) cell once."""
    rows = []
    for r in rates:
        per_cell = {}
        for x in records:
            if x["rate"] == r and x["method"] in COKL_METHODS and x.get("iterations") is not None:
                per_cell.setdefault(x["repeat"], x["iterations"])
        if per_cell:
            rows.append({"rate": r, "mean_iterations": float(np.mean(list(per_cell.values())))})
    return rows


def _read_runs(path: Path) -> list:
    if not path.exists():
        return []
    out = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.strip():
            out.append(json.loads(line))
    return out


def _fmt(v):
    return "" if v is None else repr(v) if isinstance(v, float) else str(v)


def _write_csv(path: Path, header, rows):
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(row[h]) for h in header])


def run_experiment(config: ExperimentConfig, output_dir=None, jobs: int = 1,
                   resume: bool = False) -> ExperimentResult:
    """Run every (rate, repeat, method) cell and write results under ``output_dir``."""
    if output_dir is not None:
        out = Path(output_dir)
    elif config.output_dir:
        out = config.resolve(config.output_dir)
    else:
        out = Path("results")
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {out} is not writable: {exc}") from exc

    ds = load_dataset(config)
    runs_path = out / RUNS_FILE
    existing = _read_runs(runs_path) if resume else []
    done = {(r["method"], r["rate"], r["repeat"]) for r in existing}
    if not resume:
        runs_path.write_text("", encoding="utf-8")

    jobs_list = []
    for rate in config.missing_rates:
        for rep in range(config.repeats):
            todo = tuple(m for m in config.methods if (m, rate, rep) not in done)
            if todo:
                jobs_list.append((config, ds, rate, rep, todo, rep == 0))

    records = list(existing)
    with runs_path.open("a", encoding="utf-8") as fh:
        if jobs > 1 and len(jobs_list) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                outcomes = pool.map(_cell_job, jobs_list)
                _consume(outcomes, fh, out, records)
        else:
            _consume(map(_cell_job, jobs_list), fh, out, records)

    aggs = aggregate(records, config.methods, config.missing_rates)
    conv = convergence_table(records, config.missing_rates)
    _write_csv(out / AGGREGATES_FILE,
               ["method", "rate", "nmi_mean", "nmi_std", "purity_mean", "purity_std"], aggs)
    _write_csv(out / CONVERGENCE_FILE, ["rate", "mean_iterations"], conv)
    meta = {"created": datetime.now(timezone.utc).isoformat(), "config": config.to_dict(),
            "n_records": len(records)}
    (out / METADATA_FILE).write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    return ExperimentResult(records, aggs, conv, out)


def _consume(outcomes, fh, out: Path, records: list):
    # single writer: lines land in job order whatever the pool does
    for cell in outcomes:
        for rec in cell.records:
            fh.write(json.dumps(rec) + "\n")
            records.append(rec)
        fh.flush()
        for name, xy in cell.projections.items():
            path = out / f"projection_{name}_{cell.rate:g}.csv"
            with path.open("w", encoding="utf-8", newline="") as pf:
                w = csv.writer(pf, lineterminator="\n")
                w.writerow(["x", "y", "true_label"])
                for (a, b), label in zip(xy, cell.labels):
                    w.writerow([repr(float(a)), repr(float(b)), int(label)])
