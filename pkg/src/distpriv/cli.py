"""Config-driven experiment orchestration and the command-line interface.

Subcommands:
  model      estimate Gaussian query models per property value, write a catalog
  utility    privacy-utility sweep: mean L2 noise norm per (mechanism, eps, delta)
  attack     property-inference attack accuracy per (mechanism, eps, delta)
  transport  exact transport report for two discrete distributions
  release    noise one query vector under a chosen mechanism
  audit      empirical indistinguishability check for a calibrated plan

A run is a pure function of (config, dataset bytes): the root seed fans
out to (stage, parameter tuple, repetition) derived generators, outputs
are written deterministically, and completed sweep cells are reused when
their config hash matches.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import platform
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .attack import ShadowConfig, run_attack_trial
from .dataio import (
    AGE_BOUNDS,
    EDUCATION_BOUNDS,
    HOURS_BOUNDS,
    PropertySpec,
    SplitTables,
    Table,
    compute_query,
    load_adult,
    load_query_json,
    load_simple_csv,
    sample_subset_indices,
    split_dataset,
)
from .errors import ConfigError
from .mechanisms import (
    NoisePlan,
    apply,
    audit,
    calibrate_approx_wasserstein,
    calibrate_directional,
    calibrate_expm,
    calibrate_wasserstein,
    dau_plan,
    eig_plan,
    gaussian_model_draws,
    group_dp_calibrate,
    per_record_sensitivity,
)
from .model import (
    PairFamily,
    PrivacyParams,
    SecretLabel,
    check_assumptions,
    delta_E,
    estimate_gaussian,
    family_from_catalog,
    load_catalog,
    save_catalog,
)
from .seeding import derive_rng
from .transport import DiscreteDistribution, is_w_delta_close, min_w_for_delta, winf_distance

MECHANISM_NAMES = (
    "none", "wass", "awass", "expm-l", "expm-g",
    "dir-l", "dir-g", "eig", "dau", "gdp-l", "gdp-g",
)

UTILITY_CSV_HEADER = "mechanism,epsilon,delta,property,delta_p,repetition,l2_error"
ATTACK_CSV_HEADER = "mechanism,epsilon,delta,property,delta_p,repetition,accuracy"


def _round_p(value: float) -> float:
    # Property values are labels; pin them to 10 decimals so values computed
    # as p_center +/- dp/2 and values typed in config compare equal.
    return round(float(value), 10)


@dataclass
class ExperimentConfig:
    dataset: str
    seed: int
    delta_p: List[float]
    epsilon: List[float]
    delta: List[float]
    mechanisms: List[str]
    property_name: str = "income"
    p_center: float = 0.5
    n: int = 100
    modeling_samples: int = 1000
    repetitions: int = 50
    dataset_format: str = "adult"
    allow_variant_dataset: bool = False
    out_dir: str = "out"
    group_size: int = 100
    angle_tol: float = 1e-6
    cov_tol: float = 0.5
    eigenbasis_tol: float = 0.5
    awass_quantile_draws: int = 200_000
    workers: int = 1
    attribute_bounds: Dict[str, List[int]] = field(default_factory=dict)
    attack: Dict = field(default_factory=dict)

    def __post_init__(self):
        if self.property_name not in ("income", "workclass"):
            raise ConfigError(f"property must be 'income' or 'workclass', got {self.property_name!r}")
        if self.dataset_format not in ("adult", "simple"):
            raise ConfigError(f"dataset_format must be 'adult' or 'simple', got {self.dataset_format!r}")
        for name in ("delta_p", "epsilon", "delta", "mechanisms"):
            if not getattr(self, name):
                raise ConfigError(f"config list {name} must be nonempty")
        for mech in self.mechanisms:
            if mech not in MECHANISM_NAMES:
                raise ConfigError(f"unknown mechanism {mech!r}; choose from {MECHANISM_NAMES}")
        if not (0.0 < self.p_center < 1.0):
            raise ConfigError("p_center must lie strictly inside (0, 1)")
        for dp in self.delta_p:
            if not (0.0 < dp <= 1.0):
                raise ConfigError(f"delta_p entries must lie in (0, 1], got {dp}")
        for eps in self.epsilon:
            if not eps > 0.0:
                raise ConfigError(f"epsilon entries must be positive, got {eps}")
        for delta in self.delta:
            if not (0.0 <= delta < 1.0):
                raise ConfigError(f"delta entries must lie in [0, 1), got {delta}")
        if self.n <= 0 or self.modeling_samples < 2 or self.repetitions <= 0:
            raise ConfigError("n, modeling_samples, repetitions must be positive (samples >= 2)")
        if self.group_size < 1 or self.workers < 1:
            raise ConfigError("group_size and workers must be >= 1")

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        return cls.from_dict(doc)

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        doc = dict(doc)
        if "property" in doc:
            doc["property_name"] = doc.pop("property")
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**doc)

    def shadow_config(self) -> ShadowConfig:
        doc = dict(self.attack)
        p_low = doc.pop("p_low", None)
        p_high = doc.pop("p_high", None)
        if p_low is None:
            p_low = self.p_center - self.delta_p[0] / 2.0
        if p_high is None:
            p_high = self.p_center + self.delta_p[0] / 2.0
        kwargs = dict(
            p_low=_round_p(p_low),
            p_high=_round_p(p_high),
            seed=self.seed,
            n=doc.pop("n", self.n),
            shadow_count=doc.pop("shadow_count", 200),
            test_count=doc.pop("test_count", 200),
            repetitions=doc.pop("repetitions", self.repetitions),
            noise_shadow=doc.pop("noise_shadow", True),
            standardize=doc.pop("standardize", True),
        )
        if doc:
            raise ConfigError(f"unknown attack config keys: {sorted(doc)}")
        return ShadowConfig(**kwargs)

    def required_p_values(self) -> List[float]:
        values = set()
        for dp in self.delta_p:
            values.add(_round_p(self.p_center - dp / 2.0))
            values.add(_round_p(self.p_center + dp / 2.0))
        shadow = self.shadow_config()
        values.update((shadow.p_low, shadow.p_high))
        return sorted(values)

    def pair_values(self) -> List[Tuple[float, float]]:
        """Ordered (low, high) and (high, low) pairs, one set per delta_p."""
        pairs = []
        for dp in self.delta_p:
            lo = _round_p(self.p_center - dp / 2.0)
            hi = _round_p(self.p_center + dp / 2.0)
            pairs.append((lo, hi))
            pairs.append((hi, lo))
        return pairs

    def query_components(self):
        bounds = {
            "age": tuple(self.attribute_bounds.get("age", AGE_BOUNDS)),
            "education_num": tuple(self.attribute_bounds.get("education_num", EDUCATION_BOUNDS)),
            "hours_per_week": tuple(self.attribute_bounds.get("hours_per_week", HOURS_BOUNDS)),
        }
        return (
            ("avg",) + bounds["age"],
            ("avg",) + bounds["education_num"],
            ("count",),
            ("count",),
            ("avg",) + bounds["hours_per_week"],
        )

    def canonical_dict(self) -> dict:
        doc = {name: getattr(self, name) for name in self.__dataclass_fields__}
        doc.pop("out_dir")
        doc.pop("workers")
        return doc

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical_dict(), sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()


def load_dataset(cfg: ExperimentConfig) -> Table:
    if cfg.dataset_format == "adult":
        return load_adult(cfg.dataset, allow_variant=cfg.allow_variant_dataset)
    return load_simple_csv(cfg.dataset)


def load_splits(cfg: ExperimentConfig) -> SplitTables:
    return split_dataset(load_dataset(cfg), cfg.seed)


# --- plan construction ----------------------------------------------------


def build_plan(
    mechanism: str,
    family: Optional[PairFamily],
    params: PrivacyParams,
    cfg: ExperimentConfig,
) -> NoisePlan:
    """Resolve a mechanism name from the sweep grid into a noise plan."""
    if mechanism == "none":
        return NoisePlan(kind="none", provenance={"mechanism": "none"})
    if mechanism in ("gdp-l", "gdp-g"):
        norm = 1 if mechanism.endswith("l") else 2
        sens = per_record_sensitivity(cfg.query_components(), cfg.n, norm)
        noise = "laplace" if mechanism.endswith("l") else "gaussian"
        return group_dp_calibrate(sens, cfg.group_size, params, noise)
    if family is None:
        raise ConfigError(f"mechanism {mechanism!r} requires a model catalog")
    if mechanism == "wass":
        # Translation pairs make the worst-case transport distance equal the
        # worst-case L1 mean gap, which is what the Gaussian catalog encodes.
        return calibrate_wasserstein(delta_E(family, 1), params)
    if mechanism == "awass":
        c = _whp_l1_radius(family, params.delta, cfg)
        return calibrate_approx_wasserstein(delta_E(family, 1) + 2.0 * c, params)
    if mechanism in ("expm-l", "expm-g"):
        return calibrate_expm(family, params, "laplace" if mechanism.endswith("l") else "gaussian")
    if mechanism in ("dir-l", "dir-g"):
        v = check_assumptions(family).common_direction
        noise = "laplace" if mechanism.endswith("l") else "gaussian"
        return calibrate_directional(family, v, params, noise, angle_tol=cfg.angle_tol)
    if mechanism == "eig":
        return eig_plan(family, params, basis_tol=cfg.eigenbasis_tol)
    if mechanism == "dau":
        v = check_assumptions(family).common_direction
        return dau_plan(family, v, params, angle_tol=cfg.angle_tol, cov_tol=cfg.cov_tol)
    raise ConfigError(f"unknown mechanism {mechanism!r}")


def _whp_l1_radius(family: PairFamily, delta: float, cfg: ExperimentConfig) -> float:
    """Monte Carlo (1 - delta/2)-quantile of the L1 deviation from the mean.

    Worst case over the family's models; drawn with a derived seed so the
    radius is reproducible for a given config.
    """
    if delta <= 0.0:
        raise ConfigError("awass requires delta > 0")
    worst = 0.0
    for label in family.sorted_labels():
        model = family.catalog[label]
        rng = derive_rng(cfg.seed, "awass-radius", label.property_id, label.value)
        draws = gaussian_model_draws(model, cfg.awass_quantile_draws, rng)
        radii = np.abs(draws - model.mean).sum(axis=1)
        worst = max(worst, float(np.quantile(radii, 1.0 - delta / 2.0)))
    return worst


# --- model stage ----------------------------------------------------------


def cmd_model(cfg: ExperimentConfig, emit_manifest: bool = False) -> Path:
    """Estimate one Gaussian model per required property value."""
    splits = load_splits(cfg)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    catalog = {}
    manifests = {}
    for p in cfg.required_p_values():
        rng = derive_rng(cfg.seed, "model", cfg.property_name, p)
        prop = PropertySpec(cfg.property_name, p)
        index_sets = [
            sample_subset_indices(splits.modeling, prop, cfg.n, rng)
            for _ in range(cfg.modeling_samples)
        ]
        queries = np.vstack([compute_query(splits.modeling.take(idx)) for idx in index_sets])
        catalog[SecretLabel(cfg.property_name, p)] = estimate_gaussian(queries)
        if emit_manifest:
            manifests[str(p)] = [idx.tolist() for idx in index_sets]

    catalog_path = out_dir / "catalog.json"
    save_catalog(catalog, catalog_path)
    with open(out_dir / "pairs.json", "w", encoding="utf-8") as fh:
        json.dump(
            {"property": cfg.property_name, "pairs": [list(p) for p in cfg.pair_values()]},
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
    if emit_manifest:
        _write_manifest(out_dir, "model", manifests)
    _write_run_manifest(cfg, out_dir)
    return catalog_path


# --- sweep machinery -------------------------------------------------------


def _cell_path(out_dir: Path, stage: str, cfg_hash: str, *parts) -> Path:
    key = hashlib.sha256(("|".join(str(p) for p in parts)).encode("utf-8")).hexdigest()[:20]
    cells = out_dir / "cells"
    cells.mkdir(parents=True, exist_ok=True)
    return cells / f"{stage}-{key}.json"


def _load_cell(path: Path, cfg_hash: str):
    if not path.exists():
        return None
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError):
        return None
    if doc.get("config_hash") != cfg_hash:
        return None
    return doc["values"]


def _store_cell(path: Path, cfg_hash: str, values) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"config_hash": cfg_hash, "values": values}, fh)
        fh.write("\n")


def _run_cells(tasks, workers: int):
    if workers <= 1:
        return [task() for task in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(task) for task in tasks]
        return [f.result() for f in futures]


def cmd_utility(cfg: ExperimentConfig, emit_manifest: bool = False) -> Path:
    """Mean L2 noise norm per (mechanism, epsilon, delta, delta_p) cell."""
    splits = load_splits(cfg)
    catalog = load_catalog(Path(cfg.out_dir) / "catalog.json")
    out_dir = Path(cfg.out_dir)
    cfg_hash = cfg.config_hash()
    prop_center = PropertySpec(cfg.property_name, cfg.p_center)

    families = {}
    for dp in cfg.delta_p:
        lo = _round_p(cfg.p_center - dp / 2.0)
        hi = _round_p(cfg.p_center + dp / 2.0)
        families[dp] = family_from_catalog(catalog, [(lo, hi)], cfg.property_name)

    manifests = {}

    def make_task(mech, eps, delta, dp):
        def task():
            cell = _cell_path(out_dir, "utility", cfg_hash, mech, eps, delta, dp)
            cached = _load_cell(cell, cfg_hash)
            if cached is not None:
                return (mech, eps, delta, dp), cached
            params = PrivacyParams(epsilon=eps, delta=delta)
            family = None if mech in ("none", "gdp-l", "gdp-g") else families[dp]
            plan = build_plan(mech, family, params, cfg)
            errors = []
            for rep in range(cfg.repetitions):
                # The generator is keyed by everything except the mechanism,
                # so one repetition confronts every mechanism with the same
                # subset and underlying noise draws: mechanism comparisons
                # are paired rather than smeared by independent streams.
                rng = derive_rng(cfg.seed, "utility", eps, delta, dp, rep)
                idx = sample_subset_indices(splits.modeling, prop_center, cfg.n, rng)
                query = compute_query(splits.modeling.take(idx))
                noised = apply(plan, query, rng)
                errors.append(float(np.linalg.norm(noised - query)))
                if emit_manifest:
                    manifests[f"{mech}|{eps}|{delta}|{dp}|{rep}"] = idx.tolist()
            _store_cell(cell, cfg_hash, errors)
            return (mech, eps, delta, dp), errors

        return task

    grid = [
        (mech, eps, delta, dp)
        for mech in cfg.mechanisms
        for eps in cfg.epsilon
        for delta in cfg.delta
        for dp in cfg.delta_p
    ]
    results = _run_cells([make_task(*cellv) for cellv in grid], cfg.workers)

    lines = [UTILITY_CSV_HEADER]
    for (mech, eps, delta, dp), errors in results:
        for rep, err in enumerate(errors):
            lines.append(f"{mech},{eps},{delta},{cfg.property_name},{dp},{rep},{err!r}")
        lines.append(
            f"{mech},{eps},{delta},{cfg.property_name},{dp},mean,{float(np.mean(errors))!r}"
        )
    out_path = out_dir / "results_utility.csv"
    out_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    if emit_manifest:
        _write_manifest(out_dir, "utility", manifests)
    _write_run_manifest(cfg, out_dir)
    return out_path


def cmd_attack(cfg: ExperimentConfig, emit_manifest: bool = False) -> Path:
    """Attack accuracy per (mechanism, epsilon, delta) cell."""
    splits = load_splits(cfg)
    catalog = load_catalog(Path(cfg.out_dir) / "catalog.json")
    out_dir = Path(cfg.out_dir)
    cfg_hash = cfg.config_hash()
    shadow = cfg.shadow_config()
    dp = _round_p(shadow.p_high - shadow.p_low)
    family = family_from_catalog(
        catalog, [(shadow.p_low, shadow.p_high)], cfg.property_name
    )
    prop = PropertySpec(cfg.property_name, shadow.p_low)

    def make_task(mech, eps, delta):
        def task():
            cell = _cell_path(out_dir, "attack", cfg_hash, mech, eps, delta)
            cached = _load_cell(cell, cfg_hash)
            if cached is not None:
                return (mech, eps, delta), cached
            params = PrivacyParams(epsilon=eps, delta=delta)
            fam = None if mech in ("none", "gdp-l", "gdp-g") else family
            plan = build_plan(mech, fam, params, cfg)
            accuracies = []
            for rep in range(shadow.repetitions):
                rng = derive_rng(cfg.seed, "attack", mech, eps, delta, rep)
                accuracies.append(
                    run_attack_trial(splits.aux, splits.test, prop, shadow, plan, rng)
                )
            _store_cell(cell, cfg_hash, accuracies)
            return (mech, eps, delta), accuracies

        return task

    grid = [
        (mech, eps, delta)
        for mech in cfg.mechanisms
        for eps in cfg.epsilon
        for delta in cfg.delta
    ]
    results = _run_cells([make_task(*cellv) for cellv in grid], cfg.workers)

    lines = [ATTACK_CSV_HEADER]
    for (mech, eps, delta), accs in results:
        for rep, acc in enumerate(accs):
            lines.append(f"{mech},{eps},{delta},{cfg.property_name},{dp},{rep},{acc!r}")
        lines.append(
            f"{mech},{eps},{delta},{cfg.property_name},{dp},mean,{float(np.mean(accs))!r}"
        )
    out_path = out_dir / "results_attack.csv"
    out_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    _write_run_manifest(cfg, out_dir)
    return out_path


def _write_manifest(out_dir: Path, stage: str, manifests: dict) -> None:
    manifest_dir = out_dir / "manifests"
    manifest_dir.mkdir(parents=True, exist_ok=True)
    with open(manifest_dir / f"{stage}_subsets.json", "w", encoding="utf-8") as fh:
        json.dump(manifests, fh, sort_keys=True)
        fh.write("\n")


def _write_run_manifest(cfg: ExperimentConfig, out_dir: Path) -> None:
    doc = {
        "config_hash": cfg.config_hash(),
        "seed": cfg.seed,
        "schema": {"utility": UTILITY_CSV_HEADER, "attack": ATTACK_CSV_HEADER},
        "versions": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "distpriv": __version__,
        },
    }
    with open(out_dir / "run_manifest.json", "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


# --- single-shot commands ---------------------------------------------------


def _certificate_json(cert) -> dict:
    return {
        "coupling_edges": [
            [i, j, mass.numerator, mass.denominator] for i, j, mass in cert.coupling_edges
        ],
        "retained_mass": [cert.retained_mass.numerator, cert.retained_mass.denominator],
        "max_retained_distance": cert.max_retained_distance,
    }


def transport_report(file_mu, file_nu, delta: float) -> dict:
    with open(file_mu, "r", encoding="utf-8") as fh:
        mu = DiscreteDistribution.from_json(json.load(fh))
    with open(file_nu, "r", encoding="utf-8") as fh:
        nu = DiscreteDistribution.from_json(json.load(fh))
    winf = winf_distance(mu, nu)
    w = min_w_for_delta(mu, nu, delta)
    ok, cert = is_w_delta_close(mu, nu, w, delta)
    report = {
        "winf": winf,
        "delta": delta,
        "min_w_for_delta": w,
        "close": ok,
        "certificate": _certificate_json(cert) if cert is not None else None,
    }
    return report


def _family_from_args(models_path, pairs_arg, property_name=None) -> PairFamily:
    catalog = load_catalog(models_path)
    text = pairs_arg
    path = Path(pairs_arg)
    if path.exists():
        text = path.read_text(encoding="utf-8")
    doc = json.loads(text)
    if isinstance(doc, dict):
        property_name = doc.get("property", property_name)
        doc = doc["pairs"]
    return family_from_catalog(catalog, doc, property_name)


def release_report(args: argparse.Namespace) -> dict:
    params = PrivacyParams(epsilon=args.epsilon, delta=args.delta)
    cfg = _adhoc_config(args)
    family = None
    if args.mechanism not in ("none", "gdp-l", "gdp-g"):
        family = _family_from_args(args.models, args.pairs, args.property)
    plan = build_plan(args.mechanism, family, params, cfg)
    query = load_query_json(args.query)
    noised = apply(plan, query, derive_rng(args.seed, "release", args.mechanism))
    return {"noised_value": [float(x) for x in noised], "plan": plan.to_json()}


def audit_report_json(args: argparse.Namespace) -> dict:
    params = PrivacyParams(epsilon=args.epsilon, delta=args.delta)
    cfg = _adhoc_config(args)
    family = _family_from_args(args.models, args.pairs, args.property)
    plan = build_plan(args.mechanism, family, params, cfg)
    label_i, label_j = family.pairs[0]
    report = audit(
        plan,
        family.catalog[label_i],
        family.catalog[label_j],
        params,
        args.trials,
        derive_rng(args.seed, "audit", args.mechanism),
    )
    return {
        "estimated_violation": report.estimated_violation,
        "trials": report.trials,
        "event_family": report.event_family,
        "pair": [[label_i.property_id, label_i.value], [label_j.property_id, label_j.value]],
        "plan": plan.to_json(),
    }


def _adhoc_config(args: argparse.Namespace) -> ExperimentConfig:
    """Minimal config carrying the tolerance and sizing flags of one-shot commands."""
    return ExperimentConfig(
        dataset="",
        seed=args.seed,
        delta_p=[0.1],
        epsilon=[args.epsilon],
        delta=[args.delta if args.delta > 0 else 0.001],
        mechanisms=[args.mechanism],
        n=args.n,
        group_size=args.group_size,
        angle_tol=args.angle_tol,
        cov_tol=args.cov_tol,
        eigenbasis_tol=args.eigenbasis_tol,
        modeling_samples=2,
        repetitions=1,
    )


# --- argparse wiring --------------------------------------------------------


def _add_config_command(sub, name, help_text):
    cmd = sub.add_parser(name, help=help_text)
    cmd.add_argument("--config", required=True, help="experiment config JSON")
    cmd.add_argument("--seed", type=int, default=None, help="override the config seed")
    cmd.add_argument("--out", default=None, help="override the config output directory")
    cmd.add_argument(
        "--emit-manifest", action="store_true", help="also write sampled subset indices"
    )
    return cmd


def _add_adhoc_flags(cmd, with_query: bool):
    cmd.add_argument("--mechanism", required=True, choices=MECHANISM_NAMES)
    cmd.add_argument("--epsilon", type=float, required=True)
    cmd.add_argument("--delta", type=float, default=0.0)
    cmd.add_argument("--models", required=True, help="model catalog JSON")
    cmd.add_argument("--pairs", required=True, help="pairs JSON (inline or a file path)")
    cmd.add_argument("--property", default=None, help="property id when the catalog holds several")
    if with_query:
        cmd.add_argument("--query", required=True, help="query vector JSON file")
    cmd.add_argument("--seed", type=int, default=0)
    cmd.add_argument("--n", type=int, default=100, help="subset size for group-DP sensitivity")
    cmd.add_argument("--group-size", dest="group_size", type=int, default=100)
    cmd.add_argument("--angle-tol", dest="angle_tol", type=float, default=1e-6)
    cmd.add_argument("--cov-tol", dest="cov_tol", type=float, default=0.5)
    cmd.add_argument("--eigenbasis-tol", dest="eigenbasis_tol", type=float, default=0.5)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distpriv",
        description="Distribution-privacy mechanisms for global dataset properties",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    _add_config_command(sub, "model", "estimate Gaussian query models, write catalog.json")
    _add_config_command(sub, "utility", "privacy-utility sweep to results_utility.csv")
    _add_config_command(sub, "attack", "attack-accuracy sweep to results_attack.csv")

    tr = sub.add_parser("transport", help="exact transport report for two distributions")
    tr.add_argument("file_mu", help="first DiscreteDistribution JSON file")
    tr.add_argument("file_nu", help="second DiscreteDistribution JSON file")
    tr.add_argument("--delta", type=float, default=0.0)

    rel = sub.add_parser("release", help="noise one query vector")
    _add_adhoc_flags(rel, with_query=True)

    aud = sub.add_parser("audit", help="empirical indistinguishability check")
    _add_adhoc_flags(aud, with_query=False)
    aud.add_argument("--trials", type=int, default=100_000)

    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig.from_json(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out_dir = args.out
    return cfg


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "model":
        path = cmd_model(_config_from_args(args), emit_manifest=args.emit_manifest)
        print(str(path))
    elif args.command == "utility":
        path = cmd_utility(_config_from_args(args), emit_manifest=args.emit_manifest)
        print(str(path))
    elif args.command == "attack":
        path = cmd_attack(_config_from_args(args), emit_manifest=args.emit_manifest)
        print(str(path))
    elif args.command == "transport":
        print(json.dumps(transport_report(args.file_mu, args.file_nu, args.delta), indent=2))
    elif args.command == "release":
        print(json.dumps(release_report(args), indent=2))
    elif args.command == "audit":
        print(json.dumps(audit_report_json(args), indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
