"""Gaussian instantiation of the distribution-privacy framework.

A protected instantiation is a catalog of secret labels (a sensitive
property name plus a proportion value) mapped to Gaussian models of the
query distribution, together with the ordered pairs of labels an
attacker must not be able to distinguish. This module estimates the
models, measures expected-value sensitivities, and quantifies how well
the data satisfy the assumptions the noise mechanisms rely on
(shared covariance, common gap direction, common eigenbasis).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from .errors import ConfigError, EstimationError, NumericError

SYMMETRY_RTOL = 1e-9
PSD_RTOL = 1e-9
RIDGE_REL = 1e-9


@dataclass(frozen=True, order=True)
class SecretLabel:
    """One possible value of a sensitive global property."""

    property_id: str
    value: float

    def __post_init__(self):
        if not self.property_id:
            raise ValueError("property_id must be nonempty")
        if not (0.0 <= self.value <= 1.0):
            raise ValueError(f"property value must lie in [0, 1], got {self.value}")


@dataclass(frozen=True)
class PrivacyParams:
    """Privacy budget (epsilon, delta) with epsilon > 0 and 0 <= delta < 1."""

    epsilon: float
    delta: float = 0.0

    def __post_init__(self):
        if not (self.epsilon > 0.0):
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not (0.0 <= self.delta < 1.0):
            raise ValueError(f"delta must lie in [0, 1), got {self.delta}")

    def gaussian_c(self) -> float:
        """The Gaussian-mechanism constant c = sqrt(2 ln(1.25/delta))."""
        if self.delta <= 0.0:
            raise ValueError("gaussian calibration requires delta > 0")
        return float(np.sqrt(2.0 * np.log(1.25 / self.delta)))


class GaussianModel:
    """Multivariate Gaussian approximation of a query distribution.

    Holds a mean vector, a symmetric positive semi-definite covariance
    matrix, and the number of samples used in estimation. Arrays are
    frozen after construction; instances are safe to share across threads.
    """

    __slots__ = ("mean", "cov", "sample_count")

    def __init__(self, mean, cov, sample_count: int):
        mean = np.asarray(mean, dtype=float)
        cov = np.asarray(cov, dtype=float)
        if mean.ndim != 1:
            raise ValueError("mean must be a vector")
        if cov.shape != (mean.size, mean.size):
            raise ValueError(f"cov must be {mean.size}x{mean.size}, got {cov.shape}")
        if not np.all(np.isfinite(mean)) or not np.all(np.isfinite(cov)):
            raise ValueError("mean and cov must be finite")
        _require_symmetric(cov)
        eigvals = np.linalg.eigvalsh(cov)
        lam_max = float(eigvals[-1]) if eigvals.size else 0.0
        if eigvals.size and float(eigvals[0]) < -PSD_RTOL * max(lam_max, 0.0) - 1e-300:
            raise ValueError(f"cov is not positive semi-definite (min eigenvalue {eigvals[0]:g})")
        if int(sample_count) < 1:
            raise ValueError("sample_count must be positive")
        mean.setflags(write=False)
        cov = 0.5 * (cov + cov.T)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "sample_count", int(sample_count))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianModel is immutable")

    @property
    def dim(self) -> int:
        return self.mean.size

    def __repr__(self):
        return f"GaussianModel(dim={self.dim}, sample_count={self.sample_count})"

    def __eq__(self, other):
        if not isinstance(other, GaussianModel):
            return NotImplemented
        return (
            self.sample_count == other.sample_count
            and np.array_equal(self.mean, other.mean)
            and np.array_equal(self.cov, other.cov)
        )

    def __hash__(self):
        return hash((self.mean.tobytes(), self.cov.tobytes(), self.sample_count))


@dataclass(frozen=True)
class PairFamily:
    """A catalog of Gaussian models plus the protected ordered pairs.

    Pairs must be symmetric: whenever (i, j) is protected, (j, i) must be
    listed as well, so the indistinguishability guarantee runs both ways.
    """

    catalog: Mapping[SecretLabel, GaussianModel]
    pairs: Tuple[Tuple[SecretLabel, SecretLabel], ...]

    def __init__(self, catalog, pairs):
        catalog = dict(catalog)
        pairs = tuple((a, b) for a, b in pairs)
        if not pairs:
            raise ConfigError("pair family requires at least one protected pair")
        pair_set = set(pairs)
        dims = set()
        for a, b in pairs:
            for lab in (a, b):
                if lab not in catalog:
                    raise ConfigError(f"pair label {lab} missing from catalog")
            if (b, a) not in pair_set:
                raise ConfigError(f"pair {(a, b)} lacks its reverse; protection must be symmetric")
        for model in catalog.values():
            dims.add(model.dim)
        if len(dims) != 1:
            raise ConfigError(f"catalog models disagree on dimension: {sorted(dims)}")
        object.__setattr__(self, "catalog", catalog)
        object.__setattr__(self, "pairs", pairs)

    @property
    def dim(self) -> int:
        return next(iter(self.catalog.values())).dim

    def sorted_labels(self) -> List[SecretLabel]:
        return sorted(self.catalog)

    def gap_vectors(self) -> np.ndarray:
        """Mean-difference vectors, one column per protected pair."""
        cols = [self.catalog[a].mean - self.catalog[b].mean for a, b in self.pairs]
        return np.column_stack(cols)


@dataclass(frozen=True)
class AssumptionReport:
    """How far a family sits from the mechanisms' modeling assumptions.

    max_cov_discrepancy: largest entrywise difference between the two
        covariances of a protected pair, relative to the largest entry
        magnitude of either matrix.
    max_direction_angle: largest angle (radians) between any mean gap and
        the fitted common direction.
    common_eigenbasis_residual: largest off-diagonal magnitude when every
        covariance is expressed in the reference model's eigenbasis,
        relative to the reference's largest eigenvalue magnitude.
    common_direction: the fitted unit direction itself, for use by the
        directional mechanisms.
    """

    max_cov_discrepancy: float
    max_direction_angle: float
    common_eigenbasis_residual: float
    common_direction: np.ndarray = field(repr=False)


def estimate_gaussian(samples) -> GaussianModel:
    """Fit a Gaussian by sample mean and unbiased sample covariance.

    Requires at least two samples of equal length; the covariance uses
    the (count - 1) divisor.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise EstimationError("samples must form a 2-D array of row vectors")
    n = x.shape[0]
    if n < 2:
        raise EstimationError(f"need at least 2 samples to estimate a covariance, got {n}")
    if not np.all(np.isfinite(x)):
        raise ValueError("samples must be finite")
    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / (n - 1)
    cov = 0.5 * (cov + cov.T)
    return GaussianModel(mean=mean, cov=cov, sample_count=n)


def delta_E(family: PairFamily, norm: int) -> float:
    """Worst-case distance between expected values over protected pairs."""
    if norm not in (1, 2):
        raise ValueError(f"norm must be 1 or 2, got {norm}")
    if not family.pairs:
        raise ConfigError("pair family has no pairs")
    gaps = family.gap_vectors()
    if norm == 1:
        per_pair = np.abs(gaps).sum(axis=0)
    else:
        per_pair = np.sqrt((gaps**2).sum(axis=0))
    return float(per_pair.max())


def fit_common_direction(family: PairFamily) -> np.ndarray:
    """Dominant singular direction of the pairwise mean gaps.

    Automates the domain-expert choice of the direction along which the
    query means move as the sensitive property changes. Returns a unit
    vector with the usual sign convention (first nonzero entry positive);
    falls back to the first axis when every gap is zero.
    """
    gaps = family.gap_vectors()
    if not np.any(gaps):
        v = np.zeros(family.dim)
        v[0] = 1.0
        return v
    u, _, _ = np.linalg.svd(gaps, full_matrices=False)
    v = u[:, 0]
    return _fix_sign(v / np.linalg.norm(v))


def check_assumptions(family: PairFamily) -> AssumptionReport:
    """Measure covariance sharing, gap collinearity, and eigenbasis agreement."""
    # Entrywise covariance discrepancy over pairs, scaled by the larger matrix.
    disc = 0.0
    for a, b in family.pairs:
        ca, cb = family.catalog[a].cov, family.catalog[b].cov
        scale = max(np.abs(ca).max(), np.abs(cb).max())
        diff = np.abs(ca - cb).max()
        if diff > 0.0:
            disc = max(disc, diff / scale)

    v = fit_common_direction(family)
    angle = 0.0
    gaps = family.gap_vectors()
    norms = np.linalg.norm(gaps, axis=0)
    for k in range(gaps.shape[1]):
        if norms[k] == 0.0:
            continue  # zero-difference pairs are parallel to anything
        cosine = abs(float(gaps[:, k] @ v)) / norms[k]
        angle = max(angle, float(np.arccos(np.clip(cosine, -1.0, 1.0))))

    labels = family.sorted_labels()
    ref = family.catalog[labels[0]]
    eig = eigendecompose(ref.cov)
    basis = np.column_stack([vec for _, vec in eig])
    lam_scale = max(abs(val) for val, _ in eig)
    residual = 0.0
    off_mask = ~np.eye(family.dim, dtype=bool)
    for lab in labels:
        rotated = basis.T @ family.catalog[lab].cov @ basis
        off = float(np.abs(rotated[off_mask]).max()) if family.dim > 1 else 0.0
        if off > 0.0:
            residual = max(residual, off / lam_scale) if lam_scale > 0.0 else float("inf")

    return AssumptionReport(
        max_cov_discrepancy=disc,
        max_direction_angle=angle,
        common_eigenbasis_residual=residual,
        common_direction=v,
    )


def eigendecompose(cov) -> List[Tuple[float, np.ndarray]]:
    """Symmetric eigendecomposition with a deterministic output convention.

    Eigenvalues are sorted descending; each eigenvector is normalized and
    sign-fixed so its first nonzero component is positive.
    """
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {cov.shape}")
    _require_symmetric(cov)
    vals, vecs = np.linalg.eigh(0.5 * (cov + cov.T))
    order = np.argsort(vals)[::-1]
    out = []
    for idx in order:
        out.append((float(vals[idx]), _fix_sign(vecs[:, idx].copy())))
    return out


def ridge_repaired(cov: np.ndarray) -> np.ndarray:
    """Covariance with the standard ridge added before any inversion."""
    cov = np.asarray(cov, dtype=float)
    m = cov.shape[0]
    ridge = RIDGE_REL * float(np.trace(cov)) / m
    if ridge <= 0.0:
        return cov.copy()
    return cov + ridge * np.eye(m)


def solve_spd(cov: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve (cov + ridge) x = rhs by Cholesky; raise NumericError if singular."""
    repaired = ridge_repaired(cov)
    try:
        chol = np.linalg.cholesky(repaired)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"covariance is singular after ridge repair: {exc}") from exc
    y = np.linalg.solve(chol, rhs)
    return np.linalg.solve(chol.T, y)


# --- JSON catalog format ------------------------------------------------
#
# One model document: {"property_id": str, "value": float, "mean": [...],
# "cov": [[...]], "sample_count": int}; a catalog file is a JSON array of
# these documents.


def model_to_doc(label: SecretLabel, model: GaussianModel) -> dict:
    return {
        "property_id": label.property_id,
        "value": label.value,
        "mean": [float(x) for x in model.mean],
        "cov": [[float(x) for x in row] for row in model.cov],
        "sample_count": model.sample_count,
    }


def model_from_doc(doc: dict) -> Tuple[SecretLabel, GaussianModel]:
    label = SecretLabel(property_id=doc["property_id"], value=float(doc["value"]))
    model = GaussianModel(
        mean=doc["mean"], cov=doc["cov"], sample_count=int(doc["sample_count"])
    )
    return label, model


def save_catalog(catalog: Mapping[SecretLabel, GaussianModel], path) -> None:
    docs = [model_to_doc(lab, catalog[lab]) for lab in sorted(catalog)]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(docs, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_catalog(path) -> Dict[SecretLabel, GaussianModel]:
    with open(path, "r", encoding="utf-8") as fh:
        docs = json.load(fh)
    catalog: Dict[SecretLabel, GaussianModel] = {}
    for doc in docs:
        label, model = model_from_doc(doc)
        catalog[label] = model
    return catalog


def family_from_catalog(
    catalog: Mapping[SecretLabel, GaussianModel],
    value_pairs: Iterable[Sequence[float]],
    property_id: str | None = None,
) -> PairFamily:
    """Build a family from a catalog and (value_i, value_j) pairs.

    Pairs are closed under reversal automatically. When property_id is
    omitted the catalog must hold a single property.
    """
    if property_id is None:
        props = {lab.property_id for lab in catalog}
        if len(props) != 1:
            raise ConfigError(f"catalog holds several properties {sorted(props)}; specify one")
        property_id = props.pop()
    pairs = []
    seen = set()
    for vi, vj in value_pairs:
        a = SecretLabel(property_id, float(vi))
        b = SecretLabel(property_id, float(vj))
        for pair in ((a, b), (b, a)):
            if pair not in seen:
                seen.add(pair)
                pairs.append(pair)
    used = {lab for pair in pairs for lab in pair}
    missing = [lab for lab in used if lab not in catalog]
    if missing:
        raise ConfigError(f"catalog lacks models for {missing}")
    return PairFamily(catalog={lab: catalog[lab] for lab in used}, pairs=pairs)


def _require_symmetric(mat: np.ndarray) -> None:
    scale = max(1.0, float(np.abs(mat).max()) if mat.size else 0.0)
    asym = float(np.abs(mat - mat.T).max()) if mat.size else 0.0
    if asym > SYMMETRY_RTOL * scale:
        raise ValueError(f"matrix is not symmetric (max asymmetry {asym:g})")


def _fix_sign(v: np.ndarray) -> np.ndarray:
    for x in v:
        if x != 0.0:
            if x < 0.0:
                return -v
            return v
    return v
