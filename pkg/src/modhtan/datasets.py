"""Dataset construction: the synthetic x**2 - 2 regression set and the
Statlog-format heart disease benchmark, plus [-1, 1] min-max scaling and
seeded train/test splitting (feature scaling fit on the train side only).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

HEART_FEATURES = 13
HEART_EXPECTED_ROWS = 270


class DatasetKind(Enum):
    REGRESSION = "regression"
    BINARY_CLASSIFICATION = "binary_classification"


@dataclass(frozen=True)
class ScaleParams:
    """Column min/max plus the [lo, hi] interval they were mapped onto."""

    vmin: float
    vmax: float
    lo: float = -1.0
    hi: float = 1.0


@dataclass
class Dataset:
    X: np.ndarray  # samples x features
    T: np.ndarray  # samples x outputs
    kind: DatasetKind
    x_scale: tuple[ScaleParams, ...] | None = None
    t_scale: tuple[ScaleParams, ...] | None = None


@dataclass(frozen=True)
class SplitSpec:
    test_fraction: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.test_fraction < 1:
            raise ValueError(f"test_fraction must be in (0, 1), got {self.test_fraction}")


def linear_scale(column, lo: float = -1.0, hi: float = 1.0) -> tuple[np.ndarray, ScaleParams]:
    """Affine map of [min, max] onto [lo, hi]; constant columns go to the midpoint."""
    col = np.asarray(column, dtype=float)
    if col.size == 0:
        raise ValueError("cannot scale an empty column")
    if not np.all(np.isfinite(col)):
        raise ValueError("cannot scale non-finite values")
    params = ScaleParams(vmin=float(col.min()), vmax=float(col.max()), lo=lo, hi=hi)
    return apply_scale(col, params), params


def apply_scale(column, params: ScaleParams) -> np.ndarray:
    """Map a column with previously fitted parameters (e.g. test by train stats)."""
    col = np.asarray(column, dtype=float)
    if params.vmin == params.vmax:
        return np.full_like(col, (params.lo + params.hi) / 2.0)
    span = (params.hi - params.lo) / (params.vmax - params.vmin)
    if not math.isfinite(span):  # column width below float resolution
        return np.full_like(col, (params.lo + params.hi) / 2.0)
    return (col - params.vmin) * span + params.lo


def unscale(scaled, params: ScaleParams) -> np.ndarray:
    """Inverse of apply_scale; constant columns recover the constant."""
    s = np.asarray(scaled, dtype=float)
    if params.vmin == params.vmax:
        return np.full_like(s, params.vmin)
    span = (params.vmax - params.vmin) / (params.hi - params.lo)
    return (s - params.lo) * span + params.vmin


def gen_quadratic(n: int, random_x: bool = False, seed: int = 0) -> Dataset:
    """n points of the x**2 - 2 curve, inputs and targets scaled to [-1, 1].

    Inputs are linearly spaced over [-1, 1] by default; random_x draws them
    uniformly instead.
    """
    if n < 2:
        raise ValueError(f"need at least 2 points, got {n}")
    if random_x:
        x = np.random.default_rng(seed).uniform(-1.0, 1.0, size=n)
    else:
        x = np.linspace(-1.0, 1.0, n)
    t_raw = x**2 - 2.0
    x_scaled, x_params = linear_scale(x)
    t_scaled, t_params = linear_scale(t_raw)
    return Dataset(
        X=x_scaled[:, None],
        T=t_scaled[:, None],
        kind=DatasetKind.REGRESSION,
        x_scale=(x_params,),
        t_scale=(t_params,),
    )


def load_heart(path) -> Dataset:
    """Statlog heart file: 13 numeric features plus a 1/2 label per line.

    Whitespace- or comma-delimited (auto-detected).  Labels are mapped to
    0 (absence) / 1 (presence).  Features are left unscaled here; scaling is
    fit on the training side at split time.
    """
    with open(path, "r", encoding="utf-8") as fh:
        raw = fh.readlines()
    features = []
    labels = []
    for lineno, line in enumerate(raw, start=1):
        line = line.strip()
        if not line:
            continue
        fields = line.split(",") if "," in line else line.split()
        if len(fields) != HEART_FEATURES + 1:
            raise ValueError(
                f"{path}: line {lineno}: expected {HEART_FEATURES + 1} fields, got {len(fields)}"
            )
        try:
            values = [float(f) for f in fields]
        except ValueError:
            raise ValueError(f"{path}: line {lineno}: non-numeric field") from None
        label = values[-1]
        if label not in (1.0, 2.0):
            raise ValueError(f"{path}: line {lineno}: label must be 1 or 2, got {label:g}")
        features.append(values[:-1])
        labels.append(label - 1.0)
    if len(labels) != HEART_EXPECTED_ROWS:
        warnings.warn(f"{path}: expected {HEART_EXPECTED_ROWS} rows, got {len(labels)}")
    X = np.asarray(features, dtype=float)
    T = np.asarray(labels, dtype=float)[:, None]
    return Dataset(X=X, T=T, kind=DatasetKind.BINARY_CLASSIFICATION)


def split(ds: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Seeded shuffle into ceil((1 - f) * n) train rows and the rest as test.

    Feature scaling to [-1, 1] is fit on the train rows and applied to both
    sides, so test features may fall slightly outside [-1, 1] (by design, no
    clamping).  Targets pass through untouched.
    """
    n = ds.X.shape[0]
    n_train = math.ceil((1.0 - spec.test_fraction) * n)
    if n_train < 1 or n_train >= n:
        raise ValueError(f"split of {n} rows at fraction {spec.test_fraction} leaves an empty side")
    order = np.random.default_rng(spec.seed).permutation(n)
    train_idx, test_idx = order[:n_train], order[n_train:]
    x_train_cols = []
    x_test_cols = []
    params = []
    for col in range(ds.X.shape[1]):
        scaled, p = linear_scale(ds.X[train_idx, col])
        x_train_cols.append(scaled)
        x_test_cols.append(apply_scale(ds.X[test_idx, col], p))
        params.append(p)
    train = Dataset(
        X=np.column_stack(x_train_cols),
        T=ds.T[train_idx].copy(),
        kind=ds.kind,
        x_scale=tuple(params),
        t_scale=ds.t_scale,
    )
    test = Dataset(
        X=np.column_stack(x_test_cols),
        T=ds.T[test_idx].copy(),
        kind=ds.kind,
        x_scale=tuple(params),
        t_scale=ds.t_scale,
    )
    return train, test


def export_csv(ds: Dataset, path) -> None:
    """Dataset dump with header x0..x{d-1},t0..t{k-1}."""
    d, k = ds.X.shape[1], ds.T.shape[1]
    header = ",".join([f"x{i}" for i in range(d)] + [f"t{i}" for i in range(k)])
    lines = [header]
    for xrow, trow in zip(ds.X, ds.T):
        lines.append(",".join(repr(float(v)) for v in (*xrow, *trow)))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def make_heart_fixture(path, n: int = HEART_EXPECTED_ROWS, seed: int = 7) -> None:
    """Write a heart-like stand-in file in the Statlog format.

    The canonical UCI file cannot be fetched here, so tests and offline runs
    use rows drawn from a generative model with the same column layout
    (age, sex, chest pain type, resting blood pressure, cholesterol, fasting
    blood sugar, resting ECG, max heart rate, exercise angina, ST depression,
    slope, vessel count, thalassemia, label in {1, 2}).  The label follows a
    noisy logistic score over the clinically predictive columns, which keeps
    the classification task learnable but not separable.
    """
    rng = np.random.default_rng(seed)
    age = np.clip(rng.normal(54.0, 9.0, n), 29, 77).round(0)
    sex = (rng.random(n) < 0.68).astype(float)
    cp = rng.choice([1.0, 2.0, 3.0, 4.0], size=n, p=[0.07, 0.16, 0.29, 0.48])
    trestbps = np.clip(rng.normal(131.0, 18.0, n), 94, 200).round(0)
    chol = np.clip(rng.normal(250.0, 52.0, n), 126, 564).round(0)
    fbs = (rng.random(n) < 0.15).astype(float)
    restecg = rng.choice([0.0, 1.0, 2.0], size=n, p=[0.49, 0.01, 0.50])
    thalach = np.clip(rng.normal(149.0, 23.0, n), 71, 202).round(0)
    exang = (rng.random(n) < 0.33).astype(float)
    oldpeak = np.maximum(rng.normal(1.05, 1.15, n), 0.0).round(1)
    slope = rng.choice([1.0, 2.0, 3.0], size=n, p=[0.48, 0.46, 0.06])
    ca = rng.choice([0.0, 1.0, 2.0, 3.0], size=n, p=[0.59, 0.21, 0.12, 0.08])
    thal = rng.choice([3.0, 6.0, 7.0], size=n, p=[0.56, 0.05, 0.39])
    cols = [age, sex, cp, trestbps, chol, fbs, restecg, thalach, exang, oldpeak, slope, ca, thal]
    logit = (
        0.9 * (cp == 4.0)
        + 0.8 * exang
        + 0.9 * (oldpeak - 1.05)
        + 0.9 * (ca > 0)
        + 1.0 * (thal == 7.0)
        + 0.7 * sex
        - 0.03 * (thalach - 149.0)
        + 0.02 * (age - 54.0)
        - 1.6
    )
    noise = rng.logistic(0.0, 0.35, n)
    label = np.where(logit + noise > 0.0, 2, 1)
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(n):
            row = " ".join(f"{col[i]:.1f}" for col in cols)
            fh.write(f"{row} {label[i]}\n")
