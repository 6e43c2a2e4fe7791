"""One-hidden-layer feed-forward network with a linear output layer.

Forward, backward, and per-sample residual Jacobian share a fixed parameter
ordering: W1 row-major, b1, W2 row-major, b2.  The training loss is half the
mean squared error over all output entries, so the backward gradient equals
J^T e / (samples * n_out).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .activations import (
    ActivationKind,
    AdaptiveOffset,
    Elu,
    EluParams,
    FixedOffset,
    Htan,
    ModHtan,
    ModHtanParams,
    SoftStep,
    activate,
    parse_activation,
)
from .rnf import RnfParams


class StallError(RuntimeError):
    """A forward pass produced non-finite intermediates."""


@dataclass
class MlpModel:
    n_in: int
    n_hidden: int
    n_out: int
    W1: np.ndarray  # n_hidden x n_in
    b1: np.ndarray  # n_hidden
    W2: np.ndarray  # n_out x n_hidden
    b2: np.ndarray  # n_out
    hidden_kind: ActivationKind

    def __post_init__(self):
        assert self.W1.shape == (self.n_hidden, self.n_in)
        assert self.b1.shape == (self.n_hidden,)
        assert self.W2.shape == (self.n_out, self.n_hidden)
        assert self.b2.shape == (self.n_out,)


@dataclass
class ForwardCache:
    z1: np.ndarray        # hidden pre-activations, samples x n_hidden
    h: np.ndarray         # hidden activations
    g: np.ndarray         # hidden gradients (elementwise, at z1)
    y: np.ndarray         # outputs, samples x n_out
    offset_1: float | None  # modhtan offset used for this batch, else None


@dataclass
class Grads:
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray


def n_params(model: MlpModel) -> int:
    return model.n_hidden * model.n_in + model.n_hidden + model.n_out * model.n_hidden + model.n_out


def pack_params(model: MlpModel) -> np.ndarray:
    """Parameter vector in the fixed ordering W1 (row-major), b1, W2, b2."""
    return np.concatenate([model.W1.ravel(), model.b1, model.W2.ravel(), model.b2])


def pack_grads(grads: Grads) -> np.ndarray:
    return np.concatenate([grads.W1.ravel(), grads.b1, grads.W2.ravel(), grads.b2])


def with_params(model: MlpModel, theta: np.ndarray) -> MlpModel:
    """Copy of the model with parameters taken from the vector theta."""
    h, i, o = model.n_hidden, model.n_in, model.n_out
    sizes = [h * i, h, o * h, o]
    assert theta.shape == (sum(sizes),)
    parts = np.split(np.asarray(theta, dtype=float), np.cumsum(sizes)[:-1])
    return replace(
        model,
        W1=parts[0].reshape(h, i),
        b1=parts[1].copy(),
        W2=parts[2].reshape(o, h),
        b2=parts[3].copy(),
    )


def nguyen_widrow_init(n_in: int, n_hidden: int, n_out: int, hidden_kind: ActivationKind, seed: int) -> MlpModel:
    """Layer initialization that spreads hidden units over the input range.

    Hidden weights are drawn uniform in [-1, 1] and each unit's row is
    rescaled to norm beta = 0.7 * n_hidden**(1/n_in); hidden biases are
    uniform in [-beta, beta].  The linear output layer is uniform in
    [-0.5, 0.5].  Deterministic for a given seed.
    """
    if min(n_in, n_hidden, n_out) < 1:
        raise ValueError("all dimensions must be >= 1")
    rng = np.random.default_rng(seed)
    beta = 0.7 * n_hidden ** (1.0 / n_in)
    W1 = rng.uniform(-1.0, 1.0, size=(n_hidden, n_in))
    W1 = beta * W1 / np.linalg.norm(W1, axis=1, keepdims=True)
    b1 = rng.uniform(-beta, beta, size=n_hidden)
    W2 = rng.uniform(-0.5, 0.5, size=(n_out, n_hidden))
    b2 = rng.uniform(-0.5, 0.5, size=n_out)
    return MlpModel(n_in, n_hidden, n_out, W1, b1, W2, b2, hidden_kind)


def forward(model: MlpModel, X) -> tuple[np.ndarray, ForwardCache]:
    """Batch forward pass; raises StallError on non-finite intermediates."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.n_in:
        raise ValueError(f"expected {model.n_in} input columns, got {X.shape[1]}")
    with np.errstate(over="ignore", invalid="ignore"):  # non-finite turns into StallError
        z1 = X @ model.W1.T + model.b1
    if not np.all(np.isfinite(z1)):
        raise StallError("hidden pre-activations contain non-finite values")
    h, g, offset = activate(model.hidden_kind, z1)
    y = h @ model.W2.T + model.b2
    if not np.all(np.isfinite(y)):
        raise StallError("outputs contain non-finite values")
    return y, ForwardCache(z1=z1, h=h, g=g, y=y, offset_1=offset)


def backward(model: MlpModel, X, T, cache: ForwardCache) -> Grads:
    """Gradients of 0.5 * mean((y - t)**2) over all output entries."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    T = np.atleast_2d(np.asarray(T, dtype=float))
    residual = cache.y - T
    d_y = residual / residual.size
    d_w2 = d_y.T @ cache.h
    d_b2 = d_y.sum(axis=0)
    d_h = d_y @ model.W2
    d_z1 = d_h * cache.g
    d_w1 = d_z1.T @ X
    d_b1 = d_z1.sum(axis=0)
    return Grads(W1=d_w1, b1=d_b1, W2=d_w2, b2=d_b2)


def jacobian(model: MlpModel, X, T, cache: ForwardCache) -> tuple[np.ndarray, np.ndarray]:
    """Residual Jacobian J and residual vector e = (y - t) flattened.

    J has one row per residual (samples major, outputs minor) and one column
    per parameter in pack_params order, so J^T e / e.size equals the
    backward gradient.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    T = np.atleast_2d(np.asarray(T, dtype=float))
    samples = X.shape[0]
    n_out = model.n_out
    eye_o = np.eye(n_out)
    j_w1 = np.einsum("oh,sh,si->sohi", model.W2, cache.g, X).reshape(samples, n_out, -1)
    j_b1 = np.einsum("oh,sh->soh", model.W2, cache.g)
    j_w2 = np.einsum("op,sh->soph", eye_o, cache.h).reshape(samples, n_out, -1)
    j_b2 = np.broadcast_to(eye_o, (samples, n_out, n_out))
    J = np.concatenate([j_w1, j_b1, j_w2, j_b2], axis=2).reshape(samples * n_out, -1)
    e = (cache.y - T).ravel()
    return J, e


_KIND_TAGS = {SoftStep: "softstep", Htan: "htan", Elu: "elu", ModHtan: "modhtan"}


def _kind_fields(kind: ActivationKind) -> dict[str, str]:
    fields = {"hidden_kind": _KIND_TAGS[type(kind)]}
    if isinstance(kind, Elu):
        fields["elu_alpha"] = repr(kind.params.alpha)
    elif isinstance(kind, ModHtan):
        p = kind.params
        fields["modhtan_k_o"] = repr(p.k_o)
        fields["modhtan_x_cutoff"] = repr(p.x_cutoff)
        if isinstance(p.offset_mode, FixedOffset):
            fields["modhtan_offset_mode"] = "fixed"
            fields["modhtan_offset_value"] = repr(p.offset_mode.offset_1)
        else:
            fields["modhtan_offset_mode"] = "adaptive"
            fields["modhtan_offset_delta"] = repr(p.offset_mode.delta)
            fields["modhtan_offset_kappa"] = repr(p.offset_mode.kappa)
        fields["modhtan_x_norm_clamp"] = repr(p.x_norm_clamp)
        fields["modhtan_center_normalize"] = "on" if p.center_normalize else "off"
        fields["modhtan_euler_mode"] = p.euler_mode
        fields["rnf_a"] = repr(p.rnf.a)
        fields["rnf_n"] = repr(p.rnf.n)
        fields["rnf_m"] = repr(p.rnf.m)
    return fields


def _kind_from_fields(fields: dict[str, str]) -> ActivationKind:
    tag = fields["hidden_kind"]
    if tag == "elu":
        return Elu(EluParams(alpha=float(fields["elu_alpha"])))
    if tag == "modhtan":
        if fields["modhtan_offset_mode"] == "fixed":
            mode = FixedOffset(float(fields["modhtan_offset_value"]))
        else:
            mode = AdaptiveOffset(
                delta=float(fields["modhtan_offset_delta"]),
                kappa=float(fields["modhtan_offset_kappa"]),
            )
        return ModHtan(
            ModHtanParams(
                k_o=float(fields["modhtan_k_o"]),
                x_cutoff=float(fields["modhtan_x_cutoff"]),
                offset_mode=mode,
                rnf=RnfParams(a=int(fields["rnf_a"]), n=float(fields["rnf_n"]), m=float(fields["rnf_m"])),
                x_norm_clamp=float(fields["modhtan_x_norm_clamp"]),
                center_normalize=fields["modhtan_center_normalize"] == "on",
                euler_mode=fields["modhtan_euler_mode"],
            )
        )
    return parse_activation(tag)


def save_model(model: MlpModel, path) -> None:
    """Plain-text key = value dump; floats use repr for exact round-trips."""
    lines = ["modhtan-mlp v1"]
    lines.append(f"n_in = {model.n_in}")
    lines.append(f"n_hidden = {model.n_hidden}")
    lines.append(f"n_out = {model.n_out}")
    for key, value in _kind_fields(model.hidden_kind).items():
        lines.append(f"{key} = {value}")
    for name in ("W1", "b1", "W2", "b2"):
        values = " ".join(repr(float(v)) for v in getattr(model, name).ravel())
        lines.append(f"{name} = {values}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path) -> MlpModel:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    if not lines or lines[0] != "modhtan-mlp v1":
        raise ValueError(f"{path}: not a modhtan-mlp v1 model file")
    fields = {}
    for line in lines[1:]:
        key, _, value = line.partition(" = ")
        fields[key] = value
    n_in, n_hidden, n_out = (int(fields[k]) for k in ("n_in", "n_hidden", "n_out"))
    kind = _kind_from_fields(fields)
    arrays = {}
    shapes = {"W1": (n_hidden, n_in), "b1": (n_hidden,), "W2": (n_out, n_hidden), "b2": (n_out,)}
    for name, shape in shapes.items():
        arrays[name] = np.array([float(v) for v in fields[name].split()]).reshape(shape)
    return MlpModel(n_in, n_hidden, n_out, arrays["W1"], arrays["b1"], arrays["W2"], arrays["b2"], kind)
