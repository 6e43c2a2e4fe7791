"""Full-batch trainers: gradient descent with momentum and Levenberg-Marquardt.

Both trainers minimize half the mean squared error per output entry, record a
per-epoch loss and wall-time history, and abort with a recorded stall event
when parameters or activations leave the finite range.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .network import (
    ForwardCache,
    MlpModel,
    StallError,
    backward,
    forward,
    jacobian,
    n_params,
    pack_grads,
    pack_params,
    with_params,
)


@dataclass(frozen=True)
class GdmConfig:
    learning_rate: float = 0.01
    momentum: float = 0.9
    epochs: int = 500

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if not 0 <= self.momentum < 1:
            raise ValueError("momentum must be in [0, 1)")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


@dataclass(frozen=True)
class LmConfig:
    mu0: float = 1e-3
    mu_inc: float = 10.0
    mu_dec: float = 0.1
    mu_max: float = 1e10
    epochs: int = 500
    grad_tol: float = 1e-12
    max_retries: int = 20  # damping increases allowed within one epoch

    def __post_init__(self):
        if not self.mu0 > 0:
            raise ValueError("mu0 must be positive")
        if not self.mu_inc > 1:
            raise ValueError("mu_inc must be > 1")
        if not 0 < self.mu_dec < 1:
            raise ValueError("mu_dec must be in (0, 1)")
        if not self.mu_max > self.mu0:
            raise ValueError("mu_max must exceed mu0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


@dataclass
class TrainHistory:
    loss: list[float] = field(default_factory=list)
    epoch_time_s: list[float] = field(default_factory=list)
    stall_events: list[tuple[int, str]] = field(default_factory=list)
    mu: list[float] = field(default_factory=list)  # damping after each accepted LM epoch
    termination: str = "epochs"


def mse(Y, T) -> float:
    """Mean of (y - t)**2 over all entries."""
    Y = np.asarray(Y, dtype=float)
    T = np.asarray(T, dtype=float)
    with np.errstate(over="ignore"):  # diverging models report inf, not a warning
        return float(np.mean((Y - T) ** 2))


def classification_accuracy(Y, labels) -> float:
    """Percent of scores on the right side of 0.5 against 0/1 labels."""
    Y = np.asarray(Y, dtype=float).ravel()
    labels = np.asarray(labels, dtype=float).ravel()
    if Y.size == 0:
        raise ValueError("accuracy of an empty prediction set is undefined")
    predicted = (Y >= 0.5).astype(float)
    return float(100.0 * np.mean(predicted == labels))


def detect_stall(model: MlpModel, cache: ForwardCache | None = None) -> str | None:
    """Description of the first non-finite tensor, or None when all is finite."""
    tensors = [("W1", model.W1), ("b1", model.b1), ("W2", model.W2), ("b2", model.b2)]
    if cache is not None:
        tensors += [
            ("hidden pre-activations", cache.z1),
            ("hidden activations", cache.h),
            ("hidden gradients", cache.g),
            ("outputs", cache.y),
        ]
    for name, tensor in tensors:
        if not np.all(np.isfinite(tensor)):
            return f"{name} contains non-finite values"
    return None


def train_gdm(model: MlpModel, X, T, cfg: GdmConfig = GdmConfig()) -> tuple[MlpModel, TrainHistory]:
    """Full-batch gradient descent with momentum.

    Update: v <- momentum * v - lr * grad; theta <- theta + v.  Runs exactly
    cfg.epochs epochs unless a stall aborts training early.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    T = np.atleast_2d(np.asarray(T, dtype=float))
    history = TrainHistory()
    theta = pack_params(model)
    velocity = np.zeros_like(theta)
    for epoch in range(cfg.epochs):
        t0 = time.perf_counter()
        try:
            _, cache = forward(model, X)
        except StallError as exc:
            history.stall_events.append((epoch, str(exc)))
            history.termination = "stall"
            break
        loss = mse(cache.y, T)
        history.loss.append(loss)
        if not np.isfinite(loss):
            history.epoch_time_s.append(time.perf_counter() - t0)
            history.stall_events.append((epoch, "training loss is non-finite"))
            history.termination = "stall"
            break
        grad = pack_grads(backward(model, X, T, cache))
        velocity = cfg.momentum * velocity - cfg.learning_rate * grad
        theta = theta + velocity
        model = with_params(model, theta)
        history.epoch_time_s.append(time.perf_counter() - t0)
        stall = detect_stall(model)
        if stall is not None:
            history.stall_events.append((epoch, stall))
            history.termination = "stall"
            break
    return model, history


def train_lm(model: MlpModel, X, T, cfg: LmConfig = LmConfig()) -> tuple[MlpModel, TrainHistory]:
    """Levenberg-Marquardt with adaptive damping.

    Per epoch, solve (J^T J + mu I) delta = -J^T e and evaluate the step: an
    accepted step (loss strictly decreased) shrinks mu by mu_dec, a rejected
    one grows it by mu_inc and retries within the epoch.  Training stops at
    cfg.epochs, when mu exceeds mu_max, when the gradient norm drops below
    grad_tol, or after max_retries rejections in one epoch.  Intended for
    dense normal equations, i.e. up to a few thousand parameters.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    T = np.atleast_2d(np.asarray(T, dtype=float))
    history = TrainHistory()
    theta = pack_params(model)
    mu = cfg.mu0
    identity = np.eye(n_params(model))
    try:
        _, cache = forward(model, X)
    except StallError as exc:
        history.stall_events.append((0, str(exc)))
        history.termination = "stall"
        return model, history
    loss = mse(cache.y, T)
    for epoch in range(cfg.epochs):
        t0 = time.perf_counter()
        J, e = jacobian(model, X, T, cache)
        gradient = J.T @ e
        if np.linalg.norm(gradient) < cfg.grad_tol:
            history.termination = "grad_tol"
            break
        normal = J.T @ J
        accepted = False
        retries = 0
        while True:
            try:
                delta = np.linalg.solve(normal + mu * identity, -gradient)
            except np.linalg.LinAlgError:
                delta = None  # singular even with damping; grow mu and retry
            if delta is not None and np.all(np.isfinite(delta)):
                candidate_theta = theta + delta
                candidate = with_params(model, candidate_theta)
                try:
                    _, candidate_cache = forward(candidate, X)
                    candidate_loss = mse(candidate_cache.y, T)
                except StallError:
                    candidate_loss = np.inf
                if np.isfinite(candidate_loss) and candidate_loss < loss:
                    theta, model, cache, loss = candidate_theta, candidate, candidate_cache, candidate_loss
                    mu = mu * cfg.mu_dec
                    accepted = True
                    break
            mu = mu * cfg.mu_inc
            retries += 1
            if mu > cfg.mu_max:
                history.termination = "mu_max"
                break
            if retries >= cfg.max_retries:
                history.termination = "no_improvement"
                break
        history.loss.append(loss)
        history.epoch_time_s.append(time.perf_counter() - t0)
        if not accepted:
            break
        history.mu.append(mu)
    return model, history


def history_to_csv(history: TrainHistory, path) -> None:
    """Training curve as CSV with columns epoch,loss,epoch_time_s."""
    lines = ["epoch,loss,epoch_time_s"]
    for epoch, (loss, dt) in enumerate(zip(history.loss, history.epoch_time_s)):
        lines.append(f"{epoch},{loss!r},{dt!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
