"""Activation functions and their gradients.

Four squashing units: the logistic soft-step, the hyperbolic tangent (htan),
the exponential linear unit (elu), and modhtan, a hyperbolic tangent variant
that normalizes its input by x / (x + offset_1) and squashes with a cached
rational-power approximation of e.  All functions accept a scalar or an
ndarray and return a matching value.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from enum import Enum
from typing import ClassVar, NamedTuple, Union

import numpy as np

from .rnf import RnfParams, euler_constant, rnf_exp

_TINY = sys.float_info.min  # smallest normal double; below this the x + offset_1 denominator counts as singular


@dataclass(frozen=True)
class EluParams:
    """Scale of the elu negative branch alpha * (exp(x) - 1)."""

    alpha: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")


@dataclass(frozen=True)
class FixedOffset:
    """Constant normalization offset; must be nonzero."""

    offset_1: float

    def __post_init__(self):
        if self.offset_1 == 0:
            raise ValueError("fixed offset_1 must be nonzero")


@dataclass(frozen=True)
class AdaptiveOffset:
    """Per-batch offset (1 + delta) * max|x| + kappa, always exceeding max|x|."""

    delta: float = 0.05
    kappa: float = 1e-6

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")


OffsetMode = Union[FixedOffset, AdaptiveOffset]


@dataclass(frozen=True)
class ModHtanParams:
    """Configuration of the normalized hyperbolic tangent.

    k_o is the squashing numerator; 2 is the unique value for which a branch
    with zeroed input contributes exactly k_o/2 - 1 = 0.  x_cutoff splits the
    input line into the P / N / C regions (typical range 10 to 100).
    x_norm_clamp bounds the normalized input; 50 is far past saturation.
    center_normalize=False keeps the raw x (instead of x/(x+offset_1)) inside
    the central region.  euler_mode picks between powering the cached Euler
    approximation ("constant") and evaluating the rational-power formula per
    input ("direct").
    """

    k_o: float = 2.0
    x_cutoff: float = 10.0
    offset_mode: OffsetMode = AdaptiveOffset()
    rnf: RnfParams = RnfParams()
    x_norm_clamp: float = 50.0
    center_normalize: bool = True
    euler_mode: str = "constant"

    def __post_init__(self):
        if not self.k_o > 0:
            raise ValueError(f"k_o must be positive, got {self.k_o}")
        if not self.x_cutoff > 0:
            raise ValueError(f"x_cutoff must be positive, got {self.x_cutoff}")
        if not self.x_norm_clamp > 0:
            raise ValueError(f"x_norm_clamp must be positive, got {self.x_norm_clamp}")
        if self.euler_mode not in ("constant", "direct"):
            raise ValueError(f"euler_mode must be 'constant' or 'direct', got {self.euler_mode!r}")


@dataclass(frozen=True)
class SoftStep:
    name: ClassVar[str] = "softstep"


@dataclass(frozen=True)
class Htan:
    name: ClassVar[str] = "htan"


@dataclass(frozen=True)
class Elu:
    params: EluParams = EluParams()
    name: ClassVar[str] = "elu"


@dataclass(frozen=True)
class ModHtan:
    params: ModHtanParams = ModHtanParams()
    name: ClassVar[str] = "modhtan"


ActivationKind = Union[SoftStep, Htan, Elu, ModHtan]

ACTIVATION_NAMES = ("softstep", "htan", "elu", "modhtan")


def parse_activation(name: str) -> ActivationKind:
    """Activation kind with default parameters, by name."""
    kinds = {"softstep": SoftStep, "htan": Htan, "elu": Elu, "modhtan": ModHtan}
    try:
        return kinds[name]()
    except KeyError:
        raise ValueError(f"unknown activation {name!r}; expected one of {ACTIVATION_NAMES}") from None


def _as_float_array(x):
    return np.asarray(x, dtype=float)


def _scalar_or_array(out, x):
    return float(out) if np.ndim(x) == 0 else out


def soft_step(x):
    """Logistic sigmoid 1 / (1 + exp(-x)), saturating at 0 and 1."""
    xs = _as_float_array(x)
    # exp(-|x|) never overflows, so both branches are safe everywhere
    z = np.exp(-np.abs(xs))
    out = np.where(xs >= 0, 1.0 / (1.0 + z), z / (1.0 + z))
    return _scalar_or_array(out, x)


def soft_step_grad(f):
    """Gradient (1 - f) * f expressed through the output value f."""
    fs = _as_float_array(f)
    return _scalar_or_array((1.0 - fs) * fs, f)


def htan(x):
    """Hyperbolic tangent 2 / (1 + exp(-2x)) - 1, saturating at -1 and 1."""
    xs = _as_float_array(x)
    z = np.exp(-2.0 * np.abs(xs))
    mag = (1.0 - z) / (1.0 + z)  # magnitude from |x| keeps the function exactly odd
    return _scalar_or_array(np.where(xs >= 0, mag, -mag), x)


def htan_grad(f):
    """Gradient 1 - f**2 expressed through the output value f."""
    fs = _as_float_array(f)
    return _scalar_or_array(1.0 - fs * fs, f)


def elu(x, p: EluParams = EluParams()):
    """x for x > 0, alpha * (exp(x) - 1) for x <= 0."""
    xs = _as_float_array(x)
    out = np.where(xs > 0, xs, p.alpha * np.expm1(np.minimum(xs, 0.0)))
    return _scalar_or_array(out, x)


def elu_grad(x, f, p: EluParams = EluParams()):
    """1 for x > 0, f + alpha for x <= 0 (f being elu(x)); vanishes as f -> -alpha."""
    xs = _as_float_array(x)
    fs = _as_float_array(f)
    out = np.where(xs > 0, 1.0, fs + p.alpha)
    return _scalar_or_array(out, x)


def adaptive_offset(batch, delta: float = 0.05, kappa: float = 1e-6) -> float:
    """(1 + delta) * max|x| + kappa over the batch.

    Exceeds every |x| in the batch, so x + offset > 0 and the normalized
    input keeps the sign of x.
    """
    b = _as_float_array(batch)
    if b.size == 0:
        raise ValueError("adaptive offset needs a non-empty batch")
    if not np.all(np.isfinite(b)):
        raise ValueError("adaptive offset needs finite batch entries")
    with np.errstate(over="ignore"):  # inf offset near float max is handled downstream
        return float((1.0 + delta) * np.max(np.abs(b)) + kappa)


class Region(Enum):
    P = "P"  # x > +x_cutoff
    N = "N"  # x < -x_cutoff
    C = "C"  # -x_cutoff <= x <= +x_cutoff


def modhtan_normalize(x: float, offset_1: float, x_cutoff: float, clamp: float):
    """Region tag plus the normalized input x / (x + offset_1).

    The result is clamped to [-clamp, clamp].  A zero or denormal
    denominator is replaced by sign(x) * clamp; a denominator that overflows
    (both addends huge and positive) is rewritten as 1 / (1 + offset_1 / x).
    """
    if x > x_cutoff:
        region = Region.P
    elif x < -x_cutoff:
        region = Region.N
    else:
        region = Region.C
    den = x + offset_1
    if math.isinf(den):
        x_norm = 1.0 / (1.0 + offset_1 / x)
    elif abs(den) < _TINY:
        x_norm = math.copysign(clamp, x) if x != 0 else 0.0
    else:
        x_norm = x / den
    return region, min(max(x_norm, -clamp), clamp)


def _normalized_input(xs, offset_1, x_cutoff, clamp, center_normalize):
    """Vectorized counterpart of modhtan_normalize (values only)."""
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        den = xs + offset_1  # may overflow to inf for huge batches; handled below
        x_norm = xs / den
    overflowed = np.isinf(den)
    if np.any(overflowed):
        safe = np.where(overflowed, xs, 1.0)
        x_norm = np.where(overflowed, 1.0 / (1.0 + offset_1 / safe), x_norm)
    singular = np.abs(den) < _TINY
    if np.any(singular):
        guard = np.where(xs == 0.0, 0.0, np.copysign(clamp, xs))
        x_norm = np.where(singular, guard, x_norm)
    if not center_normalize:
        x_norm = np.where(np.abs(xs) <= x_cutoff, xs, x_norm)
    return np.clip(x_norm, -clamp, clamp)


def modhtan(x, p: ModHtanParams, offset_1: float):
    """k_o / (1 + E**(-2 * x_norm)) - 1 with x_norm = x / (x + offset_1).

    E is the cached rational-power approximation of e (or, in "direct" mode,
    the formula itself evaluated at -2 * x_norm).  Outputs are kept strictly
    inside the open interval (-1, k_o - 1): binary64 rounding lands exactly
    on a bound once |x_norm| passes ~19.2, which would zero the 1 - f**2
    gradient the function exists to protect.
    """
    xs = _as_float_array(x)
    x_norm = _normalized_input(xs, offset_1, p.x_cutoff, p.x_norm_clamp, p.center_normalize)
    if p.euler_mode == "constant":
        t = euler_constant(p.rnf) ** (-2.0 * x_norm)
    else:
        t = rnf_exp(-2.0 * x_norm, p.rnf)
    out = p.k_o / (1.0 + t) - 1.0
    out = np.clip(out, np.nextafter(-1.0, 0.0), np.nextafter(p.k_o - 1.0, -np.inf))
    return _scalar_or_array(out, x)


def modhtan_grad(f):
    """Surrogate gradient 1 - f**2, shared with htan."""
    fs = _as_float_array(f)
    return _scalar_or_array(1.0 - fs * fs, f)


class BatchActivation(NamedTuple):
    values: np.ndarray
    grads: np.ndarray
    offset_1: float | None  # offset used by modhtan on this batch, else None


def activate(kind: ActivationKind, batch) -> BatchActivation:
    """Elementwise values and gradients over a batch.

    For modhtan in adaptive mode the offset is derived from this batch (its
    max absolute entry) and reported in the result.
    """
    xs = _as_float_array(batch)
    offset = None
    if isinstance(kind, SoftStep):
        values = soft_step(xs)
        grads = soft_step_grad(values)
    elif isinstance(kind, Htan):
        values = htan(xs)
        grads = htan_grad(values)
    elif isinstance(kind, Elu):
        values = elu(xs, kind.params)
        grads = elu_grad(xs, values, kind.params)
    elif isinstance(kind, ModHtan):
        p = kind.params
        if isinstance(p.offset_mode, AdaptiveOffset):
            offset = adaptive_offset(xs, p.offset_mode.delta, p.offset_mode.kappa)
        else:
            offset = p.offset_mode.offset_1
        values = modhtan(xs, p, offset)
        grads = modhtan_grad(values)
    else:
        raise TypeError(f"unknown activation kind: {kind!r}")
    return BatchActivation(np.asarray(values, dtype=float), np.asarray(grads, dtype=float), offset)
