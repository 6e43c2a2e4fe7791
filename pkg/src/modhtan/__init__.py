"""Normalized hyperbolic tangent activation (modhtan) and its benchmark kit.

The activation squashes through a rational-power approximation of exp rather
than the transcendental function, normalizes its input by x / (x + offset_1)
with a batch-adaptive offset, and stays strictly inside (-1, k_o - 1) even
for inputs in the thousands -- which is the point: saturating instead of
overflowing keeps training from stalling on non-finite values.

Submodules: rnf (exp approximation), activations, network (one-hidden-layer
MLP), training (gradient descent with momentum + Levenberg-Marquardt),
datasets (synthetic parabola + Statlog-format heart data), bench, cli.
"""

from .activations import (
    ACTIVATION_NAMES,
    ActivationKind,
    AdaptiveOffset,
    BatchActivation,
    Elu,
    EluParams,
    FixedOffset,
    Htan,
    ModHtan,
    ModHtanParams,
    Region,
    SoftStep,
    activate,
    adaptive_offset,
    elu,
    elu_grad,
    htan,
    htan_grad,
    modhtan,
    modhtan_grad,
    modhtan_normalize,
    parse_activation,
    soft_step,
    soft_step_grad,
)
from .bench import (
    ApproxBenchResult,
    BenchReport,
    BenchRow,
    ExperimentSpec,
    approx_bench,
    dump_curves,
    emit_report,
    run_experiment,
)
from .datasets import (
    Dataset,
    DatasetKind,
    ScaleParams,
    SplitSpec,
    apply_scale,
    gen_quadratic,
    linear_scale,
    load_heart,
    make_heart_fixture,
    split,
    unscale,
)
from .network import (
    ForwardCache,
    MlpModel,
    StallError,
    backward,
    forward,
    jacobian,
    load_model,
    nguyen_widrow_init,
    save_model,
)
from .rnf import (
    DEFAULT_RNF_PARAMS,
    ErrorProfileRow,
    RnfDomainError,
    RnfParams,
    approx_error_profile,
    euler_constant,
    rnf_exp,
)
from .training import (
    GdmConfig,
    LmConfig,
    TrainHistory,
    classification_accuracy,
    detect_stall,
    mse,
    train_gdm,
    train_lm,
)

__version__ = "0.1.0"
