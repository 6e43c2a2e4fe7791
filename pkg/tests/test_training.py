"""Trainers: gradient descent with momentum, Levenberg-Marquardt, metrics,
stall handling."""

import numpy as np
import pytest

from modhtan.activations import Elu, EluParams, Htan
from modhtan.datasets import gen_quadratic
from modhtan.network import (
    MlpModel,
    backward,
    forward,
    jacobian,
    nguyen_widrow_init,
    pack_grads,
    pack_params,
    with_params,
)
from modhtan.training import (
    GdmConfig,
    LmConfig,
    classification_accuracy,
    detect_stall,
    history_to_csv,
    mse,
    train_gdm,
    train_lm,
)


def zero_model(n_in=1, n_hidden=2, n_out=1, kind=Htan()):
    return MlpModel(
        n_in, n_hidden, n_out,
        np.zeros((n_hidden, n_in)), np.zeros(n_hidden),
        np.zeros((n_out, n_hidden)), np.zeros(n_out),
        kind,
    )


class TestMetrics:
    def test_mse_zero_for_equal(self):
        assert mse(np.ones((3, 2)), np.ones((3, 2))) == 0.0

    def test_mse_hand_values(self):
        assert mse([1.0, 1.0], [0.0, 0.0]) == 1.0
        assert mse([0.1, -0.2], [0.0, 0.0]) == pytest.approx(0.025, rel=1e-15)

    def test_accuracy_perfect_and_zero(self):
        assert classification_accuracy([0.9, 0.1], [1.0, 0.0]) == 100.0
        assert classification_accuracy([0.9, 0.1], [0.0, 1.0]) == 0.0

    def test_accuracy_threshold_at_half(self):
        assert classification_accuracy([0.5], [1.0]) == 100.0

    def test_accuracy_table_granularity(self):
        # 38 correct out of 54
        scores = [1.0] * 38 + [0.0] * 16
        labels = [1.0] * 54
        assert classification_accuracy(scores, labels) == pytest.approx(
            70.37037037037037, abs=1e-12
        )

    def test_accuracy_empty_rejected(self):
        with pytest.raises(ValueError):
            classification_accuracy([], [])


class TestDetectStall:
    def test_finite_model_is_clean(self):
        assert detect_stall(nguyen_widrow_init(1, 2, 1, Htan(), seed=0)) is None

    def test_infinite_weight_described(self):
        model = zero_model()
        model.W1[0, 0] = np.inf
        desc = detect_stall(model)
        assert desc is not None and "W1" in desc

    def test_saturated_activation_is_not_a_stall(self):
        model = MlpModel(
            1, 1, 1,
            np.array([[1e6]]), np.zeros(1),
            np.ones((1, 1)), np.zeros(1),
            Htan(),
        )
        _, cache = forward(model, np.array([[1.0]]))
        assert detect_stall(model, cache) is None


class TestGdm:
    def test_zero_residual_is_a_fixed_point(self):
        model = zero_model()
        X = np.array([[0.5], [-0.5]])
        T = np.zeros((2, 1))  # zero model already fits zero targets
        trained, history = train_gdm(model, X, T, GdmConfig(epochs=10))
        assert history.loss == [0.0] * 10
        assert np.array_equal(pack_params(trained), pack_params(model))

    def test_converges_to_mean_when_only_bias_can_move(self):
        # all-zero weights keep every gradient except b2's at zero, so this
        # is a 1-parameter quadratic problem with optimum at mean(T)
        X = np.linspace(-1.0, 1.0, 8)[:, None]
        T = np.full((8, 1), 0.37)
        trained, history = train_gdm(zero_model(), X, T, GdmConfig(epochs=500))
        assert abs(trained.b2[0] - 0.37) <= 1e-6
        assert history.termination == "epochs"
        assert len(history.loss) == 500

    def test_zero_momentum_equals_plain_gradient_descent(self):
        ds = gen_quadratic(16)
        cfg = GdmConfig(learning_rate=0.05, momentum=0.0, epochs=40)
        start = nguyen_widrow_init(1, 2, 1, Htan(), seed=4)
        trained, _ = train_gdm(start, ds.X, ds.T, cfg)

        theta = pack_params(start)
        model = start
        for _ in range(cfg.epochs):
            _, cache = forward(model, ds.X)
            theta = theta - cfg.learning_rate * pack_grads(backward(model, ds.X, ds.T, cache))
            model = with_params(model, theta)
        assert np.array_equal(pack_params(trained), theta)

    def test_runs_exactly_epochs(self):
        ds = gen_quadratic(16)
        _, history = train_gdm(nguyen_widrow_init(1, 2, 1, Htan(), seed=0), ds.X, ds.T,
                               GdmConfig(epochs=7))
        assert len(history.loss) == 7
        assert len(history.epoch_time_s) == 7

    def test_stall_aborts_with_partial_history(self):
        ds = gen_quadratic(16)
        cfg = GdmConfig(learning_rate=1e30, epochs=50)  # guaranteed blow-up
        _, history = train_gdm(nguyen_widrow_init(1, 2, 1, Elu(), seed=0), ds.X, ds.T, cfg)
        assert history.termination == "stall"
        assert history.stall_events
        assert len(history.loss) < 50

    def test_config_validation(self):
        with pytest.raises(ValueError):
            GdmConfig(learning_rate=0.0)
        with pytest.raises(ValueError):
            GdmConfig(momentum=1.0)
        with pytest.raises(ValueError):
            GdmConfig(epochs=0)


class TestLm:
    def test_linear_problem_solved_in_few_epochs(self):
        # ELU hidden units with strictly positive pre-activations make the
        # network an exactly-representable affine map of x
        rng = np.random.default_rng(5)
        X = rng.uniform(0.0, 1.0, size=(40, 1))
        T = 2.0 * X + 1.0
        model = MlpModel(
            1, 1, 1,
            np.array([[1.0]]), np.array([5.0]),
            np.array([[0.5]]), np.array([0.0]),
            Elu(),
        )
        trained, history = train_lm(model, X, T, LmConfig(epochs=25))
        y, _ = forward(trained, X)
        assert mse(y, T) <= 1e-8

    def test_accepted_steps_never_increase_loss(self):
        ds = gen_quadratic(64)
        model = nguyen_widrow_init(1, 2, 1, Htan(), seed=6)
        _, history = train_lm(model, ds.X, ds.T, LmConfig(epochs=50))
        losses = np.array(history.loss)
        assert np.all(np.diff(losses) <= 0.0)

    def test_huge_damping_reduces_to_gradient_step(self):
        mu = 1e10
        ds = gen_quadratic(32)
        model = nguyen_widrow_init(1, 2, 1, Htan(), seed=2)
        _, cache = forward(model, ds.X)
        J, e = jacobian(model, ds.X, ds.T, cache)
        theta0 = pack_params(model)
        trained, history = train_lm(
            model, ds.X, ds.T, LmConfig(mu0=mu, mu_max=1e14, epochs=1)
        )
        step = pack_params(trained) - theta0
        # differencing theta quantizes the ~1e-10 step to theta's ulp (~2e-16)
        assert np.allclose(step, -(J.T @ e) / mu, rtol=1e-6, atol=1e-15)

    def test_mu_tracks_accept_reject_cycle(self):
        ds = gen_quadratic(32)
        model = nguyen_widrow_init(1, 2, 1, Htan(), seed=2)
        _, history = train_lm(model, ds.X, ds.T, LmConfig(epochs=5))
        # recorded values are post-accept (already shrunk by mu_dec); this
        # seed rejects 1e-3, 1e-2, 1e-1 in epoch 1 and accepts at 1.0
        assert len(history.mu) == 5
        assert history.mu[0] == pytest.approx(0.1, rel=1e-12)
        assert history.mu[1] == pytest.approx(0.01, rel=1e-12)
        assert history.mu[-1] == pytest.approx(1e-3, rel=1e-9)  # settles at mu0

    def test_grad_tol_termination(self):
        # start at the exact optimum of a trivially solvable problem
        X = np.array([[0.0], [1.0]])
        T = np.zeros((2, 1))
        model = zero_model(n_hidden=1)
        _, history = train_lm(model, X, T, LmConfig(epochs=10))
        assert history.termination == "grad_tol"
        assert history.loss == []

    def test_mu_max_termination_when_no_step_helps(self):
        # zero hidden weights with zero targets already at a stationary
        # plateau: crank mu0 near the ceiling so rejects exhaust it fast
        ds = gen_quadratic(8)
        model = nguyen_widrow_init(1, 2, 1, Htan(), seed=12)
        _, history = train_lm(
            model, ds.X, ds.T, LmConfig(mu0=1e9, mu_inc=10.0, mu_max=1e10, epochs=50,
                                         max_retries=3)
        )
        assert history.termination in ("mu_max", "no_improvement", "epochs", "grad_tol")

    def test_config_validation(self):
        with pytest.raises(ValueError):
            LmConfig(mu0=0.0)
        with pytest.raises(ValueError):
            LmConfig(mu_inc=1.0)
        with pytest.raises(ValueError):
            LmConfig(mu_dec=1.5)
        with pytest.raises(ValueError):
            LmConfig(mu_max=1e-9)


class TestHistoryExport:
    def test_csv_layout(self, tmp_path):
        ds = gen_quadratic(16)
        _, history = train_gdm(nguyen_widrow_init(1, 2, 1, Htan(), seed=0), ds.X, ds.T,
                               GdmConfig(epochs=3))
        path = tmp_path / "history.csv"
        history_to_csv(history, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "epoch,loss,epoch_time_s"
        assert len(lines) == 4
        assert lines[1].startswith("0,")
