import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spherepinn.pinn import (Layer, MlpParams, ObservationSet, PinnModel, RowdyParams, TrainConfig,
                             collocation_points, cosine_lr, forward, init_mlp, init_params, laplacian,
                             loss, loss_grad, pde_term, predict, predict_geometry, rowdy_eval, train)
from spherepinn.exceptions import ShapeMismatchError
from spherepinn.sma_core import ComplexPressureField, fibonacci_directions, reference_geometry
from spherepinn.synth import PlaneWaveSpec, plane_wave_field, plane_wave_free

SMALL = dict(hidden_layers=2, hidden_width=8, rowdy_W=2)


def small_model(seed=0, K=2, radius=1.0, **kw):
    cfg = TrainConfig(seed=seed, **{**SMALL, **kw})
    return init_params(cfg, np.linspace(1.0, 2.0, K), radius)


def random_obs(Q, K, seed=0, radius=1.0):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((Q, 3))
    p = rng.standard_normal((Q, K)) + 1j * rng.standard_normal((Q, K))
    return ObservationSet(v / np.linalg.norm(v, axis=1, keepdims=True), p,
                          np.linspace(1.0, 2.0, K), radius)


def fd_gradient(model, obs, colloc, lam, step=1e-6):
    out = []
    for arr in model.arrays():
        g = np.zeros_like(arr)
        for i in np.ndindex(arr.shape):
            old = arr[i]
            arr[i] = old + step
            up = loss(model, obs, colloc, lam).total
            arr[i] = old - step
            down = loss(model, obs, colloc, lam).total
            arr[i] = old
            g[i] = (up - down) / (2 * step)
        out.append(g)
    return out


def max_rel_error(analytic, numeric):
    scale = max(np.max(np.abs(a)) for a in numeric)
    worst = 0.0
    for a, f in zip(analytic, numeric):
        denom = np.maximum(np.maximum(np.abs(a), np.abs(f)), 1e-6 * scale)
        worst = max(worst, float(np.max(np.abs(a - f) / denom)) if a.size else 0.0)
    return worst


def sine_unit_model(w):
    # f(x) = sin(w . x) with identity read-out
    hidden = Layer(np.asarray(w, dtype=float)[None, :], [0.0], RowdyParams(1.0, np.zeros(6), np.arange(1, 7)))
    net = MlpParams([hidden, Layer([[1.0]], [0.0])])
    return PinnModel(net, net, [1.0], 1.0)


class TestRowdy:
    def test_zero(self):
        assert rowdy_eval(0.0, RowdyParams.initial(5.0, 6)) == 0.0

    @pytest.mark.parametrize("x", [-1.3, 0.2, 2.5])
    def test_duplicate_term(self, x):
        assert rowdy_eval(x, RowdyParams(1.0, [1.0], [1.0])) == pytest.approx(2 * math.sin(x), abs=1e-15)

    def test_plain_sine_when_empty(self):
        x = np.linspace(-3, 3, 11)
        np.testing.assert_array_equal(rowdy_eval(x, RowdyParams(5.0, [], [])), np.sin(5.0 * x))

    def test_first_derivative_finite_difference(self):
        p = RowdyParams.initial(5.0, 6)
        h = 1e-6
        fd = (rowdy_eval(0.7 + h, p) - rowdy_eval(0.7 - h, p)) / (2 * h)
        assert rowdy_eval(0.7, p, 1) == pytest.approx(fd, abs=1e-7 * max(1.0, abs(fd)))

    @given(st.floats(-2, 2), st.floats(0.5, 6), st.lists(st.floats(-1, 1), min_size=0, max_size=4),
           st.integers(0, 1000))
    @settings(max_examples=100, deadline=None)
    def test_derivative_consistency(self, x, w0, n, seed):
        alpha = np.random.default_rng(seed).uniform(0.5, 6, size=len(n))
        p = RowdyParams(w0, n, alpha)
        h = 1e-5
        for order, tol in ((0, 1e-6), (1, 1e-5), (2, 1e-4)):
            fd = (rowdy_eval(x + h, p, order) - rowdy_eval(x - h, p, order)) / (2 * h)
            scale = max(1.0, abs(fd))
            assert rowdy_eval(x, p, order + 1) == pytest.approx(fd, abs=tol * scale * (1 + order * 10))

    def test_order_checked(self):
        with pytest.raises(ValueError):
            rowdy_eval(0.0, RowdyParams.initial(1.0, 1), 4)

    def test_param_validation(self):
        with pytest.raises(ValueError):
            RowdyParams(1.0, [1.0, 2.0], [1.0])
        with pytest.raises(ValueError):
            RowdyParams(0.0, [], [])


class TestInit:
    def test_rowdy_initial_values(self):
        m = init_params(TrainConfig(hidden_width=16), [1.0], 0.042)
        for net in m.nets:
            for layer in net.layers[:-1]:
                np.testing.assert_array_equal(layer.activation.n, np.ones(6))
                np.testing.assert_array_equal(layer.activation.alpha, [1, 2, 3, 4, 5, 6])

    def test_weight_ranges(self):
        m = init_params(TrainConfig(), [1.0, 2.0], 0.042)
        layers = m.real_net.layers
        assert len(layers) == 6
        assert np.max(np.abs(layers[0].weights)) <= 1 / 3
        bound = math.sqrt(6 / 512) / 5
        for layer in layers[1:]:
            assert np.max(np.abs(layer.weights)) <= bound
            assert np.all(layer.biases == 0)
        assert layers[0].activation.omega0 == 1.0 and layers[1].activation.omega0 == 5.0

    def test_deterministic(self):
        a = small_model(seed=4).arrays()
        b = small_model(seed=4).arrays()
        c = small_model(seed=5).arrays()
        assert all(np.array_equal(x, y) for x, y in zip(a, b))
        assert not all(np.array_equal(x, y) for x, y in zip(a, c))

    def test_layer_chaining_checked(self):
        with pytest.raises(ValueError):
            MlpParams([Layer(np.zeros((4, 3)), np.zeros(4)), Layer(np.zeros((2, 5)), np.zeros(2))])
        with pytest.raises(ValueError):
            MlpParams([Layer(np.zeros((4, 2)), np.zeros(4))])
        with pytest.raises(ValueError):
            MlpParams([Layer(np.zeros((4, 3)), np.zeros(4), RowdyParams.initial(1.0, 1))])

    def test_model_output_dim_checked(self):
        net = init_mlp(np.random.default_rng(0), 3, hidden_layers=1, hidden_width=4)
        with pytest.raises(ValueError):
            PinnModel(net, net, [1.0, 2.0], 1.0)


class TestForward:
    def test_zero_readout(self):
        m = small_model()
        for net in m.nets:
            net.layers[-1].weights[:] = 0.0
        re, im = forward(m, np.array([0.0, 0.0, 1.0]))
        assert np.all(re == 0) and np.all(im == 0)

    def test_sine_unit(self):
        w = np.array([0.3, -1.2, 0.8])
        m = sine_unit_model(w)
        x = collocation_points(10)
        re, _ = forward(m, x)
        np.testing.assert_allclose(re[:, 0], np.sin(x @ w), atol=1e-15)

    def test_pure(self):
        m = small_model()
        x = np.array([0.6, 0.0, 0.8])
        a, b = forward(m, x), forward(m, x)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])

    def test_pressure_scale(self):
        m = small_model()
        x = collocation_points(3)
        re1, im1 = forward(m, x)
        m.pressure_scale = 2.5
        re2, im2 = forward(m, x)
        np.testing.assert_allclose(re2, 2.5 * re1)
        np.testing.assert_allclose(im2, 2.5 * im1)


class TestLaplacian:
    def test_affine_network(self):
        rng = np.random.default_rng(0)
        layers = [Layer(rng.standard_normal((5, 3)), rng.standard_normal(5)),
                  Layer(rng.standard_normal((4, 5)), rng.standard_normal(4)),
                  Layer(rng.standard_normal((2, 4)), rng.standard_normal(2))]
        net = MlpParams(layers)
        m = PinnModel(net, net, [1.0, 2.0], 1.0)
        _, lap = laplacian(m, collocation_points(7))
        assert np.all(lap == 0)

    def test_sine_unit(self):
        w = np.array([0.3, -1.2, 0.8])
        m = sine_unit_model(w)
        x = collocation_points(10)
        value, lap = laplacian(m, x)
        np.testing.assert_allclose(lap[:, 0].real, -np.dot(w, w) * np.sin(x @ w), atol=1e-14)
        np.testing.assert_allclose(value[:, 0].real, np.sin(x @ w), atol=1e-15)

    @staticmethod
    def fd_laplacian(m, x, h, fourth_order=False):
        out = 0
        mid = np.array(forward(m, x))
        for i in range(3):
            e = np.zeros(3)
            e[i] = h
            up, down = np.array(forward(m, x + e)), np.array(forward(m, x - e))
            if fourth_order:
                up2, down2 = np.array(forward(m, x + 2 * e)), np.array(forward(m, x - 2 * e))
                d2 = (-up2 + 16 * up - 30 * mid + 16 * down - down2) / (12 * h ** 2)
            else:
                d2 = (up - 2 * mid + down) / h ** 2
            out = out + d2[0] + 1j * d2[1]
        return out

    def test_matches_finite_differences(self):
        m = small_model(seed=1, K=3, rowdy_W=6, hidden_width=32, hidden_layers=3)
        x = collocation_points(10)
        _, lap = laplacian(m, x)
        fd = self.fd_laplacian(m, x, 1e-4, fourth_order=True)
        assert np.max(np.abs(lap - fd)) / np.max(np.abs(lap)) < 1e-5

    def test_second_order_convergence(self):
        # the central stencil error must shrink like h**2 towards the jet value
        m = small_model(seed=1, K=3, rowdy_W=6, hidden_width=32, hidden_layers=3)
        x = collocation_points(10)
        _, lap = laplacian(m, x)
        errs = [np.max(np.abs(lap - self.fd_laplacian(m, x, h))) for h in (4e-4, 2e-4)]
        assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)

    @given(st.floats(-2, 2), st.floats(-2, 2), st.integers(0, 100))
    @settings(max_examples=20, deadline=None)
    def test_linearity_at_readout(self, a, b, seed):
        m = small_model(seed=seed)
        f, g = m.real_net, m.imag_net
        combo_last = Layer(a * f.layers[-1].weights + b * g.layers[-1].weights, np.zeros(2))
        # combine two nets sharing the hidden stack of f
        g_shared = MlpParams(f.layers[:-1] + [g.layers[-1]])
        combo = MlpParams(f.layers[:-1] + [combo_last])
        x = collocation_points(5)
        lf = laplacian(PinnModel(f, f, m.wavenumbers, 1.0), x)[1].real
        lg = laplacian(PinnModel(g_shared, g_shared, m.wavenumbers, 1.0), x)[1].real
        lc = laplacian(PinnModel(combo, combo, m.wavenumbers, 1.0), x)[1].real
        np.testing.assert_allclose(lc, a * lf + b * lg, atol=1e-10 * (1 + np.max(np.abs(lf)) + np.max(np.abs(lg))))


class TestLoss:
    def test_exact_fit_is_zero(self):
        m = small_model()
        obs = random_obs(5, 2)
        re, im = forward(m, obs.positions)
        exact = ObservationSet(obs.positions, re + 1j * im, obs.wavenumbers, obs.radius)
        assert loss(m, exact, [], 0.0).total == 0.0

    def test_zero_model(self):
        m = small_model()
        for net in m.nets:
            net.layers[-1].weights[:] = 0.0
        obs = random_obs(5, 2)
        terms = loss(m, obs, [], 0.0)
        assert terms.data == pytest.approx(np.mean(np.abs(obs.pressures) ** 2), rel=1e-14)

    def test_pde_term_on_exact_solution(self):
        kappa = np.array([1.5, 3.0])
        spec = PlaneWaveSpec(0.8, 2.0)
        fns = [plane_wave_free(spec, k) for k in kappa]

        def evaluate(x):
            value = np.stack([f(x) for f, _ in fns], axis=1)
            lap = np.stack([lp(x) for _, lp in fns], axis=1)
            return value, lap

        colloc = collocation_points(64)
        value, _ = evaluate(colloc)
        ref = np.mean(np.abs(kappa ** 2 * value) ** 2)
        assert pde_term(evaluate, colloc, kappa) < 1e-12 * ref

    def test_total_combines_terms(self):
        m = small_model()
        obs = random_obs(5, 2)
        colloc = collocation_points(7)
        t = loss(m, obs, colloc, 0.5)
        assert t.total == pytest.approx(t.data + 0.5 * t.pde)
        assert t.pde > 0

    def test_frequency_count_checked(self):
        m = small_model(K=2)
        with pytest.raises(ShapeMismatchError):
            loss(m, random_obs(5, 3), [], 0.0)

    def test_observation_validation(self):
        with pytest.raises(ShapeMismatchError):
            ObservationSet(np.zeros((3, 3)), np.zeros((2, 1)), [1.0], 1.0)
        with pytest.raises(ValueError):
            ObservationSet(np.zeros((1, 3)), [[np.nan]], [1.0], 1.0)


class TestGradient:
    @pytest.mark.parametrize("lam", [0.0, 1.0])
    def test_matches_finite_differences(self, lam):
        m = small_model(seed=3)
        obs = random_obs(5, 2, seed=1)
        colloc = collocation_points(7)
        terms, grad = loss_grad(m, obs, colloc, lam)
        assert terms.total == pytest.approx(loss(m, obs, colloc, lam).total, rel=1e-13)
        assert max_rel_error(grad.arrays(), fd_gradient(m, obs, colloc, lam)) < 1e-4

    def test_pde_only_gradient(self):
        # pure PDE gradient: data term zeroed by fitting the targets exactly
        m = small_model(seed=2)
        obs = random_obs(5, 2)
        re, im = forward(m, obs.positions)
        exact = ObservationSet(obs.positions, re + 1j * im, obs.wavenumbers, 1.0)
        colloc = collocation_points(7)
        _, grad = loss_grad(m, exact, colloc, 1.0)
        assert max_rel_error(grad.arrays(), fd_gradient(m, exact, colloc, 1.0)) < 1e-4

    def test_dead_path(self):
        m = small_model()
        m.real_net.layers[-1].weights[1] = 0.0
        # output 1 no longer sees the last hidden layer, but its own read-out row still gets gradient
        _, grad = loss_grad(m, random_obs(5, 2), collocation_points(7), 1.0)
        m2 = small_model()
        for net in m2.nets:
            net.layers[-1].weights[:] = 0.0
        _, g2 = loss_grad(m2, random_obs(5, 2), collocation_points(7), 1.0)
        for net in (g2.real_net, g2.imag_net):
            for layer in net.layers[:-1]:
                assert np.all(layer.weights == 0) and np.all(layer.biases == 0)
                assert np.all(layer.activation.n == 0) and np.all(layer.activation.alpha == 0)
        assert np.any(grad.real_net.layers[-1].weights[1] != 0)


class TestSchedule:
    def test_endpoints(self):
        cfg = TrainConfig(iterations=100)
        assert cosine_lr(0, cfg) == 1e-4
        assert cosine_lr(100, cfg) == 0.0
        assert cosine_lr(50, cfg) == pytest.approx(5e-5, abs=1e-20)

    def test_floor(self):
        cfg = TrainConfig(iterations=10, lr_min=1e-6)
        assert cosine_lr(10, cfg) == 1e-6

    def test_range(self):
        with pytest.raises(ValueError):
            cosine_lr(11, TrainConfig(iterations=10))

    @given(st.integers(1, 500), st.data())
    @settings(max_examples=40, deadline=None)
    def test_monotone(self, n, data):
        cfg = TrainConfig(iterations=n)
        t = data.draw(st.integers(0, n - 1))
        assert cosine_lr(t + 1, cfg) <= cosine_lr(t, cfg)


class TestConfig:
    def test_round_trip(self):
        cfg = TrainConfig(iterations=5, collocation_mode="uniform")
        assert TrainConfig.from_dict(cfg.to_dict()) == cfg

    def test_unknown_key(self):
        with pytest.raises(ValueError):
            TrainConfig.from_dict({"iters": 3})

    @pytest.mark.parametrize("kw", [dict(collocation_count=0), dict(lr0=0.0), dict(rowdy_W=-1),
                                    dict(collocation_mode="grid"), dict(lambda_pde=-1.0)])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            TrainConfig(**kw)


def plane_wave_obs(Q=9, K=8):
    g = reference_geometry("open")
    ks = np.linspace(20.0, 60.0, K)
    spec = PlaneWaveSpec(1.0, 0.5)
    p = np.stack([plane_wave_field(spec, g, k) for k in ks], axis=1)
    field = ComplexPressureField(g, ks, p)
    idx = np.arange(0, 32, 32 // Q)[:Q]
    return ObservationSet(g.directions[idx], p[idx], ks, g.radius), field


class TestTrain:
    def test_descent(self):
        obs, _ = plane_wave_obs()
        cfg = TrainConfig(iterations=200, hidden_width=32, hidden_layers=2, collocation_count=16)
        _, trace = train(obs, cfg)
        assert trace.shape == (200, 3)
        assert trace[-1, 1] < trace[0, 1]

    @pytest.mark.parametrize("mode", ["fibonacci", "uniform"])
    def test_deterministic(self, mode):
        obs, _ = plane_wave_obs()
        cfg = TrainConfig(iterations=20, hidden_width=16, hidden_layers=1, collocation_count=8,
                          collocation_mode=mode, lambda_pde=1e-3)
        m1, t1 = train(obs, cfg)
        m2, t2 = train(obs, cfg)
        assert np.array_equal(t1, t2)
        assert all(np.array_equal(a, b) for a, b in zip(m1.arrays(), m2.arrays()))

    def test_lambda_only_changes_pde_part(self):
        obs, _ = plane_wave_obs()
        cfg = TrainConfig(iterations=1, hidden_width=16, hidden_layers=1, collocation_count=8)
        _, a = train(obs, cfg.replace(lambda_pde=0.0))
        _, b = train(obs, cfg.replace(lambda_pde=1e-12))
        assert a[0, 1] == b[0, 1]
        assert b[0, 0] == pytest.approx(b[0, 1] + 1e-12 * b[0, 2])

    def test_fits_training_capsules(self):
        obs, field = plane_wave_obs(Q=9, K=4)
        cfg = TrainConfig(iterations=600, hidden_width=64, hidden_layers=2, lr0=1e-3, rowdy_W=0,
                          lambda_pde=0.0)
        m, _ = train(obs, cfg)
        re, im = forward(m, obs.positions)
        est = re + 1j * im
        err = np.sum(np.abs(est - obs.pressures) ** 2) / np.sum(np.abs(obs.pressures) ** 2)
        assert 10 * math.log10(err) < -20

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_non_finite_abort(self):
        from spherepinn.exceptions import NonFiniteLossError
        obs, _ = plane_wave_obs()
        cfg = TrainConfig(iterations=3, hidden_width=8, hidden_layers=1, collocation_count=4)
        m = init_params(cfg, obs.wavenumbers, obs.radius)
        m.real_net.layers[-1].weights[0, 0] = np.inf
        with pytest.raises(NonFiniteLossError) as info:
            train(obs, cfg, model=m)
        assert info.value.iteration == 0


class TestPredict:
    def test_empty(self):
        m = small_model(K=3)
        out = predict(m, [], [])
        assert out.shape == (0, 3)

    def test_permutation_equivariant(self):
        m = small_model(K=3, radius=0.042)
        theta, phi = fibonacci_directions(12)
        perm = np.random.default_rng(0).permutation(12)
        a = predict(m, theta, phi).pressures
        b = predict(m, theta[perm], phi[perm]).pressures
        np.testing.assert_array_equal(a[perm], b)

    def test_geometry_prediction_matches_forward(self):
        g = reference_geometry("open")
        m = small_model(K=2, radius=g.radius)
        m.pressure_scale = 3.0
        field = predict_geometry(m, g)
        re, im = forward(m, g.directions)
        np.testing.assert_array_equal(field.pressures, re + 1j * im)
        assert field.geometry is g
