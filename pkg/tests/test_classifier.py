import numpy as np
import pytest
from hypothesis import given, strategies as st

from synthdata import linear_multilabel, linear_single_label

from aeflann.autoencoder import AeTrainConfig, train_autoencoder
from aeflann.classifier import (
    AeMlFlannModel,
    LabelMode,
    TrainConfig,
    _fit_output_layer,
    delta_rule_update,
    labels_from_scores,
    load_model,
    predict_class,
    predict_labels,
    predict_scores,
    save_model,
    train,
)
from aeflann.datasets import NormalizationParams, apply_normalizer, fit_normalizer, one_hot
from aeflann.errors import (
    DataError,
    DivergenceError,
    ModeError,
    ModelFormatError,
    ShapeError,
)
from aeflann.expansion import ExpansionConfig, expand
from aeflann.linalg import Activation


def small_config(epochs=40, ae_epochs=40, seed=5):
    return TrainConfig(
        mu=0.1,
        epochs=epochs,
        seed=seed,
        ae=AeTrainConfig(epochs=ae_epochs, seed=seed + 1),
    )


def simple_model(d=2, c=3, mode=LabelMode.MULTI_LABEL, p=1, out_w=None, out_b=None):
    norm = NormalizationParams(
        minimum=np.zeros(d), maximum=np.ones(d), mean=np.full(d, 0.5), constant=np.zeros(d, bool)
    )
    w = np.zeros((d * p, c)) if out_w is None else out_w
    b = np.zeros(c) if out_b is None else out_b
    return AeMlFlannModel(
        norm=norm,
        expansion=ExpansionConfig(p=p),
        encoder=None,
        out_w=w,
        out_b=b,
        mode=mode,
    )


class TestDeltaRule:
    def test_hand_computed_update(self):
        # one hidden unit, one class: a=1, y_hat=0.5, target 1, mu=0.1
        dw, db = delta_rule_update(
            np.array([1.0]), np.array([1.0]), np.zeros((1, 1)), np.zeros(1), mu=0.1
        )
        assert dw[0, 0] == pytest.approx(0.0125, abs=1e-15)
        assert db[0] == pytest.approx(0.0125, abs=1e-15)

    def test_equals_negative_gradient_of_squared_error(self, rng):
        # finite differences of 0.5 * sum((y - sigmoid(a @ w + b))^2)
        a = rng.uniform(-1, 1, size=3)
        y = rng.integers(0, 2, size=2).astype(float)
        w = rng.normal(scale=0.5, size=(3, 2))
        b = rng.normal(scale=0.5, size=2)
        mu = 0.37

        def loss(w_, b_):
            y_hat = 1 / (1 + np.exp(-(a @ w_ + b_)))
            return 0.5 * np.sum((y - y_hat) ** 2)

        dw, db = delta_rule_update(a, y, w, b, mu)
        h = 1e-6
        for idx in np.ndindex(w.shape):
            wp, wm = w.copy(), w.copy()
            wp[idx] += h
            wm[idx] -= h
            fd = (loss(wp, b) - loss(wm, b)) / (2 * h)
            assert dw[idx] == pytest.approx(-mu * fd, rel=1e-5, abs=1e-10)
        for j in range(2):
            bp, bm = b.copy(), b.copy()
            bp[j] += h
            bm[j] -= h
            fd = (loss(w, bp) - loss(w, bm)) / (2 * h)
            assert db[j] == pytest.approx(-mu * fd, rel=1e-5, abs=1e-10)


class TestTraining:
    def test_ablation_weight_shape(self):
        data = linear_multilabel(30, 4, 3, seed=0)
        model = train(data, ExpansionConfig(p=5), small_config(), use_autoencoder=False)
        assert model.encoder is None
        assert model.out_w.shape == (4 * 5, 3)

    def test_autoencoder_weight_shape(self):
        data = linear_multilabel(30, 4, 3, seed=0)
        cfg = small_config()
        model = train(data, ExpansionConfig(p=5), cfg, use_autoencoder=True)
        expected_hidden = max(1, int(np.ceil(cfg.ae.hidden_fraction * 20)))
        assert model.encoder is not None
        assert model.out_w.shape == (expected_hidden, 3)

    def test_deterministic(self):
        data = linear_multilabel(25, 3, 2, seed=1)
        a = train(data, ExpansionConfig(p=3), small_config(), use_autoencoder=True)
        b = train(data, ExpansionConfig(p=3), small_config(), use_autoencoder=True)
        np.testing.assert_array_equal(a.out_w, b.out_w)
        np.testing.assert_array_equal(a.out_b, b.out_b)
        np.testing.assert_array_equal(a.encoder.w1, b.encoder.w1)

    def test_encoder_frozen_during_output_training(self):
        data = linear_multilabel(25, 3, 2, seed=2)
        cfg = small_config()
        expansion = ExpansionConfig(p=3)
        model = train(data, expansion, cfg, use_autoencoder=True)
        # retrace the transformation stages: the stored encoder must be
        # exactly what autoencoder training alone produces
        norm = fit_normalizer(data.features)
        expanded = expand(apply_normalizer(data.features, norm), expansion)
        solo = train_autoencoder(expanded, cfg.ae)
        np.testing.assert_array_equal(model.encoder.w1, solo.w1)
        np.testing.assert_array_equal(model.encoder.b1, solo.b1)
        np.testing.assert_array_equal(model.encoder.w2, solo.w2)
        np.testing.assert_array_equal(model.encoder.b2, solo.b2)

    def test_empty_dataset_rejected(self):
        from aeflann.datasets import MultiLabelDataset

        empty = MultiLabelDataset(np.empty((0, 2)), np.empty((0, 1)), ["a", "b"], ["x"])
        with pytest.raises(DataError):
            train(empty, ExpansionConfig(p=1), small_config())

    def test_single_label_rejects_multi_hot(self):
        data = linear_multilabel(20, 3, 2, seed=3)
        data.labels[0] = [1.0, 1.0]
        with pytest.raises(DataError):
            train(data, ExpansionConfig(p=1), small_config(), mode=LabelMode.SINGLE_LABEL)

    def test_zero_epochs_equals_initialization_forward_pass(self):
        from aeflann.linalg import SeededRng, uniform_init

        data = linear_multilabel(12, 2, 2, seed=4)
        cfg = TrainConfig(epochs=0, seed=77, ae=AeTrainConfig(epochs=0, seed=78))
        model = train(data, ExpansionConfig(p=1), cfg, use_autoencoder=False)
        # replicate the seeded initialization draws
        rng = SeededRng(77)
        w = uniform_init(2, 2, cfg.init_scale, rng)
        b = rng.uniform(-cfg.init_scale, cfg.init_scale, 2)
        np.testing.assert_array_equal(model.out_w, w)
        np.testing.assert_array_equal(model.out_b, b)

    def test_divergence_guard_names_epoch(self, rng):
        hidden = rng.uniform(-1, 1, size=(20, 4))
        targets = rng.integers(0, 2, size=(20, 2)).astype(float)
        cfg = TrainConfig(mu=50.0, epochs=60, seed=0)
        with pytest.raises(DivergenceError, match="epoch"):
            _fit_output_layer(hidden, targets, cfg, act=Activation.IDENTITY)


class TestPrediction:
    def test_zero_weights_give_half_scores(self, rng):
        model = simple_model()
        scores = predict_scores(model, rng.uniform(size=(4, 2)))
        np.testing.assert_array_equal(scores, np.full((4, 3), 0.5))

    def test_scores_shape_and_range(self):
        data = linear_multilabel(20, 3, 4, seed=5)
        model = train(data, ExpansionConfig(p=3), small_config(epochs=5, ae_epochs=5))
        scores = predict_scores(model, data.features)
        assert scores.shape == (20, 4)
        assert np.all(scores > 0.0) and np.all(scores < 1.0)

    def test_width_mismatch(self, rng):
        model = simple_model(d=2)
        with pytest.raises(ShapeError):
            predict_scores(model, rng.uniform(size=(3, 5)))

    def test_labels_from_scores_examples(self):
        np.testing.assert_array_equal(
            labels_from_scores(np.array([[0.7, 0.3, 0.5]]), 0.5), [[1.0, 0.0, 1.0]]
        )
        np.testing.assert_array_equal(
            labels_from_scores(np.full((1, 3), 0.49), 0.5), [[0.0, 0.0, 0.0]]
        )
        np.testing.assert_array_equal(
            labels_from_scores(np.full((1, 3), 0.5), 0.5), [[1.0, 1.0, 1.0]]
        )

    def test_predict_labels_matches_threshold_rule(self):
        data = linear_multilabel(15, 3, 3, seed=6)
        model = train(data, ExpansionConfig(p=3), small_config(epochs=3, ae_epochs=3))
        scores = predict_scores(model, data.features)
        np.testing.assert_array_equal(
            predict_labels(model, data.features), (scores >= model.threshold).astype(float)
        )

    def test_mode_errors(self, rng):
        multi = simple_model(mode=LabelMode.MULTI_LABEL)
        single = simple_model(mode=LabelMode.SINGLE_LABEL)
        x = rng.uniform(size=(2, 2))
        with pytest.raises(ModeError):
            predict_class(multi, x)
        with pytest.raises(ModeError):
            predict_labels(single, x)

    def test_argmax_and_ties(self):
        # weights chosen so scores reproduce fixed vectors under p=1 and
        # an input of exactly [1, 1] (normalization maps it to [1, 1])
        single = simple_model(
            d=2,
            c=3,
            mode=LabelMode.SINGLE_LABEL,
            out_b=np.array([-1.0, 2.0, -2.0]),
        )
        x = np.array([[1.0, 1.0]])
        assert predict_class(single, x)[0] == 1
        tie = simple_model(d=2, c=2, mode=LabelMode.SINGLE_LABEL)
        assert predict_class(tie, x)[0] == 0  # equal scores -> lowest index

    def test_single_class_degenerate(self):
        model = simple_model(d=2, c=1, mode=LabelMode.SINGLE_LABEL)
        assert predict_class(model, np.array([[0.2, 0.8]]))[0] == 0

    @given(st.floats(0.01, 100.0), st.floats(-5.0, 5.0))
    def test_argmax_invariant_under_increasing_transform(self, scale, shift):
        scores = np.array([[0.2, 0.9, 0.1], [0.5, 0.5, 0.4]])
        base = np.argmax(scores, axis=1)
        transformed = np.argmax(scores * scale + shift, axis=1)
        np.testing.assert_array_equal(base, transformed)


class TestSingleLabelTraining:
    def test_learns_separable_classes(self):
        data = linear_single_label(60, 4, 3, seed=7)
        model = train(
            one_hot(data),
            ExpansionConfig(p=5),
            small_config(epochs=200, ae_epochs=100),
            use_autoencoder=True,
            mode=LabelMode.SINGLE_LABEL,
        )
        predicted = predict_class(model, data.features)
        assert np.mean(predicted == data.class_index) >= 0.9


class TestModelFiles:
    def test_roundtrip_scores_bit_identical(self, tmp_path, rng):
        data = linear_multilabel(20, 3, 2, seed=8)
        model = train(data, ExpansionConfig(p=3), small_config(epochs=5, ae_epochs=5))
        path = tmp_path / "model.json"
        save_model(model, path)
        back = load_model(path)
        x = rng.uniform(size=(6, 3))
        np.testing.assert_array_equal(predict_scores(model, x), predict_scores(back, x))

    def test_ablation_roundtrips_without_encoder(self, tmp_path):
        data = linear_multilabel(15, 2, 2, seed=9)
        model = train(data, ExpansionConfig(p=3), small_config(epochs=3), use_autoencoder=False)
        path = tmp_path / "model.json"
        save_model(model, path)
        assert load_model(path).encoder is None

    def test_single_label_mode_roundtrips(self, tmp_path):
        data = linear_single_label(20, 3, 2, seed=10)
        model = train(
            one_hot(data),
            ExpansionConfig(p=1),
            small_config(epochs=3, ae_epochs=3),
            mode=LabelMode.SINGLE_LABEL,
        )
        path = tmp_path / "model.json"
        save_model(model, path)
        assert load_model(path).mode is LabelMode.SINGLE_LABEL

    def test_truncated_file_rejected(self, tmp_path):
        data = linear_multilabel(15, 2, 2, seed=11)
        model = train(data, ExpansionConfig(p=1), small_config(epochs=2), use_autoencoder=False)
        path = tmp_path / "model.json"
        save_model(model, path)
        path.write_text(path.read_text()[: 50])
        with pytest.raises(ModelFormatError):
            load_model(path)

    def test_wrong_version_rejected(self, tmp_path):
        import json

        data = linear_multilabel(15, 2, 2, seed=12)
        model = train(data, ExpansionConfig(p=1), small_config(epochs=2), use_autoencoder=False)
        path = tmp_path / "model.json"
        save_model(model, path)
        payload = json.loads(path.read_text())
        payload["version"] = 99
        path.write_text(json.dumps(payload))
        with pytest.raises(ModelFormatError, match="version"):
            load_model(path)

    def test_not_json_rejected(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text("definitely not json{{{")
        with pytest.raises(ModelFormatError):
            load_model(path)
