#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
张量自动微分、AdamW 与检查点测试
"""

import numpy as np
import pytest

from gdk.core.exceptions import CheckpointException, NumericalException
from gdk.services.numerics import tensor as tn
from gdk.services.numerics.checkpoint import (
    checkpoint_from_bytes,
    checkpoint_to_bytes,
    load_checkpoint,
    save_checkpoint,
)
from gdk.services.numerics.gradcheck import check_gradients
from gdk.services.numerics.optim import AdamWState, adamw_step
from gdk.services.numerics.tensor import Tensor


class TestForwardOps:
    """前向结果"""

    def test_matmul_identity(self, rng):
        a = rng.standard_normal((3, 4))
        assert np.allclose(tn.matmul(Tensor(a), Tensor(np.eye(4))).data, a)

    def test_matmul_shape_mismatch(self):
        with pytest.raises(NumericalException):
            tn.matmul(Tensor(np.zeros((2, 3))), Tensor(np.zeros((2, 3))))

    def test_softmax_of_zeros(self):
        assert np.allclose(tn.softmax_rows(Tensor(np.zeros(2))).data, [0.5, 0.5])

    def test_softmax_is_stable(self):
        out = tn.softmax_rows(Tensor(np.array([1000.0, 1000.0, -1000.0]))).data
        assert np.all(np.isfinite(out))
        assert np.allclose(out, [0.5, 0.5, 0.0])

    def test_layer_norm_moments(self, rng):
        x = rng.standard_normal((5, 16)) * 3 + 2
        y = tn.layer_norm(Tensor(x), Tensor(np.ones(16)), Tensor(np.zeros(16))).data
        assert np.allclose(y.mean(axis=-1), 0, atol=1e-12)
        assert np.allclose(y.var(axis=-1), 1, atol=1e-3)

    def test_gelu_at_zero(self):
        assert tn.gelu(Tensor(np.zeros(3))).data.tolist() == [0.0, 0.0, 0.0]

    def test_dtype_preserved(self):
        a = Tensor(np.ones((2, 2), dtype=np.float32))
        assert tn.matmul(a, a).dtype == np.float32


class TestBackward:
    """反向传播"""

    def test_sum_grad_is_ones(self, rng):
        leaves = tn.parameters([("x", rng.standard_normal((3, 4)))])
        grads = tn.backward(tn.sum_all(leaves["x"])).by_name()
        assert np.array_equal(grads["x"], np.ones((3, 4)))

    def test_shared_leaf_accumulates(self):
        leaves = tn.parameters([("x", np.array([2.0, 3.0]))])
        x = leaves["x"]
        grads = tn.backward(tn.sum_all(tn.mul(x, x))).by_name()
        assert np.allclose(grads["x"], [4.0, 6.0])

    def test_non_scalar_loss(self):
        leaves = tn.parameters([("x", np.zeros(3))])
        with pytest.raises(NumericalException):
            tn.backward(leaves["x"])

    def test_no_graph_without_grad(self):
        out = tn.add(Tensor(np.ones(2)), Tensor(np.ones(2)))
        assert not out.requires_grad
        assert tn.backward(tn.sum_all(out)).by_name() == {}

    @pytest.mark.parametrize(
        "name, build",
        [
            ("matmul", lambda p: tn.matmul(p["a"], p["b"])),
            ("broadcast_add", lambda p: tn.add(tn.matmul(p["a"], p["b"]), p["bias"])),
            ("gelu", lambda p: tn.gelu(p["a"])),
            ("softmax", lambda p: tn.mul(tn.softmax_rows(p["a"]), p["a"])),
            ("layer_norm", lambda p: tn.layer_norm(p["a"], p["gain"], p["bias3"])),
            ("transpose_reshape", lambda p: tn.reshape(tn.transpose(p["a"], (1, 0)), (3, 4))),
            ("slice_concat", lambda p: tn.concat_rows([tn.slice_rows(p["a"], 1, 4), p["a"]])),
            ("embedding", lambda p: tn.embedding_lookup(p["b"], [0, 2, 2, 1])),
            ("mean_broadcast", lambda p: tn.add(p["a"], tn.mean_all(tn.mul(p["a"], p["a"])))),
        ],
    )
    def test_op_gradients(self, name, build, rng):
        """逐算子中心差分检查，相对误差 < 1e-6"""
        values = {
            "a": rng.standard_normal((4, 3)),
            "b": rng.standard_normal((3, 5)),
            "bias": rng.standard_normal(5),
            "gain": rng.standard_normal(3),
            "bias3": rng.standard_normal(3),
        }
        weights = {}

        def loss_fn(p):
            out = build(p)
            if name not in weights:
                weights[name] = np.random.default_rng(9).standard_normal(out.shape)
            return tn.sum_all(tn.mul(out, Tensor(weights[name])))

        result = check_gradients(loss_fn, values)
        assert result.max_rel_error < 1e-6, result.worst

    def test_mse_gradient(self, rng):
        target = rng.standard_normal((4, 2))
        result = check_gradients(lambda p: tn.mse_loss(p["x"], Tensor(target)), {"x": rng.standard_normal((4, 2))})
        assert result.max_rel_error < 1e-6


class TestCheckedMode:
    def test_non_finite_raises(self):
        previous = tn.is_checked_mode()
        tn.set_checked_mode(True)
        try:
            with pytest.raises(NumericalException):
                tn.add(Tensor(np.array([np.inf])), Tensor(np.array([1.0])))
        finally:
            tn.set_checked_mode(previous)

    def test_off_by_default(self):
        assert tn.is_checked_mode() is False
        assert np.isinf(tn.add(Tensor(np.array([np.inf])), Tensor(np.array([1.0]))).data[0])


class TestAdamW:
    """AdamW 优化器"""

    def test_first_step_moves_by_lr(self):
        """第一步偏差修正后更新量约为 lr·sign(g)"""
        params = {"w": np.array([1.0, -1.0, 0.5])}
        grads = {"w": np.array([0.3, -2.0, 1e-3])}
        new, state = adamw_step(params, grads, AdamWState.zeros_like(params), lr=0.1, weight_decay=0.0)
        assert state.step == 1
        assert np.allclose(new["w"], params["w"] - 0.1 * np.sign(grads["w"]), atol=1e-5)

    def test_pure_decay(self):
        """零梯度时只做解耦衰减"""
        params = {"w": np.array([2.0, -4.0])}
        new, _ = adamw_step(params, {}, AdamWState(), lr=0.1, weight_decay=0.5)
        assert np.allclose(new["w"], params["w"] * (1 - 0.05))

    def test_inputs_not_mutated(self):
        params = {"w": np.array([1.0])}
        state = AdamWState.zeros_like(params)
        adamw_step(params, {"w": np.array([1.0])}, state)
        assert params["w"][0] == 1.0 and state.step == 0

    def test_quadratic_converges(self):
        """最小化 (θ − 3)²"""
        params = {"w": np.array([0.0])}
        state = AdamWState()
        for _ in range(2000):
            grads = {"w": 2 * (params["w"] - 3.0)}
            params, state = adamw_step(params, grads, state, lr=0.05, betas=(0.9, 0.999), weight_decay=0.0)
        assert params["w"][0] == pytest.approx(3.0, abs=0.05)

    def test_grad_shape_mismatch(self):
        with pytest.raises(NumericalException):
            adamw_step({"w": np.zeros(3)}, {"w": np.zeros(2)}, AdamWState())


class TestCheckpoint:
    """检查点二进制格式"""

    def test_round_trip_float32(self, tmp_path, rng):
        params = {"a.w": rng.standard_normal((3, 4)).astype(np.float32), "b": np.zeros(5, dtype=np.float32)}
        save_checkpoint(params, tmp_path / "c.bin")
        loaded = load_checkpoint(tmp_path / "c.bin")
        assert list(loaded) == ["a.w", "b"]
        assert np.array_equal(loaded["a.w"], params["a.w"])

    def test_bad_magic(self):
        with pytest.raises(CheckpointException):
            checkpoint_from_bytes(b"NOTACKPT" + b"\x00" * 8)

    def test_truncated(self):
        blob = checkpoint_to_bytes({"w": np.ones((4, 4))})
        with pytest.raises(CheckpointException):
            checkpoint_from_bytes(blob[:-5])

    def test_trailing_bytes(self):
        blob = checkpoint_to_bytes({"w": np.ones(2)})
        with pytest.raises(CheckpointException):
            checkpoint_from_bytes(blob + b"\x00")

    def test_missing_file(self, tmp_path):
        with pytest.raises(CheckpointException):
            load_checkpoint(tmp_path / "nope.bin")

    def test_invalid_utf8_name(self):
        blob = bytearray(checkpoint_to_bytes({"ab": np.ones(2)}))
        blob[20:22] = b"\xff\xfe"
        with pytest.raises(CheckpointException):
            checkpoint_from_bytes(bytes(blob))

    def test_truncated_name(self):
        blob = checkpoint_to_bytes({"weights": np.ones(2)})
        with pytest.raises(CheckpointException):
            checkpoint_from_bytes(blob[:22])
