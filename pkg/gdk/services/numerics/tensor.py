#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""gdk.services.numerics.tensor

基于 numpy 的最小稠密张量与反向自动微分。

* 每个算子在任一输入 ``requires_grad`` 时记录 backward 规则（闭包），否则不建图。
* ``backward(loss)`` 从标量 loss 做拓扑排序得到 ``Tape``，逆序遍历，每个节点只访问一次。
* 梯度以 ``GradientMap`` 返回，不写回叶子张量，因此多个样本可以在线程中各自求导后
  再按固定顺序归约。
* 测试用 float64，训练用 float32，算子保持输入精度。
"""
from __future__ import annotations

from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from gdk.core.config import settings
from gdk.core.exceptions import NumericalException

_GELU_C = float(np.sqrt(2.0 / np.pi))
_checked = settings.CHECKED_MODE

BackwardFn = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]


def set_checked_mode(enabled: bool) -> None:
    """开启后每个算子输出都做有限值检查"""
    global _checked
    _checked = bool(enabled)


def is_checked_mode() -> bool:
    return _checked


class Tensor:
    """带可选梯度记录的张量"""

    __slots__ = ("data", "requires_grad", "name", "_parents", "_backward", "op")

    def __init__(
        self,
        data,
        requires_grad: bool = False,
        name: Optional[str] = None,
        _parents: Tuple["Tensor", ...] = (),
        _backward: Optional[BackwardFn] = None,
        op: str = "leaf",
    ):
        self.data = np.asarray(data)
        if self.data.dtype.kind != "f":
            self.data = self.data.astype(np.float64)
        self.requires_grad = requires_grad
        self.name = name
        self._parents = _parents
        self._backward = _backward
        self.op = op

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    def numpy(self) -> np.ndarray:
        return self.data

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, op={self.op}, requires_grad={self.requires_grad})"

    def __add__(self, other) -> "Tensor":
        return add(self, other)

    def __sub__(self, other) -> "Tensor":
        return sub(self, other)

    def __mul__(self, other) -> "Tensor":
        return mul(self, other)

    def __matmul__(self, other) -> "Tensor":
        return matmul(self, other)


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _node(data: np.ndarray, parents: Sequence[Tensor], backward: BackwardFn, op: str) -> Tensor:
    if _checked and not np.all(np.isfinite(data)):
        raise NumericalException(f"算子 {op} 输出包含非有限值", details={"shape": list(data.shape)})
    if any(p.requires_grad for p in parents):
        return Tensor(data, requires_grad=True, _parents=tuple(parents), _backward=backward, op=op)
    return Tensor(data, op=op)


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """把广播后的梯度求和回原形状"""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _check_finite_inputs(op: str, *tensors: Tensor) -> None:
    if _checked:
        for t in tensors:
            if not np.all(np.isfinite(t.data)):
                raise NumericalException(f"算子 {op} 输入包含非有限值")


# ------------------------------------------------------------------ elementwise


def add(a, b) -> Tensor:
    """逐元素相加，沿前导维广播"""
    a, b = as_tensor(a), as_tensor(b)
    _check_finite_inputs("add", a, b)

    def backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return _node(a.data + b.data, (a, b), backward, "add")


def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def backward(g):
        return _unbroadcast(g, a.shape), -_unbroadcast(g, b.shape)

    return _node(a.data - b.data, (a, b), backward, "sub")


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def backward(g):
        return _unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)

    return _node(a.data * b.data, (a, b), backward, "mul")


def scale(a, factor: float) -> Tensor:
    a = as_tensor(a)
    factor = float(factor)

    def backward(g):
        return (g * factor,)

    return _node(a.data * np.asarray(factor, dtype=a.dtype), (a,), backward, "scale")


def gelu(x) -> Tensor:
    """tanh 近似 GELU"""
    x = as_tensor(x)
    u = _GELU_C * (x.data + 0.044715 * x.data**3)
    th = np.tanh(u)
    out = 0.5 * x.data * (1.0 + th)

    def backward(g):
        du = _GELU_C * (1.0 + 3 * 0.044715 * x.data**2)
        return (g * (0.5 * (1.0 + th) + 0.5 * x.data * (1.0 - th**2) * du),)

    return _node(out, (x,), backward, "gelu")


# ------------------------------------------------------------------ linear algebra


def matmul(a, b) -> Tensor:
    """矩阵乘法，支持前导批维广播"""
    a, b = as_tensor(a), as_tensor(b)
    _check_finite_inputs("matmul", a, b)
    if a.shape[-1] != b.shape[-2 if b.data.ndim > 1 else 0]:
        raise NumericalException(f"matmul 形状不匹配: {a.shape} @ {b.shape}")

    def backward(g):
        ga = np.matmul(g, np.swapaxes(b.data, -1, -2))
        gb = np.matmul(np.swapaxes(a.data, -1, -2), g)
        return _unbroadcast(ga, a.shape), _unbroadcast(gb, b.shape)

    return _node(np.matmul(a.data, b.data), (a, b), backward, "matmul")


def transpose(a, axes: Sequence[int]) -> Tensor:
    a = as_tensor(a)
    axes = tuple(axes)
    inverse = tuple(np.argsort(axes))

    def backward(g):
        return (np.transpose(g, inverse),)

    return _node(np.transpose(a.data, axes), (a,), backward, "transpose")


def reshape(a, shape: Sequence[int]) -> Tensor:
    a = as_tensor(a)
    original = a.shape

    def backward(g):
        return (g.reshape(original),)

    return _node(a.data.reshape(tuple(shape)), (a,), backward, "reshape")


# ------------------------------------------------------------------ normalization


def softmax_rows(a) -> Tensor:
    """沿最后一维的数值稳定 softmax"""
    a = as_tensor(a)
    shifted = a.data - a.data.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=-1, keepdims=True)

    def backward(g):
        return (y * (g - (g * y).sum(axis=-1, keepdims=True)),)

    return _node(y, (a,), backward, "softmax")


def layer_norm(x, gain, bias, eps: float = 1e-5) -> Tensor:
    """y = gain·(x − μ)/σ + bias，沿最后一维"""
    x, gain, bias = as_tensor(x), as_tensor(gain), as_tensor(bias)
    mu = x.data.mean(axis=-1, keepdims=True)
    var = ((x.data - mu) ** 2).mean(axis=-1, keepdims=True)
    sigma = np.sqrt(var + eps)
    xhat = (x.data - mu) / sigma
    out = xhat * gain.data + bias.data

    def backward(g):
        ghat = g * gain.data
        m1 = ghat.mean(axis=-1, keepdims=True)
        m2 = (ghat * xhat).mean(axis=-1, keepdims=True)
        dx = (ghat - m1 - xhat * m2) / sigma
        return dx, _unbroadcast(g * xhat, gain.shape), _unbroadcast(g, bias.shape)

    return _node(out, (x, gain, bias), backward, "layer_norm")


# ------------------------------------------------------------------ indexing


def embedding_lookup(table, indices) -> Tensor:
    """按整数下标取表行"""
    table = as_tensor(table)
    idx = np.asarray(indices, dtype=np.int64)

    def backward(g):
        grad = np.zeros_like(table.data)
        np.add.at(grad, idx, g)
        return (grad,)

    return _node(table.data[idx], (table,), backward, "embedding")


def concat_rows(tensors: Sequence[Tensor]) -> Tensor:
    """沿第 0 维拼接"""
    tensors = [as_tensor(t) for t in tensors]
    sizes = [t.shape[0] for t in tensors]
    bounds = np.cumsum([0] + sizes)

    def backward(g):
        return tuple(g[bounds[i] : bounds[i + 1]] for i in range(len(tensors)))

    return _node(np.concatenate([t.data for t in tensors], axis=0), tuple(tensors), backward, "concat")


def slice_rows(a, start: int, stop: int) -> Tensor:
    a = as_tensor(a)

    def backward(g):
        grad = np.zeros_like(a.data)
        grad[start:stop] = g
        return (grad,)

    return _node(a.data[start:stop], (a,), backward, "slice")


# ------------------------------------------------------------------ reductions


def sum_all(a) -> Tensor:
    a = as_tensor(a)

    def backward(g):
        return (np.broadcast_to(g, a.shape).astype(a.dtype),)

    return _node(np.asarray(a.data.sum()), (a,), backward, "sum")


def mean_all(a) -> Tensor:
    a = as_tensor(a)
    n = a.data.size

    def backward(g):
        return (np.broadcast_to(g / n, a.shape).astype(a.dtype),)

    return _node(np.asarray(a.data.mean()), (a,), backward, "mean")


def mse_loss(pred, target) -> Tensor:
    """逐元素平方误差的均值"""
    pred, target = as_tensor(pred), as_tensor(target)
    if pred.shape != target.shape:
        raise NumericalException(f"mse 形状不匹配: {pred.shape} vs {target.shape}")
    diff = pred.data - target.data
    n = diff.size

    def backward(g):
        gd = (2.0 / n) * g * diff
        return gd, -gd

    return _node(np.asarray((diff**2).mean()), (pred, target), backward, "mse")


# ------------------------------------------------------------------ backward


class GradientMap:
    """叶子张量 → 梯度"""

    def __init__(self, grads: Dict[int, np.ndarray], leaves: Dict[int, Tensor]):
        self._grads = grads
        self._leaves = leaves

    def __getitem__(self, tensor: Tensor) -> np.ndarray:
        if id(tensor) in self._grads:
            return self._grads[id(tensor)]
        return np.zeros_like(tensor.data)

    def __contains__(self, tensor: Tensor) -> bool:
        return id(tensor) in self._grads

    def by_name(self) -> Dict[str, np.ndarray]:
        return {t.name: self._grads[k] for k, t in self._leaves.items() if t.name is not None}


class Tape:
    """按拓扑顺序记录的计算节点"""

    def __init__(self, nodes: List[Tensor]):
        self.nodes = nodes

    @classmethod
    def record(cls, loss: Tensor) -> "Tape":
        order: List[Tensor] = []
        visited = set()
        stack: List[Tuple[Tensor, bool]] = [(loss, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if parent.requires_grad and id(parent) not in visited:
                    stack.append((parent, False))
        return cls(order)

    def backward(self, loss: Tensor) -> GradientMap:
        grads: Dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
        leaves: Dict[int, Tensor] = {}
        for node in reversed(self.nodes):
            g = grads.get(id(node))
            if g is None:
                continue
            if node._backward is None:
                leaves[id(node)] = node
                continue
            for parent, pg in zip(node._parents, node._backward(g)):
                if pg is None or not parent.requires_grad:
                    continue
                key = id(parent)
                grads[key] = grads[key] + pg if key in grads else np.array(pg, dtype=parent.dtype)
        leaf_grads = {k: grads[k] for k in leaves}
        return GradientMap(leaf_grads, leaves)


def backward(loss: Tensor) -> GradientMap:
    """对标量 loss 反向传播，返回所有 requires_grad 叶子的梯度"""
    if loss.data.size != 1:
        raise NumericalException(f"loss 必须是标量，实际形状 {loss.shape}")
    if not loss.requires_grad:
        return GradientMap({}, {})
    return Tape.record(loss).backward(loss)


def parameters(named: Iterable[Tuple[str, np.ndarray]]) -> Dict[str, Tensor]:
    """把命名数组包装为需要梯度的叶子"""
    return {name: Tensor(value, requires_grad=True, name=name) for name, value in named}


__all__ = [
    "Tensor",
    "Tape",
    "GradientMap",
    "as_tensor",
    "add",
    "sub",
    "mul",
    "scale",
    "gelu",
    "matmul",
    "transpose",
    "reshape",
    "softmax_rows",
    "layer_norm",
    "embedding_lookup",
    "concat_rows",
    "slice_rows",
    "sum_all",
    "mean_all",
    "mse_loss",
    "backward",
    "parameters",
    "set_checked_mode",
    "is_checked_mode",
]
