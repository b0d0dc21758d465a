"""Small reverse-mode autodiff over 2-D float64 arrays.

Just enough machinery for the models in this package: dense and
sparse-dense matmul, elementwise relu/tanh, row gathering, mean squared
error, and an L2 penalty. Gradients accumulate into ``Tensor.grad`` when
``backward`` is called on a scalar result.
"""

import contextlib
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ShapeError

_grad_enabled = True


@contextlib.contextmanager
def no_grad():
    """Disable graph construction inside the block (inference mode)."""
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


class Tensor:
    """2-D float64 array with an optional gradient slot."""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward", "name")

    def __init__(self, data, requires_grad=False, name=None):
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2:
            raise ShapeError(f"tensors are 2-D, got shape {arr.shape}")
        self.data = arr
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self._parents = ()
        self._backward = None
        self.name = name

    @property
    def shape(self):
        return self.data.shape

    def zero_grad(self):
        self.grad = None

    def backward(self):
        if self.data.shape != (1, 1):
            raise ShapeError("backward() starts from a scalar (1, 1) tensor")
        topo = []
        seen = set()

        def visit(t):
            if id(t) in seen:
                return
            seen.add(id(t))
            for p in t._parents:
                visit(p)
            topo.append(t)

        visit(self)
        self.grad = np.ones((1, 1))
        for t in reversed(topo):
            if t._backward is not None and t.grad is not None:
                t._backward(t.grad)

    def __repr__(self):
        tag = f" {self.name!r}" if self.name else ""
        return f"Tensor{tag}(shape={self.data.shape}, grad={self.grad is not None})"


def _tracked(*tensors):
    return _grad_enabled and any(t.requires_grad for t in tensors)


def _result(data, parents, backward_fn):
    out = Tensor(data)
    if _tracked(*parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward = backward_fn
    return out


def _accum(t, g):
    if not t.requires_grad:
        return
    if t.grad is None:
        t.grad = np.zeros_like(t.data)
    t.grad += g


@dataclass(frozen=True)
class SparseMatrix:
    """Square CSR matrix, structurally symmetric, used as a constant."""

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray = field(compare=False)

    def __post_init__(self):
        if self.indptr.shape[0] != self.n + 1:
            raise ShapeError("indptr length must be n + 1")
        if self.indices.shape[0] != self.data.shape[0]:
            raise ShapeError("indices and data must align")

    def to_dense(self):
        out = np.zeros((self.n, self.n))
        for i in range(self.n):
            for e in range(self.indptr[i], self.indptr[i + 1]):
                out[i, self.indices[e]] += self.data[e]
        return out


def matmul(a, b):
    if a.data.shape[1] != b.data.shape[0]:
        raise ShapeError(f"matmul mismatch {a.data.shape} x {b.data.shape}")
    data = a.data @ b.data

    def backward(g):
        _accum(a, g @ b.data.T)
        _accum(b, a.data.T @ g)

    return _result(data, (a, b), backward)


def spmm(sparse, x):
    """sparse @ x where sparse is a constant SparseMatrix.

    The matrices here are structurally symmetric, so the backward pass
    multiplies by the same matrix (values included) again.
    """
    if x.data.shape[0] != sparse.n:
        raise ShapeError("sparse and dense row counts differ")
    data = _kernels.spmm_csr(sparse.indptr, sparse.indices, sparse.data, x.data)

    def backward(g):
        _accum(x, _kernels.spmm_csr(sparse.indptr, sparse.indices, sparse.data, g))

    return _result(data, (x,), backward)


def add(a, b):
    if a.data.shape != b.data.shape:
        raise ShapeError(f"add mismatch {a.data.shape} vs {b.data.shape}")
    data = a.data + b.data

    def backward(g):
        _accum(a, g)
        _accum(b, g)

    return _result(data, (a, b), backward)


def add_rowvec(a, row):
    """Add a (1, F) row vector to every row of a."""
    if row.data.shape != (1, a.data.shape[1]):
        raise ShapeError("row vector shape must be (1, cols)")
    data = a.data + row.data

    def backward(g):
        _accum(a, g)
        _accum(row, g.sum(axis=0, keepdims=True))

    return _result(data, (a, row), backward)


def relu(a):
    data = np.maximum(a.data, 0.0)

    def backward(g):
        _accum(a, g * (a.data > 0.0))

    return _result(data, (a,), backward)


def tanh(a):
    data = np.tanh(a.data)

    def backward(g):
        _accum(a, g * (1.0 - data * data))

    return _result(data, (a,), backward)


def gather_rows(a, index):
    """Select rows of a by integer index; duplicates allowed."""
    index = np.asarray(index, dtype=np.int64).ravel()
    if index.size and (index.min() < 0 or index.max() >= a.data.shape[0]):
        raise IndexError("gather index out of range")
    data = a.data[index]

    def backward(g):
        if not a.requires_grad:
            return
        if a.grad is None:
            a.grad = np.zeros_like(a.data)
        np.add.at(a.grad, index, g)

    return _result(data, (a,), backward)


def mse_loss(pred, target):
    """Mean of squared differences, over all elements."""
    if pred.data.shape != target.data.shape:
        raise ShapeError("prediction and target shapes differ")
    diff = pred.data - target.data
    count = diff.size
    data = np.array([[np.sum(diff * diff) / count]])

    def backward(g):
        scale = 2.0 / count * g[0, 0]
        _accum(pred, scale * diff)
        _accum(target, -scale * diff)

    return _result(data, (pred, target), backward)


def l2_penalty(tensors):
    """Sum of squares of every element of every tensor (no halving)."""
    tensors = list(tensors)
    data = np.array([[sum(float(np.sum(t.data * t.data)) for t in tensors)]])

    def backward(g):
        for t in tensors:
            _accum(t, 2.0 * g[0, 0] * t.data)

    return _result(data, tuple(tensors), backward)


def add_scaled(a, b, scale):
    """a + scale * b for scalar tensors (loss composition)."""
    data = a.data + scale * b.data

    def backward(g):
        _accum(a, g)
        _accum(b, scale * g)

    return _result(data, (a, b), backward)


@dataclass
class AdamState:
    """First/second moment estimates for one named parameter set."""

    m: dict
    v: dict
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_params(cls, params):
        return cls(m={k: np.zeros_like(p.data) for k, p in params.items()},
                   v={k: np.zeros_like(p.data) for k, p in params.items()})


def adam_step(params, state, lr):
    """One bias-corrected Adam update in place. Missing grads are skipped."""
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    for name, p in params.items():
        if p.grad is None:
            continue
        g = p.grad
        state.m[name] = b1 * state.m[name] + (1.0 - b1) * g
        state.v[name] = b2 * state.v[name] + (1.0 - b2) * (g * g)
        mhat = state.m[name] / (1.0 - b1 ** state.t)
        vhat = state.v[name] / (1.0 - b2 ** state.t)
        p.data -= lr * mhat / (np.sqrt(vhat) + state.eps)


def clip_gradients(params, low=-1.0, high=1.0):
    """Clamp every gradient element into [low, high]."""
    for p in params.values():
        if p.grad is not None:
            np.clip(p.grad, low, high, out=p.grad)


def zero_grad(params):
    for p in params.values():
        p.grad = None
