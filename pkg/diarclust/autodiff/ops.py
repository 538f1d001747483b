"""
Differentiable primitives.

Each primitive computes its value with plain numpy. When every operand is a
numpy array or scalar the result is returned as-is; when any operand is a
Tensor the result is recorded on that tensor's tape together with its
vector-Jacobian product. Algorithms written against these functions therefore
run unchanged, and bit-for-bit identically, in plain and recorded mode.
"""

from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from diarclust import numerics
from diarclust.autodiff.tensor import Tape, Tensor
from diarclust.exceptions import (
    EvaluationError,
    ShapeMismatchError,
    TapeStateError,
    UnsupportedPrimitiveError,
)


def value_of(x: Any) -> Any:
    """Return the numpy value behind a Tensor; other inputs pass through."""
    return x.value if isinstance(x, Tensor) else x


def is_recorded(x: Any) -> bool:
    return isinstance(x, Tensor)


def _tape_of(args: Sequence[Any]) -> Optional[Tape]:
    tape = None
    for arg in args:
        if isinstance(arg, Tensor):
            if tape is None:
                tape = arg.tape
            elif arg.tape is not tape:
                raise TapeStateError("operands were recorded on different tapes")
    return tape


def _emit(out, args: Sequence[Any], vjp: Callable[[np.ndarray], Tuple]):
    tape = _tape_of(args)
    if tape is None:
        return out
    parents = tuple(a if isinstance(a, Tensor) else None for a in args)
    return Tensor(out, tape, parents, vjp)


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum an adjoint back down to the operand shape numpy broadcast from."""
    grad = np.asarray(grad)
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad.reshape(shape)


# Elementwise arithmetic

def add(a, b):
    av, bv = value_of(a), value_of(b)
    out = np.add(av, bv)
    return _emit(out, (a, b), lambda g: (
        _unbroadcast(g, np.shape(av)), _unbroadcast(g, np.shape(bv))))


def sub(a, b):
    av, bv = value_of(a), value_of(b)
    out = np.subtract(av, bv)
    return _emit(out, (a, b), lambda g: (
        _unbroadcast(g, np.shape(av)), _unbroadcast(-g, np.shape(bv))))


def mul(a, b):
    av, bv = value_of(a), value_of(b)
    out = np.multiply(av, bv)
    return _emit(out, (a, b), lambda g: (
        _unbroadcast(g * bv, np.shape(av)), _unbroadcast(g * av, np.shape(bv))))


def div(a, b):
    av, bv = value_of(a), value_of(b)
    if np.any(np.asarray(bv) == 0.0):
        raise EvaluationError("division by zero")
    out = np.divide(av, bv)
    return _emit(out, (a, b), lambda g: (
        _unbroadcast(g / bv, np.shape(av)),
        _unbroadcast(-g * av / (bv * bv), np.shape(bv))))


def neg(a):
    out = np.negative(value_of(a))
    return _emit(out, (a,), lambda g: (-g,))


def exp(a):
    out = np.exp(value_of(a))
    return _emit(out, (a,), lambda g: (g * out,))


def log(a):
    av = value_of(a)
    if np.any(np.asarray(av) <= 0.0):
        raise EvaluationError("log of a non-positive value")
    out = np.log(av)
    return _emit(out, (a,), lambda g: (g / av,))


def power(a, p):
    if isinstance(p, Tensor):
        raise UnsupportedPrimitiveError("power supports constant exponents only")
    av = value_of(a)
    out = np.power(av, p)
    return _emit(out, (a,), lambda g: (g * p * np.power(av, p - 1),))


def absolute(a):
    """|a|; the adjoint uses subgradient 0 at exactly 0."""
    av = value_of(a)
    out = np.abs(av)
    return _emit(out, (a,), lambda g: (g * np.sign(av),))


def digamma(a):
    av = value_of(a)
    out = np.asarray(numerics.digamma(np.asarray(av, dtype=np.float64)))
    return _emit(out, (a,), lambda g: (g * numerics.trigamma(np.asarray(av, dtype=np.float64)),))


def tanh(a):
    out = np.tanh(value_of(a))
    return _emit(out, (a,), lambda g: (g * (1.0 - out * out),))


def sigmoid(a):
    out = expit(value_of(a))
    return _emit(out, (a,), lambda g: (g * out * (1.0 - out),))


def clip(a, low: float, high: float):
    av = value_of(a)
    out = np.clip(av, low, high)
    return _emit(out, (a,), lambda g: (g * ((av >= low) & (av <= high)),))


# Reductions and linear algebra

def _expand_reduced(g: np.ndarray, shape: Tuple[int, ...], axis, keepdims: bool) -> np.ndarray:
    if axis is not None and not keepdims:
        g = np.expand_dims(g, axis)
    return np.broadcast_to(g, shape)


def sum(a, axis=None, keepdims: bool = False):  # noqa: A001
    av = value_of(a)
    out = np.sum(av, axis=axis, keepdims=keepdims)
    shape = np.shape(av)
    return _emit(out, (a,), lambda g: (_expand_reduced(g, shape, axis, keepdims),))


def sqnorm(a, axis=None, keepdims: bool = False):
    """Sum of squares along an axis (squared Euclidean norm)."""
    av = value_of(a)
    out = np.sum(av * av, axis=axis, keepdims=keepdims)
    shape = np.shape(av)
    return _emit(out, (a,), lambda g: (2.0 * av * _expand_reduced(g, shape, axis, keepdims),))


def matmul(a, b):
    av, bv = value_of(a), value_of(b)
    if np.ndim(av) > 2 or np.ndim(bv) > 2 or np.ndim(av) == 0 or np.ndim(bv) == 0:
        raise ShapeMismatchError("matmul supports 1-D and 2-D operands only")
    out = np.matmul(av, bv)

    def vjp(g):
        if np.ndim(av) == 1 and np.ndim(bv) == 1:
            return g * bv, g * av
        if np.ndim(av) == 1:
            return bv @ g, np.outer(av, g)
        if np.ndim(bv) == 1:
            return np.outer(g, bv), av.T @ g
        return g @ bv.T, av.T @ g

    return _emit(out, (a, b), vjp)


dot = matmul


def transpose(a):
    out = np.transpose(value_of(a))
    return _emit(out, (a,), lambda g: (np.transpose(g),))


def reshape(a, shape):
    av = value_of(a)
    out = np.reshape(av, shape)
    orig = np.shape(av)
    return _emit(out, (a,), lambda g: (np.reshape(g, orig),))


def getitem(a, index):
    av = value_of(a)
    out = av[index]

    def vjp(g):
        full = np.zeros_like(av, dtype=np.float64)
        np.add.at(full, index, g)
        return (full,)

    return _emit(out, (a,), vjp)


def stack(items: Sequence[Any], axis: int = 0):
    items = list(items)
    out = np.stack([value_of(item) for item in items], axis=axis)
    return _emit(out, tuple(items), lambda g: tuple(
        np.take(g, i, axis=axis) for i in range(len(items))))


# Normalization

def log_normalize(a):
    out = numerics.log_normalize(value_of(a))

    def vjp(g):
        return (g - np.exp(out) * np.sum(g, axis=-1, keepdims=True),)

    return _emit(out, (a,), vjp)


def normalize_log_probs(a):
    out = numerics.normalize_log_probs(value_of(a))

    def vjp(g):
        return (out * (g - np.sum(g * out, axis=-1, keepdims=True)),)

    return _emit(out, (a,), vjp)


PRIMITIVES: Dict[str, Callable[..., Any]] = {
    "add": add,
    "subtract": sub,
    "multiply": mul,
    "divide": div,
    "negate": neg,
    "exp": exp,
    "log": log,
    "power": power,
    "abs": absolute,
    "digamma": digamma,
    "tanh": tanh,
    "sigmoid": sigmoid,
    "clip": clip,
    "sum": sum,
    "sqnorm": sqnorm,
    "matmul": matmul,
    "dot": dot,
    "transpose": transpose,
    "reshape": reshape,
    "getitem": getitem,
    "stack": stack,
    "log_normalize": log_normalize,
    "normalize_log_probs": normalize_log_probs,
}


def apply(name: str, *args, **kwargs):
    """
    Evaluate a primitive by name.

    Raises:
        UnsupportedPrimitiveError: If the name is not a registered primitive
    """
    fn = PRIMITIVES.get(name)
    if fn is None:
        raise UnsupportedPrimitiveError(f"unsupported primitive: {name}")
    return fn(*args, **kwargs)


def _install_operators() -> None:
    Tensor.__add__ = lambda self, other: add(self, other)
    Tensor.__radd__ = lambda self, other: add(other, self)
    Tensor.__sub__ = lambda self, other: sub(self, other)
    Tensor.__rsub__ = lambda self, other: sub(other, self)
    Tensor.__mul__ = lambda self, other: mul(self, other)
    Tensor.__rmul__ = lambda self, other: mul(other, self)
    Tensor.__truediv__ = lambda self, other: div(self, other)
    Tensor.__rtruediv__ = lambda self, other: div(other, self)
    Tensor.__neg__ = lambda self: neg(self)
    Tensor.__pow__ = lambda self, p: power(self, p)
    Tensor.__abs__ = lambda self: absolute(self)
    Tensor.__matmul__ = lambda self, other: matmul(self, other)
    Tensor.__rmatmul__ = lambda self, other: matmul(other, self)
    Tensor.__getitem__ = lambda self, index: getitem(self, index)
    Tensor.T = property(lambda self: transpose(self))
    Tensor.sum = lambda self, axis=None, keepdims=False: sum(self, axis, keepdims)


_install_operators()
