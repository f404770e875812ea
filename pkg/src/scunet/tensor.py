"""Dense tensors with reverse-mode differentiation.

A `Tensor` wraps a numpy array. Operations on tensors that require gradients
record a closure that maps the output gradient to input gradients; calling
`backward()` on a scalar walks the recorded graph in reverse topological order.
"""
from __future__ import annotations

import contextlib

import numpy as np

from .errors import DimensionError, UsageError

_grad_enabled = True


@contextlib.contextmanager
def no_grad():
    """Disable graph recording inside the block (inference, optimizer updates)."""
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


def is_grad_enabled():
    return _grad_enabled


def as_array(x, dtype=None):
    if isinstance(x, Tensor):
        return x.data
    return np.asarray(x, dtype=dtype)


class Tensor:
    __array_priority__ = 100

    def __init__(self, data, requires_grad=False, _parents=(), _backward=None, name=None):
        arr = np.asarray(data)
        if arr.dtype.kind != "f":
            arr = arr.astype(np.float64)
        self.data = arr
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self.name = name
        self._parents = _parents
        self._backward = _backward

    @classmethod
    def from_op(cls, data, parents, backward):
        """Build an op result; records the graph edge only when a parent needs grads."""
        # non-tensor inputs stay in place (as None) so gradient tuples line up
        parents = tuple(p if isinstance(p, Tensor) else None for p in parents)
        if _grad_enabled and any(p is not None and p.requires_grad for p in parents):
            return cls(data, requires_grad=True, _parents=parents, _backward=backward)
        return cls(data)

    # --- basic properties -------------------------------------------------
    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def size(self):
        return self.data.size

    @property
    def is_leaf(self):
        return self._backward is None

    def numpy(self):
        return self.data

    def item(self):
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float(self.data)

    def detach(self):
        return Tensor(self.data)

    def __repr__(self):
        rg = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}, dtype={self.dtype}{rg})"

    def __len__(self):
        return len(self.data)

    # --- gradient plumbing ------------------------------------------------
    def _accumulate(self, g):
        if g.shape != self.data.shape:
            raise DimensionError(f"gradient shape {g.shape} does not match tensor shape {self.data.shape}")
        # never mutate in place: an op may hand the same array to several parents
        if self.grad is None:
            self.grad = g if g.dtype == self.data.dtype else g.astype(self.data.dtype)
        else:
            self.grad = self.grad + g

    def zero_grad(self):
        self.grad = None

    def backward(self, grad=None):
        """Accumulate d(self)/d(leaf) into every leaf that requires grad.

        Intermediate gradients are released once propagated, as is the graph
        itself, so each forward pass supports a single backward.
        """
        if grad is None:
            if self.data.size != 1:
                raise UsageError(f"backward() needs a scalar output, got shape {self.shape}")
            grad = np.ones_like(self.data)
        if not self.requires_grad:
            raise UsageError("backward() on a tensor that does not require grad")

        order = []
        seen = set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if p is not None and p.requires_grad and id(p) not in seen:
                    stack.append((p, False))

        self._accumulate(np.asarray(grad, dtype=self.data.dtype))
        for node in reversed(order):
            if node._backward is None:
                continue
            g = node.grad
            if g is not None:
                grads = node._backward(g)
                for p, pg in zip(node._parents, grads):
                    if p is not None and pg is not None and p.requires_grad:
                        p._accumulate(pg)
            node.grad = None
            node._backward = None
            node._parents = ()

    # --- elementwise arithmetic (same shape or python scalar) -------------
    def _check_same(self, other, op):
        if other.shape != self.shape:
            raise DimensionError(f"{op}: shapes {self.shape} and {other.shape} differ")

    def __add__(self, other):
        if isinstance(other, Tensor):
            self._check_same(other, "add")
            return Tensor.from_op(self.data + other.data, (self, other), lambda g: (g, g))
        c = float(other)
        return Tensor.from_op(self.data + c, (self,), lambda g: (g,))

    __radd__ = __add__

    def __neg__(self):
        return Tensor.from_op(-self.data, (self,), lambda g: (-g,))

    def __sub__(self, other):
        if isinstance(other, Tensor):
            self._check_same(other, "sub")
            return Tensor.from_op(self.data - other.data, (self, other), lambda g: (g, -g))
        c = float(other)
        return Tensor.from_op(self.data - c, (self,), lambda g: (g,))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Tensor):
            if other.size == 1 and self.size != 1:
                return other * self
            if self.size == 1 and other.size != 1:
                a, b = self.data, other.data
                s = a.reshape(())
                return Tensor.from_op(
                    s * b, (self, other),
                    lambda g: (np.asarray(np.sum(g * b)).reshape(a.shape).astype(a.dtype), s * g),
                )
            self._check_same(other, "mul")
            a, b = self.data, other.data
            return Tensor.from_op(a * b, (self, other), lambda g: (g * b, g * a))
        c = float(other)
        return Tensor.from_op(self.data * c, (self,), lambda g: (g * c,))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Tensor):
            raise UsageError("division by a tensor is not supported")
        return self * (1.0 / float(other))

    # --- reductions and views ---------------------------------------------
    def sum(self):
        shape = self.shape
        return Tensor.from_op(
            np.asarray(self.data.sum(), dtype=self.dtype), (self,),
            lambda g: (np.broadcast_to(g, shape).copy(),),
        )

    def mean(self):
        n = self.size
        shape = self.shape
        return Tensor.from_op(
            np.asarray(self.data.mean(), dtype=self.dtype), (self,),
            lambda g: (np.full(shape, g / n, dtype=g.dtype),),
        )

    def abs(self):
        a = self.data
        return Tensor.from_op(np.abs(a), (self,), lambda g: (g * np.sign(a),))

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        old = self.shape
        return Tensor.from_op(self.data.reshape(shape), (self,), lambda g: (g.reshape(old),))

    def __getitem__(self, idx):
        shape, dtype = self.shape, self.dtype

        def backward(g):
            full = np.zeros(shape, dtype=dtype)
            if _is_basic_index(idx):
                full[idx] += g
            else:
                np.add.at(full, idx, g)
            return (full,)

        return Tensor.from_op(np.array(self.data[idx]), (self,), backward)


def _is_basic_index(idx):
    items = idx if isinstance(idx, tuple) else (idx,)
    return all(isinstance(i, (int, np.integer, slice)) or i is None or i is Ellipsis for i in items)


def tensor(data, requires_grad=False, dtype=None):
    return Tensor(np.array(data, dtype=dtype), requires_grad=requires_grad)
