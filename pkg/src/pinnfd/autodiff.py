"""Reverse-mode automatic differentiation on numpy arrays.

A ``Var`` records the operations applied to it on a tape (the graph of
parent links); calling ``backward()`` on a scalar result walks the tape in
reverse topological order and accumulates gradients into every ``Var``
that contributed.  The operation set is deliberately small: exactly what
the network forward pass and the training losses need.

Broadcasting follows numpy; gradients are summed back onto the original
shape (``_unbroadcast``), so row-vector biases and scalar constants work
as expected.
"""

from __future__ import annotations

import numpy as np


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum ``grad`` over the axes that broadcasting expanded."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


class Var:
    """Array node on the tape.

    ``value`` is always a float64 ndarray (scalars become 0-d arrays).
    ``grad`` is allocated on demand during ``backward``.
    """

    __slots__ = ("value", "grad", "_parents", "_back")

    # Keep numpy from absorbing Var into an object array on expressions
    # like ndarray * Var; returning NotImplemented routes them to the
    # reflected operators below.
    __array_ufunc__ = None

    def __init__(self, value, parents=(), back=None):
        self.value = np.asarray(value, dtype=float)
        self.grad = None
        self._parents = parents
        self._back = back

    @property
    def shape(self):
        return self.value.shape

    def _accumulate(self, g):
        g = _unbroadcast(g, self.value.shape)
        if self.grad is None:
            self.grad = g.copy()
        else:
            self.grad += g

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other):
        other = other if isinstance(other, Var) else Var(other)
        out = Var(self.value + other.value, (self, other))
        out._back = lambda g: (self._accumulate(g), other._accumulate(g))
        return out

    __radd__ = __add__

    def __mul__(self, other):
        other = other if isinstance(other, Var) else Var(other)
        out = Var(self.value * other.value, (self, other))
        out._back = lambda g: (
            self._accumulate(g * other.value),
            other._accumulate(g * self.value),
        )
        return out

    __rmul__ = __mul__

    def __neg__(self):
        out = Var(-self.value, (self,))
        out._back = lambda g: self._accumulate(-g)
        return out

    def __sub__(self, other):
        other = other if isinstance(other, Var) else Var(other)
        out = Var(self.value - other.value, (self, other))
        out._back = lambda g: (self._accumulate(g), other._accumulate(-g))
        return out

    def __rsub__(self, other):
        return Var(other) - self

    def __truediv__(self, other):
        other = other if isinstance(other, Var) else Var(other)
        out = Var(self.value / other.value, (self, other))
        out._back = lambda g: (
            self._accumulate(g / other.value),
            other._accumulate(-g * self.value / other.value**2),
        )
        return out

    def __rtruediv__(self, other):
        return Var(other) / self

    def __pow__(self, p):
        if not isinstance(p, (int, float)):
            raise TypeError("only scalar exponents are supported")
        out = Var(self.value**p, (self,))
        out._back = lambda g: self._accumulate(g * p * self.value ** (p - 1))
        return out

    def __matmul__(self, other):
        other = other if isinstance(other, Var) else Var(other)
        if self.value.ndim != 2 or other.value.ndim != 2:
            raise ValueError("matmul is implemented for 2-d operands only")
        out = Var(self.value @ other.value, (self, other))
        out._back = lambda g: (
            self._accumulate(g @ other.value.T),
            other._accumulate(self.value.T @ g),
        )
        return out

    @property
    def T(self):
        out = Var(self.value.T, (self,))
        out._back = lambda g: self._accumulate(g.T)
        return out

    # -- nonlinearities and reductions --------------------------------

    def tanh(self):
        t = np.tanh(self.value)
        out = Var(t, (self,))
        out._back = lambda g: self._accumulate(g * (1.0 - t * t))
        return out

    def sum(self):
        out = Var(self.value.sum(), (self,))
        out._back = lambda g: self._accumulate(np.broadcast_to(g, self.value.shape))
        return out

    def mean(self):
        n = self.value.size
        out = Var(self.value.mean(), (self,))
        out._back = lambda g: self._accumulate(
            np.broadcast_to(g / n, self.value.shape)
        )
        return out

    # -- reverse pass --------------------------------------------------

    def backward(self):
        """Accumulate d(self)/d(node) into every node that feeds this one.

        Only valid on a single-element result (a loss).
        """
        if self.value.size != 1:
            raise ValueError(f"backward() needs a scalar, got shape {self.shape}")
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
            for parent in node._parents:
                if id(parent) not in seen:
                    stack.append((parent, False))
        self.grad = np.ones_like(self.value)
        for node in reversed(order):
            if node._back is not None and node.grad is not None:
                node._back(node.grad)


def tanh(x: Var) -> Var:
    return x.tanh()
