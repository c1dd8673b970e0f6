"""dense float64 tensors with a reverse-mode differentiation tape

A Tensor without a tape is a constant. Operations record onto a tape only
when at least one operand lives on it, so inference runs without recording.
"""
from dataclasses import dataclass

import numpy as np

from flashsynth.exceptions import (
    NonScalarLoss, ShapeMismatch, TapeMismatch, TapeReplayError, TensorError)


@dataclass
class TapeNode:
    parents: tuple
    backward: object = None
    name: str = None


class Tape(object):
    """ordered record of primitive operations, topological by construction"""

    def __init__(self):
        self.nodes = []
        self.consumed = False

    def __len__(self):
        return len(self.nodes)

    def record(self, data, parents=(), backward=None, name=None):
        if self.consumed:
            raise TapeReplayError('tape was already differentiated')
        self.nodes.append(TapeNode(tuple(parents), backward, name))
        return Tensor(data, self, len(self.nodes) - 1, name)

    def parameter(self, name, data):
        return self.record(data, (), None, name)


class Tensor(object):

    __array_priority__ = 100

    def __init__(self, data, tape=None, index=None, name=None):
        self.data = np.asarray(data, dtype=np.float64)
        self.tape = tape
        self.index = index
        self.name = name

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def item(self):
        return float(self.data.reshape(-1)[0])

    def numpy(self):
        return self.data

    def __repr__(self):
        return 'Tensor(shape=%s%s)' % (self.shape, ', taped' if self.tape is not None else '')

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __neg__(self):
        return scale(self, -1.0)

    def __getitem__(self, key):
        return select(self, key)

    def sum(self, axis=None):
        return reduce_sum(self, axis)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = shape[0]
        return reshape(self, tuple(shape))


def as_tensor(value):
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def constant(value):
    return Tensor(value)


def _tape_of(operands):
    tape = None
    for operand in operands:
        if operand.tape is None:
            continue
        if tape is None:
            tape = operand.tape
        elif operand.tape is not tape:
            raise TapeMismatch('operands were recorded on different tapes')
    return tape


def _result(data, operands, grad_fn):
    """wrap data, recording grad_fn onto the operands' tape if any"""
    tape = _tape_of(operands)
    if tape is None:
        return Tensor(data)
    parents = tuple(operand.index if operand.tape is tape else None for operand in operands)
    return tape.record(data, parents, grad_fn)


def _unbroadcast(grad, shape):
    """sum grad down to shape after numpy broadcasting"""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _broadcast_shape(op_name, first, second):
    try:
        return np.broadcast_shapes(first.shape, second.shape)
    except ValueError:
        raise ShapeMismatch(op_name, first.shape, second.shape)


# primitives


def add(first, second):
    first, second = as_tensor(first), as_tensor(second)
    _broadcast_shape('add', first, second)

    def grad_fn(grad):
        return _unbroadcast(grad, first.shape), _unbroadcast(grad, second.shape)
    return _result(first.data + second.data, (first, second), grad_fn)


def sub(first, second):
    first, second = as_tensor(first), as_tensor(second)
    _broadcast_shape('sub', first, second)

    def grad_fn(grad):
        return _unbroadcast(grad, first.shape), _unbroadcast(-grad, second.shape)
    return _result(first.data - second.data, (first, second), grad_fn)


def mul(first, second):
    """elementwise product"""
    first, second = as_tensor(first), as_tensor(second)
    _broadcast_shape('mul', first, second)

    def grad_fn(grad):
        return (_unbroadcast(grad * second.data, first.shape),
                _unbroadcast(grad * first.data, second.shape))
    return _result(first.data * second.data, (first, second), grad_fn)


def scale(tensor, factor):
    tensor = as_tensor(tensor)
    factor = float(factor)

    def grad_fn(grad):
        return (grad * factor,)
    return _result(tensor.data * factor, (tensor,), grad_fn)


def matmul(first, second):
    """matrix product of 1-D or 2-D operands, batched when the left operand is 3-D"""
    first, second = as_tensor(first), as_tensor(second)
    first_dims, second_dims = first.ndim, second.ndim
    supported = (first_dims in (1, 2) and second_dims in (1, 2)) or (
        first_dims == 3 and second_dims in (2, 3))
    inner = second.shape[0] if second_dims == 1 else second.shape[-2]
    if not supported or first.shape[-1] != inner or (
            first_dims == 3 and second_dims == 3 and first.shape[0] != second.shape[0]):
        raise ShapeMismatch('matmul', first.shape, second.shape)
    a, b = first.data, second.data

    def grad_fn(grad):
        if first_dims == 1 and second_dims == 1:
            return grad * b, grad * a
        if first_dims == 1:
            return grad @ b.T, np.outer(a, grad)
        if second_dims == 1:
            return np.outer(grad, b), a.T @ grad
        if first_dims == 2:
            return grad @ b.T, a.T @ grad
        if second_dims == 2:
            return grad @ b.T, np.einsum('bmn,bmk->nk', a, grad)
        return grad @ np.swapaxes(b, 1, 2), np.swapaxes(a, 1, 2) @ grad
    return _result(np.matmul(a, b), (first, second), grad_fn)


def tanh(tensor):
    tensor = as_tensor(tensor)
    value = np.tanh(tensor.data)

    def grad_fn(grad):
        return (grad * (1.0 - value * value),)
    return _result(value, (tensor,), grad_fn)


def _stable_sigmoid(data):
    exp_neg = np.exp(-np.abs(data))
    return np.where(data >= 0, 1.0 / (1.0 + exp_neg), exp_neg / (1.0 + exp_neg))


def sigmoid(tensor):
    tensor = as_tensor(tensor)
    value = _stable_sigmoid(tensor.data)

    def grad_fn(grad):
        return (grad * value * (1.0 - value),)
    return _result(value, (tensor,), grad_fn)


def exp(tensor):
    tensor = as_tensor(tensor)
    value = np.exp(tensor.data)

    def grad_fn(grad):
        return (grad * value,)
    return _result(value, (tensor,), grad_fn)


def log(tensor):
    tensor = as_tensor(tensor)

    def grad_fn(grad):
        return (grad / tensor.data,)
    return _result(np.log(tensor.data), (tensor,), grad_fn)


def softmax(tensor, axis=-1):
    tensor = as_tensor(tensor)
    shifted = tensor.data - tensor.data.max(axis=axis, keepdims=True)
    exps = np.exp(shifted)
    value = exps / exps.sum(axis=axis, keepdims=True)

    def grad_fn(grad):
        return (value * (grad - (grad * value).sum(axis=axis, keepdims=True)),)
    return _result(value, (tensor,), grad_fn)


def log_softmax(tensor, axis=-1):
    tensor = as_tensor(tensor)
    shifted = tensor.data - tensor.data.max(axis=axis, keepdims=True)
    value = shifted - np.log(np.exp(shifted).sum(axis=axis, keepdims=True))

    def grad_fn(grad):
        return (grad - np.exp(value) * grad.sum(axis=axis, keepdims=True),)
    return _result(value, (tensor,), grad_fn)


def reduce_sum(tensor, axis=None):
    tensor = as_tensor(tensor)
    shape = tensor.shape

    def grad_fn(grad):
        if axis is None:
            return (np.broadcast_to(grad, shape).copy(),)
        return (np.broadcast_to(np.expand_dims(grad, axis), shape).copy(),)
    return _result(tensor.data.sum(axis=axis), (tensor,), grad_fn)


def concat(tensors, axis=0):
    tensors = [as_tensor(tensor) for tensor in tensors]
    if not tensors:
        raise TensorError('concat of no tensors')
    first = tensors[0]
    for other in tensors[1:]:
        if other.ndim != first.ndim or any(
                size != other_size for dim, (size, other_size) in enumerate(
                    zip(first.shape, other.shape)) if dim != axis % first.ndim):
            raise ShapeMismatch('concat', first.shape, other.shape)
    sizes = [tensor.shape[axis] for tensor in tensors]
    boundaries = np.cumsum(sizes)[:-1]

    def grad_fn(grad):
        return tuple(np.split(grad, boundaries, axis=axis))
    return _result(np.concatenate([tensor.data for tensor in tensors], axis=axis),
                   tensors, grad_fn)


def split(tensor, sizes, axis=0):
    """list of consecutive slices with the given sizes along axis"""
    tensor = as_tensor(tensor)
    if sum(sizes) != tensor.shape[axis]:
        raise ShapeMismatch('split', tensor.shape, (sum(sizes),))
    pieces = []
    start = 0
    for size in sizes:
        key = [slice(None)] * tensor.ndim
        key[axis] = slice(start, start + size)
        pieces.append(select(tensor, tuple(key)))
        start += size
    return pieces


def stack(tensors, axis=0):
    tensors = [as_tensor(tensor) for tensor in tensors]
    for other in tensors[1:]:
        if other.shape != tensors[0].shape:
            raise ShapeMismatch('stack', tensors[0].shape, other.shape)

    def grad_fn(grad):
        return tuple(np.take(grad, index, axis=axis) for index in range(len(tensors)))
    return _result(np.stack([tensor.data for tensor in tensors], axis=axis), tensors, grad_fn)


def reshape(tensor, shape):
    tensor = as_tensor(tensor)
    original = tensor.shape
    try:
        value = tensor.data.reshape(shape)
    except ValueError:
        raise ShapeMismatch('reshape', original, shape)

    def grad_fn(grad):
        return (grad.reshape(original),)
    return _result(value, (tensor,), grad_fn)


def transpose(tensor, axes=None):
    tensor = as_tensor(tensor)
    if axes is None:
        axes = tuple(reversed(range(tensor.ndim)))
    inverse = np.argsort(axes)

    def grad_fn(grad):
        return (np.transpose(grad, inverse),)
    return _result(np.transpose(tensor.data, axes), (tensor,), grad_fn)


def select(tensor, key):
    """numpy indexing, basic or advanced; repeated indices accumulate gradient"""
    tensor = as_tensor(tensor)
    try:
        value = tensor.data[key]
    except IndexError:
        raise ShapeMismatch('select', tensor.shape, np.shape(key))

    def grad_fn(grad):
        full = np.zeros(tensor.shape)
        np.add.at(full, key, grad)
        return (full,)
    return _result(np.array(value, dtype=np.float64), (tensor,), grad_fn)


def embedding_lookup(table, indices):
    """rows of table for integer indices of any shape"""
    table = as_tensor(table)
    indices = np.asarray(indices, dtype=np.int64)
    if table.ndim != 2 or (indices.size and (indices.min() < 0 or indices.max() >= table.shape[0])):
        raise ShapeMismatch('embedding_lookup', table.shape, indices.shape)
    return select(table, indices)


def backward(loss, store=None):
    """accumulate d loss / d parameter into store.grads, return gradients by name"""
    if loss.size != 1:
        raise NonScalarLoss('loss has shape %s' % (loss.shape,))
    tape = loss.tape
    if tape is None:
        return {}
    if tape.consumed:
        raise TapeReplayError('backward already ran on this tape')
    tape.consumed = True
    grads = [None] * (loss.index + 1)
    grads[loss.index] = np.ones(loss.shape)
    named = {}
    for index in range(loss.index, -1, -1):
        grad = grads[index]
        if grad is None:
            continue
        grads[index] = None
        node = tape.nodes[index]
        if node.name is not None:
            named[node.name] = named[node.name] + grad if node.name in named else grad
        if node.backward is None:
            continue
        for parent, parent_grad in zip(node.parents, node.backward(grad)):
            if parent is None or parent_grad is None:
                continue
            grads[parent] = parent_grad if grads[parent] is None else grads[parent] + parent_grad
    if store is not None:
        for name, grad in named.items():
            store.grads[name] += grad.reshape(store.grads[name].shape)
    return named
