"""Minimal deterministic neural-network substrate.

Tensors are plain numpy arrays (row-major). The layer menu is fixed:
2-D convolution, dense, and elementwise activations (tanh/sigmoid), with
hand-written reverse-mode gradients and plain SGD. Training runs in
float32; gradient checking uses float64 networks built the same way.

Nothing here broadcasts silently: every shape mismatch raises
ConfigurationError.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ConfigurationError, FormatError, NumericsError, UsageError

KIND_CONV = "convolution"
KIND_DENSE = "dense"
KIND_ACTIVATION = "activation"

ACTIVATIONS = ("tanh", "sigmoid")

# Model file format ("IDSM"): one or more network records back to back.
# Record layout, all integers little-endian:
#   magic "IDSM", version u32, role u8, layer count u32, then per layer:
#   kind tag u8 (1=convolution 2=dense 3=activation),
#   kind hyperparameters (conv: stride u32, padding u32; activation: name u8),
#   weights tensor, bias tensor (each: ndim u32, dims u32 each, f32 data).
MAGIC = b"IDSM"
FORMAT_VERSION = 1
ROLE_GENERIC = 0
ROLE_ENCODER = 1
ROLE_DECODER = 2
ROLE_INFERENCE = 3

_KIND_TAGS = {KIND_CONV: 1, KIND_DENSE: 2, KIND_ACTIVATION: 3}
_TAG_KINDS = {v: k for k, v in _KIND_TAGS.items()}
_ACT_TAGS = {"tanh": 1, "sigmoid": 2}
_TAG_ACTS = {v: k for k, v in _ACT_TAGS.items()}


@dataclass
class LayerParams:
    """One layer of a network: parameters plus its fixed hyperparameters."""

    kind: str
    weights: np.ndarray
    bias: np.ndarray
    stride: int = 1
    padding: int = 0
    activation: str = ""

    @property
    def n_params(self) -> int:
        return self.weights.size + self.bias.size


@dataclass
class GradientTape:
    """Per-parameter gradients aligned 1:1 with a layer list."""

    weight_grads: list[np.ndarray]
    bias_grads: list[np.ndarray]
    input_grad: np.ndarray

    def is_finite(self) -> bool:
        for g in self.weight_grads + self.bias_grads:
            if g.size and not np.all(np.isfinite(g)):
                return False
        return True


@dataclass
class ForwardRecord:
    """Activations captured during run_forward, consumed by run_backward."""

    layers_id: int
    input: np.ndarray
    outputs: list[np.ndarray] = field(default_factory=list)
    caches: list[object] = field(default_factory=list)

    @property
    def output(self) -> np.ndarray:
        return self.outputs[-1] if self.outputs else self.input


def check_finite(x: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(x)):
        raise NumericsError(f"non-finite values in {what}")


# ---------------------------------------------------------------------------
# layer constructors

def conv_layer(rng: np.random.Generator, in_channels: int, out_channels: int,
               kernel: int, stride: int = 1, padding: int = 0,
               dtype=np.float32) -> LayerParams:
    """Convolution layer with Glorot-uniform weights and zero bias."""
    fan_in = in_channels * kernel * kernel
    fan_out = out_channels * kernel * kernel
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    w = rng.uniform(-limit, limit, size=(out_channels, in_channels, kernel, kernel))
    return LayerParams(KIND_CONV, w.astype(dtype), np.zeros(out_channels, dtype=dtype),
                       stride=stride, padding=padding)


def dense_layer(rng: np.random.Generator, in_dim: int, out_dim: int,
                dtype=np.float32) -> LayerParams:
    limit = np.sqrt(6.0 / (in_dim + out_dim))
    w = rng.uniform(-limit, limit, size=(out_dim, in_dim))
    return LayerParams(KIND_DENSE, w.astype(dtype), np.zeros(out_dim, dtype=dtype))


def activation_layer(name: str) -> LayerParams:
    if name not in ACTIVATIONS:
        raise ConfigurationError(f"unsupported activation {name!r}")
    empty = np.zeros(0, dtype=np.float32)
    return LayerParams(KIND_ACTIVATION, empty, empty, activation=name)


# ---------------------------------------------------------------------------
# forward ops

def _as_batch(x: np.ndarray, ndim_single: int):
    """Return (batched view, was_single). Only adds a leading axis."""
    if x.ndim == ndim_single:
        return x[None], True
    if x.ndim == ndim_single + 1:
        return x, False
    raise ConfigurationError(
        f"expected {ndim_single}-D or {ndim_single + 1}-D input, got shape {x.shape}")


def _conv_geometry(params: LayerParams, in_shape) -> tuple[int, int]:
    o, c, k, _ = params.weights.shape
    n, cin, h, w = in_shape
    if cin != c:
        raise ConfigurationError(
            f"conv expects {c} input channels, got {cin}")
    s, p = params.stride, params.padding
    h_out = (h + 2 * p - k) // s + 1
    w_out = (w + 2 * p - k) // s + 1
    if h_out <= 0 or w_out <= 0:
        raise ConfigurationError(
            f"conv output dims non-positive for input {h}x{w}, kernel {k}, "
            f"stride {s}, padding {p}")
    return h_out, w_out


def _im2col(x: np.ndarray, k: int, stride: int, padding: int) -> np.ndarray:
    """(N,C,H,W) -> columns (N, H_out*W_out, C*k*k), zero padding."""
    n, c, _, _ = x.shape
    if padding:
        x = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    win = sliding_window_view(x, (k, k), axis=(2, 3))[:, :, ::stride, ::stride]
    h_out, w_out = win.shape[2], win.shape[3]
    cols = win.transpose(0, 2, 3, 1, 4, 5).reshape(n, h_out * w_out, c * k * k)
    return np.ascontiguousarray(cols)


def conv2d_forward(x: np.ndarray, params: LayerParams) -> np.ndarray:
    """Strided 2-D cross-correlation with zero padding.

    Accepts (C,H,W) or (N,C,H,W); output has matching rank.
    """
    if params.kind != KIND_CONV:
        raise ConfigurationError("conv2d_forward requires a convolution layer")
    xb, single = _as_batch(x, 3)
    out, _ = _conv_forward_cached(xb, params)
    return out[0] if single else out


def _conv_forward_cached(xb: np.ndarray, params: LayerParams):
    h_out, w_out = _conv_geometry(params, xb.shape)
    o, c, k, _ = params.weights.shape
    cols = _im2col(xb, k, params.stride, params.padding)
    w_mat = params.weights.reshape(o, c * k * k)
    out = cols @ w_mat.T + params.bias
    out = out.transpose(0, 2, 1).reshape(xb.shape[0], o, h_out, w_out)
    return out, cols


def dense_forward(x: np.ndarray, params: LayerParams) -> np.ndarray:
    """Affine map W x + b. Multi-dim inputs are flattened row-major.

    Accepts a single sample of any shape whose element count matches in_dim,
    or a batch (N, ...) of such samples.
    """
    if params.kind != KIND_DENSE:
        raise ConfigurationError("dense_forward requires a dense layer")
    out_dim, in_dim = params.weights.shape
    if int(np.prod(x.shape)) == in_dim:
        flat = x.reshape(1, in_dim)
        return (flat @ params.weights.T + params.bias)[0]
    if x.ndim >= 2 and int(np.prod(x.shape[1:])) == in_dim:
        flat = x.reshape(x.shape[0], in_dim)
        return flat @ params.weights.T + params.bias
    raise ConfigurationError(
        f"dense layer expects {in_dim} inputs, got shape {x.shape}")


def activation_forward(x: np.ndarray, name: str) -> np.ndarray:
    """Elementwise tanh or logistic sigmoid."""
    if name == "tanh":
        return np.tanh(x)
    if name == "sigmoid":
        # computed via tanh for symmetric overflow behavior
        return 0.5 * (np.tanh(0.5 * x) + 1.0)
    raise ConfigurationError(f"unsupported activation {name!r}")


# ---------------------------------------------------------------------------
# network forward/backward

def run_forward(layers: list[LayerParams], x: np.ndarray) -> ForwardRecord:
    """Run the network, recording what backward needs.

    The input is cast to the dtype of the first parameterized layer.
    """
    dtype = np.float32
    for lp in layers:
        if lp.weights.size:
            dtype = lp.weights.dtype
            break
    cur = np.asarray(x, dtype=dtype)
    rec = ForwardRecord(layers_id=id(layers), input=cur)
    for lp in layers:
        if lp.kind == KIND_CONV:
            xb, single = _as_batch(cur, 3)
            out, cols = _conv_forward_cached(xb, lp)
            rec.caches.append((xb.shape, cols, single))
            cur = out[0] if single else out
        elif lp.kind == KIND_DENSE:
            out = dense_forward(cur, lp)
            rec.caches.append(cur.shape)
            cur = out
        elif lp.kind == KIND_ACTIVATION:
            cur = activation_forward(cur, lp.activation)
            rec.caches.append(cur)  # derivative comes from the output
        else:
            raise ConfigurationError(f"unknown layer kind {lp.kind!r}")
        rec.outputs.append(cur)
    return rec


def _conv_backward(lp: LayerParams, cache, grad_out: np.ndarray):
    in_shape, cols, single = cache
    gb, _ = _as_batch(grad_out, 3)
    n, cin, h, w = in_shape
    o, c, k, _ = lp.weights.shape
    s, p = lp.stride, lp.padding
    h_out, w_out = gb.shape[2], gb.shape[3]

    g_mat = gb.reshape(n, o, h_out * w_out).transpose(0, 2, 1)  # N,HW,O
    dw = g_mat.reshape(-1, o).T @ cols.reshape(-1, c * k * k)
    db = gb.sum(axis=(0, 2, 3))

    # scatter dcols back onto the padded input with k*k strided adds
    dcols = g_mat @ lp.weights.reshape(o, -1)            # N,HW,Ckk
    dcols = dcols.reshape(n, h_out, w_out, c, k, k).transpose(0, 3, 1, 2, 4, 5)
    dx_pad = np.zeros((n, cin, h + 2 * p, w + 2 * p), dtype=gb.dtype)
    for i in range(k):
        for j in range(k):
            dx_pad[:, :, i:i + s * h_out:s, j:j + s * w_out:s] += dcols[:, :, :, :, i, j]
    dx = dx_pad[:, :, p:p + h, p:p + w] if p else dx_pad
    if single:
        dx = dx[0]
    return dw.reshape(lp.weights.shape), db, dx


def run_backward(layers: list[LayerParams], record: ForwardRecord,
                 upstream_grad: np.ndarray) -> GradientTape:
    """Reverse-mode sweep. `record` must come from run_forward on `layers`."""
    if record.layers_id != id(layers) or len(record.outputs) != len(layers):
        raise UsageError("backward requires the forward record of this network")
    g = np.asarray(upstream_grad, dtype=record.output.dtype)
    if g.shape != record.output.shape:
        raise ConfigurationError(
            f"upstream gradient shape {g.shape} != output shape {record.output.shape}")

    n_layers = len(layers)
    w_grads: list[np.ndarray] = [None] * n_layers  # type: ignore[list-item]
    b_grads: list[np.ndarray] = [None] * n_layers  # type: ignore[list-item]
    for idx in range(n_layers - 1, -1, -1):
        lp = layers[idx]
        cache = record.caches[idx]
        if lp.kind == KIND_CONV:
            dw, db, g = _conv_backward(lp, cache, g)
            w_grads[idx], b_grads[idx] = dw, db
        elif lp.kind == KIND_DENSE:
            in_shape = cache
            x_in = record.input if idx == 0 else record.outputs[idx - 1]
            if len(in_shape) >= 2 and int(np.prod(in_shape[1:])) == lp.weights.shape[1] \
                    and int(np.prod(in_shape)) != lp.weights.shape[1]:
                flat = x_in.reshape(in_shape[0], -1)
                w_grads[idx] = g.T @ flat
                b_grads[idx] = g.sum(axis=0)
                g = (g @ lp.weights).reshape(in_shape)
            else:
                flat = x_in.reshape(-1)
                w_grads[idx] = np.outer(g, flat)
                b_grads[idx] = g.copy()
                g = (g @ lp.weights).reshape(in_shape)
        else:  # activation
            y = cache
            if lp.activation == "tanh":
                g = g * (1.0 - y * y)
            else:  # sigmoid
                g = g * y * (1.0 - y)
            empty = np.zeros(0, dtype=g.dtype)
            w_grads[idx], b_grads[idx] = empty, empty
    return GradientTape(w_grads, b_grads, g)


def sgd_step(layers: list[LayerParams], tape: GradientTape, lr: float) -> list[LayerParams]:
    """In-place SGD update: theta <- theta - lr * grad."""
    if lr <= 0:
        raise ConfigurationError("learning rate must be positive")
    if len(tape.weight_grads) != len(layers):
        raise ConfigurationError("tape does not match network layout")
    if not tape.is_finite():
        raise NumericsError("NaN/Inf in gradients; aborting update")
    for lp, dw, db in zip(layers, tape.weight_grads, tape.bias_grads):
        if lp.weights.size:
            if dw.shape != lp.weights.shape or db.shape != lp.bias.shape:
                raise ConfigurationError("gradient shapes do not mirror parameters")
            lp.weights -= lr * dw
            lp.bias -= lr * db
    return layers


def network_dim_out(layers: list[LayerParams]) -> int:
    """Output dimension of the final dense layer."""
    for lp in reversed(layers):
        if lp.kind == KIND_DENSE:
            return lp.weights.shape[0]
    raise ConfigurationError("network has no dense layer")


# ---------------------------------------------------------------------------
# serialization

def _write_tensor(out: list[bytes], arr: np.ndarray) -> None:
    out.append(struct.pack("<I", arr.ndim))
    for d in arr.shape:
        out.append(struct.pack("<I", d))
    out.append(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def _network_bytes(layers: list[LayerParams], role: int) -> bytes:
    out: list[bytes] = [MAGIC, struct.pack("<I", FORMAT_VERSION),
                        struct.pack("<B", role), struct.pack("<I", len(layers))]
    for lp in layers:
        out.append(struct.pack("<B", _KIND_TAGS[lp.kind]))
        if lp.kind == KIND_CONV:
            out.append(struct.pack("<II", lp.stride, lp.padding))
        elif lp.kind == KIND_ACTIVATION:
            out.append(struct.pack("<B", _ACT_TAGS[lp.activation]))
        _write_tensor(out, lp.weights)
        _write_tensor(out, lp.bias)
    return b"".join(out)


class _Reader:
    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise FormatError("truncated model file")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u8(self) -> int:
        return struct.unpack("<B", self.take(1))[0]


def _read_tensor(r: _Reader) -> np.ndarray:
    ndim = r.u32()
    if ndim > 8:
        raise FormatError(f"implausible tensor rank {ndim}")
    shape = tuple(r.u32() for _ in range(ndim))
    count = int(np.prod(shape)) if shape else (0 if ndim == 0 else 1)
    if ndim == 0:
        return np.zeros(0, dtype=np.float32)
    raw = r.take(4 * count)
    return np.frombuffer(raw, dtype="<f4").reshape(shape).astype(np.float32)


def _read_network(r: _Reader) -> tuple[int, list[LayerParams]]:
    if r.take(4) != MAGIC:
        raise FormatError("bad magic bytes; not an IDSM model file")
    version = r.u32()
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported IDSM version {version}")
    role = r.u8()
    n_layers = r.u32()
    layers = []
    for _ in range(n_layers):
        tag = r.u8()
        if tag not in _TAG_KINDS:
            raise FormatError(f"unknown layer kind tag {tag}")
        kind = _TAG_KINDS[tag]
        stride = padding = 0
        act = ""
        if kind == KIND_CONV:
            stride, padding = struct.unpack("<II", r.take(8))
        elif kind == KIND_ACTIVATION:
            act_tag = r.u8()
            if act_tag not in _TAG_ACTS:
                raise FormatError(f"unknown activation tag {act_tag}")
            act = _TAG_ACTS[act_tag]
        weights = _read_tensor(r)
        bias = _read_tensor(r)
        layers.append(LayerParams(kind, weights, bias, stride=stride,
                                  padding=padding, activation=act))
    return role, layers


def save_networks(path, networks: list[tuple[int, list[LayerParams]]]) -> None:
    """Write role-tagged network records to one IDSM file."""
    blob = b"".join(_network_bytes(layers, role) for role, layers in networks)
    with open(path, "wb") as f:
        f.write(blob)


def load_networks(path) -> list[tuple[int, list[LayerParams]]]:
    with open(path, "rb") as f:
        data = f.read()
    if not data:
        raise FormatError(f"empty model file: {path}")
    r = _Reader(data)
    networks = []
    while r.pos < len(data):
        networks.append(_read_network(r))
    return networks
