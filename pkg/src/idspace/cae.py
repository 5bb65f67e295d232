"""Sparse convolutional autoencoder over interaction images.

The encoder maps a 3x32x32 interaction image to a d-dimensional
descriptor; the decoder maps it back. Training minimizes

    C = beta * C_err + lambda * C_sparse

where C_err sums squared reconstruction error over the batch and
C_sparse sums the squared L1/L2 norm ratio of the descriptors. The
ratio is scale-invariant, so unlike a plain L1 penalty it cannot be
gamed by shrinking the encoder output and rescaling in the decoder.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import nn
from .errors import ConfigurationError, NumericsError

RATIO_EPS = 1e-8  # guard for the L2 norm in the ratio denominator


@dataclass
class CaeModel:
    """Encoder/decoder parameter sets plus training hyperparameters."""

    encoder: list[nn.LayerParams]
    decoder: list[nn.LayerParams]
    d: int
    in_shape: tuple[int, int, int] = (3, 32, 32)
    beta: float = 1.0
    lam: float = 0.0
    seed: int = 0

    def save(self, path) -> None:
        nn.save_networks(path, [(nn.ROLE_ENCODER, self.encoder),
                                (nn.ROLE_DECODER, self.decoder)])

    @classmethod
    def load(cls, path, beta: float = 1.0, lam: float = 0.0, seed: int = 0) -> "CaeModel":
        roles = dict(nn.load_networks(path))
        if nn.ROLE_ENCODER not in roles or nn.ROLE_DECODER not in roles:
            raise ConfigurationError(f"{path} does not hold an encoder/decoder pair")
        encoder, decoder = roles[nn.ROLE_ENCODER], roles[nn.ROLE_DECODER]
        d = nn.network_dim_out(encoder)
        c = encoder[0].weights.shape[1]
        model = cls(encoder, decoder, d=d, in_shape=(c, 32, 32),
                    beta=beta, lam=lam, seed=seed)
        return model


@dataclass
class TrainReport:
    """Per-epoch cost trace for one training run."""

    epochs: list[int] = field(default_factory=list)
    c_err: list[float] = field(default_factory=list)
    c_sparse: list[float] = field(default_factory=list)
    c_total: list[float] = field(default_factory=list)
    lr: list[float] = field(default_factory=list)
    wall_clock: float = 0.0

    def log(self, epoch: int, c_err: float, c_sparse: float, c_total: float,
            lr: float) -> None:
        self.epochs.append(epoch)
        self.c_err.append(c_err)
        self.c_sparse.append(c_sparse)
        self.c_total.append(c_total)
        self.lr.append(lr)

    def to_csv(self, path) -> None:
        with open(path, "w") as f:
            f.write("epoch,c_err,c_sparse,c,lr\n")
            for row in zip(self.epochs, self.c_err, self.c_sparse,
                           self.c_total, self.lr):
                f.write("%d,%r,%r,%r,%r\n" % row)


@dataclass
class TrainConfig:
    beta: float = 1.0
    lam: float = 0.0
    d: int = 24
    epochs: int = 20
    lr: float = 0.01
    batch: int = 64
    seed: int = 0
    lr_decay: float = 0.5
    lr_decay_every: int = 20  # epochs

    def validate(self) -> None:
        if self.beta < 0 or self.lam < 0:
            raise ConfigurationError("beta and lambda must be non-negative")
        if self.d < 1 or self.epochs < 1 or self.batch < 1:
            raise ConfigurationError("d, epochs and batch must be positive")
        if self.lr <= 0:
            raise ConfigurationError("learning rate must be positive")


# ---------------------------------------------------------------------------
# architecture

def build_cae(d: int = 24, seed: int = 0, in_shape: tuple[int, int, int] = (3, 32, 32),
              conv_filters: int = 16, kernel: int = 5, hidden: tuple[int, ...] = (512, 128),
              beta: float = 1.0, lam: float = 0.0, dtype=np.float32) -> CaeModel:
    """Encoder: strided conv, tanh, then a dense funnel down to d.

    Decoder mirrors the funnel back up to the flattened image and ends in a
    sigmoid so every output channel lives in (0,1). Spatial reduction uses a
    stride-2 convolution rather than pooling.
    """
    c, h, w = in_shape
    rng = np.random.default_rng(seed)
    stride, padding = 2, kernel // 2
    h2, w2 = h // stride, w // stride
    flat = conv_filters * h2 * w2

    encoder = [nn.conv_layer(rng, c, conv_filters, kernel, stride=stride,
                             padding=padding, dtype=dtype),
               nn.activation_layer("tanh")]
    prev = flat
    for width in hidden:
        encoder.append(nn.dense_layer(rng, prev, width, dtype=dtype))
        encoder.append(nn.activation_layer("tanh"))
        prev = width
    encoder.append(nn.dense_layer(rng, prev, d, dtype=dtype))

    decoder: list[nn.LayerParams] = []
    prev = d
    for width in reversed(hidden):
        decoder.append(nn.dense_layer(rng, prev, width, dtype=dtype))
        decoder.append(nn.activation_layer("tanh"))
        prev = width
    decoder.append(nn.dense_layer(rng, prev, c * h * w, dtype=dtype))
    decoder.append(nn.activation_layer("sigmoid"))

    return CaeModel(encoder, decoder, d=d, in_shape=in_shape, beta=beta,
                    lam=lam, seed=seed)


# ---------------------------------------------------------------------------
# encode / decode

def _batch_images(images) -> np.ndarray:
    from .data import InteractionImage  # local import to avoid a cycle
    if isinstance(images, InteractionImage):
        return images.stack()[None]
    arr = np.asarray(images)
    if arr.ndim == 3:
        return arr[None]
    if arr.ndim == 4:
        return arr
    raise ConfigurationError(f"expected image(s) of shape (3,32,32), got {arr.shape}")


def encode(model: CaeModel, image) -> np.ndarray:
    """Descriptor E(I). Accepts one InteractionImage/array or a batch."""
    from .data import InteractionImage
    single = isinstance(image, InteractionImage) or np.ndim(image) == 3
    batch = _batch_images(image)
    if batch.shape[1:] != model.in_shape:
        raise ConfigurationError(
            f"encoder expects {model.in_shape} images, got {batch.shape[1:]}")
    out = nn.run_forward(model.encoder, batch).output
    return out[0] if single else out


def decode(model: CaeModel, descriptor: np.ndarray):
    """Interaction image D(v) for a descriptor (or batch of descriptors)."""
    from .data import InteractionImage
    desc = np.asarray(descriptor)
    single = desc.ndim == 1
    if desc.shape[-1] != model.d:
        raise ConfigurationError(
            f"decoder expects dimension {model.d}, got {desc.shape[-1]}")
    out = nn.run_forward(model.decoder, desc).output
    c, h, w = model.in_shape
    imgs = out.reshape(-1, c, h, w)
    if single:
        a, hm, om = imgs[0]
        return InteractionImage(a, hm, om)
    return imgs


def reconstruct(model: CaeModel, batch: np.ndarray) -> np.ndarray:
    """D(E(I)) for an image batch, as raw (N,C,H,W) arrays."""
    xb = _batch_images(batch)
    desc = nn.run_forward(model.encoder, xb).output
    out = nn.run_forward(model.decoder, desc).output
    return out.reshape(xb.shape)


# ---------------------------------------------------------------------------
# costs

def sparsity_ratio(v: np.ndarray) -> float:
    """Squared L1/L2 norm ratio; 1 for one-hot vectors, dim(v) for uniform ones."""
    v = np.asarray(v, dtype=np.float64)
    l1 = np.abs(v).sum()
    l2 = np.sqrt((v * v).sum())
    return float((l1 / (l2 + RATIO_EPS)) ** 2)


def sparsity_ratio_batch(descs: np.ndarray) -> np.ndarray:
    d64 = descs.astype(np.float64, copy=False)
    l1 = np.abs(d64).sum(axis=1)
    l2 = np.sqrt((d64 * d64).sum(axis=1))
    return (l1 / (l2 + RATIO_EPS)) ** 2


def sparsity_ratio_gradient(v: np.ndarray) -> np.ndarray:
    """Analytic gradient of the squared norm ratio, with sign(0) = 0.

    d/dv_i (l1/(l2+eps))^2 = 2*l1*sign(v_i)/(l2+eps)^2
                             - 2*l1^2*v_i/(l2*(l2+eps)^3)
    """
    v = np.asarray(v)
    l1 = np.abs(v).sum()
    l2 = np.sqrt((v * v).sum())
    if l2 == 0.0:
        return np.zeros_like(v)
    denom = l2 + RATIO_EPS
    return (2.0 * l1 / denom ** 2) * np.sign(v) - (2.0 * l1 * l1 / (l2 * denom ** 3)) * v


def _sparsity_grad_batch(descs: np.ndarray) -> np.ndarray:
    l1 = np.abs(descs).sum(axis=1, keepdims=True)
    l2 = np.sqrt((descs * descs).sum(axis=1, keepdims=True))
    denom = l2 + RATIO_EPS
    safe_l2 = np.where(l2 > 0, l2, 1.0)
    grad = (2.0 * l1 / denom ** 2) * np.sign(descs) \
        - (2.0 * l1 * l1 / (safe_l2 * denom ** 3)) * descs
    return np.where(l2 > 0, grad, 0.0)


def reconstruction_cost(model: CaeModel, batch) -> float:
    """Sum over the batch of squared reconstruction error, all pixels."""
    xb = _batch_images(batch)
    if xb.shape[0] == 0:
        raise ConfigurationError("reconstruction_cost requires a nonempty batch")
    recon = reconstruct(model, xb)
    diff = (recon.astype(np.float64) - xb.astype(np.float64))
    return float((diff * diff).sum())


def sparseness_cost(model: CaeModel, batch) -> float:
    """Sum over the batch of squared descriptor norm ratios."""
    xb = _batch_images(batch)
    if xb.shape[0] == 0:
        raise ConfigurationError("sparseness_cost requires a nonempty batch")
    descs = nn.run_forward(model.encoder, xb).output
    return float(sparsity_ratio_batch(descs).sum())


def l1_penalty_cost(model: CaeModel, batch) -> float:
    """Plain L1 penalty baseline: sum of descriptor L1 norms.

    Kept for comparison only; scalar rescaling of the encoder output can
    drive it arbitrarily low, which the norm-ratio cost resists.
    """
    xb = _batch_images(batch)
    if xb.shape[0] == 0:
        raise ConfigurationError("l1_penalty_cost requires a nonempty batch")
    descs = nn.run_forward(model.encoder, xb).output
    return float(np.abs(descs.astype(np.float64)).sum())


def total_cost(model: CaeModel, batch, beta: float, lam: float) -> float:
    if beta < 0 or lam < 0:
        raise ConfigurationError("cost weights must be non-negative")
    return beta * reconstruction_cost(model, batch) + lam * sparseness_cost(model, batch)


# ---------------------------------------------------------------------------
# training

def _cost_and_grads(model: CaeModel, xb: np.ndarray, beta: float, lam: float):
    """One forward/backward pass; returns batch costs and gradient tapes."""
    enc_rec = nn.run_forward(model.encoder, xb)
    descs = enc_rec.output
    dec_rec = nn.run_forward(model.decoder, descs)
    recon = dec_rec.output.reshape(xb.shape)

    diff = recon - xb
    c_err = float((diff.astype(np.float64) ** 2).sum())
    c_sparse = float(sparsity_ratio_batch(descs).sum())

    up_dec = (2.0 * beta) * diff.reshape(dec_rec.output.shape)
    dec_tape = nn.run_backward(model.decoder, dec_rec, up_dec)
    up_enc = dec_tape.input_grad
    if lam != 0.0:
        up_enc = up_enc + lam * _sparsity_grad_batch(descs)
    enc_tape = nn.run_backward(model.encoder, enc_rec, up_enc)
    return c_err, c_sparse, enc_tape, dec_tape


def train_cae(images: np.ndarray, config: TrainConfig,
              in_shape: tuple[int, int, int] = (3, 32, 32)) -> tuple[CaeModel, TrainReport]:
    """Train a sparse CAE on a stack of interaction images (N,3,32,32).

    Deterministic given (images, config): shuffling and init derive from
    config.seed and run single-threaded. On a NaN cost the last finished
    epoch's parameters are kept and NumericsError is raised with the model
    attached as `last_good`.
    """
    config.validate()
    xb = np.asarray(images, dtype=np.float32)
    if xb.ndim != 4 or xb.shape[0] == 0:
        raise ConfigurationError("training set must be a nonempty (N,C,H,W) stack")
    model = build_cae(d=config.d, seed=config.seed, in_shape=in_shape,
                      beta=config.beta, lam=config.lam)
    report = TrainReport()
    rng = np.random.default_rng(config.seed + 1)  # shuffle stream, separate from init
    n = xb.shape[0]
    lr = config.lr
    started = time.time()
    snapshot = _snapshot(model)
    for epoch in range(config.epochs):
        if epoch > 0 and epoch % config.lr_decay_every == 0:
            lr *= config.lr_decay
        order = rng.permutation(n)
        tot_err = tot_sparse = 0.0
        for lo in range(0, n, config.batch):
            idx = order[lo:lo + config.batch]
            c_err, c_sparse, enc_tape, dec_tape = _cost_and_grads(
                model, xb[idx], config.beta, config.lam)
            if not np.isfinite(c_err) or not np.isfinite(c_sparse):
                _restore(model, snapshot)
                err = NumericsError(f"NaN cost in epoch {epoch}; restored last good epoch")
                err.last_good = model  # type: ignore[attr-defined]
                raise err
            nn.sgd_step(model.encoder, enc_tape, lr)
            nn.sgd_step(model.decoder, dec_tape, lr)
            tot_err += c_err
            tot_sparse += c_sparse
        report.log(epoch, tot_err, tot_sparse,
                   config.beta * tot_err + config.lam * tot_sparse, lr)
        snapshot = _snapshot(model)
    report.wall_clock = time.time() - started
    return model, report


def _snapshot(model: CaeModel) -> list[np.ndarray]:
    return [p.copy() for lp in model.encoder + model.decoder
            for p in (lp.weights, lp.bias)]


def _restore(model: CaeModel, snapshot: list[np.ndarray]) -> None:
    it = iter(snapshot)
    for lp in model.encoder + model.decoder:
        lp.weights[...] = next(it)
        lp.bias[...] = next(it)
