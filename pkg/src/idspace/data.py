"""Interaction images, datasets, and their on-disk formats.

An interaction image is a 3-channel 32x32 field: total appearance, hand
region mask, object region mask, all in [0,1]. Datasets serialize to the
"IIDS" binary format; single channels export as PGM and channel
composites as PPM for eyeballing.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, FormatError

IMAGE_SIZE = 32

DATASET_MAGIC = b"IIDS"
DATASET_VERSION = 1


@dataclass
class InteractionImage:
    """One normalized hand-object interaction sample.

    label is the interaction-type id (None for negatives / unlabeled);
    pose is optional (rotation, dy, dx) metadata from generation.
    """

    appearance: np.ndarray
    hand_mask: np.ndarray
    object_mask: np.ndarray
    label: int | None = None
    pose: tuple[float, float, float] | None = None

    def stack(self) -> np.ndarray:
        return np.stack([self.appearance, self.hand_mask, self.object_mask])

    @classmethod
    def from_array(cls, arr: np.ndarray, label: int | None = None,
                   pose=None) -> "InteractionImage":
        if arr.shape != (3, IMAGE_SIZE, IMAGE_SIZE):
            raise ConfigurationError(f"expected (3,32,32) array, got {arr.shape}")
        return cls(arr[0].copy(), arr[1].copy(), arr[2].copy(), label=label, pose=pose)

    def object_appearance(self) -> np.ndarray:
        """Appearance with everything outside the object mask zeroed."""
        return (self.appearance * self.object_mask).astype(np.float32)

    def validate(self) -> None:
        for name, ch in (("appearance", self.appearance),
                         ("hand_mask", self.hand_mask),
                         ("object_mask", self.object_mask)):
            if ch.shape != (IMAGE_SIZE, IMAGE_SIZE):
                raise ConfigurationError(f"{name} must be 32x32, got {ch.shape}")
            if not np.all(np.isfinite(ch)):
                raise ConfigurationError(f"{name} contains non-finite values")
            if ch.min() < 0.0 or ch.max() > 1.0:
                raise ConfigurationError(f"{name} values outside [0,1]")

    def __eq__(self, other) -> bool:
        if not isinstance(other, InteractionImage):
            return NotImplemented
        return (np.array_equal(self.stack(), other.stack())
                and self.label == other.label and self.pose == other.pose)


@dataclass
class Dataset:
    """Ordered collection of interaction images with its generation seed.

    Equality (and the file round trip) covers the items; the split tag and
    seed are bookkeeping carried by the experiment manifest.
    """

    items: list[InteractionImage] = field(default_factory=list)
    split: str = "train"
    seed: int = 0

    def __len__(self) -> int:
        return len(self.items)

    def stack(self) -> np.ndarray:
        return np.stack([im.stack() for im in self.items])

    def labels(self) -> np.ndarray:
        return np.array([-1 if im.label is None else im.label
                         for im in self.items], dtype=np.int64)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.items == other.items


# ---------------------------------------------------------------------------
# pose normalization

def _rigid_resample(channel: np.ndarray, rotation: float,
                    translation: tuple[float, float]) -> np.ndarray:
    """Rotate about the image center, then translate; nearest neighbor,
    zeros outside."""
    h, w = channel.shape
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    ys, xs = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    # invert: undo translation, then rotate back around the center
    yt = ys - translation[0] - cy
    xt = xs - translation[1] - cx
    cos, sin = np.cos(rotation), np.sin(rotation)
    src_y = cos * yt + sin * xt + cy
    src_x = -sin * yt + cos * xt + cx
    iy = np.rint(src_y).astype(np.int64)
    ix = np.rint(src_x).astype(np.int64)
    inside = (iy >= 0) & (iy < h) & (ix >= 0) & (ix < w)
    out = np.zeros_like(channel)
    out[inside] = channel[iy[inside], ix[inside]]
    return out


def normalize_pose(image: InteractionImage, rotation: float,
                   translation: tuple[float, float]) -> InteractionImage:
    """Rigid transform of all three channels; masks re-binarized at 0.5."""
    a = _rigid_resample(image.appearance, rotation, translation)
    hm = _rigid_resample(image.hand_mask, rotation, translation)
    om = _rigid_resample(image.object_mask, rotation, translation)
    hm = (hm >= 0.5).astype(np.float32)
    om = (om >= 0.5).astype(np.float32)
    return InteractionImage(a.astype(np.float32), hm, om,
                            label=image.label, pose=image.pose)


def rotate_channel(channel: np.ndarray, rotation: float) -> np.ndarray:
    """Pure rotation of one channel (used by the rotation sweep)."""
    return _rigid_resample(channel, rotation, (0.0, 0.0))


# ---------------------------------------------------------------------------
# IIDS dataset files

def save_dataset(dataset: Dataset, path) -> None:
    out: list[bytes] = [DATASET_MAGIC, struct.pack("<I", DATASET_VERSION),
                        struct.pack("<I", len(dataset.items))]
    for im in dataset.items:
        label = -1 if im.label is None else int(im.label)
        pose = im.pose if im.pose is not None else (0.0, 0.0, 0.0)
        out.append(struct.pack("<i", label))
        out.append(struct.pack("<3f", *pose))
        out.append(np.ascontiguousarray(im.stack(), dtype="<f4").tobytes())
    with open(path, "wb") as f:
        f.write(b"".join(out))


def load_dataset(path, split: str = "train", seed: int = 0) -> Dataset:
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < 12 or data[:4] != DATASET_MAGIC:
        raise FormatError(f"{path}: not an IIDS dataset file")
    version = struct.unpack("<I", data[4:8])[0]
    if version != DATASET_VERSION:
        raise FormatError(f"{path}: unsupported IIDS version {version}")
    count = struct.unpack("<I", data[8:12])[0]
    item_size = 4 + 12 + 3 * IMAGE_SIZE * IMAGE_SIZE * 4
    if len(data) != 12 + count * item_size:
        raise FormatError(f"{path}: truncated or oversized dataset file")
    items = []
    pos = 12
    for _ in range(count):
        label = struct.unpack("<i", data[pos:pos + 4])[0]
        pose = struct.unpack("<3f", data[pos + 4:pos + 16])
        pos += 16
        arr = np.frombuffer(data[pos:pos + item_size - 16], dtype="<f4")
        pos += item_size - 16
        arr = arr.reshape(3, IMAGE_SIZE, IMAGE_SIZE).astype(np.float32)
        items.append(InteractionImage(arr[0], arr[1], arr[2],
                                      label=None if label < 0 else label,
                                      pose=tuple(float(p) for p in pose)))
    return Dataset(items, split=split, seed=seed)


# ---------------------------------------------------------------------------
# PGM / PPM export

def _quantize(channel: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(channel * 255.0), 0, 255).astype(np.uint8)


def save_pgm(path, channel: np.ndarray) -> None:
    """Binary PGM (P5): text header, bit-exact 8-bit payload."""
    q = _quantize(np.asarray(channel, dtype=np.float64))
    h, w = q.shape
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (w, h))
        f.write(q.tobytes())


def save_ppm(path, channels: np.ndarray) -> None:
    """Binary PPM (P6) of a 3-channel composite (channels first)."""
    arr = np.asarray(channels, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[0] != 3:
        raise ConfigurationError(f"PPM export expects (3,H,W), got {arr.shape}")
    q = _quantize(arr).transpose(1, 2, 0)
    h, w, _ = q.shape
    with open(path, "wb") as f:
        f.write(b"P6\n%d %d\n255\n" % (w, h))
        f.write(np.ascontiguousarray(q).tobytes())


def load_pgm(path) -> np.ndarray:
    """Read a binary PGM back to floats in [0,1]."""
    with open(path, "rb") as f:
        data = f.read()
    parts = data.split(b"\n", 3)
    if len(parts) < 4 or parts[0] != b"P5":
        raise FormatError(f"{path}: not a binary PGM file")
    w, h = (int(t) for t in parts[1].split())
    maxval = int(parts[2])
    payload = parts[3]
    if len(payload) < w * h:
        raise FormatError(f"{path}: truncated PGM payload")
    img = np.frombuffer(payload[:w * h], dtype=np.uint8).reshape(h, w)
    return (img.astype(np.float32) / float(maxval))
