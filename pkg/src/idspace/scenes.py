"""Deterministic synthetic scenes of hand-object interactions.

Each of the 12 interaction prototypes renders a parametric object and a
parametric hand (palm ellipse plus finger capsules) in a canonical
relative pose. Scenes are that pose with per-sample jitter (scale +-15%,
translation +-2 px, rotation +-10 deg) plus mild shape-parameter wiggle,
rasterized analytically so the masks are exact. The appearance channel is
grayscale: dim noisy background, bright object tone, distinct hand tone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data import IMAGE_SIZE, InteractionImage
from .errors import GenerationError

N_PROTOTYPES = 12

PROTOTYPE_NAMES = (
    "mug_handle", "mug_bottom", "cutter_power", "cutter_pinch",
    "scissors", "pen", "bowl_rim", "bottle_neck",
    "pan_handle", "knob_pinch", "slab_side", "spray_trigger",
)

# grayscale tone bands; hand and object stay disjoint so texture is
# nuisance variation, not the class signal
BG_LO, BG_HI = 0.04, 0.12
OBJ_TONE_LO, OBJ_TONE_HI = 0.55, 0.80
HAND_TONE_LO, HAND_TONE_HI = 0.30, 0.44
TONE_NOISE = 0.05

SCALE_JITTER = 0.15
TRANSLATION_JITTER = 2.0
ROTATION_JITTER = math.radians(10.0)


@dataclass
class Scene:
    """A rendered scene: appearance, exact masks, and ground-truth geometry.

    geometry carries the jitter transform and named part-region boxes
    (scene coordinates, (y0,x0,y1,x1)) used by the evaluation drivers.
    """

    appearance: np.ndarray
    hand_mask: np.ndarray
    object_mask: np.ndarray
    label: int
    geometry: dict = field(default_factory=dict)

    @property
    def size(self) -> tuple[int, int]:
        return self.appearance.shape


def rng_for(*key: int) -> np.random.Generator:
    """Deterministic generator for a tuple of integers."""
    return np.random.default_rng(np.random.SeedSequence(list(key)))


# ---------------------------------------------------------------------------
# shape primitives: membership functions over canonical (x, y) grids

def disk(cx, cy, r):
    return lambda x, y: (x - cx) ** 2 + (y - cy) ** 2 <= r * r


def ring(cx, cy, r_out, r_in):
    def member(x, y):
        d2 = (x - cx) ** 2 + (y - cy) ** 2
        return (d2 <= r_out * r_out) & (d2 >= r_in * r_in)
    return member


def ellipse(cx, cy, rx, ry, angle=0.0):
    c, s = math.cos(angle), math.sin(angle)

    def member(x, y):
        xr = c * (x - cx) + s * (y - cy)
        yr = -s * (x - cx) + c * (y - cy)
        return (xr / rx) ** 2 + (yr / ry) ** 2 <= 1.0
    return member


def rbox(cx, cy, w, h, angle=0.0):
    c, s = math.cos(angle), math.sin(angle)

    def member(x, y):
        xr = c * (x - cx) + s * (y - cy)
        yr = -s * (x - cx) + c * (y - cy)
        return (np.abs(xr) <= w / 2.0) & (np.abs(yr) <= h / 2.0)
    return member


def capsule(x0, y0, x1, y1, r):
    dx, dy = x1 - x0, y1 - y0
    length2 = dx * dx + dy * dy

    def member(x, y):
        if length2 == 0.0:
            return (x - x0) ** 2 + (y - y0) ** 2 <= r * r
        t = np.clip(((x - x0) * dx + (y - y0) * dy) / length2, 0.0, 1.0)
        px, py = x0 + t * dx, y0 + t * dy
        return (x - px) ** 2 + (y - py) ** 2 <= r * r
    return member


def taper(x0, y0, x1, y1, r0, r1):
    """Capsule whose radius shrinks linearly from r0 to r1 (blade-like)."""
    dx, dy = x1 - x0, y1 - y0
    length2 = dx * dx + dy * dy

    def member(x, y):
        t = np.clip(((x - x0) * dx + (y - y0) * dy) / max(length2, 1e-9), 0.0, 1.0)
        px, py = x0 + t * dx, y0 + t * dy
        r = r0 + (r1 - r0) * t
        return (x - px) ** 2 + (y - py) ** 2 <= r * r
    return member


def halfplane(nx, ny, offset):
    """Points with nx*x + ny*y >= offset."""
    return lambda x, y: nx * x + ny * y >= offset


def intersect(*members):
    def member(x, y):
        out = members[0](x, y)
        for m in members[1:]:
            out = out & m(x, y)
        return out
    return member


def union_mask(members, x, y) -> np.ndarray:
    out = np.zeros(x.shape, dtype=bool)
    for m in members:
        out |= m(x, y)
    return out


# ---------------------------------------------------------------------------
# prototype geometry
#
# Each builder returns (object_shapes, hand_shapes, regions) in canonical
# coordinates (origin at scene center, x right, y down, units ~ pixels at
# jitter scale 1). `w` wiggles shape parameters by a few percent so each
# type still has intra-type shape variation.

def _wiggle(rng: np.random.Generator, lo: float = 0.94, hi: float = 1.06):
    return lambda v: v * rng.uniform(lo, hi)


def _proto_mug(rng, hand_on_handle: bool):
    w = _wiggle(rng)
    body_w, body_h = w(11.0), w(13.0)
    body = rbox(-4.0, 0.0, body_w, body_h)
    handle = ring(3.5, 0.0, w(4.6), w(2.6))
    obj = [body, handle]
    regions = {
        "handle": (-1.5, -6.0, 9.0, 6.0),     # x0,y0,x1,y1 canonical
        "bottom": (-10.5, 3.0, 2.0, 9.5),
    }
    if hand_on_handle:
        hand = [
            ellipse(10.2, 0.5, w(5.6), w(6.4), 0.15),
            capsule(9.0, -2.8, 2.8, -2.6, w(1.5)),
            capsule(9.0, 0.0, 2.6, 0.1, w(1.5)),
            capsule(9.0, 2.8, 3.0, 2.8, w(1.5)),
            capsule(9.5, -5.2, 4.2, -6.6, w(1.55)),
        ]
    else:
        hand = [
            ellipse(-3.5, 11.0, w(7.2), w(4.2), 0.0),
            capsule(-8.8, 9.6, -10.2, 2.4, w(1.55)),
            capsule(1.8, 9.6, 3.2, 2.4, w(1.55)),
            capsule(-3.5, 9.0, -3.3, 15.0, w(1.6)),
        ]
    return obj, hand, regions


def _proto_cutter_power(rng):
    w = _wiggle(rng)
    obj = [
        rbox(0.0, 3.5, w(6.5), w(13.0)),
        taper(0.0, -3.2, 1.2, -12.5, w(1.05), 0.4),
    ]
    hand = [
        ellipse(7.9, 3.8, w(5.5), w(7.0), -0.12),
        capsule(6.4, 0.2, 2.3, 0.2, w(1.6)),
        capsule(6.4, 3.7, 2.4, 3.7, w(1.6)),
        capsule(6.4, 7.2, 2.5, 7.2, w(1.6)),
        capsule(6.0, -3.0, 1.4, -4.0, w(1.6)),
    ]
    regions = {
        "grip": (-4.5, -2.0, 12.0, 10.5),
        "blade": (-2.5, -13.5, 3.0, -4.5),
    }
    return obj, hand, regions


def _proto_cutter_pinch(rng):
    w = _wiggle(rng)
    obj = [
        rbox(-2.5, 0.0, w(13.0), w(5.5)),
        taper(4.0, -0.2, 12.5, -1.0, w(0.95), 0.35),
    ]
    hand = [
        ellipse(2.0, 9.4, w(6.8), w(5.2), 0.25),
        capsule(1.6, 6.4, 0.2, 2.0, w(1.55)),
        capsule(5.2, 6.6, 4.4, 1.8, w(1.55)),
        capsule(-2.0, 7.4, -3.6, 2.4, w(1.5)),
        capsule(8.4, 8.0, 8.8, 3.4, w(1.45)),
    ]
    regions = {
        "grip": (-9.5, -3.25, 4.0, 3.25),
        "blade": (4.5, -3.5, 13.5, 1.5),
    }
    return obj, hand, regions


def _proto_scissors(rng):
    w = _wiggle(rng)
    ring_r_out, ring_r_in = w(2.9), 1.7
    obj = [
        ring(-3.4, 4.7, ring_r_out, ring_r_in),
        ring(2.4, 5.5, ring_r_out, ring_r_in),
        capsule(-2.8, 2.5, 0.0, -0.7, 0.95),
        capsule(2.0, 3.1, 0.0, -0.7, 0.95),
        disk(0.0, -0.7, w(1.3)),
        taper(0.0, -0.7, -3.0, -12.0, w(0.95), 0.3),
        taper(0.0, -0.7, 2.6, -12.5, w(0.95), 0.3),
    ]
    hand = [
        ellipse(0.4, 11.5, w(7.6), w(4.8), 0.08),
        capsule(-4.8, 9.6, -3.4, 4.5, w(1.7)),
        capsule(2.9, 10.2, 2.4, 5.3, w(1.6)),
        capsule(6.8, 9.4, 5.4, 6.2, w(1.5)),
    ]
    regions = {
        "grip": (-8.5, 1.0, 9.0, 15.5),
        "blade": (-6.5, -13.0, 5.5, -4.0),
    }
    return obj, hand, regions


def _proto_pen(rng):
    w = _wiggle(rng)
    obj = [
        capsule(-8.5, 7.0, 8.0, -7.5, w(2.35)),
        taper(8.0, -7.5, 10.4, -9.6, w(2.0), 0.3),
        disk(-5.2, 6.6, w(1.5)),  # cap nub
    ]
    hand = [
        ellipse(8.8, 2.6, w(6.6), w(5.8), -0.65),
        capsule(5.2, -1.0, 2.2, -3.2, w(1.65)),
        capsule(8.6, -1.4, 5.6, -4.0, w(1.7)),
        capsule(4.6, 2.8, 1.2, 0.8, w(1.6)),
        capsule(11.2, 5.4, 13.2, 9.6, w(1.65)),
    ]
    regions = {
        "grip": (-1.0, -7.0, 13.0, 7.5),
        "tip": (6.0, -11.0, 12.0, -6.5),
    }
    return obj, hand, regions


def _proto_bowl_rim(rng):
    w = _wiggle(rng)
    outer_r, inner_r = w(10.5), w(8.2)
    bowl = intersect(disk(-2.0, 1.0, outer_r),
                     lambda x, y: ~disk(-2.0, -0.8, inner_r)(x, y),
                     halfplane(0.0, 1.0, 0.6))
    base = rbox(-2.0, 10.6, w(7.0), 2.2)
    obj = [bowl, base]
    hand = [
        ellipse(10.0, -4.6, w(5.6), w(6.4), 0.45),
        capsule(6.6, -1.2, 5.2, 3.2, w(1.6)),
        capsule(9.8, -0.2, 8.8, 4.4, w(1.55)),
        capsule(12.9, -1.2, 12.3, 3.2, w(1.45)),
    ]
    regions = {
        "rim": (3.0, -8.5, 15.5, 5.0),
        "base": (-7.5, 7.5, 3.5, 12.5),
    }
    return obj, hand, regions


def _proto_bottle_neck(rng):
    w = _wiggle(rng)
    obj = [
        rbox(0.0, 6.0, w(10.0), w(10.5)),
        rbox(0.0, -4.5, w(3.8), 8.0),
        rbox(0.0, -9.4, w(4.8), 2.4),
    ]
    hand = [
        ellipse(7.4, -4.6, w(4.9), w(5.8), -0.2),
        capsule(6.0, -7.4, -2.6, -7.4, w(1.4)),
        capsule(6.0, -4.6, -2.8, -4.6, w(1.4)),
        capsule(6.0, -1.8, -2.6, -1.8, w(1.4)),
        capsule(6.2, -9.6, 1.4, -11.2, w(1.4)),
    ]
    regions = {
        "neck": (-5.0, -12.5, 10.5, -0.5),
        "body": (-6.0, 1.0, 6.0, 11.5),
    }
    return obj, hand, regions


def _proto_pan_handle(rng):
    w = _wiggle(rng)
    obj = [
        disk(-6.5, 0.0, w(7.6)),
        rbox(7.0, 0.0, w(11.5), w(2.8)),
    ]
    hand = [
        ellipse(9.2, 5.6, w(5.4), w(6.2), 0.1),
        capsule(5.8, 5.0, 5.8, -2.6, w(1.55)),
        capsule(9.2, 5.2, 9.2, -2.6, w(1.55)),
        capsule(12.6, 5.0, 12.6, -2.6, w(1.55)),
        capsule(5.2, 8.4, 1.2, 6.0, w(1.6)),
    ]
    regions = {
        "handle": (1.5, -4.5, 15.0, 10.5),
        "pan": (-14.5, -8.0, 0.5, 8.0),
    }
    return obj, hand, regions


def _proto_knob(rng):
    w = _wiggle(rng)
    obj = [
        disk(2.5, 0.0, w(4.4)),
        rbox(2.5, 6.2, w(11.0), 2.6),
    ]
    hand = [
        ellipse(-8.6, 0.0, w(5.8), w(6.8), 0.1),
        capsule(-5.8, -4.8, -0.6, -3.4, w(1.65)),
        capsule(-5.8, 4.6, -0.4, 3.4, w(1.65)),
        capsule(-4.8, 0.0, -1.2, 0.0, w(1.55)),
    ]
    regions = {
        "knob": (-2.5, -5.0, 7.5, 5.0),
        "plate": (-3.5, 4.5, 8.5, 8.0),
    }
    return obj, hand, regions


def _proto_slab(rng):
    w = _wiggle(rng)
    obj = [rbox(-2.5, 0.0, w(12.0), w(9.0), 0.08)]
    hand = [
        ellipse(8.2, 1.0, w(5.2), w(6.8), 0.0),
        capsule(6.8, -2.2, 3.6, -1.6, w(1.6)),
        capsule(-9.8, -3.2, -7.4, -2.8, w(1.45)),
        capsule(-10.0, 0.2, -7.6, 0.4, w(1.45)),
        capsule(-9.6, 3.4, -7.4, 3.4, w(1.45)),
    ]
    regions = {
        "face": (-8.5, -4.5, 3.5, 4.5),
        "edge": (-10.5, -4.5, -6.0, 4.5),
    }
    return obj, hand, regions


def _proto_spray(rng):
    w = _wiggle(rng)
    obj = [
        rbox(0.0, 5.5, w(8.5), w(11.5)),
        rbox(0.8, -2.2, w(4.5), 4.2),
        rbox(2.0, -6.2, w(8.0), 3.6),
        rbox(6.8, -6.2, 2.2, 1.8),
        capsule(5.0, -4.2, 6.2, -1.2, 0.9),
    ]
    hand = [
        ellipse(-8.6, 3.2, w(5.4), w(6.8), 0.15),
        capsule(-5.8, 0.2, -2.3, 0.6, w(1.55)),
        capsule(-6.0, 3.6, -2.4, 4.0, w(1.55)),
        capsule(-5.8, 7.0, -2.5, 7.4, w(1.55)),
        capsule(-6.2, -2.8, -0.4, -4.9, w(1.5)),
    ]
    regions = {
        "grip": (-12.5, -3.0, 4.5, 10.0),
        "head": (-2.5, -8.5, 8.5, -4.0),
    }
    return obj, hand, regions


_BUILDERS = (
    lambda rng: _proto_mug(rng, True),
    lambda rng: _proto_mug(rng, False),
    _proto_cutter_power,
    _proto_cutter_pinch,
    _proto_scissors,
    _proto_pen,
    _proto_bowl_rim,
    _proto_bottle_neck,
    _proto_pan_handle,
    _proto_knob,
    _proto_slab,
    _proto_spray,
)


# ---------------------------------------------------------------------------
# rendering

def generate_scene(prototype_id: int, rng_seed: int, size: int = 48,
                   include_hand: bool = True) -> Scene:
    """Render one scene deterministically from (prototype, seed)."""
    if not 0 <= prototype_id < N_PROTOTYPES:
        raise GenerationError(f"prototype_id must be in 0..11, got {prototype_id}")
    if size < IMAGE_SIZE:
        raise GenerationError(f"scene size must be >= {IMAGE_SIZE}")
    rng = rng_for(rng_seed, prototype_id)
    obj_shapes, hand_shapes, regions = _BUILDERS[prototype_id](rng)

    scale = 1.0 + rng.uniform(-SCALE_JITTER, SCALE_JITTER)
    rot = rng.uniform(-ROTATION_JITTER, ROTATION_JITTER)
    ty = rng.uniform(-TRANSLATION_JITTER, TRANSLATION_JITTER)
    tx = rng.uniform(-TRANSLATION_JITTER, TRANSLATION_JITTER)

    center = (size - 1) / 2.0
    ys, xs = np.meshgrid(np.arange(size, dtype=np.float64),
                         np.arange(size, dtype=np.float64), indexing="ij")
    # map scene pixels back into the canonical frame
    xr = xs - center - tx
    yr = ys - center - ty
    cos, sin = math.cos(rot), math.sin(rot)
    xc = (cos * xr + sin * yr) / scale
    yc = (-sin * xr + cos * yr) / scale

    object_mask = union_mask(obj_shapes, xc, yc)
    hand_mask = union_mask(hand_shapes, xc, yc) if include_hand else \
        np.zeros_like(object_mask)

    obj_tone = rng.uniform(OBJ_TONE_LO, OBJ_TONE_HI)
    hand_tone = rng.uniform(HAND_TONE_LO, HAND_TONE_HI)
    appearance = rng.uniform(BG_LO, BG_HI, size=(size, size))
    noise = rng.uniform(-TONE_NOISE, TONE_NOISE, size=(size, size))
    appearance = np.where(object_mask, obj_tone + noise, appearance)
    appearance = np.where(hand_mask, hand_tone + noise, appearance)  # hand in front
    appearance = np.clip(appearance, 0.0, 1.0).astype(np.float32)

    geometry = {
        "prototype": PROTOTYPE_NAMES[prototype_id],
        "scale": scale, "rotation": rot, "translation": (ty, tx),
        "regions": {name: _region_to_scene(box, scale, rot, (ty, tx), center)
                    for name, box in regions.items()},
    }
    return Scene(appearance, hand_mask.astype(np.float32),
                 object_mask.astype(np.float32), label=prototype_id,
                 geometry=geometry)


def _region_to_scene(box, scale, rot, translation, center):
    """Canonical (x0,y0,x1,y1) box -> scene-space AABB (y0,x0,y1,x1)."""
    x0, y0, x1, y1 = box
    corners = [(x0, y0), (x1, y0), (x0, y1), (x1, y1)]
    cos, sin = math.cos(rot), math.sin(rot)
    ys, xs = [], []
    for cx_, cy_ in corners:
        sx = scale * (cos * cx_ - sin * cy_) + center + translation[1]
        sy = scale * (sin * cx_ + cos * cy_) + center + translation[0]
        xs.append(sx)
        ys.append(sy)
    return (min(ys), min(xs), max(ys), max(xs))


# ---------------------------------------------------------------------------
# crops and negatives

def extract_subimages(scene: Scene, count: int, min_hand_fraction: float,
                      rng_seed: int) -> list[InteractionImage]:
    """Random 32x32 crops whose hand-pixel fraction meets the floor.

    Rejection-sampled; 10,000 consecutive rejections raise GenerationError
    naming the scene.
    """
    if not 0.0 <= min_hand_fraction < 1.0:
        raise GenerationError("min_hand_fraction must be in [0, 1)")
    h, w = scene.appearance.shape
    if h < IMAGE_SIZE or w < IMAGE_SIZE:
        raise GenerationError("scene smaller than a crop")
    rng = rng_for(rng_seed, scene.label, 0x5eed)
    crops: list[InteractionImage] = []
    rejections = 0
    denom = float(IMAGE_SIZE * IMAGE_SIZE)
    rot = float(scene.geometry.get("rotation", 0.0))
    while len(crops) < count:
        ty = int(rng.integers(0, h - IMAGE_SIZE + 1))
        tx = int(rng.integers(0, w - IMAGE_SIZE + 1))
        hm = scene.hand_mask[ty:ty + IMAGE_SIZE, tx:tx + IMAGE_SIZE]
        if float(hm.sum()) / denom < min_hand_fraction:
            rejections += 1
            if rejections >= 10_000:
                name = scene.geometry.get("prototype", str(scene.label))
                raise GenerationError(
                    f"10000 consecutive crop rejections on scene {name!r} "
                    f"(min_hand_fraction={min_hand_fraction})")
            continue
        rejections = 0
        crops.append(InteractionImage(
            scene.appearance[ty:ty + IMAGE_SIZE, tx:tx + IMAGE_SIZE].copy(),
            hm.copy(),
            scene.object_mask[ty:ty + IMAGE_SIZE, tx:tx + IMAGE_SIZE].copy(),
            label=scene.label,
            pose=(rot, float(ty), float(tx))))
    return crops


def _distractor_shapes(rng: np.random.Generator) -> list:
    """Clutter drawn from none of the 12 prototypes.

    Bars stay thinner than the pen barrel and rings are excluded so the
    negatives never mimic a positive object part wholesale; thin bars and
    V-pairs deliberately resemble blades, which carry no interaction.
    """
    shapes = []
    for _ in range(int(rng.integers(1, 4))):
        kind = int(rng.integers(0, 4))
        cx, cy = rng.uniform(-9, 9, size=2)
        if kind == 0:  # thin bar
            ang = rng.uniform(0, math.pi)
            ln = rng.uniform(7, 15)
            dx, dy = math.cos(ang) * ln, math.sin(ang) * ln
            shapes.append(taper(cx - dx, cy - dy, cx + dx, cy + dy,
                                rng.uniform(0.6, 1.2), 0.3))
        elif kind == 1:  # V pair
            ang = rng.uniform(0, 2 * math.pi)
            spread = rng.uniform(0.35, 0.8)
            ln = rng.uniform(8, 14)
            for sgn in (-1, 1):
                a = ang + sgn * spread / 2
                shapes.append(taper(cx, cy, cx + math.cos(a) * ln,
                                    cy + math.sin(a) * ln,
                                    rng.uniform(0.6, 1.0), 0.3))
        elif kind == 2:  # blob cluster
            for _ in range(int(rng.integers(2, 5))):
                ox, oy = rng.uniform(-3.5, 3.5, size=2)
                shapes.append(disk(cx + ox, cy + oy, rng.uniform(1.0, 2.4)))
        else:  # zigzag
            px, py = cx, cy
            for _ in range(int(rng.integers(2, 4))):
                nx_, ny_ = px + rng.uniform(-7, 7), py + rng.uniform(-7, 7)
                shapes.append(capsule(px, py, nx_, ny_, rng.uniform(0.6, 1.1)))
                px, py = nx_, ny_
    return shapes


def make_negative_images(rng_seed: int, count: int) -> list[InteractionImage]:
    """Object-only images with no known interaction and no hand content.

    Roughly 40% plain background texture (object mask all ones so the
    texture itself is the input downstream), 60% distractor clutter with
    its shape mask.
    """
    if count <= 0:
        raise GenerationError("count must be positive")
    out: list[InteractionImage] = []
    n = IMAGE_SIZE
    center = (n - 1) / 2.0
    ys, xs = np.meshgrid(np.arange(n, dtype=np.float64),
                         np.arange(n, dtype=np.float64), indexing="ij")
    xc, yc = xs - center, ys - center
    for i in range(count):
        rng = rng_for(rng_seed, 0xbead, i)
        appearance = rng.uniform(BG_LO, BG_HI, size=(n, n))
        if rng.uniform() < 0.4:
            mask = np.ones((n, n), dtype=bool)
        else:
            mask = union_mask(_distractor_shapes(rng), xc, yc)
            tone = rng.uniform(OBJ_TONE_LO, OBJ_TONE_HI)
            noise = rng.uniform(-TONE_NOISE, TONE_NOISE, size=(n, n))
            appearance = np.where(mask, tone + noise, appearance)
        out.append(InteractionImage(
            np.clip(appearance, 0.0, 1.0).astype(np.float32),
            np.zeros((n, n), dtype=np.float32),
            mask.astype(np.float32),
            label=None))
    return out


# ---------------------------------------------------------------------------
# corpus assembly

def scene_plan(total_scenes: int) -> list[int]:
    """Prototype id per scene, types round-robin, deterministic order."""
    per = total_scenes // N_PROTOTYPES
    extra = total_scenes % N_PROTOTYPES
    plan = []
    for pid in range(N_PROTOTYPES):
        plan.extend([pid] * (per + (1 if pid < extra else 0)))
    return plan


def generate_scenes(total_scenes: int, master_seed: int, size: int = 48,
                    include_hand: bool = True, salt: int = 0) -> list[Scene]:
    plan = scene_plan(total_scenes)
    return [generate_scene(pid, _scene_seed(master_seed, salt, i), size=size,
                           include_hand=include_hand)
            for i, pid in enumerate(plan)]


def _scene_seed(master_seed: int, salt: int, index: int) -> int:
    mix = np.random.SeedSequence([master_seed, salt, index])
    return int(mix.generate_state(1, np.uint64)[0])
