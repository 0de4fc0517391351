"""Labeled point clouds and the ball/shell samplers used throughout.

A cloud is the finite stand-in for a labeled union of manifolds: an
``(n, dim)`` coordinate array plus one integer class label per point.  The
only generators are concentric balls and shells (the geometry every
experiment here needs); sampling is uniform by rejection from the enclosing
cube, so the radius bounds are hard constraints rather than statistical
ones.
"""

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, SchemaError, SpecError
from .numerics import make_rng

# Radii of the default two-class dataset: a solid disc of radius 0.9
# surrounded by the closed annulus between radii 1 and 2.
ANNULUS_INNER_RADIUS = 0.9
ANNULUS_OUTER_MIN_RADIUS = 1.0
ANNULUS_OUTER_MAX_RADIUS = 2.0


@dataclass(frozen=True)
class LabeledPointCloud:
    """Finite points in R^dim with class labels 0..class_count-1."""

    dim: int
    points: np.ndarray  # (n, dim) float64
    labels: np.ndarray  # (n,) int64
    class_count: int

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if points.ndim != 2 or points.shape[1] != self.dim:
            raise SchemaError(f"points must have shape (n, {self.dim})")
        if points.shape[0] == 0:
            raise SchemaError("cloud must contain at least one point")
        if labels.shape != (points.shape[0],):
            raise SchemaError("labels and points must have equal length")
        if not np.isfinite(points).all():
            raise SchemaError("point coordinates must be finite")
        if self.class_count < 1:
            raise SchemaError("class_count must be >= 1")
        if labels.min() < 0 or labels.max() >= self.class_count:
            raise SchemaError("labels must lie in 0..class_count-1")
        present = np.unique(labels)
        if present.size != self.class_count:
            missing = sorted(set(range(self.class_count)) - set(present.tolist()))
            raise SchemaError(f"classes {missing} have no points")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return self.points.shape[0]

    def class_points(self, label):
        """Coordinates of every point carrying the given label."""
        return self.points[self.labels == label]

    def split_by_class(self):
        return [self.class_points(k) for k in range(self.class_count)]


@dataclass(frozen=True)
class ShellSpec:
    """Two-class ball-plus-shell geometry: 0 < inner < outer_min <= outer_max."""

    dim: int
    inner_max_radius: float = ANNULUS_INNER_RADIUS
    outer_min_radius: float = ANNULUS_OUTER_MIN_RADIUS
    outer_max_radius: float = ANNULUS_OUTER_MAX_RADIUS
    samples_per_class: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.dim < 1:
            raise SpecError("dim must be >= 1")
        if self.samples_per_class < 1:
            raise SpecError("samples_per_class must be >= 1")
        if not (0.0 < self.inner_max_radius < self.outer_min_radius <= self.outer_max_radius):
            raise SpecError(
                "radii must satisfy 0 < inner_max < outer_min <= outer_max, got "
                f"({self.inner_max_radius}, {self.outer_min_radius}, {self.outer_max_radius})"
            )


def _band_acceptance(dim, lo, hi):
    """Fraction of the cube [-hi, hi]^dim falling inside the band lo<=|x|<=hi."""
    unit_ball = math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0)
    band = unit_ball * (hi**dim - lo**dim)
    return band / (2.0 * hi) ** dim


def _sample_band(rng, dim, lo, hi, count):
    """Uniform points with lo <= ||x|| <= hi by cube rejection."""
    accept = max(_band_acceptance(dim, lo, hi), 1e-6)
    chunks = []
    need = count
    while need > 0:
        batch = min(max(int(need / accept * 1.2), 256), 2_000_000)
        draw = rng.uniform(-hi, hi, size=(batch, dim))
        norms = np.sqrt((draw * draw).sum(axis=1))
        kept = draw[(norms >= lo) & (norms <= hi)][:need]
        chunks.append(kept)
        need -= kept.shape[0]
    return np.concatenate(chunks, axis=0)


def gen_nested_shells(dim, bands, samples_per_class, seed):
    """One class per radial band; bands must be separated by positive gaps.

    ``bands`` is a sequence of (lo, hi) radius pairs; lo == 0 makes the band a
    solid ball.  Sampling is deterministic for a given seed.
    """
    if dim < 1:
        raise SpecError("dim must be >= 1")
    if samples_per_class < 1:
        raise SpecError("samples_per_class must be >= 1")
    bands = [(float(lo), float(hi)) for lo, hi in bands]
    if not bands:
        raise SpecError("at least one band is required")
    prev_hi = None
    for lo, hi in bands:
        if not (0.0 <= lo <= hi) or hi <= 0.0:
            raise SpecError(f"band ({lo}, {hi}) is not a valid radius range")
        if prev_hi is not None and lo <= prev_hi:
            raise SpecError("bands must be increasing and separated by gaps")
        prev_hi = hi

    rng = make_rng(seed)
    points = []
    labels = []
    for k, (lo, hi) in enumerate(bands):
        pts = _sample_band(rng, dim, lo, hi, samples_per_class)
        points.append(pts)
        labels.append(np.full(samples_per_class, k, dtype=np.int64))
    return LabeledPointCloud(
        dim=dim,
        points=np.concatenate(points, axis=0),
        labels=np.concatenate(labels),
        class_count=len(bands),
    )


def gen_shells(spec):
    """Class 0 uniform in the ball, class 1 uniform in the outer shell."""
    return gen_nested_shells(
        spec.dim,
        [(0.0, spec.inner_max_radius), (spec.outer_min_radius, spec.outer_max_radius)],
        spec.samples_per_class,
        spec.seed,
    )


def gen_annulus2d(samples_per_class, seed):
    """The planar disc-vs-annulus dataset with the canonical radii."""
    return gen_shells(ShellSpec(dim=2, samples_per_class=samples_per_class, seed=seed))


def save_cloud(cloud, path):
    """Write the JSON dataset format; coordinates round-trip bit-exactly."""
    payload = {
        "dim": cloud.dim,
        "class_count": cloud.class_count,
        "points": cloud.points.tolist(),
        "labels": cloud.labels.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_cloud(path):
    """Read a JSON dataset, raising ParseError/SchemaError on bad files."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc

    if not isinstance(payload, dict):
        raise SchemaError("dataset file must contain a JSON object")
    for key in ("dim", "class_count", "points", "labels"):
        if key not in payload:
            raise SchemaError(f"dataset file is missing key {key!r}")
    dim = payload["dim"]
    class_count = payload["class_count"]
    points = payload["points"]
    labels = payload["labels"]
    if not isinstance(dim, int) or not isinstance(class_count, int):
        raise SchemaError("dim and class_count must be integers")
    if not isinstance(points, list) or not points:
        raise SchemaError("points must be a non-empty list")
    if not isinstance(labels, list):
        raise SchemaError("labels must be a list")
    for i, row in enumerate(points):
        if not isinstance(row, list) or len(row) != dim:
            raise SchemaError(f"point {i} does not have {dim} coordinates")
        for x in row:
            if not isinstance(x, (int, float)) or isinstance(x, bool):
                raise SchemaError(f"point {i} has a non-numeric coordinate")
    for i, lab in enumerate(labels):
        if not isinstance(lab, int) or isinstance(lab, bool):
            raise SchemaError(f"label {i} is not an integer")
    return LabeledPointCloud(
        dim=dim,
        points=np.array(points, dtype=np.float64),
        labels=np.array(labels, dtype=np.int64),
        class_count=class_count,
    )


def cloud_to_csv(cloud, path):
    """One row per point: coordinates then label, with a header row."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{i}" for i in range(cloud.dim)] + ["label"])
        for row, lab in zip(cloud.points, cloud.labels):
            writer.writerow([repr(float(x)) for x in row] + [int(lab)])


def class_norm_ranges(cloud):
    """Per-class (count, min norm, max norm); feeds CLI summaries."""
    out = []
    for k in range(cloud.class_count):
        pts = cloud.class_points(k)
        norms = np.sqrt((pts * pts).sum(axis=1))
        out.append((pts.shape[0], float(norms.min()), float(norms.max())))
    return out
