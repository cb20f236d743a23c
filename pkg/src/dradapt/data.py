"""Dataset ingestion, validation, subsampling, and synthetic generation.

CSV is the canonical interchange format (RFC-4180 style, ``.`` decimal
separator); values are parsed as 64-bit floats. Nothing is normalized or
centered on load — standardization only happens when explicitly requested.
Subsampling and synthetic generation use the seedable 64-bit PCG64 PRNG so
runs replicate across platforms.
"""

import csv
import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError, ValidationError
from .seeding import generator

SYNTHETIC_KINDS = (
    "iid-gaussian",
    "iid-uniform",
    "gaussian-mixture",
    "swiss-roll",
    "hyperplane-embedded",
)


@dataclass(frozen=True)
class Dataset:
    """An immutable N x D table of finite reals with optional integer labels."""

    points: np.ndarray
    labels: np.ndarray | None = None
    name: str = "dataset"

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64))
        if pts.ndim != 2:
            raise ValidationError(f"points must be 2-D, got shape {pts.shape}")
        n, d = pts.shape
        if n < 3:
            raise ValidationError(f"need at least 3 points, got {n}")
        if d < 1:
            raise ValidationError("need at least 1 dimension")
        if not np.isfinite(pts).all():
            raise ValidationError("points contain NaN or Inf")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            lab = np.asarray(self.labels, dtype=np.int64)
            if lab.shape != (n,):
                raise ValidationError(
                    f"labels length {lab.shape} does not match {n} points")
            lab.setflags(write=False)
            object.__setattr__(self, "labels", lab)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def content_hash(self) -> str:
        """SHA-256 over the raw point (and label) bytes; used for caching."""
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.points).tobytes())
        if self.labels is not None:
            h.update(np.ascontiguousarray(self.labels).tobytes())
        return h.hexdigest()


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a deterministic synthetic dataset."""

    kind: str
    n: int
    d: int
    seed: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in SYNTHETIC_KINDS:
            raise ValidationError(
                f"unknown synthetic kind {self.kind!r}; choose from {SYNTHETIC_KINDS}")
        if self.n < 3:
            raise ValidationError("n must be >= 3")
        if self.d < 1:
            raise ValidationError("d must be >= 1")


def _resolve_label_column(label_column, header, width):
    if label_column is None:
        return None
    if isinstance(label_column, int):
        idx = label_column if label_column >= 0 else width + label_column
    elif label_column == "last":
        idx = width - 1
    elif header is not None and label_column in header:
        idx = header.index(label_column)
    else:
        try:
            idx = int(label_column)
            if idx < 0:
                idx += width
        except (TypeError, ValueError):
            raise ValidationError(f"label column {label_column!r} not found")
    if not 0 <= idx < width:
        raise ValidationError(f"label column index {idx} out of range for {width} columns")
    return idx


def load_dataset(path, delimiter=",", has_header=False, label_column=None,
                 name=None) -> Dataset:
    """Load a rectangular numeric CSV as a Dataset.

    ``label_column`` may be a column name (requires a header), an integer
    index (negative counts from the right), or the string ``"last"``. The
    label column is removed from the points and stored as integer labels.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        rows = [row for row in reader if row]
    header = None
    if has_header:
        if not rows:
            raise ParseError(f"{path}: empty file")
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
    if not rows:
        raise ParseError(f"{path}: no data rows")
    width = len(rows[0])
    table = np.empty((len(rows), width), dtype=np.float64)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ParseError(
                f"{path}: row {i + 1} has {len(row)} cells, expected {width}")
        for j, cell in enumerate(row):
            try:
                table[i, j] = float(cell)
            except ValueError:
                raise ParseError(f"{path}: non-numeric cell {cell!r} at row {i + 1}")
    idx = _resolve_label_column(label_column, header, width)
    labels = None
    if idx is not None:
        raw = table[:, idx]
        if not np.all(raw == np.floor(raw)):
            raise ParseError(f"{path}: label column contains non-integer values")
        labels = raw.astype(np.int64)
        table = np.delete(table, idx, axis=1)
    if table.shape[0] < 3:
        raise ValidationError(f"{path}: need at least 3 rows, got {table.shape[0]}")
    if table.shape[1] < 1:
        raise ValidationError(f"{path}: no feature columns left")
    if name is None:
        name = str(path)
    return Dataset(points=table, labels=labels, name=name)


def write_dataset(ds: Dataset, path, delimiter=",", include_labels=True) -> None:
    """Write a Dataset back to CSV; floats use shortest round-trip repr."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        for i in range(ds.n):
            row = [repr(float(v)) for v in ds.points[i]]
            if include_labels and ds.labels is not None:
                row.append(str(int(ds.labels[i])))
            writer.writerow(row)


def write_points(points: np.ndarray, path, delimiter=",") -> None:
    """Write a bare numeric matrix (e.g. a projection) to CSV, no header."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        for row in np.asarray(points):
            writer.writerow([repr(float(v)) for v in row])


def standardize(ds: Dataset) -> Dataset:
    """Per-column z-scoring; zero-variance columns are left centered only."""
    mu = ds.points.mean(axis=0)
    sd = ds.points.std(axis=0)
    sd = np.where(sd > 0, sd, 1.0)
    pts = (ds.points - mu) / sd
    return Dataset(points=pts, labels=ds.labels, name=ds.name)


def subsample(ds: Dataset, max_n: int, seed: int) -> Dataset:
    """Uniform sample without replacement of at most ``max_n`` rows.

    Returns ``ds`` unchanged when it is already small enough; otherwise the
    selection is a deterministic function of ``seed`` (PCG64).
    """
    if max_n < 3:
        raise ValidationError("max_n must be >= 3")
    if ds.n <= max_n:
        return ds
    rng = generator(seed, "subsample")
    idx = np.sort(rng.choice(ds.n, size=max_n, replace=False))
    labels = ds.labels[idx] if ds.labels is not None else None
    return Dataset(points=ds.points[idx], labels=labels, name=ds.name)


def _random_orthonormal(rng, d_in, d_out):
    m = rng.standard_normal((d_out, d_in))
    q, _ = np.linalg.qr(m)
    return q[:, :d_in]


def generate_synthetic(spec: SyntheticSpec) -> Dataset:
    """Instantiate a SyntheticSpec; a pure function of the spec."""
    rng = generator(spec.seed, "synthetic", spec.kind)
    p = spec.params
    name = f"{spec.kind}-n{spec.n}-d{spec.d}-s{spec.seed}"
    if spec.kind == "iid-gaussian":
        pts = rng.standard_normal((spec.n, spec.d)) * float(p.get("scale", 1.0))
        return Dataset(points=pts, name=name)
    if spec.kind == "iid-uniform":
        pts = rng.uniform(0.0, float(p.get("scale", 1.0)), size=(spec.n, spec.d))
        return Dataset(points=pts, name=name)
    if spec.kind == "gaussian-mixture":
        comps = int(p.get("components", 3))
        if comps < 1:
            raise ValidationError("gaussian-mixture needs components >= 1")
        sep = float(p.get("separation", 4.0))
        means = rng.standard_normal((comps, spec.d)) * sep
        labels = rng.integers(0, comps, size=spec.n)
        pts = means[labels] + rng.standard_normal((spec.n, spec.d))
        return Dataset(points=pts, labels=labels, name=name)
    if spec.kind == "swiss-roll":
        if spec.d < 3:
            raise ValidationError("swiss-roll needs d >= 3")
        t = 1.5 * np.pi * (1.0 + 2.0 * rng.uniform(size=spec.n))
        height = 21.0 * rng.uniform(size=spec.n)
        roll = np.column_stack([t * np.cos(t), height, t * np.sin(t)])
        roll += float(p.get("noise", 0.0)) * rng.standard_normal(roll.shape)
        if spec.d == 3:
            pts = roll
        else:
            pts = roll @ _random_orthonormal(rng, 3, spec.d).T
        return Dataset(points=pts, name=name)
    if spec.kind == "hyperplane-embedded":
        q = int(p.get("intrinsic_dim", 2))
        if not 1 <= q <= spec.d:
            raise ValidationError("intrinsic_dim must be in [1, d]")
        latent = rng.standard_normal((spec.n, q))
        pts = latent @ _random_orthonormal(rng, q, spec.d).T
        pts += float(p.get("noise", 0.0)) * rng.standard_normal(pts.shape)
        return Dataset(points=pts, name=name)
    raise ValidationError(f"unknown synthetic kind {spec.kind!r}")


def synthetic_corpus(count: int, seed: int, n_range=(80, 160),
                     dims=(2, 4, 8, 16, 32, 64, 128, 256, 512)) -> list[Dataset]:
    """A diverse corpus of small synthetic datasets for benchmarks and tests.

    Cycles through the generator kinds while sweeping point counts and
    ambient dimensions, so complexity scores span an informative range.
    """
    if count < 1:
        raise ValidationError("count must be >= 1")
    rng = generator(seed, "corpus")
    out = []
    for i in range(count):
        kind = SYNTHETIC_KINDS[i % len(SYNTHETIC_KINDS)]
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        d = int(dims[int(rng.integers(0, len(dims)))])
        params = {}
        if kind == "gaussian-mixture":
            params["components"] = int(rng.integers(2, 6))
            params["separation"] = float(rng.uniform(1.0, 6.0))
        elif kind == "swiss-roll":
            d = max(d, 3)
            params["noise"] = float(rng.uniform(0.0, 0.5))
        elif kind == "hyperplane-embedded":
            params["intrinsic_dim"] = int(rng.integers(1, min(d, 6) + 1))
            params["noise"] = float(rng.uniform(0.0, 0.2))
        spec = SyntheticSpec(kind=kind, n=n, d=d, seed=int(rng.integers(0, 2**63)),
                             params=params)
        ds = generate_synthetic(spec)
        out.append(Dataset(points=ds.points, labels=ds.labels, name=f"syn{i:03d}-{kind}"))
    return out


def load_manifest(path) -> list[Dataset]:
    """Load a corpus manifest: JSON array of {name, path, label_column}.

    Relative dataset paths resolve against the manifest's directory. A
    top-level {"datasets": [...]} wrapper is also accepted.
    """
    import os

    with open(path) as fh:
        doc = json.load(fh)
    if isinstance(doc, dict):
        doc = doc.get("datasets", [])
    base = os.path.dirname(os.path.abspath(path))
    out = []
    for entry in doc:
        ds_path = entry["path"]
        if not os.path.isabs(ds_path):
            ds_path = os.path.join(base, ds_path)
        out.append(load_dataset(
            ds_path,
            has_header=bool(entry.get("has_header", False)),
            label_column=entry.get("label_column"),
            name=entry.get("name", os.path.basename(ds_path)),
        ))
    return out
