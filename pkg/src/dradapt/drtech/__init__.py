"""Built-in DR techniques, their hyperparameter spaces, and the registry.

Built-ins are {pca, mds-classical, isomap, lle, tsne-exact}; anything else
(UMAP, UMATO, ...) joins through the external-command plugin protocol in
``dradapt.drtech.external``. Upper bounds of some dimensions depend on the
dataset size; ``hyperparameter_space(t, n)`` resolves them.
"""

from dataclasses import dataclass, field

import numpy as np

from ..data import Dataset
from ..distance import pairwise_distances
from ..errors import ProjectionError, UnknownTechniqueError, ValidationError
from .external import run_external_command
from .linear import classical_mds_embed, pca_embed
from .manifold import isomap_embed, lle_embed
from .tsne import joint_affinities, kl_divergence, kl_gradient, tsne_embed

__all__ = [
    "Projection", "HyperparamDim", "HyperparamSpace", "TechniqueDescriptor",
    "TechniqueRegistry", "default_registry", "list_techniques", "get_technique",
    "register_external", "hyperparameter_space", "project", "validate_assignment",
    "joint_affinities", "kl_divergence", "kl_gradient",
]

BUILTIN_IDS = ("pca", "mds-classical", "isomap", "lle", "tsne-exact")


@dataclass(frozen=True)
class Projection:
    """An N x 2 embedding of an N-point dataset."""

    points: np.ndarray
    source_n: int

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64))
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValidationError(f"projection must be N x 2, got {pts.shape}")
        if pts.shape[0] != self.source_n:
            raise ValidationError(
                f"projection has {pts.shape[0]} rows for {self.source_n} source points")
        if not np.isfinite(pts).all():
            raise ValidationError("projection contains NaN or Inf")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True)
class HyperparamDim:
    name: str
    type: str  # "integer" | "real" | "log-real"
    lower: float
    upper: float

    def __post_init__(self):
        if self.type not in ("integer", "real", "log-real"):
            raise ValidationError(f"unknown dimension type {self.type!r}")
        if not self.lower < self.upper:
            raise ValidationError(
                f"{self.name}: lower {self.lower} must be < upper {self.upper}")
        if self.type == "integer" and (self.lower != int(self.lower)
                                       or self.upper != int(self.upper)):
            raise ValidationError(f"{self.name}: integer bounds must be integral")
        if self.type == "log-real" and self.lower <= 0:
            raise ValidationError(f"{self.name}: log-real lower bound must be positive")


@dataclass(frozen=True)
class HyperparamSpace:
    dims: tuple = ()

    def __len__(self):
        return len(self.dims)

    def names(self):
        return [d.name for d in self.dims]


EMPTY_SPACE = HyperparamSpace()


def validate_assignment(space: HyperparamSpace, assignment: dict) -> dict:
    """Check an assignment against a space; returns it with integer dims
    coerced to int."""
    out = {}
    names = set(space.names())
    extra = set(assignment) - names
    if extra:
        raise ValidationError(f"unknown hyperparameters: {sorted(extra)}")
    for dim in space.dims:
        if dim.name not in assignment:
            raise ValidationError(f"missing hyperparameter {dim.name!r}")
        v = assignment[dim.name]
        try:
            v = float(v)
        except (TypeError, ValueError):
            raise ValidationError(f"{dim.name}: non-numeric value {v!r}")
        if not dim.lower <= v <= dim.upper:
            raise ValidationError(
                f"{dim.name}={v} outside [{dim.lower}, {dim.upper}]")
        if dim.type == "integer":
            if v != int(v):
                raise ValidationError(f"{dim.name}={v} must be integral")
            v = int(v)
        out[dim.name] = v
    return out


def _space_pca(n):
    return EMPTY_SPACE


def _space_mds(n):
    return HyperparamSpace((HyperparamDim("distance_power", "real", 0.5, 2.0),))


def _neighbors_upper(n):
    return 100 if n is None else min(100, n // 4)


def _space_isomap(n):
    return HyperparamSpace((
        HyperparamDim("n_neighbors", "integer", 5, _neighbors_upper(n)),))


def _space_lle(n):
    return HyperparamSpace((
        HyperparamDim("n_neighbors", "integer", 5, _neighbors_upper(n)),
        HyperparamDim("regularization", "log-real", 1e-4, 1e-1),
    ))


def _space_tsne(n):
    upper = 100.0 if n is None else min(100.0, (n - 1) / 3.0)
    return HyperparamSpace((
        HyperparamDim("perplexity", "real", 2.0, upper),
        HyperparamDim("learning_rate", "log-real", 10.0, 1000.0),
        HyperparamDim("n_iter", "integer", 250, 1000),
    ))


_BUILTIN_SPACES = {
    "pca": _space_pca,
    "mds-classical": _space_mds,
    "isomap": _space_isomap,
    "lle": _space_lle,
    "tsne-exact": _space_tsne,
}


@dataclass(frozen=True)
class TechniqueDescriptor:
    id: str
    kind: str  # "builtin" | "external"
    space_fn: object = field(repr=False, default=None)
    command: object = None  # external only

    @property
    def space(self) -> HyperparamSpace:
        return self.space_for(None)

    def space_for(self, n) -> HyperparamSpace:
        if self.space_fn is None:
            return EMPTY_SPACE
        return self.space_fn(n)


class TechniqueRegistry:
    """Orders built-ins first, then externals by registration order."""

    def __init__(self):
        self._techniques: dict[str, TechniqueDescriptor] = {}
        for tid in BUILTIN_IDS:
            self._techniques[tid] = TechniqueDescriptor(
                id=tid, kind="builtin", space_fn=_BUILTIN_SPACES[tid])

    def list(self) -> list[TechniqueDescriptor]:
        return list(self._techniques.values())

    def get(self, technique_id: str) -> TechniqueDescriptor:
        try:
            return self._techniques[technique_id]
        except KeyError:
            raise UnknownTechniqueError(
                f"unknown technique {technique_id!r}; known: {list(self._techniques)}")

    def register_external(self, technique_id: str, command,
                          space: HyperparamSpace = EMPTY_SPACE) -> TechniqueDescriptor:
        if technique_id in self._techniques:
            raise ValidationError(f"technique id {technique_id!r} already registered")
        desc = TechniqueDescriptor(id=technique_id, kind="external",
                                   space_fn=lambda n: space, command=command)
        self._techniques[technique_id] = desc
        return desc


default_registry = TechniqueRegistry()


def list_techniques(registry: TechniqueRegistry | None = None) -> list[TechniqueDescriptor]:
    return (registry or default_registry).list()


def get_technique(technique_id, registry: TechniqueRegistry | None = None) -> TechniqueDescriptor:
    if isinstance(technique_id, TechniqueDescriptor):
        return technique_id
    return (registry or default_registry).get(technique_id)


def register_external(technique_id: str, command, space: HyperparamSpace = EMPTY_SPACE,
                      registry: TechniqueRegistry | None = None) -> TechniqueDescriptor:
    return (registry or default_registry).register_external(technique_id, command, space)


def hyperparameter_space(technique, n: int | None = None,
                         registry: TechniqueRegistry | None = None) -> HyperparamSpace:
    """The technique's declared space, with size-dependent bounds resolved
    when ``n`` is given."""
    return get_technique(technique, registry).space_for(n)


def project(technique, ds: Dataset, assignment: dict | None = None, seed: int = 0,
            registry: TechniqueRegistry | None = None) -> Projection:
    """Project a dataset to 2-D; deterministic given (technique, ds,
    assignment, seed)."""
    desc = get_technique(technique, registry)
    h = validate_assignment(desc.space_for(ds.n), assignment or {})
    if desc.kind == "external":
        pts = run_external_command(desc.command, ds, h, seed)
        return Projection(points=pts, source_n=ds.n)
    if desc.id == "pca":
        pts = pca_embed(ds.points)
    elif desc.id == "mds-classical":
        pts = classical_mds_embed(pairwise_distances(ds), h["distance_power"])
    elif desc.id == "isomap":
        pts = isomap_embed(ds.points, h["n_neighbors"])
    elif desc.id == "lle":
        pts = lle_embed(ds.points, h["n_neighbors"], h["regularization"])
    elif desc.id == "tsne-exact":
        pts = tsne_embed(ds.points, h["perplexity"], h["learning_rate"],
                         h["n_iter"], seed)
    else:  # pragma: no cover
        raise UnknownTechniqueError(f"no dispatch for {desc.id!r}")
    if not np.isfinite(pts).all():
        raise ProjectionError("non-finite projection", technique=desc.id)
    return Projection(points=pts, source_n=ds.n)


def default_assignment(technique, n: int | None = None,
                       registry: TechniqueRegistry | None = None) -> dict:
    """Midpoint-of-space assignment, handy for smoke runs."""
    space = hyperparameter_space(technique, n, registry)
    out = {}
    for dim in space.dims:
        if dim.type == "integer":
            out[dim.name] = int((dim.lower + dim.upper) // 2)
        elif dim.type == "log-real":
            out[dim.name] = float(np.sqrt(dim.lower * dim.upper))
        else:
            out[dim.name] = (dim.lower + dim.upper) / 2.0
    return out
