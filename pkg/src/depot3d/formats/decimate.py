"""Point-budgeted derivatives for web preview: seeded uniform subsampling."""

from __future__ import annotations

import random

from ..errors import RepositoryError
from .ply import PlyElement, PlyModel


class DecimateError(RepositoryError):
    pass


def decimate(model: PlyModel, target: int, seed: int) -> PlyModel:
    """Subsample the vertex element to at most ``target`` points.

    Uses reservoir sampling (Algorithm R) with a dedicated RNG, so the
    result is a uniform subset of the input vertices and byte-identical
    across runs for the same seed. Faces and all non-vertex elements are
    dropped; when target >= vertex count the point set is kept unchanged.
    """
    if target <= 0:
        raise DecimateError("TARGET_ZERO", "target point count must be positive")
    vertex = model.element("vertex")
    if vertex is None:
        raise DecimateError("NO_VERTEX_ELEMENT", "model has no vertex element")

    rows = model.data.get("vertex", [])
    if target >= len(rows):
        kept = list(rows)
    else:
        rng = random.Random(seed)
        kept = list(rows[:target])
        for i in range(target, len(rows)):
            j = rng.randrange(i + 1)
            if j < target:
                kept[j] = rows[i]

    element = PlyElement(name="vertex", count=len(kept), properties=vertex.properties)
    return PlyModel(
        encoding=model.encoding,
        version=model.version,
        comments=list(model.comments),
        elements=[element],
        data={"vertex": kept},
    )
