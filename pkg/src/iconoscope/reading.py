"""Figure construction and attribute-to-actor assignment.

Segmentation backends fracture a painted figure: a haloed head, a torso,
and a held lamb often arrive as separate person/animal regions.  Figures
are rebuilt by merging person and animal regions that touch (or sit within
``merge_distance`` pixels of each other); everything else is scenery and
is dropped.  Each retained attribute then names its actor by proximity:
the figure whose centroid is nearest to the attribute's location, with the
association database supplying the candidate identities.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .geometry import BinaryMask, PixelPoint, centroid, distance, nearest_pixel_gap, union_masks
from .knowledge import AssociationDatabase, saints_for_attribute
from .providers import AttributeInstance, SegmentRegion, SemanticClass

log = logging.getLogger(__name__)

DEFAULT_MERGE_DISTANCE = 0.0


@dataclass(frozen=True)
class Figure:
    """One reconstructed pictorial actor.

    ``member_region_indices`` are indices into the region list handed to
    :func:`build_figures`, so a figure can be traced back to its parts.
    """

    figure_id: int
    merged_mask: BinaryMask
    centroid: PixelPoint
    member_region_indices: tuple[int, ...]

    @property
    def pixel_count(self) -> int:
        return self.merged_mask.count()


@dataclass(frozen=True)
class Assignment:
    """One attribute bound to one figure under one proposed identity.

    ``candidate_rank`` is 1 when the saint is the attribute's top-prior
    candidate, 2 when the identity fell through to the second candidate,
    and so on.  ``distance`` is from the attribute's location to the
    figure's centroid, in pixels.
    """

    attribute: AttributeInstance
    figure_id: int
    saint: str
    prior: float
    distance: float
    candidate_rank: int

    def __post_init__(self) -> None:
        if self.distance < 0:
            raise ValueError(f"distance must be >= 0, got {self.distance}")
        if self.candidate_rank < 1:
            raise ValueError(f"candidate_rank must be >= 1, got {self.candidate_rank}")

    @property
    def via_attribute(self) -> str:
        return self.attribute.label

    @property
    def attribute_confidence(self) -> float:
        return self.attribute.confidence


@dataclass(frozen=True)
class Reading:
    """Everything the pipeline concluded about a single image."""

    figures: tuple[Figure, ...]
    assignments: tuple[Assignment, ...]
    unassigned_attributes: tuple[AttributeInstance, ...]
    image_id: str = ""

    def figure_by_id(self, figure_id: int) -> Figure:
        for fig in self.figures:
            if fig.figure_id == figure_id:
                return fig
        raise KeyError(f"no figure with id {figure_id}")


def build_figures(
    regions: list[SegmentRegion], merge_distance: float = DEFAULT_MERGE_DISTANCE
) -> list[Figure]:
    """Merge person/animal regions into figures; discard scenery.

    Two regions join the same figure when their masks overlap or the gap
    between them is at most ``merge_distance`` pixels.  Merging is
    transitive.  Figure ids are assigned 0..n-1 in centroid order
    (x, then y), so an id is stable under region-list reordering.
    """
    if merge_distance < 0:
        raise ValueError(f"merge_distance must be >= 0, got {merge_distance}")
    bodily = [
        (i, r) for i, r in enumerate(regions)
        if r.semantic_class in (SemanticClass.PERSON, SemanticClass.ANIMAL)
        and not r.mask.is_empty()
    ]
    parent = list(range(len(bodily)))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for a in range(len(bodily)):
        for b in range(a + 1, len(bodily)):
            mask_a, mask_b = bodily[a][1].mask, bodily[b][1].mask
            if mask_a.overlaps(mask_b):
                union(a, b)
            elif merge_distance > 0 and nearest_pixel_gap(mask_a, mask_b) <= merge_distance:
                union(a, b)

    groups: dict[int, list[int]] = {}
    for a in range(len(bodily)):
        groups.setdefault(find(a), []).append(a)

    built = []
    for members in groups.values():
        indices = tuple(sorted(bodily[m][0] for m in members))
        mask = union_masks([bodily[m][1].mask for m in members])
        built.append((mask, centroid(mask), indices))
    built.sort(key=lambda item: (item[1].x, item[1].y, item[2]))
    return [
        Figure(figure_id=i, merged_mask=mask, centroid=c, member_region_indices=indices)
        for i, (mask, c, indices) in enumerate(built)
    ]


def assign_actors(
    figures: list[Figure],
    attributes: list[AttributeInstance],
    database: AssociationDatabase,
) -> Reading:
    """Bind each attribute to its nearest figure under a database identity.

    Attributes are processed in a fixed order: confidence descending, then
    top-candidate prior descending, then label, then location.  Each takes
    the database's highest-prior candidate saint; when that saint is
    already claimed by a different figure, the attribute falls through to
    its next candidate.  With all candidates claimed elsewhere the top
    candidate is kept anyway (two figures may genuinely share an identity
    reading) and a warning is logged.

    An attribute goes unassigned when its label is not in the database,
    there are no figures, or its figure already holds an assignment for
    the same attribute label (a duplicate detection adds no information).
    The returned reading has an empty ``image_id``; callers that know the
    image fill it in.
    """

    def order_key(attr: AttributeInstance):
        candidates = saints_for_attribute(database, attr.label)
        top_prior = candidates[0][1] if candidates else 0.0
        return (-attr.confidence, -top_prior, attr.label, attr.location.x, attr.location.y)

    assignments: list[Assignment] = []
    unassigned: list[AttributeInstance] = []
    saint_holder: dict[str, int] = {}
    taken_pairs: set[tuple[int, str]] = set()

    for attr in sorted(attributes, key=order_key):
        candidates = saints_for_attribute(database, attr.label)
        if not candidates or not figures:
            unassigned.append(attr)
            continue
        nearest = min(figures, key=lambda f: (distance(attr.location, f.centroid), f.figure_id))
        if (nearest.figure_id, attr.label) in taken_pairs:
            unassigned.append(attr)
            continue
        chosen = None
        for rank, (saint, prior) in enumerate(candidates, start=1):
            holder = saint_holder.get(saint)
            if holder is None or holder == nearest.figure_id:
                chosen = (saint, prior, rank)
                break
        if chosen is None:
            saint, prior = candidates[0]
            chosen = (saint, prior, 1)
            log.warning(
                "attribute %r at figure %d: all candidate identities already "
                "claimed by other figures; keeping %r",
                attr.label, nearest.figure_id, saint,
            )
        saint, prior, rank = chosen
        assignments.append(
            Assignment(
                attribute=attr,
                figure_id=nearest.figure_id,
                saint=saint,
                prior=prior,
                distance=distance(attr.location, nearest.centroid),
                candidate_rank=rank,
            )
        )
        saint_holder.setdefault(saint, nearest.figure_id)
        taken_pairs.add((nearest.figure_id, attr.label))

    return Reading(
        figures=tuple(figures),
        assignments=tuple(assignments),
        unassigned_attributes=tuple(unassigned),
    )
