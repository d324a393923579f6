"""Naive reference implementations used as oracles by the tests.

Everything here is deliberately written the slow, obvious way — plain
loops, exact rational or high-precision arithmetic — and shares no code
with the package under test.
"""

from __future__ import annotations

import math
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction


def exact_centroid(grid) -> tuple[Fraction, Fraction]:
    """Mean of (x + 1/2, y + 1/2) over set cells, in exact rationals."""
    xs: list[Fraction] = []
    ys: list[Fraction] = []
    for y, row in enumerate(grid):
        for x, value in enumerate(row):
            if value:
                xs.append(Fraction(2 * x + 1, 2))
                ys.append(Fraction(2 * y + 1, 2))
    if not xs:
        raise ValueError("empty grid")
    return sum(xs) / len(xs), sum(ys) / len(ys)


def scaled_dims_exact(width: int, height: int, target: int) -> tuple[int, int]:
    """Scaled dimensions recomputed at 60 significant digits."""
    with localcontext() as ctx:
        ctx.prec = 60
        scale = (Decimal(target) / (Decimal(width) * Decimal(height))).sqrt()
        new_w = int((Decimal(width) * scale).quantize(Decimal(1), rounding=ROUND_HALF_EVEN))
        new_h = int((Decimal(height) * scale).quantize(Decimal(1), rounding=ROUND_HALF_EVEN))
    return max(1, new_w), max(1, new_h)


def nearest_figure(location: tuple[float, float], figures: list[tuple[int, tuple[float, float]]]) -> int:
    """Figure id minimizing Euclidean distance; lower id wins ties."""
    best_id = None
    best_distance = None
    for figure_id, (fx, fy) in figures:
        d = math.hypot(location[0] - fx, location[1] - fy)
        if (best_distance is None or d < best_distance
                or (d == best_distance and figure_id < best_id)):
            best_id, best_distance = figure_id, d
    return best_id


def oracle_assignments(
    figures: list[tuple[int, tuple[float, float]]],
    attributes: list[tuple[str, tuple[float, float], float]],
    candidates_by_label: dict[str, list[tuple[str, float]]],
):
    """Full assignment semantics, reimplemented naively.

    Attributes are (label, location, confidence); returns (assignments,
    unassigned) where an assignment is (label, location, confidence,
    figure_id, saint, rank).
    """

    def order_key(attr):
        label, (x, y), confidence = attr
        cands = candidates_by_label.get(label, [])
        top = cands[0][1] if cands else 0.0
        return (-confidence, -top, label, x, y)

    held: dict[str, int] = {}
    pairs: set[tuple[int, str]] = set()
    assignments = []
    unassigned = []
    for label, location, confidence in sorted(attributes, key=order_key):
        cands = candidates_by_label.get(label, [])
        if not cands or not figures:
            unassigned.append((label, location, confidence))
            continue
        figure_id = nearest_figure(location, figures)
        if (figure_id, label) in pairs:
            unassigned.append((label, location, confidence))
            continue
        chosen = None
        for rank, (saint, _prior) in enumerate(cands, start=1):
            if held.get(saint) in (None, figure_id):
                chosen = (saint, rank)
                break
        if chosen is None:
            chosen = (cands[0][0], 1)
        saint, rank = chosen
        assignments.append((label, location, confidence, figure_id, saint, rank))
        held.setdefault(saint, figure_id)
        pairs.add((figure_id, label))
    return assignments, unassigned


def best_matching_count(predictions, truths) -> int:
    """Maximum matching size between predictions and truth entries.

    A prediction (saint, centroid) may match a truth (saint, box-or-None)
    when the names agree and the centroid is inside the box if one is
    given.  Exhaustive recursion over every matching; fine for tiny inputs.
    """

    def compatible(pred, entry):
        (p_saint, centroid), (t_saint, box) = pred, entry
        if p_saint != t_saint:
            return False
        if box is None:
            return True
        x0, y0, x1, y1 = box
        return x0 <= centroid[0] <= x1 and y0 <= centroid[1] <= y1

    def best_from(i: int, used: frozenset) -> int:
        if i == len(predictions):
            return 0
        best = best_from(i + 1, used)
        for j in range(len(truths)):
            if j not in used and compatible(predictions[i], truths[j]):
                best = max(best, 1 + best_from(i + 1, used | {j}))
        return best

    return best_from(0, frozenset())
