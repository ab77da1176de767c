"""Age-structured populations and their diversity.

Every node carries a single ascribed feature, its age in years [0, 89],
normalised to [0, 1) for scoring. Ages fall into nine decade groups
(0-9, 10-19, ..., 80-89). A population's age histogram follows one of five
shapes; each shape is a fixed 9-group template at the reference size of 90
nodes, rescaled to other sizes by largest-remainder rounding so the counts
always sum exactly to the population size.

Diversity of the group histogram is measured with Hill numbers: order q = 0
counts occupied groups, q = 1 is the exponential of Shannon entropy, and
larger q weighs dominant groups more heavily.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .scenario import AgeShape, Preference

GROUP_COUNT = 9
GROUP_WIDTH = 10
AGE_SPAN = GROUP_COUNT * GROUP_WIDTH  # 90, also the feature normaliser
REFERENCE_SIZE = 90

# Decade-group count templates at the reference size of 90 nodes.
# Uniform: flat. Bell: symmetric, peaked in the 40s. InverseBell: symmetric,
# thinnest in the 40s. LeftSkewed: mass pushed to old age groups (left-leaning
# histogram tail); RightSkewed is its mirror image.
SHAPE_TEMPLATES: dict[AgeShape, tuple[int, ...]] = {
    AgeShape.UNIFORM: (10, 10, 10, 10, 10, 10, 10, 10, 10),
    AgeShape.BELL: (3, 6, 10, 15, 22, 15, 10, 6, 3),
    AgeShape.INVERSE_BELL: (16, 13, 9, 5, 4, 5, 9, 13, 16),
    AgeShape.LEFT_SKEWED: (1, 2, 3, 5, 8, 11, 15, 20, 25),
    AgeShape.RIGHT_SKEWED: (25, 20, 15, 11, 8, 5, 3, 2, 1),
}


def group_counts(shape: AgeShape, node_count: int) -> np.ndarray:
    """Number of nodes per decade group, always summing to node_count.

    The shape template is scaled by node_count / 90 and rounded by largest
    remainder (ties go to the younger group), so scaling is deterministic
    and exact; at node_count = 90 the template is returned unchanged.
    """
    if node_count < 0:
        raise ValueError(f"node_count must be non-negative, got {node_count}")
    template = np.array(SHAPE_TEMPLATES[shape], dtype=np.int64)
    if node_count == REFERENCE_SIZE:
        return template.copy()
    # Integer arithmetic keeps the tie rule exact: quota = t*n/90, compared
    # by numerator so equal fractional parts never split on float rounding.
    scaled = template * node_count
    counts = scaled // REFERENCE_SIZE
    remainder = int(node_count - counts.sum())
    if remainder > 0:
        # Largest fractional parts win the leftover slots; ties to lower index.
        order = np.lexsort((np.arange(GROUP_COUNT), -(scaled % REFERENCE_SIZE)))
        counts[order[:remainder]] += 1
    return counts


def sample_ages(counts: np.ndarray, stream: np.random.Generator) -> np.ndarray:
    """Draw an integer age for every node, uniform within its decade group.

    Nodes are numbered group by group (all group-0 nodes first), so the
    mapping from node id to group is deterministic given the counts.
    """
    counts = np.asarray(counts, dtype=np.int64)
    if counts.shape != (GROUP_COUNT,):
        raise ValueError(f"expected {GROUP_COUNT} group counts, got shape {counts.shape}")
    if (counts < 0).any():
        raise ValueError("group counts must be non-negative")
    parts = []
    for g, n in enumerate(counts):
        if n > 0:
            parts.append(g * GROUP_WIDTH + stream.integers(0, GROUP_WIDTH, size=int(n)))
    if not parts:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate(parts).astype(np.int64)


@dataclass
class Population:
    """Nodes with ages and connection-preference traits.

    ages holds integer years; features is the normalised (n, 1) feature
    matrix used by the scoring functions. The four trait arrays have the
    same (n, 1) shape so that heterogeneous populations are possible, even
    though scenario-driven runs apply one Preference to every node.
    """

    ages: np.ndarray
    level: np.ndarray
    level_weight: np.ndarray
    difference: np.ndarray
    difference_weight: np.ndarray

    def __post_init__(self) -> None:
        self.ages = np.asarray(self.ages, dtype=np.int64)
        n = self.ages.shape[0]
        for name in ("level", "level_weight", "difference", "difference_weight"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.ndim == 1:
                arr = arr[:, None]
            if arr.shape[0] != n:
                raise ValueError(f"{name}: expected {n} rows, got {arr.shape[0]}")
            setattr(self, name, arr)
        if (self.ages < 0).any() or (self.ages >= AGE_SPAN).any():
            raise ValueError(f"ages must lie in [0, {AGE_SPAN})")

    @property
    def size(self) -> int:
        return int(self.ages.shape[0])

    @property
    def feature_count(self) -> int:
        return int(self.level.shape[1])

    @property
    def features(self) -> np.ndarray:
        """Normalised feature matrix, shape (n, 1), values in [0, 1)."""
        return (self.ages / AGE_SPAN)[:, None]

    @property
    def groups(self) -> np.ndarray:
        return self.ages // GROUP_WIDTH

    @classmethod
    def homogeneous(cls, ages: np.ndarray, preference: Preference) -> "Population":
        """Population where every node carries the same preference."""
        n = len(ages)
        ones = np.ones((n, 1))
        return cls(
            ages=np.asarray(ages),
            level=ones * preference.level,
            level_weight=ones * preference.level_weight,
            difference=ones * preference.difference,
            difference_weight=ones * preference.difference_weight,
        )


def make_population(
    shape: AgeShape,
    node_count: int,
    preference: Preference,
    stream: np.random.Generator,
) -> Population:
    """Sample a population of the given shape with one shared preference."""
    ages = sample_ages(group_counts(shape, node_count), stream)
    return Population.homogeneous(ages, preference)


def hill_number(counts, q: float) -> float:
    """Diversity of order q of a count (or proportion) vector.

    q = 0 counts the occupied classes, q = 1 is exp(Shannon entropy), and
    q -> infinity approaches 1 / max proportion. Zeros are ignored; the
    vector must contain at least one positive entry and q must be >= 0.
    """
    counts = np.asarray(counts, dtype=np.float64)
    if q < 0:
        raise ValueError(f"diversity order q must be non-negative, got {q}")
    if (counts < 0).any():
        raise ValueError("counts must be non-negative")
    total = counts.sum()
    if total == 0:
        raise ValueError("counts must contain at least one positive entry")
    p = counts[counts > 0] / total
    if q == 1:
        return float(math.exp(-(p * np.log(p)).sum()))
    return float((p**q).sum() ** (1.0 / (1.0 - q)))


def hill_profile(counts, orders) -> np.ndarray:
    """hill_number evaluated at each order in `orders`."""
    return np.array([hill_number(counts, q) for q in orders])


def population_to_csv(population: Population, path) -> None:
    """Write node_id, age, group rows (deterministic byte-for-byte)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node_id", "age", "group"])
        groups = population.groups
        for v in range(population.size):
            writer.writerow([v, int(population.ages[v]), int(groups[v])])
