"""Fitting connection preferences to a target degree pattern.

The objective of a candidate preference is the Jensen-Shannon divergence
between the degree distribution of networks grown under it and a target
distribution, averaged over R replicate networks. Replicates use common
random numbers: replicate r of every candidate shares the same encounter
and noise streams, so objective differences reflect the preferences, not
the draws, and a rerun of the whole search is bit-identical.

The search is two-phase: a coarse scan over all sign combinations crossed
with a small weight ladder, then a local pattern search on the two weights
around the grid winner (signs frozen), probing +/- step on each axis and
halving the step when nothing improves. Weight 0 is a legal grid value, so
every pure rule is itself a candidate and the winner can never be worse
than any of them. The budget caps evaluate() calls; repeated visits to a
candidate are served from cache without spending budget.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .features import group_counts, make_population, sample_ages, Population
from .netgen import generate_network
from .netmetrics import PatternDistribution, degree_distribution, js_divergence
from .scenario import Preference, RngPolicy, Scenario

LEVEL_GRID: tuple[int, ...] = (-1, 0, 1)
WEIGHT_GRID: tuple[float, ...] = (0.0, 0.02, 0.05, 0.1, 0.25, 0.5, 1.0)
REFINE_STEP = 0.05
REFINE_FLOOR = 0.005


@dataclass(frozen=True)
class Candidate:
    """A preference with its fitted objective."""

    preference: Preference
    objective: float
    objective_std: float
    replicates: int


@dataclass(frozen=True)
class EvalRecord:
    """One replicate of one objective evaluation, in evaluation order."""

    level: int
    level_weight: float
    difference: int
    difference_weight: float
    replicate: int
    js: float


@dataclass(frozen=True)
class OptimizeResult:
    best: Candidate
    log: tuple[EvalRecord, ...]
    evaluations: int


def evaluate(
    preference: Preference,
    target: PatternDistribution,
    scenario: Scenario,
    replicates: int = 5,
    ages: np.ndarray | None = None,
) -> tuple[float, list[float]]:
    """Mean and per-replicate degree-pattern divergence from the target for
    networks grown under `preference`.

    Replicate r always uses the encounter and noise substreams indexed r,
    whatever the candidate, so candidates are compared under common random
    numbers. Ages can be passed in to avoid resampling them per call (they
    do not depend on the preference)."""
    if replicates < 1:
        raise ValueError(f"replicates must be positive, got {replicates}")
    policy = RngPolicy(scenario.master_seed)
    if ages is None:
        population = make_population(
            scenario.age_shape, scenario.node_count, preference, policy.stream("feature-gen")
        )
    else:
        population = Population.homogeneous(ages, preference)
    values = []
    for r in range(replicates):
        net = generate_network(
            population,
            scenario,
            policy.stream("encounter", r),
            policy.stream("noise", r),
        )
        values.append(js_divergence(degree_distribution(net), target))
    return float(np.mean(values)), values


def _clip01(x: float) -> float:
    return min(1.0, max(0.0, x))


def optimize(
    scenario: Scenario,
    target: PatternDistribution,
    budget: int,
    replicates: int = 5,
) -> OptimizeResult:
    """Search for the preference whose networks best match the target
    degree pattern, spending at most `budget` objective evaluations."""
    if budget < 1:
        raise ValueError(f"budget must be positive, got {budget}")
    if replicates < 1:
        raise ValueError(f"replicates must be positive, got {replicates}")
    policy = RngPolicy(scenario.master_seed)
    ages = sample_ages(
        group_counts(scenario.age_shape, scenario.node_count),
        policy.stream("feature-gen"),
    )

    log: list[EvalRecord] = []
    cache: dict[tuple, tuple[float, float]] = {}
    spent = 0

    def run(pref: Preference) -> tuple[float, float] | None:
        """Objective (mean, std) of a candidate, None once budget is gone."""
        nonlocal spent
        key = (
            pref.level,
            round(pref.level_weight, 10),
            pref.difference,
            round(pref.difference_weight, 10),
        )
        if key in cache:
            return cache[key]
        if spent >= budget:
            return None
        spent += 1
        mean, values = evaluate(pref, target, scenario, replicates, ages=ages)
        for r, v in enumerate(values):
            log.append(
                EvalRecord(
                    pref.level,
                    pref.level_weight,
                    pref.difference,
                    pref.difference_weight,
                    r,
                    v,
                )
            )
        result = (mean, float(np.std(values)))
        cache[key] = result
        return result

    best_pref: Preference | None = None
    best: tuple[float, float] | None = None

    exhausted = False
    for level in LEVEL_GRID:
        for level_weight in WEIGHT_GRID:
            for difference in LEVEL_GRID:
                for difference_weight in WEIGHT_GRID:
                    pref = Preference(level, level_weight, difference, difference_weight)
                    result = run(pref)
                    if result is None:
                        exhausted = True
                        break
                    if best is None or result[0] < best[0]:
                        best_pref, best = pref, result
                if exhausted:
                    break
            if exhausted:
                break
        if exhausted:
            break

    assert best_pref is not None and best is not None  # budget >= 1

    step = REFINE_STEP
    while spent < budget and step >= REFINE_FLOOR:
        probes = (
            (step, 0.0),
            (-step, 0.0),
            (0.0, step),
            (0.0, -step),
        )
        improved: tuple[Preference, tuple[float, float]] | None = None
        for d_lw, d_dw in probes:
            pref = Preference(
                best_pref.level,
                _clip01(best_pref.level_weight + d_lw),
                best_pref.difference,
                _clip01(best_pref.difference_weight + d_dw),
            )
            result = run(pref)
            if result is None:
                break
            if result[0] < best[0] and (improved is None or result[0] < improved[1][0]):
                improved = (pref, result)
        if improved is not None:
            best_pref, best = improved
        else:
            step /= 2.0

    return OptimizeResult(
        best=Candidate(best_pref, best[0], best[1], replicates),
        log=tuple(log),
        evaluations=spent,
    )


def log_to_csv(log, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["level", "level_weight", "difference", "difference_weight", "replicate", "js"]
        )
        for rec in log:
            writer.writerow(
                [
                    rec.level,
                    repr(rec.level_weight),
                    rec.difference,
                    repr(rec.difference_weight),
                    rec.replicate,
                    repr(rec.js),
                ]
            )


def result_to_json(result: OptimizeResult, path) -> None:
    pref = result.best.preference
    payload = {
        "best": {
            "level": pref.level,
            "level_weight": pref.level_weight,
            "difference": pref.difference,
            "difference_weight": pref.difference_weight,
        },
        "objective": result.best.objective,
        "objective_std": result.best.objective_std,
        "replicates": result.best.replicates,
        "evaluations": result.evaluations,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
