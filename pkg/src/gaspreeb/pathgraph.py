"""Shortest path through a leveled graph of candidate points."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class PathGraph:
    """Candidate points by level between two fixed end points.

    Edges join every point of level ``i`` to every point of level
    ``i + 1`` with Euclidean weight; the start joins level 0 only and the
    end joins the last level only.
    """

    start: np.ndarray
    end: np.ndarray
    levels: tuple

    @property
    def n_paths(self):
        return int(np.prod([len(lv) for lv in self.levels], dtype=object))

    def path_points(self, choice):
        mid = [self.levels[i][c] for i, c in enumerate(choice)]
        return np.vstack([self.start, *mid, self.end]) if mid else np.vstack([self.start, self.end])


def polyline_length(points):
    return float(np.linalg.norm(np.diff(points, axis=0), axis=1).sum())


def _dist(a, b):
    return np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2))


def solve(graph):
    """Minimum-length choice of one point per level.

    The graph is a DAG ordered by level, so the single-source shortest
    path is computed exactly by one backward sweep of cost-to-go values.
    The forward walk takes the smallest index among equal costs, which
    yields the lexicographically smallest optimal index sequence.

    Returns ``(choice, length)`` with ``choice[i]`` indexing level ``i``.
    """
    levels = [np.asarray(lv, dtype=np.float64).reshape(-1, 3) for lv in graph.levels]
    if any(len(lv) == 0 for lv in levels):
        raise ValueError("every level needs at least one point")
    if not levels:
        return [], float(np.linalg.norm(graph.end - graph.start))
    start, end = np.asarray(graph.start, float), np.asarray(graph.end, float)
    cost = [None] * len(levels)
    cost[-1] = np.linalg.norm(levels[-1] - end, axis=1)
    for i in range(len(levels) - 2, -1, -1):
        cost[i] = (_dist(levels[i], levels[i + 1]) + cost[i + 1][None, :]).min(axis=1)
    total0 = np.linalg.norm(levels[0] - start, axis=1) + cost[0]
    choice = [int(np.argmin(total0))]
    for i in range(1, len(levels)):
        prev = levels[i - 1][choice[-1]]
        step = np.linalg.norm(levels[i] - prev, axis=1) + cost[i]
        choice.append(int(np.argmin(step)))
    return choice, float(total0[choice[0]])


def shortest_arc(levels, start, end):
    """Polyline ``start -> one point per level -> end`` of minimum length."""
    graph = PathGraph(np.asarray(start, float), np.asarray(end, float), tuple(levels))
    choice, _ = solve(graph)
    return graph.path_points(choice), choice
