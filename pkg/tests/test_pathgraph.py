import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaspreeb.pathgraph import PathGraph, polyline_length, shortest_arc, solve


def exhaustive(levels, start, end):
    """Shortest path by enumerating every choice; ties go to the smallest tuple."""
    best, best_choice = np.inf, None
    for choice in itertools.product(*(range(len(lv)) for lv in levels)):
        pts = [start, *(levels[i][c] for i, c in enumerate(choice)), end]
        length = sum(np.linalg.norm(pts[i + 1] - pts[i]) for i in range(len(pts) - 1))
        if length < best:
            best, best_choice = length, list(choice)
    return best_choice, best


def test_straight_line_through_collinear_points():
    levels = [np.array([[0.0, 1, 1], [1, 0, 0], [5, 5, 5]]), np.array([[9.0, 9, 9], [2, 0, 0]])]
    pts, choice = shortest_arc(levels, [0.0, 0, 0], [3.0, 0, 0])
    assert choice == [1, 1] and polyline_length(pts) == 3.0


def test_no_levels_and_empty_level():
    g = PathGraph(np.zeros(3), np.ones(3), ())
    assert solve(g) == ([], pytest.approx(np.sqrt(3)))
    with pytest.raises(ValueError):
        solve(PathGraph(np.zeros(3), np.ones(3), (np.zeros((0, 3)),)))


def test_tie_break_prefers_smaller_index():
    # two mirror-image candidates give equal lengths
    levels = [np.array([[1.0, 1, 0], [1.0, -1, 0]])]
    _, choice = shortest_arc(levels, [0.0, 0, 0], [2.0, 0, 0])
    assert choice == [0]


def test_n_paths():
    g = PathGraph(np.zeros(3), np.zeros(3), (np.zeros((3, 3)), np.zeros((4, 3))))
    assert g.n_paths == 12


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_matches_enumeration(seed, depth):
    rng = np.random.default_rng(seed)
    levels = [rng.normal(size=(rng.integers(1, 7), 3)) for _ in range(depth)]
    start, end = rng.normal(size=3), rng.normal(size=3)
    choice, length = solve(PathGraph(start, end, tuple(levels)))
    want_choice, want = exhaustive(levels, start, end)
    assert choice == want_choice
    assert length == pytest.approx(want, rel=1e-12)
