"""Ranked track-to-measurement assignments.

Cost matrices have one row per track and ``m + n`` columns: the first
``m`` columns are measurements, column ``m + i`` is row ``i``'s private
missed-detection column (set to +inf for every other row).  Forbidden
pairings carry +inf.  An assignment gives every row exactly one column,
using each measurement column at most once.

Assignments are reported as maps ``row -> j`` with ``j = 0`` for a miss
and ``j in 1..m`` for measurement ``j - 1``, together with their total
cost.  Results come out in nondecreasing cost with deterministic
tie-breaking.
"""

import heapq
import itertools

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import UsageError

# Below this problem size exhaustive enumeration is cheaper than Murty's
# algorithm and exact by construction.
_ENUMERATE_LIMIT = 16


def _to_map(cols, m):
    return tuple(0 if c >= m else c + 1 for c in cols)


def _solve(cost):
    """Best assignment of all rows, or None if no finite one exists."""
    try:
        rows, cols = linear_sum_assignment(cost)
    except ValueError:
        return None
    value = float(cost[rows, cols].sum())
    if not np.isfinite(value):
        return None
    order = np.argsort(rows)
    return tuple(int(c) for c in cols[order]), value


def enumerate_assignments(cost, k=None):
    """All finite assignments by recursive enumeration, sorted by cost."""
    cost = np.asarray(cost, dtype=float)
    n = cost.shape[0]
    m = cost.shape[1] - n
    if m < 0:
        raise UsageError("cost matrix needs one miss column per row")
    results = []

    def recurse(row, used, cols, acc):
        if row == n:
            results.append((_to_map(cols, m), acc))
            return
        for j in range(m):
            c = cost[row, j]
            if j not in used and np.isfinite(c):
                recurse(row + 1, used | {j}, cols + (j,), acc + float(c))
        c = cost[row, m + row]
        if np.isfinite(c):
            recurse(row + 1, used, cols + (m + row,), acc + float(c))

    recurse(0, frozenset(), (), 0.0)
    results.sort(key=lambda t: (t[1], t[0]))
    if k is not None:
        results = results[: int(k)]
    return results


def murty_assignments(cost, k):
    """K best assignments via Murty partitioning over the Hungarian solver."""
    cost = np.asarray(cost, dtype=float)
    n = cost.shape[0]
    m = cost.shape[1] - n
    if m < 0:
        raise UsageError("cost matrix needs one miss column per row")
    if n == 0:
        return [((), 0.0)]
    first = _solve(cost)
    if first is None:
        return []
    seq = itertools.count()
    heap = [(first[1], next(seq), first[0], cost)]
    out = []
    while heap and len(out) < k:
        value, _, cols, matrix = heapq.heappop(heap)
        out.append((_to_map(cols, m), value))
        # Partition: child i bans row i's current column and pins the
        # assignments of all earlier rows.
        for i in range(n):
            child = matrix.copy()
            child[i, cols[i]] = np.inf
            for r in range(i):
                keep = child[r, cols[r]]
                child[r, :] = np.inf
                child[r, cols[r]] = keep
            sol = _solve(child)
            if sol is not None:
                heapq.heappush(heap, (sol[1], next(seq), sol[0], child))
    return out


def ranked_assignments(cost, k, method="auto"):
    """Up to ``k`` best assignments of a padded cost matrix.

    ``method`` selects the search: ``"enumerate"`` lists every valid
    assignment, ``"murty"`` runs Murty's algorithm, ``"auto"`` enumerates
    when ``rows * measurements <= 16`` and uses Murty otherwise.
    """
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2:
        raise UsageError("cost must be a matrix")
    n = cost.shape[0]
    m = cost.shape[1] - n
    if m < 0:
        raise UsageError("cost matrix needs one miss column per row")
    k = int(k)
    if k <= 0:
        return []
    if method == "auto":
        method = "enumerate" if n * m <= _ENUMERATE_LIMIT else "murty"
    if method == "enumerate":
        return enumerate_assignments(cost, k)
    if method == "murty":
        return murty_assignments(cost, k)
    raise UsageError("unknown assignment method %r" % (method,))
