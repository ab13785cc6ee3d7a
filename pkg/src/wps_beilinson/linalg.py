"""Exact rank of sparse matrices over Q or F_p.

Matrices are given as ``{(row, col): value}``. The bipartite row/column graph
is split into connected components first; the complexes built here are
multigraded, so components stay small even when the strand is large.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .graded_core import FieldConfig, RATIONALS

SparseMatrix = Mapping[tuple[int, int], object]


def _components(entries: SparseMatrix) -> list[list[tuple[tuple[int, int], object]]]:
    parent: dict = {}

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for (r, c) in entries:
        a, b = ("r", r), ("c", c)
        parent.setdefault(a, a)
        parent.setdefault(b, b)
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups: dict = {}
    for key, v in entries.items():
        groups.setdefault(find(("r", key[0])), []).append((key, v))
    return list(groups.values())


def _rank_block(block, prime: int | None) -> int:
    rows: dict[int, dict[int, object]] = {}
    for (r, c), v in block:
        if prime is None:
            v = Fraction(v)
        else:
            v = int(v) % prime
            if v == 0:
                continue
        rows.setdefault(r, {})[c] = v
    rank = 0
    # pivot on columns; rows are eliminated as dicts
    pivots: dict[int, dict[int, object]] = {}
    for row in rows.values():
        row = {c: v for c, v in row.items() if v != 0}
        while row:
            col = min(row)
            piv = pivots.get(col)
            if piv is None:
                pivots[col] = row
                rank += 1
                break
            factor = row[col] if prime is None else row[col] % prime
            scale = factor / piv[col] if prime is None else factor * pow(piv[col], -1, prime) % prime
            for c, pv in piv.items():
                nv = row.get(c, 0) - scale * pv
                if prime is not None:
                    nv %= prime
                if nv == 0:
                    row.pop(c, None)
                else:
                    row[c] = nv
    return rank


def sparse_rank(entries: SparseMatrix, field: FieldConfig = RATIONALS) -> int:
    entries = {k: v for k, v in entries.items() if v != 0}
    return sum(_rank_block(block, field.prime) for block in _components(entries))


def dense_rank(mat: list[list], field: FieldConfig = RATIONALS) -> int:
    return sparse_rank(
        {(i, j): v for i, row in enumerate(mat) for j, v in enumerate(row) if v != 0}, field
    )
