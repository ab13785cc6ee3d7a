"""Fast strand homology for complexes with monomial differentials.

If every differential entry is a single monomial, generators can be given
multidegree shifts ``s_g`` so that the element u of generator g sits in
multidegree ``u + s_g`` and every differential preserves it. Each strand then
splits into pieces indexed by a multidegree alpha; the piece only depends on
alpha capped coordinatewise at the largest shift, so pieces are memoized.

Piece ranks are taken modulo a large prime first. Over Z the homology mod p
bounds the rational homology from above in every degree and both have the
same Euler characteristic, so a piece whose mod-p homology sits in at most one
degree has exactly that rational homology. Other pieces are redone over Q.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction

import numpy as np

from .complexes import P, TwistComplex
from .errors import AmbientError
from .graded_core import RATIONALS, FieldConfig, _basis
from .linalg import sparse_rank

CERT_PRIME = 2_147_483_647


def fine_grading(C: TwistComplex):
    """Multidegree shifts ``{(j, idx): s}`` or None if the entries are not monomial."""
    nv = C.weights.nvars
    adj: dict = {}
    for j, mat in C.diffs.items():
        for (r, c), poly in mat.items():
            if len(poly.terms) != 1:
                return None
            (mono,) = poly.terms
            adj.setdefault((j, c), []).append(((j + 1, r), tuple(-x for x in mono)))
            adj.setdefault((j + 1, r), []).append(((j, c), mono))
    shifts: dict = {}
    for j, ts in C.terms.items():
        for idx in range(len(ts)):
            start = (j, idx)
            if start in shifts:
                continue
            shifts[start] = (0,) * nv
            component = [start]
            queue = deque([start])
            while queue:
                node = queue.popleft()
                s = shifts[node]
                for other, delta in adj.get(node, ()):
                    t = tuple(a + b for a, b in zip(s, delta))
                    if other not in shifts:
                        shifts[other] = t
                        component.append(other)
                        queue.append(other)
                    elif shifts[other] != t:
                        return None
            # normalize so that shifts are >= 0 and pieces are indexed by alpha >= 0
            low = [min(shifts[node][i] for node in component) for i in range(nv)]
            for node in component:
                shifts[node] = tuple(a - b for a, b in zip(shifts[node], low))
    return shifts


def _rank_mod(rows: list[dict[int, int]], p: int) -> int:
    pivots: dict[int, dict[int, int]] = {}
    rank = 0
    for row in rows:
        row = {c: v % p for c, v in row.items() if v % p}
        while row:
            col = min(row)
            piv = pivots.get(col)
            if piv is None:
                inv = pow(row[col], -1, p)
                pivots[col] = {c: v * inv % p for c, v in row.items()}
                rank += 1
                break
            f = row[col]
            for c, v in piv.items():
                nv = (row.get(c, 0) - f * v) % p
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
    return rank


class StrandEngine:
    """Strand homology of one complex on P, memoized across strands."""

    def __init__(self, C: TwistComplex, field: FieldConfig = RATIONALS):
        if C.ambient != P:
            raise AmbientError("strands are defined for complexes on P")
        self.C = C
        self.field = field
        self.wt = C.weights.weights
        self.shifts = fine_grading(C)
        self._memo: dict = {}
        self.exact_fallbacks = 0
        if self.shifts is not None:
            self._prepare()

    @property
    def graded(self) -> bool:
        return self.shifts is not None

    def _prepare(self):
        C, wt = self.C, self.wt
        nodes = sorted(self.shifts)
        self.node_index = {node: i for i, node in enumerate(nodes)}
        self.node_deg = np.array([j for j, _ in nodes])
        S = np.array([self.shifts[node] for node in nodes], dtype=np.int64).reshape(len(nodes), -1)
        self.S = S
        twist = np.array([C[j][idx].twist[0] for j, idx in nodes])
        # a_g + |s_g|_w is constant along differentials
        self.klass = twist + S @ np.array(wt)
        self.cap = S.max(axis=0) if len(nodes) else np.zeros(len(wt), int)
        self.out_edges: list[list[tuple[int, object]]] = [[] for _ in nodes]
        self.integral = True
        for j, mat in C.diffs.items():
            for (r, c), poly in mat.items():
                (coeff,) = poly.terms.values()
                if Fraction(coeff).denominator == 1:
                    coeff = int(coeff)
                else:
                    self.integral = False
                self.out_edges[self.node_index[(j, c)]].append((self.node_index[(j + 1, r)], coeff))

    def _piece(self, klass: int, capped: tuple[int, ...]):
        key = (klass, capped)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        mask = (self.klass == klass) & (self.S <= np.array(capped)).all(axis=1)
        members = np.nonzero(mask)[0]
        local = {int(g): i for i, g in enumerate(members)}
        dims: dict[int, int] = {}
        rows_by_deg: dict[int, dict[int, dict[int, object]]] = {}
        for g in members:
            j = int(self.node_deg[g])
            dims[j] = dims.get(j, 0) + 1
            for h, coeff in self.out_edges[g]:
                if h in local:
                    rows_by_deg.setdefault(j, {}).setdefault(local[h], {})[local[int(g)]] = coeff
        result = self._homology(dims, rows_by_deg)
        self._memo[key] = result
        return result

    def _homology(self, dims, rows_by_deg):
        def ranks_with(rank_fn):
            return {j: rank_fn(list(rows.values())) for j, rows in rows_by_deg.items()}

        def homology(ranks):
            return {j: n - ranks.get(j, 0) - ranks.get(j - 1, 0) for j, n in dims.items()}

        if self.field.prime is not None:
            ranks = ranks_with(lambda rows: _rank_mod(rows, self.field.prime))
            return dims, ranks, homology(ranks)
        if self.integral:
            ranks = ranks_with(lambda rows: _rank_mod(rows, CERT_PRIME))
            h = homology(ranks)
            if sum(1 for v in h.values() if v) <= 1:
                return dims, ranks, h
        self.exact_fallbacks += 1
        ranks = {
            j: sparse_rank({(r, c): v for r, row in rows.items() for c, v in row.items()}, RATIONALS)
            for j, rows in rows_by_deg.items()
        }
        return dims, ranks, homology(ranks)

    def homology(self, e: int):
        from .sheaf_cohomology import StrandReport, strand_homology

        if not self.graded:
            return strand_homology(self.C, e, self.field)
        dims: dict[int, int] = {j: 0 for j in self.C.degrees()}
        ranks: dict[int, int] = {j: 0 for j in self.C.degrees()}
        hom: dict[int, int] = {j: 0 for j in self.C.degrees()}
        cap = tuple(int(x) for x in self.cap)
        for klass in sorted(set(int(x) for x in self.klass)):
            for alpha in _basis(self.wt, e + klass):
                capped = tuple(min(a, c) for a, c in zip(alpha, cap))
                pd, pr, ph = self._piece(klass, capped)
                for j, v in pd.items():
                    dims[j] += v
                for j, v in pr.items():
                    ranks[j] += v
                for j, v in ph.items():
                    hom[j] += v
        return StrandReport(e, dims, ranks, hom)
