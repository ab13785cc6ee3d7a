"""Bounded complexes of line-bundle sums on P(w) and P(w) x P(w).

A complex stores, for each cohomological degree j, an ordered tuple of
:class:`Term` objects and a sparse differential ``{(row, col): entry}`` from
degree j to j+1 (rows index the target terms, columns the source terms).
Entries are :class:`Polynomial` on P and :class:`BiEntry` on P x P.

Sign conventions: ``A[k]^i = A^{i+k}`` with differential ``(-1)^k d^{i+k}``;
the mapping cone of ``f: A -> B`` has ``Mc^i = A^{i+1} (+) B^i`` and block
differential ``[[-d_A, 0], [f, d_B]]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping

from .errors import AmbientError, ChainMapError, DegreeError, ShapeError
from .graded_core import BiEntry, Polynomial, WeightVector
from .report import VerificationReport

P, PxP = "P", "PxP"


@dataclass(frozen=True)
class Term:
    """A summand O(a) (twist of length 1) or O(a, b) (length 2)."""

    twist: tuple[int, ...]
    label: tuple = ()

    def shifted(self, *delta: int) -> "Term":
        return Term(tuple(t + d for t, d in zip(self.twist, delta)), self.label)

    def to_json(self) -> dict:
        return {"twist": list(self.twist), "label": _label_json(self.label)}


def _label_json(label):
    if isinstance(label, tuple):
        return [_label_json(x) for x in label]
    return label


def _label_from_json(data):
    if isinstance(data, list):
        return tuple(_label_from_json(x) for x in data)
    return data


def compose(second: Mapping, first: Mapping) -> dict:
    """Sparse product second * first."""
    by_row: dict[int, list] = {}
    for (m, c), v in first.items():
        by_row.setdefault(m, []).append((c, v))
    out: dict = {}
    for (r, m), v2 in second.items():
        for c, v1 in by_row.get(m, ()):
            key = (r, c)
            out[key] = out[key] + v2 * v1 if key in out else v2 * v1
    return {k: v for k, v in out.items() if v}


def subtract(a: Mapping, b: Mapping) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out[k] - v if k in out else -v
    return {k: v for k, v in out.items() if v}


@dataclass(frozen=True, eq=False)
class TwistComplex:
    weights: WeightVector
    ambient: str
    terms: Mapping[int, tuple[Term, ...]]
    diffs: Mapping[int, Mapping[tuple[int, int], Polynomial]] = field(default_factory=dict)

    def __post_init__(self):
        if self.ambient not in (P, PxP):
            raise AmbientError(f"unknown ambient {self.ambient!r}")
        terms = {j: tuple(ts) for j, ts in self.terms.items() if ts}
        diffs = {}
        for j, mat in self.diffs.items():
            mat = {k: v for k, v in mat.items() if v}
            if mat:
                diffs[j] = mat
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "diffs", diffs)
        self._validate()

    # --- structure ----------------------------------------------------------

    @property
    def arity(self) -> int:
        return 1 if self.ambient == P else 2

    def __getitem__(self, j: int) -> tuple[Term, ...]:
        return self.terms.get(j, ())

    def d(self, j: int) -> Mapping:
        return self.diffs.get(j, {})

    def degrees(self) -> range:
        if not self.terms:
            return range(0)
        return range(min(self.terms), max(self.terms) + 1)

    def rank(self, j: int) -> int:
        return len(self[j])

    def index_of(self, j: int, label) -> int:
        for idx, t in enumerate(self[j]):
            if t.label == label:
                return idx
        raise KeyError(label)

    def _entry_degree(self, entry):
        if self.ambient == P:
            return (entry.degree(self.weights.weights),)
        return entry.bidegree(self.weights.weights)

    def _validate(self):
        for t in (t for ts in self.terms.values() for t in ts):
            if len(t.twist) != self.arity:
                raise AmbientError(f"term {t} does not live on {self.ambient}")
        for j, mat in self.diffs.items():
            src, tgt = self[j], self[j + 1]
            for (r, c), entry in mat.items():
                if not (0 <= r < len(tgt) and 0 <= c < len(src)):
                    raise ShapeError(f"entry ({r},{c}) of d^{j} out of range")
                if self.ambient == PxP and not isinstance(entry, BiEntry):
                    raise DegreeError("P x P entries must be BiEntry")
                expected = tuple(a - b for a, b in zip(tgt[r].twist, src[c].twist))
                got = self._entry_degree(entry)
                if got != expected:
                    raise DegreeError(
                        f"d^{j} entry {tgt[r].label}<-{src[c].label} has degree {got}, "
                        f"expected {expected}"
                    )

    def replace(self, **changes) -> "TwistComplex":
        data = dict(weights=self.weights, ambient=self.ambient, terms=self.terms, diffs=self.diffs)
        data.update(changes)
        return type(self)(**data)

    def with_entry(self, j: int, row: int, col: int, entry) -> "TwistComplex":
        """Copy with one differential entry replaced (used by mutation tests)."""
        diffs = {k: dict(v) for k, v in self.diffs.items()}
        diffs.setdefault(j, {})[(row, col)] = entry
        return self.replace(diffs=diffs)

    # --- comparison and serialization ----------------------------------------

    def labeled_form(self) -> dict:
        """Order-independent description keyed by term labels."""
        terms = {j: {t.label: t.twist for t in ts} for j, ts in self.terms.items()}
        entries = {}
        for j, mat in self.diffs.items():
            for (r, c), v in mat.items():
                entries[(j, self[j][c].label, self[j + 1][r].label)] = v
        return {"terms": terms, "entries": entries}

    def same_labeled_data(self, other: "TwistComplex") -> bool:
        return self.ambient == other.ambient and self.labeled_form() == other.labeled_form()

    def __eq__(self, other):
        if not isinstance(other, TwistComplex):
            return NotImplemented
        return (
            self.weights == other.weights
            and self.ambient == other.ambient
            and self.terms == other.terms
            and self.diffs == other.diffs
        )

    def to_dict(self) -> dict:
        return {
            "weights": list(self.weights.weights),
            "ambient": self.ambient,
            "terms": {str(j): [t.to_json() for t in self[j]] for j in sorted(self.terms)},
            "differentials": {
                str(j): [
                    {"row": r, "col": c, "entries": v.to_json()}
                    for (r, c), v in sorted(self.diffs[j].items())
                ]
                for j in sorted(self.diffs)
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "TwistComplex":
        entry_cls = BiEntry if data["ambient"] == PxP else Polynomial
        terms = {
            int(j): tuple(Term(tuple(t["twist"]), _label_from_json(t["label"])) for t in ts)
            for j, ts in data["terms"].items()
        }
        diffs = {
            int(j): {(e["row"], e["col"]): entry_cls.from_json(e["entries"]) for e in es}
            for j, es in data["differentials"].items()
        }
        return cls(WeightVector(tuple(data["weights"])), data["ambient"], terms, diffs)

    def describe(self) -> str:
        lines = [f"{self.ambient} complex over w=({self.weights})"]
        for j in self.degrees():
            tw = ", ".join("O(" + ",".join(map(str, t.twist)) + ")" for t in self[j])
            lines.append(f"  [{j}] rank {self.rank(j)}: {tw}")
        return "\n".join(lines)


class FreeGradedComplex(TwistComplex):
    """Complex of free graded S-modules: every generator is a twist O(a).

    Generator labels conventionally end with the coefficient monomial the
    generator came from (see :func:`sheaf_cohomology.fm1_apply`).
    """

    def __init__(self, weights, ambient=P, terms=None, diffs=None):
        super().__init__(weights, ambient, terms or {}, diffs or {})
        if self.ambient != P:
            raise AmbientError("free graded complexes live on P")


@dataclass(frozen=True, eq=False)
class ChainMap:
    source: TwistComplex
    target: TwistComplex
    maps: Mapping[int, Mapping[tuple[int, int], Polynomial]]

    def __post_init__(self):
        if self.source.ambient != self.target.ambient:
            raise AmbientError("source and target live on different ambients")
        maps = {}
        for j, mat in self.maps.items():
            mat = {k: v for k, v in mat.items() if v}
            for (r, c) in mat:
                if not (0 <= r < self.target.rank(j) and 0 <= c < self.source.rank(j)):
                    raise ShapeError(f"entry ({r},{c}) of f^{j} out of range")
            if mat:
                maps[j] = mat
        object.__setattr__(self, "maps", maps)
        # degrees are forced by the endpoints
        for j, mat in maps.items():
            for (r, c), entry in mat.items():
                expected = tuple(
                    a - b for a, b in zip(self.target[j][r].twist, self.source[j][c].twist)
                )
                got = self.source._entry_degree(entry)
                if got != expected:
                    raise DegreeError(f"f^{j} entry ({r},{c}) has degree {got}, expected {expected}")

    def __getitem__(self, j: int) -> Mapping:
        return self.maps.get(j, {})

    def with_entry(self, j: int, row: int, col: int, entry) -> "ChainMap":
        maps = {k: dict(v) for k, v in self.maps.items()}
        maps.setdefault(j, {})[(row, col)] = entry
        return ChainMap(self.source, self.target, maps)


# --- checks -------------------------------------------------------------------

def check_d_squared(C: TwistComplex) -> VerificationReport:
    report = VerificationReport("d_squared", C.weights.weights, {"ambient": C.ambient})
    for j in sorted(C.diffs):
        comp = compose(C.d(j + 1), C.d(j))
        for (r, c), v in sorted(comp.items()):
            report.fail(
                f"d^{j + 1} d^{j}: {C[j][c].label} -> {C[j + 2][r].label} is {v!r}"
            )
    return report


def is_chain_map(f: ChainMap) -> VerificationReport:
    A, B = f.source, f.target
    report = VerificationReport("chain_map", A.weights.weights)
    if A.weights != B.weights:
        raise ShapeError("chain map between complexes over different weights")
    degrees = set(A.terms) | set(B.terms)
    for j in sorted(degrees):
        lhs = compose(B.d(j), f[j])
        rhs = compose(f[j + 1], A.d(j))
        for (r, c), v in sorted(subtract(lhs, rhs).items()):
            report.fail(f"degree {j}: {A[j][c].label} -> {B[j + 1][r].label} defect {v!r}")
    return report


# --- constructions ----------------------------------------------------------------

def shift(C: TwistComplex, k: int) -> TwistComplex:
    sign = -1 if k % 2 else 1
    terms = {j - k: ts for j, ts in C.terms.items()}
    diffs = {j - k: {key: v * sign for key, v in mat.items()} for j, mat in C.diffs.items()}
    return C.replace(terms=terms, diffs=diffs)


def twist_by(C: TwistComplex, a: int, b: int | None = None) -> TwistComplex:
    delta = (a,) if b is None else (a, b)
    if len(delta) != C.arity:
        raise AmbientError(f"twist arity {len(delta)} does not match ambient {C.ambient}")
    terms = {j: tuple(t.shifted(*delta) for t in ts) for j, ts in C.terms.items()}
    return C.replace(terms=terms)


def mapping_cone(f: ChainMap) -> TwistComplex:
    report = is_chain_map(f)
    if not report:
        raise ChainMapError("; ".join(report.failures[:3]))
    A, B = f.source, f.target
    degrees = set(j - 1 for j in A.terms) | set(B.terms)
    terms, diffs = {}, {}
    for i in degrees:
        terms[i] = A[i + 1] + B[i]
    for i in degrees:
        na_src, na_tgt = len(A[i + 1]), len(A[i + 2])
        mat = {}
        for (r, c), v in A.d(i + 1).items():
            mat[(r, c)] = -v
        for (r, c), v in f[i + 1].items():
            mat[(na_tgt + r, c)] = v
        for (r, c), v in B.d(i).items():
            mat[(na_tgt + r, na_src + c)] = v
        diffs[i] = mat
    return A.replace(terms=terms, diffs=diffs)


def box_sheaf_complex(a: int, C: TwistComplex, shift_by: int = 0) -> TwistComplex:
    """O(a) [x] C on P x P, optionally shifted by ``shift_by``.

    An entry p of C becomes 1 (x) p; the shift sign follows :func:`shift`.
    """
    if C.ambient != P:
        raise AmbientError("box product expects a complex on P")
    nv = C.weights.nvars
    zero = (0,) * nv
    terms = {j: tuple(Term((a, t.twist[0]), t.label) for t in ts) for j, ts in C.terms.items()}
    diffs = {
        j: {key: BiEntry({zero + k: v for k, v in p.terms.items()}) for key, p in mat.items()}
        for j, mat in C.diffs.items()
    }
    boxed = TwistComplex(C.weights, PxP, terms, diffs)
    return shift(boxed, shift_by) if shift_by else boxed


def swap_factors(C: TwistComplex) -> TwistComplex:
    """Pull back along the factor swap of P x P: O(a, b) -> O(b, a)."""
    if C.ambient != PxP:
        raise AmbientError("swap_factors expects a complex on P x P")
    terms = {j: tuple(Term(t.twist[::-1], t.label) for t in ts) for j, ts in C.terms.items()}
    diffs = {j: {k: v.swapped() for k, v in mat.items()} for j, mat in C.diffs.items()}
    return C.replace(terms=terms, diffs=diffs)


def identity_map(C: TwistComplex) -> ChainMap:
    nv = C.weights.nvars
    one = Polynomial.one(nv) if C.ambient == P else BiEntry.one(2 * nv)
    return ChainMap(C, C, {j: {(i, i): one for i in range(len(ts))} for j, ts in C.terms.items()})


def serialize_sparse(mat: Mapping) -> list[dict[str, Any]]:
    return [{"row": r, "col": c, "entries": v.to_json()} for (r, c), v in sorted(mat.items())]
