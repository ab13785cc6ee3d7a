"""The weighted Beilinson resolution of the diagonal and its companions.

Term labels are ``(l, I)``: ``l`` is the twist index of the outer factor
(``0`` for the plain Koszul complex) and ``I`` the sorted index subset.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .complexes import (
    P,
    PxP,
    ChainMap,
    FreeGradedComplex,
    Term,
    TwistComplex,
    box_sheaf_complex,
    mapping_cone,
)
from .errors import RangeError, ShapeError
from .graded_core import BiEntry, Polynomial, WeightVector, koszul_sign, remove
from .report import VerificationReport


def _koszul_like(w: WeightVector, l: int, keep) -> TwistComplex:
    terms, index = {}, {}
    for size in range(w.nvars + 1):
        j = -size
        ts = [Term((-l - w.weight_of(I),), (l, I)) for I in w.subsets(size) if keep(I)]
        terms[j] = tuple(ts)
        index[j] = {t.label[1]: k for k, t in enumerate(ts)}
    diffs = {}
    for j, ts in terms.items():
        mat = {}
        for c, t in enumerate(ts):
            I = t.label[1]
            for i in I:
                r = index.get(j + 1, {}).get(remove(I, i))
                if r is not None:
                    mat[(r, c)] = Polynomial.variable(w.nvars, i, koszul_sign(I, i))
        diffs[j] = mat
    return TwistComplex(w, P, terms, diffs)


def build_koszul(w: WeightVector) -> TwistComplex:
    """Koszul complex of (x_0..x_n): degree -|I| holds O(-w_I)."""
    K = _koszul_like(w, 0, lambda I: True)
    return K


def build_B(w: WeightVector, l: int) -> TwistComplex:
    """Subcomplex of K(-l) keeping the terms with w_I <= -l."""
    if not -w.total < l <= 0:
        raise RangeError(f"l={l} outside (-{w.total}, 0]")
    return _koszul_like(w, l, lambda I: w.weight_of(I) <= -l)


def build_mu(w: WeightVector, k: int, R_next: TwistComplex) -> ChainMap:
    """The map O(k) [x] B_k[-1] -> R_{k+1} whose cone is R_k."""
    if not -w.total < k < 0:
        raise RangeError(f"k={k} outside (-{w.total}, 0)")
    if R_next.ambient != PxP:
        raise ShapeError("R_{k+1} must live on P x P")
    source = box_sheaf_complex(k, build_B(w, k), shift_by=-1)
    maps = {}
    for j, ts in source.terms.items():
        lookup = {t.label: r for r, t in enumerate(R_next[j])}
        mat = {}
        for c, t in enumerate(ts):
            I = t.label[1]
            for i in I:
                r = lookup.get((k + w.weights[i], remove(I, i)))
                if r is not None:
                    mat[(r, c)] = BiEntry.x_left(w.nvars, i, -koszul_sign(I, i))
        maps[j] = mat
    return ChainMap(source, R_next, maps)


def build_R0(w: WeightVector) -> TwistComplex:
    return box_sheaf_complex(0, build_B(w, 0))


def build_R(w: WeightVector, k: int) -> TwistComplex:
    if not -w.total < k <= 0:
        raise RangeError(f"k={k} outside (-{w.total}, 0]")
    return ResolutionBundle(w).R(k)


def closed_form_differential(w: WeightVector, k: int) -> TwistComplex:
    """R_k written down directly: terms O(l, -l-w_I), k <= l <= 0, w_I <= -l."""
    if not -w.total < k <= 0:
        raise RangeError(f"k={k} outside (-{w.total}, 0]")
    terms, index = {}, {}
    for size in range(w.nvars + 1):
        j = -size
        ts = [
            Term((l, -l - w.weight_of(I)), (l, I))
            for l in range(k, 1)
            for I in w.subsets(size)
            if w.weight_of(I) <= -l
        ]
        terms[j] = tuple(ts)
        index[j] = {t.label: r for r, t in enumerate(ts)}
    diffs = {}
    for j, ts in terms.items():
        mat = {}
        tgt = index.get(j + 1, {})
        for c, t in enumerate(ts):
            l, I = t.label
            for i in I:
                sign = koszul_sign(I, i)
                rest = remove(I, i)
                r = tgt.get((l, rest))
                if r is not None:
                    mat[(r, c)] = BiEntry.x_right(w.nvars, i, sign)
                r = tgt.get((l + w.weights[i], rest))
                if r is not None:
                    mat[(r, c)] = BiEntry.x_left(w.nvars, i, -sign)
        diffs[j] = mat
    return TwistComplex(w, PxP, terms, diffs)


@dataclass
class ResolutionBundle:
    """R_k for 1-w <= k <= 0 built by the cone recursion, with the maps mu_k.

    The augmentation R_{1-w} -> O_Delta is the family of multiplication maps
    f_l: O(l, -l) -> O_Delta, one per degree-0 summand; it is kept formal and
    recorded as the list of those summands' labels.
    """

    weights: WeightVector
    _R: dict[int, TwistComplex] = field(default_factory=dict, repr=False)
    _mu: dict[int, ChainMap] = field(default_factory=dict, repr=False)

    def R(self, k: int) -> TwistComplex:
        w = self.weights
        if not -w.total < k <= 0:
            raise RangeError(f"k={k} outside (-{w.total}, 0]")
        if 0 not in self._R:
            self._R[0] = build_R0(w)
        top = min(self._R)
        while top > k:
            top -= 1
            mu = build_mu(w, top, self._R[top + 1])
            self._mu[top] = mu
            self._R[top] = mapping_cone(mu)
        return self._R[k]

    def mu(self, k: int) -> ChainMap:
        self.R(k)
        return self._mu[k]

    @property
    def resolution(self) -> TwistComplex:
        return self.R(1 - self.weights.total)

    def augmentation_labels(self) -> list[tuple]:
        return [t.label for t in self.resolution[0]]


def verify_augmentation(w: WeightVector, R: TwistComplex | None = None) -> VerificationReport:
    """Check f o d^{-1} = 0 where f collapses every O(l, -l) by multiplication."""
    if R is None:
        R = ResolutionBundle(w).resolution
    report = VerificationReport("augmentation", w.weights)
    cols: dict[int, Polynomial] = {}
    for (r, c), entry in R.d(-1).items():
        cols[c] = cols.get(c, Polynomial()) + entry.collapse()
    for c, t in enumerate(R[-1]):
        total = cols.get(c, Polynomial())
        if total:
            report.fail(f"summand {t.label}: f o d^-1 = {total!r}")
    report.details["checked_summands"] = R.rank(-1)
    return report


# --- the pair (M_m, eps_m) ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MmPair:
    weights: WeightVector
    m: int
    pushforward: FreeGradedComplex
    rho: ChainMap
    M: FreeGradedComplex
    eps: ChainMap


def build_rho(w: WeightVector, m: int, pushed: FreeGradedComplex) -> ChainMap:
    """Augmentation of pr_* R_{1-m}(m, 0) onto O(m) (degree 0 only).

    Each generator S_{l+m} (x) O(-l) maps by minus the multiplication map. The
    sign makes eps_m^0 = id commute with the Koszul differential of B_{-m}
    against the cone convention; up to isomorphism the cone is unchanged.
    """
    target = FreeGradedComplex(w, P, {0: (Term((m,), ("O(m)",)),)}, {})
    mat = {}
    for c, g in enumerate(pushed[0]):
        coeff = g.label[-1]
        mat[(0, c)] = Polynomial.monomial(coeff, -1)
    return ChainMap(pushed, target, {0: mat})


def build_Mm(w: WeightVector, m: int, bundle: ResolutionBundle | None = None) -> MmPair:
    from .sheaf_cohomology import fm2_apply, as_free

    if not 0 < m < w.total:
        raise RangeError(f"m={m} outside (0, {w.total})")
    bundle = bundle or ResolutionBundle(w)
    pushed = fm2_apply(bundle.R(1 - m), m)
    rho = build_rho(w, m, pushed)
    M = mapping_cone(rho)
    B = as_free(build_B(w, -m))

    maps = {}
    for j, ts in B.terms.items():
        mat = {}
        if j == 0:
            # B_{-m}^0 = O(m) -> the O(m) summand, placed after M's pushforward part
            mat[(len(M[0]) - 1, 0)] = Polynomial.one(w.nvars)
        else:
            lookup = {g.label: r for r, g in enumerate(M[j])}
            for c, t in enumerate(ts):
                I = t.label[1]
                for i in I:
                    l = w.weights[i] - m
                    x_i = tuple(1 if v == i else 0 for v in range(w.nvars))
                    r = lookup.get((l, remove(I, i), x_i))
                    if r is not None:
                        mat[(r, c)] = Polynomial.one(w.nvars) * -koszul_sign(I, i)
        maps[j] = mat
    eps = ChainMap(B, M, maps)
    return MmPair(w, m, pushed, rho, M, eps)
