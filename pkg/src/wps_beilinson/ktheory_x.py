"""Numerical K-theory of a hypersurface X of degree d in P(w).

Classes live in Z^w with basis e_i = [O_X(i)], 0 <= i < w. The Euler form is
chi(e_a, e_b) = chi_X(O(b - a)). Two operators act on the lattice:

* L, tensoring with O_X(1): e_i -> e_{i+1}, where e_w is rewritten through
  the Koszul relation sum_d c_d e_{w-d} = 0.
* K, the twist by O_X: x -> x - chi(O_X, x) e_0.

For d = w the composite G = L K satisfies G^w = Id. For d < w the identity
(G|_D)^d = Id holds on the sublattice D orthogonal to O_X(1..w-d).

This is a necessary-condition shadow. The twist span is not the full
numerical K-group.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass

import sympy

from .errors import InvarianceError, RangeError, SerreSkipped, WrongVariant
from .graded_core import Polynomial, WeightVector, _basis, dim_graded_piece, mult_matrix
from .linalg import dense_rank
from .report import VerificationReport


@dataclass(frozen=True)
class HypersurfaceModel:
    weights: WeightVector
    degree: int | None = None
    # replaces chi(O_X) inside K; only used by mutation tests
    chi0_override: int | None = None

    def __post_init__(self):
        if not isinstance(self.weights, WeightVector):
            object.__setattr__(self, "weights", WeightVector(tuple(self.weights)))
        if self.degree is None:
            object.__setattr__(self, "degree", self.weights.total)
        if self.weights.n < 2:
            raise RangeError("need n >= 2 so that X has positive dimension")
        if not 0 < self.degree <= self.weights.total:
            raise RangeError(f"degree {self.degree} outside (0, {self.weights.total}]")

    @property
    def w(self) -> int:
        return self.weights.total

    @property
    def n(self) -> int:
        return self.weights.n

    @property
    def calabi_yau(self) -> bool:
        return self.degree == self.w


def chi_X_twist(model: HypersurfaceModel, i: int) -> int:
    """chi(O_X(i)) from 0 -> O(i-d) -> O(i) -> O_X(i) -> 0 and the table on P."""
    w, d, n = model.weights, model.degree, model.n
    top = model.w
    return (dim_graded_piece(w, i) - dim_graded_piece(w, i - d)) + (-1) ** (n - 1) * (
        dim_graded_piece(w, d - top - i) - dim_graded_piece(w, -top - i)
    )


def random_form(w: WeightVector, d: int, seed: int = 0) -> Polynomial:
    rng = random.Random(seed)
    return Polynomial({m: rng.randint(1, 97) for m in _basis(w.weights, d)})


def chi_X_twist_explicit(model: HypersurfaceModel, i: int, seed: int = 0) -> int:
    """Independent check of chi_X_twist with an explicit random f.

    h^0(O_X(i)) = dim coker(f: S_{i-d} -> S_i) and h^{n-1}(O_X(i)) is the
    kernel of f on H^n, i.e. the cokernel of its dual f: S_{-i-w} -> S_{d-i-w}.
    """
    w, d, n, top = model.weights, model.degree, model.n, model.w
    f = random_form(w, d, seed)

    def coker(a: int) -> int:
        target = dim_graded_piece(w, a + d)
        if not target or not dim_graded_piece(w, a):
            return target
        return target - dense_rank(mult_matrix(w, f, a))

    return coker(i - d) + (-1) ** (n - 1) * coker(-i - top)


def recurrence_coefficients(w: WeightVector) -> list[int]:
    """Coefficients of prod_i (1 - t^{w_i}), c_0 .. c_w."""
    coeffs = [1]
    for wi in w.weights:
        nxt = coeffs + [0] * wi
        for k, c in enumerate(coeffs):
            nxt[k + wi] -= c
        coeffs = nxt
    return coeffs


def euler_gram(model: HypersurfaceModel) -> sympy.Matrix:
    """G[a][b] = chi(O_X(a), O_X(b)) = chi_X(O(b - a))."""
    return sympy.Matrix(model.w, model.w, lambda a, b: chi_X_twist(model, b - a))


@dataclass(frozen=True)
class OperatorMatrices:
    L: sympy.Matrix
    K: sympy.Matrix
    G: sympy.Matrix


def operator_matrices(model: HypersurfaceModel) -> OperatorMatrices:
    W = model.w
    c = recurrence_coefficients(model.weights)
    L = sympy.zeros(W, W)
    for i in range(W - 1):
        L[i + 1, i] = 1
    for d in range(1, W + 1):
        L[W - d, W - 1] = -c[d]
    chis = [chi_X_twist(model, i) for i in range(W)]
    if model.chi0_override is not None:
        chis[0] = model.chi0_override
    K = sympy.eye(W)
    for i in range(W):
        K[0, i] -= chis[i]
    return OperatorMatrices(L, K, L * K)


def minimal_period(G: sympy.Matrix, bound: int) -> int | None:
    P = sympy.eye(G.rows)
    for m in range(1, bound + 1):
        P = P * G
        if P == sympy.eye(G.rows):
            return m
    return None


def _as_lists(M: sympy.Matrix) -> list[list[int]]:
    return [[int(M[r, c]) for c in range(M.cols)] for r in range(M.rows)]


def verify_monodromy_identity(model: HypersurfaceModel) -> VerificationReport:
    if not model.calabi_yau:
        raise WrongVariant(f"degree {model.degree} != w = {model.w}; use verify_fano_identity")
    t0 = time.perf_counter()
    ops = operator_matrices(model)
    W = model.w
    report = VerificationReport("ktheory", model.weights.weights, {"degree": model.degree})
    report.details["identity"] = f"G^{W}=Id"
    report.details["matrix_G"] = _as_lists(ops.G)
    report.details["det_L"] = int(ops.L.det())
    report.details["minimal_period"] = minimal_period(ops.G, 4 * W)
    report.details["sublattice_rank"] = W
    if ops.G ** W != sympy.eye(W):
        report.fail(f"G^{W} != Id")
    report.details["serre_check"] = serre_check(model, sympy.eye(W), ops.G)
    report.caveats.append("lattice spanned by twists O_X(0..w-1); a necessary-condition shadow")
    report.seconds = time.perf_counter() - t0
    return report


# --- integer lattices -------------------------------------------------------------

def hermite_rows(rows: list[list[int]]) -> list[list[int]]:
    """Row Hermite normal form: positive pivots, entries above pivots reduced."""
    M = [list(r) for r in rows]
    out_row = 0
    ncols = len(M[0]) if M else 0
    for col in range(ncols):
        while True:
            live = [r for r in range(out_row, len(M)) if M[r][col]]
            if not live:
                break
            piv = min(live, key=lambda r: abs(M[r][col]))
            M[out_row], M[piv] = M[piv], M[out_row]
            done = True
            for r in range(out_row + 1, len(M)):
                q = M[r][col] // M[out_row][col]
                if q:
                    M[r] = [a - q * b for a, b in zip(M[r], M[out_row])]
                if M[r][col]:
                    done = False
            if done:
                break
        if out_row < len(M) and M[out_row][col]:
            if M[out_row][col] < 0:
                M[out_row] = [-a for a in M[out_row]]
            for r in range(out_row):
                q = M[r][col] // M[out_row][col]
                if q:
                    M[r] = [a - q * b for a, b in zip(M[r], M[out_row])]
            out_row += 1
    return [r for r in M if any(r)]


def integer_kernel(A: list[list[int]], ncols: int) -> list[list[int]]:
    """Z-basis (rows, Hermite-reduced) of {x in Z^ncols : A x = 0}.

    Row-reduce [A^T | I]; the unimodular transform rows whose A^T part vanishes
    span the saturated kernel.
    """
    aug = [[A[r][c] for r in range(len(A))] + [int(c == k) for k in range(ncols)] for c in range(ncols)]
    red = hermite_rows(aug)
    m = len(A)
    kernel = [r[m:] for r in red if not any(r[:m])]
    if len(kernel) != ncols - (sympy.Matrix(A).rank() if A else 0):
        raise AssertionError("kernel basis has the wrong rank")
    return hermite_rows(kernel)


def orthogonal_sublattice(model: HypersurfaceModel) -> sympy.Matrix:
    """Columns form a Z-basis of D = {x : chi(O_X(i), x) = 0, 0 < i <= w - d}."""
    W, d = model.w, model.degree
    if d == W:
        return sympy.eye(W)
    A = [[chi_X_twist(model, b - i) for b in range(W)] for i in range(1, W - d + 1)]
    basis = integer_kernel(A, W)
    B = sympy.Matrix(basis).T
    G = operator_matrices(model).G
    if not (sympy.Matrix(A) * G * B).is_zero_matrix:
        raise InvarianceError("G does not preserve the orthogonal sublattice")
    return B


def restrict(G: sympy.Matrix, B: sympy.Matrix) -> sympy.Matrix:
    """Matrix of G on the column span of B (assumed invariant), integral."""
    R = (B.T * B).inv() * B.T * G * B
    if B * R != G * B or any(not x.is_integer for x in R):
        raise InvarianceError("restriction is not an integral endomorphism of the sublattice")
    return R


# --- Serre operator -----------------------------------------------------------------

def _numerical_quotient(gram: sympy.Matrix):
    """A basis C of a complement of the radical, or None if left and right radicals differ."""
    right = gram.nullspace()
    left = gram.T.nullspace()
    rad = sympy.Matrix.hstack(*right) if right else sympy.zeros(gram.rows, 0)
    if left:
        if rad.cols != len(left) or sympy.Matrix.hstack(rad, *left).rank() != rad.cols:
            return None, rad
    cols, current = [], rad
    for k in range(gram.rows):
        trial = sympy.Matrix.hstack(current, sympy.eye(gram.rows)[:, k])
        if trial.rank() == trial.cols:
            cols.append(sympy.eye(gram.rows)[:, k])
            current = trial
    if not cols:
        return sympy.zeros(gram.rows, 0), rad
    return sympy.Matrix.hstack(*cols), rad


def serre_check(model: HypersurfaceModel, B: sympy.Matrix, GD: sympy.Matrix, flip: bool = False) -> dict:
    """Compare Sigma = Gram^-1 Gram^T with (-1)^(n-1) (G|_D)^(d-w) on D.

    When the Gram matrix on D is degenerate the strict check is skipped. The
    pairing identity chi(x, T y) = chi(y, x) for T = (-1)^(n-1) (G|_D)^(d-w)
    is then checked directly, and again on the quotient by the radical, where
    the form is nondegenerate.
    """
    gram = B.T * euler_gram(model) * B
    sign = (-1) ** (model.n - 1) * (-1 if flip else 1)
    T = sign * GD ** (model.degree - model.w)
    out: dict = {"sign": sign, "pairing_identity": gram * T == gram.T}
    if gram.det() != 0:
        sigma = gram.inv() * gram.T
        out["status"] = "pass" if sigma == T else "fail"
        return out
    out["status"] = "skipped"
    out["reason"] = str(SerreSkipped(f"Gram matrix on D has rank {gram.rank()} < {gram.rows}"))
    C, rad = _numerical_quotient(gram)
    if C is None:
        out["quotient"] = "radicals differ"
        return out
    out["quotient_rank"] = C.cols
    if not C.cols:
        out["quotient"] = "pass"
        return out
    basis = sympy.Matrix.hstack(C, rad)
    coords = basis.inv() * T * C
    Tq = coords[: C.cols, :]
    gq = C.T * gram * C
    out["quotient"] = "pass" if gq.inv() * gq.T == Tq else "fail"
    return out


def verify_fano_identity(model: HypersurfaceModel) -> VerificationReport:
    t0 = time.perf_counter()
    ops = operator_matrices(model)
    d = model.degree
    report = VerificationReport("fano", model.weights.weights, {"degree": d})
    report.details["identity"] = f"(G|_D)^{d}=Id"
    report.details["matrix_G"] = _as_lists(ops.G)
    try:
        B = orthogonal_sublattice(model)
        GD = restrict(ops.G, B)
    except InvarianceError as exc:
        report.details["sublattice_rank"] = None
        report.details["minimal_period"] = None
        report.details["serre_check"] = {"status": "not run"}
        report.fail(str(exc))
        report.seconds = time.perf_counter() - t0
        return report
    report.details["sublattice_basis"] = _as_lists(B.T)
    report.details["sublattice_rank"] = B.cols
    report.details["matrix_G_D"] = _as_lists(GD)
    report.details["minimal_period"] = minimal_period(GD, 4 * model.w)
    if GD ** d != sympy.eye(B.cols):
        report.fail(f"(G|_D)^{d} != Id on the rank-{B.cols} sublattice")
    serre = serre_check(model, B, GD)
    report.details["serre_check"] = serre
    if serre["status"] == "fail" or serre.get("quotient") == "fail" or not serre["pairing_identity"]:
        report.fail(f"Serre check failed: {serre}")
    report.caveats.append("lattice spanned by twists O_X(0..w-1); a necessary-condition shadow")
    report.seconds = time.perf_counter() - t0
    return report


def ktheory_json(report: VerificationReport) -> dict:
    """The flat report shape {weights, degree, identity, pass, matrix_G, ...}."""
    det = report.details
    return {
        "weights": list(report.weights),
        "degree": report.params["degree"],
        "identity": det["identity"],
        "pass": report.passed,
        "matrix_G": det["matrix_G"],
        "sublattice_rank": det["sublattice_rank"],
        "serre_check": det["serre_check"],
        "minimal_period": det["minimal_period"],
        "failures": report.failures,
    }
