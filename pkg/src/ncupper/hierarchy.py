"""Moment-matrix assembly, symmetric-pencil generalized eigenvalue solving,
and the lambda/eta hierarchy drivers.

Both hierarchies produce weakly decreasing upper bounds on the minimal
eigenvalue of a self-adjoint polynomial:
  * lambda_d: largest lambda with M_d(f) - lambda * M_d(1) >= 0 over the
    degree-<=d word basis, M_d assembled from the order-d state.
  * eta_d: same pencil on the Hankel matrices of the scalar moments of f.
Moment entries are exact rationals; floats appear only in the eigensolve.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .algebra import (AlgebraSpec, NCPolynomial, Word, is_self_adjoint,
                      multiply, star, words_up_to)
from .errors import (BudgetExceededError, IndefiniteBError, InputError,
                     KernelViolationError)
from .states import StateSpec, evaluate_poly

DEFAULT_TOL = 1e-9
DEFAULT_WORD_BUDGET = 10 ** 6


@dataclass
class MomentMatrix:
    basis: list[Word]
    entries: list[list[Fraction]]  # exactly symmetric

    @property
    def dim(self) -> int:
        return len(self.basis)

    def to_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.entries])

    def digest_source(self) -> str:
        return ";".join(",".join(str(x) for x in row) for row in self.entries)


@dataclass
class PencilReport:
    lam: float
    rank_b: int
    kernel_residual: float
    tol: float


@dataclass
class OrderRecord:
    d: int
    basis_size: int
    state_description: str
    lam: float | None = None
    eta: float | None = None
    lam_report: PencilReport | None = None
    eta_report: PencilReport | None = None
    wall_time: float = 0.0
    pencil_digest: str = ""


@dataclass
class HierarchyReport:
    orders: list[OrderRecord] = field(default_factory=list)


StateFamily = Callable[[int], StateSpec]


def moment_matrix(f: NCPolynomial, state: StateSpec, basis: Sequence[Word],
                  algebra: AlgebraSpec, budget: int | None = None,
                  threads: int = 1) -> MomentMatrix:
    """M(f) = [phi(u* f v)] over the basis words, exact and symmetric."""
    if not is_self_adjoint(f, algebra):
        raise InputError("moment_matrix requires f = f*")
    basis = list(basis)
    if len(set(basis)) != len(basis):
        raise InputError("basis words must be duplicate-free")
    n = len(basis)
    stars = [star(NCPolynomial.from_word(u), algebra) for u in basis]
    ufv = [multiply(su, f, algebra) for su in stars]

    def entry(ij):
        i, j = ij
        p = multiply(ufv[i], NCPolynomial.from_word(basis[j]), algebra)
        return evaluate_poly(state, p, algebra, budget)

    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(entry, pairs))
    else:
        values = [entry(ij) for ij in pairs]
    entries = [[Fraction(0)] * n for _ in range(n)]
    for (i, j), v in zip(pairs, values):
        entries[i][j] = v
        entries[j][i] = v
    return MomentMatrix(basis, entries)


def scalar_moments(f: NCPolynomial, state: StateSpec, max_power: int,
                   algebra: AlgebraSpec, budget: int | None = None,
                   word_budget: int = DEFAULT_WORD_BUDGET) -> list[Fraction]:
    """[phi(f^0), ..., phi(f^max_power)], exact."""
    if not is_self_adjoint(f, algebra):
        raise InputError("scalar_moments requires f = f*")
    moments = [Fraction(1)]
    power = NCPolynomial.one()
    for _ in range(max_power):
        power = multiply(power, f, algebra)
        if len(power.terms) > word_budget:
            raise BudgetExceededError(
                f"support of f^k exceeded {word_budget} words")
        moments.append(evaluate_poly(state, power, algebra, budget))
    return moments


def max_shift(A: np.ndarray, B: np.ndarray, tol: float = DEFAULT_TOL) -> PencilReport:
    """Largest lambda with A - lambda*B >= 0 for symmetric A and PSD B.

    B is eigendecomposed; directions with eigenvalue <= tol * max(eig B) are
    treated as kernel and must also annihilate A (states guarantee
    ker B <= ker A); the answer is the minimal eigenvalue of A whitened by B
    on the complement.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape or A.shape[0] != A.shape[1]:
        raise InputError("max_shift needs same-size square matrices")
    w, v = np.linalg.eigh(B)
    wmax = float(w[-1])
    if wmax <= 0:
        wmax = 0.0
    if w[0] < -tol * max(wmax, 1.0):
        raise IndefiniteBError(f"B has eigenvalue {w[0]:.3e} < 0 beyond tol")
    thresh = tol * max(wmax, 0.0)
    keep = w > thresh
    norm_a = float(np.linalg.norm(A, 2))
    kernel_residual = 0.0
    if not np.all(keep):
        Z = v[:, ~keep]
        kernel_residual = float(np.max(np.linalg.norm(A @ Z, axis=0))) if Z.size else 0.0
        if kernel_residual > tol * max(norm_a, 1.0):
            raise KernelViolationError(
                f"kernel of B does not annihilate A (residual {kernel_residual:.3e})")
    if not np.any(keep):
        raise IndefiniteBError("B is numerically zero; pencil is unbounded")
    W = v[:, keep] / np.sqrt(w[keep])
    C = W.T @ A @ W
    C = (C + C.T) / 2
    lam = float(np.linalg.eigvalsh(C)[0])
    return PencilReport(lam=lam, rank_b=int(np.count_nonzero(keep)),
                        kernel_residual=kernel_residual, tol=tol)


def describe_state(state: StateSpec) -> str:
    return repr(state)


def lambda_sequence(f: NCPolynomial, algebra: AlgebraSpec,
                    subset: Sequence[str], state_family: StateFamily,
                    d_max: int, tol: float = DEFAULT_TOL,
                    budget: int | None = None,
                    threads: int = 1) -> HierarchyReport:
    """lambda_d for d = 1..d_max: pencil of M_{G,d}(f) against M_{G,d}(1)
    under the order-d state."""
    if d_max < 1:
        raise InputError("d_max must be >= 1")
    report = HierarchyReport()
    for d in range(1, d_max + 1):
        t0 = time.perf_counter()
        basis = words_up_to(algebra, subset, d)
        psi = state_family(d)
        A = moment_matrix(f, psi, basis, algebra, budget, threads)
        B = moment_matrix(NCPolynomial.one(), psi, basis, algebra, budget,
                          threads)
        pr = max_shift(A.to_float(), B.to_float(), tol)
        rec = OrderRecord(d=d, basis_size=len(basis),
                          state_description=describe_state(psi),
                          lam=pr.lam, lam_report=pr,
                          wall_time=time.perf_counter() - t0,
                          pencil_digest=_digest(A, B))
        report.orders.append(rec)
    return report


def eta_sequence(f: NCPolynomial, algebra: AlgebraSpec,
                 state_family: StateFamily, d_max: int,
                 tol: float = DEFAULT_TOL, budget: int | None = None,
                 word_budget: int = DEFAULT_WORD_BUDGET) -> HierarchyReport:
    """eta_d for d = 1..d_max: Hankel pencil (phi(f^{i+j+1})) against
    (phi(f^{i+j})), i, j = 0..d, under the order-d state."""
    if d_max < 1:
        raise InputError("d_max must be >= 1")
    report = HierarchyReport()
    for d in range(1, d_max + 1):
        t0 = time.perf_counter()
        psi = state_family(d)
        m = scalar_moments(f, psi, 2 * d + 1, algebra, budget, word_budget)
        A = [[m[i + j + 1] for j in range(d + 1)] for i in range(d + 1)]
        B = [[m[i + j] for j in range(d + 1)] for i in range(d + 1)]
        Af = np.array([[float(x) for x in row] for row in A])
        Bf = np.array([[float(x) for x in row] for row in B])
        pr = max_shift(Af, Bf, tol)
        rec = OrderRecord(d=d, basis_size=d + 1,
                          state_description=describe_state(psi),
                          eta=pr.lam, eta_report=pr,
                          wall_time=time.perf_counter() - t0,
                          pencil_digest=_digest_rows(A) + "|" + _digest_rows(B))
        report.orders.append(rec)
    return report


def _digest_rows(rows) -> str:
    import hashlib
    src = ";".join(",".join(str(x) for x in row) for row in rows)
    return hashlib.sha256(src.encode()).hexdigest()[:16]


def _digest(A: MomentMatrix, B: MomentMatrix) -> str:
    import hashlib
    src = A.digest_source() + "|" + B.digest_source()
    return hashlib.sha256(src.encode()).hexdigest()[:16]
