"""The independence polynomial ``psi`` as a quadratic form.

``psi(p) = 0`` exactly when the effects of the GST game are pairwise
independent.  This module evaluates ``psi`` from its defining sum, builds
the Hessian ``H_n`` (so ``psi(p) = p^T Q_n p`` with ``Q_n = H_n / 2``),
and determines the inertia of ``H_n`` two independent ways:

* exactly, by an ``LDL^T`` factorization of ``A = H_n + eps * B`` (``B`` the
  anti-diagonal exchange matrix) and Sylvester's law of inertia;
* in floating point, by a cyclic Jacobi eigensolver.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._numbers import Scalar, all_exact, sign
from .errors import EigenConvergenceError, InertiaDisagreement, InvalidInput, PivotBreakdown

#: relative threshold below which a float eigenvalue counts as zero
ZERO_EIGENVALUE_RTOL = 1e-10


def binom(a: int, b: int) -> int:
    return math.comb(a, b) if 0 <= b <= a else 0


def _half_power(n: int, exact: bool):
    N = 2 ** (n - 1)
    return (Fraction(1, N) if exact else 1.0 / N), N


def psi(p: Sequence) -> Scalar:
    """Evaluate the independence polynomial from its defining sums.

    ``psi(p) = (S / N)^2 - T / N`` with ``N = 2^(n-1)``,
    ``S = sum_k C(n-1,k) p_{k+1}`` and
    ``T = sum_k C(n-2,k) (p_{k+2}^2 + p_{k+1} p_{n-k-1})``.
    Entries outside ``[0, 1]`` are allowed.
    """
    n = len(p)
    if n < 2:
        raise InvalidInput("psi needs at least two coordinates")
    exact = all_exact(p)
    inv_N, _ = _half_power(n, exact)
    p = [Fraction(v) for v in p] if exact else [float(v) for v in p]
    s = sum(binom(n - 1, k) * p[k] for k in range(n))
    t = sum(binom(n - 2, k) * (p[k + 1] ** 2 + p[k] * p[n - k - 2]) for k in range(n - 1))
    return (s * inv_N) ** 2 - t * inv_N


def psi_gradient(p: Sequence) -> list:
    """Partial derivatives of ``psi``, term by term.

    ``d psi / d p_i = (2/N^2) C(n-1,i-1) S - (2/N) [C(n-2,i-2) p_i + C(n-2,i-1) p_{n-i}]``
    where the first bracket term is absent for ``i = 1`` and the second for
    ``i = n``.
    """
    n = len(p)
    exact = all_exact(p)
    inv_N, _ = _half_power(n, exact)
    p = [Fraction(v) for v in p] if exact else [float(v) for v in p]
    s = sum(binom(n - 1, k) * p[k] for k in range(n))
    grad = []
    for i in range(1, n + 1):
        g = 2 * inv_N**2 * binom(n - 1, i - 1) * s
        if i != 1:
            g -= 2 * inv_N * binom(n - 2, i - 2) * p[i - 1]
        if i != n:
            g -= 2 * inv_N * binom(n - 2, i - 1) * p[n - i - 1]
        grad.append(g)
    return grad


@dataclass(frozen=True)
class QuadInfo:
    """Exact matrices attached to ``psi`` for a given ``n``.

    ``vvT`` is the rank-one part ``v v^T`` (``v_i = sqrt(2)/N C(n-1,i-1)``),
    stored directly since ``v`` itself is irrational.
    """

    n: int
    H: tuple
    Q: tuple
    vvT: tuple
    X: tuple

    def H_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.H])

    def Q_float(self) -> np.ndarray:
        return self.H_float() / 2.0

    def X_scaled(self) -> list[list[int]]:
        """``X`` times ``N/2 = 2^(n-2)``: an integer matrix of binomials."""
        f = 2 ** (self.n - 2)
        out = [[x * f for x in row] for row in self.X]
        assert all(v.denominator == 1 for row in out for v in row)
        return [[int(v) for v in row] for row in out]

    def to_dict(self) -> dict:
        from ._numbers import to_json

        return {
            "n": self.n,
            "H": [[to_json(x) for x in row] for row in self.H],
            "X_scaled": self.X_scaled(),
            "scaled_by": "2^{n-2}",
            "scale_factor": 2 ** (self.n - 2),
        }


def hessian(n: int) -> QuadInfo:
    """Exact Hessian of ``psi``.

    ``H_ij = (2/N^2) C(n-1,i-1) C(n-1,j-1) - X_ij`` where ``X`` holds
    ``(2/N) C(n-2,i-2)`` on the diagonal (``i >= 2``) and ``(2/N) C(n-2,i-1)``
    on the anti-diagonal ``i + j = n``; at ``i = j = n/2`` both contribute.
    """
    if not isinstance(n, int) or n < 3:
        raise InvalidInput(f"the Hessian is defined here for n >= 3, got {n!r}")
    N = 2 ** (n - 1)
    vvT = tuple(
        tuple(Fraction(2 * binom(n - 1, i) * binom(n - 1, j), N * N) for j in range(n)) for i in range(n)
    )
    X = [[Fraction(0)] * n for _ in range(n)]
    for i in range(1, n + 1):
        X[i - 1][i - 1] += Fraction(2 * binom(n - 2, i - 2), N)
        j = n - i
        if j >= 1:
            X[i - 1][j - 1] += Fraction(2 * binom(n - 2, i - 1), N)
    X = tuple(tuple(row) for row in X)
    H = tuple(tuple(vvT[i][j] - X[i][j] for j in range(n)) for i in range(n))
    Q = tuple(tuple(h / 2 for h in row) for row in H)
    return QuadInfo(n, H, Q, vvT, X)


def hessian_float(n: int) -> np.ndarray:
    return hessian(n).H_float()


def bilinear(M, p: Sequence, q: Sequence):
    n = len(p)
    return sum(p[i] * M[i][j] * q[j] for i in range(n) for j in range(n) if M[i][j])


def matvec(M, p: Sequence) -> list:
    return [sum(M[i][j] * p[j] for j in range(len(p))) for i in range(len(M))]


# -- exact linear algebra ---------------------------------------------------


def exact_rank(M) -> int:
    """Rank of a rational matrix by fraction-free (Bareiss) elimination."""
    rows = [list(r) for r in M]
    if not rows:
        return 0
    den = math.lcm(*(Fraction(x).denominator for r in rows for x in r))
    A = [[int(Fraction(x) * den) for x in r] for r in rows]
    m, n = len(A), len(A[0])
    rank, prev = 0, 1
    for col in range(n):
        piv = next((r for r in range(rank, m) if A[r][col] != 0), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        for r in range(rank + 1, m):
            for c in range(col + 1, n):
                A[r][c] = (A[rank][col] * A[r][c] - A[r][col] * A[rank][c]) // prev
            A[r][col] = 0
        prev = A[rank][col]
        rank += 1
        if rank == m:
            break
    return rank


def leading_minors(M) -> list[Fraction]:
    """All leading principal minors, each by its own exact determinant."""
    out = []
    for k in range(1, len(M) + 1):
        out.append(_det([list(r[:k]) for r in M[:k]]))
    return out


def _det(A) -> Fraction:
    A = [[Fraction(x) for x in r] for r in A]
    n, det = len(A), Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            if f:
                for k in range(c, n):
                    A[r][k] -= f * A[c][k]
    return det


def rank_X(n: int) -> int:
    return exact_rank(hessian(n).X)


def rank_H(n: int) -> int:
    return exact_rank(hessian(n).H)


# -- perturbed LDL^T ----------------------------------------------------------


@dataclass(frozen=True)
class Inertia:
    n_pos: int
    n_neg: int
    n_zero: int

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.n_pos, self.n_neg, self.n_zero)

    def to_dict(self) -> dict:
        return {"n_pos": self.n_pos, "n_neg": self.n_neg, "n_zero": self.n_zero}


@dataclass(frozen=True)
class LDLTrace:
    epsilon: Fraction
    D: tuple
    L: tuple
    A: tuple
    #: ``(pivot, uncorrected closed form, corrected closed form)`` for ``D_{n//2+1}``; None for n < 5
    closed_forms: tuple | None = None

    def signs(self) -> list[int]:
        return [sign(d) for d in self.D]

    def reconstruct(self) -> list[list[Fraction]]:
        n = len(self.D)
        return [
            [sum(self.L[i][k] * self.D[k] * self.L[j][k] for k in range(n)) for j in range(n)]
            for i in range(n)
        ]


def perturbed(n: int, eps: Fraction) -> tuple:
    """``A = H_n + eps * B`` with ``B_ij = 1`` iff ``i + j = n + 1``."""
    H = hessian(n).H
    return tuple(
        tuple(H[i][j] + (eps if i + j == n - 1 else 0) for j in range(n)) for i in range(n)
    )


def ldl(A) -> tuple[tuple, tuple]:
    """Exact ``A = L diag(D) L^T`` by the textbook recursions (no pivoting).

    ``D_j = A_jj - sum_{k<j} L_jk^2 D_k`` and
    ``L_ij = (A_ij - sum_{k<j} L_ik L_jk D_k) / D_j`` for ``i > j``.
    """
    n = len(A)
    D: list = [None] * n
    L = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for j in range(n):
        D[j] = Fraction(A[j][j]) - sum((L[j][k] ** 2 * D[k] for k in range(j)), Fraction(0))
        if D[j] == 0:
            raise PivotBreakdown(f"leading principal minor {j + 1} vanishes")
        for i in range(j + 1, n):
            s = Fraction(A[i][j]) - sum((L[i][k] * L[j][k] * D[k] for k in range(j)), Fraction(0))
            L[i][j] = s / D[j]
    return tuple(D), tuple(tuple(r) for r in L)


def epsilon_select(n: int, max_tries: int = 64) -> Fraction:
    """First ``eps = 2^-j`` (``j = 4, 8, 12, ...``) with every leading minor of ``H + eps B`` nonzero."""
    if n < 3:
        raise InvalidInput("n must be >= 3")
    for t in range(1, max_tries + 1):
        eps = Fraction(1, 2 ** (4 * t))
        try:
            ldl(perturbed(n, eps))
        except PivotBreakdown:
            continue
        return eps
    raise PivotBreakdown(f"no admissible epsilon found for n={n} in {max_tries} tries")


def inertia_ldl(n: int, eps: Fraction | None = None) -> tuple[Inertia, LDLTrace]:
    """Inertia of ``A = H_n + eps B`` read off the signs of ``D``.

    When ``eps`` is omitted it is chosen by :func:`epsilon_select`.  For
    ``n >= 6`` the pivot pattern ``D_1 > 0``, ``D_i < 0`` (``2 <= i <= n//2``),
    ``D_{n//2+1} > 0`` is checked; a violation raises ``PivotBreakdown``.
    """
    if not isinstance(n, int) or n < 3:
        raise InvalidInput(f"n must be an integer >= 3, got {n!r}")
    eps = epsilon_select(n) if eps is None else Fraction(eps)
    if eps <= 0:
        raise InvalidInput("epsilon must be positive")
    A = perturbed(n, eps)
    D, L = ldl(A)
    trace = LDLTrace(eps, D, L, A)
    h = n // 2
    pattern_ok = D[0] > 0 and all(D[i] < 0 for i in range(1, h))
    if n >= 5:
        pattern_ok = pattern_ok and D[h] > 0
    if not pattern_ok:
        raise PivotBreakdown(f"pivot sign pattern violated for n={n}: {[sign(d) for d in D]}")
    if n >= 5:
        uncorrected = middle_pivot(n, eps)
        corrected = middle_pivot(n, eps, corrected=True)
        if D[h] != corrected:
            raise PivotBreakdown(f"n={n}: pivot {D[h]} differs from its closed form {corrected}")
        trace = LDLTrace(eps, D, L, A, (D[h], uncorrected, corrected))
    pos = sum(d > 0 for d in D)
    return Inertia(pos, n - pos, 0), trace


def middle_pivot(n: int, eps: Fraction, corrected: bool = False) -> Fraction:
    """Closed form for the pivot ``D_{n//2+1}`` of ``H_n + eps B``.

    Odd ``n >= 5``: ``(2/N) C(n-2, h) * 2/(h-1) + eps`` with ``h = n//2``.
    Even ``n >= 6``: ``(2/N) C(n-2, t-1) (n-1)/(t(t-2)) + eps^2 N / (2 c)``
    with ``t = n/2``.  The default takes ``c = C(n-2, t-2)``, which ignores the second diagonal term of
    ``H_tt`` at ``t = n/2``; ``corrected=True`` uses the actual pivot
    ``D_t = -(2/N) C(n-1, t-1)``, i.e. ``c = C(n-1, t-1)``.
    """
    eps = Fraction(eps)
    N = 2 ** (n - 1)
    h = n // 2
    if n % 2:
        if n < 5:
            raise InvalidInput("odd closed form needs n >= 5")
        return Fraction(2, N) * binom(n - 2, h) * Fraction(2, h - 1) + eps
    if n < 6:
        raise InvalidInput("even closed form needs n >= 6")
    t = h
    main = Fraction(2, N) * binom(n - 2, t - 1) * Fraction(n - 1, t * (t - 2))
    c = binom(n - 1, t - 1) if corrected else binom(n - 2, t - 2)
    return main + eps**2 * N / (2 * c)


def inertia_from_ldl(n: int, max_halvings: int = 40) -> tuple[Inertia, list[Fraction]]:
    """Inertia of ``H_n`` by shrinking ``eps`` until the LDL sign counts settle.

    ``A 1 = eps 1`` holds exactly (rows of ``H_n`` sum to zero and ``B 1 = 1``),
    so one positive pivot of ``A`` belongs to the kernel direction of
    ``H_n``; the nullity itself comes from exact elimination.  The counts
    must agree for ``eps`` and two successive halvings.
    """
    nullity = n - rank_H(n)
    eps = epsilon_select(n)
    history: list[tuple[Fraction, tuple]] = []
    for _ in range(max_halvings):
        try:
            inert, _trace = inertia_ldl(n, eps)
        except PivotBreakdown:
            eps /= 2
            continue
        history.append((eps, (inert.n_pos, inert.n_neg)))
        if len(history) >= 3 and len({h[1] for h in history[-3:]}) == 1:
            pos, neg = history[-1][1]
            result = Inertia(pos - nullity, neg, nullity)
            return result, [h[0] for h in history]
        eps /= 2
    raise PivotBreakdown(f"LDL inertia did not stabilize for n={n}")


# -- Jacobi eigensolver ------------------------------------------------------


def _orient(vec: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(vec) > np.abs(vec).max() * (1 - 1e-9)))
    return -vec if vec[k] < 0 else vec


def jacobi_eigh(M, tol: float = 1e-13, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a real symmetric matrix.

    Returns ``(values, vectors)`` with eigenvalues descending and
    eigenvectors as columns, each oriented so its largest entry is
    positive.  Iterates until the off-diagonal Frobenius norm is below
    ``tol``.
    """
    A = np.array(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInput("eigen_sym needs a square matrix")
    if not np.all(np.isfinite(A)):
        raise InvalidInput("matrix has non-finite entries")
    if not np.allclose(A, A.T, rtol=0, atol=1e-12 * max(1.0, np.abs(A).max())):
        raise InvalidInput("eigen_sym needs a symmetric matrix")
    if tol <= 0:
        raise InvalidInput("tol must be positive")
    A = (A + A.T) / 2
    n = A.shape[0]
    V = np.eye(n)

    def off(a):
        return float(np.linalg.norm(a - np.diag(np.diag(a))))

    for _ in range(max_sweeps):
        if off(A) < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                diff = A[q, q] - A[p, p]
                if abs(apq) < abs(diff) * 1e-36:
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J, rotating rows/columns p and q
                ap, aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                ap, aq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * ap - s * aq
                A[q, :] = s * ap + c * aq
                A[p, q] = A[q, p] = 0.0
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    else:
        if off(A) >= tol:
            raise EigenConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps (off={off(A):.3e})")
    values = np.diag(A).copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    V = V[:, order]
    for k in range(n):
        V[:, k] = _orient(V[:, k])
    return values, V


def eigen_sym(M, tol: float = 1e-13) -> list[tuple[float, np.ndarray]]:
    """Eigenpairs of a symmetric matrix, sorted by descending eigenvalue."""
    values, V = jacobi_eigh(M, tol)
    return [(float(values[k]), V[:, k].copy()) for k in range(len(values))]


def inertia_from_eigen(M, rtol: float = ZERO_EIGENVALUE_RTOL) -> Inertia:
    A = np.array(M, dtype=float)
    values, _ = jacobi_eigh(A)
    thr = rtol * np.abs(A).max()
    pos = int(np.sum(values > thr))
    neg = int(np.sum(values < -thr))
    return Inertia(pos, neg, len(values) - pos - neg)


def inertia_of_H(n: int) -> Inertia:
    """Inertia of ``H_n``; the exact LDL route and the eigensolver must agree."""
    exact, _ = inertia_from_ldl(n)
    numeric = inertia_from_eigen(hessian_float(n))
    if exact != numeric:
        raise InertiaDisagreement(f"n={n}: LDL route gives {exact.as_tuple()}, eigensolver {numeric.as_tuple()}")
    return exact
