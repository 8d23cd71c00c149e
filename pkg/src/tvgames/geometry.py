"""Vector/matrix primitives shared by all learners.

Everything here is a pure function of its inputs: Euclidean projection onto
the probability simplex, power-iteration spectral norms, and the Bregman
divergence machinery (squared Euclidean and negative entropy) that the
mirror-descent style updates are built on.
"""

from __future__ import annotations

import numpy as np

SIMPLEX_TOL = 1e-12


def check_simplex(x, tol: float = SIMPLEX_TOL) -> np.ndarray:
    """Validate that x lies on the probability simplex; returns x as ndarray.

    All coordinates must be >= -tol and the coordinates must sum to 1 within
    absolute tolerance tol.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise ValueError(f"expected a 1-d vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("simplex point has non-finite coordinates")
    if np.min(x) < -tol:
        raise ValueError(f"negative coordinate {np.min(x)} below tolerance {tol}")
    s = float(np.sum(x))
    if abs(s - 1.0) > tol:
        raise ValueError(f"coordinates sum to {s}, expected 1 within {tol}")
    return x


def is_simplex_point(x, tol: float = SIMPLEX_TOL) -> bool:
    try:
        check_simplex(x, tol)
    except ValueError:
        return False
    return True


def uniform_point(d: int) -> np.ndarray:
    """Minimum-norm point of the simplex; the standard learner initialization."""
    return np.full(d, 1.0 / d)


def project_simplex(v) -> np.ndarray:
    """Euclidean projection of v onto the probability simplex.

    Sort-and-threshold method, O(d log d): find the largest k such that the
    shifted top-k coordinates stay positive, then clip. Ties in the sorted
    order are broken by original index (stable sort), which keeps the output
    deterministic; the projected point itself does not depend on the ordering
    of tied values.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"expected a 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("cannot project a vector with non-finite entries")
    # Stable argsort of -v = descending order with index tie-break.
    order = np.argsort(-v, kind="stable")
    u = v[order]
    css = np.cumsum(u) - 1.0
    ks = np.arange(1, v.size + 1)
    cond = u - css / ks > 0.0
    k = int(np.nonzero(cond)[0][-1])  # cond[0] always holds
    tau = css[k] / (k + 1.0)
    return np.maximum(v - tau, 0.0)


def spectral_norm(A, tol: float = 1e-10, max_iter: int = 10_000) -> float:
    """Largest singular value of A via power iteration on A^T A.

    Deterministic all-ones start (normalized), at least 2 iterations, and
    convergence when successive Rayleigh quotients differ by less than
    tol * current value. A zero matrix returns exactly 0.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not np.any(A):
        return 0.0
    # Iterate on the smaller Gram dimension.
    if A.shape[0] < A.shape[1]:
        A = A.T
    v = np.full(A.shape[1], 1.0 / np.sqrt(A.shape[1]))
    lam_prev = 0.0
    for it in range(max_iter):
        w = A.T @ (A @ v)
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            # v is in the null space; the all-ones start only lands here for
            # nonzero A if the column sums vanish, so restart off-axis.
            v = np.zeros_like(v)
            v[it % v.size] = 1.0
            continue
        v = w / nw
        lam = float(v @ (A.T @ (A @ v)))
        if it >= 1 and abs(lam - lam_prev) < tol * max(lam, np.finfo(float).tiny):
            lam_prev = lam
            break
        lam_prev = lam
    return float(np.sqrt(max(lam_prev, 0.0)))


class Regularizer:
    """Divergence + prox-step pair; 1-strongly convex w.r.t. its base norm."""

    kind = "base"

    def divergence(self, a, b) -> float:
        raise NotImplementedError

    def prox_step(self, x, g, eta: float) -> np.ndarray:
        """argmax over the simplex of <p, g> - divergence(p, x) / eta."""
        raise NotImplementedError


class EuclideanRegularizer(Regularizer):
    """phi(x) = ||x||^2 / 2; divergence is half squared Euclidean distance."""

    kind = "euclidean"

    def divergence(self, a, b) -> float:
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        return 0.5 * float(np.sum((a - b) ** 2))

    def prox_step(self, x, g, eta: float) -> np.ndarray:
        return project_simplex(np.asarray(x, dtype=float) + eta * np.asarray(g, dtype=float))


class NegativeEntropyRegularizer(Regularizer):
    """phi(x) = sum x log x; divergence is KL(a || b).

    1-strongly convex w.r.t. the l1 norm on the simplex (Pinsker). The prox
    step is the multiplicative-weights update. Note the gradient of phi is
    unbounded near the boundary, so this regularizer sits outside the smooth-
    regularizer hypotheses of the Euclidean-style regret machinery.
    """

    kind = "negative-entropy"

    def divergence(self, a, b) -> float:
        a = check_simplex(a)
        b = check_simplex(b)
        if np.any(b <= 0.0):
            raise ValueError("KL(a || b) undefined: b has a zero coordinate")
        mask = a > 0.0
        return float(np.sum(a[mask] * np.log(a[mask] / b[mask])))

    def prox_step(self, x, g, eta: float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        w = eta * np.asarray(g, dtype=float)
        w = w - np.max(w)  # overflow guard; shift-invariant
        y = x * np.exp(w)
        s = float(np.sum(y))
        if s <= 0.0:
            raise ValueError("prox step collapsed: x has no support on the max of g")
        return y / s


REGULARIZERS = {
    "euclidean": EuclideanRegularizer(),
    "negative-entropy": NegativeEntropyRegularizer(),
}


def bregman(reg, a, b) -> float:
    """Bregman divergence of the given regularizer (instance or kind name)."""
    if isinstance(reg, str):
        reg = REGULARIZERS[reg]
    return reg.divergence(a, b)
