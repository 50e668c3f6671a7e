"""Problem data and the solution predicate for implicit complementarity problems.

An instance is the triple (A, b, f).  A point r solves it when the pair

    H(r) = r - f(r)    and    F(r) = A r + b

is componentwise nonnegative and componentwise complementary (H_i or F_i is
zero at every index).  With f identically zero, H(r) = r and the instance is
an ordinary linear complementarity problem.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import as_matrix, as_vector


class ImplicitMap:
    """Evaluation contract for the implicit term f.

    Implementations must be deterministic and return a finite vector of the
    input's shape for every finite input.  ``affine_parts(n)`` returns (C, d)
    with f(r) = C r + d when the map is affine, else None; the enumeration
    oracle only supports affine maps.
    """

    tag = "abstract"

    def evaluate(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def affine_parts(self, n: int) -> tuple[np.ndarray, np.ndarray] | None:
        return None


@dataclass(frozen=True)
class ZeroMap(ImplicitMap):
    """f(r) = 0 for all r; reduces the instance to an LCP."""

    tag = "zero"

    def evaluate(self, r: np.ndarray) -> np.ndarray:
        return np.zeros_like(np.asarray(r, dtype=float))

    def affine_parts(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        return np.zeros((n, n)), np.zeros(n)


@dataclass(frozen=True)
class AffineMap(ImplicitMap):
    """f(r) = C r + d."""

    C: np.ndarray
    d: np.ndarray
    tag = "affine"

    def __post_init__(self):
        c = as_matrix(self.C, name="affine map matrix")
        d = as_vector(self.d, name="affine map offset")
        if c.shape[0] != d.shape[0]:
            raise ValueError(f"affine map dimensions disagree: C {c.shape}, d {d.shape}")
        object.__setattr__(self, "C", c)
        object.__setattr__(self, "d", d)

    @property
    def dim(self) -> int:
        return self.d.shape[0]

    def evaluate(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if r.shape != self.d.shape:
            raise ValueError(f"dimension mismatch: map dim {self.dim}, point {r.shape}")
        return self.C @ r + self.d

    def affine_parts(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        if n != self.dim:
            raise ValueError(f"dimension mismatch: map dim {self.dim}, requested {n}")
        return self.C, self.d


@dataclass(frozen=True)
class ToleranceConfig:
    """Slack for the numeric solution test; all fields nonnegative.

    feas_tol bounds how negative H or F may go, comp_tol bounds |H_i * F_i|,
    and resid_tol is the residual-norm threshold used by solver stop tests.
    """

    feas_tol: float = 1e-10
    comp_tol: float = 1e-10
    resid_tol: float = 1e-10

    def __post_init__(self):
        for name in ("feas_tol", "comp_tol", "resid_tol"):
            value = float(getattr(self, name))
            if not (value >= 0.0 and np.isfinite(value)):
                raise ValueError(f"{name} must be finite and >= 0, got {value}")
            object.__setattr__(self, name, value)


DEFAULT_TOL = ToleranceConfig()


@dataclass(frozen=True)
class IcpInstance:
    """The triple (A, b, f) of one implicit complementarity problem."""

    A: np.ndarray
    b: np.ndarray
    f: ImplicitMap = field(default_factory=ZeroMap)

    def __post_init__(self):
        a = as_matrix(self.A, name="A")
        b = as_vector(self.b, name="b")
        if a.shape[0] != b.shape[0]:
            raise ValueError(f"dimension mismatch: A {a.shape}, b {b.shape}")
        if isinstance(self.f, AffineMap) and self.f.dim != b.shape[0]:
            raise ValueError(f"dimension mismatch: f dim {self.f.dim}, instance dim {b.shape[0]}")
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.b.shape[0]

    def _point(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if r.shape != (self.n,):
            raise ValueError(f"dimension mismatch: instance dim {self.n}, point shape {r.shape}")
        return r


def evaluate_H(inst: IcpInstance, r: np.ndarray) -> np.ndarray:
    """H(r) = r - f(r)."""
    r = inst._point(r)
    return r - inst.f.evaluate(r)


def evaluate_F(inst: IcpInstance, r: np.ndarray) -> np.ndarray:
    """F(r) = A r + b."""
    r = inst._point(r)
    return inst.A @ r + inst.b


@dataclass(frozen=True)
class SolutionCheck:
    """Outcome of the solution test plus the worst violation of each kind.

    min_h / min_f are the smallest components of H and F (most negative means
    worst feasibility), max_comp the largest |H_i * F_i|; the *_index fields
    point at the offending component.  Truthiness mirrors ``ok``.
    """

    ok: bool
    min_h: float
    min_h_index: int
    min_f: float
    min_f_index: int
    max_comp: float
    max_comp_index: int

    def __bool__(self) -> bool:
        return self.ok


def check_solution(inst: IcpInstance, r: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> SolutionCheck:
    """Test H >= -feas_tol, F >= -feas_tol and |H_i F_i| <= comp_tol per component.

    Complementarity is checked componentwise rather than through the inner
    product H^T F: the two are equivalent for exact nonnegative solutions, and
    the componentwise form cannot hide a violation behind sign cancellation.
    """
    h = evaluate_H(inst, r)
    f = evaluate_F(inst, r)
    comp = np.abs(h * f)
    i_h = int(np.argmin(h))
    i_f = int(np.argmin(f))
    i_c = int(np.argmax(comp))
    ok = bool(
        h[i_h] >= -tol.feas_tol and f[i_f] >= -tol.feas_tol and comp[i_c] <= tol.comp_tol
    )
    return SolutionCheck(
        ok=ok,
        min_h=float(h[i_h]),
        min_h_index=i_h,
        min_f=float(f[i_f]),
        min_f_index=i_f,
        max_comp=float(comp[i_c]),
        max_comp_index=i_c,
    )


def is_solution(inst: IcpInstance, r: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Boolean view of check_solution."""
    return check_solution(inst, r, tol).ok
