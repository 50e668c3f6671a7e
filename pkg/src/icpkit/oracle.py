"""Brute-force ground truth for affine instances at small dimension.

Any solution assigns each index to one of two complementary cases, H_i = 0 or
F_i = 0, so for affine f every solution is the solution of one of the 2^n
linear systems built by picking, per row, either ((I - C) r)_i = d_i or
(A r)_i = -b_i.  Enumerating all index sets, solving each subsystem, and
keeping the candidates that pass the solution test yields every solution; the
exponential cost is the price of independence from the residual machinery
this oracle is used to check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import IcpInstance, ToleranceConfig, check_solution
from .linalg import solve_linear_batch

ORACLE_N_CAP = 16
ORACLE_TOL = ToleranceConfig(feas_tol=1e-9, comp_tol=1e-9)
DEDUP_RADIUS = 1e-8
TIGHT_TOL = 1e-8
_CHUNK = 4096


@dataclass
class OracleResult:
    """All distinct solutions found, in index-set order.

    degenerate_flags[k] is True when solution k sits on a complementarity
    boundary (some component has both |H_i| and |F_i| below TIGHT_TOL) or was
    reached from more than one index set.  singular_skipped counts subsystems
    abandoned because elimination hit a near-zero pivot.
    """

    solutions: list[np.ndarray]
    degenerate_flags: list[bool]
    singular_skipped: int
    subsets_tested: int


def _affine_parts(inst: IcpInstance) -> tuple[np.ndarray, np.ndarray]:
    parts = inst.f.affine_parts(inst.n)
    if parts is None:
        raise ValueError("oracle enumeration requires a zero or affine implicit map")
    return parts


def enumerate_solutions(inst: IcpInstance, n_max: int = ORACLE_N_CAP) -> OracleResult:
    """Enumerate every solution of an affine instance with n <= n_max (<= 16)."""
    c, d = _affine_parts(inst)
    n = inst.n
    cap = min(int(n_max), ORACLE_N_CAP)
    if n > cap:
        raise ValueError(f"oracle handles n <= {cap}, got n = {n}")

    ic = np.eye(n) - c
    a = inst.A
    total = 1 << n
    bit = 1 << np.arange(n)

    solutions: list[np.ndarray] = []
    flags: list[bool] = []
    hits: list[int] = []
    singular_skipped = 0

    for lo in range(0, total, _CHUNK):
        ids = np.arange(lo, min(lo + _CHUNK, total))
        # active[s, i]: index set s forces H_i = 0 (row from I - C), else F_i = 0.
        active = (ids[:, None] & bit) != 0
        mats = np.where(active[:, :, None], ic[None, :, :], a[None, :, :])
        rhs = np.where(active, d[None, :], -inst.b[None, :])
        points, singular = solve_linear_batch(mats, rhs)
        singular_skipped += int(singular.sum())

        good = ~singular & np.all(np.isfinite(points), axis=1)
        if not np.any(good):
            continue
        pts = points[good]
        h = pts - (pts @ c.T + d[None, :])
        f = pts @ a.T + inst.b[None, :]
        feasible = (
            np.all(h >= -ORACLE_TOL.feas_tol, axis=1)
            & np.all(f >= -ORACLE_TOL.feas_tol, axis=1)
            & np.all(np.abs(h * f) <= ORACLE_TOL.comp_tol, axis=1)
        )
        for idx in np.flatnonzero(feasible):
            point = pts[idx].copy()
            tight = bool(np.any((np.abs(h[idx]) <= TIGHT_TOL) & (np.abs(f[idx]) <= TIGHT_TOL)))
            for k, known in enumerate(solutions):
                if np.max(np.abs(known - point)) <= DEDUP_RADIUS:
                    hits[k] += 1
                    flags[k] = flags[k] or tight or hits[k] > 1
                    break
            else:
                # Re-test through the scalar path so every reported solution
                # passes check_solution verbatim, not just the batched filter.
                if not check_solution(inst, point, ORACLE_TOL).ok:
                    continue
                solutions.append(point)
                flags.append(tight)
                hits.append(1)

    return OracleResult(
        solutions=solutions,
        degenerate_flags=flags,
        singular_skipped=singular_skipped,
        subsets_tested=total,
    )


def certify(inst: IcpInstance, r: np.ndarray, n_max: int = ORACLE_N_CAP) -> bool:
    """True iff r lies within DEDUP_RADIUS (inf-norm) of an enumerated solution."""
    r = np.asarray(r, dtype=float)
    if r.shape != (inst.n,):
        raise ValueError(f"dimension mismatch: instance dim {inst.n}, point shape {r.shape}")
    result = enumerate_solutions(inst, n_max=n_max)
    return any(np.max(np.abs(sol - r)) <= DEDUP_RADIUS for sol in result.solutions)
