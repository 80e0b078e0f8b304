"""Maximizes the relaxed assignment score over the fractional feasible set.

The outer loop is conditional-gradient ascent: each iteration asks an exact
linear oracle (a small LP) for the best feasible direction and takes a
backtracking step. Plain conditional-gradient steps approach the optimum only
sublinearly, far too slow to certify 1e-6-scale gaps, so on small problems the
loop is augmented with an SLSQP correction ("polish") and a KKT-structured
rebuild of the iterate.

Certification is separate from iteration: at the returned point the solver
reports the smaller of two upper bounds on the remaining suboptimality, the
oracle gap ``<grad, S - X>`` (valid at strictly interior points by concavity)
and a Lagrangian dual value repaired to exact feasibility (valid everywhere).
Neither bound depends on how the point was produced.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog, minimize
from scipy.special import logsumexp

from .assignment import (
    GRAD_FLOOR,
    AssignmentSpec,
    grad_log_weight_relaxed,
    is_feasible,
    log_weight_relaxed,
)

__all__ = [
    "InfeasibleError",
    "SolverConfig",
    "SolveResult",
    "default_delta",
    "lmo",
    "initial_point",
    "solve",
]

# Problems with at most this many cells get the SLSQP correction step; its
# quadratic subproblems grow cubically, so mid-size problems rely on the
# conditional-gradient loop plus the KKT rebuild instead.
POLISH_MAX_CELLS = 260
_POLISH_ITERS = (8, 30, 90)

# Internal gradient floor. The public default (1e-12) is fine for evaluating
# gradients at interior points, but inside the solver it can mask the pull
# back into a row whose mass has vanished, trapping iterates on a suboptimal
# face; an extreme floor keeps those directions visible.
_SOLVER_GRAD_FLOOR = 1e-140


class InfeasibleError(ValueError):
    """The feasible set is empty: observed counts cannot fit the mass budget."""


@dataclass(frozen=True)
class SolverConfig:
    """Target additive gap (log units), iteration budget, and LP tolerance."""

    delta: float
    max_iters: int = 300
    lmo_tol: float = 1e-10

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


@dataclass
class SolveResult:
    """Feasible point, its objective, and the certified optimality gap."""

    X: np.ndarray
    objective: float
    certified_gap: float
    iterations: int
    certified: bool


def default_delta(spec: AssignmentSpec) -> float:
    """1e-6 times the objective scale n' log n' (floored for tiny inputs)."""
    lengths = spec.disc_lengths
    scale = max(float(np.max(lengths * np.log(np.maximum(lengths, 1.0)))), 1.0)
    return 1e-6 * scale


def _column_sum_matrix(spec: AssignmentSpec) -> sp.csr_matrix:
    R, J = spec.shape
    cols = J - 1
    rows = np.repeat(np.arange(cols), R)
    idx = np.concatenate([np.arange(R) * J + (j + 1) for j in range(cols)])
    data = np.ones(cols * R)
    return sp.csr_matrix((data, (rows, idx)), shape=(cols, R * J))


def _budget_matrix(spec: AssignmentSpec) -> sp.csr_matrix:
    R, J = spec.shape
    dense = np.repeat(spec.levels.T[:, :, None], J, axis=2).reshape(spec.dim, R * J)
    return sp.csr_matrix(dense)


def _repair_columns(X: np.ndarray, spec: AssignmentSpec) -> np.ndarray:
    """Rescale observed columns so their sums match the targets exactly."""
    sums = X[:, 1:].sum(axis=0)
    targets = spec.col_counts.astype(float)
    for j, (s, t) in enumerate(zip(sums, targets)):
        if t == 0:
            X[:, j + 1] = 0.0
        elif s > 0 and s != t:
            X[:, j + 1] *= t / s
    return X


def lmo(grad: np.ndarray, spec: AssignmentSpec, tol: float = 1e-10) -> np.ndarray:
    """Exact linear maximization oracle over the fractional feasible set.

    Solves ``max <grad, S>`` subject to the observed column sums and the unit
    mass budget(s) with an LP and returns a vertex. Exactness of this step is
    what makes the duality-gap certificate in :func:`solve` valid.
    """
    if spec.row_counts is not None:
        raise ValueError("the oracle maximizes over the budget (fractional) variant")
    R, J = spec.shape
    res = linprog(
        c=-np.asarray(grad, dtype=float).ravel(),
        A_ub=_budget_matrix(spec),
        b_ub=np.ones(spec.dim),
        A_eq=_column_sum_matrix(spec),
        b_eq=spec.col_counts.astype(float),
        bounds=(0, None),
        method="highs",
    )
    if not res.success:
        raise InfeasibleError(f"linear oracle failed: {res.message}")
    X = res.x.reshape(R, J)
    X[np.abs(X) < tol] = 0.0
    return _repair_columns(X, spec)


def initial_point(spec: AssignmentSpec) -> np.ndarray:
    """Feasible start: each column at the level nearest its empirical rate.

    Columns sit on the row whose log-level is closest to log(freq / n');
    if that overshoots the budget, mass moves to the cheapest level, splitting
    one cell so the binding budget is met exactly.
    """
    if spec.row_counts is not None:
        raise ValueError("initial points are for the budget (fractional) variant")
    R, J = spec.shape
    lengths = np.maximum(spec.disc_lengths, 1.0)
    log_levels = np.log(spec.levels)
    X = np.zeros((R, J))
    for j in range(1, J):
        count = spec.col_counts[j - 1]
        if count == 0:
            continue
        seen = spec.freqs[j] > 0
        target = np.log(spec.freqs[j, seen] / lengths[seen])
        i = int(np.argmin(((log_levels[:, seen] - target) ** 2).sum(axis=1)))
        X[i, j] = float(count)

    cheapest = int(np.argmin(spec.levels.sum(axis=1)))
    if np.any(spec.col_counts.sum() * spec.levels[cheapest] > 1 + 1e-12):
        raise InfeasibleError("observed counts cannot fit the unit budget at any level")

    for _ in range(R * J * 64):
        use = spec.budget_use(X)
        worst = int(np.argmax(use))
        if use[worst] <= 1 + 1e-15:
            break
        gain = spec.levels[:, worst] - spec.levels[cheapest, worst]
        candidates = np.argwhere((X[:, 1:] > 0) & (gain[:, None] > 0))
        if candidates.size == 0:
            raise InfeasibleError("cannot rebalance the start onto the budget")
        i, j = max(candidates, key=lambda ij: spec.levels[ij[0], worst])
        j += 1
        amount = min(X[i, j], (use[worst] - 1.0) / gain[i])
        X[i, j] -= amount
        X[cheapest, j] += amount
    else:
        raise InfeasibleError("budget rebalancing did not converge")
    return X


def _kkt_multipliers(spec: AssignmentSpec, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Column and budget multipliers read off the KKT conditions at X."""
    R, J = spec.shape
    counts = spec.col_counts.astype(float)
    C = spec.lin_coeff
    a = X.sum(axis=1)
    active_rows = a > 1e-12

    # At an optimum the unseen column satisfies X_i0 = a_i exp(-lam . level_i).
    usable = (X[:, 0] > 1e-12) & active_rows
    if np.any(usable):
        target = np.log(a[usable]) - np.log(X[usable, 0])
        row_levels = spec.levels[usable]
        if spec.dim == 1:
            lam = np.array([max(0.0, float(np.median(target / row_levels[:, 0])))])
        else:
            lam, _ = _nnls(row_levels, target)
    else:
        # No unseen mass: the budget multiplier runs off along an asymptote;
        # any large value works, the refinement trims the dual value.
        lam = np.full(spec.dim, 50.0 / float(spec.levels.min()))

    mu = np.full(J - 1, np.inf)
    load = lam @ spec.levels.T  # (R,)
    with np.errstate(divide="ignore"):
        log_a = np.where(active_rows, np.log(np.maximum(a, 1e-300)), -np.inf)
    for j in range(1, J):
        if counts[j - 1] > 0:
            terms = log_a + C[:, j] - load
            mu[j - 1] = float(logsumexp(terms[active_rows])) - np.log(counts[j - 1])
    return mu, lam


def _dual_upper_bound(spec: AssignmentSpec, X: np.ndarray) -> float:
    """Certified upper bound on the optimum from a feasible Lagrangian dual point.

    For column multipliers mu and budget multipliers lam >= 0, the dual value
    ``sum mu_j count_j + sum lam_k`` bounds the optimum whenever every level
    row satisfies ``lam . level_i >= log(1 + sum_j exp(C_ij - mu_j))`` (the
    inner row maximization is then capped at zero). Multipliers are read off
    the KKT conditions at X, refined by solving the small smooth dual program,
    and finally repaired to exact feasibility, so the bound is valid no matter
    how good X is; it is only tight when X is near-optimal.
    """
    mu, lam = _kkt_multipliers(spec, X)
    best = _repaired_dual_value(spec, mu, lam)
    refined = _refine_dual(spec, mu, lam)
    if refined is not None:
        mu, lam = refined
        best = min(best, _repaired_dual_value(spec, mu, lam))
    reduced = _refine_dual_reduced(spec, mu)
    if reduced is not None:
        best = min(best, reduced)
    return best


def _refine_dual(
    spec: AssignmentSpec, mu: np.ndarray, lam: np.ndarray
) -> tuple[np.ndarray, np.ndarray] | None:
    """Minimize the dual value over (mu, lam) with SLSQP; tiny and smooth."""
    counts = spec.col_counts.astype(float)
    active = counts > 0
    cols = int(active.sum())
    if cols == 0:
        return None
    C_act = spec.lin_coeff[:, 1:][:, active]  # (R, cols)
    levels = spec.levels  # (R, d)
    d = spec.dim
    lam_cap = 500.0 / float(spec.levels.min())

    def split(z):
        return z[:cols], z[cols:]

    def objective(z):
        m, l = split(z)
        return float(counts[active] @ m + l.sum())

    def objective_grad(z):
        return np.concatenate([counts[active], np.ones(d)])

    def constraints(z):
        m, l = split(z)
        terms = np.exp(np.clip(C_act - m, -745.0, 60.0))
        return levels @ l - np.log1p(terms.sum(axis=1))

    def constraints_jac(z):
        m, l = split(z)
        terms = np.exp(np.clip(C_act - m, -745.0, 60.0))
        denom = 1.0 + terms.sum(axis=1)
        jac_mu = terms / denom[:, None]
        return np.hstack([jac_mu, levels])

    z0 = np.concatenate([np.where(np.isfinite(mu[active]), mu[active], 0.0),
                         np.minimum(lam, lam_cap)])
    try:
        res = minimize(
            objective,
            z0,
            jac=objective_grad,
            constraints=[{"type": "ineq", "fun": constraints, "jac": constraints_jac}],
            bounds=[(None, None)] * cols + [(0.0, lam_cap)] * d,
            method="SLSQP",
            options={"maxiter": 300, "ftol": 1e-14},
        )
    except (ValueError, FloatingPointError):
        return None
    mu_out = np.full(mu.shape, np.inf)
    mu_out[active] = res.x[:cols]
    lam_out = np.maximum(res.x[cols:], 0.0)
    return mu_out, lam_out


def _refine_dual_reduced(spec: AssignmentSpec, mu: np.ndarray) -> float | None:
    """One-budget case: eliminate lam analytically and descend over mu alone.

    With a single budget, feasibility pins lam = max_i W_i(mu) / level_i, so
    the dual is an unconstrained convex function of mu. Its infimum may sit at
    an asymptote (mu drifting to -inf in lockstep), which derivative-free
    descent follows far enough for the value to flatten out numerically.
    """
    if spec.dim != 1:
        return None
    counts = spec.col_counts.astype(float)
    active = counts > 0
    cols = int(active.sum())
    if cols == 0 or cols > 24:
        return None
    C_act = spec.lin_coeff[:, 1:][:, active]
    levels = spec.levels[:, 0]

    def value(m):
        W = np.log1p(np.exp(np.clip(C_act - m, -745.0, 60.0)).sum(axis=1))
        return float(counts[active] @ m + np.max(W / levels))

    m0 = np.where(np.isfinite(mu[active]), mu[active], 0.0)
    try:
        res = minimize(
            value,
            m0,
            method="Nelder-Mead",
            options={"maxiter": 4000, "fatol": 1e-13, "xatol": 1e-10},
        )
    except (ValueError, FloatingPointError):
        return None
    mu_out = np.full(mu.shape, np.inf)
    mu_out[active] = res.x
    W = np.log1p(np.exp(np.clip(C_act - res.x, -745.0, 60.0)).sum(axis=1))
    lam_out = np.array([float(np.max(W / levels))])
    return _repaired_dual_value(spec, mu_out, lam_out)


def _repaired_dual_value(spec: AssignmentSpec, mu: np.ndarray, lam: np.ndarray) -> float:
    """Scale lam up until every row constraint holds, then evaluate the dual."""
    counts = spec.col_counts.astype(float)
    C = spec.lin_coeff
    finite = np.isfinite(mu)
    shifted = C[:, 1:][:, finite] - mu[finite]
    # W_i = log(1 + sum_j exp(C_ij - mu_j)) must not exceed lam . level_i.
    W = np.log1p(np.exp(np.clip(shifted, -745.0, 60.0)).sum(axis=1))
    load = lam @ spec.levels.T
    if np.any(W > load):
        scale = float(np.max(W / np.maximum(load, 1e-300)))
        if not np.isfinite(scale) or np.all(lam == 0):
            lam = np.full(spec.dim, float(np.max(W / spec.levels.min(axis=1).min())))
        else:
            lam = lam * scale
        lam = lam * (1 + 1e-12) + 1e-15
        load = lam @ spec.levels.T
        assert np.all(W <= load + 1e-9)
    return float(counts @ np.where(finite, mu, 0.0) + lam.sum())


def _nnls(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, float]:
    from scipy.optimize import nnls

    try:
        return nnls(A, b)
    except Exception:
        sol, *_ = np.linalg.lstsq(A, b, rcond=None)
        return np.maximum(sol, 0.0), 0.0


def _reconstruct_primal(spec: AssignmentSpec, X: np.ndarray) -> np.ndarray | None:
    """Rebuild X from the KKT structure implied by its own multipliers.

    At an optimum, X_ij = a_i exp(C_ij - mu_j - lam . level_i). Re-solving the
    column equations for the row totals restores the relative accuracy of tiny
    entries that absolute-scale solvers lose. Rows carrying transient noise
    are hard to tell from genuinely light rows, so several active-set
    thresholds are tried and the best rebuild wins.
    """
    a = X.sum(axis=1)
    top = float(a.max()) if a.size else 0.0
    best: np.ndarray | None = None
    best_value = -np.inf
    for cut in (1e-12, 1e-6 * top, 1e-3 * top, 1e-2 * top):
        candidate = _reconstruct_with_active(spec, X, a > max(cut, 1e-12))
        if candidate is not None:
            value = log_weight_relaxed(candidate, spec)
            if value > best_value:
                best, best_value = candidate, value
    return best


def _reconstruct_with_active(
    spec: AssignmentSpec, X: np.ndarray, active: np.ndarray
) -> np.ndarray | None:
    R, J = spec.shape
    counts = spec.col_counts.astype(float)
    C = spec.lin_coeff
    a = X.sum(axis=1)
    if not np.any(active):
        return None
    usable = (X[:, 0] > 1e-12) & active
    if np.any(usable):
        target = np.log(a[usable]) - np.log(X[usable, 0])
        if spec.dim == 1:
            lam = np.array([max(0.0, float(np.median(target / spec.levels[usable, 0])))])
        else:
            lam, _ = _nnls(spec.levels[usable], target)
    else:
        lam = np.zeros(spec.dim)
    load = lam @ spec.levels.T
    mu = np.zeros(J - 1)
    log_a = np.log(np.maximum(a, 1e-300))
    for j in range(1, J):
        if counts[j - 1] <= 0:
            mu[j - 1] = np.inf
            continue
        mu[j - 1] = float(logsumexp((log_a + C[:, j] - load)[active])) - np.log(counts[j - 1])
    finite = np.isfinite(mu)
    weights = np.zeros((R, J))
    weights[:, 0] = np.exp(-load)
    weights[:, 1:][:, finite] = np.exp(
        np.clip(C[:, 1:][:, finite] - mu[finite] - load[:, None], -745.0, 60.0)
    )
    # Row totals from the column equations over the active rows.
    M = (weights[:, 1:][:, finite])[active].T  # (cols, |A|)
    sol, _ = _nnls(M, counts[finite])
    a_new = np.zeros(R)
    a_new[active] = sol
    Xr = a_new[:, None] * weights
    Xr = _repair_columns(Xr, spec)
    if np.any(spec.budget_use(Xr) > 1.0):
        over = spec.budget_use(Xr) - 1.0
        order = np.argsort(-spec.levels.max(axis=1))
        for i in order:
            if np.all(over <= 0):
                break
            if Xr[i, 0] <= 0:
                continue
            rate = spec.levels[i]
            needed = np.max(np.where(rate > 0, over / rate, 0.0))
            cut = min(Xr[i, 0], needed)
            Xr[i, 0] -= cut
            over -= cut * rate
    if not is_feasible(Xr, spec, tol=1e-9):
        return None
    return Xr


def _polish(
    X: np.ndarray, spec: AssignmentSpec, floor: float = _SOLVER_GRAD_FLOOR
) -> np.ndarray | None:
    """SLSQP correction from X; returns an improved feasible point or None."""
    R, J = spec.shape
    n = R * J
    col_mat = _column_sum_matrix(spec).toarray()
    budget_mat = _budget_matrix(spec).toarray()

    def neg_obj(x):
        return -log_weight_relaxed(x.reshape(R, J), spec)

    def neg_grad(x):
        return -grad_log_weight_relaxed(x.reshape(R, J), spec, floor=floor).ravel()

    constraints = [
        {
            "type": "eq",
            "fun": lambda x: col_mat @ x - spec.col_counts,
            "jac": lambda x: col_mat,
        },
        {
            "type": "ineq",
            "fun": lambda x: 1.0 - budget_mat @ x,
            "jac": lambda x: -budget_mat,
        },
    ]
    try:
        res = minimize(
            neg_obj,
            X.ravel(),
            jac=neg_grad,
            bounds=[(0.0, None)] * n,
            constraints=constraints,
            method="SLSQP",
            options={"maxiter": min(200, max(60, 24_000 // max(n, 1))), "ftol": 1e-14},
        )
    except (ValueError, FloatingPointError):
        return None
    Xp = np.maximum(res.x.reshape(R, J), 0.0)
    Xp = _repair_columns(Xp, spec)
    over = spec.budget_use(Xp) - 1.0
    if np.any(over > 0):
        # Trim unseen mass, most expensive levels first, to absorb roundoff.
        order = np.argsort(-spec.levels.max(axis=1))
        for i in order:
            if np.all(over <= 0):
                break
            if Xp[i, 0] <= 0:
                continue
            rate = spec.levels[i]
            needed = np.max(np.where(rate > 0, over / rate, 0.0))
            cut = min(Xp[i, 0], needed)
            Xp[i, 0] -= cut
            over -= cut * rate
        if np.any(over > 1e-12):
            return None
    if not is_feasible(Xp, spec, tol=1e-9):
        return None
    return Xp


def _spread_point(spec: AssignmentSpec) -> np.ndarray | None:
    """Feasible point with every level row occupied, when one exists."""
    R, J = spec.shape
    total = float(spec.col_counts.sum())
    if total == 0:
        return None
    cheapest = int(np.argmin(spec.levels.sum(axis=1)))
    bottom = np.zeros((R, J))
    bottom[cheapest, 1:] = spec.col_counts
    uniform = np.zeros((R, J))
    uniform[:, 1:] = spec.col_counts / R
    bottom_use = spec.budget_use(bottom)
    uniform_use = spec.budget_use(uniform)
    if np.any(bottom_use > 1.0):
        return None
    with np.errstate(divide="ignore", invalid="ignore"):
        room = np.where(uniform_use > bottom_use, (1.0 - bottom_use) / (uniform_use - bottom_use), 1.0)
    theta = min(1.0, 0.99 * float(np.min(room)))
    if theta <= 0:
        return None
    return theta * uniform + (1.0 - theta) * bottom


def _improve(
    X: np.ndarray, value: float, spec: AssignmentSpec, seed_empty: bool = False
) -> tuple[np.ndarray, float]:
    """Best of the SLSQP corrections, empty-row reseeding, and the iterated
    KKT rebuild; never returns a worse point.

    Each SLSQP restart converges a step further, so the correction is iterated
    to its fixed point rather than applied once.
    """
    for _ in range(5):
        candidate = _polish(X, spec, floor=GRAD_FLOOR)
        if candidate is None:
            break
        candidate_value = log_weight_relaxed(candidate, spec)
        if candidate_value <= value + 1e-13:
            break
        X, value = candidate, candidate_value
    if np.any(X < 1e-12):
        # Cells pinned at the boundary: retry with the extreme floor, whose
        # gradients keep the pull back into vanished cells visible.
        candidate = _polish(X, spec, floor=_SOLVER_GRAD_FLOOR)
        if candidate is not None:
            candidate_value = log_weight_relaxed(candidate, spec)
            if candidate_value > value:
                X, value = candidate, candidate_value
    # A correction cannot open a row that holds no mass (the gain is second
    # order, invisible to any linearization), so retry from seeded blends.
    if seed_empty and np.any(X.sum(axis=1) <= 1e-12):
        spread = _spread_point(spec)
        if spread is not None:
            for kappa in (1e-2, 1e-1):
                candidate = _polish((1 - kappa) * X + kappa * spread, spec)
                if candidate is not None:
                    candidate_value = log_weight_relaxed(candidate, spec)
                    if candidate_value > value:
                        X, value = candidate, candidate_value
    for _ in range(6):
        rebuilt = _reconstruct_primal(spec, X)
        if rebuilt is None:
            break
        rebuilt_value = log_weight_relaxed(rebuilt, spec)
        if rebuilt_value <= value + 1e-15:
            break
        X, value = rebuilt, rebuilt_value
    return X, value


def _certify(spec: AssignmentSpec, X: np.ndarray, lmo_tol: float) -> float:
    """Valid upper bound on the remaining suboptimality at X.

    The oracle gap ``<grad, S - X>`` bounds the gap only where the gradient is
    exact, i.e. at strictly interior points: directional derivatives into an
    empty row exceed the clamped linearization by the row's entropy. The
    Lagrangian dual value is valid unconditionally, so it is the fallback.
    """
    value = log_weight_relaxed(X, spec)
    gap = _dual_upper_bound(spec, X) - value
    if np.all(X > 1e-12):
        grad = grad_log_weight_relaxed(X, spec)
        S = lmo(grad, spec, lmo_tol)
        gap = min(gap, float((grad * (S - X)).sum()))
    return max(gap, 0.0)


def solve(spec: AssignmentSpec, config: SolverConfig | None = None) -> SolveResult:
    """Conditional-gradient ascent with a certified optimality gap.

    Iterates ``X <- X + gamma (S - X)`` with backtracking line search
    (halving, initial step 2/(k+2)); an SLSQP correction and a KKT-structured
    rebuild run on small problems because plain conditional-gradient steps
    close the gap only sublinearly. Stops once the certified gap drops below
    ``config.delta`` or the iteration budget runs out, in which case the
    result is flagged non-certified.
    """
    if config is None:
        config = SolverConfig(delta=default_delta(spec))
    X = initial_point(spec)
    value = log_weight_relaxed(X, spec)
    do_polish = X.size <= POLISH_MAX_CELLS
    polish_at = set(_POLISH_ITERS)

    iterations = 0
    improved_at = None
    for k in range(config.max_iters):
        iterations = k
        if do_polish and k in polish_at:
            X, value = _improve(X, value, spec)
            improved_at = value
        grad = grad_log_weight_relaxed(X, spec, floor=_SOLVER_GRAD_FLOOR)
        S = lmo(grad, spec, config.lmo_tol)
        direction = S - X
        raw_gap = float((grad * direction).sum())
        if raw_gap <= config.delta and _certify(spec, X, config.lmo_tol) <= config.delta:
            break
        gamma = min(1.0, 2.0 / (k + 2.0))
        stepped = False
        while gamma > 1e-14:
            candidate = np.maximum(X + gamma * direction, 0.0)
            new_value = log_weight_relaxed(candidate, spec)
            if new_value > value + 1e-4 * gamma * max(raw_gap, 0.0):
                X, value = candidate, new_value
                stepped = True
                break
            gamma *= 0.5
        if not stepped:
            # Line search stalled; a correction step is the only way forward.
            if do_polish and value != improved_at:
                X, improved_value = _improve(X, value, spec, seed_empty=True)
                improved_at = improved_value
                if improved_value > value:
                    value = improved_value
                    continue
            elif do_polish and np.any(X.sum(axis=1) <= 1e-12):
                X, improved_value = _improve(X, value, spec, seed_empty=True)
                improved_at = improved_value
                if improved_value > value:
                    value = improved_value
                    continue
            break
    else:
        iterations = config.max_iters

    # One last accuracy pass, then the certificate at the returned point.
    if do_polish and value != improved_at:
        X, value = _improve(X, value, spec, seed_empty=True)
    gap = _certify(spec, X, config.lmo_tol)
    return SolveResult(
        X=X,
        objective=float(log_weight_relaxed(X, spec)),
        certified_gap=gap,
        iterations=iterations,
        certified=bool(gap <= config.delta),
    )
