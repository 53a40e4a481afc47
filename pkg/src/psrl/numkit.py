"""Dense linear-algebra kernels: linear solves, eigenvalues and LP feasibility.

Everything here works on small dense float64 matrices (tens of rows). The
algorithms are written out explicitly rather than delegated to LAPACK so
that their tolerances and failure modes are the ones documented below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import NoConvergence, SingularMatrix, Undecided

PIVOT_TOL = 1e-12
DEFLATION_TOL = 1e-12
QR_MAX_ITER = 10_000
RADIUS_MARGIN = 1e-9
POWER_SHORTCUT_STEPS = 64
LP_TOL = 1e-9

# Constraint generation kicks in above this many absolute-value rows.
_LP_ACTIVE_THRESHOLD = 48
_LP_ROWS_PER_ROUND = 24
_COST_TOL = 1e-11
_PIVOT_TOL_LP = 1e-9


def as_matrix(m, square=False) -> np.ndarray:
    """Validate and convert ``m`` to a finite 2-D float64 array."""
    a = np.array(m, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


# ---------------------------------------------------------------------------
# Linear systems
# ---------------------------------------------------------------------------

def solve_linear(a, b) -> np.ndarray:
    """Solve ``a @ x = b`` by Gaussian elimination with partial pivoting.

    Raises :class:`SingularMatrix` when no candidate pivot exceeds
    ``PIVOT_TOL`` times the largest entry of ``a``.
    """
    a = as_matrix(a, square=True)
    b = np.array(b, dtype=np.float64).reshape(-1)
    n = a.shape[0]
    if b.shape[0] != n:
        raise ValueError("right-hand side length does not match the matrix")
    if n == 0:
        return np.zeros(0)
    aug = np.hstack([a, b[:, None]])
    tol = PIVOT_TOL * max(1.0, float(np.max(np.abs(a))))
    for k in range(n):
        p = k + int(np.argmax(np.abs(aug[k:, k])))
        if abs(aug[p, k]) <= tol:
            raise SingularMatrix(f"no usable pivot in column {k}")
        if p != k:
            aug[[k, p]] = aug[[p, k]]
        factors = aug[k + 1:, k] / aug[k, k]
        aug[k + 1:, k:] -= np.outer(factors, aug[k, k:])
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = (aug[i, n] - aug[i, i + 1:n] @ x[i + 1:]) / aug[i, i]
    return x


# ---------------------------------------------------------------------------
# Eigenvalues
# ---------------------------------------------------------------------------

def hessenberg(m) -> np.ndarray:
    """Return an upper Hessenberg matrix similar to ``m`` (Householder)."""
    h = as_matrix(m, square=True).copy()
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        v = x.copy()
        v[0] += math.copysign(alpha, x[0])
        vnorm = np.linalg.norm(v)
        if vnorm == 0.0:
            continue
        v /= vnorm
        h[k + 1:, :] -= 2.0 * np.outer(v, v @ h[k + 1:, :])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v)
        h[k + 2:, k] = 0.0
    return h


def _francis_qr(h: np.ndarray) -> list[complex]:
    # Double-shift QR on an upper Hessenberg matrix, deflating from the
    # bottom. Scalar loops on purpose: matrices here have at most a few
    # dozen rows and the bookkeeping is easier to follow this way.
    a = h.tolist()
    n = len(a)
    eig: list[complex] = [0j] * n
    anorm = sum(abs(a[i][j]) for i in range(n) for j in range(max(i - 1, 0), n))
    machine_eps = np.finfo(float).eps
    nn = n - 1
    shift_acc = 0.0
    while nn >= 0:
        its = 0
        while True:
            l = nn
            while l >= 1:
                s = abs(a[l - 1][l - 1]) + abs(a[l][l])
                if s == 0.0:
                    s = anorm
                if abs(a[l][l - 1]) <= DEFLATION_TOL * s:
                    a[l][l - 1] = 0.0
                    break
                l -= 1
            x = a[nn][nn]
            if l == nn:
                eig[nn] = complex(x + shift_acc, 0.0)
                nn -= 1
                break
            y = a[nn - 1][nn - 1]
            w = a[nn][nn - 1] * a[nn - 1][nn]
            if l == nn - 1:
                p = 0.5 * (y - x)
                q = p * p + w
                z = math.sqrt(abs(q))
                x += shift_acc
                if q >= 0.0:
                    z = p + math.copysign(z, p)
                    eig[nn - 1] = complex(x + z, 0.0)
                    eig[nn] = complex(x - w / z if z != 0.0 else x + z, 0.0)
                else:
                    eig[nn - 1] = complex(x + p, -z)
                    eig[nn] = complex(x + p, z)
                nn -= 2
                break
            if its >= QR_MAX_ITER:
                raise NoConvergence(f"QR iteration exceeded {QR_MAX_ITER} steps")
            if its > 0 and its % 10 == 0:
                # exceptional shift to break stagnation
                shift_acc += x
                for i in range(nn + 1):
                    a[i][i] -= x
                s = abs(a[nn][nn - 1]) + abs(a[nn - 1][nn - 2])
                x = y = 0.75 * s
                w = -0.4375 * s * s
            its += 1
            m = nn - 2
            while m >= l:
                z = a[m][m]
                r = x - z
                s = y - z
                p = (r * s - w) / a[m + 1][m] + a[m][m + 1]
                q = a[m + 1][m + 1] - z - r - s
                r = a[m + 2][m + 1]
                s = abs(p) + abs(q) + abs(r)
                p /= s
                q /= s
                r /= s
                if m == l:
                    break
                u = abs(a[m][m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(a[m - 1][m - 1]) + abs(z) + abs(a[m + 1][m + 1]))
                if u <= machine_eps * v:
                    break
                m -= 1
            for i in range(m + 2, nn + 1):
                a[i][i - 2] = 0.0
                if i != m + 2:
                    a[i][i - 3] = 0.0
            k = m
            while k <= nn - 1:
                if k != m:
                    p = a[k][k - 1]
                    q = a[k + 1][k - 1]
                    r = a[k + 2][k - 1] if k != nn - 1 else 0.0
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p /= x
                        q /= x
                        r /= x
                s = math.copysign(math.sqrt(p * p + q * q + r * r), p)
                if s != 0.0:
                    if k == m:
                        if l != m:
                            a[k][k - 1] = -a[k][k - 1]
                    else:
                        a[k][k - 1] = -s * x
                    p += s
                    x = p / s
                    y = q / s
                    z = r / s
                    q /= p
                    r /= p
                    for j in range(k, nn + 1):
                        p = a[k][j] + q * a[k + 1][j]
                        if k != nn - 1:
                            p += r * a[k + 2][j]
                            a[k + 2][j] -= p * z
                        a[k + 1][j] -= p * y
                        a[k][j] -= p * x
                    top = min(nn, k + 3)
                    for i in range(l, top + 1):
                        p = x * a[i][k] + y * a[i][k + 1]
                        if k != nn - 1:
                            p += z * a[i][k + 2]
                            a[i][k + 2] -= p * r
                        a[i][k + 1] -= p * q
                        a[i][k] -= p
                k += 1
    return eig


def eigenvalues(m) -> np.ndarray:
    """All eigenvalues of a square matrix, as a complex array."""
    h = hessenberg(m)
    if h.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    return np.array(_francis_qr(h), dtype=complex)


def spectral_radius(m) -> float:
    """Largest eigenvalue magnitude of ``m``."""
    eig = eigenvalues(m)
    if eig.size == 0:
        return 0.0
    return float(np.max(np.abs(eig)))


def _power_norm_shortcut(m: np.ndarray) -> bool:
    # rho(m) <= ||m^k||^(1/k) for the induced inf-norm, so any power with
    # norm below one proves rho < 1.
    p = m.copy()
    for _ in range(POWER_SHORTCUT_STEPS):
        norm = float(np.max(np.sum(np.abs(p), axis=1)))
        if norm < 1.0:
            return True
        if not math.isfinite(norm) or norm > 1e100:
            return False
        p = p @ m
    return False


def _trace_lower_bound(m: np.ndarray) -> float:
    # |tr(m^k)| <= n * rho^k, so (|tr(m^k)| / n)^(1/k) bounds rho from below.
    n = m.shape[0]
    best = 0.0
    p = np.eye(n)
    for k in range(1, POWER_SHORTCUT_STEPS + 1):
        p = p @ m
        tr = abs(float(np.trace(p)))
        if not math.isfinite(tr):
            break
        best = max(best, (tr / n) ** (1.0 / k))
    return best


def is_spectral_radius_lt_one(m) -> bool:
    """Decide ``rho(m) < 1``.

    A power-norm certificate answers True early. Otherwise the eigenvalue
    estimate decides, except inside ``[1 - margin, 1 + margin]`` where a
    trace lower bound may still prove ``rho >= 1``; failing that,
    :class:`Undecided` is raised.
    """
    m = as_matrix(m, square=True)
    if m.shape[0] == 0:
        return True
    if _power_norm_shortcut(m):
        return True
    rho = spectral_radius(m)
    if rho < 1.0 - RADIUS_MARGIN:
        return True
    if rho > 1.0 + RADIUS_MARGIN:
        return False
    if _trace_lower_bound(m) >= 1.0:
        return False
    raise Undecided(f"spectral radius estimate {rho!r} is within {RADIUS_MARGIN} of 1")


# ---------------------------------------------------------------------------
# LP feasibility
# ---------------------------------------------------------------------------

def _rows(data, n_rows: int, k: int) -> np.ndarray:
    arr = np.array(data, dtype=np.float64)
    if arr.size != n_rows * k:
        raise ValueError(f"expected {n_rows} coefficient rows of length {k}")
    return arr.reshape(n_rows, k)


@dataclass(frozen=True)
class ConstraintSystem:
    """Rows ``|target - coef . X| <= bound`` plus rows ``coef . X = value``.

    Variables are free in sign.
    """

    num_vars: int
    abs_coef: np.ndarray
    abs_target: np.ndarray
    abs_bound: np.ndarray
    eq_coef: np.ndarray
    eq_value: np.ndarray

    def __post_init__(self):
        k = int(self.num_vars)
        if k < 0:
            raise ValueError("num_vars must be nonnegative")
        at = np.array(self.abs_target, dtype=np.float64).reshape(-1)
        ab = np.array(self.abs_bound, dtype=np.float64).reshape(-1)
        ev = np.array(self.eq_value, dtype=np.float64).reshape(-1)
        ac = _rows(self.abs_coef, at.shape[0], k)
        ec = _rows(self.eq_coef, ev.shape[0], k)
        if not (ac.shape[0] == at.shape[0] == ab.shape[0]):
            raise ValueError("absolute-value rows have inconsistent lengths")
        if ec.shape[0] != ev.shape[0]:
            raise ValueError("equality rows have inconsistent lengths")
        if np.any(ab < 0):
            raise ValueError("bounds must be nonnegative")
        for arr in (ac, at, ab, ec, ev):
            if not np.all(np.isfinite(arr)):
                raise ValueError("constraint data must be finite")
            arr.setflags(write=False)
        object.__setattr__(self, "num_vars", k)
        object.__setattr__(self, "abs_coef", ac)
        object.__setattr__(self, "abs_target", at)
        object.__setattr__(self, "abs_bound", ab)
        object.__setattr__(self, "eq_coef", ec)
        object.__setattr__(self, "eq_value", ev)

    @classmethod
    def from_rows(cls, num_vars, abs_rows=(), eq_rows=()):
        """Build from ``[(coefs, target, bound), ...]`` and ``[(coefs, value), ...]``."""
        abs_rows = list(abs_rows)
        eq_rows = list(eq_rows)
        return cls(
            num_vars,
            [list(r[0]) for r in abs_rows],
            [r[1] for r in abs_rows],
            [r[2] for r in abs_rows],
            [list(r[0]) for r in eq_rows],
            [r[1] for r in eq_rows],
        )

    @property
    def n_abs(self) -> int:
        return self.abs_coef.shape[0]

    @property
    def n_eq(self) -> int:
        return self.eq_coef.shape[0]

    def violations(self, x) -> np.ndarray:
        """Per-row excess over the allowed slack (abs rows first, then eq rows)."""
        x = np.asarray(x, dtype=np.float64)
        va = np.abs(self.abs_target - self.abs_coef @ x) - self.abs_bound
        ve = np.abs(self.eq_coef @ x - self.eq_value)
        return np.concatenate([va, ve])

    def max_violation(self, x) -> float:
        v = self.violations(x)
        return float(max(0.0, v.max())) if v.size else 0.0

    def is_satisfied(self, x, tol=LP_TOL) -> bool:
        return self.max_violation(x) <= tol

    def scaled(self, factor) -> "ConstraintSystem":
        """Multiply every absolute-value row (coefficients, target, bound) by ``factor``."""
        return ConstraintSystem(
            self.num_vars,
            self.abs_coef * factor,
            self.abs_target * factor,
            self.abs_bound * factor,
            self.eq_coef,
            self.eq_value,
        )


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    witness: Optional[np.ndarray] = None

    @property
    def status(self) -> str:
        return "feasible" if self.feasible else "infeasible"


class _Tableau:
    """Dense simplex tableau over ``y >= 0`` for rows ``A_ub y <= b_ub``, ``A_eq y = b_eq``.

    Columns: structural, one slack per ``<=`` row, then artificials for the
    rows whose slack cannot start in the basis. Pivoting uses Bland's rule.
    """

    def __init__(self, a_ub, b_ub, a_eq, b_eq):
        m_ub, n = a_ub.shape
        m_eq = a_eq.shape[0]
        m = m_ub + m_eq
        rows = np.vstack([a_ub, a_eq]) if m else np.zeros((0, n))
        rhs = np.concatenate([b_ub, b_eq])
        sign = np.where(rhs < 0, -1.0, 1.0)
        needs_art = np.concatenate([rhs[:m_ub] < 0, np.ones(m_eq, dtype=bool)])
        art_rows = np.flatnonzero(needs_art)
        n_art = art_rows.size
        width = n + m_ub + n_art
        tab = np.zeros((m, width + 1))
        tab[:, :n] = rows * sign[:, None]
        tab[np.arange(m_ub), n + np.arange(m_ub)] = sign[:m_ub]
        tab[art_rows, n + m_ub + np.arange(n_art)] = 1.0
        tab[:, -1] = rhs * sign
        basis = np.empty(m, dtype=np.int64)
        basis[:m_ub] = n + np.arange(m_ub)
        basis[art_rows] = n + m_ub + np.arange(n_art)
        self.tab = tab
        self.basis = basis
        self.n = n
        self.first_art = n + m_ub
        self.width = width
        self.obj = np.zeros(width + 1)
        self.allowed = width

    def pivot(self, r, j):
        tab = self.tab
        tab[r] /= tab[r, j]
        factor = tab[:, j].copy()
        factor[r] = 0.0
        tab -= np.outer(factor, tab[r])
        self.obj -= self.obj[j] * tab[r]
        self.basis[r] = j

    def set_cost(self, cost):
        # reduced costs d = c - c_B B^-1 A, with -objective in the last slot
        cost = np.asarray(cost, dtype=np.float64)
        full = np.zeros(self.width + 1)
        full[: cost.size] = cost
        self.obj = full - full[self.basis] @ self.tab
        self.obj[-1] = -(full[self.basis] @ self.tab[:, -1])

    def optimise(self) -> str:
        m = self.tab.shape[0]
        for _ in range(50 * (m + self.width) + 100):
            candidates = np.flatnonzero(self.obj[: self.allowed] < -_COST_TOL)
            for j in candidates:
                # Bland: first improving column that has a safe pivot
                col = self.tab[:, j]
                ok = col > _PIVOT_TOL_LP
                if np.any(ok):
                    break
            else:
                # both objectives used here are bounded below, so an
                # improving column without a usable pivot is rounding noise
                return "optimal"
            ratios = np.full(m, np.inf)
            ratios[ok] = np.maximum(self.tab[ok, -1], 0.0) / col[ok]
            best = ratios.min()
            ties = np.flatnonzero(ratios <= best + 1e-12 * max(1.0, best))
            self.pivot(int(ties[np.argmin(self.basis[ties])]), int(j))
            rhs = self.tab[:, -1]
            rhs[(rhs < 0) & (rhs > -1e-11)] = 0.0
        raise NoConvergence("simplex exceeded its pivot budget")

    def phase_one(self) -> bool:
        cost = np.zeros(self.width)
        cost[self.first_art:] = 1.0
        self.set_cost(cost)
        self.optimise()
        return -self.obj[-1] <= LP_TOL

    def drop_artificials(self):
        # pivot zero-level artificials out of the basis, delete redundant rows
        keep = []
        for r in range(self.tab.shape[0]):
            if self.basis[r] < self.first_art:
                keep.append(r)
                continue
            row = self.tab[r, : self.first_art]
            nz = np.flatnonzero(np.abs(row) > 1e-9)
            if nz.size:
                self.pivot(r, int(nz[0]))
                keep.append(r)
        self.tab = self.tab[keep]
        self.basis = self.basis[keep]
        self.allowed = self.first_art

    def phase_two(self, cost) -> str:
        self.drop_artificials()
        self.set_cost(cost)
        self.obj[self.first_art:self.width] = 0.0
        return self.optimise()

    def solution(self) -> np.ndarray:
        y = np.zeros(self.width)
        y[self.basis] = self.tab[:, -1]
        return y[: self.n]


def _split(coef, target, bound, eq_coef, t_column=False):
    # Free X = X+ - X-; each |target - c.X| <= bound becomes two <= rows.
    # With t_column the bound is multiplied by an extra variable t >= 0.
    m = coef.shape[0]
    extra = [(-bound)[:, None]] if t_column else []
    a_ub = np.vstack([
        np.hstack([coef, -coef] + extra),
        np.hstack([-coef, coef] + extra),
    ]) if m else np.zeros((0, 2 * coef.shape[1] + (1 if t_column else 0)))
    if t_column:
        b_ub = np.concatenate([target, -target])
    else:
        b_ub = np.concatenate([target + bound, bound - target])
    a_eq = np.hstack([eq_coef, -eq_coef] + ([np.zeros((eq_coef.shape[0], 1))] if t_column else []))
    return a_ub, b_ub, a_eq


def _solve_subset(coef, target, bound, eq_coef, eq_value, k):
    a_ub, b_ub, a_eq = _split(coef, target, bound, eq_coef)
    tab = _Tableau(a_ub, b_ub, a_eq, eq_value)
    if not tab.phase_one():
        return None
    y = tab.solution()
    return y[:k] - y[k:]


def _minimax_subset(coef, target, bound, eq_coef, eq_value, x0):
    # Shift to X = x0 + d and t = t0 - w with t0 the ratio reached at x0:
    # the origin (d, w) = 0 is then feasible for every band row and only
    # the equality rows need artificials. Maximise w.
    k = x0.size
    resid = target - coef @ x0
    t0 = max(_ratio(np.abs(resid), bound), 0.0)
    a_ub, _b, a_eq = _split(coef, resid, bound, eq_coef, t_column=True)
    a_ub[:, -1] = np.concatenate([bound, bound])
    b_ub = np.concatenate([resid + t0 * bound, t0 * bound - resid])
    b_ub[(b_ub < 0) & (b_ub > -LP_TOL)] = 0.0
    tab = _Tableau(a_ub, b_ub, a_eq, eq_value - eq_coef @ x0)
    if not tab.phase_one():
        return None
    cost = np.zeros(2 * k + 1)
    cost[-1] = -1.0
    tab.phase_two(cost)
    y = tab.solution()
    return x0 + y[:k] - y[k:2 * k]


def _normalised(system: ConstraintSystem):
    # Rows scaled to unit size so that positive row multiples are neutral.
    coef = system.abs_coef
    target = system.abs_target
    bound = system.abs_bound
    scale = np.maximum.reduce([
        np.max(np.abs(coef), axis=1, initial=0.0),
        np.abs(target),
        bound,
        np.full(target.shape, 1e-300),
    ])
    escale = np.maximum(np.max(np.abs(system.eq_coef), axis=1, initial=0.0), np.abs(system.eq_value))
    escale = np.where(escale > 0, escale, 1.0)
    return (coef / scale[:, None], target / scale, bound / scale,
            system.eq_coef / escale[:, None], system.eq_value / escale)


def _initial_rows(coef, target, k):
    n_rows = coef.shape[0]
    if n_rows <= _LP_ACTIVE_THRESHOLD:
        return np.arange(n_rows)
    weight = np.maximum(np.max(np.abs(coef), axis=1), np.abs(target))
    order = np.lexsort((np.arange(n_rows), -weight))
    return np.sort(order[: 2 * k + 16])


def lp_feasible(system: ConstraintSystem) -> FeasibilityResult:
    """Decide whether ``system`` has a solution and return one if so.

    Rows are normalised to unit scale first, so multiplying a row by a
    positive constant never changes the answer. Large systems are solved by
    constraint generation: the LP runs on a working subset of rows and the
    most violated remaining rows are added until the witness satisfies all
    of them. Infeasibility of any subset proves infeasibility of the whole.
    The witness is the phase-1 basic solution, with no secondary objective.
    """
    k = system.num_vars
    coef, target, bound, eq_coef, eq_value = _normalised(system)
    if k == 0:
        ok = np.all(np.abs(target) <= bound + LP_TOL) and np.all(np.abs(eq_value) <= LP_TOL)
        return FeasibilityResult(bool(ok), np.zeros(0) if ok else None)
    active = _initial_rows(coef, target, k)
    while True:
        x = _solve_subset(coef[active], target[active], bound[active], eq_coef, eq_value, k)
        if x is None:
            return FeasibilityResult(False)
        excess = np.abs(target - coef @ x) - bound
        excess[active] = -np.inf
        bad = np.flatnonzero(excess > LP_TOL)
        if bad.size == 0:
            break
        worst = bad[np.lexsort((bad, -excess[bad]))][:_LP_ROWS_PER_ROUND]
        active = np.union1d(active, worst)
    x.setflags(write=False)
    return FeasibilityResult(True, x)


@dataclass(frozen=True)
class MinimaxResult:
    """Witness minimising the largest ratio ``|target - coef . X| / bound``."""

    witness: Optional[np.ndarray]
    ratio: float

    @property
    def feasible(self) -> bool:
        return self.witness is not None and self.ratio <= 1.0 + LP_TOL


def lp_minimax(system: ConstraintSystem, start=None) -> MinimaxResult:
    """Solve ``min t`` subject to ``|target - coef . X| <= t * bound`` and the equalities.

    The original system is feasible exactly when the optimal ``t`` is at
    most one, and the optimiser then lies as deep inside every absolute
    value band as the data allows. ``start`` is any point satisfying the
    equalities (a feasibility witness is ideal); without it a least-squares
    solution of the equality rows is used. Returns ``witness=None`` when
    the equality rows alone are inconsistent.
    """
    k = system.num_vars
    coef, target, bound, eq_coef, eq_value = _normalised(system)
    if k == 0:
        if np.any(np.abs(eq_value) > LP_TOL):
            return MinimaxResult(None, math.inf)
        return MinimaxResult(np.zeros(0), _ratio(np.abs(target), bound))
    if start is None:
        x = np.linalg.lstsq(eq_coef, eq_value, rcond=None)[0] if eq_coef.size else np.zeros(k)
    else:
        x = np.array(start, dtype=np.float64)
    active = _initial_rows(coef, target, k)
    while True:
        x = _minimax_subset(coef[active], target[active], bound[active], eq_coef, eq_value, x)
        if x is None:
            return MinimaxResult(None, math.inf)
        dev = np.abs(target - coef @ x)
        t_active = _ratio(dev[active], bound[active])
        excess = dev - t_active * bound
        excess[active] = -np.inf
        bad = np.flatnonzero(excess > LP_TOL)
        if bad.size == 0:
            break
        worst = bad[np.lexsort((bad, -excess[bad]))][:_LP_ROWS_PER_ROUND]
        active = np.union1d(active, worst)
    x.setflags(write=False)
    return MinimaxResult(x, _ratio(dev, bound))


def _ratio(dev, bound) -> float:
    if dev.size == 0:
        return 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(bound > 0, dev / np.where(bound > 0, bound, 1.0),
                     np.where(dev > LP_TOL, math.inf, 0.0))
    return float(r.max())
