"""Log-barrier interior-point solver for the per-iteration beamforming programs.

The problem has one complex beamformer ``w_j`` per tag and one reader power
``p_c`` per cell::

    minimise    sum_j ||w_j||^2 + p_weight * sum_c p_c
    subject to  lin_b_j - 2 Re(lin_a_j^H w_j) <= 0
                si_k_j (w_j^H R_j w_j + si_r0_j) / p_c(j) + w_j^H H_j w_j
                    - 2 Re(si_c_j^H w_j) + si_e_j <= 0
                ||w_j||^2 <= norm_cap_j
                p_floor <= p_c <= p_max
                budget_weight * sum_c p_c <= budget

The quadratic-over-linear term gets an epigraph variable ``tau_j``: the
second constraint becomes the rotated cone si_k (w^H R w + si_r0) <= tau p
plus the convex quadratic tau + w^H H w - 2 Re(c^H w) + e <= 0. Every
constraint then has a self-concordant log barrier, which keeps Newton steps
well behaved when the start point sits close to the boundary.

Each tag couples only to its own cell's power and the cells couple only
through the budget, so the Newton system is block-arrow with a rank-one
corner. Tag blocks are eliminated with batched dense solves and the power
Schur complement is diagonal plus rank one (Sherman-Morrison).

Complex vectors are handled as stacked real vectors ``[Re w, Im w]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.optimize import nnls

__all__ = [
    "ConvexSubproblem",
    "ConvexResult",
    "ConvexError",
    "solve",
    "evaluate_constraints",
    "lagrangian",
    "lagrangian_gradient",
    "real_matrix",
    "real_vector",
    "complex_vector",
]

P_FLOOR = 1e-9
CENTRE_GAP = 1e-4  # relative gap at which a well-interior point is recorded
ACTIVE_FORCE = 1e-9  # barrier force, relative to the gradient scale, marking a constraint active
CENTRING_TOL = 1e-9  # Newton decrement, in barrier-weight units, that ends a centring round


class ConvexError(RuntimeError):
    """Raised on an infeasible starting point. ``code`` is ``"infeasible"``."""

    def __init__(self, code: str, message: str = "", max_violation: float = float("nan")):
        self.code = code
        self.max_violation = max_violation
        super().__init__(f"{code}: {message}" if message else code)


def real_matrix(P):
    """Map a (batch of) Hermitian matrix P to [[Re P, -Im P], [Im P, Re P]]."""
    P = np.asarray(P, dtype=complex)
    top = np.concatenate([P.real, -P.imag], axis=-1)
    bottom = np.concatenate([P.imag, P.real], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def real_vector(w):
    w = np.asarray(w, dtype=complex)
    return np.concatenate([w.real, w.imag], axis=-1)


def complex_vector(x):
    n = x.shape[-1] // 2
    return x[..., :n] + 1j * x[..., n:]


@dataclass
class ConvexSubproblem:
    """Coefficient data of one convex program (see module docstring).

    Per-tag arrays have leading dimension J. ``si_k`` set to ``None`` drops the
    self-interference constraint, ``fixed_p`` given removes the powers from
    the decision variables, and ``budget`` set to ``None`` drops the budget.
    ``w0``/``p0`` must be strictly feasible.
    """

    cell_of: np.ndarray
    n_cells: int
    lin_a: np.ndarray
    lin_b: np.ndarray
    norm_cap: np.ndarray
    w0: np.ndarray
    p0: np.ndarray
    si_k: Optional[np.ndarray] = None
    si_R: Optional[np.ndarray] = None
    si_r0: Optional[np.ndarray] = None
    si_H: Optional[np.ndarray] = None
    si_c: Optional[np.ndarray] = None
    si_e: Optional[np.ndarray] = None
    p_weight: float = 1.0
    p_floor: float = P_FLOOR
    p_max: float = np.inf
    budget: Optional[float] = None
    budget_weight: float = 1.0
    fixed_p: Optional[np.ndarray] = None

    @property
    def has_si(self) -> bool:
        return self.si_k is not None

    @property
    def free_p(self) -> bool:
        return self.fixed_p is None

    def permuted(self, order) -> "ConvexSubproblem":
        """Same problem with tags listed in ``order`` (for invariance checks)."""
        order = np.asarray(order)
        per_tag = {}
        for name in ("cell_of", "lin_a", "lin_b", "norm_cap", "w0", "si_k", "si_R", "si_r0", "si_H", "si_c", "si_e"):
            value = getattr(self, name)
            if value is not None and np.ndim(value) > 0:
                value = np.asarray(value)[order]
            per_tag[name] = value
        return replace(self, **per_tag)


@dataclass
class ConvexResult:
    """Solver output.

    ``y`` is the internal real iterate (``[Re w, Im w, tau]`` per tag) that
    :func:`lagrangian` and :func:`lagrangian_gradient` accept; ``duals`` holds
    the multiplier estimates per constraint family of that internal form.
    ``centre_w``/``centre_p`` is a well-interior point passed on the central
    path, useful to warm start a neighbouring program.
    """

    w: np.ndarray
    p: np.ndarray
    objective: float
    kkt_residual: float
    iterations: int
    status: str
    y: Optional[np.ndarray] = None
    duals: dict = field(default_factory=dict)
    centre_w: Optional[np.ndarray] = None
    centre_p: Optional[np.ndarray] = None


class _Data:
    """Real-valued, broadcast-ready copy of a subproblem."""

    def __init__(self, sp: ConvexSubproblem):
        J = len(sp.cell_of)
        self.J = J
        self.cell = np.asarray(sp.cell_of, dtype=int)
        self.C = int(sp.n_cells)
        self.a = real_vector(sp.lin_a).reshape(J, -1)
        self.n2 = self.a.shape[-1]
        self.b = np.asarray(sp.lin_b, dtype=float)
        self.cap = np.broadcast_to(np.asarray(sp.norm_cap, dtype=float), (J,)).copy()
        self.si = sp.has_si
        self.d = self.n2 + (1 if self.si else 0)
        if self.si:
            self.k = np.broadcast_to(np.asarray(sp.si_k, dtype=float), (J,)).copy()
            self.R = np.broadcast_to(real_matrix(sp.si_R), (J, self.n2, self.n2))
            self.r0 = np.broadcast_to(np.asarray(sp.si_r0, dtype=float), (J,)).copy()
            self.H = np.broadcast_to(real_matrix(sp.si_H), (J, self.n2, self.n2))
            self.c = real_vector(sp.si_c).reshape(J, -1)
            self.e = np.broadcast_to(np.asarray(sp.si_e, dtype=float), (J,)).copy()
            self.kR2 = 2.0 * self.k[:, None, None] * self.R
            self.H2 = 2.0 * self.H
        self.free_p = sp.free_p
        self.p_fixed = None if sp.free_p else np.asarray(sp.fixed_p, dtype=float)
        self.pw = float(sp.p_weight)
        self.p_floor = float(sp.p_floor)
        self.p_max = float(sp.p_max)
        self.has_pmax = self.free_p and np.isfinite(self.p_max)
        self.budget = sp.budget if self.free_p else None
        self.bw = float(sp.budget_weight)
        self.diag = np.arange(self.n2)

    def powers(self, p):
        return p if self.free_p else self.p_fixed

    def objective(self, y, p):
        x = y[:, : self.n2]
        total = float(np.sum(x * x))
        return total + self.pw * float(np.sum(p)) if self.free_p else total

    def objective_grad(self, y):
        g = np.zeros_like(y)
        g[:, : self.n2] = 2.0 * y[:, : self.n2]
        return g

    def si_parts(self, x, p):
        """Cone numerator k (x'Rx + r0), the cell power and the remaining quadratic."""
        pj = self.powers(p)[self.cell]
        cone = self.k * (np.einsum("ji,jik,jk->j", x, self.R, x) + self.r0)
        rest = np.einsum("ji,jik,jk->j", x, self.H, x) - 2.0 * np.sum(self.c * x, axis=-1) + self.e
        return cone, pj, rest

    def values(self, y, p):
        """Constraint values of the epigraph form (all < 0 in the interior)."""
        x = y[:, : self.n2]
        out = {"lin": self.b - 2.0 * np.sum(self.a * x, axis=-1), "norm": np.sum(x * x, axis=-1) - self.cap}
        if self.si:
            tau = y[:, self.n2]
            cone, pj, rest = self.si_parts(x, p)
            out["soc"] = cone - tau * pj
            out["quad"] = tau + rest
        if self.free_p:
            out["floor"] = self.p_floor - p
            if self.has_pmax:
                out["pmax"] = p - self.p_max
            if self.budget is not None:
                out["budget"] = np.array([self.bw * np.sum(p) - self.budget])
        return out

    def derivatives(self, y, p):
        """Gradients of the tag constraints: name -> (gy, gp).

        ``gp`` is ``None`` when the constraint does not involve a free power.
        Second derivatives are constant, see :meth:`hessian_block`.
        """
        J, n2, d = self.J, self.n2, self.d
        x = y[:, :n2]
        ga = np.zeros((J, d))
        ga[:, :n2] = -2.0 * self.a
        gn = np.zeros((J, d))
        gn[:, :n2] = 2.0 * x
        out = {"lin": (ga, None), "norm": (gn, None)}
        if self.si:
            gs = np.zeros((J, d))
            gs[:, :n2] = np.einsum("jik,jk->ji", self.kR2, x)
            gs[:, n2] = -self.powers(p)[self.cell]
            gq = np.zeros((J, d))
            gq[:, :n2] = np.einsum("jik,jk->ji", self.H2, x) - 2.0 * self.c
            gq[:, n2] = 1.0
            out["soc"] = (gs, -y[:, n2] if self.free_p else None)
            out["quad"] = (gq, None)
        return out

    def hessian_block(self, weights):
        """Sum of weighted constant constraint Hessians in the tag variables."""
        J, n2, d = self.J, self.n2, self.d
        out = np.zeros((J, d, d))
        out[:, self.diag, self.diag] = 2.0 * (1.0 + weights["norm"])[:, None]
        if self.si:
            out[:, :n2, :n2] += weights["soc"][:, None, None] * self.kR2 + weights["quad"][:, None, None] * self.H2
        return out

    def lift(self, w, p):
        """Internal iterate from complex ``w``; tau is centred in its interval."""
        x = real_vector(w).astype(float).reshape(self.J, self.n2)
        if not self.si:
            return x
        cone, pj, rest = self.si_parts(x, p)
        tau = 0.5 * (cone / pj - rest)
        return np.concatenate([x, tau[:, None]], axis=1)


def _cell_sum(data: _Data, values):
    return np.bincount(data.cell, weights=values, minlength=data.C)


def evaluate_constraints(sp: ConvexSubproblem, w, p=None) -> dict:
    """Constraint values at complex ``w`` and powers ``p`` in the original form.

    The self-interference family ``"si"`` is evaluated directly as the
    quadratic-over-linear expression, without the epigraph variable. Values
    <= 0 are feasible.
    """
    data = _Data(sp)
    p = np.asarray(sp.fixed_p if p is None else p, dtype=float)
    x = real_vector(w).reshape(data.J, data.n2)
    out = {"lin": data.b - 2.0 * np.sum(data.a * x, axis=-1), "norm": np.sum(x * x, axis=-1) - data.cap}
    if data.si:
        cone, pj, rest = data.si_parts(x, p)
        out["si"] = cone / pj + rest
    if data.free_p:
        out["floor"] = data.p_floor - p
        if data.has_pmax:
            out["pmax"] = p - data.p_max
        if data.budget is not None:
            out["budget"] = np.array([data.bw * np.sum(p) - data.budget])
    return out


def _grad_terms(data: _Data, y, p, weights):
    """Gradient of sum_i weights_i * f_i over the families present in ``weights``."""
    gy = np.zeros_like(y)
    gp = np.zeros(data.C)
    for name, (dy, dp) in data.derivatives(y, p).items():
        wgt = weights.get(name)
        if wgt is None:
            continue
        gy += wgt[:, None] * dy
        if dp is not None:
            gp += _cell_sum(data, wgt * dp)
    if data.free_p:
        if "floor" in weights:
            gp -= weights["floor"]
        if "pmax" in weights:
            gp += weights["pmax"]
        if "budget" in weights:
            gp += data.bw * weights["budget"][0]
    return gy, gp


def lagrangian(sp: ConvexSubproblem, y, p, duals) -> float:
    """Objective plus dual-weighted constraint values at the internal iterate ``y``."""
    data = _Data(sp)
    p = np.asarray(sp.fixed_p if p is None else p, dtype=float)
    vals = data.values(y, p)
    return data.objective(y, p) + float(sum(np.sum(duals[k] * vals[k]) for k in vals))


def lagrangian_gradient(sp: ConvexSubproblem, y, p, duals):
    """Analytic gradient of :func:`lagrangian` w.r.t. ``y`` and, if free, ``p``."""
    data = _Data(sp)
    p = np.asarray(sp.fixed_p if p is None else p, dtype=float)
    gy, gp = _grad_terms(data, y, p, duals)
    gy = gy + data.objective_grad(y)
    gp = gp + data.pw if data.free_p else np.zeros(0)
    return gy, gp


def _newton_direction(data: _Data, y, p, lam, s):
    """Newton step of objective + inv_t * barrier, where lam = inv_t / s.

    Returns ``(dy, dp, ry, rp)``; ``ry``/``rp`` is the negative gradient, so the
    Newton decrement is ``ry . dy + rp . dp``.
    """
    Byy = data.hessian_block(lam)
    Byp = np.zeros((data.J, data.d))
    Dpp = np.zeros(data.C)
    ry = -data.objective_grad(y)
    rp = np.full(data.C, -data.pw)

    for name, (gy, gp) in data.derivatives(y, p).items():
        li = lam[name]
        ratio = li / s[name]
        Byy += ratio[:, None, None] * gy[:, :, None] * gy[:, None, :]
        ry -= li[:, None] * gy
        if gp is not None:
            Byp += ratio[:, None] * gy * gp[:, None]
            if name == "soc":
                Byp[:, data.n2] -= li
            Dpp += _cell_sum(data, ratio * gp * gp)
            rp -= _cell_sum(data, li * gp)

    if not data.free_p:
        return np.linalg.solve(Byy, ry[..., None])[..., 0], None, ry, None

    Dpp += lam["floor"] / s["floor"]
    rp += lam["floor"]
    if data.has_pmax:
        Dpp += lam["pmax"] / s["pmax"]
        rp -= lam["pmax"]
    beta = 0.0
    if data.budget is not None:
        beta = data.bw**2 * lam["budget"][0] / s["budget"][0]
        rp -= data.bw * lam["budget"][0]

    sol = np.linalg.solve(Byy, np.stack([ry, Byp], axis=-1))
    u, z = sol[..., 0], sol[..., 1]
    S = Dpp - _cell_sum(data, np.sum(Byp * z, axis=-1))
    rhs = rp - _cell_sum(data, np.sum(Byp * u, axis=-1))
    dp = rhs / S
    if beta > 0:
        v = 1.0 / S
        dp = dp - v * beta * np.sum(dp) / (1.0 + beta * np.sum(v))
    dy = u - z * dp[data.cell][:, None]
    return dy, dp, ry, rp


def _barrier_value(data, y, p, inv_t):
    """Objective plus inv_t * log barrier, or ``inf`` outside the strict interior."""
    vals = data.values(y, p)
    total = 0.0
    for v in vals.values():
        if np.any(v >= 0):
            return np.inf, vals
        total -= float(np.sum(np.log(-v)))
    return data.objective(y, p) + inv_t * total, vals


def _stationarity(data, y, p, lam):
    gy, gp = _grad_terms(data, y, p, lam)
    gy = gy + data.objective_grad(y)
    return np.concatenate([gy.ravel(), gp + data.pw if data.free_p else []])


def _fitted_duals(data: _Data, y, p, vals, lam):
    """Multipliers fitted by non-negative least squares on the near-active set.

    ``inv_t / s`` is a poor dual estimate close to the boundary, where the
    slacks carry large relative rounding error. Constraints whose barrier
    force is negligible get zero; the budget keeps its barrier estimate since
    it couples all cells.
    """
    ders = data.derivatives(y, p)
    g0 = data.objective_grad(y)
    scale = max(1.0, float(np.max(np.abs(g0))), data.pw if data.free_p else 0.0)
    duals = {k: np.zeros_like(v) for k, v in vals.items()}
    use = {k: lam[k] * np.max(np.abs(g), axis=1) >= ACTIVE_FORCE * scale for k, (g, _gp) in ders.items()}
    budget = 0.0
    if "budget" in lam and lam["budget"][0] * data.bw >= ACTIVE_FORCE * scale:
        budget = duals["budget"][0] = lam["budget"][0]
    if data.free_p and data.has_pmax:
        use["pmax"] = lam["pmax"] >= ACTIVE_FORCE * scale
    d = data.d
    for c in range(data.C):
        tags = np.flatnonzero(data.cell == c)
        n_rows = len(tags) * d + (1 if data.free_p else 0)
        rhs = np.zeros(n_rows)
        rhs[: len(tags) * d] = -g0[tags].ravel()
        if data.free_p:
            rhs[-1] = -(data.pw + data.bw * budget)
        cols, keys = [], []
        for k, (g, gp) in ders.items():
            for pos, j in enumerate(tags):
                if not use[k][j]:
                    continue
                col = np.zeros(n_rows)
                col[pos * d : (pos + 1) * d] = g[j]
                if gp is not None:
                    col[-1] = gp[j]
                cols.append(col)
                keys.append((k, j))
        if data.free_p and data.has_pmax and use["pmax"][c]:
            col = np.zeros(n_rows)
            col[-1] = 1.0
            cols.append(col)
            keys.append(("pmax", c))
        if not cols:
            continue
        coef, _ = nnls(np.stack(cols, axis=1), rhs, maxiter=50 * len(cols))
        for (k, j), value in zip(keys, coef):
            duals[k][j] = value
    return duals


def _kkt_residual(data: _Data, y, p, vals, duals):
    """Largest relative violation of stationarity and complementarity."""
    g0 = data.objective_grad(y)
    grad_scale = max(1.0, float(np.max(np.abs(g0))), data.pw if data.free_p else 0.0)
    stat = float(np.max(np.abs(_stationarity(data, y, p, duals)))) / grad_scale
    scale = max(1.0, abs(data.objective(y, p)))
    compl = max(float(np.max(duals[k] * -vals[k], initial=0.0)) for k in vals) / scale
    return max(stat, compl)


def solve(sp: ConvexSubproblem, tolerance: float = 1e-8, max_iter: int = 500, mu: float = 20.0) -> ConvexResult:
    """Solve ``sp`` by a log-barrier method started from its strictly feasible hint.

    Parameters
    ----------
    sp : ConvexSubproblem
    tolerance : float
        Target for the duality gap relative to max(1, |objective|).
    max_iter : int
        Cap on the total number of Newton steps.
    mu : float
        Growth factor of the barrier weight between centering rounds.

    Returns
    -------
    ConvexResult
        ``status`` is ``"optimal"``, ``"max-iterations"`` or
        ``"numerical-error"``; the returned point is strictly feasible in
        every case.

    Raises
    ------
    ConvexError
        ``"infeasible"`` when the hint is not strictly feasible.
    """
    data = _Data(sp)
    if not data.free_p and np.any(data.p_fixed < sp.p_floor):
        raise ConvexError("infeasible", "fixed power below floor")
    p = np.asarray(sp.p0, dtype=float).copy() if data.free_p else np.zeros(data.C)
    direct = evaluate_constraints(sp, sp.w0, p if data.free_p else None)
    for name, v in direct.items():
        if v.size and not np.max(v) < 0:
            raise ConvexError("infeasible", f"hint violates {name!r} constraints", float(np.max(v)))

    y = data.lift(sp.w0, p)
    vals = data.values(y, p)
    m = sum(v.size for v in vals.values())
    scale = max(1.0, abs(data.objective(y, p)))
    inv_t = scale / m
    steps = 0
    status = "max-iterations"
    centre = None
    while steps < max_iter:
        psi, vals = _barrier_value(data, y, p, inv_t)
        while steps < max_iter:
            s = {k: -v for k, v in vals.items()}
            lam = {k: inv_t / v for k, v in s.items()}
            try:
                dy, dp, ry, rp = _newton_direction(data, y, p, lam, s)
            except np.linalg.LinAlgError:
                status = "numerical-error"
                break
            dec = float(np.sum(ry * dy)) + (float(np.sum(rp * dp)) if data.free_p else 0.0)
            steps += 1
            # second clause: below it the barrier change is lost to rounding
            if dec <= CENTRING_TOL * inv_t or dec <= 1e-15 * scale:
                break
            step = 1.0
            while step > 1e-14:
                yn = y + step * dy
                pn = p + step * dp if data.free_p else p
                psin, valsn = _barrier_value(data, yn, pn, inv_t)
                if psin <= psi - 0.25 * step * dec:
                    break
                step *= 0.5
            else:
                break
            y, p, psi, vals = yn, pn, psin, valsn
        if status == "numerical-error":
            break
        scale = max(1.0, abs(data.objective(y, p)))
        gap = m * inv_t
        if centre is None and gap <= CENTRE_GAP * scale:
            centre = (y.copy(), p.copy())
        if gap <= tolerance * scale:
            status = "optimal"
            break
        inv_t /= mu
    if centre is None:
        centre = (y.copy(), p.copy())

    lam = {k: inv_t / -v for k, v in vals.items()}
    duals = _fitted_duals(data, y, p, vals, lam)
    kkt = _kkt_residual(data, y, p, vals, duals)
    f0 = data.objective(y, p)
    n2 = data.n2
    fixed = None if data.free_p else data.p_fixed.copy()
    return ConvexResult(
        w=complex_vector(y[:, :n2]),
        p=p if data.free_p else fixed,
        objective=f0,
        kkt_residual=kkt,
        iterations=steps,
        status=status,
        y=y,
        duals=duals,
        centre_w=complex_vector(centre[0][:, :n2]),
        centre_p=centre[1] if data.free_p else fixed,
    )
