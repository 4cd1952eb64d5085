"""Canonical convex subproblem: maximize a linear functional plus weighted
logarithms of positive linear functionals over Hermitian PSD blocks, subject
to trace equalities/inequalities and diagonal bounds/pins.

All three convex subproblems of the pipeline (the fractional-transform
beamformer problem, its penalty steps, and the per-iteration surrogate
problem of the reflection step) are instances of this form.  Solving is
delegated to cvxpy (CLARABEL, with an SCS retry on inaccurate results);
solutions are symmetrized and eigenvalue-clipped so returned blocks are
exactly PSD.
"""

from dataclasses import dataclass, field
import warnings

import cvxpy as cp
import numpy as np

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_MAX_ITERATIONS = "max-iterations"


class ConicSolverError(RuntimeError):
    """Raised when the backend solver cannot produce any iterate."""


def _check_coeff(C, dim, what):
    if C is None:
        return None
    C = np.asarray(C, dtype=complex)
    if C.shape != (dim, dim):
        raise ValueError(f"{what}: expected shape {(dim, dim)}, got {C.shape}")
    if np.max(np.abs(C - C.conj().T)) > 1e-10 * max(1.0, np.max(np.abs(C))):
        raise ValueError(f"{what}: coefficient matrix must be Hermitian")
    return 0.5 * (C + C.conj().T)


@dataclass
class LogTerm:
    """weight * ln(sum_b Re tr(coeffs[b] X_b)); weight must be positive."""

    weight: float
    coeffs: list  # one Hermitian matrix (or None) per block


@dataclass
class TraceConstraint:
    """sum_b Re tr(coeffs[b] X_b) <relation> rhs, relation in {'<=', '=='}."""

    coeffs: list
    relation: str
    rhs: float


@dataclass
class ConicProblem:
    blocks: list  # PSD block dimensions
    linear: list = None  # one Hermitian matrix (or None) per block
    logs: list = field(default_factory=list)
    constraints: list = field(default_factory=list)
    diag_bounds: list = None  # per block: {index: cap} or None
    diag_pins: list = None  # per block: {index: value} or None

    def validated(self):
        nb = len(self.blocks)
        if self.linear is None:
            self.linear = [None] * nb
        if self.diag_bounds is None:
            self.diag_bounds = [None] * nb
        if self.diag_pins is None:
            self.diag_pins = [None] * nb
        self.linear = [
            _check_coeff(C, d, f"linear[{b}]")
            for b, (C, d) in enumerate(zip(self.linear, self.blocks))
        ]
        for k, term in enumerate(self.logs):
            if term.weight <= 0:
                raise ValueError(f"log term {k}: weight must be positive")
            term.coeffs = [
                _check_coeff(C, d, f"log[{k}][{b}]")
                for b, (C, d) in enumerate(zip(term.coeffs, self.blocks))
            ]
        for k, con in enumerate(self.constraints):
            if con.relation not in ("<=", "=="):
                raise ValueError(f"constraint {k}: unknown relation {con.relation!r}")
            con.coeffs = [
                _check_coeff(C, d, f"constraint[{k}][{b}]")
                for b, (C, d) in enumerate(zip(con.coeffs, self.blocks))
            ]
        return self


@dataclass
class SolverOptions:
    feas_tol: float = 1e-9
    max_iters: int = 500
    verbose: bool = False


@dataclass
class ConicSolution:
    blocks: list
    objective: float
    status: str


def _affine(coeffs, xs):
    expr = 0
    for C, X in zip(coeffs, xs):
        if C is not None:
            expr = expr + cp.real(cp.trace(C @ X))
    return expr


def _objective_scale(problem):
    """Positive constant 1/c with which the objective is multiplied before
    solving; rescaling the whole objective leaves the maximizer unchanged
    but keeps penalty-inflated coefficients in the solver's comfort zone."""
    mags = [np.max(np.abs(C)) for C in problem.linear if C is not None]
    mags += [term.weight for term in problem.logs]
    return 1.0 / max(1.0, *mags) if mags else 1.0


def _build(problem, scale=1.0):
    xs = [cp.Variable((d, d), hermitian=True) for d in problem.blocks]
    obj = _affine([None if C is None else scale * C for C in problem.linear], xs)
    for term in problem.logs:
        obj = obj + (scale * term.weight) * cp.log(_affine(term.coeffs, xs))
    cons = [X >> 0 for X in xs]
    for con in problem.constraints:
        lhs = _affine(con.coeffs, xs)
        cons.append(lhs <= con.rhs if con.relation == "<=" else lhs == con.rhs)
    for X, bounds in zip(xs, problem.diag_bounds):
        if bounds:
            for i, cap in bounds.items():
                cons.append(cp.real(X[i, i]) <= cap)
    for X, pins in zip(xs, problem.diag_pins):
        if pins:
            for i, val in pins.items():
                cons.append(cp.real(X[i, i]) == val)
    return xs, obj, cons


def _clip_psd(X):
    X = 0.5 * (X + X.conj().T)
    vals, vecs = np.linalg.eigh(X)
    if vals[0] >= 0:
        return X
    vals = np.clip(vals, 0.0, None)
    return (vecs * vals) @ vecs.conj().T


def _objective_value(problem, blocks):
    val = 0.0
    for C, X in zip(problem.linear, blocks):
        if C is not None:
            val += float(np.real(np.trace(C @ X)))
    for term in problem.logs:
        arg = 0.0
        for C, X in zip(term.coeffs, blocks):
            if C is not None:
                arg += float(np.real(np.trace(C @ X)))
        if arg <= 0:
            return -np.inf
        val += term.weight * np.log(arg)
    return val


def _solve_cvxpy(prob, solver, options, **kwargs):
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # cvxpy's own reduction/accuracy chatter
            prob.solve(solver=solver, verbose=options.verbose, **kwargs)
    except Exception:
        return "solver_error"
    return prob.status


def _feasibility_error(problem, blocks):
    """Largest normalized constraint violation of a candidate point."""
    worst = 0.0
    for con in problem.constraints:
        lhs = 0.0
        for C, X in zip(con.coeffs, blocks):
            if C is not None:
                lhs += float(np.real(np.trace(C @ X)))
        err = (lhs - con.rhs) if con.relation == "<=" else abs(lhs - con.rhs)
        worst = max(worst, err / max(1.0, abs(con.rhs)))
    for X, bounds in zip(blocks, problem.diag_bounds):
        if bounds:
            for i, cap in bounds.items():
                worst = max(worst, (float(np.real(X[i, i])) - cap) / max(1.0, abs(cap)))
    for X, pins in zip(blocks, problem.diag_pins):
        if pins:
            for i, val in pins.items():
                worst = max(worst, abs(float(np.real(X[i, i])) - val) / max(1.0, abs(val)))
    return worst


def solve(problem, options=None, objective_scale=None, fallback=True):
    """Solve the canonical problem; never raises for infeasibility or
    non-convergence (reported through the status field instead).

    CLARABEL is tried first on the rescaled objective (callers with a better
    estimate of the optimum's magnitude can override ``objective_scale``); a
    near-solved iterate is accepted when its feasibility residuals check
    out, otherwise the unscaled objective and finally a high-accuracy SCS
    run (skipped with ``fallback=False``) get a chance and the best feasible
    iterate wins.
    """
    options = options or SolverOptions()
    problem = problem.validated()
    scale = objective_scale if objective_scale is not None else _objective_scale(problem)
    max_iter = max(options.max_iters, 50)
    attempts = [("CLARABEL", scale, {"max_iter": max_iter})]
    if scale != 1.0:
        # an extreme rescaling can itself defeat the backend (tiny log
        # weights condition the exponential cones badly), so the literal
        # objective gets a second chance before the expensive fallback
        attempts.append(("CLARABEL", 1.0, {"max_iter": max_iter}))
    if fallback:
        attempts.append(("SCS", scale, {"eps": 1e-8, "max_iters": 50_000}))

    best = None
    clean = False
    status = None
    for solver, s, kwargs in attempts:
        xs, obj, cons = _build(problem, scale=s)
        prob = cp.Problem(cp.Maximize(obj), cons)
        status = _solve_cvxpy(prob, solver, options, **kwargs)
        if status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
            if best is None:
                return ConicSolution(blocks=None, objective=-np.inf, status=STATUS_INFEASIBLE)
            continue
        if any(X.value is None for X in xs):
            continue
        blocks = [_clip_psd(np.asarray(X.value)) for X in xs]
        cand = (blocks, _objective_value(problem, blocks), _feasibility_error(problem, blocks))
        if (
            best is None
            or (cand[2] <= 1e-7 and (best[2] > 1e-7 or cand[1] >= best[1]))
            or (best[2] > 1e-7 and cand[2] < best[2])
        ):
            best = cand
        clean = (
            status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE)
            and best is not None
            and best[2] <= 1e-7
        )
        if clean:
            break
    if best is None:
        raise ConicSolverError(f"backend produced no iterate (status {status})")
    blocks, objective, feas_err = best
    sol_status = STATUS_OPTIMAL if (clean or feas_err <= 1e-7) else STATUS_MAX_ITERATIONS
    return ConicSolution(blocks=blocks, objective=objective, status=sol_status)


def feasible_start(problem, options=None):
    """Phase-I: a point strictly inside all inequalities (and on all
    equalities), or an infeasibility report.

    Returns (status, blocks); status is 'optimal' with strictly feasible
    blocks, or 'infeasible'.
    """
    options = options or SolverOptions()
    problem = problem.validated()
    xs = [cp.Variable((d, d), hermitian=True) for d in problem.blocks]
    s = cp.Variable()
    cons = [s <= 1.0]
    for X, d in zip(xs, problem.blocks):
        cons.append(X >> s * np.eye(d))
    for con in problem.constraints:
        lhs = _affine(con.coeffs, xs)
        if con.relation == "<=":
            cons.append(lhs <= con.rhs - s * max(1.0, abs(con.rhs)))
        else:
            cons.append(lhs == con.rhs)
    for X, bounds in zip(xs, problem.diag_bounds):
        if bounds:
            for i, cap in bounds.items():
                cons.append(cp.real(X[i, i]) <= cap - s * max(1.0, abs(cap)))
    for X, pins in zip(xs, problem.diag_pins):
        if pins:
            for i, val in pins.items():
                cons.append(cp.real(X[i, i]) == val)
    prob = cp.Problem(cp.Maximize(s), cons)
    status = _solve_cvxpy(prob, "CLARABEL", options, max_iter=max(options.max_iters, 50))
    if status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
        status = _solve_cvxpy(prob, "SCS", options, eps=1e-9, max_iters=100_000)
    if status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE) or s.value is None or s.value <= 1e-12:
        return STATUS_INFEASIBLE, None
    return STATUS_OPTIMAL, [_clip_psd(np.asarray(X.value)) for X in xs]


def residuals(problem, blocks):
    """Constraint residuals of a candidate point (positive = violation)."""
    problem = problem.validated()
    out = []
    for con in problem.constraints:
        lhs = 0.0
        for C, X in zip(con.coeffs, blocks):
            if C is not None:
                lhs += float(np.real(np.trace(C @ X)))
        out.append(lhs - con.rhs if con.relation == "<=" else abs(lhs - con.rhs))
    for X, bounds in zip(blocks, problem.diag_bounds):
        if bounds:
            for i, cap in bounds.items():
                out.append(float(np.real(X[i, i])) - cap)
    for X, pins in zip(blocks, problem.diag_pins):
        if pins:
            for i, val in pins.items():
                out.append(abs(float(np.real(X[i, i])) - val))
    return np.array(out)


def dump(problem, path):
    """Write a plain-text listing of the problem (debug aid, not load-bearing).

    Format: one header line per section; matrices listed entrywise as
    ``block row col real imag`` in the style of matrix-market coordinate files.
    """
    problem = problem.validated()

    def write_mats(f, coeffs, tag):
        for b, C in enumerate(coeffs):
            if C is None:
                continue
            for i in range(C.shape[0]):
                for j in range(C.shape[1]):
                    if C[i, j] != 0:
                        f.write(f"{tag} {b} {i} {j} {C[i, j].real:.17g} {C[i, j].imag:.17g}\n")

    with open(path, "w", encoding="utf-8") as f:
        f.write("%%conic-problem\n")
        f.write("blocks " + " ".join(str(d) for d in problem.blocks) + "\n")
        write_mats(f, problem.linear, "linear")
        for k, term in enumerate(problem.logs):
            f.write(f"log {k} weight {term.weight:.17g}\n")
            write_mats(f, term.coeffs, f"logmat{k}")
        for k, con in enumerate(problem.constraints):
            f.write(f"constraint {k} {con.relation} {con.rhs:.17g}\n")
            write_mats(f, con.coeffs, f"conmat{k}")
        for b, bounds in enumerate(problem.diag_bounds):
            for i, cap in (bounds or {}).items():
                f.write(f"diagbound {b} {i} {cap:.17g}\n")
        for b, pins in enumerate(problem.diag_pins):
            for i, val in (pins or {}).items():
                f.write(f"diagpin {b} {i} {val:.17g}\n")
