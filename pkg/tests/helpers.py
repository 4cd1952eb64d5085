"""Shared oracle helpers for the verification suite.

The conic oracle enumerates 2x2 Hermitian PSD matrices through the Bloch
parameterization X = (s/2)(I + r n.sigma): s = tr(X), r the purity radius,
n a unit vector.  This covers the full PSD cone slice tr(X) <= s_max, so a
dense grid lower-bounds (and, at fine resolution, nearly attains) the
optimum of any objective over that set.
"""

import numpy as np
import scipy.optimize

PAULI = np.array(
    [
        [[0.0, 1.0], [1.0, 0.0]],
        [[0.0, -1.0j], [1.0j, 0.0]],
        [[1.0, 0.0], [0.0, -1.0]],
    ],
    dtype=complex,
)


def bloch_matrices(s, r, theta, phi):
    """2x2 PSD matrices from Bloch coordinate grids (1-D arrays each)."""
    ss, rr, tt, pp = np.meshgrid(s, r, theta, phi, indexing="ij")
    n = np.stack(
        [np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp), np.cos(tt)], axis=-1
    )
    X = 0.5 * ss[..., None, None] * (
        np.eye(2) + rr[..., None, None] * np.einsum("...k,kij->...ij", n, PAULI)
    )
    return X.reshape(-1, 2, 2)


def _bloch_point(x):
    s, r, theta, phi = x
    return bloch_matrices(np.array([s]), np.array([r]), np.array([theta]),
                          np.array([phi]))[0]


def _polish_bloch_max(problem, x0, s_max):
    """Constrained local polish of a grid candidate: maxima of these problems
    often sit on vertices where several constraints are active at once, a
    regime any finite grid resolves poorly.  The value is only trusted when
    the polished point verifies feasible."""

    def objective(x):
        X = _bloch_point(x)
        val = 0.0
        if problem.linear[0] is not None:
            val += float(np.real(np.trace(problem.linear[0] @ X)))
        for term in problem.logs:
            arg = float(np.real(np.trace(term.coeffs[0] @ X)))
            if arg <= 1e-12:
                return 1e6
            val += term.weight * np.log(arg)
        return -val

    def trace_fun(C, shift=0.0, sign=1.0):
        return lambda x: sign * (
            float(np.real(np.trace(C @ _bloch_point(x)))) - shift
        )

    cons = []
    for con in problem.constraints:
        kind = "ineq" if con.relation == "<=" else "eq"
        cons.append({"type": kind, "fun": trace_fun(con.coeffs[0], con.rhs, -1.0)})
    for term in problem.logs:
        cons.append({"type": "ineq", "fun": trace_fun(term.coeffs[0], 1e-9)})
    for i, cap in (problem.diag_bounds[0] or {}).items():
        E = np.zeros_like(_bloch_point(x0))
        E[i, i] = 1.0
        cons.append({"type": "ineq", "fun": trace_fun(E, cap, -1.0)})
    for i, val in (problem.diag_pins[0] or {}).items():
        E = np.zeros_like(_bloch_point(x0))
        E[i, i] = 1.0
        cons.append({"type": "eq", "fun": trace_fun(E, val)})
    res = scipy.optimize.minimize(
        objective,
        x0,
        method="SLSQP",
        bounds=[(1e-6 * s_max, s_max), (0.0, 1.0), (None, None), (None, None)],
        constraints=cons,
        options={"maxiter": 300, "ftol": 1e-14},
    )
    viol = max(
        (max(0.0, -c["fun"](res.x)) if c["type"] == "ineq" else abs(c["fun"](res.x)))
        for c in cons
    )
    return -float(res.fun) if viol <= 1e-8 else -np.inf


def refine_bloch_max(problem, s_max=1.0, n=14, stages=5, top_k=8):
    """Hierarchical grid maximization of a single 2x2-block ConicProblem
    over the Bloch parameterization: the top coarse cells each get a greedy
    zoom so a single wrong basin cannot capture the refinement, and the
    surviving candidates are polished with a constrained local search."""
    lo0 = np.array([s_max / n, 0.0, 0.0, 0.0])
    hi0 = np.array([s_max, 1.0, np.pi, 2.0 * np.pi])

    def evaluate(lo, hi):
        axes = [np.linspace(lo[k], hi[k], n) for k in range(4)]
        vals = conic_objective_on_grid(problem, bloch_matrices(*axes))
        return axes, vals

    def shrink(lo, hi, axes, flat_index):
        idx = np.unravel_index(flat_index, (n, n, n, n))
        lo2, hi2 = lo.copy(), hi.copy()
        for d in range(4):
            width = (hi[d] - lo[d]) / (n - 1)
            center = axes[d][idx[d]]
            lo2[d] = max(lo[d], center - width)
            hi2[d] = min(hi[d], center + width)
        return lo2, hi2

    axes0, vals0 = evaluate(lo0, hi0)
    best = float(np.max(vals0))
    starts = []
    for k in np.argsort(vals0)[-top_k:]:
        if not np.isfinite(vals0[k]):
            continue
        lo, hi = shrink(lo0, hi0, axes0, int(k))
        for _ in range(stages - 1):
            axes, vals = evaluate(lo, hi)
            j = int(np.argmax(vals))
            best = max(best, float(vals[j]))
            lo, hi = shrink(lo, hi, axes, j)
        starts.append(0.5 * (lo + hi))
    for x0 in starts:
        best = max(best, _polish_bloch_max(problem, x0, s_max))
    return best


def trace_values(C, Xs):
    """Re tr(C X) for a stack of matrices."""
    return np.real(np.einsum("ij,nji->n", C, Xs))


def conic_objective_on_grid(problem, Xs):
    """Objective of a single-block ConicProblem on a matrix stack, with
    infeasible points (constraints, diagonal bounds/pins) masked to -inf."""
    obj = np.zeros(Xs.shape[0])
    if problem.linear[0] is not None:
        obj += trace_values(problem.linear[0], Xs)
    for term in problem.logs:
        arg = trace_values(term.coeffs[0], Xs)
        with np.errstate(divide="ignore", invalid="ignore"):
            obj += term.weight * np.where(arg > 0, np.log(np.maximum(arg, 1e-300)),
                                          -np.inf)
    ok = np.ones(Xs.shape[0], dtype=bool)
    for con in problem.constraints:
        lhs = trace_values(con.coeffs[0], Xs)
        if con.relation == "<=":
            ok &= lhs <= con.rhs + 1e-9
        else:
            ok &= np.abs(lhs - con.rhs) <= 1e-6
    for i, cap in (problem.diag_bounds[0] or {}).items():
        ok &= np.real(Xs[:, i, i]) <= cap + 1e-9
    for i, val in (problem.diag_pins[0] or {}).items():
        ok &= np.abs(np.real(Xs[:, i, i]) - val) <= 1e-6
    return np.where(ok, obj, -np.inf)


def random_hermitian(rng, d, scale=1.0):
    A = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return scale * 0.5 * (A + A.conj().T)


def random_psd(rng, d, floor=0.0):
    B = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return B @ B.conj().T / d + floor * np.eye(d)
