"""Bounded Nelder-Mead simplex search (derivative-free).

Used for marginal-likelihood maximization over log-hyperparameters; every
proposed vertex is clamped into the box, so iterates never leave the bounds.
"""

import numpy as np

REFLECT, EXPAND, CONTRACT, SHRINK = 1.0, 2.0, 0.5, 0.5


def nelder_mead_bounded(fun, x0, lower, upper, max_iters=50, initial_step=0.25,
                        f_tol=1e-9, x_tol=1e-8):
    """Minimize ``fun`` over a box via Nelder-Mead with clamped proposals.

    Parameters
    ----------
    fun : callable
        Objective; may return ``inf`` for infeasible points.
    x0 : ndarray
        Starting point (clamped into the box).
    lower, upper : ndarray
        Box bounds, one entry per coordinate.
    max_iters : int
        Iteration budget; 0 evaluates the start point only.
    initial_step : float
        Per-coordinate offset used to build the initial simplex.

    Returns
    -------
    (x_best, f_best, trace, iterations)
        ``trace`` holds the best objective value seen after the initial
        simplex and after each iteration (monotone nonincreasing).
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    x0 = np.clip(np.asarray(x0, dtype=float), lower, upper)
    n = len(x0)

    def clamp(x):
        return np.clip(x, lower, upper)

    simplex = [x0]
    for i in range(n):
        x = x0.copy()
        # step towards the roomier side of the box
        if x[i] + initial_step <= upper[i]:
            x[i] += initial_step
        else:
            x[i] -= initial_step
        simplex.append(clamp(x))
    values = [float(fun(x)) for x in simplex]

    trace = [min(values)]
    iterations = 0
    for _ in range(int(max_iters)):
        order = np.argsort(values)
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        best, worst, second_worst = values[0], values[-1], values[-2]

        centroid = np.mean(simplex[:-1], axis=0)
        reflected = clamp(centroid + REFLECT * (centroid - simplex[-1]))
        f_reflected = float(fun(reflected))

        if f_reflected < best:
            expanded = clamp(centroid + EXPAND * (centroid - simplex[-1]))
            f_expanded = float(fun(expanded))
            if f_expanded < f_reflected:
                simplex[-1], values[-1] = expanded, f_expanded
            else:
                simplex[-1], values[-1] = reflected, f_reflected
        elif f_reflected < second_worst:
            simplex[-1], values[-1] = reflected, f_reflected
        else:
            contracted = clamp(centroid + CONTRACT * (simplex[-1] - centroid))
            f_contracted = float(fun(contracted))
            if f_contracted < worst:
                simplex[-1], values[-1] = contracted, f_contracted
            else:
                # shrink everything towards the current best vertex
                for i in range(1, len(simplex)):
                    simplex[i] = clamp(simplex[0] + SHRINK * (simplex[i] - simplex[0]))
                    values[i] = float(fun(simplex[i]))

        iterations += 1
        trace.append(min(trace[-1], min(values)))

        spread = max(values) - min(values)
        diameter = max(np.max(np.abs(s - simplex[0])) for s in simplex[1:])
        if spread < f_tol and diameter < x_tol:
            break

    i_best = int(np.argmin(values))
    return simplex[i_best], values[i_best], trace, iterations
