"""Independent reference computations shared by the unit and acceptance tests."""

import numpy as np
from scipy import optimize


def pava(y, w=None):
    """Weighted least-squares nondecreasing fit by pool-adjacent-violators."""
    y = np.asarray(y, dtype=float)
    w = np.ones_like(y) if w is None else np.asarray(w, dtype=float)
    blocks = []  # [mean, weight, length]
    for yi, wi in zip(y, w):
        blocks.append([yi, wi, 1])
        while len(blocks) > 1 and blocks[-2][0] > blocks[-1][0]:
            m2, w2, n2 = blocks.pop()
            m1, w1, n1 = blocks.pop()
            blocks.append([(m1 * w1 + m2 * w2) / (w1 + w2), w1 + w2, n1 + n2])
    return np.concatenate([np.full(n, m) for m, _, n in blocks])


def current_status_isotonic(times, delta):
    """Isotonic fit of the event indicators at the sorted distinct inspection times."""
    times = np.asarray(times, dtype=float)
    delta = np.asarray(delta, dtype=float)
    uniq, inv = np.unique(times, return_inverse=True)
    sums = np.bincount(inv, weights=delta)
    counts = np.bincount(inv).astype(float)
    return uniq, pava(sums / counts, counts)


def uniform_kernel_column(left, right, theta):
    left, right = np.asarray(left, float), np.asarray(right, float)
    upper = np.where(np.isinf(right), 1.0, np.minimum(right, theta) / theta)
    return upper - np.minimum(left, theta) / theta


def two_point_search(left, right, thetas):
    """Best log-likelihood over mixtures of at most two uniforms with endpoints in ``thetas``.

    The weight is optimized exactly (the objective is concave in it) for
    every pair.
    """
    cols = [uniform_kernel_column(left, right, t) for t in thetas]
    best = -np.inf
    for i, a in enumerate(cols):
        if np.all(a > 0):
            best = max(best, float(np.sum(np.log(a))))
        for b in cols[i + 1:]:
            def negll(w, a=a, b=b):
                f = w * a + (1 - w) * b
                return np.inf if np.any(f <= 0) else -float(np.sum(np.log(f)))
            res = optimize.minimize_scalar(negll, bounds=(0.0, 1.0), method="bounded",
                                           options={"xatol": 1e-12})
            if np.isfinite(res.fun):
                best = max(best, -res.fun)
    return best


def three_point_search(left, right, thetas):
    """Best log-likelihood over mixtures of at most three uniforms with endpoints in ``thetas``.

    With three observations a maximizing mixing distribution needs at most
    three atoms, so over a grid containing the optimal support this is the
    exact constrained optimum.  Weights are optimized on the simplex for every
    triple.
    """
    cols = [uniform_kernel_column(left, right, t) for t in thetas]
    best = two_point_search(left, right, thetas)
    for i in range(len(cols)):
        for j in range(i + 1, len(cols)):
            for k in range(j + 1, len(cols)):
                a = np.column_stack([cols[i], cols[j], cols[k]])

                def negll(v, a=a):
                    w = np.array([v[0], v[1], 1.0 - v[0] - v[1]])
                    f = a @ w
                    return 1e10 if np.any(f <= 0) else -float(np.sum(np.log(f)))

                res = optimize.minimize(
                    negll, x0=[1 / 3, 1 / 3], method="SLSQP", bounds=[(0, 1), (0, 1)],
                    constraints=[{"type": "ineq", "fun": lambda v: 1.0 - v[0] - v[1]}],
                    options={"ftol": 1e-15, "maxiter": 500})
                if res.fun < 1e9:
                    best = max(best, -float(res.fun))
    return best
