import numpy as np

from nrsensor.jsde.operators import context_from_area


def random_context(rng, groups=(4, 4), rho=None):
    """Random 3/4 context over ``groups`` = (rows, cols) of 2x2 groups."""
    codes = rng.integers(0, 4, groups).astype(np.uint8)
    sensor = rng.random(groups)
    if rho is None:
        weights = rng.random((2 * groups[0], 2 * groups[1])) + 0.05
        return context_from_area(sensor, codes, weights=weights)
    return context_from_area(sensor, codes, rho=rho)


def random_group_residual(rng, ctx, complex_=True):
    """Scan-order residual that is constant on every group, as D produces."""
    G = ctx.codes.size
    vals = rng.normal(size=G)
    if complex_:
        vals = vals + 1j * rng.normal(size=G)
    return np.repeat(vals, 4)
