"""Fixed-node Gauss-Legendre rules used by the theory and kernel code.

Fixed rules (rather than adaptive ones) make the results deterministic and
let tests check convergence by doubling the node count.
"""

from functools import lru_cache

import numpy as np

DEFAULT_ORDER = 32


@lru_cache(maxsize=None)
def _legendre(order):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def nodes_weights(breaks, order=DEFAULT_ORDER):
    """Composite Gauss-Legendre nodes and weights over consecutive panels.

    Parameters
    ----------
    breaks : array_like
        Increasing panel endpoints.
    order : int
        Nodes per panel.
    """
    breaks = np.asarray(breaks, dtype=float)
    x, w = _legendre(order)
    lo, hi = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + hi) * 0.5 + half * x
    weights = half * w
    return nodes.ravel(), weights.ravel()


def uniform_breaks(a, b, panels):
    return np.linspace(a, b, int(panels) + 1)


def graded_breaks(a, b, levels=48, uniform=4):
    """Panels refined geometrically towards the right endpoint ``b``.

    Suited to integrands with a boundary layer at ``b`` such as
    ``exp((s**lam - 1) / eps)`` for small ``eps``.
    """
    length = b - a
    gaps = length * 0.5 ** np.arange(1, levels + 1)
    head = np.linspace(a, b - gaps[0], uniform + 1)
    tail = b - gaps[1:]
    return np.concatenate([head, tail, [b]])


def integrate(f, breaks, order=DEFAULT_ORDER):
    """Integrate a vectorised ``f`` over the panels given by ``breaks``."""
    nodes, weights = nodes_weights(breaks, order)
    return np.dot(weights, f(nodes))
