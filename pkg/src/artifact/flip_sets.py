"""Flip-coordinate sets for correcting odd S-PC checks.

A flip coordinate ``(k1, k2)`` names two segments; flipping bit ``m`` of
both keeps every P-PC intact. A coordinate is feasible for a check vector
``gamma`` when it toggles exactly the checks with ``gamma[t] = 1`` and keeps
the checks with ``gamma[t] = 0``. Entries equal to ``-1`` (Rate-1 levels)
are unconstrained.

Coordinates are returned as sorted tuples ``(k1, k2)`` with ``k1 < k2``,
1-based.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .constraints import involvement_matrix


def _norm(a: int, b: int) -> tuple:
    return (a, b) if a < b else (b, a)


def _as_tuple(gamma) -> tuple:
    g = tuple(int(v) for v in np.asarray(gamma).ravel())
    if not g:
        raise ValueError("gamma must have at least one entry")
    if any(v not in (-1, 0, 1) for v in g):
        raise ValueError("gamma entries must be -1, 0 or 1")
    return g


def _lemma1(order: int) -> list:
    h = 1 << (order - 1)
    return [(k, k + h) for k in range(1, h + 1)]


def _split(F, half: int, last: int) -> list:
    out = []
    for k1, k2 in F:
        if last == 0:
            out += [(k1, k2), (k1 + half, k2 + half)]
        elif last == 1:
            out += [(k1 + half, k2), (k1, k2 + half)]
        else:
            out += [(k1, k2), (k1 + half, k2), (k1, k2 + half), (k1 + half, k2 + half)]
    return out


def _gen_sspc(g: tuple) -> list:
    d = len(g)
    if d == 1:
        return [(1, 2)] if g[0] == 1 else []
    if all(v == 0 for v in g[:-1]) and g[-1] == 1:
        return _lemma1(d)
    return _split(_gen_sspc(g[:-1]), 1 << (d - 1), g[-1])


def _gen_sr1spc_literal(g: tuple) -> list:
    d = len(g)
    if d == 1:
        return [(1, 2)] if g[0] == 1 else []
    if all(v != 1 for v in g[:-1]) and g[-1] == 1:
        return _lemma1(d)
    return _split(_gen_sr1spc_literal(g[:-1]), 1 << (d - 1), g[-1])


def _top_only(g: tuple) -> list:
    """Pairs ``(a, b + half)`` whose lower halves agree on every even check.

    With no Rate-1 level below the top this is ``{k, k + half}``; a Rate-1
    level lets ``a`` and ``b`` differ in the matching bit.
    """
    d = len(g)
    half = 1 << (d - 1)
    free = 0
    for t, v in enumerate(g[:-1]):
        if v == -1:
            free |= 1 << t
    out = []
    for a in range(half):
        for b in range(half):
            if (a ^ b) & ~free == 0:
                out.append((a + 1, b + 1 + half))
    return out


def _gen_sr1spc(g: tuple) -> list:
    d = len(g)
    if d == 1:
        return [(1, 2)] if g[0] == 1 else []
    if all(v != 1 for v in g[:-1]) and g[-1] == 1:
        return _top_only(g)
    return _split(_gen_sr1spc(g[:-1]), 1 << (d - 1), g[-1])


def _finish(pairs) -> tuple:
    return tuple(sorted({_norm(a, b) for a, b in pairs}))


@lru_cache(maxsize=None)
def _gen_sspc_cached(g: tuple) -> tuple:
    return _finish(_gen_sspc(g))


@lru_cache(maxsize=None)
def _gen_sr1spc_cached(g: tuple, literal: bool) -> tuple:
    return _finish(_gen_sr1spc_literal(g) if literal else _gen_sr1spc(g))


def split_coordinates(coords, order: int, last: int) -> tuple:
    """Lift order ``order - 1`` coordinates to order ``order``.

    ``last`` is the new top check: 0 keeps the pair inside one half, 1
    moves one of its segments to the upper half, -1 (Rate-1) allows all
    four placements.

    Examples
    --------
    >>> split_coordinates([(1, 3)], 3, 0)
    ((1, 3), (5, 7))
    >>> split_coordinates([(1, 3)], 3, 1)
    ((1, 7), (3, 5))
    """
    if order < 2 or last not in (-1, 0, 1):
        raise ValueError("order must be >= 2 and last in {-1, 0, 1}")
    return _finish(_split(coords, 1 << (order - 1), last))


def gen_sspc(gamma) -> tuple:
    """Flipping set for a node whose siblings are all SPC.

    Recursive construction: the order-1 case, the single-odd-top-check case
    ``{k, k + 2**(d-1)}``, otherwise split each coordinate of the order
    ``d-1`` set according to the last check.

    Parameters
    ----------
    gamma : sequence of {0, 1}
    """
    g = _as_tuple(gamma)
    if any(v == -1 for v in g):
        raise ValueError("gen_sspc takes no Rate-1 sentinels; use gen_sr1spc")
    return _gen_sspc_cached(g)


def gen_sr1spc(gamma, literal: bool = False) -> tuple:
    """Flipping set for a mixed Rate-1/SPC node.

    As :func:`gen_sspc`, plus a four-way split when the last entry is the
    Rate-1 sentinel ``-1``.

    Parameters
    ----------
    gamma : sequence of {-1, 0, 1}
    literal : bool
        Use the ``{k, k + 2**(d-1)}`` base case even when Rate-1 levels sit
        below the only odd check. That variant is sound but misses pairs
        whose segments differ on a Rate-1 level; the default base case
        admits them, so the result equals :func:`feasible_oracle`.
    """
    return _gen_sr1spc_cached(_as_tuple(gamma), bool(literal))


def feasible_oracle(gamma) -> tuple:
    """All feasible coordinates by exhaustive search over segment pairs."""
    g = np.array(_as_tuple(gamma))
    d = g.size
    if d > 12:
        raise ValueError("exhaustive search limited to order 12")
    M = involvement_matrix(d)
    odd = g == 1
    even = g == 0
    out = []
    for a, b in itertools.combinations(range(1 << d), 2):
        toggles = M[:, a] ^ M[:, b]
        if toggles[odd].all() and not toggles[even].any():
            out.append((a + 1, b + 1))
    return tuple(out)


def gamma_keys(order: int, spc_t) -> list:
    """Every check vector of a node: SPC positions take 0/1, others ``-1``.

    Parameters
    ----------
    order : int
        ``p - q``.
    spc_t : iterable of int
        0-based positions ``t - 1`` that carry an S-PC.

    Returns
    -------
    list of tuple
        Indexed by the integer whose bit ``j`` is the value of the ``j``-th
        SPC position.
    """
    spc_t = sorted(spc_t)
    keys = []
    for code in range(1 << len(spc_t)):
        g = [-1] * order
        for j, t in enumerate(spc_t):
            g[t] = (code >> j) & 1
        keys.append(tuple(g))
    return keys


def flip_table(order: int, spc_t) -> list:
    """Precomputed flipping sets for every check vector of a node."""
    return [gen_sr1spc(g) if any(v == 1 for v in g) else () for g in gamma_keys(order, spc_t)]
