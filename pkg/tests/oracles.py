"""Reference implementations used only by the tests.

They share no code with the package beyond the Point enum: servers are
plain coordinate pairs, algorithms are written out directly from their
definitions, and Opt is a brute force over every server choice.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from babyserver.core import Point

F = Fraction


def coord(p, d):
    return {"A": F(0), "B": F(1), "C": 1 + F(d)}[Point(p).value]


def seq_of(text):
    return [Point(c) for c in text]


def brute_opt(seq, d):
    """Minimum cost over all 2^n ways to say which server serves each
    request.  Servers may cross; the chosen server walks to the point."""
    pts = [coord(p, d) for p in seq]
    best = None

    def rec(i, x, y, cost):
        nonlocal best
        if best is not None and cost >= best:
            return
        if i == len(pts):
            best = cost
            return
        q = pts[i]
        rec(i + 1, q, y, cost + abs(x - q))
        rec(i + 1, x, q, cost + abs(y - q))

    rec(0, F(0), 1 + F(d), F(0))
    return best


def greedy(seq, d):
    x, y, cost = F(0), 1 + F(d), F(0)
    for p in seq:
        q = coord(p, d)
        if abs(x - q) <= abs(y - q):
            cost, x = cost + abs(x - q), q
        else:
            cost, y = cost + abs(y - q), q
    return cost


def dummy(seq, d):
    # only ever the right server moves between B and C
    y, cost = 1 + F(d), F(0)
    for p in seq:
        q = coord(p, d)
        if q != 0:
            cost, y = cost + abs(y - q), q
    return cost


def dc_positions(x, y, q, a):
    """One step of double coverage with right speed a on coordinates x <= y.
    Returns new (x, y, cost)."""
    if q <= x:
        return q, y, x - q
    if q >= y:
        return x, q, q - y
    t = min(q - x, (y - q) / a)
    return x + t, y - a * t, t + a * t


def dc(seq, d, a=1):
    a = F(a)
    x, y, cost = F(0), 1 + F(d), F(0)
    for p in seq:
        x, y, c = dc_positions(x, y, coord(p, d), a)
        cost += c
    return cost


def ldc(seq, d, a=1):
    """Lazy a-DC: virtual servers run a-DC on uncovered requests only; a
    real server moves to the request when its twin gets there, the
    physically nearer one when both do."""
    a = F(a)
    vx, vy = F(0), 1 + F(d)
    rx, ry = F(0), 1 + F(d)
    cost = F(0)
    for p in seq:
        q = coord(p, d)
        if q in (rx, ry):
            continue
        vx, vy, _ = dc_positions(vx, vy, q, a)
        at_x, at_y = vx == q, vy == q
        if at_x and at_y:
            use_x = abs(rx - q) <= abs(ry - q)
        else:
            use_x = at_x
        if use_x:
            cost, rx = cost + abs(rx - q), q
        else:
            cost, ry = cost + abs(ry - q), q
    return cost


def bal(seq, d):
    """Balance restricted to moves that keep the servers ordered."""
    x, y = F(0), 1 + F(d)
    dx = dy = F(0)
    cost = F(0)
    for p in seq:
        q = coord(p, d)
        if q in (x, y):
            continue
        if q < x:
            dx, cost, x = dx + x - q, cost + x - q, q
        elif q > y:
            dy, cost, y = dy + q - y, cost + q - y, q
        else:
            mx = max(dx + q - x, dy)
            my = max(dx, dy + y - q)
            if mx < my or (mx == my and q - x > y - q):
                dx, cost, x = dx + q - x, cost + q - x, q
            else:
                dy, cost, y = dy + y - q, cost + y - q, q
    return cost


def all_seqs(n):
    return itertools.product([Point.A, Point.B, Point.C], repeat=n)


def distinct_arrangements(counts):
    """Distinct orderings of a multiset given as a string like "AABBC"."""
    return sorted(set(itertools.permutations(counts)))
