"""Symmetric triangle quadrature rules and node builders.

Barycentric Dunavant-style rules with positive weights (degrees 1, 2, 4, 5,
6, 8; a requested degree rounds up to the next available). Weights sum to 1
and are scaled by triangle area at node-construction time. Verified against
exact monomial integrals in the test suite.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


def _s3(w):
    return [((1 / 3, 1 / 3, 1 / 3), w)]


def _s21(a, w):
    b = 1.0 - 2.0 * a
    return [((b, a, a), w), ((a, b, a), w), ((a, a, b), w)]


def _s111(a, b, w):
    c = 1.0 - a - b
    return [((a, b, c), w), ((a, c, b), w), ((b, a, c), w),
            ((b, c, a), w), ((c, a, b), w), ((c, b, a), w)]


_TRIANGLE_RULES = {
    1: _s3(1.0),
    2: _s21(1 / 6, 1 / 3),
    4: _s21(0.445948490915965, 0.223381589678011)
       + _s21(0.091576213509771, 0.109951743655322),
    5: _s3(0.225)
       + _s21(0.470142064105115, 0.132394152788506)
       + _s21(0.101286507323456, 0.125939180544827),
    6: _s21(0.249286745170910, 0.116786275726379)
       + _s21(0.063089014491502, 0.050844906370207)
       + _s111(0.310352451033784, 0.636502499121399, 0.082851075618374),
    8: _s3(0.144315607677787)
       + _s21(0.459292588292723, 0.095091634267285)
       + _s21(0.170569307751760, 0.103217370534718)
       + _s21(0.050547228317031, 0.032458497623198)
       + _s111(0.263112829634638, 0.728492392955404, 0.027230314174435),
}

MAX_TRIANGLE_DEGREE = max(_TRIANGLE_RULES)


def available_degree(degree: int) -> int:
    """Smallest tabulated rule degree >= the request."""
    for d in sorted(_TRIANGLE_RULES):
        if d >= degree:
            return d
    raise ValueError(f"no triangle rule of degree >= {degree} (max {MAX_TRIANGLE_DEGREE})")


@lru_cache(maxsize=None)
def triangle_rule(degree: int):
    """(barycentric points (k, 3), weights (k,) summing to 1) for the unit triangle."""
    entries = _TRIANGLE_RULES[available_degree(degree)]
    pts = np.array([p for p, _ in entries])
    wts = np.array([w for _, w in entries])
    return pts, wts / wts.sum()


@lru_cache(maxsize=None)
def _subtriangle_corners(depth: int):
    """Barycentric corner matrices of the 4**depth midpoint-subdivision triangles."""
    tris = [np.eye(3)]
    for _ in range(depth):
        nxt = []
        for t in tris:
            v0, v1, v2 = t
            m01, m12, m02 = (v0 + v1) / 2, (v1 + v2) / 2, (v0 + v2) / 2
            nxt += [
                np.array([v0, m01, m02]),
                np.array([m01, v1, m12]),
                np.array([m02, m12, v2]),
                np.array([m01, m12, m02]),
            ]
        tris = nxt
    return tris


@lru_cache(maxsize=None)
def subdivided_rule(degree: int, depth: int):
    """Rule applied on each midpoint-subdivision triangle, expressed on the parent.

    Returns (B, w): node barycentrics (M, 3) and weights (M,) with sum(w) = 1,
    M = 4**depth * k.
    """
    pts, wts = triangle_rule(degree)
    tris = _subtriangle_corners(depth)
    b = np.concatenate([pts @ t for t in tris], axis=0)
    w = np.tile(wts / 4**depth, len(tris))
    return b, w


def triangle_nodes(corners, degree: int, depth: int = 0):
    """Quadrature nodes/weights over a triangle given as a (3, 2) corner array."""
    b, w = subdivided_rule(degree, depth)
    corners = np.asarray(corners, dtype=float)
    pts = b @ corners
    e1 = corners[1] - corners[0]
    e2 = corners[2] - corners[0]
    area = 0.5 * abs(e1[0] * e2[1] - e1[1] * e2[0])
    return pts, w * area


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def segment_nodes(p0, p1, n: int):
    """Gauss-Legendre nodes/weights along the segment p0 -> p1 (weights sum to length)."""
    x, w = gauss_legendre(n)
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    mid = 0.5 * (p0 + p1)
    half = 0.5 * (p1 - p0)
    pts = mid[None, :] + np.outer(x, half)
    return pts, w * float(np.linalg.norm(half))
