"""
Integration rules on the reference triangle and on straight segments.

A QuadratureRule holds physical points (q, 2) and positive weights (q,).
A BoundaryQuadratureRule additionally holds unit outward normals (q, 2).
"""
import numpy as np
from collections import namedtuple
from cutfem.errors import UnsupportedOrderError, fail

QuadratureRule = namedtuple("QuadratureRule", ["points", "weights"])
BoundaryQuadratureRule = namedtuple("BoundaryQuadratureRule", ["points", "weights", "normals"])

MAX_ORDER = 4

# Barycentric points and weights (weights sum to one).
_CENTROID = (np.array([[1.0/3.0, 1.0/3.0, 1.0/3.0]]), np.array([1.0]))

_STRANG_FIX_3 = (np.array([[2.0/3.0, 1.0/6.0, 1.0/6.0],
                           [1.0/6.0, 2.0/3.0, 1.0/6.0],
                           [1.0/6.0, 1.0/6.0, 2.0/3.0]]),
                 np.full(3, 1.0/3.0))

_A1, _W1 = 0.44594849091596488632, 0.22338158967801146570
_A2, _W2 = 0.091576213509770743460, 0.10995174365532186764
_DUNAVANT_6 = (np.array([[_A1, _A1, 1.0 - 2.0*_A1],
                         [_A1, 1.0 - 2.0*_A1, _A1],
                         [1.0 - 2.0*_A1, _A1, _A1],
                         [_A2, _A2, 1.0 - 2.0*_A2],
                         [_A2, 1.0 - 2.0*_A2, _A2],
                         [1.0 - 2.0*_A2, _A2, _A2]]),
               np.array([_W1, _W1, _W1, _W2, _W2, _W2]))

# 3-point Gauss-Legendre on [0, 1].
_GAUSS_3 = (0.5 + 0.5*np.array([-np.sqrt(0.6), 0.0, np.sqrt(0.6)]),
            np.array([5.0/18.0, 8.0/18.0, 5.0/18.0]))

def reference_rule(order):
    """
    Returns the barycentric simplex rule exact for polynomials of
    degree <= order.

    Parameters
    ----------
    * order                         : (int) Polynomial exactness, 0 <= order <= 4.

    Returns
    -------
    * bary                          : (np.array) (q, 3) barycentric coordinates.
    * weights                       : (np.array) (q,) weights summing to one.

    Raises
    ------
    * UnsupportedOrderError
                                    * If order > 4 or order < 0.
    """
    if int(order) != order or order < 0:
        fail(UnsupportedOrderError, "Expected a non-negative integer quadrature order. Got: %s."%(order))
    if order > MAX_ORDER:
        fail(UnsupportedOrderError, "Quadrature order %d is not supported (maximum %d)."%(order, MAX_ORDER))
    if order <= 1:
        return _CENTROID
    if order == 2:
        return _STRANG_FIX_3
    return _DUNAVANT_6

def triangle_rule(vertices, order):
    """
    Maps the reference rule of the given order to the
    triangle with the given (3, 2) vertices.
    """
    bary, weights = reference_rule(order)
    vertices = np.asarray(vertices, dtype=np.float64)
    e1 = vertices[1] - vertices[0]
    e2 = vertices[2] - vertices[0]
    area = 0.5*abs(e1[0]*e2[1] - e1[1]*e2[0])
    return QuadratureRule(bary @ vertices, weights*area)

def polygon_rule(polygon, order):
    """
    Fan-triangulates a convex polygon from its first vertex
    and concatenates the triangle rules of the pieces.
    """
    polygon = np.asarray(polygon, dtype=np.float64)
    points, weights = [], []
    for k in range(1, len(polygon) - 1):
        rule = triangle_rule(polygon[[0, k, k + 1]], order)
        points.append(rule.points)
        weights.append(rule.weights)
    return QuadratureRule(np.vstack(points), np.concatenate(weights))

def segment_rule(p, q):
    """
    3-point Gauss rule on the segment [p, q]; weights sum to |q - p|.
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    t, w = _GAUSS_3
    points = p[None, :] + t[:, None]*(q - p)[None, :]
    return points, w*np.linalg.norm(q - p)

def polygon_area(polygon):
    """Shoelace area of a simple polygon given counter clockwise or clockwise."""
    polygon = np.asarray(polygon, dtype=np.float64)
    x, y = polygon[:, 0], polygon[:, 1]
    return 0.5*abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
