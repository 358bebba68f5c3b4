"""
Manufactured Poisson problems -Laplace(u) = f in Omega, u = g on dOmega.
"""
import numpy as np
from cutfem.errors import ConfigurationError, fail

PROBLEMS = ("cosine", "affine")

# Below this radius the cosine source is replaced by its Taylor expansion.
SERIES_RADIUS = 1e-6

class ProblemData:
    """
    Data of a Poisson problem. Every callable maps points (q, 2) to (q,)
    values (gradients to (q, 2)).

    Parameters
    ----------
    * f                                     : (callable) Source term.
    * g                                     : (callable) Dirichlet data. Default: zero.
    * u_exact                               : (callable) Exact solution, optional.
    * grad_u_exact                          : (callable) Gradient of the exact solution, optional.
    * name                                  : (str) Label used in reports.
    """

    def __init__(self, f, g=None, u_exact=None, grad_u_exact=None, name="custom"):
        self.f = f
        self.g = g if g is not None else _zero
        self.u_exact = u_exact
        self.grad_u_exact = grad_u_exact
        self.name = name

    @property
    def has_exact_solution(self):
        return self.u_exact is not None and self.grad_u_exact is not None

    def __repr__(self):
        return "ProblemData(%s)"%(self.name)

def _zero(points):
    return np.zeros(np.asarray(points).shape[:-1])

def cosine_problem(center=(0.0, 0.0)):
    """
    u = cos(pi r) with r = |x - center|, which vanishes on the circle of
    radius 1/2. The source

        f = pi (sin(pi r) + pi r cos(pi r)) / r

    has a removable singularity at r = 0 (f -> 2 pi^2) and is evaluated
    with f = 2 pi^2 - (2/3) pi^4 r^2 for r < 1e-6.
    """
    center = np.asarray(center, dtype=np.float64).reshape(2)

    def radius(points):
        return np.linalg.norm(np.asarray(points, dtype=np.float64) - center, axis=-1)

    def u(points):
        return np.cos(np.pi*radius(points))

    def grad_u(points):
        diff = np.asarray(points, dtype=np.float64) - center
        r = np.linalg.norm(diff, axis=-1)
        # -pi sin(pi r)/r = -pi^2 sinc(r), smooth through the center.
        return (-np.pi**2*np.sinc(r))[..., None]*diff

    def f(points):
        r = radius(points)
        series = r < SERIES_RADIUS
        safe = np.where(series, 1.0, r)
        exact = np.pi*(np.sin(np.pi*safe) + np.pi*safe*np.cos(np.pi*safe))/safe
        return np.where(series, 2.0*np.pi**2 - (2.0/3.0)*np.pi**4*r**2, exact)

    return ProblemData(f, _zero, u, grad_u, name="cosine")

def affine_problem(a=0.0, b=1.0, c=0.0):
    """
    u = a + b x + c y with f = 0 and g = u, reproduced exactly by the
    discrete solution (patch test).
    """
    def u(points):
        points = np.asarray(points, dtype=np.float64)
        return a + b*points[..., 0] + c*points[..., 1]

    def grad_u(points):
        points = np.asarray(points, dtype=np.float64)
        return np.broadcast_to(np.array([b, c], dtype=np.float64), points.shape).copy()

    return ProblemData(_zero, u, u, grad_u, name="affine")

def build_problem(name, center=(0.0, 0.0)):
    """
    Returns the manufactured problem called name.

    Raises
    ------
    * ConfigurationError
                                    * If name is not one of PROBLEMS.
    """
    if name == "cosine":
        return cosine_problem(center)
    if name == "affine":
        return affine_problem()
    fail(ConfigurationError, "Unknown problem '%s'. Expected one of %s."%(name, PROBLEMS))
