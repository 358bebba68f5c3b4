import numpy as np
from cutfem.errors import ConfigurationError, fail

class LevelSet:
    """
    Signed distance like description of the physical domain
    Omega = {x : phi(x) < 0}.

    Parameters
    ----------
    * kind                                  : (str) 'circle' or 'halfplane'.
    * center                                : (tuple) Circle center (circle only).
    * radius                                : (float) Circle radius (circle only).
    * normal                                : (tuple) Outward normal of the halfplane (halfplane only),
                                                normalized on construction.
    * offset                                : (float) Omega = {normal . x < offset} (halfplane only).

    Raises
    ------
    * ConfigurationError
                                            * If kind is unknown.
                                            * If radius <= 0 or normal is zero.
    """

    KINDS = ("circle", "halfplane")

    def __init__(self, kind, center=(0.0, 0.0), radius=0.5, normal=(1.0, 0.0), offset=0.0):
        if kind not in self.KINDS:
            fail(ConfigurationError, "Unknown level set kind '%s'. Expected one of %s."%(kind, self.KINDS))
        self.__kind = kind
        self.__center = np.asarray(center, dtype=np.float64).reshape(2)
        self.__radius = float(radius)
        normal = np.asarray(normal, dtype=np.float64).reshape(2)
        self.__offset = float(offset)

        if kind == "circle" and not self.__radius > 0.0:
            fail(ConfigurationError, "Expected a positive circle radius. Got: %s."%(radius))
        norm = np.linalg.norm(normal)
        if kind == "halfplane" and not norm > 0.0:
            fail(ConfigurationError, "Expected a nonzero halfplane normal. Got: %s."%(normal,))
        if kind == "halfplane":
            self.__normal = normal/norm
            self.__offset = self.__offset/norm
        else:
            self.__normal = normal

    @classmethod
    def circle(cls, center=(0.0, 0.0), radius=0.5):
        return cls("circle", center=center, radius=radius)

    @classmethod
    def halfplane(cls, normal=(1.0, 0.0), offset=0.0):
        return cls("halfplane", normal=normal, offset=offset)

    @property
    def kind(self):
        return self.__kind

    @property
    def center(self):
        return self.__center

    @property
    def radius(self):
        return self.__radius

    @property
    def normal(self):
        return self.__normal

    @property
    def offset(self):
        return self.__offset

    def __call__(self, points):
        """
        Evaluates phi at a point (2,) or at points (q, 2).
        """
        points = np.asarray(points, dtype=np.float64)
        if self.__kind == "circle":
            return np.linalg.norm(points - self.__center, axis=-1) - self.__radius
        return points @ self.__normal - self.__offset

    def gradient(self, points):
        """
        Unit gradient of phi, the outward normal on the zero level set.
        """
        points = np.asarray(points, dtype=np.float64)
        if self.__kind == "circle":
            diff = points - self.__center
            return diff/np.linalg.norm(diff, axis=-1, keepdims=True)
        return np.broadcast_to(self.__normal, points.shape).copy()

    def __repr__(self):
        if self.__kind == "circle":
            return "LevelSet(circle, center=%s, radius=%g)"%(tuple(self.__center), self.__radius)
        return "LevelSet(halfplane, normal=%s, offset=%g)"%(tuple(self.__normal), self.__offset)
