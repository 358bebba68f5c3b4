"""
Continuous piecewise linear Lagrange space on the active mesh.
"""
import numpy as np
from cutfem.errors import ContractViolationError, fail

class DofMap:
    """
    One degree of freedom per node of the active mesh, numbered by
    ascending background node id.

    Parameters
    ----------
    * active                                : (ActiveMesh) Active mesh.

    Attributes
    ----------
    * active                                * (ActiveMesh) The active mesh.
    * num_dofs                              * (int) |I|.
    * degree                                * (int) Polynomial degree, fixed to 1.
    * dof_nodes                             * (np.array) Background node id of every dof.
    * coordinates                           * (np.array) (|I|, 2) node coordinates x_i.
    * node_to_dof                           * (np.array) Dof index of every background node, -1 if inactive.
    """

    def __init__(self, active):
        self.__active = active
        mesh = active.parent
        self.__degree = 1
        self.__dof_nodes = np.unique(mesh.elements[active.elements])
        self.__node_to_dof = -np.ones(mesh.num_nodes, dtype=np.int64)
        self.__node_to_dof[self.__dof_nodes] = np.arange(len(self.__dof_nodes))
        self.__element_dofs = self.__node_to_dof[mesh.elements]
        self.__coordinates = mesh.nodes[self.__dof_nodes]

        # Support of every basis function: the active elements holding the node.
        elements = active.elements
        dofs = self.__element_dofs[elements].ravel()
        owners = np.repeat(elements, 3)
        order = np.lexsort((owners, dofs))
        dofs, owners = dofs[order], owners[order]
        splits = np.searchsorted(dofs, np.arange(1, len(self.__dof_nodes)))
        self.__supports = np.split(owners, splits)

    @property
    def active(self):
        return self.__active

    @property
    def degree(self):
        return self.__degree

    @property
    def num_dofs(self):
        return len(self.__dof_nodes)

    @property
    def dof_nodes(self):
        return self.__dof_nodes

    @property
    def node_to_dof(self):
        return self.__node_to_dof

    @property
    def coordinates(self):
        return self.__coordinates

    def element_dofs(self, element):
        """Global dofs I_T of an active element, in local vertex order."""
        self.__active.check_active(element)
        return self.__element_dofs[element]

    def all_element_dofs(self):
        """(E, 3) dofs of every background element, -1 entries for inactive nodes."""
        return self.__element_dofs

    def support(self, dof):
        """Active elements in the support of basis function dof, ascending."""
        return self.__supports[dof]

    def interpolate(self, fn):
        """Nodal interpolant of a function of points (q, 2) -> (q,)."""
        return np.asarray(fn(self.coordinates), dtype=np.float64)

    def element_polynomial(self, v, element):
        """Restriction of v to an element as an ElementPolynomial."""
        return ElementPolynomial(self.__active.parent, element, np.asarray(v)[self.element_dofs(element)])

    def __repr__(self):
        return str({'Dofs': self.num_dofs, 'Degree': self.degree, 'Active elements': len(self.__active)})

class ElementPolynomial:
    """
    Affine function given by its three nodal coefficients on an element,
    stored as (value at centroid, constant gradient) so that it can be
    evaluated anywhere in the plane (canonical extension).

    Parameters
    ----------
    * mesh                                  : (BackgroundMesh) Background mesh.
    * element                               : (int) Element id.
    * coefficients                          : (np.array) (3,) nodal values in local vertex order.
    """

    def __init__(self, mesh, element, coefficients):
        self.__element = int(element)
        self.__coefficients = np.asarray(coefficients, dtype=np.float64).reshape(3)
        self.__centroid = mesh.centroids[element]
        self.__value = self.__coefficients.mean()
        self.__gradient = self.__coefficients @ mesh.basis_gradients[element]

    @property
    def element(self):
        return self.__element

    @property
    def coefficients(self):
        return self.__coefficients

    @property
    def value(self):
        return self.__value

    @property
    def gradient(self):
        return self.__gradient

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        return self.__value + (x - self.__centroid) @ self.__gradient

def extension_basis(mesh, element, x):
    """
    Values of the canonical extensions of the three element basis
    functions at the points x.

    Returns
    -------
    * values                        : (np.array) (3,) for a single point, (q, 3) otherwise.
    """
    x = np.asarray(x, dtype=np.float64)
    return 1.0/3.0 + (x - mesh.centroids[element]) @ mesh.basis_gradients[element].T

def build_dof_map(active):
    """
    Numbers the nodes of the active elements contiguously.

    Parameters
    ----------
    * active                        : (ActiveMesh) Nonempty active mesh.

    Returns
    -------
    * dofmap                        : (DofMap) The P1 dof map.
    """
    return DofMap(active)

def extend_and_eval(dofmap, v, element, x):
    """
    Evaluates the canonical extension of v restricted to element at x.

    Returns
    -------
    * value                         : (float) Extension value at x.
    * gradient                      : (np.array) (2,) constant element gradient.
    """
    p = dofmap.element_polynomial(v, element)
    return p(x), p.gradient

def jump_eval(dofmap, v, element_1, element_2, x):
    """
    Jump [v]_{T1,T2} = v1^e - v2^e at x and the jump of the gradients.
    """
    p1 = dofmap.element_polynomial(v, element_1)
    p2 = dofmap.element_polynomial(v, element_2)
    return p1(x) - p2(x), p1.gradient - p2.gradient

def nodal_functional(dofmap, dof, element, p):
    """
    Point evaluation of p at the node x_i of dof i, for i in I_T.

    Raises
    ------
    * ContractViolationError
                                    * If dof does not belong to element.
    """
    if dof not in dofmap.element_dofs(element):
        fail(ContractViolationError, "Dof %d is not a dof of element %d."%(dof, element))
    return float(p(dofmap.coordinates[dof]))
