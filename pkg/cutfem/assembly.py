"""
Nitsche form a_h and load l_h on the cut domain, the stabilized system
A_h = a_h + s_h, the Clement and strong interpolants and the error
norms over Omega.
"""
import numpy as np
from cutfem.cut import element_quadrature, gather_boundary_rules, gather_volume_rules
from cutfem.errors import ConfigurationError, ContractViolationError, InternalConsistencyError, UnsupportedOperationError, fail
from cutfem.linalg import finalize_matrix
from cutfem.stabilization import nodal_weights
from cutfem.utils import print_info_msg

REGIONS = ("full", "cut")

# Default Nitsche penalty.
BETA = 10.0

class NitscheSystem:
    """
    Matrix of a_h and vector of l_h.

    Attributes
    ----------
    * matrix                                * (scipy.sparse.csr_matrix) a_h(phi_j, phi_i).
    * load                                  * (np.array) l_h(phi_i).
    * beta                                  * (float) Nitsche penalty.
    * h                                     * (float) Mesh size in the weight beta / h.
    """

    def __init__(self, matrix, load, beta, h):
        self.__matrix = matrix
        self.__load = load
        self.__beta = float(beta)
        self.__h = float(h)

    @property
    def matrix(self):
        return self.__matrix

    @property
    def load(self):
        return self.__load

    @property
    def beta(self):
        return self.__beta

    @property
    def h(self):
        return self.__h

    @property
    def shape(self):
        return self.__matrix.shape

class SystemMatrix:
    """
    Stabilized matrix A_h = a_h + s_h together with its two parts.
    """

    def __init__(self, matrix, nitsche, stabilization):
        self.__matrix = matrix
        self.__nitsche = nitsche
        self.__stabilization = stabilization

    @property
    def matrix(self):
        return self.__matrix

    @property
    def nitsche(self):
        return self.__nitsche

    @property
    def stabilization(self):
        return self.__stabilization

    @property
    def load(self):
        return self.__nitsche.load

    @property
    def shape(self):
        return self.__matrix.shape

    def __matmul__(self, v):
        return self.__matrix @ v

def basis_values(mesh, owners, points):
    """
    (q, 3) values of the three basis functions of element owners[k] at
    points[k], taken from the canonical extension.
    """
    shift = points - mesh.centroids[owners]
    return 1.0/3.0 + np.einsum("qd,qad->qa", shift, mesh.basis_gradients[owners])

def _local_triplets(dofs, blocks):
    """COO triplets from (q, 3) dofs and (q, 3, 3) local blocks."""
    rows = np.repeat(dofs[:, :, None], 3, axis=2)
    cols = np.repeat(dofs[:, None, :], 3, axis=1)
    return blocks.ravel(), (rows.ravel(), cols.ravel())

def _scatter(dofs, values, n):
    return np.bincount(dofs.ravel(), weights=values.ravel(), minlength=n)

def _volume_rules(active, region, order):
    if region not in REGIONS:
        fail(ConfigurationError, "Unknown integration region '%s'. Expected one of %s."%(region, REGIONS))
    return gather_volume_rules(active, order, full=(region == "full"))

def assemble_stiffness(active, dofmap, region="cut"):
    """
    Gram matrix (grad phi_j, grad phi_i) over Omega ('cut') or over
    the active mesh Omega_h ('full').
    """
    mesh = active.parent
    rule, owners = _volume_rules(active, region, 0)
    measure = np.bincount(owners, weights=rule.weights, minlength=mesh.num_elements)
    elements = active.elements
    G = mesh.basis_gradients[elements]
    blocks = measure[elements][:, None, None]*np.einsum("ead,ebd->eab", G, G)
    dofs = dofmap.all_element_dofs()[elements]
    n = dofmap.num_dofs
    return finalize_matrix(_local_triplets(dofs, blocks), shape=(n, n))

def assemble_mass(active, dofmap, region="cut"):
    """
    Gram matrix (phi_j, phi_i) over Omega ('cut') or Omega_h ('full').
    """
    mesh = active.parent
    rule, owners = _volume_rules(active, region, 2)
    values = basis_values(mesh, owners, rule.points)
    blocks = rule.weights[:, None, None]*values[:, :, None]*values[:, None, :]
    dofs = dofmap.all_element_dofs()[owners]
    n = dofmap.num_dofs
    return finalize_matrix(_local_triplets(dofs, blocks), shape=(n, n))

def assemble_boundary_flux(active, dofmap, order=3):
    """
    h (grad_n phi_j, grad_n phi_i) over dOmega.
    """
    mesh = active.parent
    rule, owners = gather_boundary_rules(active, order)
    n = dofmap.num_dofs
    normal_derivatives = np.einsum("qad,qd->qa", mesh.basis_gradients[owners], rule.normals)
    blocks = mesh.h*rule.weights[:, None, None]*normal_derivatives[:, :, None]*normal_derivatives[:, None, :]
    dofs = dofmap.all_element_dofs()[owners]
    return finalize_matrix(_local_triplets(dofs, blocks), shape=(n, n))

def assemble_nitsche(active, dofmap, data, beta=BETA, order=4, boundary_order=3):
    """
    Symmetric Nitsche discretization of the Poisson problem.

        a_h(v, w) = (grad v, grad w)_Omega - (grad_n v, w)_dOmega
                    - (v, grad_n w)_dOmega + beta/h (v, w)_dOmega
        l_h(w)    = (f, w)_Omega - (g, grad_n w)_dOmega + beta/h (g, w)_dOmega

    Parameters
    ----------
    * active                        : (ActiveMesh) Active mesh; its level set defines Omega.
    * dofmap                        : (DofMap) P1 dof map.
    * data                          : (ProblemData) Source f and Dirichlet data g.
    * beta                          : (float) Nitsche penalty. Default: 10.
    * order                         : (int) Volume quadrature order for the load.
    * boundary_order                : (int) Boundary quadrature order.

    Returns
    -------
    * nitsche                       : (NitscheSystem) Matrix and load.

    Raises
    ------
    * ConfigurationError
                                    * If beta <= 0.
    """
    if not beta > 0.0:
        fail(ConfigurationError, "Expected a positive Nitsche penalty. Got: %s."%(beta))
    mesh = active.parent
    n = dofmap.num_dofs
    element_dofs = dofmap.all_element_dofs()
    h = mesh.h

    stiffness = assemble_stiffness(active, dofmap, "cut")

    rule, owners = gather_volume_rules(active, order)
    values = basis_values(mesh, owners, rule.points)
    load = _scatter(element_dofs[owners], (rule.weights*data.f(rule.points))[:, None]*values, n)

    brule, bowners = gather_boundary_rules(active, boundary_order)
    bvalues = basis_values(mesh, bowners, brule.points)
    bnormal = np.einsum("qad,qd->qa", mesh.basis_gradients[bowners], brule.normals)
    w = brule.weights[:, None, None]
    blocks = w*(-bnormal[:, None, :]*bvalues[:, :, None]
                - bvalues[:, None, :]*bnormal[:, :, None]
                + (beta/h)*bvalues[:, None, :]*bvalues[:, :, None])
    bdofs = element_dofs[bowners]
    boundary_values, (rows, cols) = _local_triplets(bdofs, blocks)
    stiffness = stiffness.tocoo()
    matrix = finalize_matrix((np.concatenate((stiffness.data, boundary_values)),
                              (np.concatenate((stiffness.row, rows)), np.concatenate((stiffness.col, cols)))),
                             shape=(n, n))

    g = data.g(brule.points)
    load += _scatter(bdofs, (brule.weights*g)[:, None]*(-bnormal + (beta/h)*bvalues), n)
    print_info_msg("Nitsche system: %d dofs, %d boundary points, beta = %g."%(n, len(brule.weights), beta))
    return NitscheSystem(matrix, load, beta, h)

def assemble_system(nitsche, stabilization):
    """
    A_h = a_h + s_h.

    Raises
    ------
    * ContractViolationError
                                    * If the two matrices have different sizes.
    """
    if nitsche.shape != stabilization.shape:
        fail(ContractViolationError, "Dimension mismatch: Nitsche matrix %s, stabilization %s."%(nitsche.shape, stabilization.shape))
    return SystemMatrix(finalize_matrix(nitsche.matrix + stabilization.matrix), nitsche, stabilization)

def clement_interpolate(fn, active, dofmap, order=4):
    """
    Clement type interpolant: dof i takes the value at x_i of the local
    L2 projection of fn onto the affine functions of T_i, the smallest-id
    active element in the support of phi_i. The projection uses the full
    element T_i.

    Raises
    ------
    * InternalConsistencyError
                                    * If a local mass matrix is singular.
    """
    mesh = active.parent
    anchors = np.array([dofmap.support(dof)[0] for dof in range(dofmap.num_dofs)], dtype=np.int64)
    projections = {}
    for element in np.unique(anchors):
        rule = element_quadrature(mesh, element, order)
        values = basis_values(mesh, np.full(len(rule.weights), element), rule.points)
        local_mass = values.T @ (rule.weights[:, None]*values)
        local_load = values.T @ (rule.weights*fn(rule.points))
        try:
            projections[int(element)] = np.linalg.solve(local_mass, local_load)
        except np.linalg.LinAlgError:
            fail(InternalConsistencyError, "Singular local mass matrix on element %d."%(element))
    result = np.empty(dofmap.num_dofs)
    coordinates = dofmap.coordinates
    for dof, element in enumerate(anchors):
        phi = basis_values(mesh, np.array([element]), coordinates[dof][None, :])[0]
        result[dof] = phi @ projections[int(element)]
    return result

def discrete_extension(v, dofpartition, agglomeration, dofmap):
    """
    Replaces every dof i in I^S by the value at x_i of the extension of
    v from S_h(T_i); dofs in I^L are kept.
    """
    v = np.asarray(v, dtype=np.float64)
    result = v.copy()
    if len(dofpartition.small_dofs) == 0:
        return result
    W = nodal_weights(dofpartition, agglomeration, dofmap)
    result[dofpartition.small_dofs] -= W @ v
    return result

def strong_interpolant(fn, active, dofmap, dofpartition, agglomeration, order=4):
    """Discrete extension of the Clement interpolant of fn."""
    return discrete_extension(clement_interpolate(fn, active, dofmap, order), dofpartition, agglomeration, dofmap)

def compute_errors(u_h, data, dofmap, order=4):
    """
    L2 and H1-seminorm errors of u_h against the exact solution over Omega.

    Returns
    -------
    * l2_error                      : (float) ||u_h - u||_Omega.
    * h1_error                      : (float) ||grad(u_h - u)||_Omega.

    Raises
    ------
    * UnsupportedOperationError
                                    * If data has no exact solution.
    """
    if not data.has_exact_solution:
        fail(UnsupportedOperationError, "Problem %s has no exact solution to compare against."%(data.name))
    active = dofmap.active
    mesh = active.parent
    u_h = np.asarray(u_h, dtype=np.float64)
    rule, owners = gather_volume_rules(active, order)
    coefficients = u_h[dofmap.all_element_dofs()[owners]]
    values = np.sum(basis_values(mesh, owners, rule.points)*coefficients, axis=1)
    gradients = np.einsum("qa,qad->qd", coefficients, mesh.basis_gradients[owners])
    l2 = np.sqrt(np.sum(rule.weights*(values - data.u_exact(rule.points))**2))
    h1 = np.sqrt(np.sum(rule.weights*np.sum((gradients - data.grad_u_exact(rule.points))**2, axis=1)))
    return float(l2), float(h1)
