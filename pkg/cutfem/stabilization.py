"""
Ghost penalty stabilizations as sparse symmetric positive semidefinite
matrices over the dofs.

Face families penalize jumps across the internal faces of cut elements,
extension families penalize the jump between a small element and its
agglomeration target, and the nodal family penalizes, for every dof in
I^S, the difference between the dof value and the value predicted by
the target element polynomial (one rank-1 term per dof).
"""
import numpy as np
import scipy.sparse as sp
from cutfem.cut import element_quadrature
from cutfem.errors import ConfigurationError, ContractViolationError, InternalConsistencyError, fail
from cutfem.fe_space import extension_basis
from cutfem.linalg import finalize_matrix, zero_matrix
from cutfem.utils import print_info_msg, print_warn_msg

FACE_FAMILIES = ("face_gradient", "face_l2", "face_h1")
EXTENSION_FAMILIES = ("extension_gradient", "extension_l2")
FAMILIES = FACE_FAMILIES + EXTENSION_FAMILIES + ("nodal",)
EXTENSION_DOMAINS = ("small", "union", "target")
DIMENSION = 2

# Order of the volume rule for the L2 jump terms (the integrands are quadratic).
JUMP_QUADRATURE_ORDER = 2

class StabilizationSpec:
    """
    Family, norm target m and strength tau of a stabilization.

    Parameters
    ----------
    * family                                : (str) One of FAMILIES.
    * m                                     : (int) 0 (L2 control) or 1 (H1 control).
    * tau                                   : (float) Penalty strength, tau >= 0 (0 gives the zero matrix).

    Attributes
    ----------
    * alpha                                 * (int) Exponent of h in the weight tau h^alpha.

    Raises
    ------
    * ConfigurationError
                                            * If the family is unknown, m is not 0 or 1,
                                              tau is negative, or the family needs m = 1.
    """

    def __init__(self, family, m=1, tau=0.1):
        if family not in FAMILIES:
            fail(ConfigurationError, "Unknown stabilization family '%s'. Expected one of %s."%(family, FAMILIES))
        if m not in (0, 1):
            fail(ConfigurationError, "Expected m in {0, 1}. Got: %s."%(m))
        if family in ("extension_gradient", "face_h1") and m != 1:
            fail(ConfigurationError, "Family %s controls the H1 seminorm only (m = 1)."%(family))
        if not (np.isfinite(tau) and tau >= 0.0):
            fail(ConfigurationError, "Expected a non-negative stabilization parameter. Got: %s."%(tau))
        self.__family = family
        self.__m = int(m)
        self.__tau = float(tau)

    @property
    def family(self):
        return self.__family

    @property
    def m(self):
        return self.__m

    @property
    def tau(self):
        return self.__tau

    @property
    def alpha(self):
        if self.__family == "face_gradient":
            return 3 - 2*self.__m
        if self.__family in ("face_h1", "extension_gradient"):
            return 0
        if self.__family == "nodal":
            return DIMENSION - 2*self.__m
        return -2*self.__m

    def weight(self, h):
        """tau h^alpha."""
        return self.__tau*h**self.alpha

    def with_tau(self, tau):
        return StabilizationSpec(self.__family, self.__m, tau)

    def __repr__(self):
        return "StabilizationSpec(%s, m=%d, tau=%g)"%(self.__family, self.__m, self.__tau)

class StabilizationMatrix:
    """
    Assembled stabilization s_h as a CSR matrix and the spec that produced it.
    """

    def __init__(self, matrix, spec):
        self.__matrix = matrix
        self.__spec = spec

    @property
    def matrix(self):
        return self.__matrix

    @property
    def spec(self):
        return self.__spec

    @property
    def shape(self):
        return self.__matrix.shape

    def __matmul__(self, v):
        return self.__matrix @ v

class _Accumulator:
    """Collects dense local blocks as COO triplets."""

    def __init__(self):
        self.rows, self.cols, self.vals = [], [], []

    def add(self, dofs, block):
        dofs = np.asarray(dofs)
        block = 0.5*(block + block.T)
        self.rows.append(np.repeat(dofs, len(dofs)))
        self.cols.append(np.tile(dofs, len(dofs)))
        self.vals.append(block.ravel())

    def matrix(self, n):
        if not self.vals:
            return zero_matrix(n)
        return finalize_matrix((np.concatenate(self.vals), (np.concatenate(self.rows), np.concatenate(self.cols))), shape=(n, n))

def penalty_faces(active):
    """
    Internal faces of the active mesh that belong to at least one cut element.
    """
    mesh = active.parent
    faces = mesh.internal_faces
    fe = mesh.face_elements[faces]
    both_active = active.active_mask[fe[:, 0]] & active.active_mask[fe[:, 1]]
    touches_cut = active.cut_mask[fe[:, 0]] | active.cut_mask[fe[:, 1]]
    return faces[both_active & touches_cut]

def _jump_rows(mesh, element_1, element_2, points):
    """Rows [phi^e_{a,T1}(x), -phi^e_{b,T2}(x)] at the given points."""
    return np.hstack((extension_basis(mesh, element_1, points), -extension_basis(mesh, element_2, points)))

def _l2_jump_block(mesh, element_1, element_2, domain):
    """Gram matrix of the jump basis over the full elements in domain."""
    block = np.zeros((6, 6))
    for element in domain:
        rule = element_quadrature(mesh, element, JUMP_QUADRATURE_ORDER)
        rows = _jump_rows(mesh, element_1, element_2, rule.points)
        block += rows.T @ (rule.weights[:, None]*rows)
    return block

def _gradient_jump_rows(mesh, element_1, element_2):
    """(6, 2) gradient jump basis: grad [phi]_{T1,T2}."""
    return np.vstack((mesh.basis_gradients[element_1], -mesh.basis_gradients[element_2]))

def assemble_face_penalty(spec, active, dofmap):
    """
    Face ghost penalty over the internal faces of cut elements.

    face_gradient:  tau h^(3-2m) |F| ([grad_n v])^2 per face.
    face_l2:        tau h^(-2m) ([v]_{T1,T2}, [w]_{T1,T2}) over the full T1 u T2.
    face_h1:        tau (grad [v]_{T1,T2}, grad [w]_{T1,T2}) over the full T1 u T2.

    Returns
    -------
    * stabilization                 : (StabilizationMatrix) Zero with a warning when the
                                        domain is not cut.
    """
    if spec.family not in FACE_FAMILIES:
        fail(ConfigurationError, "%s is not a face family."%(spec.family))
    mesh = active.parent
    n = dofmap.num_dofs
    faces = penalty_faces(active)
    if len(faces) == 0:
        print_warn_msg("No internal faces of cut elements; the face penalty is zero.")
        return StabilizationMatrix(zero_matrix(n), spec)

    weight = spec.weight(mesh.h)
    acc = _Accumulator()
    element_dofs = dofmap.all_element_dofs()
    for face in faces:
        t1, t2 = mesh.face_elements[face]
        dofs = np.concatenate((element_dofs[t1], element_dofs[t2]))
        if spec.family == "face_gradient":
            jump = _gradient_jump_rows(mesh, t1, t2) @ mesh.face_normals[face]
            block = mesh.face_lengths[face]*np.outer(jump, jump)
        elif spec.family == "face_h1":
            rows = _gradient_jump_rows(mesh, t1, t2)
            block = (mesh.areas[t1] + mesh.areas[t2])*(rows @ rows.T)
        else:
            block = _l2_jump_block(mesh, t1, t2, (t1, t2))
        acc.add(dofs, weight*block)
    print_info_msg("Face penalty %s on %d faces."%(spec, len(faces)))
    return StabilizationMatrix(acc.matrix(n), spec)

def assemble_extension_penalty(spec, dofmap, agglomeration, domain="small", partition=None):
    """
    Extension jump penalty over the pairs (T, S_h(T)), T small.

    extension_gradient: tau |D| |grad v_T - grad v_S|^2.
    extension_l2:       tau h^(-2m) int_D ([v]_{T,S_h(T)})^2.

    D is T ('small'), T u S_h(T) ('union') or S_h(T) ('target'). With a
    partition the pairs run over its small elements, otherwise over the
    entries of the map.

    Raises
    ------
    * ConfigurationError
                                    * If domain is unknown.
    * InternalConsistencyError
                                    * If a small element has no map entry.
    """
    if spec.family not in EXTENSION_FAMILIES:
        fail(ConfigurationError, "%s is not an extension family."%(spec.family))
    if domain not in EXTENSION_DOMAINS:
        fail(ConfigurationError, "Unknown extension domain '%s'. Expected one of %s."%(domain, EXTENSION_DOMAINS))
    active = dofmap.active
    mesh = active.parent
    n = dofmap.num_dofs
    weight = spec.weight(mesh.h)
    element_dofs = dofmap.all_element_dofs()
    if partition is None:
        small = sorted(agglomeration.targets)
    else:
        small = [int(e) for e in partition.small]
    acc = _Accumulator()
    pairs = 0
    for element in small:
        if element not in agglomeration:
            fail(InternalConsistencyError, "Small element %d has no agglomeration target."%(element))
        target = agglomeration[element]
        if target == element:
            continue
        if domain == "small":
            region = (element,)
        elif domain == "union":
            region = (element, target)
        else:
            region = (target,)
        dofs = np.concatenate((element_dofs[element], element_dofs[target]))
        if spec.family == "extension_gradient":
            rows = _gradient_jump_rows(mesh, element, target)
            block = sum(mesh.areas[e] for e in region)*(rows @ rows.T)
        else:
            block = _l2_jump_block(mesh, element, target, region)
        acc.add(dofs, weight*block)
        pairs += 1
    print_info_msg("Extension penalty %s on %d pairs."%(spec, pairs))
    return StabilizationMatrix(acc.matrix(n), spec)

def nodal_weights(dofpartition, agglomeration, dofmap):
    """
    Sparse matrix W with one row per i in I^S (ascending):
    w_i = e_i - sum_j phi^e_{j,S_h(T_i)}(x_i) e_j, at most four nonzeros.

    Raises
    ------
    * InternalConsistencyError
                                    * If the anchor of a dof has no map entry.
    """
    mesh = dofmap.active.parent
    element_dofs = dofmap.all_element_dofs()
    rows, cols, vals = [], [], []
    for row, dof in enumerate(dofpartition.small_dofs):
        anchor = dofpartition.anchors[int(dof)]
        if anchor not in agglomeration:
            fail(InternalConsistencyError, "Anchor element %d of dof %d has no agglomeration target."%(anchor, dof))
        target = agglomeration[anchor]
        coefficients = extension_basis(mesh, target, dofmap.coordinates[dof])
        rows.extend([row]*4)
        cols.append(int(dof))
        cols.extend(element_dofs[target].tolist())
        vals.append(1.0)
        vals.extend((-coefficients).tolist())
    shape = (len(dofpartition.small_dofs), dofmap.num_dofs)
    W = sp.coo_matrix((vals, (rows, cols)), shape=shape).tocsr()
    W.sum_duplicates()
    W.eliminate_zeros()
    W.sort_indices()
    return W

def assemble_nodal_penalty(spec, dofpartition, agglomeration, dofmap):
    """
    Nodal stabilization tau h^(d-2m) sum_{i in I^S} w_i (x) w_i = tau h^alpha W^T W.
    """
    if spec.family != "nodal":
        fail(ConfigurationError, "%s is not the nodal family."%(spec.family))
    W = nodal_weights(dofpartition, agglomeration, dofmap)
    matrix = finalize_matrix(spec.weight(dofmap.active.parent.h)*(W.T @ W))
    print_info_msg("Nodal penalty %s on %d dofs."%(spec, W.shape[0]))
    return StabilizationMatrix(matrix, spec)

def assemble_stabilization(spec, dofmap, agglomeration=None, dofpartition=None, extension_domain="small", partition=None):
    """
    Assembles the stabilization named by spec.family.
    """
    if spec.family in FACE_FAMILIES:
        return assemble_face_penalty(spec, dofmap.active, dofmap)
    if agglomeration is None:
        fail(ContractViolationError, "Family %s needs an agglomeration map."%(spec.family))
    if spec.family in EXTENSION_FAMILIES:
        return assemble_extension_penalty(spec, dofmap, agglomeration, extension_domain, partition)
    if dofpartition is None:
        fail(ContractViolationError, "The nodal family needs a dof partition.")
    return assemble_nodal_penalty(spec, dofpartition, agglomeration, dofmap)

def stab_seminorm(stabilization, v):
    """
    sqrt(max(v^T S v, 0)).

    Raises
    ------
    * ContractViolationError
                                    * If the sizes of S and v differ.
    """
    matrix = getattr(stabilization, "matrix", stabilization)
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (matrix.shape[1],):
        fail(ContractViolationError, "Dimension mismatch: matrix %s, vector %s."%(matrix.shape, v.shape))
    return float(np.sqrt(max(v @ (matrix @ v), 0.0)))
