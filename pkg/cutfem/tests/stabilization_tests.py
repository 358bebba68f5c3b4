import pytest
import numpy as np
from cutfem.stabilization import *
from cutfem.classification import ElementPartition, build_agglomeration_map, partition_dofs, partition_elements
from cutfem.cut import extract_active_mesh
from cutfem.fe_space import build_dof_map
from cutfem.mesh import build_background_mesh
from cutfem.levelset import LevelSet
from cutfem.errors import ConfigurationError, ContractViolationError
from cutfem.utils import get_logging_level, set_logging_level

def affine(points):
    return 0.3 + 1.25*points[:, 0] - 0.5*points[:, 1]

def discretize(phi, n, bbox=(-1.0, -1.0, 1.0, 1.0), gamma=0.5):
    mesh = build_background_mesh(n, bbox)
    active = extract_active_mesh(mesh, phi)
    dofmap = build_dof_map(active)
    partition = partition_elements(active, gamma)
    agglomeration = build_agglomeration_map(partition, max_path_length=6)
    dofpartition = partition_dofs(dofmap, partition)
    return dofmap, partition, agglomeration, dofpartition

def circle(n=16):
    return discretize(LevelSet.circle((0.0, 0.0), 0.5), n)

def strip():
    return discretize(LevelSet.halfplane((1.0, 0.0), 0.25), 2, (0.0, 0.0, 1.0, 1.0))

def assemble(family, m=1, tau=1.0, case=None, extension_domain="small"):
    dofmap, partition, agglomeration, dofpartition = circle() if case is None else case
    spec = StabilizationSpec(family, m, tau)
    return assemble_stabilization(spec, dofmap, agglomeration, dofpartition, extension_domain, partition)

@pytest.mark.parametrize("family", FAMILIES)
def test_symmetric_positive_semidefinite(family):
    """
    Verifies that every family assembles an exactly symmetric
    positive semidefinite matrix.
    """
    matrix = assemble(family).matrix
    dense = matrix.toarray()
    assert np.array_equal(dense, dense.T)
    eigenvalues = np.linalg.eigvalsh(dense)
    assert eigenvalues.min() >= -1e-12*max(eigenvalues.max(), 1.0)

@pytest.mark.parametrize("family", FAMILIES)
def test_affine_functions_in_kernel(family):
    """
    Verifies that S v = 0 for the interpolant of an affine function.
    """
    dofmap, partition, agglomeration, dofpartition = case = circle()
    matrix = assemble(family, case=case).matrix
    v = dofmap.interpolate(affine)
    scale = max(abs(matrix).max(), 1e-300)*np.abs(v).max()
    assert np.abs(matrix @ v).max() <= 1e-11*scale

@pytest.mark.parametrize("family", FAMILIES)
def test_linear_in_tau(family):
    """
    Verifies that doubling tau doubles the matrix and tau = 0 gives zero.
    """
    case = circle(8)
    one = assemble(family, tau=1.0, case=case).matrix
    two = assemble(family, tau=2.0, case=case).matrix
    assert abs(two - 2.0*one).max() <= 1e-12*abs(two).max()
    assert assemble(family, tau=0.0, case=case).matrix.nnz == 0

@pytest.mark.parametrize("family", ["face_l2", "extension_l2", "nodal"])
def test_h1_target_scales_by_inverse_h_squared(family):
    """
    Verifies that switching m from 0 to 1 multiplies the matrix by h^-2.
    """
    case = circle(8)
    h = case[0].active.parent.h
    l2 = assemble(family, m=0, case=case).matrix
    h1 = assemble(family, m=1, case=case).matrix
    assert abs(h1 - l2/h**2).max() <= 1e-12*abs(h1).max()

def test_exponents():
    """
    Verifies the exponent of h of every family.
    """
    assert StabilizationSpec("face_gradient", 1).alpha == 1
    assert StabilizationSpec("face_gradient", 0).alpha == 3
    assert StabilizationSpec("face_l2", 1).alpha == -2
    assert StabilizationSpec("face_h1", 1).alpha == 0
    assert StabilizationSpec("extension_gradient", 1).alpha == 0
    assert StabilizationSpec("extension_l2", 0).alpha == 0
    assert StabilizationSpec("nodal", 1).alpha == 0
    assert StabilizationSpec("nodal", 0).alpha == 2
    assert StabilizationSpec("nodal", 0, 3.0).weight(0.5) == 0.75
    assert StabilizationSpec("nodal", 1, 3.0).with_tau(6.0).tau == 6.0

@pytest.mark.parametrize("family, m, tau", [("ghost", 1, 1.0), ("nodal", 2, 1.0), ("nodal", 1, -1.0),
                                            ("extension_gradient", 0, 1.0), ("face_h1", 0, 1.0),
                                            ("face_l2", 1, float("nan"))])
def test_invalid_spec(family, m, tau):
    """
    Verifies that invalid stabilization parameters are configuration errors.
    """
    with pytest.raises(ConfigurationError):
        StabilizationSpec(family, m, tau)

def test_strip_nodal_weights():
    """
    Verifies the single row of W in the strip case: node (0.5, 0) is
    predicted from element 1 as x_0 + x_4 - x_3.
    """
    dofmap, partition, agglomeration, dofpartition = strip()
    W = nodal_weights(dofpartition, agglomeration, dofmap)
    assert W.shape == (1, 6)
    assert np.allclose(W.toarray(), [[-1.0, 1.0, 1.0, -1.0, 0.0, 0.0]], atol=1e-13)

    h = dofmap.active.parent.h
    nodal = assemble_nodal_penalty(StabilizationSpec("nodal", 0, 2.0), dofpartition, agglomeration, dofmap)
    w = W.toarray()[0]
    assert np.allclose(nodal.matrix.toarray(), 2.0*h**2*np.outer(w, w), atol=1e-13)

def test_nodal_weight_rows():
    """
    Verifies that every row of W sums to zero, has at most four
    nonzeros and a unit entry at its own dof.
    """
    dofmap, partition, agglomeration, dofpartition = circle()
    W = nodal_weights(dofpartition, agglomeration, dofmap)
    assert W.shape == (len(dofpartition.small_dofs), dofmap.num_dofs)
    for row, dof in enumerate(dofpartition.small_dofs):
        w = W.getrow(row)
        assert w.nnz <= 4
        assert abs(w.sum()) <= 1e-12
        assert abs(w[0, dof] - 1.0) <= 1e-12

def test_extension_union_is_sum_of_parts():
    """
    Verifies that the gradient extension penalty over T u S_h(T) is
    the sum of the penalties over T and over S_h(T).
    """
    case = circle(8)
    small = assemble("extension_gradient", case=case, extension_domain="small").matrix
    target = assemble("extension_gradient", case=case, extension_domain="target").matrix
    union = assemble("extension_gradient", case=case, extension_domain="union").matrix
    assert abs(union - small - target).max() <= 1e-12*abs(union).max()

def test_face_penalty_without_cut_is_zero():
    """
    Verifies the zero matrix when the level set does not cut the box.
    """
    mesh = build_background_mesh(4)
    active = extract_active_mesh(mesh, LevelSet.halfplane((1.0, 0.0), 5.0))
    dofmap = build_dof_map(active)
    assert len(penalty_faces(active)) == 0
    stabilization = assemble_face_penalty(StabilizationSpec("face_gradient", 1, 1.0), active, dofmap)
    assert stabilization.shape == (25, 25)
    assert stabilization.matrix.nnz == 0

def test_penalty_faces_touch_cut_elements():
    """
    Verifies that penalized faces join two active elements, one of them cut.
    """
    dofmap = circle()[0]
    active = dofmap.active
    mesh = active.parent
    faces = penalty_faces(active)
    assert len(faces) > 0
    for face in faces:
        t1, t2 = mesh.face_elements[face]
        assert active.is_active(t1) and active.is_active(t2)
        assert active.cut_mask[t1] or active.cut_mask[t2]

def test_missing_inputs():
    """
    Verifies the contract checks of assemble_stabilization and stab_seminorm.
    """
    dofmap, partition, agglomeration, dofpartition = circle(8)
    with pytest.raises(ContractViolationError):
        assemble_stabilization(StabilizationSpec("extension_l2", 1, 1.0), dofmap)
    with pytest.raises(ContractViolationError):
        assemble_stabilization(StabilizationSpec("nodal", 1, 1.0), dofmap, agglomeration)
    with pytest.raises(ConfigurationError):
        assemble_stabilization(StabilizationSpec("extension_l2", 1, 1.0), dofmap, agglomeration, extension_domain="patch")
    stabilization = assemble("face_gradient", case=(dofmap, partition, agglomeration, dofpartition))
    with pytest.raises(ContractViolationError):
        stab_seminorm(stabilization, np.ones(dofmap.num_dofs + 1))

def test_seminorm():
    """
    Verifies sqrt(v^T S v) against the dense computation.
    """
    dofmap, partition, agglomeration, dofpartition = case = circle(8)
    stabilization = assemble("face_l2", case=case)
    v = np.random.default_rng(42).standard_normal(dofmap.num_dofs)
    expected = np.sqrt(v @ stabilization.matrix.toarray() @ v)
    assert abs(stab_seminorm(stabilization, v) - expected) <= 1e-12*expected
    assert stab_seminorm(stabilization.matrix, dofmap.interpolate(affine)) <= 1e-5*expected

@pytest.mark.parametrize("family", FAMILIES)
def test_seminorm_scales_with_square_root_of_tau(family):
    """
    Verifies ||v||_s(4 tau) = 2 ||v||_s(tau) for every family.
    """
    dofmap, partition, agglomeration, dofpartition = case = circle(8)
    v = np.random.default_rng(42).standard_normal(dofmap.num_dofs)
    one = stab_seminorm(assemble(family, tau=0.5, case=case), v)
    four = stab_seminorm(assemble(family, tau=2.0, case=case), v)
    assert one > 0.0
    assert four == pytest.approx(2.0*one, rel=1e-12)

def test_extension_penalty_counts_assembled_pairs(capsys):
    """
    Verifies that a partition restricts the extension penalty to its
    small elements and that the reported pair count is the number of
    pairs assembled.
    """
    dofmap, partition, agglomeration, dofpartition = strip()
    active = dofmap.active
    spec = StabilizationSpec("extension_gradient", 1, 1.0)
    level = get_logging_level()
    set_logging_level(2)
    try:
        capsys.readouterr()
        first = assemble_extension_penalty(spec, dofmap, agglomeration, "small",
                                           ElementPartition(active, 0.5, partition.large, [0]))
        out = capsys.readouterr().out
    finally:
        set_logging_level(level)
    assert len(agglomeration) == 2
    assert "on 1 pairs." in out
    second = assemble_extension_penalty(spec, dofmap, agglomeration, "small",
                                        ElementPartition(active, 0.5, partition.large, [4]))
    both = assemble_extension_penalty(spec, dofmap, agglomeration, "small", partition)
    assert abs(both.matrix - first.matrix - second.matrix).max() <= 1e-12*abs(both.matrix).max()
