import pytest
import numpy as np
from cutfem.assembly import *
from cutfem.problems import ProblemData, affine_problem, build_problem, cosine_problem
from cutfem.classification import build_agglomeration_map, partition_dofs, partition_elements
from cutfem.cut import extract_active_mesh, gather_volume_rules
from cutfem.fe_space import build_dof_map
from cutfem.mesh import build_background_mesh
from cutfem.levelset import LevelSet
from cutfem.stabilization import StabilizationSpec, assemble_stabilization
from cutfem.errors import ConfigurationError, ContractViolationError, UnsupportedOperationError

def discretize(phi, n, bbox=(-1.0, -1.0, 1.0, 1.0), gamma=0.5):
    mesh = build_background_mesh(n, bbox)
    active = extract_active_mesh(mesh, phi)
    dofmap = build_dof_map(active)
    partition = partition_elements(active, gamma)
    agglomeration = build_agglomeration_map(partition, max_path_length=6)
    return active, dofmap, partition, agglomeration, partition_dofs(dofmap, partition)

def circle(n=16):
    return discretize(LevelSet.circle((0.0, 0.0), 0.5), n)

def strip(n=4, offset=0.3):
    return discretize(LevelSet.halfplane((1.0, 0.0), offset), n, (0.0, 0.0, 1.0, 1.0))

def test_mass_and_stiffness():
    """
    Verifies that the mass entries sum to the measure of the region
    and that constants are in the kernel of the stiffness matrix.
    """
    active, dofmap = circle()[:2]
    mesh = active.parent
    ones = np.ones(dofmap.num_dofs)
    cut_area = gather_volume_rules(active, 2)[0].weights.sum()
    assert abs(ones @ assemble_mass(active, dofmap, "cut") @ ones - cut_area) <= 1e-12
    full_area = mesh.areas[active.elements].sum()
    assert abs(ones @ assemble_mass(active, dofmap, "full") @ ones - full_area) <= 1e-12
    for region in REGIONS:
        stiffness = assemble_stiffness(active, dofmap, region)
        assert np.abs(stiffness @ ones).max() <= 1e-12
        assert abs(stiffness - stiffness.T).max() == 0.0
    with pytest.raises(ConfigurationError):
        assemble_mass(active, dofmap, "box")

def test_stiffness_energy_of_affine_function():
    """
    Verifies (grad v, grad v)_Omega = |grad v|^2 |Omega| for affine v.
    """
    active, dofmap = strip()[:2]
    v = dofmap.interpolate(lambda x: 2.0*x[:, 0] - x[:, 1])
    assert abs(v @ assemble_stiffness(active, dofmap) @ v - 5.0*0.3) <= 1e-12

def test_boundary_flux_kernel():
    """
    Verifies that the boundary flux matrix is symmetric and vanishes on constants.
    """
    active, dofmap = circle(8)[:2]
    flux = assemble_boundary_flux(active, dofmap)
    assert abs(flux - flux.T).max() == 0.0
    assert np.abs(flux @ np.ones(dofmap.num_dofs)).max() <= 1e-12
    assert np.linalg.eigvalsh(flux.toarray()).min() >= -1e-12

def test_nitsche_symmetric():
    """
    Verifies that the Nitsche matrix is exactly symmetric and has
    the size of the dof map.
    """
    active, dofmap = circle()[:2]
    nitsche = assemble_nitsche(active, dofmap, cosine_problem())
    assert nitsche.shape == (dofmap.num_dofs, dofmap.num_dofs)
    assert nitsche.load.shape == (dofmap.num_dofs,)
    assert abs(nitsche.matrix - nitsche.matrix.T).max() == 0.0
    assert nitsche.beta == BETA and nitsche.h == active.parent.h

def test_nitsche_invalid_beta():
    """
    Verifies that a non-positive Nitsche penalty is a configuration error.
    """
    active, dofmap = circle(8)[:2]
    with pytest.raises(ConfigurationError):
        assemble_nitsche(active, dofmap, cosine_problem(), beta=0.0)

@pytest.mark.parametrize("family", ["face_gradient", "extension_gradient", "nodal"])
def test_affine_patch_test(family):
    """
    Verifies that the stabilized Nitsche system reproduces an affine
    solution on a halfplane domain, whose boundary includes box edges.
    """
    active, dofmap, partition, agglomeration, dofpartition = strip()
    data = affine_problem(0.5, 1.0, -2.0)
    nitsche = assemble_nitsche(active, dofmap, data)
    spec = StabilizationSpec(family, 1, 0.1)
    system = assemble_system(nitsche, assemble_stabilization(spec, dofmap, agglomeration, dofpartition, "small", partition))
    u_h = np.linalg.solve(system.matrix.toarray(), system.load)
    assert np.allclose(u_h, dofmap.interpolate(data.u_exact), rtol=0.0, atol=1e-10)
    l2, h1 = compute_errors(u_h, data, dofmap)
    assert l2 <= 1e-10 and h1 <= 1e-10

def test_stabilized_system_positive_definite():
    """
    Verifies that the face stabilized system matrix is symmetric
    positive definite.
    """
    active, dofmap, partition, agglomeration, dofpartition = circle(8)
    nitsche = assemble_nitsche(active, dofmap, cosine_problem())
    stabilization = assemble_stabilization(StabilizationSpec("face_gradient", 1, 1.0), dofmap, agglomeration, dofpartition)
    system = assemble_system(nitsche, stabilization)
    dense = system.matrix.toarray()
    assert np.array_equal(dense, dense.T)
    assert np.linalg.eigvalsh(dense).min() > 0.0
    v = np.ones(dofmap.num_dofs)
    assert np.allclose(system @ v, nitsche.matrix @ v + stabilization @ v, atol=1e-12)
    assert np.array_equal(system.load, nitsche.load)

def test_system_dimension_mismatch():
    """
    Verifies that combining matrices of different sizes is a contract violation.
    """
    active, dofmap = circle(8)[:2]
    other = circle(16)
    nitsche = assemble_nitsche(active, dofmap, cosine_problem())
    stabilization = assemble_stabilization(StabilizationSpec("face_gradient", 1, 0.1), other[1])
    with pytest.raises(ContractViolationError):
        assemble_system(nitsche, stabilization)

def test_clement_reproduces_affine_functions():
    """
    Verifies that the Clement interpolant of an affine function is its
    nodal interpolant.
    """
    active, dofmap = circle()[:2]
    fn = lambda x: 1.0 - 3.0*x[:, 0] + 0.5*x[:, 1]
    assert np.allclose(clement_interpolate(fn, active, dofmap), dofmap.interpolate(fn), rtol=0.0, atol=1e-12)

def test_discrete_extension_on_strip():
    """
    Verifies the single replaced dof of the strip case and the kernel
    property S (discrete extension of v) = 0 for the nodal stabilization.
    """
    active, dofmap, partition, agglomeration, dofpartition = strip(2, 0.25)
    assert dofpartition.small_dofs.tolist() == [1]
    v = np.array([1.0, 7.0, 2.0, 3.0, 5.0, 11.0])
    extended = discrete_extension(v, dofpartition, agglomeration, dofmap)
    assert np.allclose(extended, [1.0, 1.0 + 3.0 - 2.0, 2.0, 3.0, 5.0, 11.0], atol=1e-13)
    stabilization = assemble_stabilization(StabilizationSpec("nodal", 1, 1.0), dofmap, agglomeration, dofpartition)
    assert np.abs(stabilization @ extended).max() <= 1e-12

def test_discrete_extension_is_idempotent():
    """
    Verifies that extending twice equals extending once and that
    dofs in I^L and affine functions are unchanged.
    """
    active, dofmap, partition, agglomeration, dofpartition = circle()
    v = np.random.default_rng(42).standard_normal(dofmap.num_dofs)
    once = discrete_extension(v, dofpartition, agglomeration, dofmap)
    assert np.allclose(discrete_extension(once, dofpartition, agglomeration, dofmap), once, rtol=0.0, atol=1e-12)
    assert np.array_equal(once[dofpartition.large_dofs], v[dofpartition.large_dofs])
    affine = dofmap.interpolate(lambda x: 0.25 + x[:, 0] + 2.0*x[:, 1])
    assert np.allclose(discrete_extension(affine, dofpartition, agglomeration, dofmap), affine, atol=1e-12)
    fn = lambda x: 0.25 + x[:, 0] + 2.0*x[:, 1]
    assert np.allclose(strong_interpolant(fn, active, dofmap, dofpartition, agglomeration), affine, atol=1e-12)

def test_errors_of_zero_function():
    """
    Verifies the norms of u = cos(pi r) on the disc of radius 1/2:
    ||u||^2 = 2 pi (1/16 - 1/(4 pi^2)) and ||grad u||^2 = pi^3/8 + pi/2.
    """
    dofmap = circle(32)[1]
    l2, h1 = compute_errors(np.zeros(dofmap.num_dofs), cosine_problem(), dofmap)
    assert abs(l2 - np.sqrt(2.0*np.pi*(1.0/16.0 - 1.0/(4.0*np.pi**2)))) <= 1e-2*l2
    assert abs(h1 - np.sqrt(np.pi**3/8.0 + np.pi/2.0)) <= 1e-2*h1
    with pytest.raises(UnsupportedOperationError):
        compute_errors(np.zeros(dofmap.num_dofs), ProblemData(lambda x: np.ones(len(x))), dofmap)

def test_cosine_problem():
    """
    Verifies the cosine problem data: the source at the center, the
    series branch, the gradient and the zero boundary values.
    """
    data = build_problem("cosine")
    assert abs(data.f(np.array([[0.0, 0.0]]))[0] - 2.0*np.pi**2) <= 1e-12
    near = np.array([[0.9e-6, 0.0], [1.1e-6, 0.0]])
    assert abs(data.f(near)[0] - data.f(near)[1]) <= 1e-8
    assert np.allclose(data.grad_u_exact(np.array([[0.0, 0.0]])), 0.0)
    points = np.array([[0.25, 0.0], [0.0, -0.1]])
    gradient = data.grad_u_exact(points)
    assert np.allclose(gradient[0], [-np.pi*np.sin(np.pi*0.25), 0.0], atol=1e-14)
    assert np.allclose(gradient[1], [0.0, np.pi*np.sin(np.pi*0.1)], atol=1e-14)
    assert np.allclose(data.u_exact(np.array([[0.5, 0.0], [0.0, 0.5]])), 0.0, atol=1e-15)
    assert np.all(data.g(points) == 0.0)
    shifted = cosine_problem((0.5, 0.5))
    assert abs(shifted.u_exact(np.array([[0.5, 0.5]]))[0] - 1.0) <= 1e-15
    with pytest.raises(ConfigurationError):
        build_problem("bessel")
