import pytest
import numpy as np
from cutfem.fe_space import *
from cutfem.cut import extract_active_mesh
from cutfem.mesh import build_background_mesh
from cutfem.levelset import LevelSet
from cutfem.errors import ContractViolationError

def affine(points):
    points = np.asarray(points)
    return 1.5 - 2.0*points[..., 0] + 0.75*points[..., 1]

def circle_dofmap(n=8):
    mesh = build_background_mesh(n)
    return build_dof_map(extract_active_mesh(mesh, LevelSet.circle((0.0, 0.0), 0.5)))

def test_halfplane_dof_count():
    """
    Verifies that phi = x - 0.25 on [0, 1]^2, n = 2 has six dofs
    numbered by ascending background node id.
    """
    mesh = build_background_mesh(2, (0.0, 0.0, 1.0, 1.0))
    dofmap = build_dof_map(extract_active_mesh(mesh, LevelSet.halfplane((1.0, 0.0), 0.25)))
    assert dofmap.num_dofs == 6
    assert dofmap.dof_nodes.tolist() == [0, 1, 3, 4, 6, 7]
    assert dofmap.degree == 1
    assert np.all(dofmap.node_to_dof[[2, 5, 8]] == -1)

def test_supports_are_active_and_sorted():
    """
    Verifies that every support is a sorted list of active
    elements containing the node.
    """
    dofmap = circle_dofmap()
    for dof in range(dofmap.num_dofs):
        support = dofmap.support(dof)
        assert len(support) > 0
        assert np.all(np.diff(support) > 0)
        for element in support:
            assert dof in dofmap.element_dofs(element)

def test_extension_reproduces_affine_functions():
    """
    Verifies that the canonical extension of the interpolant of an
    affine function equals that function everywhere in the plane.
    """
    dofmap = circle_dofmap()
    v = dofmap.interpolate(affine)
    far = np.array([[3.0, -2.0], [-5.0, 0.25]])
    for element in dofmap.active.elements:
        values, gradient = extend_and_eval(dofmap, v, element, far)
        assert np.allclose(values, affine(far), atol=1e-12)
        assert np.allclose(gradient, [-2.0, 0.75], atol=1e-12)

def test_extension_basis_partition_of_unity():
    """
    Verifies that the extended element basis sums to one and
    is the Kronecker delta at the element vertices.
    """
    mesh = build_background_mesh(4)
    for element in (0, 5, 31):
        vertices = mesh.element_vertices(element)
        assert np.allclose(extension_basis(mesh, element, vertices), np.eye(3), atol=1e-13)
        points = np.array([[0.3, -2.0], [7.0, 1.0]])
        assert np.allclose(extension_basis(mesh, element, points).sum(axis=1), 1.0, atol=1e-13)

def test_jump_vanishes_for_affine_functions():
    """
    Verifies that the jump between two extensions of one affine
    function is zero, also away from the common face.
    """
    dofmap = circle_dofmap()
    mesh = dofmap.active.parent
    v = dofmap.interpolate(affine)
    for face in mesh.internal_faces:
        e1, e2 = mesh.face_elements[face]
        if dofmap.active.is_active(e1) and dofmap.active.is_active(e2):
            value, gradient = jump_eval(dofmap, v, e1, e2, np.array([2.0, 2.0]))
            assert abs(value) <= 1e-12
            assert np.allclose(gradient, 0.0, atol=1e-12)

def test_jump_of_basis_function_is_continuous_on_face():
    """
    Verifies that a hat function has no value jump on the common face
    but a nonzero one away from it.
    """
    dofmap = circle_dofmap()
    mesh = dofmap.active.parent
    face = next(f for f in mesh.internal_faces if dofmap.active.is_active(mesh.face_elements[f, 0]) and dofmap.active.is_active(mesh.face_elements[f, 1]))
    e1, e2 = mesh.face_elements[face]
    a, b = mesh.faces[face]
    v = np.zeros(dofmap.num_dofs)
    v[dofmap.node_to_dof[a]] = 1.0
    midpoint = 0.5*(mesh.nodes[a] + mesh.nodes[b])
    value, gradient = jump_eval(dofmap, v, e1, e2, midpoint)
    assert abs(value) <= 1e-13
    assert np.linalg.norm(gradient) > 0.0
    off_face = midpoint + mesh.face_normals[face]
    assert abs(jump_eval(dofmap, v, e1, e2, off_face)[0]) > 0.0

def test_nodal_functional():
    """
    Verifies that the nodal functional evaluates at the dof node
    and rejects dofs outside the element.
    """
    dofmap = circle_dofmap()
    element = int(dofmap.active.elements[0])
    v = dofmap.interpolate(affine)
    p = dofmap.element_polynomial(v, element)
    for dof in dofmap.element_dofs(element):
        assert abs(nodal_functional(dofmap, dof, element, p) - v[dof]) <= 1e-12
    other = next(d for d in range(dofmap.num_dofs) if d not in dofmap.element_dofs(element))
    with pytest.raises(ContractViolationError):
        nodal_functional(dofmap, other, element, p)

def test_inactive_element_dofs_rejected():
    """
    Verifies that asking for the dofs of an inactive element is a contract violation.
    """
    dofmap = circle_dofmap()
    with pytest.raises(ContractViolationError):
        dofmap.element_dofs(0)
