"""
Classification of background elements against the level set and
integration rules on the cut cells T n Omega and T n dOmega.

The interface is reconstructed per element as the chord joining the
two edge roots of phi. Roots are computed once per mesh face so that
neighbouring elements share the same interface points.
"""
import numpy as np
from cutfem.errors import ContractViolationError, EmptyDomainError, UnsupportedOrderError, fail
from cutfem.quadrature import BoundaryQuadratureRule, QuadratureRule, polygon_area, polygon_rule, segment_rule, triangle_rule
from cutfem.utils import print_info_msg

INTERIOR = "interior"
CUT = "cut"

ROOT_TOLERANCE = 1e-13
VERTEX_PERTURBATION = 1e-12

def vertex_values(mesh, phi):
    """
    phi at the mesh nodes, with exact zeros replaced by
    +1e-12 h so that such vertices count as outside.
    """
    values = np.array(phi(mesh.nodes), dtype=np.float64)
    values[values == 0.0] = VERTEX_PERTURBATION*mesh.h
    return values

def find_edge_roots(phi, p, q, fp, fq):
    """
    Bisection for the zero of phi on the segments [p, q].

    Parameters
    ----------
    * phi                           : (LevelSet) Level set.
    * p, q                          : (np.array) (k, 2) segment end points.
    * fp, fq                        : (np.array) (k,) values at the end points, of opposite sign.

    Returns
    -------
    * roots                         : (np.array) (k, 2) root locations. The bracket is
                                        shrunk below 1e-13 in the segment parameter and
                                        closed with one linear interpolation step.
    """
    p = np.asarray(p, dtype=np.float64).reshape(-1, 2)
    q = np.asarray(q, dtype=np.float64).reshape(-1, 2)
    ta = np.zeros(len(p))
    tb = np.ones(len(p))
    fa = np.array(fp, dtype=np.float64).reshape(-1)
    fb = np.array(fq, dtype=np.float64).reshape(-1)
    if len(p) == 0:
        return np.zeros((0, 2))
    while np.max(tb - ta) > ROOT_TOLERANCE:
        tm = 0.5*(ta + tb)
        fm = phi(p + tm[:, None]*(q - p))
        left = np.sign(fm) == np.sign(fa)
        ta = np.where(left, tm, ta)
        fa = np.where(left, fm, fa)
        tb = np.where(left, tb, tm)
        fb = np.where(left, fb, fm)
    denom = fb - fa
    safe = denom != 0.0
    t = np.where(safe, ta - fa*(tb - ta)/np.where(safe, denom, 1.0), 0.5*(ta + tb))
    t = np.clip(t, ta, tb)
    return p + t[:, None]*(q - p)

class ActiveMesh:
    """
    Restriction of a background mesh to the elements meeting Omega.

    Parameters
    ----------
    * mesh                                  : (BackgroundMesh) Background triangulation.
    * phi                                   : (LevelSet) Domain description.

    Attributes
    ----------
    * parent                                * (BackgroundMesh) The background mesh.
    * phi                                   * (LevelSet) The level set.
    * elements                              * (np.array) Active element ids, ascending.
    * cut_elements                          * (np.array) Active elements crossed by the interface.
    * interior_elements                     * (np.array) Active elements inside Omega.
    * node_values                           * (np.array) Tie-broken phi at every background node.

    Raises
    ------
    * EmptyDomainError
                                            * If no element intersects Omega.
    """

    def __init__(self, mesh, phi):
        self.__parent = mesh
        self.__phi = phi
        self.__node_values = vertex_values(mesh, phi)

        inside = self.__node_values < 0.0
        element_inside = inside[mesh.elements]
        active = element_inside.any(axis=1)
        if not active.any():
            fail(EmptyDomainError, "The level set %s has no negative values on the background mesh."%(phi))

        self.__active_mask = active
        self.__cut_mask = active & ~element_inside.all(axis=1)
        self.__elements = np.flatnonzero(active)

        self.__compute_face_roots()
        self.__polygons = {}
        self.__chords = {}
        self.__fractions = np.zeros(mesh.num_elements)
        self.__fractions[active] = 1.0
        for element in np.flatnonzero(self.__cut_mask):
            polygon, chord = self.__clip(element)
            self.__polygons[element] = polygon
            self.__chords[element] = chord
            self.__fractions[element] = polygon_area(polygon)/mesh.areas[element]

        print_info_msg("Active mesh: %d elements (%d cut)."%(len(self.__elements), len(self.__chords)))

    def __compute_face_roots(self):
        mesh = self.__parent
        values = self.__node_values
        faces = mesh.faces
        crossing = (values[faces[:, 0]] < 0.0) != (values[faces[:, 1]] < 0.0)
        ids = np.flatnonzero(crossing)
        roots = find_edge_roots(self.__phi,
                                mesh.nodes[faces[ids, 0]],
                                mesh.nodes[faces[ids, 1]],
                                values[faces[ids, 0]],
                                values[faces[ids, 1]])
        self.__face_roots = dict(zip(ids.tolist(), roots))

    def __clip(self, element):
        mesh = self.__parent
        vertices = mesh.elements[element]
        polygon = []
        chord = []
        for k in range(3):
            a = vertices[k]
            if self.__node_values[a] < 0.0:
                polygon.append(mesh.nodes[a])
            root = self.__face_roots.get(int(mesh.element_faces[element, k]))
            if root is not None:
                polygon.append(root)
                chord.append(root)
        return np.array(polygon), np.array(chord)

    @property
    def parent(self):
        return self.__parent

    @property
    def phi(self):
        return self.__phi

    @property
    def elements(self):
        return self.__elements

    @property
    def node_values(self):
        return self.__node_values

    @property
    def cut_elements(self):
        return np.flatnonzero(self.__cut_mask)

    @property
    def interior_elements(self):
        return np.flatnonzero(self.__active_mask & ~self.__cut_mask)

    @property
    def active_mask(self):
        return self.__active_mask

    @property
    def cut_mask(self):
        return self.__cut_mask

    @property
    def cut_fractions(self):
        """Cut fraction of every background element (0 for inactive ones)."""
        return self.__fractions

    def is_active(self, element):
        return bool(self.__active_mask[element])

    def element_class(self, element):
        self.check_active(element)
        return CUT if self.__cut_mask[element] else INTERIOR

    def polygon(self, element):
        """Vertices of the polygon T n Omega (the full triangle for interior elements)."""
        self.check_active(element)
        if self.__cut_mask[element]:
            return self.__polygons[element]
        return self.__parent.element_vertices(element)

    def chord(self, element):
        """End points of the interface chord of a cut element."""
        if not self.__cut_mask[element]:
            fail(ContractViolationError, "Element %d is not cut by the interface."%(element))
        return self.__chords[element]

    def face_root(self, face):
        return self.__face_roots.get(int(face))

    def check_active(self, element):
        if not (0 <= element < len(self.__active_mask)) or not self.__active_mask[element]:
            fail(ContractViolationError, "Element %s is not active."%(element))

    def __len__(self):
        return len(self.__elements)

def extract_active_mesh(mesh, phi):
    """
    Collects the elements with a nonempty intersection with Omega.

    Parameters
    ----------
    * mesh                          : (BackgroundMesh) Background triangulation.
    * phi                           : (LevelSet) Level set, negative inside Omega.

    Returns
    -------
    * active                        : (ActiveMesh) Active elements with class and cut fraction.
    """
    return ActiveMesh(mesh, phi)

def cut_volume_quadrature(active, element, order):
    """
    Quadrature rule on T n Omega. Interior elements get the plain
    simplex rule; cut elements the fan triangulation of the clipped
    polygon.

    Raises
    ------
    * UnsupportedOrderError
                                    * If order > 4.
    * ContractViolationError
                                    * If the element is not active.
    """
    active.check_active(element)
    if active.cut_mask[element]:
        return polygon_rule(active.polygon(element), order)
    return triangle_rule(active.parent.element_vertices(element), order)

def element_quadrature(mesh, element, order):
    """Quadrature rule on the full triangle, ignoring the interface."""
    return triangle_rule(mesh.element_vertices(element), order)

def _check_segment_order(order):
    # 3-point Gauss is exact to degree 5.
    if int(order) != order or order < 0 or order > 5:
        fail(UnsupportedOrderError, "Boundary quadrature order %s is not supported (maximum 5)."%(order))

def cut_boundary_quadrature(active, element, order=3):
    """
    Gauss rule on the interface chord of a cut element, with normals
    grad phi / |grad phi| at the quadrature points.

    Raises
    ------
    * ContractViolationError
                                    * If the element is not cut.
    """
    _check_segment_order(order)
    p, q = active.chord(element)
    points, weights = segment_rule(p, q)
    return BoundaryQuadratureRule(points, weights, active.phi.gradient(points))

def domain_boundary_quadrature(active, order=3):
    """
    Gauss rules on the parts of the bounding box edges lying in Omega
    (the fitted part of the boundary of Omega).

    Returns
    -------
    * rules                         : (list) (element id, BoundaryQuadratureRule) pairs,
                                        ordered by face id. Empty when Omega stays
                                        away from the box.
    """
    _check_segment_order(order)
    mesh = active.parent
    values = active.node_values
    rules = []
    for face in mesh.boundary_faces:
        element = int(mesh.face_elements[face, 0])
        if not active.is_active(element):
            continue
        a, b = mesh.faces[face]
        inside_a, inside_b = values[a] < 0.0, values[b] < 0.0
        if not (inside_a or inside_b):
            continue
        p, q = mesh.nodes[a], mesh.nodes[b]
        if not inside_a:
            p = active.face_root(face)
        elif not inside_b:
            q = active.face_root(face)
        points, weights = segment_rule(p, q)
        normals = np.repeat(mesh.face_normals[face][None, :], len(points), axis=0)
        rules.append((element, BoundaryQuadratureRule(points, weights, normals)))
    return rules

def cut_fraction(active, element):
    """|T n Omega| / |T|, exactly 1 for interior elements."""
    active.check_active(element)
    return float(active.cut_fractions[element])

def gather_volume_rules(active, order, full=False):
    """
    Concatenated volume rules of all active elements in element id order.

    Parameters
    ----------
    * active                        : (ActiveMesh) Active mesh.
    * order                         : (int) Polynomial exactness.
    * full                          : (bool) Integrate over the full elements (Omega_h)
                                        instead of T n Omega.

    Returns
    -------
    * rule                          : (QuadratureRule) (Q, 2) points and (Q,) weights.
    * owners                        : (np.array) (Q,) element id of every point.
    """
    points, weights, owners = [], [], []
    for element in active.elements:
        if full:
            rule = element_quadrature(active.parent, element, order)
        else:
            rule = cut_volume_quadrature(active, element, order)
        points.append(rule.points)
        weights.append(rule.weights)
        owners.append(np.full(len(rule.weights), element, dtype=np.int64))
    return QuadratureRule(np.vstack(points), np.concatenate(weights)), np.concatenate(owners)

def gather_boundary_rules(active, order=3):
    """
    Concatenated boundary rules of the interface chords followed by the
    fitted box edges.

    Returns
    -------
    * rule                          : (BoundaryQuadratureRule) All boundary points.
    * owners                        : (np.array) Element id of every point.
    """
    points, weights, normals, owners = [], [], [], []
    pieces = [(element, cut_boundary_quadrature(active, element, order)) for element in active.cut_elements]
    pieces += domain_boundary_quadrature(active, order)
    for element, rule in pieces:
        points.append(rule.points)
        weights.append(rule.weights)
        normals.append(rule.normals)
        owners.append(np.full(len(rule.weights), element, dtype=np.int64))
    if not pieces:
        return BoundaryQuadratureRule(np.zeros((0, 2)), np.zeros(0), np.zeros((0, 2))), np.zeros(0, dtype=np.int64)
    return BoundaryQuadratureRule(np.vstack(points), np.concatenate(weights), np.vstack(normals)), np.concatenate(owners)
