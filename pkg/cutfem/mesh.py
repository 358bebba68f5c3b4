import numpy as np
from cutfem.errors import ConfigurationError, fail
from cutfem.utils import print_info_msg

class BackgroundMesh:
    """
    Structured triangulation of the rectangle bbox. Each of the n x n
    grid squares is split into two counter clockwise triangles by the
    diagonal joining its lower left and upper right corners.

    Parameters
    ----------
    * nodes                                 : (np.array) (N, 2) node coordinates.
    * elements                              : (np.array) (E, 3) vertex indices, counter clockwise.
    * bbox                                  : (tuple) (xmin, ymin, xmax, ymax).

    Attributes
    ----------
    * nodes                                 * (np.array) Node coordinates.
    * elements                              * (np.array) Element vertex triples.
    * faces                                 * (np.array) (F, 2) sorted node pairs of all edges.
    * face_elements                         * (np.array) (F, 2) adjacent element ids, -1 on the box boundary.
    * face_normals                          * (np.array) (F, 2) unit normals pointing out of face_elements[:, 0].
    * neighbors                             * (np.array) (E, 3) face neighbours of every element, -1 if none.
    * areas                                 * (np.array) (E,) signed element areas.
    * centroids                             * (np.array) (E, 2) element centroids.
    * basis_gradients                       * (np.array) (E, 3, 2) constant gradients of the element basis.
    * h                                     * (float) Maximum element diameter.
    * bbox                                  * (tuple) Bounding box of the background domain.
    """

    def __init__(self, nodes, elements, bbox):
        self.__nodes = np.asarray(nodes, dtype=np.float64)
        self.__elements = np.asarray(elements, dtype=np.int64)
        self.__bbox = tuple(float(b) for b in bbox)

        coords = self.__nodes[self.__elements]
        e1 = coords[:, 1] - coords[:, 0]
        e2 = coords[:, 2] - coords[:, 0]
        self.__areas = 0.5*(e1[:, 0]*e2[:, 1] - e1[:, 1]*e2[:, 0])
        self.__centroids = coords.mean(axis=1)

        edge_lengths = np.linalg.norm(coords - np.roll(coords, -1, axis=1), axis=2)
        self.__diameters = edge_lengths.max(axis=1)
        self.__h = float(self.__diameters.max())

        # Rows of the inverse Jacobian are the gradients of the barycentric
        # coordinates 1 and 2; the gradient of coordinate 0 is minus their sum.
        jac = np.stack((e1, e2), axis=2)
        inv = np.linalg.inv(jac)
        self.__basis_gradients = np.concatenate((-inv.sum(axis=1)[:, None, :], inv), axis=1)

        self.__build_faces()

    def __build_faces(self):
        num_elements = len(self.__elements)
        local = self.__elements[:, [[0, 1], [1, 2], [2, 0]]].reshape(-1, 2)
        edges = np.sort(local, axis=1)
        faces, inverse = np.unique(edges, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        owner = np.repeat(np.arange(num_elements), 3)

        order = np.argsort(inverse, kind="stable")
        face_ids = inverse[order]
        owners = owner[order]
        first = np.ones(len(face_ids), dtype=bool)
        first[1:] = face_ids[1:] != face_ids[:-1]

        face_elements = -np.ones((len(faces), 2), dtype=np.int64)
        face_elements[face_ids[first], 0] = owners[first]
        face_elements[face_ids[~first], 1] = owners[~first]

        neighbors = -np.ones((num_elements, 3), dtype=np.int64)
        local_face = inverse.reshape(num_elements, 3)
        for k in range(3):
            fe = face_elements[local_face[:, k]]
            this = np.arange(num_elements)
            neighbors[:, k] = np.where(fe[:, 0] == this, fe[:, 1], fe[:, 0])

        p = self.__nodes[faces[:, 0]]
        q = self.__nodes[faces[:, 1]]
        tangent = q - p
        lengths = np.linalg.norm(tangent, axis=1)
        normals = np.stack((tangent[:, 1], -tangent[:, 0]), axis=1)/lengths[:, None]
        outward = 0.5*(p + q) - self.__centroids[face_elements[:, 0]]
        flip = np.einsum("ij,ij->i", normals, outward) < 0.0
        normals[flip] *= -1.0

        self.__faces = faces
        self.__face_elements = face_elements
        self.__face_normals = normals
        self.__face_lengths = lengths
        self.__element_faces = local_face
        self.__neighbors = neighbors

    @property
    def nodes(self):
        return self.__nodes

    @property
    def elements(self):
        return self.__elements

    @property
    def bbox(self):
        return self.__bbox

    @property
    def h(self):
        return self.__h

    @property
    def areas(self):
        return self.__areas

    @property
    def centroids(self):
        return self.__centroids

    @property
    def diameters(self):
        return self.__diameters

    @property
    def basis_gradients(self):
        return self.__basis_gradients

    @property
    def faces(self):
        return self.__faces

    @property
    def face_elements(self):
        return self.__face_elements

    @property
    def face_normals(self):
        return self.__face_normals

    @property
    def face_lengths(self):
        return self.__face_lengths

    @property
    def element_faces(self):
        return self.__element_faces

    @property
    def neighbors(self):
        return self.__neighbors

    @property
    def num_nodes(self):
        return len(self.__nodes)

    @property
    def num_elements(self):
        return len(self.__elements)

    @property
    def internal_faces(self):
        """Ids of faces shared by two elements."""
        return np.flatnonzero(self.__face_elements[:, 1] >= 0)

    @property
    def boundary_faces(self):
        """Ids of faces on the boundary of the bounding box."""
        return np.flatnonzero(self.__face_elements[:, 1] < 0)

    def element_vertices(self, element):
        return self.__nodes[self.__elements[element]]

    def quasiuniformity(self):
        """Ratio of the largest to the smallest element diameter."""
        return float(self.__diameters.max()/self.__diameters.min())

    def __repr__(self):
        return str({'Nodes': self.num_nodes,
                    'Elements': self.num_elements,
                    'Internal faces': len(self.internal_faces),
                    'h': self.h,
                    'Bounding box': self.bbox})

def build_background_mesh(n, bbox=(-1.0, -1.0, 1.0, 1.0)):
    """
    Builds the uniform n x n grid of bbox, each square split
    into two triangles by the same diagonal.

    Parameters
    ----------
    * n                             : (int) Subdivisions per side, n >= 1.
    * bbox                          : (tuple) (xmin, ymin, xmax, ymax).

    Returns
    -------
    * mesh                          : (BackgroundMesh) The triangulation; h is the
                                        diagonal length of one grid square.

    Raises
    ------
    * ConfigurationError
                                    * If n < 1 or not an integer.
                                    * If bbox is degenerate.
    """
    if int(n) != n or n < 1:
        fail(ConfigurationError, "Expected number of subdivisions to be a positive int. Got: %s."%(n))
    n = int(n)

    bbox = tuple(float(b) for b in bbox)
    if len(bbox) != 4 or not np.all(np.isfinite(bbox)):
        fail(ConfigurationError, "Expected bbox as (xmin, ymin, xmax, ymax). Got: %s."%(bbox,))
    xmin, ymin, xmax, ymax = bbox
    if not (xmax > xmin and ymax > ymin):
        fail(ConfigurationError, "Degenerate bounding box %s."%(bbox,))

    x = np.linspace(xmin, xmax, n + 1)
    y = np.linspace(ymin, ymax, n + 1)
    xx, yy = np.meshgrid(x, y)
    nodes = np.stack((xx.ravel(), yy.ravel()), axis=1)

    i, j = np.meshgrid(np.arange(n), np.arange(n))
    i, j = i.ravel(), j.ravel()
    a = j*(n + 1) + i
    b = a + 1
    c = a + n + 2
    d = a + n + 1
    elements = np.empty((2*n*n, 3), dtype=np.int64)
    elements[0::2] = np.stack((a, b, c), axis=1)
    elements[1::2] = np.stack((a, c, d), axis=1)

    mesh = BackgroundMesh(nodes, elements, bbox)
    print_info_msg("Built background mesh with %d nodes and %d elements (h = %.4e)."%(mesh.num_nodes, mesh.num_elements, mesh.h))
    return mesh
