"""
Large/small element partition, the agglomeration map S_h, the dof split
I = I^S u I^L and the path diagnostics for the agglomeration map.
"""
import numpy as np
from collections import deque, namedtuple
from cutfem.errors import ConfigurationError, UnusableGeometryError, fail
from cutfem.utils import print_info_msg, print_warn_msg

TARGETS = ("large", "interior")

# A2 path too long or missing; A3 paths between images of small elements;
# A3 paths from a large element to the image of a small one.
A2_PATH = "a2_path"
A3_SMALL_PAIR = "a3_small_pair"
A3_MIXED_PAIR = "a3_mixed_pair"

Violation = namedtuple("Violation", ["element_id", "violation_kind", "path_length"])

class ElementPartition:
    """
    Split of the active elements by cut fraction against the threshold gamma.

    Attributes
    ----------
    * gamma                                 * (float) Threshold in (0, 1].
    * large                                 * (np.array) Ids with cut fraction >= gamma.
    * small                                 * (np.array) Ids with cut fraction < gamma.
    * active                                * (ActiveMesh) The partitioned mesh.
    """

    def __init__(self, active, gamma, large, small):
        self.__active = active
        self.__gamma = float(gamma)
        self.__large = np.asarray(large, dtype=np.int64)
        self.__small = np.asarray(small, dtype=np.int64)
        self.__large_mask = np.zeros(active.parent.num_elements, dtype=bool)
        self.__large_mask[self.__large] = True
        self.__small_mask = np.zeros(active.parent.num_elements, dtype=bool)
        self.__small_mask[self.__small] = True

    @property
    def active(self):
        return self.__active

    @property
    def gamma(self):
        return self.__gamma

    @property
    def large(self):
        return self.__large

    @property
    def small(self):
        return self.__small

    @property
    def large_mask(self):
        return self.__large_mask

    @property
    def small_mask(self):
        return self.__small_mask

    def is_large(self, element):
        return bool(self.__large_mask[element])

    def is_small(self, element):
        return bool(self.__small_mask[element])

class AgglomerationMap:
    """
    Assignment T -> S_h(T) of a target element to every small element,
    with the face neighbour path found between them.

    Parameters
    ----------
    * targets                               : (dict) Small element id -> target element id.
    * paths                                 : (dict) Small element id -> list of element ids from T
                                                to S_h(T), or None when no path was found.
    * max_path_length                       : (int) Bound L_max used when the map was built.
    * target                                : (str) 'large' or 'interior'.
    """

    def __init__(self, targets, paths, max_path_length=None, target="large"):
        self.__targets = dict(targets)
        self.__paths = dict(paths)
        self.__max_path_length = max_path_length
        self.__target = target
        self.__violations = []
        if max_path_length is not None:
            for element in sorted(self.__targets):
                path = self.__paths.get(element)
                if path is None or len(path) > max_path_length:
                    self.__violations.append(Violation(element, A2_PATH, -1 if path is None else len(path)))

    @property
    def targets(self):
        return self.__targets

    @property
    def paths(self):
        return self.__paths

    @property
    def max_path_length(self):
        return self.__max_path_length

    @property
    def target(self):
        return self.__target

    @property
    def violations(self):
        """A2 violations recorded while the map was built."""
        return list(self.__violations)

    def __getitem__(self, element):
        return self.__targets[element]

    def __contains__(self, element):
        return element in self.__targets

    def __len__(self):
        return len(self.__targets)

class DofPartition:
    """
    Split of the dofs into I^S (no large element in the support) and
    I^L, with the anchor element T_i of every i in I^S.

    Attributes
    ----------
    * small_dofs                            * (np.array) I^S, ascending.
    * large_dofs                            * (np.array) I^L, ascending.
    * anchors                               * (dict) i in I^S -> T_i.
    """

    def __init__(self, small_dofs, large_dofs, anchors):
        self.__small_dofs = np.asarray(small_dofs, dtype=np.int64)
        self.__large_dofs = np.asarray(large_dofs, dtype=np.int64)
        self.__anchors = dict(anchors)

    @property
    def small_dofs(self):
        return self.__small_dofs

    @property
    def large_dofs(self):
        return self.__large_dofs

    @property
    def anchors(self):
        return self.__anchors

    def __repr__(self):
        return str({'I^S': len(self.__small_dofs), 'I^L': len(self.__large_dofs)})

def face_path(mesh, start, goal, allowed, max_length=None):
    """
    Shortest path of face neighbouring elements from start to goal,
    visiting only elements with allowed[element] True.

    Parameters
    ----------
    * mesh                          : (BackgroundMesh) Mesh with face neighbours.
    * start, goal                   : (int) Element ids (both must be allowed).
    * allowed                       : (np.array) Boolean mask over the elements.
    * max_length                    : (int) Stop searching beyond this many elements.

    Returns
    -------
    * path                          : (list) Element ids from start to goal, or None.
    """
    start, goal = int(start), int(goal)
    if not (allowed[start] and allowed[goal]):
        return None
    if start == goal:
        return [start]
    parents = {start: None}
    depth = {start: 1}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        if max_length is not None and depth[current] >= max_length:
            continue
        # Neighbours in ascending id order keep the path deterministic.
        for neighbor in sorted(int(e) for e in mesh.neighbors[current] if e >= 0):
            if neighbor in parents or not allowed[neighbor]:
                continue
            parents[neighbor] = current
            depth[neighbor] = depth[current] + 1
            if neighbor == goal:
                path = [goal]
                while parents[path[-1]] is not None:
                    path.append(parents[path[-1]])
                return path[::-1]
            queue.append(neighbor)
    return None

def partition_elements(active, gamma):
    """
    Splits the active elements into large (cut fraction >= gamma)
    and small ones.

    Raises
    ------
    * ConfigurationError
                                    * If gamma is not in (0, 1].
    * UnusableGeometryError
                                    * If no element is large.
    """
    if not (0.0 < gamma <= 1.0):
        fail(ConfigurationError, "Expected gamma in (0, 1]. Got: %s."%(gamma))
    fractions = active.cut_fractions[active.elements]
    large = active.elements[fractions >= gamma]
    small = active.elements[fractions < gamma]
    if len(large) == 0:
        fail(UnusableGeometryError, "No large element for gamma = %g; the stabilization has no anchor."%(gamma))
    print_info_msg("Element partition (gamma = %g): %d large, %d small."%(gamma, len(large), len(small)))
    return ElementPartition(active, gamma, large, small)

def build_agglomeration_map(partition, max_path_length=None, target="large"):
    """
    Maps every small element to the target element with the nearest
    centroid (ties to the smallest id) and stores the shortest face
    path between them through active elements.

    Parameters
    ----------
    * partition                     : (ElementPartition) Element partition.
    * max_path_length               : (int) L_max; longer or missing paths are recorded
                                        as A2 violations (not fatal).
    * target                        : (str) 'large' maps into large elements,
                                        'interior' into uncut elements.

    Returns
    -------
    * agglomeration                 : (AgglomerationMap) The map S_h.

    Raises
    ------
    * ConfigurationError
                                    * If target is unknown.
    * UnusableGeometryError
                                    * If there is no candidate target element.
    """
    if target not in TARGETS:
        fail(ConfigurationError, "Unknown agglomeration target '%s'. Expected one of %s."%(target, TARGETS))
    active = partition.active
    mesh = active.parent
    if target == "large":
        candidates = partition.large
    else:
        candidates = active.interior_elements
    if len(candidates) == 0:
        fail(UnusableGeometryError, "No %s element available as agglomeration target."%(target))

    candidate_centroids = mesh.centroids[candidates]
    targets, paths = {}, {}
    for element in partition.small:
        element = int(element)
        dist = np.sum((candidate_centroids - mesh.centroids[element])**2, axis=1)
        # candidates are ascending, so the first near-minimal entry has the smallest id.
        nearest = int(candidates[np.flatnonzero(dist <= dist.min()*(1.0 + 1e-12) + 1e-300)[0]])
        targets[element] = nearest
        paths[element] = face_path(mesh, element, nearest, active.active_mask)

    agglomeration = AgglomerationMap(targets, paths, max_path_length, target)
    for violation in agglomeration.violations:
        print_warn_msg("Small element %d: path to S_h(T) has length %d (L_max = %s)."%(violation.element_id, violation.path_length, max_path_length))
    return agglomeration

def partition_dofs(dofmap, partition):
    """
    I^S collects the dofs whose support holds no large element; the
    anchor T_i is the smallest-id small element of the support.
    """
    small_dofs, large_dofs, anchors = [], [], {}
    large_mask = partition.large_mask
    for dof in range(dofmap.num_dofs):
        support = dofmap.support(dof)
        if large_mask[support].any():
            large_dofs.append(dof)
        else:
            small_dofs.append(dof)
            anchors[dof] = int(support[0])
    print_info_msg("Dof partition: |I^S| = %d, |I^L| = %d."%(len(small_dofs), len(large_dofs)))
    return DofPartition(small_dofs, large_dofs, anchors)

def verify_assumptions(agglomeration, partition, dofmap, dofpartition, max_path_length):
    """
    Checks the path assumptions at level L_max.

    Reports (a) small elements whose path to S_h(T) is missing or longer
    than L_max; (b) for every i in I^S and small T1, T2 in supp(phi_i),
    a missing large-only path of length <= L_max between S_h(T1) and
    S_h(T2); (c) for every dof with a large T1 and a small T2 in its
    support, a missing large-only path from T1 to S_h(T2).

    Returns
    -------
    * report                        : (list) Violation tuples (element_id, violation_kind,
                                        path_length); path_length is -1 when no path
                                        within the bound exists. Empty iff the
                                        assumptions hold at L_max.
    """
    mesh = partition.active.parent
    large_mask = partition.large_mask
    small_mask = partition.small_mask
    report = []

    for element in sorted(agglomeration.targets):
        path = agglomeration.paths.get(element)
        if path is None or len(path) > max_path_length:
            report.append(Violation(element, A2_PATH, -1 if path is None else len(path)))

    cache = {}
    def large_path_length(a, b):
        key = (min(a, b), max(a, b))
        if key not in cache:
            path = face_path(mesh, a, b, large_mask, max_path_length)
            cache[key] = -1 if path is None else len(path)
        return cache[key]

    small_set = set(dofpartition.small_dofs.tolist())
    reported = set()
    for dof in range(dofmap.num_dofs):
        support = dofmap.support(dof)
        smalls = [int(e) for e in support if small_mask[e]]
        larges = [int(e) for e in support if large_mask[e]]
        if dof in small_set:
            for k, t1 in enumerate(smalls):
                for t2 in smalls[k + 1:]:
                    length = large_path_length(agglomeration[t1], agglomeration[t2])
                    if length < 0 and (t2, A3_SMALL_PAIR) not in reported:
                        reported.add((t2, A3_SMALL_PAIR))
                        report.append(Violation(t2, A3_SMALL_PAIR, length))
        for t1 in larges:
            for t2 in smalls:
                length = large_path_length(t1, agglomeration[t2])
                if length < 0 and (t2, A3_MIXED_PAIR) not in reported:
                    reported.add((t2, A3_MIXED_PAIR))
                    report.append(Violation(t2, A3_MIXED_PAIR, length))

    if report:
        print_warn_msg("%d assumption violations at L_max = %d."%(len(report), max_path_length))
    return report
