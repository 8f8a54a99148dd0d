"""Combinatorial model of an ideal triangulation.

Tetrahedra are glued along faces; from the gluing data we derive edge
classes (orbits of bare edges), face classes, the cyclic arrangement of
edge cones around each edge, the clockwise triple of edge cones around
each vertex cone, and a shape-parameter labeling of the bare edges.

File format (JSON)::

    {
      "name": "figure8",
      "face_names": ["N", "S", "E", "W"],          # optional, per face class
      "tetrahedra": [
        {"neighbors": [1, 1, 1, 1], "gluings": ["0312", "2130", "1320", "2013"]},
        ...
      ],
      "shape_labels": [ {"13": 0, "02": 0, ...}, ... ]   # optional, per tetra
    }

Vertices of each tetrahedron are labeled 0..3 and face i is the face
opposite vertex i.  ``gluings[f]`` is the vertex bijection onto the
neighbor written as a 4-digit string (digit v = image of vertex v); a
null neighbor marks a boundary face.  ``shape_labels`` assigns 0, 1, 2
(rendered Z, Z', Z'') to each vertex-pair key "ab"; opposite edges must
share a label and around every vertex the three labels must run
cyclically Z -> Z' -> Z'' in the clockwise order seen from that vertex.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Sequence

LABEL_BASE = ("Z", "Z'", "Z''")
TETRA_LETTERS = "ZYXWVU"


class TriangulationError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class BareEdge:
    """An edge of a single tetrahedron before gluing."""

    tetra: int
    pair: tuple[int, int]  # sorted vertex pair

    def opposite(self) -> "BareEdge":
        rest = tuple(v for v in range(4) if v not in self.pair)
        return BareEdge(self.tetra, rest)

    def faces(self) -> tuple[int, int]:
        """The two faces of the tetrahedron containing this edge."""
        return tuple(f for f in range(4) if f not in self.pair)


@dataclass(frozen=True)
class Tetra:
    index: int
    neighbors: tuple[int | None, ...]
    gluings: tuple[tuple[int, ...] | None, ...]


@dataclass(frozen=True)
class EdgeClass:
    """Orbit of bare edges around one edge of the glued manifold.

    ``members[i]`` is the i-th edge cone in cyclic order; crossing the face
    class ``faces_after[i]`` leads from it to ``members[i+1]``.  For orbits
    that run into boundary faces, ``interior`` is False and the sequence is
    a path rather than a cycle.
    """

    index: int
    members: tuple[BareEdge, ...]
    faces_after: tuple[int, ...]
    interior: bool

    @property
    def valence(self) -> int:
        return len(self.members)


def _perm_sign(p: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j = p[i]
        length = 1
        seen[i] = True
        while j != i:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


class Triangulation:
    def __init__(
        self,
        tetrahedra: Sequence[Tetra],
        shape_labels: Sequence[dict[tuple[int, int], int]] | None = None,
        face_names: Sequence[str] | None = None,
        name: str = "",
    ):
        self.name = name
        self.tetrahedra = list(tetrahedra)
        self._validate_gluings()
        self.orientations = self._derive_orientations()
        self.face_classes, self.face_index = self._derive_face_classes()
        if face_names is not None:
            if len(face_names) != len(self.face_classes):
                raise TriangulationError("face_names length does not match face class count")
            self.face_names = list(face_names)
        else:
            self.face_names = [f"F{i}" for i in range(len(self.face_classes))]
        self.edge_classes = self._derive_edge_classes()
        if shape_labels is not None:
            self.shape_labels = [dict(d) for d in shape_labels]
        else:
            self.shape_labels = [self._derive_labels(t) for t in range(len(self.tetrahedra))]
        self._validate_labels()

    # -- loading -----------------------------------------------------------

    @staticmethod
    def load(path) -> "Triangulation":
        with open(path) as fh:
            data = json.load(fh)
        return Triangulation.from_dict(data, name=data.get("name", str(path)))

    @staticmethod
    def from_dict(data: dict, name: str = "") -> "Triangulation":
        tets = []
        for i, td in enumerate(data["tetrahedra"]):
            neighbors = []
            gluings = []
            for f in range(4):
                nb = td["neighbors"][f]
                if nb is None:
                    neighbors.append(None)
                    gluings.append(None)
                    continue
                perm = tuple(int(ch) for ch in td["gluings"][f])
                if sorted(perm) != [0, 1, 2, 3]:
                    raise TriangulationError(f"tetra {i} face {f}: invalid permutation")
                neighbors.append(nb)
                gluings.append(perm)
            tets.append(Tetra(i, tuple(neighbors), tuple(gluings)))
        labels = None
        if "shape_labels" in data:
            labels = []
            for d in data["shape_labels"]:
                labels.append({tuple(sorted(int(c) for c in key)): v for key, v in d.items()})
        return Triangulation(tets, labels, data.get("face_names"), name=name or data.get("name", ""))

    # -- structural derivation ---------------------------------------------

    def _validate_gluings(self):
        for t in self.tetrahedra:
            for f in range(4):
                nb, p = t.neighbors[f], t.gluings[f]
                if nb is None:
                    continue
                if not (0 <= nb < len(self.tetrahedra)):
                    raise TriangulationError(f"tetra {t.index} face {f}: neighbor out of range")
                other = self.tetrahedra[nb]
                back = p[f]
                if other.neighbors[back] != t.index:
                    raise TriangulationError(
                        f"tetra {t.index} face {f}: gluing is not involutive (face used twice?)"
                    )
                q = other.gluings[back]
                if q is None or tuple(q[p[v]] for v in range(4)) != (0, 1, 2, 3):
                    raise TriangulationError(
                        f"tetra {t.index} face {f}: partner gluing is not the inverse"
                    )

    def _derive_orientations(self) -> list[int]:
        orient = [0] * len(self.tetrahedra)
        for start in range(len(self.tetrahedra)):
            if orient[start]:
                continue
            orient[start] = 1
            stack = [start]
            while stack:
                t = stack.pop()
                for f in range(4):
                    nb, p = self.tetrahedra[t].neighbors[f], self.tetrahedra[t].gluings[f]
                    if nb is None:
                        continue
                    # an orientation-compatible gluing reverses face orientation:
                    # odd vertex permutations join tetrahedra of equal sign
                    want = orient[t] * (1 if _perm_sign(p) < 0 else -1)
                    if orient[nb] == 0:
                        orient[nb] = want
                        stack.append(nb)
                    elif orient[nb] != want:
                        raise TriangulationError("gluings do not admit a consistent orientation")
        return orient

    def _derive_face_classes(self):
        classes = []
        index = {}
        for t in self.tetrahedra:
            for f in range(4):
                if (t.index, f) in index:
                    continue
                nb, p = t.neighbors[f], t.gluings[f]
                if nb is None:
                    members = ((t.index, f),)
                else:
                    members = ((t.index, f), (nb, p[f]))
                ci = len(classes)
                classes.append(members)
                for m in members:
                    index[m] = ci
        return classes, index

    def _edge_step(self, edge: BareEdge, exit_face: int):
        """Cross ``exit_face``; return (next edge, its entry face) or None at boundary."""
        t = self.tetrahedra[edge.tetra]
        nb, p = t.neighbors[exit_face], t.gluings[exit_face]
        if nb is None:
            return None
        nxt = BareEdge(nb, tuple(sorted((p[edge.pair[0]], p[edge.pair[1]]))))
        return nxt, p[exit_face]

    def _derive_edge_classes(self) -> list[EdgeClass]:
        all_edges = [
            BareEdge(t, pair)
            for t in range(len(self.tetrahedra))
            for pair in itertools.combinations(range(4), 2)
        ]
        seen: set[BareEdge] = set()
        classes: list[EdgeClass] = []
        for start in all_edges:
            if start in seen:
                continue
            start_exit = min(start.faces())
            members = [start]
            faces_after = []
            interior = True
            edge, exit_face = start, start_exit
            while True:
                faces_after.append(self.face_index[(edge.tetra, exit_face)])
                step = self._edge_step(edge, exit_face)
                if step is None:
                    interior = False
                    break
                edge, enter_face = step
                exit_face = next(f for f in edge.faces() if f != enter_face)
                if edge == start and exit_face == start_exit:
                    break
                members.append(edge)
            if not interior:
                # walk the other way to pick up the rest of the path
                faces_after.pop()  # drop the boundary face marker
                edge, exit_face = start, next(f for f in start.faces() if f != start_exit)
                while True:
                    step = self._edge_step(edge, exit_face)
                    if step is None:
                        break
                    edge, enter_face = step
                    exit_face = next(f for f in edge.faces() if f != enter_face)
                    members.insert(0, edge)
                    faces_after.insert(0, self.face_index[(edge.tetra, exit_face)])
            ec = EdgeClass(len(classes), tuple(members), tuple(faces_after), interior)
            for m in members:
                if m in seen:
                    raise TriangulationError(f"edge orbit through {m} does not close consistently")
                seen.add(m)
            classes.append(ec)
        return classes

    # -- shape labels --------------------------------------------------------

    def _derive_labels(self, t: int) -> dict[tuple[int, int], int]:
        """Default labeling: Z on the (0,1)/(2,3) pair, companions fixed by orientation."""
        for zp, zpp in (((0, 2), (0, 3)), ((0, 3), (0, 2))):
            labels = {(0, 1): 0, (2, 3): 0}
            labels[zp] = 1
            labels[tuple(sorted(set(range(4)) - set(zp)))] = 1
            labels[zpp] = 2
            labels[tuple(sorted(set(range(4)) - set(zpp)))] = 2
            if self._labels_cyclic(t, labels):
                return labels
        raise TriangulationError(f"tetra {t}: no orientation-compatible labeling found")

    def _labels_cyclic(self, t: int, labels: dict[tuple[int, int], int]) -> bool:
        for v in range(4):
            triple = self._vertex_triple(t, v)
            lab = [labels[e.pair] for e in triple]
            if set(lab) != {0, 1, 2}:
                return False
            k = lab.index(0)
            if [lab[k], lab[(k + 1) % 3], lab[(k + 2) % 3]] != [0, 1, 2]:
                return False
        return True

    def _validate_labels(self):
        if len(self.shape_labels) != len(self.tetrahedra):
            raise TriangulationError("shape_labels must cover every tetrahedron")
        for t, labels in enumerate(self.shape_labels):
            pairs = set(itertools.combinations(range(4), 2))
            if set(labels) != pairs:
                raise TriangulationError(f"tetra {t}: labels must cover all six edges")
            for pair in pairs:
                e = BareEdge(t, pair)
                if labels[pair] != labels[e.opposite().pair]:
                    raise TriangulationError(f"tetra {t}: opposite edges {pair} carry different labels")
            if sorted(labels.values()) != [0, 0, 1, 1, 2, 2]:
                raise TriangulationError(f"tetra {t}: each label must appear on one opposite pair")
            if not self._labels_cyclic(t, labels):
                raise TriangulationError(
                    f"tetra {t}: labels do not run Z, Z', Z'' clockwise around every vertex"
                )

    def label(self, edge: BareEdge) -> int:
        return self.shape_labels[edge.tetra][edge.pair]

    def label_name(self, edge: BareEdge) -> str:
        letter = TETRA_LETTERS[edge.tetra % len(TETRA_LETTERS)]
        suffix = "" if edge.tetra < len(TETRA_LETTERS) else str(edge.tetra)
        return letter + suffix + ("", "'", "''")[self.label(edge)]

    # -- cones ---------------------------------------------------------------

    def _vertex_triple(self, t: int, v: int) -> tuple[BareEdge, BareEdge, BareEdge]:
        """Edge cones at vertex v in clockwise order seen from the ideal vertex."""
        others = [x for x in range(4) if x != v]
        arrangement = [v] + others
        if _perm_sign(arrangement) != -self.orientations[t]:
            others[1], others[2] = others[2], others[1]
        return tuple(BareEdge(t, tuple(sorted((v, x)))) for x in others)

    def cones_around_vertex(self, t: int, v: int) -> list[tuple[int, BareEdge]]:
        """Clockwise (face class, edge cone) triple around the vertex cone (t, v).

        The triple is rotated so labels run Z'', Z, Z'; the face paired with a
        cone is the one spanned by it and the next cone in clockwise order.
        """
        triple = list(self._vertex_triple(t, v))
        labs = [self.label(e) for e in triple]
        k = labs.index(2)
        if [labs[k], labs[(k + 1) % 3], labs[(k + 2) % 3]] != [2, 0, 1]:
            raise TriangulationError(f"tetra {t} vertex {v}: labels are not cyclic Z, Z', Z''")
        triple = [triple[(k + j) % 3] for j in range(3)]
        out = []
        for j in range(3):
            e1, e2 = triple[j], triple[(j + 1) % 3]
            spanned = {v} | set(e1.pair) | set(e2.pair)
            face = next(f for f in range(4) if f not in spanned)
            out.append((self.face_index[(t, face)], e1))
        return out

    def cones_around_edge(self, ec: EdgeClass) -> list[tuple[int, BareEdge]]:
        """Cyclic (face class, edge cone) pairs around an edge class.

        Pair i holds cone i and the face suspension separating it from cone
        i+1; only interior edge classes give a genuinely cyclic sequence.
        """
        return [(ec.faces_after[i], ec.members[i]) for i in range(len(ec.members))]

    def vertex_cones(self) -> list[tuple[int, int]]:
        return [(t, v) for t in range(len(self.tetrahedra)) for v in range(4)]

    # -- misc ----------------------------------------------------------------

    def adjacent_face_classes(self, edge: BareEdge) -> tuple[int, int]:
        f1, f2 = edge.faces()
        return self.face_index[(edge.tetra, f1)], self.face_index[(edge.tetra, f2)]

    def boundary_face_count(self) -> int:
        return sum(1 for members in self.face_classes if len(members) == 1)

    def summary(self) -> dict:
        return {
            "name": self.name,
            "tetrahedra": len(self.tetrahedra),
            "edge_classes": len(self.edge_classes),
            "interior_edges": sum(1 for ec in self.edge_classes if ec.interior),
            "face_classes": len(self.face_classes),
            "boundary_faces": self.boundary_face_count(),
            "edge_valences": [ec.valence for ec in self.edge_classes],
        }
