"""The big quantum torus attached to the face suspensions of a triangulation.

Every face suspension contributes six generators, one per edge cone on its
boundary, named after the shape label of the cone and the face: the wall
of the Z'-labeled cone of tetrahedron 0 on face N is ``z'_N``.  Within one
tetra-half of a face the three generators commute cyclically,

    g g' = A g' g     for labels  Z -> Z' -> Z'' -> Z,

generators in different halves or different faces commute.  The square
root quantized shape parameter of an edge cone is the product of its two
wall generators; products of adjacent parameters around a vertex cone
then A-commute in clockwise order, which tests derive rather than assume.

Relation families:

* ``v_minus``  one element per interior edge class e of valence k:
  [x_e1 ... x_ek] + (-1)^(k/2) A^2, acting on the right of the module.
* ``v_plus``   per vertex cone: the central triangle element
  [x_e1 x_e2 x_e3] + A and the three-term element x_e1^-2 + x_e2^2 + 1
  (clockwise rotations of the latter are all admissible), acting on the left.
* ``w_minus`` / ``w_plus``  the analogous families in the coarser torus of
  quantized shape parameters, mapped in via ``iota`` (X = -x^2 on a fixed
  representative edge per label).

Equality in the quotient module is never decided algorithmically; the
engine only replays explicit rewrite certificates, each verified as an
exact identity in the torus.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .qtorus import CommutationForm, TorusElement, weyl
from .scalar import GaussianHalfLaurent, ONE
from .triangulation import BareEdge, EdgeClass, Triangulation

_HALF_LETTERS = "zyxwvu"


@dataclass(frozen=True)
class Generator:
    index: int
    face: int
    edge: BareEdge
    name: str


class GeneratorRegistry:
    """Generators x_{f,e} of the tensor product of face suspension modules."""

    def __init__(self, tri: Triangulation):
        self.tri = tri
        self.generators: list[Generator] = []
        self._by_face_edge: dict[tuple[int, BareEdge], Generator] = {}
        for fi, members in enumerate(tri.face_classes):
            for (t, f) in sorted(members):
                for pair in _face_edges(f):
                    edge = BareEdge(t, pair)
                    name = _generator_name(tri, fi, edge)
                    g = Generator(len(self.generators), fi, edge, name)
                    self.generators.append(g)
                    self._by_face_edge[(fi, edge)] = g
        n = len(self.generators)
        form = [[0] * n for _ in range(n)]
        for g in self.generators:
            for h in self.generators:
                if g.face == h.face and g.edge.tetra == h.edge.tetra and g.index != h.index:
                    lg, lh = tri.label(g.edge), tri.label(h.edge)
                    if (lg + 1) % 3 == lh:
                        form[g.index][h.index] = 1
                    else:
                        form[g.index][h.index] = -1
        self.form = CommutationForm(form)
        self.names = [g.name for g in self.generators]

    # -- lookup --------------------------------------------------------------

    def generator(self, face: int, edge: BareEdge) -> Generator:
        return self._by_face_edge[(face, edge)]

    def by_name(self, name: str) -> Generator:
        for g in self.generators:
            if g.name == name:
                return g
        raise KeyError(name)

    def wall_pair(self, edge: BareEdge) -> tuple[Generator, Generator]:
        """The two generators on the walls of the cone over ``edge``."""
        f1, f2 = self.tri.adjacent_face_classes(edge)
        return self.generator(f1, edge), self.generator(f2, edge)

    def sqrt_param_exponents(self, edge: BareEdge) -> tuple[int, ...]:
        u = [0] * len(self.generators)
        for g in self.wall_pair(edge):
            u[g.index] += 1
        return tuple(u)

    def sqrt_param(self, edge: BareEdge, power: int = 1) -> TorusElement:
        """The square root quantized shape parameter of the cone over ``edge``."""
        mono = TorusElement.monomial(self.form, self.sqrt_param_exponents(edge))
        return mono.monomial_pow(power) if power != 1 else mono

    def zero(self) -> TorusElement:
        return TorusElement.zero(self.form)

    def one(self) -> TorusElement:
        return TorusElement.one(self.form)

    def render(self, el: TorusElement) -> str:
        return el.render(self.names)

    # -- square-root lattice ---------------------------------------------------

    def cone_exponents(self, el: TorusElement) -> list[tuple[dict[BareEdge, int], GaussianHalfLaurent]]:
        """Each term as exponents of square root shape parameters.

        Raises ValueError if some term is not a monomial in the x_e, i.e. if
        the two wall exponents of some cone disagree.
        """
        out = []
        all_edges = [g.edge for g in self.generators]
        for u, c in el.sorted_terms():
            exps: dict[BareEdge, int] = {}
            for edge in set(all_edges):
                g1, g2 = self.wall_pair(edge)
                if u[g1.index] != u[g2.index]:
                    raise ValueError(
                        f"term is not in the span of square-root shape parameters at {edge}"
                    )
                if u[g1.index]:
                    exps[edge] = u[g1.index]
            out.append((exps, c))
        return out


def _face_edges(f: int) -> list[tuple[int, int]]:
    verts = [v for v in range(4) if v != f]
    return [
        tuple(sorted((verts[0], verts[1]))),
        tuple(sorted((verts[0], verts[2]))),
        tuple(sorted((verts[1], verts[2]))),
    ]


def _generator_name(tri: Triangulation, face: int, edge: BareEdge) -> str:
    letter = _HALF_LETTERS[edge.tetra % len(_HALF_LETTERS)]
    suffix = "" if edge.tetra < len(_HALF_LETTERS) else str(edge.tetra)
    primes = ("", "'", "''")[tri.label(edge)]
    return f"{letter}{suffix}{primes}_{tri.face_names[face]}"


def build(tri: Triangulation) -> GeneratorRegistry:
    return GeneratorRegistry(tri)


# -- relation families ---------------------------------------------------------


def edge_relation(reg: GeneratorRegistry, ec: EdgeClass) -> TorusElement:
    """[x_e1 ... x_ek] + (-1)^(k/2) A^2 for the k cones around the edge."""
    u = [0] * len(reg.generators)
    for e in ec.members:
        for i, v in enumerate(reg.sqrt_param_exponents(e)):
            u[i] += v
    k = ec.valence
    const = GaussianHalfLaurent.from_phase(k, 0) * GaussianHalfLaurent.a_power(4 - 2 * k)
    # from_phase(k) = i^k A^k; rescale to i^k * A^2
    return weyl(reg.form, u) + TorusElement.scalar(reg.form, const)


def triangle_relation(reg: GeneratorRegistry, t: int, v: int) -> TorusElement:
    """[x_e1 x_e2 x_e3] + A around the vertex cone (t, v); central."""
    u = [0] * len(reg.generators)
    for _, e in reg.tri.cones_around_vertex(t, v):
        for i, w in enumerate(reg.sqrt_param_exponents(e)):
            u[i] += w
    return weyl(reg.form, u) + TorusElement.scalar(reg.form, GaussianHalfLaurent.a_power(2))


def three_term_relation(reg: GeneratorRegistry, t: int, v: int, rotation: int = 0) -> TorusElement:
    """x_e1^-2 + x_e2^2 + 1 for clockwise-consecutive cones at the vertex cone.

    rotation 0 starts the clockwise triple at the Z''-labeled cone, so the
    classical specialization of the default relation is -(Z''^-1 + Z - 1).
    """
    cones = [e for _, e in reg.tri.cones_around_vertex(t, v)]
    e1 = cones[rotation % 3]
    e2 = cones[(rotation + 1) % 3]
    return reg.sqrt_param(e1, -2) + reg.sqrt_param(e2, 2) + reg.one()


@dataclass
class RelationFamily:
    """V-side families over the registry plus the W-side families through iota."""

    v_minus: list[TorusElement]
    v_plus: list[tuple[TorusElement, TorusElement]]  # (triangle, three-term) per vertex cone
    w_minus: list[TorusElement]
    w_plus: list[tuple[TorusElement, TorusElement]]


def vertex_relations(reg: GeneratorRegistry, t: int, v: int) -> tuple[TorusElement, TorusElement]:
    return triangle_relation(reg, t, v), three_term_relation(reg, t, v)


def relation_family(reg: GeneratorRegistry, qgm: "QgmTorus | None" = None) -> RelationFamily:
    qgm = qgm or QgmTorus(reg.tri)
    v_minus = [edge_relation(reg, ec) for ec in reg.tri.edge_classes if ec.interior]
    v_plus = [vertex_relations(reg, t, v) for t, v in reg.tri.vertex_cones()]
    w_minus = [iota(reg, qgm, el) for el in qgm.edge_relations()]
    w_plus = [
        (iota(reg, qgm, a), iota(reg, qgm, b)) for a, b in qgm.tetra_relations()
    ]
    return RelationFamily(v_minus, v_plus, w_minus, w_plus)


def lookup_relation(reg: GeneratorRegistry, rid: str) -> tuple[TorusElement, str]:
    """Resolve a relation id to (element, required side).

    Ids: ``edge:<k>`` (right), ``tri:<t>:<v>`` (left),
    ``three:<t>:<v>:<rot>`` (left).
    """
    parts = rid.split(":")
    if parts[0] == "edge":
        ec = reg.tri.edge_classes[int(parts[1])]
        if not ec.interior:
            raise ValueError(f"{rid}: edge class is not interior")
        return edge_relation(reg, ec), "right"
    if parts[0] == "tri":
        return triangle_relation(reg, int(parts[1]), int(parts[2])), "left"
    if parts[0] == "three":
        rot = int(parts[3]) if len(parts) > 3 else 0
        return three_term_relation(reg, int(parts[1]), int(parts[2]), rot), "left"
    raise ValueError(f"unknown relation id {rid!r}")


# -- rewrite certificates --------------------------------------------------------


class RewriteError(ValueError):
    pass


@dataclass
class RewriteCertificate:
    """Exact witness that ``before - after`` is a sided multiple of a relation."""

    relation_id: str
    relation: TorusElement
    side: str  # "left": relation * cofactor, "right": cofactor * relation
    cofactor: TorusElement
    before: TorusElement
    after: TorusElement

    def product(self) -> TorusElement:
        if self.side == "left":
            return self.relation * self.cofactor
        return self.cofactor * self.relation

    def verify(self) -> bool:
        return self.before - self.after == self.product()


def apply_rewrite(
    el: TorusElement,
    relation: TorusElement,
    side: str,
    cofactor: TorusElement,
    relation_id: str = "",
) -> tuple[TorusElement, RewriteCertificate]:
    """Subtract the sided product relation*cofactor (left) or cofactor*relation (right)."""
    if side not in ("left", "right"):
        raise RewriteError(f"invalid side {side!r}")
    if relation_id:
        kind = relation_id.split(":")[0]
        if kind == "edge" and side != "right":
            raise RewriteError("edge relations act on the right of the module only")
        if kind in ("tri", "three") and side != "left":
            raise RewriteError("vertex relations act on the left of the module only")
    prod = relation * cofactor if side == "left" else cofactor * relation
    after = el - prod
    cert = RewriteCertificate(relation_id, relation, side, cofactor, el, after)
    assert cert.verify()
    return after, cert


def cofactor_to_kill(
    el: TorusElement,
    relation: TorusElement,
    side: str,
    el_exps: Sequence[int],
    rel_exps: Sequence[int],
) -> TorusElement:
    """Monomial cofactor c such that the sided product of ``relation`` and c
    matches the ``el_exps`` term of ``el`` exactly at the ``rel_exps`` term.

    Applying the resulting rewrite removes that term from ``el``.
    """
    el_exps = tuple(el_exps)
    rel_exps = tuple(rel_exps)
    cw = el.terms.get(el_exps)
    cu = relation.terms.get(rel_exps)
    if cw is None or cu is None:
        raise RewriteError("requested terms are absent")
    F = el.formobj
    c_exps = tuple(a - b for a, b in zip(el_exps, rel_exps))
    if side == "left":
        phase = GaussianHalfLaurent.a_power(2 * F.reorder_exponent(rel_exps, c_exps))
    else:
        phase = GaussianHalfLaurent.a_power(2 * F.reorder_exponent(c_exps, rel_exps))
    coeff = cw.div_unit(cu * phase)
    return TorusElement.monomial(F, c_exps, coeff)


# -- quantized shape parameters (the coarser torus) -------------------------------


class QgmTorus:
    """Quantum torus of quantized shape parameters, three per tetrahedron.

    Generators X_t, X'_t, X''_t commute cyclically with A^4 within one
    tetrahedron and commute across tetrahedra.  Each comes with a fixed
    representative bare edge: the one whose pair of incident face classes
    is lexicographically smallest.
    """

    def __init__(self, tri: Triangulation):
        self.tri = tri
        n = len(tri.tetrahedra)
        form = [[0] * (3 * n) for _ in range(3 * n)]
        for t in range(n):
            for l in range(3):
                i = 3 * t + l
                j = 3 * t + (l + 1) % 3
                form[i][j] = 4
                form[j][i] = -4
        self.form = CommutationForm(form)
        self.names = []
        for t in range(n):
            for l in range(3):
                self.names.append(tri.label_name(self._any_edge(t, l)))
        self.rep_edges: list[BareEdge] = []
        for t in range(n):
            for l in range(3):
                pair = [
                    BareEdge(t, p) for p, lab in tri.shape_labels[t].items() if lab == l
                ]
                pair.sort(key=lambda e: tuple(sorted(tri.adjacent_face_classes(e))))
                self.rep_edges.append(pair[0])

    def _any_edge(self, t: int, l: int) -> BareEdge:
        for p, lab in self.tri.shape_labels[t].items():
            if lab == l:
                return BareEdge(t, p)
        raise KeyError((t, l))

    def generator(self, t: int, l: int, power: int = 1) -> TorusElement:
        return TorusElement.generator(self.form, 3 * t + l, power)

    def one(self) -> TorusElement:
        return TorusElement.one(self.form)

    def scalar(self, c: GaussianHalfLaurent) -> TorusElement:
        return TorusElement.scalar(self.form, c)

    def weyl(self, u: Sequence[int]) -> TorusElement:
        return weyl(self.form, u)

    def render(self, el: TorusElement) -> str:
        return el.render(self.names)

    # -- relation families (the W side) ------------------------------------------

    def edge_relations(self) -> list[TorusElement]:
        """[Y_1 ... Y_k] - A^4, one per interior edge class."""
        out = []
        for ec in self.tri.edge_classes:
            if not ec.interior:
                continue
            u = [0] * self.form.n
            for e in ec.members:
                u[3 * e.tetra + self.tri.label(e)] += 1
            out.append(self.weyl(u) - self.scalar(GaussianHalfLaurent.a_power(8)))
        return out

    def tetra_relations(self) -> list[tuple[TorusElement, TorusElement]]:
        """([X X' X''] + A^2, X''^-1 + X - 1) per tetrahedron."""
        out = []
        for t in range(len(self.tri.tetrahedra)):
            u = [0] * self.form.n
            for l in range(3):
                u[3 * t + l] = 1
            tri_rel = self.weyl(u) + self.scalar(GaussianHalfLaurent.a_power(4))
            three = (
                self.generator(t, 2, -1)
                + self.generator(t, 0)
                - self.one()
            )
            out.append((tri_rel, three))
        return out


def iota(reg: GeneratorRegistry, qgm: QgmTorus, el: TorusElement) -> TorusElement:
    """Substitute X = -x^2 on representative edges, monomial by monomial.

    Monomials are read in normal order (tetrahedron-major, label-minor), so
    the image of a normal-ordered product is the ordered product of the
    images.
    """
    out = reg.zero()
    for u, c in el.terms.items():
        term = TorusElement.scalar(reg.form, c)
        for idx, m in enumerate(u):
            if not m:
                continue
            rep = qgm.rep_edges[idx]
            sign = ONE if m % 2 == 0 else -ONE
            term = term * reg.sqrt_param(rep, 2 * m).scale(sign)
        out = out + term
    return out


def iota_inverse(reg: GeneratorRegistry, qgm: QgmTorus, el: TorusElement) -> TorusElement | None:
    """Write ``el`` as an image of iota, or return None.

    Succeeds when every term has even exponents supported on representative
    edges only.
    """
    rep_index = {edge: idx for idx, edge in enumerate(qgm.rep_edges)}
    try:
        cone_terms = reg.cone_exponents(el)
    except ValueError:
        return None
    out_terms: dict[tuple[int, ...], GaussianHalfLaurent] = {}
    for exps, c in cone_terms:
        u = [0] * qgm.form.n
        for edge, m in exps.items():
            if m % 2 or edge not in rep_index:
                return None
            u[rep_index[edge]] = m // 2
        image = iota(reg, qgm, TorusElement.monomial(qgm.form, u))
        ((_, ic),) = image.terms.items()
        out_terms[tuple(u)] = c.div_unit(ic)
    return TorusElement(qgm.form, out_terms)


def check_even(el: TorusElement) -> bool:
    """True iff every generator exponent in every term is even."""
    return all(all(e % 2 == 0 for e in u) for u in el.terms)


# -- classical specialization checks ------------------------------------------------


def classical_check(
    reg: GeneratorRegistry,
    shapes,
    branch_search: bool = False,
) -> dict:
    """Residuals of the relation families at solved shapes, branch-free.

    Edge and triangle relations are checked in squared form (products of
    -Z values), the three-term relations directly.  With ``branch_search``
    a consistent sign assignment for the un-squared square roots is sought
    exhaustively.
    """
    import cmath
    import itertools as it

    tri = reg.tri

    def cone_value(e: BareEdge) -> complex:
        return shapes[e.tetra].value(tri.label(e))

    edge_sq = []
    for ec in tri.edge_classes:
        if not ec.interior:
            continue
        prod = 1 + 0j
        for e in ec.members:
            prod *= -cone_value(e)
        edge_sq.append(abs(prod - (-1) ** ec.valence))
    tri_sq = []
    three = []
    for t, v in tri.vertex_cones():
        cones = [e for _, e in tri.cones_around_vertex(t, v)]
        prod = 1 + 0j
        for e in cones:
            prod *= -cone_value(e)
        tri_sq.append(abs(prod - 1))
        for r in range(3):
            z1 = -cone_value(cones[r])
            z2 = -cone_value(cones[(r + 1) % 3])
            three.append(abs(1 / z1 + z2 + 1))
    report = {
        "max_edge_squared": max(edge_sq, default=0.0),
        "max_triangle_squared": max(tri_sq, default=0.0),
        "max_three_term": max(three, default=0.0),
    }
    if branch_search:
        cones = sorted({g.edge for g in reg.generators})
        roots = {e: cmath.sqrt(-cone_value(e)) for e in cones}
        best = None
        for signs in it.product((1, -1), repeat=len(cones)):
            b = dict(zip(cones, signs))
            worst = 0.0
            for ec in tri.edge_classes:
                if not ec.interior:
                    continue
                prod = 1 + 0j
                for e in ec.members:
                    prod *= b[e] * roots[e]
                worst = max(worst, abs(prod + (1j) ** ec.valence))
            for t, v in tri.vertex_cones():
                prod = 1 + 0j
                for _, e in tri.cones_around_vertex(t, v):
                    prod *= b[e] * roots[e]
                worst = max(worst, abs(prod + 1))
            if best is None or worst < best:
                best = worst
            if best < 1e-9:
                break
        report["branch_search_residual"] = best
    return report
