"""Quantum trace evaluation for links presented through face suspensions.

A link is presented per face suspension as an ordered list of elementary
stated arcs:

* T-arcs connect two edge-cone walls in the same tetra-half, passing the
  corner at their common vertex cone; with endpoint states mu, nu they
  evaluate to A^(-(mu+nu)/2) [x1^mu x2^nu].  A T-arc with both ends on the
  same wall is a cap and evaluates to the scalar delta(mu, -nu) (-A^2)^(mu/2).
* B-arcs connect the two walls over one face edge across the halves, carry
  equal states mu at both ends, and evaluate to (-1)^(-mu/2) x1^mu x2^mu.

The bad-arc rule: a T-arc vanishes when the state on the clockwise-first
wall (seen from the vertex) is -1 and the state on the clockwise-second
wall is +1; clockwise order of two cones at a corner is the cyclic label
order Z -> Z' -> Z''.

States are (+/-1)-valued expressions in shared state variables; the trace
is the sum over all assignments of the global sliding prefactor times the
product of the per-face words (T-arcs first, then B-arcs, in list order).
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import classical
from .classical import Crossing, Shape, Turn3
from .gluing_algebra import (
    GeneratorRegistry,
    Generator,
    RewriteCertificate,
    apply_rewrite,
    cofactor_to_kill,
    lookup_relation,
)
from .qtorus import TorusElement, weyl
from .scalar import GaussianHalfLaurent, GaussianInt, ONE
from .triangulation import BareEdge, Triangulation


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class StateExpr:
    """(+/-1) literal or signed reference to a state variable."""

    sign: int
    var: int | None  # None: literal value ``sign``

    def resolve(self, assignment: Sequence[int]) -> int:
        if self.var is None:
            return self.sign
        return self.sign * assignment[self.var]

    @staticmethod
    def parse(text: str | int) -> "StateExpr":
        if isinstance(text, int):
            if text in (1, -1):
                return StateExpr(text, None)
            raise PresentationError(f"invalid literal state {text}")
        t = text.strip()
        sign = 1
        if t.startswith("-"):
            sign, t = -1, t[1:]
        elif t.startswith("+"):
            t = t[1:]
        if t == "1":
            return StateExpr(sign, None)
        if t.startswith("e"):
            return StateExpr(sign, int(t[1:]) - 1)
        raise PresentationError(f"cannot parse state expression {text!r}")

    def render(self) -> str:
        if self.var is None:
            return "+1" if self.sign > 0 else "-1"
        return ("" if self.sign > 0 else "-") + f"e{self.var + 1}"


@dataclass(frozen=True)
class ElementaryArc:
    kind: str  # "T" or "B"
    face: int
    gens: tuple[Generator, Generator]
    states: tuple[StateExpr, StateExpr]


@dataclass
class LinkPresentation:
    """Stated elementary arcs per face suspensionplus a global prefactor."""

    reg: GeneratorRegistry
    nvars: int
    arcs_by_face: dict[int, list[ElementaryArc]]
    slides: list[tuple[int, int]] = field(default_factory=list)  # (var, sign): (-A^2)^(sign*eps/2)
    const: GaussianHalfLaurent = ONE

    def validate(self):
        faces_of_var: dict[int, set[int]] = {}
        for f, arcs in self.arcs_by_face.items():
            for arc in arcs:
                if arc.kind not in ("T", "B"):
                    raise PresentationError(f"unknown arc kind {arc.kind!r}")
                g1, g2 = arc.gens
                if g1.face != f or g2.face != f:
                    raise PresentationError("arc endpoints must lie on its face suspension")
                if arc.kind == "T" and g1.edge.tetra != g2.edge.tetra:
                    raise PresentationError("T-arcs stay within one tetra-half")
                if arc.kind == "B":
                    if g1.edge.tetra == g2.edge.tetra:
                        raise PresentationError("B-arcs connect the two halves")
                    if arc.states[0] != arc.states[1]:
                        raise PresentationError("B-arc states must agree at both ends")
                for s in arc.states:
                    if s.var is not None:
                        faces_of_var.setdefault(s.var, set()).add(f)
        for v in range(self.nvars):
            if len(faces_of_var.get(v, ())) != 2:
                raise PresentationError(
                    f"state variable e{v + 1} must appear in exactly two face suspensions"
                )


# -- elementary evaluations ----------------------------------------------------


def _corner_clockwise(reg: GeneratorRegistry, g1: Generator, g2: Generator):
    l1 = reg.tri.label(g1.edge)
    l2 = reg.tri.label(g2.edge)
    if (l1 + 1) % 3 == l2:
        return g1, g2
    if (l2 + 1) % 3 == l1:
        return g2, g1
    raise PresentationError(f"walls {g1.name}, {g2.name} do not meet at a corner")


def ev_T(reg: GeneratorRegistry, arc: ElementaryArc, mu: int, nu: int) -> TorusElement:
    """Stated corner arc; zero exactly on bad state patterns."""
    g1, g2 = arc.gens
    if g1.edge == g2.edge:
        # cap on a single wall
        if mu != -nu:
            return reg.zero()
        return TorusElement.scalar(reg.form, GaussianHalfLaurent.from_phase(mu))
    first, second = _corner_clockwise(reg, g1, g2)
    s = {g1.index: mu, g2.index: nu}
    if s[first.index] == -1 and s[second.index] == 1:
        return reg.zero()
    u = [0] * reg.form.n
    u[g1.index] += mu
    u[g2.index] += nu
    return weyl(reg.form, u, GaussianHalfLaurent.a_power(-(mu + nu)))


def ev_B(reg: GeneratorRegistry, arc: ElementaryArc, mu: int) -> TorusElement:
    """Stated through-arc across the two halves: (-1)^(-mu/2) x1^mu x2^mu."""
    g1, g2 = arc.gens
    u = [0] * reg.form.n
    u[g1.index] += mu
    u[g2.index] += mu
    coeff = GaussianHalfLaurent({0: GaussianInt(0, -mu)})  # (-1)^(-mu/2) = -mu * i
    return TorusElement.monomial(reg.form, tuple(u), coeff)


def _arc_value(reg: GeneratorRegistry, arc: ElementaryArc, assignment: Sequence[int]) -> TorusElement:
    s1 = arc.states[0].resolve(assignment)
    s2 = arc.states[1].resolve(assignment)
    if arc.kind == "T":
        return ev_T(reg, arc, s1, s2)
    if s1 != s2:
        raise PresentationError("B-arc states must resolve equal")
    return ev_B(reg, arc, s1)


def _term_for_assignment(lp: LinkPresentation, assignment: Sequence[int]) -> TorusElement:
    reg = lp.reg
    coeff = lp.const
    for var, sign in lp.slides:
        coeff = coeff * GaussianHalfLaurent.from_phase(sign * assignment[var])
    out = TorusElement.scalar(reg.form, coeff)
    for f in sorted(lp.arcs_by_face):
        for arc in lp.arcs_by_face[f]:
            v = _arc_value(reg, arc, assignment)
            if not v:
                return reg.zero()
            out = out * v
    return out


def evaluate_states(lp: LinkPresentation, jobs: int = 1) -> dict[tuple[int, ...], TorusElement]:
    """Nonzero contribution per state assignment."""
    lp.validate()
    assignments = []
    for mask in range(1 << lp.nvars):
        assignments.append(tuple(1 if mask & (1 << i) == 0 else -1 for i in range(lp.nvars)))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            values = list(pool.map(lambda a: _term_for_assignment(lp, a), assignments))
    else:
        values = [_term_for_assignment(lp, a) for a in assignments]
    return {a: v for a, v in zip(assignments, values) if v}


def evaluate(lp: LinkPresentation, jobs: int = 1) -> TorusElement:
    """Sum over all state assignments; the order of accumulation is immaterial."""
    out = lp.reg.zero()
    for v in evaluate_states(lp, jobs=jobs).values():
        out = out + v
    return out


def frame_change(el: TorusElement, k: int) -> TorusElement:
    """Multiply by (-A^3)^k, the effect of k positive half-twist pairs of framing."""
    c = GaussianHalfLaurent({6 * k: GaussianInt(1 if k % 2 == 0 else -1, 0)})
    return el.scale(c)


# -- JSON loading ----------------------------------------------------------------


def load_presentation(reg: GeneratorRegistry, data: dict | str) -> LinkPresentation:
    if isinstance(data, str):
        with open(data) as fh:
            data = json.load(fh)
    face_by_name = {name: i for i, name in enumerate(reg.tri.face_names)}
    arcs_by_face: dict[int, list[ElementaryArc]] = {}
    for fname, arcs in data["arcs"].items():
        f = face_by_name[fname]
        out = []
        for a in arcs:
            (n1, s1), (n2, s2) = a["ends"]
            g1, g2 = reg.by_name(n1), reg.by_name(n2)
            out.append(
                ElementaryArc(a["kind"], f, (g1, g2), (StateExpr.parse(s1), StateExpr.parse(s2)))
            )
        arcs_by_face[f] = out
    pref = data.get("prefactor", {})
    slides = [(int(v[1:]) - 1 if isinstance(v, str) else int(v) - 1, s) for v, s in pref.get("slides", [])]
    const = GaussianHalfLaurent.parse(pref.get("const", "1"))
    lp = LinkPresentation(reg, int(data["state_vars"]), arcs_by_face, slides, const)
    lp.validate()
    return lp


def load_turns(tri: Triangulation, data: dict | str) -> list[list[tuple[Crossing, int | None]]]:
    """Turn sequences: per component a list of (crossing, face entered after it)."""
    if isinstance(data, str):
        with open(data) as fh:
            data = json.load(fh)
    face_by_name = {name: i for i, name in enumerate(tri.face_names)}
    comps = []
    for comp in data["components"]:
        out = []
        for c in comp:
            edge = BareEdge(int(c["tetra"]), tuple(sorted(int(v) for v in c["vertices"])))
            face = face_by_name[c["face"]] if "face" in c else None
            out.append((Crossing(edge, Turn3[c["turn"]]), face))
        comps.append(out)
    return comps


# -- turn-sequence compiler --------------------------------------------------------


def _b_partner(reg: GeneratorRegistry, face: int, edge: BareEdge) -> BareEdge:
    """The wall paired with (face, edge) across the face (the other half's cone)."""
    tri = reg.tri
    members = tri.face_classes[face]
    for (t, f) in members:
        if t == edge.tetra and f not in edge.pair:
            tet = tri.tetrahedra[t]
            p = tet.gluings[f]
            if p is None:
                raise PresentationError("cannot cross a boundary face")
            return BareEdge(tet.neighbors[f], tuple(sorted((p[edge.pair[0]], p[edge.pair[1]]))))
    raise PresentationError(f"cone {edge} is not a wall of face {face}")


def compile_turns(
    reg: GeneratorRegistry,
    components: Sequence[Sequence[tuple[Crossing, int | None]]],
) -> LinkPresentation:
    """Compile cyclic turn sequences into a stated arc presentation.

    Consecutive crossings share a face suspension; where the two cones
    bound more than one common face the segment's face must be given
    explicitly.  Every segment between crossings becomes one T-arc (turns
    within a half, or a cap for U-turns) or a B-arc plus a T-arc with a
    sliding factor (turns across the halves).

    Parallel components stack: crossing a wall flips which strand sits on
    top, so T-arc blocks of distinct components are emitted in reverse
    component order on even-parity segments and in order on odd ones.
    """
    tri = reg.tri
    nvars = sum(len(c) for c in components)
    t_arcs: dict[int, list[tuple[int, list[ElementaryArc]]]] = {}
    b_arcs: dict[int, list[list[ElementaryArc]]] = {}
    face_parity: dict[int, int] = {}
    slides: list[tuple[int, int]] = []
    base = 0
    for ci, comp in enumerate(components):
        k = len(comp)
        comp_t: dict[int, list[ElementaryArc]] = {}
        comp_b: dict[int, list[ElementaryArc]] = {}
        for i, (crossing, face) in enumerate(comp):
            var_in = base + i
            var_out = base + (i + 1) % k
            nxt = comp[(i + 1) % k][0]
            common = set(tri.adjacent_face_classes(crossing.edge)) & set(
                tri.adjacent_face_classes(nxt.edge)
            )
            if face is None:
                if len(common) != 1:
                    raise PresentationError(
                        "segment face is ambiguous; specify it on the crossing"
                    )
                face = common.pop()
            elif face not in common:
                raise PresentationError("given face does not contain both crossings")
            face_parity.setdefault(face, i % 2)
            g_in = reg.generator(face, crossing.edge)
            g_out = reg.generator(face, nxt.edge)
            e_in = StateExpr(1, var_in)
            e_out = StateExpr(1, var_out)
            if crossing.edge == nxt.edge and crossing.turn == Turn3.U:
                comp_t.setdefault(face, []).append(
                    ElementaryArc("T", face, (g_in, g_out), (e_in, e_out))
                )
            elif not crossing.turn.crosses_halves:
                if g_in.edge.tetra != g_out.edge.tetra:
                    raise PresentationError("turn type stays in a half but cones do not")
                comp_t.setdefault(face, []).append(
                    ElementaryArc("T", face, (g_in, g_out), (e_in, e_out))
                )
            else:
                if g_in.edge.tetra == g_out.edge.tetra:
                    raise PresentationError("across turn needs cones in different halves")
                partner = reg.generator(face, _b_partner(reg, face, crossing.edge))
                comp_b.setdefault(face, []).append(
                    ElementaryArc("B", face, (g_in, partner), (e_in, e_in))
                )
                comp_t.setdefault(face, []).append(
                    ElementaryArc("T", face, (partner, g_out), (StateExpr(-1, var_in), e_out))
                )
                slides.append((var_in, -1))
        for f, arcs in comp_t.items():
            t_arcs.setdefault(f, []).append((ci, arcs))
        for f, arcs in comp_b.items():
            b_arcs.setdefault(f, []).append(arcs)
        base += k
    arcs_by_face: dict[int, list[ElementaryArc]] = {}
    for f in set(t_arcs) | set(b_arcs):
        blocks = t_arcs.get(f, [])
        if face_parity.get(f, 0) == 0:
            blocks = sorted(blocks, key=lambda b: -b[0])
        else:
            blocks = sorted(blocks, key=lambda b: b[0])
        tlist: list[ElementaryArc] = []
        for _, block in blocks:
            tlist.extend(block)
        blist: list[ElementaryArc] = []
        for block in b_arcs.get(f, []):
            blist.extend(block)
        arcs_by_face[f] = tlist + blist
    lp = LinkPresentation(reg, nvars, arcs_by_face, slides)
    lp.validate()
    return lp


# -- scripted reduction --------------------------------------------------------------


def reduce_with_script(
    reg: GeneratorRegistry,
    el: TorusElement,
    script: Sequence[dict] | str,
) -> tuple[TorusElement, list[RewriteCertificate]]:
    """Apply a list of certified rewrite steps.

    Each step names a relation and either an explicit monomial cofactor or a
    (kill, using) pair of exponent vectors from which the cofactor is derived
    so that the ``kill`` term of the running element is cancelled against the
    ``using`` term of the relation.
    """
    if isinstance(script, str):
        with open(script) as fh:
            script = json.load(fh)["steps"]
    name_to_idx = {name: i for i, name in enumerate(reg.names)}

    def exps_from(d: dict) -> tuple[int, ...]:
        u = [0] * reg.form.n
        for name, e in d.items():
            u[name_to_idx[name]] = int(e)
        return tuple(u)

    certs = []
    cur = el
    for step in script:
        relation, side = lookup_relation(reg, step["relation"])
        if "cofactor" in step:
            cof = TorusElement.monomial(
                reg.form,
                exps_from(step["cofactor"].get("exps", {})),
                GaussianHalfLaurent.parse(step["cofactor"].get("coeff", "1")),
            )
        else:
            cof = cofactor_to_kill(
                cur, relation, side, exps_from(step["kill"]), exps_from(step["using"])
            )
        cur, cert = apply_rewrite(cur, relation, side, cof, step["relation"])
        certs.append(cert)
    return cur, certs


# -- classical shadow -----------------------------------------------------------------


def classical_shadow(
    reg: GeneratorRegistry,
    el: TorusElement,
    shapes: Sequence[Shape],
    branch: dict[BareEdge, int] | None = None,
) -> complex:
    """Specialize A^(1/2) -> 1 and x_e -> branch_e * (-Z_e)^(1/2).

    The element must lie in the span of square-root shape parameter
    monomials; the branch defaults to +1 on every cone.
    """
    import cmath

    tri = reg.tri
    total = 0j
    for exps, c in reg.cone_exponents(el):
        val = c.eval(1)
        for edge, m in exps.items():
            b = 1 if branch is None else branch.get(edge, 1)
            val *= (b * cmath.sqrt(-shapes[edge.tetra].value(tri.label(edge)))) ** m
        total += val
    return total


def shadow_matches_classical(
    reg: GeneratorRegistry,
    el: TorusElement,
    shapes: Sequence[Shape],
    components: Sequence[Sequence[Crossing]],
    tol: float = 1e-6,
) -> tuple[bool, float]:
    """Search branch signs on the crossed cones for a match up to global sign.

    Returns (found, best deviation); the search space is 2^(number of
    crossed cones), capped at 2^12.
    """
    import itertools as it

    target = classical.classical_trace(reg.tri, shapes, components)
    cones = sorted({g.edge for g in reg.generators})
    crossed = sorted({c.edge for comp in components for c in comp}) or cones
    if len(crossed) > 12:
        raise ValueError("branch search space too large")
    best = None
    for signs in it.product((1, -1), repeat=len(crossed)):
        branch = dict(zip(crossed, signs))
        val = classical_shadow(reg, el, shapes, branch)
        dev = min(abs(val - target), abs(val + target))
        if best is None or dev < best:
            best = dev
        if best <= tol:
            return True, best
    return best is not None and best <= tol, best if best is not None else float("inf")
