"""Numerical classical layer.

Solves the shape-parameter gluing equations with a damped Newton
iteration, builds PSL(2,C) (and PSL(2,R)) holonomy matrices from turn
sequences, and evaluates the classical trace both as a matrix product and
as a state sum over edge(-cone) crossings.

The square-root branch is the principal one throughout: (-Z)^(1/2) has
its cut on the negative real axis.  Holonomies are only defined up to
conjugation and traces up to sign, so every comparison made here is
modulo sign; the state sum, however, equals the trace of the specific
matrix product below exactly.
"""

from __future__ import annotations

import cmath
import enum
import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .triangulation import BareEdge, Triangulation

TOL_RESIDUAL = 1e-12
MAX_ITER = 100


class Turn3(enum.Enum):
    """Ways a curve can leave a face suspension after entering across an edge cone."""

    LEFT = 0
    RIGHT = 1
    U = 2
    ACROSS_LEFT = 3
    ACROSS_RIGHT = 4
    ACROSS_DOWN = 5

    @property
    def crosses_halves(self) -> bool:
        return self in (Turn3.ACROSS_LEFT, Turn3.ACROSS_RIGHT, Turn3.ACROSS_DOWN)


class Turn2(enum.Enum):
    LEFT = 0
    RIGHT = 1
    U = 2


_I = 1j

_TURN3_MATRICES = {
    Turn3.LEFT: np.array([[1, 1], [0, 1]], dtype=complex),
    Turn3.RIGHT: np.array([[1, 0], [1, 1]], dtype=complex),
    Turn3.U: np.array([[0, 1], [-1, 0]], dtype=complex),
    Turn3.ACROSS_LEFT: np.array([[_I, _I], [_I, 0]], dtype=complex),
    Turn3.ACROSS_RIGHT: np.array([[0, _I], [_I, _I]], dtype=complex),
    Turn3.ACROSS_DOWN: np.array([[-_I, 0], [0, _I]], dtype=complex),
}

_TURN2_MATRICES = {
    Turn2.LEFT: np.array([[1, 1], [0, 1]], dtype=complex),
    Turn2.RIGHT: np.array([[1, 0], [1, 1]], dtype=complex),
    Turn2.U: np.array([[0, 1], [-1, 0]], dtype=complex),
}


def turn_matrix(t: Turn3) -> np.ndarray:
    return _TURN3_MATRICES[t].copy()


def turn_matrix_2d(t: Turn2) -> np.ndarray:
    return _TURN2_MATRICES[t].copy()


def shear_matrix(z: complex) -> np.ndarray:
    """S(Z) = diag((-Z)^(1/2), (-Z)^(-1/2)), principal branch."""
    if z == 0:
        raise ZeroDivisionError("shape parameter 0 gives a singular shear matrix")
    r = cmath.sqrt(-z)
    return np.array([[r, 0], [0, 1 / r]], dtype=complex)


def shear_matrix_2d(x: float) -> np.ndarray:
    if x <= 0:
        raise ValueError("2d shear parameters must be positive")
    r = x**0.5
    return np.array([[r, 0], [0, 1 / r]], dtype=complex)


def holonomy(seq: Sequence[tuple[complex, Turn3]]) -> np.ndarray:
    """Ordered product S(Z_1) M_1 ... S(Z_k) M_k."""
    if not seq:
        raise ValueError("empty turn sequence")
    out = np.eye(2, dtype=complex)
    for z, t in seq:
        out = out @ shear_matrix(z) @ _TURN3_MATRICES[t]
    return out


def holonomy_2d(seq: Sequence[tuple[float, Turn2]]) -> np.ndarray:
    if not seq:
        raise ValueError("empty turn sequence")
    out = np.eye(2, dtype=complex)
    for x, t in seq:
        out = out @ shear_matrix_2d(x) @ _TURN2_MATRICES[t]
    return out


def _state_sum(shears: list[np.ndarray], mats: list[np.ndarray]) -> complex:
    k = len(mats)
    total = 0j
    for signs in itertools.product((0, 1), repeat=k):  # 0 = state +1, 1 = state -1
        term = 1 + 0j
        for i in range(k):
            si, sj = signs[i], signs[(i + 1) % k]
            term *= shears[i][si, si] * mats[i][si, sj]
        total += term
    return total


def trace_state_sum(seq: Sequence[tuple[complex, Turn3]]) -> complex:
    """Sum over states of prod m_i^(s_i s_{i+1}) (-Z_i)^(s_i/2), cyclic indices."""
    if not seq:
        raise ValueError("empty turn sequence")
    return _state_sum([shear_matrix(z) for z, _ in seq], [_TURN3_MATRICES[t] for _, t in seq])


def trace_state_sum_2d(seq: Sequence[tuple[float, Turn2]]) -> complex:
    if not seq:
        raise ValueError("empty turn sequence")
    return _state_sum([shear_matrix_2d(x) for x, _ in seq], [_TURN2_MATRICES[t] for _, t in seq])


# -- shape parameters --------------------------------------------------------


@dataclass(frozen=True)
class Shape:
    """Shape parameter of an ideal tetrahedron and its two companions."""

    z: complex

    @property
    def zp(self) -> complex:
        return (self.z - 1) / self.z

    @property
    def zpp(self) -> complex:
        return 1 / (1 - self.z)

    def value(self, label: int) -> complex:
        return (self.z, self.zp, self.zpp)[label]

    def max_identity_residual(self) -> float:
        z, zp, zpp = self.z, self.zp, self.zpp
        return max(
            abs(z * zp * zpp + 1),
            abs(1 / zpp + z - 1),
            abs(1 / z + zp - 1),
            abs(1 / zp + zpp - 1),
        )


class GluingSolveError(RuntimeError):
    pass


def _residuals(tri: Triangulation, zs: np.ndarray) -> np.ndarray:
    rows = []
    for ec in tri.edge_classes:
        if not ec.interior:
            continue
        total = 0j
        for e in ec.members:
            total += cmath.log(Shape(zs[e.tetra]).value(tri.label(e)))
        rows.append(total - 2j * cmath.pi)
    return np.array(rows, dtype=complex)


def _jacobian(tri: Triangulation, zs: np.ndarray) -> np.ndarray:
    rows = []
    for ec in tri.edge_classes:
        if not ec.interior:
            continue
        row = np.zeros(len(zs), dtype=complex)
        for e in ec.members:
            z = zs[e.tetra]
            lab = tri.label(e)
            if lab == 0:
                row[e.tetra] += 1 / z
            elif lab == 1:
                row[e.tetra] += 1 / (z - 1) - 1 / z
            else:
                row[e.tetra] += 1 / (1 - z)
        rows.append(row)
    return np.array(rows, dtype=complex)


def solve_gluing(tri: Triangulation, guess: Sequence[complex] | None = None) -> list[Shape]:
    """Solve the edge gluing equations by damped Newton least squares.

    The system carries one redundancy per cusp, so the Newton step is the
    minimum-norm least-squares solution.  Raises GluingSolveError if the
    residual does not reach 1e-12 within 100 iterations.
    """
    n = len(tri.tetrahedra)
    if guess is None:
        guess = [complex(0, 1)] * n
    zs = np.array(guess, dtype=complex)
    if np.any(zs.imag <= 0):
        raise ValueError("initial shapes must have positive imaginary part")
    if not any(ec.interior for ec in tri.edge_classes):
        return [Shape(z) for z in zs]

    res = _residuals(tri, zs)
    for _ in range(MAX_ITER):
        if np.max(np.abs(res)) < TOL_RESIDUAL:
            break
        jac = _jacobian(tri, zs)
        if not np.all(np.isfinite(jac)):
            raise GluingSolveError("degenerate Jacobian")
        step, *_ = np.linalg.lstsq(jac, -res, rcond=None)
        lam = 1.0
        for _ in range(30):
            cand = zs + lam * step
            if np.all(cand.imag > 0) and not np.any(np.isclose(cand, 0) | np.isclose(cand, 1)):
                cand_res = _residuals(tri, cand)
                if np.max(np.abs(cand_res)) < np.max(np.abs(res)):
                    zs, res = cand, cand_res
                    break
            lam /= 2
        else:
            raise GluingSolveError("Newton step failed to reduce the residual")
    else:
        raise GluingSolveError("gluing equations did not converge")
    return [Shape(z) for z in zs]


def edge_residuals(tri: Triangulation, shapes: Sequence[Shape]) -> list[float]:
    zs = np.array([s.z for s in shapes], dtype=complex)
    return [abs(r) for r in _residuals(tri, zs)]


# -- turn sequences over a triangulation --------------------------------------


@dataclass(frozen=True)
class Crossing:
    """One transverse intersection of a curve with an edge cone."""

    edge: BareEdge
    turn: Turn3


def component_values(tri: Triangulation, shapes: Sequence[Shape], comp: Sequence[Crossing]) -> list[tuple[complex, Turn3]]:
    return [(shapes[c.edge.tetra].value(tri.label(c.edge)), c.turn) for c in comp]


def classical_trace(tri: Triangulation, shapes: Sequence[Shape], components: Sequence[Sequence[Crossing]]) -> complex:
    """Product over components of the holonomy trace (framed links multiply)."""
    total = 1 + 0j
    for comp in components:
        total *= complex(np.trace(holonomy(component_values(tri, shapes, comp))))
    return total
