"""Electrostatic coupling matrices from declarative circuit layouts.

Each connecting wire contributes the rank-1 quadratic form
(g_w/2) * (sum_{i in terminals} x_i)^2 to the coupling energy, i.e. it adds
g_w to every matrix entry G_ij with i, j in its terminal set, diagonal
included. Keeping the diagonal explicit (instead of absorbing it into the
bare frequency) is what reproduces the single-wire spectrum, both two-site
frequency-ratio limits, and keeps every built matrix positive semidefinite.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from .errors import PhysicsDomainError


SYMMETRY_RTOL = 1e-14
PSD_RTOL = 1e-12


@dataclass(frozen=True)
class Wire:
    """A wire capacitively coupling the resonators in ``terminals``."""

    terminals: tuple[int, ...]
    strength: float   # g_w, rad/s

    def __post_init__(self):
        terms = tuple(sorted(self.terminals))
        if len(terms) < 2:
            raise PhysicsDomainError("a wire needs at least two terminals")
        if len(set(terms)) != len(terms):
            raise PhysicsDomainError("wire terminals must be distinct")
        if terms[0] < 0:
            raise PhysicsDomainError("terminal indices must be >= 0")
        if self.strength < 0.0:
            raise PhysicsDomainError("wire strength must be >= 0")
        object.__setattr__(self, "terminals", terms)


class CouplingMatrix:
    """Symmetric N x N electrostatic coupling form G (rad/s entries)."""

    def __init__(self, G: np.ndarray):
        G = np.asarray(G, dtype=float)
        if G.ndim != 2 or G.shape[0] != G.shape[1]:
            raise PhysicsDomainError("coupling matrix must be square")
        scale = np.max(np.abs(G)) if G.size else 0.0
        if scale > 0.0 and np.max(np.abs(G - G.T)) > SYMMETRY_RTOL * scale:
            raise PhysicsDomainError("coupling matrix must be symmetric")
        self.G = 0.5 * (G + G.T)
        self.N = G.shape[0]

    def __add__(self, other: "CouplingMatrix") -> "CouplingMatrix":
        if self.N != other.N:
            raise PhysicsDomainError("size mismatch")
        return CouplingMatrix(self.G + other.G)

    def is_positive_semidefinite(self, rtol: float = PSD_RTOL) -> bool:
        if self.N == 0:
            return True
        mu = np.linalg.eigvalsh(self.G)
        scale = max(abs(mu[0]), abs(mu[-1]), 1e-300)
        return mu[0] >= -rtol * scale


class ChainConvention(Enum):
    PHYSICAL = "physical"
    PAPER_UNIFORM = "paper_uniform"


class Boundary(Enum):
    OPEN = "open"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class Chain:
    """N resonators with neighbors joined by individually isolated wires.

    PHYSICAL keeps the wire-sum diagonal (ends carry g, interior 2g);
    PAPER_UNIFORM forces the uniform diagonal 2g on every site, which is the
    convention behind the closed-form chain spectrum.
    """

    n: int
    g: float
    convention: ChainConvention = ChainConvention.PHYSICAL

    def wires(self) -> list[Wire]:
        return [Wire((i, i + 1), self.g) for i in range(self.n - 1)]


@dataclass(frozen=True)
class SingleWire:
    """All N resonators coupled to one wire, strength g/(N-1) per pair."""

    n: int
    g: float

    def wires(self) -> list[Wire]:
        if self.n < 2:
            return []
        return [Wire(tuple(range(self.n)), self.g / (self.n - 1))]


@dataclass(frozen=True)
class TwoRegister:
    """Two single-wire registers bridged by a switchable wire.

    The bridge joins the last site of register A to the first site of
    register B with strength switch_factor * g.
    """

    n1: int
    n2: int
    g: float
    switch_factor: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.switch_factor <= 1.0:
            raise PhysicsDomainError("switch_factor must be in [0, 1]")

    def wires(self) -> list[Wire]:
        ws: list[Wire] = []
        if self.n1 >= 2:
            ws.append(Wire(tuple(range(self.n1)), self.g / (self.n1 - 1)))
        if self.n2 >= 2:
            ws.append(Wire(tuple(range(self.n1, self.n1 + self.n2)),
                           self.g / (self.n2 - 1)))
        if self.switch_factor > 0.0:
            ws.append(Wire((self.n1 - 1, self.n1), self.switch_factor * self.g))
        return ws


@dataclass(frozen=True)
class Lattice2D:
    """Lx x Ly lattice with nearest-neighbor wires of strength g."""

    lx: int
    ly: int
    g: float
    boundary: Boundary = Boundary.OPEN

    def site(self, ix: int, iy: int) -> int:
        return ix * self.ly + iy

    def wires(self) -> list[Wire]:
        ws: list[Wire] = []
        periodic = self.boundary is Boundary.PERIODIC
        for ix in range(self.lx):
            for iy in range(self.ly):
                a = self.site(ix, iy)
                if ix + 1 < self.lx:
                    ws.append(Wire((a, self.site(ix + 1, iy)), self.g))
                elif periodic and self.lx > 2:
                    ws.append(Wire((a, self.site(0, iy)), self.g))
                if iy + 1 < self.ly:
                    ws.append(Wire((a, self.site(ix, iy + 1)), self.g))
                elif periodic and self.ly > 2:
                    ws.append(Wire((a, self.site(ix, 0)), self.g))
        return ws


@dataclass(frozen=True)
class Custom:
    """Explicit symmetric coupling matrix, rad/s."""

    matrix: np.ndarray

    def wires(self) -> list[Wire]:
        raise PhysicsDomainError("custom layouts carry no wire decomposition")


Layout = Union[Chain, SingleWire, TwoRegister, Lattice2D, Custom]


def layout_size(layout: Layout) -> int:
    if isinstance(layout, Chain) or isinstance(layout, SingleWire):
        return layout.n
    if isinstance(layout, TwoRegister):
        return layout.n1 + layout.n2
    if isinstance(layout, Lattice2D):
        return layout.lx * layout.ly
    if isinstance(layout, Custom):
        return np.asarray(layout.matrix).shape[0]
    raise PhysicsDomainError(f"unknown layout {layout!r}")


def wire_quadratic_form(wire: Wire, n: int) -> CouplingMatrix:
    """Matrix entries of one wire's form (g_w/2)(sum_i x_i)^2."""
    if wire.terminals[-1] >= n:
        raise PhysicsDomainError(
            f"terminal {wire.terminals[-1]} out of range for N={n}")
    G = np.zeros((n, n))
    idx = np.asarray(wire.terminals)
    G[np.ix_(idx, idx)] = wire.strength
    return CouplingMatrix(G)


def build_coupling_matrix(layout: Layout) -> CouplingMatrix:
    """Sum the per-wire forms of a layout (or validate a custom matrix)."""
    n = layout_size(layout)
    if n < 1:
        raise PhysicsDomainError("layout must contain at least one resonator")
    if isinstance(layout, Custom):
        return CouplingMatrix(np.asarray(layout.matrix, dtype=float))
    G = np.zeros((n, n))
    for wire in layout.wires():
        idx = np.asarray(wire.terminals)
        G[np.ix_(idx, idx)] += wire.strength
    if isinstance(layout, Chain) and layout.convention is ChainConvention.PAPER_UNIFORM:
        np.fill_diagonal(G, 2.0 * layout.g)
    return CouplingMatrix(G)


def switch_factor_from_voltage(U_c: float, U: float) -> float:
    """Quasi-static switch setting s = (1 - U_c/U)^2.

    Endpoints follow the switch physics (full coupling at U_c = 0, none at
    U_c = U); the quadratic interpolation in between reflects the coupling
    energy being quadratic in the net effective voltage.
    """
    if U <= 0.0:
        raise PhysicsDomainError("bias voltage U must be positive")
    if not 0.0 <= U_c <= U:
        raise PhysicsDomainError("control voltage must satisfy 0 <= U_c <= U")
    return (1.0 - U_c / U) ** 2
