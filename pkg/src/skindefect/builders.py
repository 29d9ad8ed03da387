"""The two concrete models: a Hatano-Nelson chain with next-nearest-neighbour
hoppings and a non-reciprocal SSH chain, each with a single defect site.

Conventional 1-based site labels are used for ``defect_site``; everything
returned is 0-based.  Hopping pairs are written ``(forward, backward)``:
``forward`` moves a particle to the higher site index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

import numpy as np

from .errors import SpecificationError
from .lattice import Hopping, LatticeSpec

HN_DEFECT_FIELDS = ("t1p", "t2p", "t1pp", "t2pp", "t3p", "t4p", "t3pp", "t4pp")
SSH_DEFECT_FIELDS = ("t0p", "t1pp", "t2pp", "t3pp", "t4pp")


@dataclass(frozen=True)
class HnParams:
    """Hatano-Nelson chain with NNN hoppings and one defect.

    ``t1``/``t2`` are the forward/backward NN hoppings, ``t3``/``t4`` the
    NNN ones.  Primed fields (``*p``) act on the left of the defect,
    double-primed (``*pp``) on the right.  A defect field left as ``None``
    takes its bulk value.
    """

    t1: complex
    t2: complex
    t3: complex
    t4: complex
    n_sites: int
    defect_site: int | None = None
    t1p: complex | None = None
    t2p: complex | None = None
    t1pp: complex | None = None
    t2pp: complex | None = None
    t3p: complex | None = None
    t4p: complex | None = None
    t3pp: complex | None = None
    t4pp: complex | None = None

    def __post_init__(self):
        if self.defect_site is None:
            object.__setattr__(self, "defect_site", self.n_sites // 2)
        bulk = {"t1p": self.t1, "t2p": self.t2, "t1pp": self.t1, "t2pp": self.t2,
                "t3p": self.t3, "t4p": self.t4, "t3pp": self.t3, "t4pp": self.t4}
        for name, value in bulk.items():
            if getattr(self, name) is None:
                object.__setattr__(self, name, value)
        check_hn(self)

    @property
    def defect_index(self) -> int:
        return self.defect_site - 1


def check_hn(p: HnParams) -> None:
    if not isinstance(p.n_sites, int) or p.n_sites < 7:
        raise SpecificationError(f"HN chain needs n_sites >= 7, got {p.n_sites!r}")
    if not 2 < p.defect_site < p.n_sites - 2:
        raise SpecificationError(
            f"defect_site {p.defect_site} must lie strictly between 2 and N-2={p.n_sites - 2}")
    for f in fields(p):
        v = getattr(p, f.name)
        if f.name.startswith("t") and not _finite(v):
            raise SpecificationError(f"{f.name} is not finite")


def hn_strong_defect(t1, t2, t3, t4, n_sites, defect_site=None) -> HnParams:
    """Defect site that only receives amplitude: all hops out of it vanish."""
    return HnParams(t1, t2, t3, t4, n_sites, defect_site,
                    t1p=t1, t2p=0.0, t1pp=0.0, t2pp=t2,
                    t3p=t3, t4p=0.0, t3pp=0.0, t4pp=t4)


def build_hn(params: HnParams, with_defect: bool = True) -> LatticeSpec:
    p = params
    n = p.n_sites
    d = p.defect_index
    nn = {i: (p.t1, p.t2) for i in range(n - 1)}
    nnn = {i: (p.t3, p.t4) for i in range(n - 2)}
    if with_defect:
        nn[d - 1] = (p.t1p, p.t2p)
        nn[d] = (p.t1pp, p.t2pp)
        nnn[d - 2] = (p.t3p, p.t4p)
        nnn[d - 1] = (p.t3, p.t4)
        nnn[d] = (p.t3pp, p.t4pp)
    hops = []
    for i, (fw, bw) in nn.items():
        hops += [Hopping(i, i + 1, fw), Hopping(i + 1, i, bw)]
    for i, (fw, bw) in nnn.items():
        hops += [Hopping(i, i + 2, fw), Hopping(i + 2, i, bw)]
    hops += [
        Hopping(n - 1, 0, p.t1, True), Hopping(0, n - 1, p.t2, True),
        Hopping(n - 2, 0, p.t3, True), Hopping(0, n - 2, p.t4, True),
        Hopping(n - 1, 1, p.t3, True), Hopping(1, n - 1, p.t4, True),
    ]
    return LatticeSpec(n, tuple(hops))


@dataclass(frozen=True)
class SshParams:
    """Non-reciprocal SSH chain, ``n_cells_left`` + defect + ``n_cells_right``.

    Intracell hops are ``t1 = t + e^gamma`` (A->B) and ``t2 = t + e^-gamma``
    (B->A); same-sublattice intercell hops copy them (``t3 = t1`` forward,
    ``t4 = t2`` backward).  ``t0`` is the reciprocal B->A intercell bond.
    The defect couplings default to the strong (fully cut) defect.
    """

    t: float
    gamma: float
    n_cells_left: int
    n_cells_right: int
    t0: float = 1.0
    t0p: float = 0.0
    t1pp: complex = 0.0
    t2pp: complex = 0.0
    t3pp: complex = 0.0
    t4pp: complex = 0.0
    p: float | None = None

    def __post_init__(self):
        for name in ("n_cells_left", "n_cells_right"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise SpecificationError(f"{name} must be a positive integer, got {v!r}")
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name.startswith(("t", "gamma")) and not _finite(v):
                raise SpecificationError(f"{f.name} is not finite")
        if self.p is not None and not 0.0 <= self.p <= 1.0:
            raise SpecificationError(f"defect strength p={self.p} outside [0, 1]")

    @property
    def t1(self) -> float:
        return self.t + math.exp(self.gamma)

    @property
    def t2(self) -> float:
        return self.t + math.exp(-self.gamma)

    @property
    def t3(self) -> float:
        return self.t1

    @property
    def t4(self) -> float:
        return self.t2

    @property
    def n_cells(self) -> int:
        return self.n_cells_left + self.n_cells_right

    def n_sites(self, with_defect: bool = True) -> int:
        return 2 * self.n_cells + int(with_defect)

    @property
    def defect_site(self) -> int:
        return 2 * self.n_cells_left + 1

    @property
    def defect_index(self) -> int:
        return 2 * self.n_cells_left


def apply_defect_strength(params: SshParams, p: float | None = None) -> SshParams:
    """Scale the defect couplings by ``p``: 0 is the cut chain, 1 the bulk pattern."""
    p = params.p if p is None else p
    if p is None or not 0.0 <= p <= 1.0:
        raise SpecificationError(f"defect strength p={p!r} must lie in [0, 1]")
    return replace(params, p=p, t0p=p * params.t0,
                   t1pp=p * params.t3, t3pp=p * params.t3,
                   t2pp=p * params.t4, t4pp=p * params.t4)


def build_ssh(params: SshParams, with_defect: bool = True) -> LatticeSpec:
    p = params
    n = p.n_sites(with_defect)
    t1, t2, t3, t4, t0 = p.t1, p.t2, p.t3, p.t4, p.t0
    hops: list[Hopping] = []

    def branch(first: int, cells: int):
        for c in range(cells):
            a = first + 2 * c
            hops.extend([Hopping(a, a + 1, t1), Hopping(a + 1, a, t2)])
        for c in range(cells - 1):
            a = first + 2 * c
            hops.extend([Hopping(a + 1, a + 2, t0), Hopping(a + 2, a + 1, t0)])
            for s in (a, a + 1):
                hops.extend([Hopping(s, s + 2, t3), Hopping(s + 2, s, t4)])

    if with_defect:
        d = p.defect_index
        branch(0, p.n_cells_left)
        branch(d + 1, p.n_cells_right)
        a_l, b_l, a_r, b_r = d - 2, d - 1, d + 1, d + 2
        hops.extend([
            Hopping(d, b_l, p.t0p), Hopping(b_l, d, p.t0p),
            Hopping(d, a_r, p.t0p), Hopping(a_r, d, p.t0p),
            Hopping(a_l, d, p.t1pp), Hopping(d, a_l, p.t2pp),
            Hopping(d, b_r, p.t3pp), Hopping(b_r, d, p.t4pp),
            Hopping(b_l, a_r, t3), Hopping(a_r, b_l, t4),
        ])
    else:
        branch(0, p.n_cells)
    a_end, b_end = n - 2, n - 1
    hops.extend([
        Hopping(b_end, 0, t0, True), Hopping(0, b_end, t0, True),
        Hopping(a_end, 0, t3, True), Hopping(0, a_end, t4, True),
        Hopping(b_end, 1, t3, True), Hopping(1, b_end, t4, True),
    ])
    return LatticeSpec(n, tuple(hops))


def ssh_bloch(params: SshParams, k) -> np.ndarray:
    """Bloch matrices ``h(k)`` of the defect-free chain, shape ``(len(k), 2, 2)``.

    Convention as in :func:`build_ssh`: ``psi[cell n] = exp(i k n) u``.
    """
    p = params
    k = np.atleast_1d(np.asarray(k, dtype=float))
    e = np.exp(1j * k)
    h = np.empty((len(k), 2, 2), dtype=complex)
    h[:, 0, 0] = h[:, 1, 1] = p.t3 / e + p.t4 * e
    h[:, 0, 1] = p.t2 + p.t0 / e
    h[:, 1, 0] = p.t1 + p.t0 * e
    return h


def _finite(v) -> bool:
    try:
        c = complex(v)
    except TypeError:
        return False
    return math.isfinite(c.real) and math.isfinite(c.imag)
