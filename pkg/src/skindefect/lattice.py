"""Finite 1D tight-binding lattices with directed complex hoppings.

Matrix convention: element ``H[to, from]`` holds the amplitude of the hop
``from -> to``, so right eigenvectors are the site amplitudes.  Bonds that
close the ring carry ``wraps=True``; under a twisted boundary with angle
``phi`` they pick up ``exp(+i phi)`` when ``to > from`` and ``exp(-i phi)``
otherwise, i.e. the Bloch condition ``psi[n + N] = exp(i phi) psi[n]``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import SpecificationError


class Hopping(NamedTuple):
    from_site: int
    to_site: int
    amplitude: complex
    wraps: bool = False


@dataclass(frozen=True)
class LatticeSpec:
    n_sites: int
    hoppings: tuple[Hopping, ...]
    onsite: tuple[tuple[int, complex], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "hoppings", tuple(Hopping(*h) for h in self.hoppings))
        if self.onsite is not None:
            object.__setattr__(self, "onsite", tuple((int(s), complex(e)) for s, e in self.onsite))

    @cached_property
    def _arrays(self):
        check(self)
        n = len(self.hoppings)
        src = np.fromiter((h.from_site for h in self.hoppings), dtype=np.intp, count=n)
        dst = np.fromiter((h.to_site for h in self.hoppings), dtype=np.intp, count=n)
        amp = np.fromiter((h.amplitude for h in self.hoppings), dtype=complex, count=n)
        wraps = np.fromiter((bool(h.wraps) for h in self.hoppings), dtype=bool, count=n)
        return src, dst, amp, wraps

    @property
    def has_wraps(self) -> bool:
        return any(h.wraps for h in self.hoppings)

    def without_wraps(self) -> "LatticeSpec":
        return LatticeSpec(self.n_sites, tuple(h for h in self.hoppings if not h.wraps), self.onsite)

    def scaled(self, factor: complex) -> "LatticeSpec":
        hops = tuple(h._replace(amplitude=h.amplitude * factor) for h in self.hoppings)
        onsite = None if self.onsite is None else tuple((s, e * factor) for s, e in self.onsite)
        return LatticeSpec(self.n_sites, hops, onsite)


@dataclass(frozen=True)
class BoundaryCondition:
    """``kind`` is ``"open"`` or ``"twisted"``; periodic is ``twisted(0)``."""

    kind: str = "open"
    phi: float = 0.0

    def __post_init__(self):
        if self.kind not in ("open", "twisted"):
            raise SpecificationError(f"unknown boundary kind {self.kind!r}")
        if not math.isfinite(self.phi):
            raise SpecificationError("twist angle must be finite")


OPEN = BoundaryCondition("open")
PERIODIC = BoundaryCondition("twisted", 0.0)


def twisted(phi: float) -> BoundaryCondition:
    return BoundaryCondition("twisted", float(phi))


def validate(spec: LatticeSpec) -> list[str]:
    """Return one human-readable diagnostic per violated invariant."""
    out = []
    n = spec.n_sites
    if not isinstance(n, (int, np.integer)) or n < 1:
        return [f"n_sites must be a positive integer, got {n!r}"]
    seen = set()
    for k, h in enumerate(spec.hoppings):
        a, b = h.from_site, h.to_site
        bad = [s for s in (a, b) if not 0 <= s < n]
        if bad:
            out.append(f"hopping {k}: site index {bad[0]} out of range [0, {n}) in ({a}->{b})")
            continue
        if (a, b) in seen:
            out.append(f"hopping {k}: duplicate bond ({a}->{b})")
        seen.add((a, b))
        if not cmath.isfinite(complex(h.amplitude)):
            out.append(f"hopping {k}: non-finite amplitude on ({a}->{b})")
        if h.wraps and not abs(a - b) > n / 2:
            out.append(f"hopping {k}: wrap bond ({a}->{b}) does not cross the chain end")
    for site, energy in spec.onsite or ():
        if not 0 <= site < n:
            out.append(f"onsite: site index {site} out of range [0, {n})")
        elif not cmath.isfinite(energy):
            out.append(f"onsite: non-finite energy on site {site}")
    return out


def check(spec: LatticeSpec) -> None:
    problems = validate(spec)
    if problems:
        raise SpecificationError("; ".join(problems))


def assemble(spec: LatticeSpec, bc: BoundaryCondition = OPEN) -> np.ndarray:
    src, dst, amp, wraps = spec._arrays
    H = np.zeros((spec.n_sites, spec.n_sites), dtype=complex)
    if bc.kind == "open":
        keep = ~wraps
        H[dst[keep], src[keep]] = amp[keep]
    else:
        phase = np.ones(len(amp), dtype=complex)
        phase[wraps] = np.exp(1j * bc.phi * np.sign(dst[wraps] - src[wraps]))
        H[dst, src] = amp * phase
    for site, energy in spec.onsite or ():
        H[site, site] += energy
    return H


def interleave(a: LatticeSpec, b: LatticeSpec) -> LatticeSpec:
    """Decoupled union of two equal-size lattices on even/odd sites.

    Interleaving keeps every wrap bond long enough to satisfy the wrap
    invariant; it is a permutation similarity of the block-diagonal sum.
    """
    if a.n_sites != b.n_sites:
        raise SpecificationError("interleave needs lattices of equal size")
    hops = [h._replace(from_site=2 * h.from_site, to_site=2 * h.to_site) for h in a.hoppings]
    hops += [h._replace(from_site=2 * h.from_site + 1, to_site=2 * h.to_site + 1) for h in b.hoppings]
    onsite = [(2 * s, e) for s, e in a.onsite or ()] + [(2 * s + 1, e) for s, e in b.onsite or ()]
    return LatticeSpec(2 * a.n_sites, tuple(hops), tuple(onsite) or None)
