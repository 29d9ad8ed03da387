"""Small lattices shared by the unit tests."""
from skindefect.lattice import Hopping, LatticeSpec


def hn_ring(n: int, right: complex = 1.0, left: complex = 0.6) -> LatticeSpec:
    """Nearest-neighbour Hatano-Nelson ring; the Bloch curve is ``right e^-ik + left e^ik``."""
    hops = []
    for i in range(n - 1):
        hops += [Hopping(i, i + 1, right), Hopping(i + 1, i, left)]
    hops += [Hopping(n - 1, 0, right, True), Hopping(0, n - 1, left, True)]
    return LatticeSpec(n, tuple(hops))
