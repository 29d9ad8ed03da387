"""Reference parameter sets used by the configs, tests and benchmarks."""
from __future__ import annotations

from .builders import HnParams, SshParams, apply_defect_strength, hn_strong_defect

# NHSE-dominated HN chain with NNN hops
HN_HOPPINGS = (1.0, 0.6, 1.0, 0.75)

# intercell hopping of the SSH chain; the two values are discussed in the README
T0_CLEAN = 0.85
T0_DEFECT = 1.0


def hn_reference(n_sites: int = 50, t4: float = 0.75) -> HnParams:
    t1, t2, t3, _ = HN_HOPPINGS
    return hn_strong_defect(t1, t2, t3, t4, n_sites, n_sites // 2)


def ssh_clean(t: float = -1.0, gamma: float = 0.2, t0: float = T0_CLEAN) -> SshParams:
    """Ten-cell chain; build it with ``with_defect=False``."""
    return SshParams(t=t, gamma=gamma, n_cells_left=5, n_cells_right=5, t0=t0)


def ssh_reference(gamma: float = 0.4, p: float | None = None, t0: float = T0_DEFECT) -> SshParams:
    """101 sites, defect on site 51; strong defect unless ``p`` is given."""
    base = SshParams(t=-1.0, gamma=gamma, n_cells_left=25, n_cells_right=25, t0=t0)
    return base if p is None else apply_defect_strength(base, p)
