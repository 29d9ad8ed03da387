"""Skin effect and single-defect states in non-reciprocal tight-binding chains.

Hot loops (band tracking, polygon winding, the Hessenberg-QR eigensolver)
are compiled with numba; set ``NHSE_DISABLE_NUMBA=1`` to run the numpy
versions instead.
"""
from .builders import (HnParams, SshParams, apply_defect_strength, build_hn, build_ssh,
                       hn_strong_defect, ssh_bloch)
from .classify import (LABELS, Classification, Thresholds, classify_hn, classify_spectrum,
                       classify_ssh, closure_brackets, critical_size, gap_scan, hybrid_count,
                       localization_metrics, split_defects, trivial_defect_energy)
from .config import RunConfig, load_config, write_config
from .errors import (BandMatchingError, ConfigError, ResolutionError, SkinDefectError,
                     SolverError, SpecificationError)
from .lattice import OPEN, PERIODIC, Hopping, LatticeSpec, assemble, twisted, validate
from .spectral import Spectrum, SpectralLoop, eigensolve, obc_spectrum, spectral_loop
from .sweep import run, run_sweep
from .topology import (ON_LOOP, enclosure, line_gap_states, sigma_y_operator, symmetry_defect,
                       winding_number)

__version__ = "0.1.0"
