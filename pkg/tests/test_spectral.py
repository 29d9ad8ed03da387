import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import hn_ring
from skindefect.builders import HnParams, SshParams, build_hn, build_ssh
from skindefect.errors import SpecificationError
from skindefect.lattice import PERIODIC, assemble, interleave
from skindefect.spectral import (balanced, eigensolve, eigvals, obc_spectrum, point_set_diameter,
                                 repeat_cells, spectral_loop, twisted_eigvals)
from skindefect.topology import enclosure_many


def test_diagonal_sorted():
    s = eigensolve(np.diag([2.0, -1.0]))
    np.testing.assert_allclose(s.eigenvalues, [-1, 2])
    assert s.residuals.max() < 1e-14


def test_two_site_nonreciprocal():
    s = eigensolve([[0, 0.6], [1, 0]])
    np.testing.assert_allclose(s.eigenvalues, [-np.sqrt(0.6), np.sqrt(0.6)], atol=1e-14)
    for k in range(2):
        v = s.eigenvectors[:, k]
        assert np.linalg.norm(v) == pytest.approx(1.0)


def test_single_site():
    s = eigensolve([[0.3 - 0.2j]])
    assert s.eigenvalues[0] == pytest.approx(0.3 - 0.2j)


@pytest.mark.parametrize("H", [np.zeros((0, 0)), np.ones((2, 3)), [[np.nan]]])
def test_rejects_bad_input(H):
    with pytest.raises(SpecificationError):
        eigensolve(H)


def test_unknown_backend():
    with pytest.raises(SpecificationError):
        eigensolve(np.eye(2), backend="magma")


def test_hermitian_ssh_real_spectrum():
    s = obc_spectrum(build_ssh(SshParams(-1.0, 0.0, 6, 6, t0=0.85, p=None)))
    assert np.abs(s.eigenvalues.imag).max() < 1e-12


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 24), st.integers(0, 2**31 - 1))
def test_qr_matches_lapack(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    a = eigensolve(A, backend="lapack")
    b = eigensolve(A, backend="qr")
    np.testing.assert_allclose(b.eigenvalues, a.eigenvalues, atol=1e-9)
    assert b.residuals.max() < 1e-10 * max(1, np.abs(A).sum())


def test_balancing_is_a_similarity():
    H = assemble(build_hn(HnParams(1, 0.6, 1, 0.75, 30)))
    B, s = balanced(H)
    np.testing.assert_allclose(B, H * s[None, :] / s[:, None])
    np.testing.assert_allclose(np.sort_complex(eigvals(H)), np.sort_complex(np.linalg.eigvals(B)),
                               atol=1e-10)


def test_skin_spectrum_accurate_where_plain_solver_drifts():
    # exponentially non-normal: balancing keeps the OBC spectrum on the real segment
    s = obc_spectrum(hn_ring(120, 1.0, 0.2).without_wraps())
    assert np.abs(s.eigenvalues.imag).max() < 1e-8
    assert np.abs(s.eigenvalues).max() < 2 * np.sqrt(0.2) + 1e-8


def test_ellipse_loop():
    loop = spectral_loop(hn_ring(8), n_k=64)
    assert len(loop.cycles()) == 1
    z = loop.loops()[0]
    np.testing.assert_allclose((z.real / 1.6) ** 2 + (z.imag / 0.4) ** 2, 1.0, atol=1e-12)
    assert loop.diameter == pytest.approx(3.2, rel=1e-6)


def test_loop_band_paths_close_through_successor():
    loop = spectral_loop(build_hn(HnParams(1, 0.6, 1, 0.75, 10)), n_k=64)
    np.testing.assert_allclose(loop.band_paths[-1], loop.band_paths[0, loop.successor], atol=1e-9)
    assert sorted(b for c in loop.cycles() for b in c) == list(range(10))


def test_twist_period():
    spec = build_hn(HnParams(1, 0.6, 1, 0.75, 9))
    a = twisted_eigvals(spec, [0.4])
    b = twisted_eigvals(spec, [0.4 + 2 * np.pi])
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_repeat_cells_unfolds_twists():
    spec = build_hn(HnParams(1, 0.6, 1, 0.75, 9))
    big = np.sort_complex(np.linalg.eigvals(assemble(repeat_cells(spec, 4), PERIODIC)))
    small = np.sort_complex(twisted_eigvals(spec, 2 * np.pi * np.arange(4) / 4).ravel())
    for z in big:
        assert np.abs(small - z).min() < 1e-9


def test_defect_free_obc_inside_loop():
    spec = build_hn(HnParams(1, 0.6, 1, 0.75, 40), with_defect=False)
    loop = spectral_loop(spec, n_k=128)
    kinds = {e.kind for e in enclosure_many(loop, obc_spectrum(spec).eigenvalues)}
    assert "outside" not in kinds


def test_loop_input_checks():
    with pytest.raises(SpecificationError):
        spectral_loop(hn_ring(8), n_k=32)
    with pytest.raises(SpecificationError):
        spectral_loop(hn_ring(8).without_wraps(), n_k=64)


def test_decoupled_rings_give_one_cycle_each():
    spec = interleave(hn_ring(8, 1.0, 0.6), hn_ring(8, 1.0, 0.3))
    assert len(spectral_loop(spec, n_k=64).cycles()) == 2


def test_exact_degeneracy_is_not_ambiguous():
    # identical decoupled rings: equal rows are interchangeable, so no grid doubling
    spec = interleave(hn_ring(8, 1.0, 1.0), hn_ring(8, 1.0, 1.0))
    assert spectral_loop(spec, n_k=64, max_n_k=64).n_k == 64


def test_point_set_diameter():
    assert point_set_diameter([0j]) == 0.0
    assert point_set_diameter([0, 1, 1j, 1 + 1j, 0.5 + 0.5j]) == pytest.approx(np.sqrt(2))
    assert point_set_diameter([0, 1, 3]) == pytest.approx(3)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=2, max_size=40))
def test_point_set_diameter_matches_brute_force(pts):
    z = np.array(pts)
    brute = np.abs(z[:, None] - z[None, :]).max()
    assert point_set_diameter(z) == pytest.approx(brute, rel=1e-9, abs=1e-12)
