import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from skindefect.errors import SpecificationError
from skindefect.lattice import OPEN, PERIODIC, Hopping, LatticeSpec, assemble, twisted, validate


def ring3(t1=1.0, t2=0.6):
    return LatticeSpec(3, (Hopping(0, 1, t1), Hopping(1, 2, t1), Hopping(2, 0, t1, True),
                           Hopping(1, 0, t2), Hopping(2, 1, t2), Hopping(0, 2, t2, True)))


def test_two_site_open():
    spec = LatticeSpec(2, (Hopping(0, 1, 1.0), Hopping(1, 0, 0.6)))
    np.testing.assert_array_equal(assemble(spec, OPEN), [[0, 0.6], [1, 0]])


def test_ring_periodic_is_circulant():
    H = assemble(ring3(), PERIODIC)
    expected = np.array([[0, 0.6, 1], [1, 0, 0.6], [0.6, 1, 0]])
    np.testing.assert_array_equal(H, expected)


def test_twist_pi_negates_wrapped_corners():
    H0, Hpi = assemble(ring3(), twisted(0.0)), assemble(ring3(), twisted(np.pi))
    mask = np.zeros((3, 3), bool)
    mask[0, 2] = mask[2, 0] = True
    np.testing.assert_allclose(Hpi[mask], -H0[mask], atol=1e-15)
    np.testing.assert_array_equal(Hpi[~mask], H0[~mask])


def test_twist_phase_sign_follows_bloch_condition():
    phi = 0.7
    H = assemble(ring3(), twisted(phi))
    # 2 -> 0 crosses the end going right, so it picks up e^{-i phi}; 0 -> 2 the opposite
    assert H[0, 2] == pytest.approx(np.exp(-1j * phi))
    assert H[2, 0] == pytest.approx(0.6 * np.exp(1j * phi))


def test_open_drops_wrap_bonds():
    H = assemble(ring3(), OPEN)
    assert H[0, 2] == 0 and H[2, 0] == 0


def test_validate_examples():
    assert validate(LatticeSpec(2, (Hopping(0, 1, 1.0), Hopping(1, 0, 0.6)))) == []
    out = validate(LatticeSpec(3, (Hopping(0, 5, 1.0),)))
    assert len(out) == 1 and "out of range" in out[0] and "5" in out[0]
    dup = validate(LatticeSpec(3, (Hopping(0, 1, 1.0), Hopping(0, 1, 2.0))))
    assert len(dup) == 1 and "duplicate" in dup[0]


def test_validate_flags_short_wrap_and_nonfinite():
    assert len(validate(LatticeSpec(4, (Hopping(0, 1, 1.0, True),)))) == 1
    assert len(validate(LatticeSpec(4, (Hopping(0, 1, float("nan")),)))) == 1


def test_assemble_rejects_invalid():
    with pytest.raises(SpecificationError):
        assemble(LatticeSpec(3, (Hopping(0, 5, 1.0),)))


def test_zero_amplitude_is_an_allowed_bond():
    spec = LatticeSpec(2, (Hopping(0, 1, 0.0), Hopping(1, 0, 1.0)))
    assert validate(spec) == []


amps = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)


@st.composite
def chains(draw):
    n = draw(st.integers(3, 9))
    hops = []
    for i in range(n - 1):
        hops += [Hopping(i, i + 1, draw(amps)), Hopping(i + 1, i, draw(amps))]
    hops += [Hopping(n - 1, 0, draw(amps), True), Hopping(0, n - 1, draw(amps), True)]
    return LatticeSpec(n, tuple(hops))


@settings(max_examples=60, deadline=None)
@given(chains(), st.floats(0, 2 * np.pi))
def test_open_equals_twisted_without_wraps(spec, phi):
    np.testing.assert_array_equal(assemble(spec, OPEN), assemble(spec.without_wraps(), twisted(phi)))


@settings(max_examples=60, deadline=None)
@given(chains(), st.floats(0, 2 * np.pi))
def test_assemble_is_linear(spec, phi):
    np.testing.assert_allclose(assemble(spec.scaled(2.0), twisted(phi)), 2 * assemble(spec, twisted(phi)))


@settings(max_examples=60, deadline=None)
@given(chains(), st.floats(0, 2 * np.pi))
def test_twist_is_2pi_periodic(spec, phi):
    np.testing.assert_allclose(assemble(spec, twisted(phi)), assemble(spec, twisted(phi + 2 * np.pi)),
                               atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 9), st.lists(st.floats(-3, 3), min_size=8, max_size=8))
def test_reciprocal_real_chain_is_symmetric(n, ts):
    hops = []
    for i in range(n - 1):
        t = ts[i % len(ts)]
        hops += [Hopping(i, i + 1, t), Hopping(i + 1, i, t)]
    H = assemble(LatticeSpec(n, tuple(hops)))
    np.testing.assert_array_equal(H, H.T)
