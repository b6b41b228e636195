import numpy as np
import pytest

from z2lpg.lattice import LatticeSpec, build_hilbert_space, build_initial_state, named_pattern
from z2lpg.observables import (
    electric_flux,
    gauge_violation_instant,
    generator_expectations,
    staggered_occupation,
    temporal_average,
)


def test_pattern_observables(pbc4, open6_half):
    stag = build_initial_state(pbc4, "staggered")
    cdw = build_initial_state(pbc4, "cdw")
    dw = build_initial_state(open6_half, "domain_wall")
    assert staggered_occupation(pbc4, stag) == pytest.approx(-0.5)
    assert staggered_occupation(pbc4, cdw) == pytest.approx(0.0)
    assert staggered_occupation(open6_half, dw) == pytest.approx(-1 / 6)
    assert electric_flux(pbc4, stag) == pytest.approx(0.0)
    assert electric_flux(pbc4, cdw) == pytest.approx(-0.5)
    assert electric_flux(open6_half, dw) == pytest.approx(-2 / 3)


def test_target_state_has_no_violation(pbc4):
    psi = build_initial_state(pbc4, "staggered")
    assert gauge_violation_instant(pbc4, psi) == 0
    assert np.array_equal(generator_expectations(pbc4, psi), np.ones(4))


def test_one_flipped_link(pbc4):
    occ, links = named_pattern("staggered", pbc4.spec)
    links = list(links)
    links[2] = -links[2]
    psi = np.zeros(pbc4.dim, dtype=complex)
    psi[pbc4.basis_index(occ, links)] = 1
    assert gauge_violation_instant(pbc4, psi) == pytest.approx(1.0)
    assert np.array_equal(generator_expectations(pbc4, psi), [1, 1, -1, -1])


def test_uniform_superposition(pbc4):
    psi = np.ones(pbc4.dim) / np.sqrt(pbc4.dim)
    assert gauge_violation_instant(pbc4, psi) == pytest.approx(1.0, abs=1e-14)


def test_interior_mode_skips_first_constraint():
    space = build_hilbert_space(LatticeSpec(4, "open"))
    occ, links = named_pattern("staggered", space.spec)
    # flipping the particle at site 1 only breaks the constraint at j = 1
    psi = np.zeros(space.dim)
    psi[space.basis_index((0,) + occ[1:], links)] = 1
    assert gauge_violation_instant(space, psi, mode="all_sites") == pytest.approx(0.5)
    assert gauge_violation_instant(space, psi, mode="interior") == 0
    with pytest.raises(ValueError):
        gauge_violation_instant(space, psi, mode="edges")


def test_stacked_states(pbc4):
    a = build_initial_state(pbc4, "staggered")
    b = build_initial_state(pbc4, "cdw")
    out = staggered_occupation(pbc4, np.stack([a, b]))
    assert np.allclose(out, [-0.5, 0.0])


def test_temporal_average_constant_and_quadratic():
    t = np.linspace(0, 2, 2001)
    assert np.allclose(temporal_average(np.full_like(t, 0.3), t)[1:], 0.3)
    avg = temporal_average(0.7 * t**2, t)
    assert avg[0] == 0
    # trapezoidal error of the running mean is 0.7 h^2 / 6
    assert np.abs(avg[1:] - 0.7 * t[1:] ** 2 / 3).max() < 0.7 * 1e-6 / 6 * 1.01


def test_temporal_average_validates_grid():
    with pytest.raises(ValueError):
        temporal_average(np.zeros(3), np.array([0.1, 0.2, 0.3]))
    with pytest.raises(ValueError):
        temporal_average(np.zeros(3), np.array([0.0, 0.2, 0.2]))
