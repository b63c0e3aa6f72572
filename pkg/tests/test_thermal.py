import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from twostat.fock_basis import Statistics, build_basis
from twostat.thermal import (TRUNCATION_ERROR_FACTOR, LevelSpectrum, p11_analytic, p11_numeric,
                             p11_product_injection_limit, partition_terms,
                             partition_terms_by_enumeration, product_injection_matrix,
                             required_truncation, single_particle_sum, thermal_density_matrix,
                             thermal_sector_injection_matrix, z_pq, z_same_site)

from conftest import LN2

BOSON, FERMION = Statistics.BOSON, Statistics.FERMION


def brute_z_pq(energies, beta):
    return math.fsum(math.exp(-beta * (a + b)) for a in energies for b in energies)


def brute_z_same(energies, beta, statistics):
    n = len(energies)
    total = math.fsum(math.exp(-beta * (energies[i] + energies[j]))
                      for i in range(n) for j in range(i + 1, n))
    if statistics is BOSON:
        total += math.fsum(math.exp(-2 * beta * e) for e in energies)
    return total


spectra = st.lists(st.floats(0, 5, allow_nan=False), min_size=1, max_size=10).map(
    lambda xs: LevelSpectrum(tuple(sorted(xs))))
betas = st.floats(0, 20, allow_nan=False)
statistics = st.sampled_from(list(Statistics))


class TestSpectrum:
    def test_equal_spacing(self):
        s = LevelSpectrum.equally_spaced(4, 0.5)
        assert s.energies == (0.0, 0.5, 1.0, 1.5)
        assert s.spacing == 0.5

    @pytest.mark.parametrize("energies", [(), (1.0, 0.5), (0.0, math.inf)])
    def test_rejects_invalid(self, energies):
        with pytest.raises(ValueError):
            LevelSpectrum(energies)

    def test_spacing_must_match(self):
        with pytest.raises(ValueError):
            LevelSpectrum((0.0, 1.0, 2.5), spacing=1.0)

    def test_degenerate_levels_allowed(self):
        assert LevelSpectrum((0.0, 0.0, 1.0)).levels == 3


class TestSums:
    def test_single_level(self):
        for beta in (0.0, 1.0, math.inf):
            assert single_particle_sum(LevelSpectrum((0.0,)), beta) == 1.0
            assert z_pq(LevelSpectrum((0.0,)), beta) == 1.0

    def test_two_levels_ln2(self):
        s = LevelSpectrum.equally_spaced(2)
        assert single_particle_sum(s, LN2) == pytest.approx(1.5, abs=1e-15)
        assert z_pq(s, LN2) == pytest.approx(2.25, abs=1e-15)
        assert z_same_site(s, LN2, BOSON) == pytest.approx(1.75, abs=1e-15)
        assert z_same_site(s, LN2, FERMION) == pytest.approx(0.5, abs=1e-15)

    def test_geometric_closed_form(self):
        s = LevelSpectrum.equally_spaced(60)
        assert single_particle_sum(s, LN2) == pytest.approx((1 - 2.0 ** -60) / 0.5, abs=1e-15)
        assert abs(single_particle_sum(s, LN2) - 2.0) < 1e-15

    def test_zero_temperature_counts_ground_levels(self):
        assert single_particle_sum(LevelSpectrum((0.0, 1.0, 2.0)), math.inf) == 1.0
        assert single_particle_sum(LevelSpectrum((0.0, 0.0, 2.0)), math.inf) == 2.0

    def test_single_level_fermions_never_share_a_site(self):
        for beta in (0.0, 2.0, math.inf):
            assert z_same_site(LevelSpectrum((0.0,)), beta, FERMION) == 0.0

    def test_negative_beta_rejected(self):
        with pytest.raises(ValueError):
            single_particle_sum(LevelSpectrum((0.0,)), -1.0)

    @given(spectra, betas)
    def test_z_pq_matches_pair_sum(self, spectrum, beta):
        assert z_pq(spectrum, beta) == pytest.approx(brute_z_pq(spectrum.energies, beta), rel=1e-12, abs=1e-300)

    @given(spectra, betas, statistics)
    def test_z_same_matches_pair_sum(self, spectrum, beta, stats):
        want = brute_z_same(spectrum.energies, beta, stats)
        assert z_same_site(spectrum, beta, stats) == pytest.approx(want, rel=1e-12, abs=1e-12 * z_pq(spectrum, beta))

    @given(spectra.filter(lambda s: s.levels <= 8), betas, statistics)
    def test_enumeration_oracle(self, spectrum, beta, stats):
        closed = partition_terms(spectrum, beta, stats)
        enum = partition_terms_by_enumeration(spectrum, beta, stats)
        scale = enum.z2
        assert abs(closed.z_pq - enum.z_pq) <= 1e-12 * scale
        assert abs(closed.z_p - enum.z_p) <= 1e-12 * scale
        assert enum.z_p == pytest.approx(enum.z_q, rel=1e-12)
        assert abs(closed.z2 - (closed.z_pq + 2 * z_same_site(spectrum, beta, stats))) <= 1e-12 * scale


class TestP11:
    def test_single_level(self):
        for beta in (0.0, 1.0, math.inf):
            assert p11_numeric(LevelSpectrum((0.0,)), beta, BOSON) == pytest.approx(1 / 3, abs=1e-15)
            assert p11_numeric(LevelSpectrum((0.0,)), beta, FERMION) == 1.0

    def test_infinite_temperature_two_levels(self):
        # 10 boson states, 4 of them coincident
        assert p11_numeric(LevelSpectrum.equally_spaced(2), 0.0, BOSON) == pytest.approx(0.4, abs=1e-15)

    def test_analytic_values(self):
        assert p11_analytic(math.inf, BOSON) == 1 / 3
        assert p11_analytic(math.inf, FERMION) == 1.0
        assert p11_analytic(0.0, BOSON) == 0.5
        assert p11_analytic(0.0, FERMION) == 0.5
        assert p11_analytic(LN2, BOSON) == pytest.approx(3 / 7, abs=1e-15)
        assert p11_analytic(LN2, FERMION) == pytest.approx(3 / 5, abs=1e-15)

    def test_analytic_against_exponential_form(self):
        for bd in (0.1, 1.0, 3.0, 20.0):
            e = math.exp(bd)
            assert p11_analytic(bd, BOSON) == pytest.approx((e + 1) / (3 * e + 1), rel=1e-14)
            assert p11_analytic(bd, FERMION) == pytest.approx((e + 1) / (e + 3), rel=1e-14)

    def test_analytic_large_argument_does_not_overflow(self):
        assert p11_analytic(1e6, BOSON) == 1 / 3

    def test_analytic_rejects_negative(self):
        with pytest.raises(ValueError):
            p11_analytic(-0.1, BOSON)

    @pytest.mark.parametrize("stats,want", [(BOSON, 3 / 7), (FERMION, 3 / 5)])
    def test_numeric_converges_to_closed_form(self, stats, want):
        levels = required_truncation(LN2, 1e-12)
        assert abs(p11_numeric(LevelSpectrum.equally_spaced(levels), LN2, stats) - want) < 1e-10
        assert abs(p11_numeric(LevelSpectrum.equally_spaced(60), LN2, stats) - want) < 1e-15

    @given(st.floats(0.0, 20.0), st.floats(0.0, 20.0))
    def test_strictly_monotone(self, x, y):
        lo, hi = min(x, y), max(x, y)
        if hi - lo < 1e-3:
            return
        assert p11_analytic(lo, BOSON) > p11_analytic(hi, BOSON)
        assert p11_analytic(lo, FERMION) < p11_analytic(hi, FERMION)

    @given(st.floats(0.0, 1e3), st.floats(0.0, 1e3))
    def test_monotone_where_doubles_saturate(self, x, y):
        lo, hi = min(x, y), max(x, y)
        assert p11_analytic(lo, BOSON) >= p11_analytic(hi, BOSON)
        assert p11_analytic(lo, FERMION) <= p11_analytic(hi, FERMION)

    @given(spectra, st.one_of(betas, st.just(math.inf)))
    def test_bounds(self, spectrum, beta):
        b = p11_numeric(spectrum, beta, BOSON)
        f = p11_numeric(spectrum, beta, FERMION)
        assert 1 / 3 - 1e-15 <= b <= 0.5 + 1e-15
        assert 0.5 - 1e-15 <= f <= 1.0 + 1e-15


class TestTruncation:
    def test_examples(self):
        assert required_truncation(LN2, 1e-12) == 40
        assert required_truncation(10.0, 1e-12) == 3
        assert required_truncation(0.1, 1e-12) == 277

    @pytest.mark.parametrize("bd,tol", [(0.0, 1e-12), (1.0, 0.0), (1.0, 1.0), (-1.0, 1e-3)])
    def test_errors(self, bd, tol):
        with pytest.raises(ValueError):
            required_truncation(bd, tol)

    @given(st.floats(0.02, 30.0), st.sampled_from([1e-3, 1e-6, 1e-9, 1e-12]))
    def test_smallest_and_bounded(self, bd, tol):
        n = required_truncation(bd, tol)
        assert math.exp(-n * bd) <= tol * (1 + 1e-12)
        assert n == 1 or math.exp(-(n - 1) * bd) > tol * (1 - 1e-12)
        for stats in Statistics:
            err = abs(p11_numeric(LevelSpectrum.equally_spaced(n), bd, stats) - p11_analytic(bd, stats))
            assert err <= TRUNCATION_ERROR_FACTOR * tol + 1e-14

    @pytest.mark.parametrize("bd", np.geomspace(0.05, 20, 60))
    def test_convergence_band(self, bd):
        n = required_truncation(bd, 1e-12)
        for stats in Statistics:
            assert abs(p11_numeric(LevelSpectrum.equally_spaced(n), bd, stats) - p11_analytic(bd, stats)) <= 1e-10


class TestDensityMatrices:
    def test_degenerate_ground_state(self):
        basis = build_basis(BOSON, 1)
        rho = thermal_density_matrix(basis, LevelSpectrum((0.0,)), math.inf)
        np.testing.assert_allclose(rho.diagonal(), [1 / 3] * 3, atol=1e-16)

    def test_single_fermion_state(self):
        basis = build_basis(FERMION, 1)
        for beta in (0.0, 1.0, math.inf):
            np.testing.assert_array_equal(thermal_density_matrix(basis, LevelSpectrum((0.0,)), beta).to_dense(), [[1]])

    def test_infinite_temperature_is_uniform(self):
        basis = build_basis(BOSON, 2)
        rho = thermal_density_matrix(basis, LevelSpectrum.equally_spaced(2), 0.0)
        np.testing.assert_allclose(rho.diagonal(), [0.1] * 10, atol=1e-16)

    @given(spectra.filter(lambda s: s.levels <= 6), betas, statistics)
    def test_unit_trace_diagonal(self, spectrum, beta, stats):
        rho = thermal_density_matrix(build_basis(stats, spectrum.levels), spectrum, beta)
        assert rho.is_diagonal
        assert abs(rho.trace() - 1) <= 1e-14
        assert rho.diagonal().min() >= 0

    def test_level_mismatch(self):
        with pytest.raises(ValueError):
            thermal_density_matrix(build_basis(BOSON, 2), LevelSpectrum.equally_spaced(3), 1.0)

    def test_product_injection_single_level(self):
        basis = build_basis(BOSON, 1)
        rho = product_injection_matrix(basis, LevelSpectrum((0.0,)), 1.0)
        np.testing.assert_array_equal(rho.diagonal(), [0, 1, 0])

    def test_product_injection_uniform_at_infinite_temperature(self):
        basis = build_basis(BOSON, 2)
        d = product_injection_matrix(basis, LevelSpectrum.equally_spaced(2), 0.0).diagonal()
        np.testing.assert_allclose(d[basis.coincidence_mask()], [0.25] * 4, atol=1e-16)
        assert d[~basis.coincidence_mask()].sum() == 0

    def test_product_injection_boltzmann_products(self):
        basis = build_basis(BOSON, 2)
        d = product_injection_matrix(basis, LevelSpectrum.equally_spaced(2), LN2).diagonal()
        # (p0,q0), (p0,q1), (q0,p1), (p1,q1)
        got = [d[basis.index(0, 1)], d[basis.index(0, 3)], d[basis.index(1, 2)], d[basis.index(2, 3)]]
        np.testing.assert_allclose(got, np.array([1, 0.5, 0.5, 0.25]) / 2.25, atol=1e-15)

    @given(spectra.filter(lambda s: s.levels <= 6), betas, statistics)
    def test_thermal_sector_injection_keeps_sector_weights(self, spectrum, beta, stats):
        basis = build_basis(stats, spectrum.levels)
        thermal = thermal_density_matrix(basis, spectrum, beta).diagonal()
        inj = thermal_sector_injection_matrix(basis, spectrum, beta).diagonal()
        assert inj[~basis.coincidence_mask()].sum() == 0
        for idx in basis.sectors().values():
            assert inj[idx].sum() == pytest.approx(thermal[idx].sum(), abs=1e-14)

    def test_product_limit_values(self):
        assert p11_product_injection_limit(math.inf, BOSON) == pytest.approx(1 / 3, abs=1e-16)
        assert p11_product_injection_limit(math.inf, FERMION) == 1.0
        assert p11_product_injection_limit(0.0, BOSON) == 0.5
        assert p11_product_injection_limit(0.0, FERMION) == 0.5
        assert p11_product_injection_limit(LN2, BOSON) == pytest.approx(4 / 9, abs=1e-15)
        assert p11_product_injection_limit(LN2, FERMION) == pytest.approx(2 / 3, abs=1e-15)
