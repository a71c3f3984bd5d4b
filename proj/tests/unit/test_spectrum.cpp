#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "spinbath/errors.hpp"
#include "spinbath/evolution.hpp"
#include "spinbath/spectrum.hpp"
#include "test_support.hpp"

using namespace spinbath;
using namespace spinbath::spectrum;
using spinbath::fixtures::balanced_model;
using spinbath::fixtures::model_with_populations;

TEST(OmegaOfIndex, ExtremeIndices) {
    const auto model = balanced_model({0.5, 1.25, 2.0});
    EXPECT_EQ(omega_of_index(model, 0), 3.75);
    EXPECT_EQ(omega_of_index(model, 7), -3.75);
}

TEST(OmegaOfIndex, LastSpinOwnsLeastSignificantBit) {
    const auto model = balanced_model({1.0, 2.0});
    EXPECT_EQ(omega_of_index(model, 1), -1.0);
    EXPECT_EQ(omega_of_index(model, 2), 1.0);
}

TEST(OmegaOfIndex, ComplementIndexMirrorsExactly) {
    const auto model = generate_random(14, 31);
    const std::uint64_t last = (std::uint64_t{1} << 14) - 1;
    for (std::uint64_t nu = 0; nu <= last; nu += 97) EXPECT_EQ(omega_of_index(model, last - nu), -omega_of_index(model, nu));
}

TEST(OmegaOfIndex, OutOfRangeThrows) {
    EXPECT_THROW(omega_of_index(balanced_model({1.0, 2.0}), 4), IndexOutOfRangeError);
    EXPECT_THROW(weight_of_index(balanced_model({1.0, 2.0}), 4), IndexOutOfRangeError);
}

TEST(WeightOfIndex, ExtremeIndicesSelectBetaThenAlpha) {
    const auto model = model_with_populations({0.2, 0.7, 0.4}, {1.0, 2.0, 3.0});
    EXPECT_NEAR(weight_of_index(model, 0), 0.8 * 0.3 * 0.6, 1e-15);
    EXPECT_NEAR(weight_of_index(model, 7), 0.2 * 0.7 * 0.4, 1e-15);
}

TEST(TotalWeight, TelescopesToOne) {
    EXPECT_NEAR(total_weight(generate_random(10000, 5, UniformPositive{}, PhaseLaw::Uniform)), 1.0, 1e-12);
}

TEST(SpectralDecomposition, TwoSpinGolden) {
    const auto dec = spectral_decomposition(balanced_model({1.0, 2.0}));
    ASSERT_EQ(dec.lines.size(), 4u);
    const double expected[] = {-3.0, -1.0, 1.0, 3.0};
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_EQ(dec.lines[k].omega, expected[k]);
        EXPECT_NEAR(dec.lines[k].weight, 0.25, 1e-15);
        EXPECT_EQ(dec.lines[k].multiplicity, 1u);
    }
}

TEST(SpectralDecomposition, EqualCouplingsCollideBinomially) {
    const double g = 0.3;
    const auto dec = spectral_decomposition(balanced_model({g, g, g}));
    ASSERT_EQ(dec.lines.size(), 4u);
    const std::uint64_t mult[] = {1, 3, 3, 1};
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_NEAR(dec.lines[k].omega, (2.0 * static_cast<double>(k) - 3.0) * g, 1e-15);
        EXPECT_EQ(dec.lines[k].multiplicity, mult[k]);
        EXPECT_NEAR(dec.lines[k].weight, static_cast<double>(mult[k]) / 8.0, 1e-15);
    }
    EXPECT_TRUE(dec.has_degeneracies());
}

TEST(SpectralDecomposition, EqualCouplingCollisionsAreExactForIrrationalG) {
    const double g = std::sqrt(2.0) / 3.0;
    const auto dec = spectral_decomposition(balanced_model(std::vector<double>(16, g)));
    EXPECT_EQ(dec.lines.size(), 17u);
    EXPECT_EQ(dec.max_multiplicity(), 12870u);
}

TEST(SpectralDecomposition, GenericModelIsNondegenerate) {
    const auto dec = spectral_decomposition(generate_random(12, 77));
    EXPECT_EQ(dec.lines.size(), 4096u);
    EXPECT_FALSE(dec.has_degeneracies());
    EXPECT_EQ(dec.total_multiplicity(), 4096u);
    EXPECT_NEAR(dec.total_weight(), 1.0, 1e-12);
}

TEST(SpectralDecomposition, LinesAreSortedAndMirrorSymmetric) {
    const auto dec = spectral_decomposition(generate_random(10, 9));
    for (std::size_t k = 1; k < dec.lines.size(); ++k) EXPECT_LT(dec.lines[k - 1].omega, dec.lines[k].omega);
    for (std::size_t k = 0; k < dec.lines.size(); ++k) {
        EXPECT_EQ(dec.lines[k].omega, -dec.lines[dec.lines.size() - 1 - k].omega);
    }
}

TEST(SpectralDecomposition, ToleranceMergesNearbyLines) {
    const auto model = balanced_model({1.0, 1.0 + 1e-9});
    EXPECT_EQ(spectral_decomposition(model, 0.0).lines.size(), 4u);
    const auto merged = spectral_decomposition(model, 1e-6);
    ASSERT_EQ(merged.lines.size(), 3u);
    EXPECT_EQ(merged.lines[1].multiplicity, 2u);
    EXPECT_NEAR(merged.lines[1].weight, 0.5, 1e-15);
}

TEST(SpectralDecomposition, CapAndArgumentChecks) {
    const auto model = generate_random(8, 1);
    EXPECT_THROW(spectral_decomposition(model, 0.0, 7), CapExceededError);
    EXPECT_THROW(spectral_decomposition(model, -1.0), InvalidParameterError);
    try {
        spectral_decomposition(generate_random(30, 1));
        FAIL() << "expected CapExceededError";
    } catch (const CapExceededError& e) {
        EXPECT_EQ(e.n_spins(), 30u);
        EXPECT_EQ(e.cap(), kDefaultEnumerationCap);
        EXPECT_GT(e.required_bytes(), 1e9);
    }
}

TEST(RFromSpectrum, MatchesDirectProduct) {
    const auto model = generate_random(11, 19, UniformPositive{}, PhaseLaw::Uniform);
    const auto dec = spectral_decomposition(model);
    EXPECT_NEAR(std::abs(r_from_spectrum(dec, 0.0) - cplx(1.0, 0.0)), 0.0, 1e-13);
    for (double t : {0.2, 3.0, 14.5, 49.0}) {
        EXPECT_NEAR(std::abs(r_from_spectrum(dec, t) - evolution::r_of_t(model, t)), 0.0, 1e-12);
    }
}

TEST(RFromSpectrum, SingleLineIsPositiveFrequencyPhase) {
    SpectralDecomposition dec;
    dec.lines = {{2.5, 1.0, 1}};
    const cplx r = r_from_spectrum(dec, 0.8);
    EXPECT_NEAR(r.real(), std::cos(2.0), 1e-15);
    EXPECT_NEAR(r.imag(), std::sin(2.0), 1e-15);
}

TEST(HamiltonianSpectrum, SingleSpin) {
    const auto levels = hamiltonian_spectrum(balanced_model({2.0}));
    ASSERT_EQ(levels.size(), 2u);
    EXPECT_EQ(levels[0].energy, -1.0);
    EXPECT_EQ(levels[0].degeneracy, 2u);
    EXPECT_EQ(levels[1].energy, 1.0);
    EXPECT_EQ(levels[1].degeneracy, 2u);
}

TEST(HamiltonianSpectrum, EqualCouplingsFollowBinomialCounts) {
    const double g = 1.5;
    for (std::size_t n = 1; n <= 12; ++n) {
        const auto levels = hamiltonian_spectrum(balanced_model(std::vector<double>(n, g)));
        ASSERT_EQ(levels.size(), n + 1) << "n=" << n;
        std::uint64_t total = 0;
        for (std::size_t l = 0; l <= n; ++l) {
            const auto& level = levels[n - l];  // ascending energy: l = n first
            EXPECT_NEAR(level.energy, (static_cast<double>(n) - 2.0 * static_cast<double>(l)) * g / 2.0, 1e-12);
            EXPECT_EQ(level.degeneracy, degeneracy_count(n, l));
            total += level.degeneracy;
        }
        EXPECT_EQ(total, std::uint64_t{1} << (n + 1));
    }
}

TEST(DegeneracyCount, Golden) {
    EXPECT_EQ(degeneracy_count(7, 0), 2u);
    EXPECT_EQ(degeneracy_count(7, 1), 14u);
    EXPECT_EQ(degeneracy_count(4, 2), 12u);
}

TEST(DegeneracyCount, SumsToHilbertDimension) {
    for (std::uint64_t n = 1; n <= 30; ++n) {
        std::uint64_t sum = 0;
        for (std::uint64_t l = 0; l <= n; ++l) sum += degeneracy_count(n, l);
        EXPECT_EQ(sum, std::uint64_t{1} << (n + 1));
    }
}

TEST(DegeneracyCount, ErrorsAndOverflow) {
    EXPECT_THROW(degeneracy_count(3, 4), InvalidParameterError);
    EXPECT_EQ(degeneracy_count(62, 31), 2u * 465428353255261088ULL);
    EXPECT_THROW(degeneracy_count(70, 35), OverflowError);
}

TEST(BruteForce, IdentityAtTimeZero) {
    const auto model = generate_random(6, 4, UniformPositive{}, PhaseLaw::Uniform);
    EXPECT_NEAR(brute_force_expectation(model, FullObservable::relevant(RelevantObservable::identity(), 6), 0.0), 1.0, 1e-14);
}

TEST(BruteForce, EigenstateIsStationary) {
    const SpinBathModel model({1.0, 0.0}, {0.0, 0.0}, {{{1.0, 0.0}, {0.0, 0.0}, 1.3}});
    const auto obs = FullObservable::relevant({1.0, 0.0, {}}, 1);
    for (double t : {0.0, 0.7, 19.0}) EXPECT_NEAR(brute_force_expectation(model, obs, t), 1.0, 1e-15);
}

TEST(BruteForce, AgreesWithClosedForm) {
    Rng rng(2024);
    for (int k = 0; k < 20; ++k) {
        const std::size_t n = rng.integer(1, 8);
        const auto bath = generate_random(n, rng.bits(), UniformPositive{2.0}, PhaseLaw::Uniform);
        const auto [a, b] = generate_random_amplitudes(rng);
        const SpinBathModel model(a, b, {bath.spins().begin(), bath.spins().end()});
        const auto obs = generate_random_observable(n, rng);
        const double t = rng.uniform(0.0, 50.0);
        EXPECT_NEAR(brute_force_expectation(model, obs, t), evolution::expectation_full(model, obs, t), 1e-10);
    }
}

TEST(BruteForce, RespectsCap) {
    const auto model = generate_random(13, 1);
    EXPECT_THROW(brute_force_expectation(model, FullObservable::relevant(RelevantObservable::identity(), 13), 0.0),
                 CapExceededError);
}
