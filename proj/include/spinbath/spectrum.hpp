// spectrum.hpp: exact discrete spectral decomposition of the dephasing factor
//
// Expanding the product r(t) = prod_i (|alpha_i|^2 e^{-i g_i t} + |beta_i|^2 e^{+i g_i t}) gives
// 2^N terms indexed by nu in [0, 2^N). Bit i of nu (counted so that the least significant bit
// belongs to the LAST spin) selects alpha_i (bit 1, contributes -g_i) or beta_i (bit 0,
// contributes +g_i):
//
//   omega_nu = sum_i (-1)^{p_{nu,i}} g_i,    f_d(omega_nu) = prod_i |gamma_{nu,i}|^2,
//   r(t)     = sum_nu f_d(omega_nu) e^{+i omega_nu t}.
//
// Note the +i sign: with omega_nu defined this way (nu = 0 is +sum g_i, the all-beta term) the
// expansion of r(t) carries e^{+i omega t}. The frequency multiset is symmetric under
// negation, so nothing else depends on the choice.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "spinbath/model.hpp"

namespace spinbath::spectrum {

inline constexpr std::size_t kDefaultEnumerationCap = 26;
inline constexpr std::size_t kDefaultOracleCap = 12;

/// Throws IndexOutOfRangeError unless nu < 2^N.
double omega_of_index(const SpinBathModel& model, std::uint64_t nu);
double weight_of_index(const SpinBathModel& model, std::uint64_t nu);

/// prod_i (|alpha_i|^2 + |beta_i|^2): the sum of all 2^N weights without enumerating them.
double total_weight(const SpinBathModel& model);

/// prod_i max(|alpha_i|^2, |beta_i|^2): the largest single-index weight.
double max_index_weight(const SpinBathModel& model);

struct SpectralLine {
    double omega;
    double weight;               // aggregated f_d mass
    std::uint64_t multiplicity;  // number of indices nu merged into this line
};

struct SpectralDecomposition {
    std::vector<SpectralLine> lines;  // strictly increasing omega
    std::size_t n_spins = 0;

    double total_weight() const;
    std::uint64_t total_multiplicity() const;
    std::uint64_t max_multiplicity() const;
    double max_weight() const;
    bool has_degeneracies() const { return max_multiplicity() > 1; }
};

/// Enumerates all 2^N (omega, weight) pairs and merges lines closer than
/// omega_tolerance * max|g_i|. With tolerance 0 only bit-identical frequencies merge; the
/// frequencies are correctly rounded sums, so exactly equal subset sums (equal couplings)
/// always coincide. Throws CapExceededError when N > cap.
SpectralDecomposition spectral_decomposition(const SpinBathModel& model, double omega_tolerance = 0.0,
                                             std::size_t cap = kDefaultEnumerationCap);

/// sum_lines weight * e^{+i omega t}
cplx r_from_spectrum(const SpectralDecomposition& dec, double t);

struct EnergyLevel {
    double energy;
    std::uint64_t degeneracy;
};

/// All 2^{N+1} eigenvalues of H, merged within merge_tolerance * max|g_i| and sorted ascending.
std::vector<EnergyLevel> hamiltonian_spectrum(const SpinBathModel& model, double merge_tolerance = 0.0,
                                              std::size_t cap = kDefaultEnumerationCap);

/// 2 * n! / ((n - l)! l!), the degeneracy of the level (n - 2l) g / 2 for equal couplings.
/// Throws InvalidParameterError for l > n and OverflowError if the result exceeds 64 bits.
std::uint64_t degeneracy_count(std::uint64_t n, std::uint64_t l);

/// Brute-force <psi(t)| O |psi(t)> on the explicit 2^{N+1} state vector. Energies come from
/// bit parities of the Hamiltonian's diagonal and the observable is applied factor by factor,
/// so nothing is shared with the closed forms in `evolution`. Throws CapExceededError when
/// N > cap and DimensionMismatchError when the observable does not fit the model.
double brute_force_expectation(const SpinBathModel& model, const FullObservable& obs, double t,
                               std::size_t cap = kDefaultOracleCap);

}  // namespace spinbath::spectrum
