// model.hpp: spin-bath state data, observables and seeded random instances
//
// A central spin-1/2 P in the pure state a|up> + b|down> is coupled to N environment
// spins, each in alpha_i|up> + beta_i|down>, through H = 1/2 sigma_z(P) (x) sum_i g_i sigma_z(i).
// Time and the couplings g_i are dimensionless and reciprocal to each other: g t is a phase
// in radians.

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace spinbath {

using cplx = std::complex<double>;

/// Tolerance on |x|^2 + |y|^2 = 1 for amplitude pairs.
inline constexpr double kNormTolerance = 1e-12;

struct EnvironmentSpin {
    cplx alpha;  // amplitude of |up_i>
    cplx beta;   // amplitude of |down_i>
    double g;    // coupling to the central spin

    double population_up() const { return std::norm(alpha); }
    double population_down() const { return std::norm(beta); }
};

/// Validated, immutable spin-bath initial state plus couplings.
class SpinBathModel {
public:
    /// Throws NormalizationError, EmptyEnvironmentError or InvalidParameterError.
    SpinBathModel(cplx a, cplx b, std::vector<EnvironmentSpin> spins);

    cplx a() const { return a_; }
    cplx b() const { return b_; }
    std::span<const EnvironmentSpin> spins() const { return spins_; }
    const EnvironmentSpin& spin(std::size_t i) const { return spins_.at(i); }
    std::size_t size() const { return spins_.size(); }

    /// max_i |g_i|
    double max_abs_coupling() const;
    /// mean_i |g_i|
    double mean_abs_coupling() const;

private:
    cplx a_;
    cplx b_;
    std::vector<EnvironmentSpin> spins_;
};

/// Observable of the central spin alone: s_uu|up><up| + s_dd|dn><dn| + s_du|dn><up| + h.c.
struct RelevantObservable {
    double s_uu = 0.0;
    double s_dd = 0.0;
    cplx s_du{0.0, 0.0};

    static RelevantObservable identity() { return {1.0, 1.0, {0.0, 0.0}}; }
    /// sigma_x of the central spin; sensitive only to coherence.
    static RelevantObservable sigma_x() { return {0.0, 0.0, {1.0, 0.0}}; }
    void validate() const;
};

/// One environment spin's factor of a product observable (same layout as RelevantObservable).
struct LocalObservable {
    double e_uu = 0.0;
    double e_dd = 0.0;
    cplx e_du{0.0, 0.0};

    static LocalObservable identity() { return {1.0, 1.0, {0.0, 0.0}}; }
    void validate() const;
};

/// Product observable O_P (x) O_1 (x) ... (x) O_N.
struct FullObservable {
    RelevantObservable system_part;
    std::vector<LocalObservable> env_parts;

    /// O_S (x) I_E for an N-spin environment.
    static FullObservable relevant(const RelevantObservable& system, std::size_t n);
    /// Throws DimensionMismatchError unless env_parts.size() == n.
    void validate(std::size_t n) const;
};

// ---------------------------------------------------------------------------
// Seeded generation

struct UniformPositive {
    double g_max = 1.0;  // g_i drawn uniformly on (0, g_max]
};
struct EqualCoupling {
    double g = 1.0;
};
using CouplingLaw = std::variant<UniformPositive, EqualCoupling>;

enum class PhaseLaw {
    Zero,     // alpha_i, beta_i real and non-negative
    Uniform,  // independent phases uniform on [0, 2 pi)
};

/// Range of |alpha_i|^2; the default [0, 1] is the plain uniform protocol.
struct PopulationRange {
    double lo = 0.0;
    double hi = 1.0;
};

/// Deterministic generator: std::mt19937_64 with the top 53 bits mapped to [0, 1).
/// Both pieces are fully specified, so a seed reproduces the same stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    double uniform();                        // [0, 1)
    double uniform(double lo, double hi);    // [lo, hi)
    std::uint64_t bits();
    /// Uniform integer in [lo, hi].
    std::uint64_t integer(std::uint64_t lo, std::uint64_t hi);

private:
    std::mt19937_64 engine_;
};

/// Random model following the simulation protocol: |alpha_i|^2 uniform in the population
/// range, |beta_i|^2 = 1 - |alpha_i|^2, couplings and phases per the chosen laws.
/// The central spin is the balanced state a = b = 1/sqrt(2).
/// Draw order per spin: population, then coupling (UniformPositive only), then the alpha
/// and beta phases (PhaseLaw::Uniform only).
SpinBathModel generate_random(std::size_t n, std::uint64_t seed,
                              const CouplingLaw& coupling = UniformPositive{},
                              PhaseLaw phase = PhaseLaw::Zero,
                              PopulationRange population = {});

/// Random Hermitian product observable with diagonal entries in [-1, 1] and off-diagonal
/// real and imaginary parts in [-1, 1].
FullObservable generate_random_observable(std::size_t n, Rng& rng);

/// Random normalized pair (x, y) with |x|^2 uniform on [0, 1] and uniform phases.
std::pair<cplx, cplx> generate_random_amplitudes(Rng& rng);

}  // namespace spinbath
