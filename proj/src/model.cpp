#include "spinbath/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "spinbath/errors.hpp"

namespace spinbath {

namespace {

void check_pair(const std::string& which, cplx x, cplx y) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag()) || !std::isfinite(y.real()) ||
        !std::isfinite(y.imag())) {
        throw InvalidParameterError(which + ": amplitudes must be finite");
    }
    const double residual = std::norm(x) + std::norm(y) - 1.0;
    if (std::abs(residual) > kNormTolerance) throw NormalizationError(which, residual);
}

}  // namespace

SpinBathModel::SpinBathModel(cplx a, cplx b, std::vector<EnvironmentSpin> spins)
    : a_(a), b_(b), spins_(std::move(spins)) {
    check_pair("(a, b)", a_, b_);
    if (spins_.empty()) throw EmptyEnvironmentError();
    for (std::size_t i = 0; i < spins_.size(); ++i) {
        const auto& s = spins_[i];
        check_pair("(alpha, beta) of spin " + std::to_string(i), s.alpha, s.beta);
        if (!std::isfinite(s.g) || s.g == 0.0) {
            throw InvalidParameterError("coupling g of spin " + std::to_string(i) + " must be finite and nonzero");
        }
    }
}

double SpinBathModel::max_abs_coupling() const {
    double m = 0.0;
    for (const auto& s : spins_) m = std::max(m, std::abs(s.g));
    return m;
}

double SpinBathModel::mean_abs_coupling() const {
    double sum = 0.0;
    for (const auto& s : spins_) sum += std::abs(s.g);
    return sum / static_cast<double>(spins_.size());
}

void RelevantObservable::validate() const {
    if (!std::isfinite(s_uu) || !std::isfinite(s_dd) || !std::isfinite(s_du.real()) || !std::isfinite(s_du.imag())) {
        throw InvalidParameterError("relevant observable coefficients must be finite");
    }
}

void LocalObservable::validate() const {
    if (!std::isfinite(e_uu) || !std::isfinite(e_dd) || !std::isfinite(e_du.real()) || !std::isfinite(e_du.imag())) {
        throw InvalidParameterError("local observable coefficients must be finite");
    }
}

FullObservable FullObservable::relevant(const RelevantObservable& system, std::size_t n) {
    return {system, std::vector<LocalObservable>(n, LocalObservable::identity())};
}

void FullObservable::validate(std::size_t n) const {
    if (env_parts.size() != n) throw DimensionMismatchError(n, env_parts.size());
    system_part.validate();
    for (const auto& part : env_parts) part.validate();
}

// ---------------------------------------------------------------------------

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t Rng::bits() { return engine_(); }

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::uint64_t Rng::integer(std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo;
    if (span == ~std::uint64_t{0}) return engine_();
    const std::uint64_t range = span + 1;
    // rejection sampling keeps the draw exactly uniform
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % range);
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return lo + x % range;
}

SpinBathModel generate_random(std::size_t n, std::uint64_t seed, const CouplingLaw& coupling, PhaseLaw phase,
                              PopulationRange population) {
    if (n == 0) throw InvalidParameterError("generate_random: n must be at least 1");
    if (const auto* law = std::get_if<UniformPositive>(&coupling)) {
        if (!(law->g_max > 0.0) || !std::isfinite(law->g_max)) {
            throw InvalidParameterError("generate_random: g_max must be positive and finite");
        }
    } else {
        const double g = std::get<EqualCoupling>(coupling).g;
        if (g == 0.0 || !std::isfinite(g)) throw InvalidParameterError("generate_random: equal coupling must be nonzero");
    }
    if (!(population.lo >= 0.0 && population.lo <= population.hi && population.hi <= 1.0)) {
        throw InvalidParameterError("generate_random: population range must satisfy 0 <= lo <= hi <= 1");
    }

    constexpr double two_pi = 2.0 * std::numbers::pi;
    Rng rng(seed);
    std::vector<EnvironmentSpin> spins;
    spins.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double p_up = rng.uniform(population.lo, population.hi);
        double g;
        if (const auto* law = std::get_if<UniformPositive>(&coupling)) {
            g = law->g_max * (1.0 - rng.uniform());  // (0, g_max]
        } else {
            g = std::get<EqualCoupling>(coupling).g;
        }
        double phase_alpha = 0.0;
        double phase_beta = 0.0;
        if (phase == PhaseLaw::Uniform) {
            phase_alpha = two_pi * rng.uniform();
            phase_beta = two_pi * rng.uniform();
        }
        spins.push_back({std::polar(std::sqrt(p_up), phase_alpha), std::polar(std::sqrt(1.0 - p_up), phase_beta), g});
    }
    const double h = std::numbers::sqrt2 / 2.0;
    return SpinBathModel({h, 0.0}, {h, 0.0}, std::move(spins));
}

FullObservable generate_random_observable(std::size_t n, Rng& rng) {
    FullObservable obs;
    obs.system_part.s_uu = rng.uniform(-1.0, 1.0);
    obs.system_part.s_dd = rng.uniform(-1.0, 1.0);
    const double re = rng.uniform(-1.0, 1.0);
    obs.system_part.s_du = {re, rng.uniform(-1.0, 1.0)};
    obs.env_parts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        LocalObservable part;
        part.e_uu = rng.uniform(-1.0, 1.0);
        part.e_dd = rng.uniform(-1.0, 1.0);
        const double e_re = rng.uniform(-1.0, 1.0);
        part.e_du = {e_re, rng.uniform(-1.0, 1.0)};
        obs.env_parts.push_back(part);
    }
    return obs;
}

std::pair<cplx, cplx> generate_random_amplitudes(Rng& rng) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double p = rng.uniform();
    const double phase_x = two_pi * rng.uniform();
    const double phase_y = two_pi * rng.uniform();
    return {std::polar(std::sqrt(p), phase_x), std::polar(std::sqrt(1.0 - p), phase_y)};
}

// ---------------------------------------------------------------------------
// errors.hpp out-of-line constructors

namespace {
std::string residual_message(const std::string& which, double residual) {
    std::ostringstream os;
    os.precision(3);
    os << "amplitude pair " << which << " is not normalized: |x|^2 + |y|^2 - 1 = " << residual;
    return os.str();
}

std::string bytes_message(std::size_t n, std::size_t cap, double bytes) {
    std::ostringstream os;
    os.precision(3);
    os << "enumerating N = " << n << " spins exceeds the cap of " << cap << " (needs about " << bytes / (1024.0 * 1024.0)
       << " MiB); reduce N or raise the cap";
    return os.str();
}
}  // namespace

NormalizationError::NormalizationError(std::string which, double residual)
    : Error(residual_message(which, residual)), which_(std::move(which)), residual_(residual) {}

DimensionMismatchError::DimensionMismatchError(std::size_t expected, std::size_t actual)
    : Error("observable has " + std::to_string(actual) + " environment parts, model has " + std::to_string(expected) +
            " spins") {}

CapExceededError::CapExceededError(std::size_t n_spins, std::size_t cap, double required_bytes)
    : Error(bytes_message(n_spins, cap, required_bytes)), n_spins_(n_spins), cap_(cap), required_bytes_(required_bytes) {}

ConfigError::ConfigError(std::string field_path, const std::string& message)
    : Error(field_path + ": " + message), field_path_(std::move(field_path)) {}

}  // namespace spinbath
