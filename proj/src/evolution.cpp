#include "spinbath/evolution.hpp"

#include <cmath>

#include "spinbath/errors.hpp"

namespace spinbath::evolution {

cplx r_of_t(const SpinBathModel& model, double t) {
    cplx r{1.0, 0.0};
    for (const auto& s : model.spins()) {
        const cplx phase = std::polar(1.0, -s.g * t);  // e^{-i g t}
        r *= s.population_up() * phase + s.population_down() * std::conj(phase);
    }
    return r;
}

double r_squared(const SpinBathModel& model, double t) {
    double product = 1.0;
    for (const auto& s : model.spins()) {
        const double up = s.population_up();
        const double down = s.population_down();
        product *= up * up + down * down + 2.0 * up * down * std::cos(2.0 * s.g * t);
    }
    return product;
}

RBounds r_bounds(const SpinBathModel& model) {
    double lower = 1.0;
    for (const auto& s : model.spins()) {
        const double d = 2.0 * s.population_up() - 1.0;
        lower *= d * d;
    }
    return {lower, 1.0};
}

double expectation_relevant(const SpinBathModel& model, const RelevantObservable& obs, double t) {
    const cplx a = model.a();
    const cplx b = model.b();
    return std::norm(a) * obs.s_uu + std::norm(b) * obs.s_dd + 2.0 * (a * std::conj(b) * obs.s_du * r_of_t(model, t)).real();
}

EnvironmentFactors environment_factors(const SpinBathModel& model, const FullObservable& obs, double t) {
    obs.validate(model.size());
    double gamma0_up = 1.0;
    double gamma0_down = 1.0;
    cplx gamma1{1.0, 0.0};
    const auto spins = model.spins();
    for (std::size_t i = 0; i < spins.size(); ++i) {
        const auto& s = spins[i];
        const auto& e = obs.env_parts[i];
        const double up = s.population_up();
        const double down = s.population_down();
        const cplx interference = s.alpha * std::conj(s.beta) * e.e_du;
        const cplx phase = std::polar(1.0, -s.g * t);  // e^{-i g t}
        const double diagonal = up * e.e_uu + down * e.e_dd;
        gamma0_up *= diagonal + 2.0 * (interference * phase).real();
        gamma0_down *= diagonal + 2.0 * (interference * std::conj(phase)).real();
        gamma1 *= up * e.e_uu * phase + down * e.e_dd * std::conj(phase) + 2.0 * interference.real();
    }
    return {gamma0_up, gamma0_down, gamma1};
}

double expectation_full(const SpinBathModel& model, const FullObservable& obs, double t) {
    const auto factors = environment_factors(model, obs, t);
    const cplx a = model.a();
    const cplx b = model.b();
    const auto& sys = obs.system_part;
    return std::norm(a) * sys.s_uu * factors.gamma0_up + std::norm(b) * sys.s_dd * factors.gamma0_down +
           2.0 * (a * std::conj(b) * sys.s_du * factors.gamma1).real();
}

double ReducedState::expectation(const RelevantObservable& obs) const {
    // Tr(rho O) with rho_{ud} = coherence, O_{du} = s_du
    return p_uu * obs.s_uu + p_dd * obs.s_dd + 2.0 * (coherence * obs.s_du).real();
}

ReducedState reduced_state(const SpinBathModel& model, double t) {
    const cplx a = model.a();
    const cplx b = model.b();
    return {std::norm(a), std::norm(b), a * std::conj(b) * r_of_t(model, t)};
}

std::vector<double> TimeSeries::r_squared() const {
    std::vector<double> out;
    out.reserve(r_values.size());
    for (const auto& r : r_values) out.push_back(std::norm(r));
    return out;
}

TimeSeries sample_series(const SpinBathModel& model, double t_start, double t_end, std::size_t steps,
                         const std::optional<RelevantObservable>& obs) {
    if (!std::isfinite(t_start) || !std::isfinite(t_end) || !(t_start < t_end)) {
        throw InvalidParameterError("sample_series: need finite t_start < t_end");
    }
    if (steps < 2) throw InvalidParameterError("sample_series: steps must be at least 2");
    if (obs) obs->validate();

    TimeSeries series;
    series.times.reserve(steps);
    series.r_values.reserve(steps);
    if (obs) series.expectation_values.emplace().reserve(steps);

    const double span = t_end - t_start;
    const double intervals = static_cast<double>(steps - 1);
    const cplx a = model.a();
    const cplx b = model.b();
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = (k + 1 == steps) ? t_end : t_start + (span * static_cast<double>(k)) / intervals;
        const cplx r = r_of_t(model, t);
        series.times.push_back(t);
        series.r_values.push_back(r);
        if (obs) {
            series.expectation_values->push_back(std::norm(a) * obs->s_uu + std::norm(b) * obs->s_dd +
                                                 2.0 * (a * std::conj(b) * obs->s_du * r).real());
        }
    }
    return series;
}

}  // namespace spinbath::evolution
