// evolution.hpp: closed-form unitary evolution of the spin-bath model
//
// Every quantity here is an N-fold product evaluated in a single pass, O(N) per time point.

#pragma once

#include <optional>
#include <vector>

#include "spinbath/model.hpp"

namespace spinbath::evolution {

/// Dephasing factor r(t) = <E_down(t)|E_up(t)> = prod_i (|alpha_i|^2 e^{-i g_i t} + |beta_i|^2 e^{+i g_i t}).
cplx r_of_t(const SpinBathModel& model, double t);

/// |r(t)|^2 from the real product prod_i (|alpha_i|^4 + |beta_i|^4 + 2 |alpha_i|^2 |beta_i|^2 cos 2 g_i t).
double r_squared(const SpinBathModel& model, double t);

struct RBounds {
    double lower;  // prod_i (2 |alpha_i|^2 - 1)^2
    double upper;  // 1
};
RBounds r_bounds(const SpinBathModel& model);

/// <O_S (x) I_E> at time t.
double expectation_relevant(const SpinBathModel& model, const RelevantObservable& obs, double t);

/// Environment factors of a product observable. gamma0_up / gamma0_down are the environment
/// expectation values on the |up> / |down> branches of the central spin; gamma1 is the
/// off-diagonal overlap <E_down(t)| O_E |E_up(t)>. For O_E = I they reduce to 1, 1 and r(t).
struct EnvironmentFactors {
    double gamma0_up;
    double gamma0_down;
    cplx gamma1;
};
EnvironmentFactors environment_factors(const SpinBathModel& model, const FullObservable& obs, double t);

/// <O_P (x) O_1 (x) ... (x) O_N> at time t. Throws DimensionMismatchError.
double expectation_full(const SpinBathModel& model, const FullObservable& obs, double t);

/// Reduced density matrix of the central spin in the {up, down} basis.
struct ReducedState {
    double p_uu;
    double p_dd;
    cplx coherence;  // <up| rho_S |down>

    /// Tr(rho_S O_S)
    double expectation(const RelevantObservable& obs) const;
};
ReducedState reduced_state(const SpinBathModel& model, double t);

struct TimeSeries {
    std::vector<double> times;
    std::vector<cplx> r_values;
    std::optional<std::vector<double>> expectation_values;

    std::size_t size() const { return times.size(); }
    std::vector<double> r_squared() const;
};

/// Samples r(t) (and <O_R>(t) when `obs` is set) on `steps` equally spaced points covering
/// [t_start, t_end] inclusive. Throws InvalidParameterError unless t_start < t_end and steps >= 2.
TimeSeries sample_series(const SpinBathModel& model, double t_start, double t_end, std::size_t steps,
                         const std::optional<RelevantObservable>& obs = std::nullopt);

}  // namespace spinbath::evolution
