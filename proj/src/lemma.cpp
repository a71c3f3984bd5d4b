#include "spinbath/lemma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "spinbath/errors.hpp"
#include "spinbath/evolution.hpp"

namespace spinbath::lemma {

WeightedPointSet WeightedPointSet::from_spectrum(const spectrum::SpectralDecomposition& dec) {
    WeightedPointSet set;
    set.points.reserve(dec.lines.size());
    set.weights.reserve(dec.lines.size());
    for (const auto& line : dec.lines) {
        set.points.push_back(line.omega);
        set.weights.push_back(line.weight);
    }
    return set;
}

void WeightedPointSet::validate() const {
    if (points.size() != weights.size()) throw InvalidParameterError("point set: points and weights differ in length");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i])) throw InvalidParameterError("point set: non-finite point");
        if (i > 0 && points[i] < points[i - 1]) throw InvalidParameterError("point set: points must be non-decreasing");
        if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
            throw InvalidParameterError("point set: weights must be finite and non-negative");
        }
    }
}

QcDiagnostics point_statistics(const std::vector<double>& sorted_points, double lo, double hi) {
    QcDiagnostics diag;
    const std::size_t n = sorted_points.size();
    diag.n_points = static_cast<double>(n);
    if (n < 2 || !(hi > lo)) return diag;

    double mean = 0.0;
    for (std::size_t i = 1; i < n; ++i) mean += sorted_points[i] - sorted_points[i - 1];
    mean /= static_cast<double>(n - 1);
    double var = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double d = (sorted_points[i] - sorted_points[i - 1]) - mean;
        var += d * d;
    }
    var /= static_cast<double>(n - 1);
    diag.gap_cv = mean > 0.0 ? std::sqrt(var) / mean : 0.0;

    double ks = 0.0;
    const double width = hi - lo;
    const double count = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = std::clamp((sorted_points[i] - lo) / width, 0.0, 1.0);
        ks = std::max({ks, std::abs(static_cast<double>(i + 1) / count - u), std::abs(u - static_cast<double>(i) / count)});
    }
    diag.ks_stat = ks;
    return diag;
}

QcResult check_quasi_continuous(const WeightedPointSet& set, const QcThresholds& thresholds) {
    set.validate();
    if (set.size() < 2) throw InvalidParameterError("check_quasi_continuous: need at least 2 points");
    if (set.points.front() == set.points.back()) throw DegenerateSetError("check_quasi_continuous: all points coincide");

    QcResult result;
    result.diagnostics = point_statistics(set.points, set.points.front(), set.points.back());
    result.passed = set.size() >= thresholds.n_min && result.diagnostics.gap_cv <= thresholds.cv_max &&
                    result.diagnostics.ks_stat <= thresholds.ks_max;
    return result;
}

std::size_t default_group_count(std::size_t n_points) {
    auto g = static_cast<std::size_t>(std::sqrt(static_cast<double>(n_points)));
    while (g * g < n_points) ++g;
    while (g > 1 && (g - 1) * (g - 1) >= n_points) --g;
    return std::max<std::size_t>(g, 1);
}

PartitionScheme make_partition(const WeightedPointSet& set, std::size_t g_groups) {
    const std::size_t n = set.size();
    if (g_groups == 0 || g_groups > n) throw InvalidParameterError("make_partition: need 1 <= G <= number of points");
    PartitionScheme scheme;
    scheme.g_groups = g_groups;
    const std::size_t base = n / g_groups;
    const std::size_t larger = n % g_groups;
    scheme.p_per_group = (larger > 0 ? base + 1 : base) - 1;
    std::size_t begin = 0;
    for (std::size_t k = 0; k < g_groups; ++k) {
        const std::size_t size = base + (k < larger ? 1 : 0);
        scheme.group_boundaries.emplace_back(begin, begin + size);
        begin += size;
    }
    return scheme;
}

L1Result check_l1(const WeightedPointSet& set, const PartitionScheme& partition, const L1Thresholds& thresholds) {
    set.validate();
    if (partition.group_boundaries.empty() || partition.group_boundaries.back().second != set.size()) {
        throw InvalidParameterError("check_l1: partition does not cover the point set");
    }
    L1Result result;
    for (double w : set.weights) result.max_weight = std::max(result.max_weight, w);
    for (std::size_t k = 0; k < partition.group_boundaries.size(); ++k) {
        const auto [begin, end] = partition.group_boundaries[k];
        const auto [lo, hi] = std::minmax_element(set.weights.begin() + static_cast<std::ptrdiff_t>(begin),
                                                  set.weights.begin() + static_cast<std::ptrdiff_t>(end));
        const double deviation = *hi - *lo;
        if (deviation > result.max_group_deviation) {
            result.max_group_deviation = deviation;
            result.worst_group = k;
        }
    }
    result.passed = result.max_weight <= thresholds.eps_global && result.max_group_deviation <= thresholds.eps_group;
    return result;
}

cplx lemma_sum(const WeightedPointSet& set, double t, Normalization normalization) {
    set.validate();
    const double scale = normalization == Normalization::DivideByN && set.size() > 0 ? 1.0 / static_cast<double>(set.size()) : 1.0;
    cplx sum{0.0, 0.0};
    for (std::size_t i = 0; i < set.size(); ++i) {
        const double w = normalization == Normalization::DivideByN ? set.weights[i] * scale : set.weights[i];
        sum += w * std::polar(1.0, set.points[i] * t);
    }
    return sum;
}

// ---------------------------------------------------------------------------

namespace {

// Denominator of the first continued-fraction convergent p/q of x (x >= 1) that satisfies
// |q x - p| <= tol * x, or 0 if none exists with q <= q_max.
std::uint64_t rational_denominator(long double x, std::uint64_t q_max, long double tol) {
    long double y = x;
    long double p_prev = 0.0L, q_prev = 1.0L;
    long double p = 1.0L, q = 0.0L;
    for (int iteration = 0; iteration < 96; ++iteration) {
        const long double term = std::floor(y);
        const long double p_next = term * p + p_prev;
        const long double q_next = term * q + q_prev;
        if (q_next > static_cast<long double>(q_max)) return 0;
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
        if (std::abs(q * x - p) <= tol * x) return static_cast<std::uint64_t>(q);
        const long double frac = y - term;
        if (frac <= 0.0L) return 0;
        y = 1.0L / frac;
    }
    return 0;
}

}  // namespace

RecurrenceTime estimate_recurrence_time(const WeightedPointSet& set, const RecurrenceOptions& options) {
    set.validate();
    std::vector<double> distinct(set.points);
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2) return RecurrenceTime::effectively_infinite();

    std::vector<double> gaps;
    gaps.reserve(distinct.size() - 1);
    for (std::size_t i = 1; i < distinct.size(); ++i) gaps.push_back(distinct[i] - distinct[i - 1]);
    const double smallest = *std::min_element(gaps.begin(), gaps.end());

    const long double tol = options.rel_tolerance;
    std::uint64_t lcm = 1;
    for (double gap : gaps) {
        const long double ratio = static_cast<long double>(gap) / smallest;
        const std::uint64_t q = rational_denominator(ratio, options.q_max, tol);
        if (q == 0) return RecurrenceTime::effectively_infinite();
        lcm = std::lcm(lcm, q);
        if (lcm > options.q_max) return RecurrenceTime::effectively_infinite();
    }

    const long double base = static_cast<long double>(smallest) / static_cast<long double>(lcm);
    long double multiples = 0.0L;
    for (double gap : gaps) {
        const long double m = static_cast<long double>(gap) / base;
        const long double rounded = std::round(m);
        if (rounded < 1.0L || std::abs(m - rounded) > tol * m) return RecurrenceTime::effectively_infinite();
        multiples += rounded;
    }
    const double spacing = static_cast<double>((static_cast<long double>(distinct.back()) - distinct.front()) / multiples);
    return RecurrenceTime::finite(2.0 * std::numbers::pi / spacing, spacing);
}

// ---------------------------------------------------------------------------

namespace {

LemmaReport enumerated_verdict(const SpinBathModel& model, const VerdictConfig& config) {
    const auto dec = spectrum::spectral_decomposition(model, config.omega_tolerance, config.enumeration_cap);
    const auto set = WeightedPointSet::from_spectrum(dec);

    LemmaReport report;
    report.route = Route::Enumerated;
    report.n_points = static_cast<double>(set.size());
    report.sum_of_weights = dec.total_weight();
    report.max_multiplicity = dec.max_multiplicity();

    if (set.size() >= 2 && set.points.front() != set.points.back()) {
        const auto qc = check_quasi_continuous(set, config.qc);
        report.quasi_continuous = qc.passed;
        report.qc_gap_cv = qc.diagnostics.gap_cv;
        report.qc_ks_stat = qc.diagnostics.ks_stat;
    }

    const std::size_t groups = config.g_groups > 0 ? config.g_groups : default_group_count(set.size());
    const auto partition = make_partition(set, groups);
    const auto l1 = check_l1(set, partition, config.l1);
    report.in_l1 = l1.passed;
    report.l1_max_weight = l1.max_weight;
    report.l1_max_group_deviation = l1.max_group_deviation;
    report.l1_worst_group = l1.worst_group;
    report.g_groups = partition.g_groups;
    report.p_per_group = partition.p_per_group;

    report.recurrence_time = estimate_recurrence_time(set, config.recurrence);
    if (report.recurrence_time.is_finite()) {
        report.lemma_sum_magnitude_at_half_tp =
            std::abs(lemma_sum(set, 0.5 * report.recurrence_time.period(), Normalization::RawWeights));
    }
    return report;
}

std::size_t saturating_size(double x) {
    constexpr auto max = std::numeric_limits<std::size_t>::max();
    return x >= static_cast<double>(max) ? max : static_cast<std::size_t>(x);
}

LemmaReport sampled_verdict(const SpinBathModel& model, const VerdictConfig& config) {
    const std::size_t n = model.size();
    std::vector<double> magnitudes;
    magnitudes.reserve(n);
    for (const auto& s : model.spins()) magnitudes.push_back(std::abs(s.g));
    std::sort(magnitudes.begin(), magnitudes.end());
    const double radius = config.omega_tolerance * model.max_abs_coupling();
    for (std::size_t i = 1; i < n; ++i) {
        if (magnitudes[i] - magnitudes[i - 1] <= radius) {
            // repeated couplings merge lines, and merged weights need the full enumeration
            throw CapExceededError(n, config.enumeration_cap, std::ldexp(48.0, static_cast<int>(std::min<std::size_t>(n, 1000))));
        }
    }
    if (config.sample_size < 2) throw InvalidParameterError("decoherence_verdict: sample_size must be at least 2");

    LemmaReport report;
    report.route = Route::Sampled;
    report.n_points = std::ldexp(1.0, static_cast<int>(std::min<std::size_t>(n, 2000)));
    report.sum_of_weights = spectrum::total_weight(model);
    report.max_multiplicity = 1;

    // shape statistics of a seeded uniform sample of indices
    Rng rng(config.sample_seed);
    std::vector<double> sample;
    sample.reserve(config.sample_size);
    for (std::size_t k = 0; k < config.sample_size; ++k) {
        double omega_hi = 0.0;
        double omega_lo = 0.0;
        std::uint64_t bits = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i % 64 == 0) bits = rng.bits();
            const double g = (bits & 1U) ? -model.spins()[i].g : model.spins()[i].g;
            bits >>= 1;
            const double s = omega_hi + g;
            const double bb = s - omega_hi;
            double e = (omega_hi - (s - bb)) + (g - bb) + omega_lo;
            omega_hi = s + e;
            omega_lo = e - (omega_hi - s);
        }
        sample.push_back(omega_hi + omega_lo);
    }
    std::sort(sample.begin(), sample.end());
    double span = 0.0;
    for (double m : magnitudes) span += m;
    const auto diag = point_statistics(sample, -span, span);
    report.qc_gap_cv = diag.gap_cv;
    report.qc_ks_stat = diag.ks_stat;
    report.quasi_continuous = report.n_points >= static_cast<double>(config.qc.n_min) && diag.gap_cv <= config.qc.cv_max &&
                              diag.ks_stat <= config.qc.ks_max;

    // every weight lies in [0, max], so max also bounds the spread inside any group
    const double max_weight = spectrum::max_index_weight(model);
    const double groups = std::ceil(std::sqrt(report.n_points));
    report.g_groups = config.g_groups > 0 ? config.g_groups : saturating_size(groups);
    report.p_per_group = saturating_size(std::ceil(report.n_points / static_cast<double>(report.g_groups)) - 1.0);
    report.l1_max_weight = max_weight;
    report.l1_max_group_deviation = max_weight;
    report.l1_worst_group = 0;
    report.in_l1 = max_weight <= config.l1.eps_global && max_weight <= config.l1.eps_group;

    // frequency differences generate the lattice spanned by {2 |g_i|}
    WeightedPointSet lattice;
    lattice.points.push_back(0.0);
    for (double m : magnitudes) lattice.points.push_back(2.0 * m);
    lattice.weights.assign(lattice.points.size(), 0.0);
    report.recurrence_time = estimate_recurrence_time(lattice, config.recurrence);
    if (report.recurrence_time.is_finite()) {
        report.lemma_sum_magnitude_at_half_tp = std::abs(evolution::r_of_t(model, 0.5 * report.recurrence_time.period()));
    }
    return report;
}

}  // namespace

LemmaReport decoherence_verdict(const SpinBathModel& model, const VerdictConfig& config) {
    LemmaReport report;
    if (model.size() <= config.enumeration_cap || config.large_bath == LargeBathRoute::Fail) {
        report = enumerated_verdict(model, config);
    } else {
        report = sampled_verdict(model, config);
    }
    report.verdict = report.quasi_continuous && report.in_l1 ? Verdict::Decoheres : Verdict::NoVerdict;
    return report;
}

const char* to_string(Verdict verdict) { return verdict == Verdict::Decoheres ? "Decoheres" : "NoVerdict"; }

const char* to_string(Route route) { return route == Route::Enumerated ? "enumerated" : "sampled"; }

}  // namespace spinbath::lemma
