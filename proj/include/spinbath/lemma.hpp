// lemma.hpp: decision procedure for decoherence of a finite trigonometric sum
//
// Given weighted frequencies {(x_i, f(x_i))}, sum_i f(x_i) e^{i x_i t} becomes negligible around
// half the recurrence time when (1) the point set is large and spread out like a uniform set
// that splits into many large groups ("quasi-continuous of class 1"), and (2) the weight is
// roughly constant inside every group and small overall ("in L1"). This module checks both
// hypotheses, estimates the recurrence time and combines them into a verdict. The verdict is
// decided by the hypotheses alone; the sum at t_P/2 is only reported.

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spinbath/model.hpp"
#include "spinbath/spectrum.hpp"

namespace spinbath::lemma {

struct WeightedPointSet {
    std::vector<double> points;   // non-decreasing
    std::vector<double> weights;  // non-negative, same length

    static WeightedPointSet from_spectrum(const spectrum::SpectralDecomposition& dec);
    std::size_t size() const { return points.size(); }
    /// Throws InvalidParameterError on length mismatch, unsorted points or negative weights.
    void validate() const;
};

// ---------------------------------------------------------------------------
// Quasi-continuity

struct QcThresholds {
    std::size_t n_min = 64;
    double cv_max = std::numeric_limits<double>::infinity();
    double ks_max = 0.5;
};

struct QcDiagnostics {
    double n_points = 0.0;
    double gap_cv = 0.0;    // coefficient of variation of consecutive gaps
    double ks_stat = 0.0;   // sup |F_empirical - F_uniform[min, max]|
};

struct QcResult {
    bool passed = false;
    QcDiagnostics diagnostics;
};

/// Throws InvalidParameterError for fewer than 2 points, DegenerateSetError if they coincide.
QcResult check_quasi_continuous(const WeightedPointSet& set, const QcThresholds& thresholds = {});

/// Gap CV and KS statistic of a sorted sample against the uniform law on [lo, hi].
QcDiagnostics point_statistics(const std::vector<double>& sorted_points, double lo, double hi);

// ---------------------------------------------------------------------------
// Partition and L1 condition

struct PartitionScheme {
    std::size_t g_groups = 0;
    std::size_t p_per_group = 0;  // ceil(n / G) - 1
    std::vector<std::pair<std::size_t, std::size_t>> group_boundaries;  // half-open [begin, end)
};

/// Contiguous groups in sorted order whose sizes differ by at most one; the larger groups
/// come first. Throws InvalidParameterError unless 1 <= g_groups <= n.
PartitionScheme make_partition(const WeightedPointSet& set, std::size_t g_groups);

/// ceil(sqrt(n)), the default group count.
std::size_t default_group_count(std::size_t n_points);

struct L1Thresholds {
    double eps_global = 1e-2;
    double eps_group = 1e-2;
};

struct L1Result {
    bool passed = false;
    double max_weight = 0.0;
    double max_group_deviation = 0.0;  // max over groups of (max - min) weight
    std::size_t worst_group = 0;
};

L1Result check_l1(const WeightedPointSet& set, const PartitionScheme& partition,
                  const L1Thresholds& thresholds = {});

// ---------------------------------------------------------------------------
// Lemma sum and recurrence time

enum class Normalization {
    RawWeights,  // sum_i w_i e^{i x_i t}
    DivideByN,   // sum_i (w_i / n) e^{i x_i t}
};

cplx lemma_sum(const WeightedPointSet& set, double t, Normalization normalization = Normalization::RawWeights);

/// Recurrence time, or "effectively infinite" when the frequencies share no common spacing.
class RecurrenceTime {
public:
    static RecurrenceTime finite(double period, double spacing) { return RecurrenceTime(period, spacing); }
    static RecurrenceTime effectively_infinite() { return RecurrenceTime(); }

    bool is_finite() const { return period_.has_value(); }
    double period() const { return period_.value(); }
    double spacing() const { return spacing_; }

private:
    RecurrenceTime() = default;
    RecurrenceTime(double period, double spacing) : period_(period), spacing_(spacing) {}
    std::optional<double> period_;
    double spacing_ = 0.0;
};

struct RecurrenceOptions {
    std::uint64_t q_max = 1'000'000;
    double rel_tolerance = 1e-9;
};

/// Rationalizes every consecutive spacing against the smallest one by continued fractions.
/// A convergent p/q of the ratio x is accepted when the integer relation holds,
/// |q x - p| <= rel_tolerance * x, with q <= q_max. The common divisor is the smallest spacing
/// divided by the lcm of the denominators; t_P = 2 pi / Delta. Sets with a single distinct
/// point have no recurrence structure and return effectively_infinite().
RecurrenceTime estimate_recurrence_time(const WeightedPointSet& set, const RecurrenceOptions& options = {});

// ---------------------------------------------------------------------------
// Verdict for the spin-bath model

enum class Verdict { Decoheres, NoVerdict };

/// How a bath larger than the enumeration cap is handled.
enum class LargeBathRoute {
    Fail,    // throw CapExceededError
    Sampled  // analytic cardinality and weight bounds, sampled shape statistics
};

enum class Route { Enumerated, Sampled };

struct VerdictConfig {
    QcThresholds qc;
    L1Thresholds l1;
    std::size_t g_groups = 0;  // 0 selects ceil(sqrt(n_points))
    RecurrenceOptions recurrence;
    double omega_tolerance = 0.0;
    std::size_t enumeration_cap = spectrum::kDefaultEnumerationCap;
    LargeBathRoute large_bath = LargeBathRoute::Sampled;
    std::size_t sample_size = std::size_t{1} << 16;
    std::uint64_t sample_seed = 0x5eed'0bad'cafe'f00dULL;
};

struct LemmaReport {
    Route route = Route::Enumerated;
    double n_points = 0.0;
    bool quasi_continuous = false;
    double qc_gap_cv = 0.0;
    double qc_ks_stat = 0.0;
    bool in_l1 = false;
    double l1_max_weight = 0.0;
    double l1_max_group_deviation = 0.0;
    std::size_t l1_worst_group = 0;
    std::size_t g_groups = 0;
    std::size_t p_per_group = 0;
    RecurrenceTime recurrence_time = RecurrenceTime::effectively_infinite();
    std::optional<double> lemma_sum_magnitude_at_half_tp;
    double sum_of_weights = 0.0;
    std::uint64_t max_multiplicity = 1;
    Verdict verdict = Verdict::NoVerdict;

    bool has_degeneracies() const { return max_multiplicity > 1; }
};

/// Runs both hypothesis checks on the deduplicated spectrum of `model`.
/// For N above the enumeration cap and LargeBathRoute::Sampled: n_points = 2^N, the largest
/// weight is the exact product of per-spin maxima (which also bounds every group deviation),
/// the shape statistics come from `sample_size` seeded indices, and t_P is estimated from the
/// coupling lattice {0, 2|g_i|}. The sampled route needs pairwise distinct |g_i| and throws
/// CapExceededError otherwise.
LemmaReport decoherence_verdict(const SpinBathModel& model, const VerdictConfig& config = {});

const char* to_string(Verdict verdict);
const char* to_string(Route route);

}  // namespace spinbath::lemma
