#include "spinbath/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spinbath/errors.hpp"

namespace spinbath::spectrum {

namespace {

// Unevaluated sum hi + lo carrying a running frequency without rounding error, so that
// equal subset sums round to the same double whatever the order of their terms.
struct DoubleDouble {
    double hi = 0.0;
    double lo = 0.0;

    void add(double x) {
        const double s = hi + x;
        const double bb = s - hi;
        double e = (hi - (s - bb)) + (x - bb);
        e += lo;
        hi = s + e;
        lo = e - (hi - s);
    }
    double value() const { return hi + lo; }
};

std::uint64_t index_count(std::size_t n) { return std::uint64_t{1} << n; }

void check_cap(std::size_t n, std::size_t cap, double bytes_per_entry) {
    if (n > cap || n >= 63) {
        throw CapExceededError(n, cap, std::ldexp(bytes_per_entry, static_cast<int>(std::min<std::size_t>(n, 1000))));
    }
}

void check_index(const SpinBathModel& model, std::uint64_t nu) {
    const std::size_t n = model.size();
    if (n < 64 && nu >= index_count(n)) {
        throw IndexOutOfRangeError("index " + std::to_string(nu) + " outside [0, 2^" + std::to_string(n) + ")");
    }
}

// Bit of nu that belongs to spin i: the last spin owns the least significant bit.
bool selects_alpha(std::uint64_t nu, std::size_t i, std::size_t n) { return ((nu >> (n - 1 - i)) & 1U) != 0; }

struct Term {
    double omega;
    double weight;
    std::uint64_t nu;
};

// All 2^N terms in index order. Spins are folded in from first to last, each level doubling the
// table in place, so every entry shares its prefix products and sums with its siblings.
std::vector<Term> enumerate_terms(const SpinBathModel& model) {
    const std::size_t n = model.size();
    const std::uint64_t total = index_count(n);
    std::vector<DoubleDouble> omega(total);
    std::vector<double> weight(total, 0.0);
    weight[0] = 1.0;
    std::uint64_t filled = 1;
    for (const auto& s : model.spins()) {
        const double up = s.population_up();
        const double down = s.population_down();
        for (std::uint64_t j = filled; j-- > 0;) {
            DoubleDouble plus = omega[j];
            DoubleDouble minus = omega[j];
            plus.add(s.g);
            minus.add(-s.g);
            const double w = weight[j];
            omega[2 * j] = plus;  // bit 0 selects beta
            weight[2 * j] = w * down;
            omega[2 * j + 1] = minus;  // bit 1 selects alpha
            weight[2 * j + 1] = w * up;
        }
        filled *= 2;
    }
    std::vector<Term> terms(total);
    for (std::uint64_t nu = 0; nu < total; ++nu) terms[nu] = {omega[nu].value(), weight[nu], nu};
    return terms;
}

template <typename Value, typename Emit>
void merge_sorted(const std::vector<Value>& sorted, double radius, Emit emit) {
    std::size_t begin = 0;
    while (begin < sorted.size()) {
        std::size_t end = begin + 1;
        while (end < sorted.size() && sorted[end].omega - sorted[begin].omega <= radius) ++end;
        emit(begin, end);
        begin = end;
    }
}

double line_position(double first, double last) { return first == last ? first : 0.5 * (first + last); }

}  // namespace

double omega_of_index(const SpinBathModel& model, std::uint64_t nu) {
    check_index(model, nu);
    const std::size_t n = model.size();
    DoubleDouble sum;
    for (std::size_t i = 0; i < n; ++i) {
        const double g = model.spins()[i].g;
        sum.add(selects_alpha(nu, i, n) ? -g : g);
    }
    return sum.value();
}

double weight_of_index(const SpinBathModel& model, std::uint64_t nu) {
    check_index(model, nu);
    const std::size_t n = model.size();
    double w = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = model.spins()[i];
        w *= selects_alpha(nu, i, n) ? s.population_up() : s.population_down();
    }
    return w;
}

double total_weight(const SpinBathModel& model) {
    double w = 1.0;
    for (const auto& s : model.spins()) w *= s.population_up() + s.population_down();
    return w;
}

double max_index_weight(const SpinBathModel& model) {
    double w = 1.0;
    for (const auto& s : model.spins()) w *= std::max(s.population_up(), s.population_down());
    return w;
}

double SpectralDecomposition::total_weight() const {
    double sum = 0.0;
    for (const auto& line : lines) sum += line.weight;
    return sum;
}

std::uint64_t SpectralDecomposition::total_multiplicity() const {
    std::uint64_t sum = 0;
    for (const auto& line : lines) sum += line.multiplicity;
    return sum;
}

std::uint64_t SpectralDecomposition::max_multiplicity() const {
    std::uint64_t m = 0;
    for (const auto& line : lines) m = std::max(m, line.multiplicity);
    return m;
}

double SpectralDecomposition::max_weight() const {
    double m = 0.0;
    for (const auto& line : lines) m = std::max(m, line.weight);
    return m;
}

SpectralDecomposition spectral_decomposition(const SpinBathModel& model, double omega_tolerance, std::size_t cap) {
    if (!(omega_tolerance >= 0.0) || !std::isfinite(omega_tolerance)) {
        throw InvalidParameterError("spectral_decomposition: omega_tolerance must be finite and non-negative");
    }
    check_cap(model.size(), cap, 2.0 * (sizeof(DoubleDouble) + sizeof(double) + sizeof(Term)));

    std::vector<Term> terms = enumerate_terms(model);
    std::sort(terms.begin(), terms.end(), [](const Term& x, const Term& y) {
        return x.omega < y.omega || (x.omega == y.omega && x.nu < y.nu);
    });

    SpectralDecomposition dec;
    dec.n_spins = model.size();
    const double radius = omega_tolerance * model.max_abs_coupling();
    merge_sorted(terms, radius, [&](std::size_t begin, std::size_t end) {
        double weight = 0.0;
        for (std::size_t k = begin; k < end; ++k) weight += terms[k].weight;
        dec.lines.push_back({line_position(terms[begin].omega, terms[end - 1].omega), weight, end - begin});
    });
    return dec;
}

cplx r_from_spectrum(const SpectralDecomposition& dec, double t) {
    cplx sum{0.0, 0.0};
    for (const auto& line : dec.lines) sum += line.weight * std::polar(1.0, line.omega * t);
    return sum;
}

std::vector<EnergyLevel> hamiltonian_spectrum(const SpinBathModel& model, double merge_tolerance, std::size_t cap) {
    if (!(merge_tolerance >= 0.0) || !std::isfinite(merge_tolerance)) {
        throw InvalidParameterError("hamiltonian_spectrum: merge_tolerance must be finite and non-negative");
    }
    check_cap(model.size(), cap, 2.0 * (sizeof(DoubleDouble) + sizeof(double) + sizeof(Term)));

    // |up, env> has energy omega_nu / 2 where bit 1 of nu marks a down environment spin;
    // |down, env> has the opposite energy.
    const std::vector<Term> terms = enumerate_terms(model);
    struct Energy {
        double omega;  // named for merge_sorted; holds the energy
    };
    std::vector<Energy> energies;
    energies.reserve(2 * terms.size());
    for (const auto& term : terms) {
        energies.push_back({0.5 * term.omega});
        energies.push_back({-0.5 * term.omega});
    }
    std::sort(energies.begin(), energies.end(), [](const Energy& x, const Energy& y) { return x.omega < y.omega; });

    std::vector<EnergyLevel> levels;
    merge_sorted(energies, merge_tolerance * model.max_abs_coupling(), [&](std::size_t begin, std::size_t end) {
        levels.push_back({line_position(energies[begin].omega, energies[end - 1].omega), end - begin});
    });
    return levels;
}

std::uint64_t degeneracy_count(std::uint64_t n, std::uint64_t l) {
    if (l > n) throw InvalidParameterError("degeneracy_count: need 0 <= l <= n");
    const std::uint64_t k = std::min(l, n - l);
    __extension__ using u128 = unsigned __int128;
    u128 c = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        // c * (n - k + i) / i is exact: the running value is C(n - k + i, i)
        c = c * (n - k + i) / i;
        if (c > std::numeric_limits<std::uint64_t>::max()) {
            throw OverflowError("degeneracy_count: 2 C(n, l) exceeds 64 bits");
        }
    }
    c *= 2;
    if (c > std::numeric_limits<std::uint64_t>::max()) throw OverflowError("degeneracy_count: 2 C(n, l) exceeds 64 bits");
    return static_cast<std::uint64_t>(c);
}

}  // namespace spinbath::spectrum
