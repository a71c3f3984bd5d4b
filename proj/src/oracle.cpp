// Brute-force state-vector oracle for product observables.

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "spinbath/errors.hpp"
#include "spinbath/spectrum.hpp"

namespace spinbath::spectrum {

namespace {

using Matrix2 = std::array<std::array<cplx, 2>, 2>;  // [row][col], index 0 = up, 1 = down

Matrix2 local_matrix(double uu, double dd, cplx du) { return {{{uu, std::conj(du)}, {du, dd}}}; }

// Applies a 2x2 operator to the qubit at `bit` of every basis index.
void apply_local(std::vector<cplx>& state, std::size_t bit, const Matrix2& m) {
    const std::size_t stride = std::size_t{1} << bit;
    for (std::size_t base = 0; base < state.size(); base += 2 * stride) {
        for (std::size_t k = base; k < base + stride; ++k) {
            const cplx v0 = state[k];
            const cplx v1 = state[k + stride];
            state[k] = m[0][0] * v0 + m[0][1] * v1;
            state[k + stride] = m[1][0] * v0 + m[1][1] * v1;
        }
    }
}

cplx pairwise_sum(std::span<const cplx> terms) {
    if (terms.size() <= 8) {
        cplx s{0.0, 0.0};
        for (const auto& x : terms) s += x;
        return s;
    }
    const std::size_t half = terms.size() / 2;
    return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

}  // namespace

double brute_force_expectation(const SpinBathModel& model, const FullObservable& obs, double t, std::size_t cap) {
    const std::size_t n = model.size();
    if (n > cap || n >= 40) {
        throw CapExceededError(n, cap, std::ldexp(3.0 * sizeof(cplx), static_cast<int>(std::min<std::size_t>(n + 1, 1000))));
    }
    obs.validate(n);

    // Basis index: bit n holds the central spin, bit (n - 1 - i) environment spin i; 0 = up.
    const std::size_t dim = std::size_t{1} << (n + 1);
    const auto spins = model.spins();
    std::vector<cplx> psi(dim);
    for (std::size_t x = 0; x < dim; ++x) {
        const unsigned central = (x >> n) & 1U;
        cplx amp = central ? model.b() : model.a();
        double energy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const unsigned bit = (x >> (n - 1 - i)) & 1U;
            amp *= bit ? spins[i].beta : spins[i].alpha;
            // 1/2 g_i sigma_z(P) sigma_z(i): sign is the parity of the two bits
            energy += ((central ^ bit) ? -0.5 : 0.5) * spins[i].g;
        }
        psi[x] = amp * std::polar(1.0, -energy * t);
    }

    std::vector<cplx> o_psi = psi;
    const auto& sys = obs.system_part;
    apply_local(o_psi, n, local_matrix(sys.s_uu, sys.s_dd, sys.s_du));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = obs.env_parts[i];
        apply_local(o_psi, n - 1 - i, local_matrix(e.e_uu, e.e_dd, e.e_du));
    }

    std::vector<cplx> terms(dim);
    for (std::size_t x = 0; x < dim; ++x) terms[x] = std::conj(psi[x]) * o_psi[x];
    return pairwise_sum(terms).real();
}

}  // namespace spinbath::spectrum
