#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "halfint.hpp"

namespace atomsim {

namespace detail {

inline double factorial(int n) {
    static const auto table = [] {
        std::array<double, 171> t{};
        t[0] = 1.0;
        for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * static_cast<double>(i);
        return t;
    }();
    if (n < 0 || n >= static_cast<int>(table.size()))
        throw std::domain_error("factorial argument out of range");
    return table[static_cast<std::size_t>(n)];
}

} // namespace detail

// Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M> in the Condon-Shortley
// phase convention, evaluated from Racah's algebraic sum. Returns 0 when
// M != m1 + m2 or the triangle rule fails; throws on arguments that do
// not describe valid angular-momentum states.
inline double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M) {
    if (j1.twice() < 0 || j2.twice() < 0 || J.twice() < 0)
        throw std::invalid_argument("clebsch_gordan: negative angular momentum");
    if (abs(m1) > j1 || abs(m2) > j2 || abs(M) > J)
        throw std::invalid_argument("clebsch_gordan: |m| exceeds j");
    if (!(j1 - m1).is_integer() || !(j2 - m2).is_integer() || !(J - M).is_integer())
        throw std::invalid_argument("clebsch_gordan: m not compatible with j");

    if (m1 + m2 != M) return 0.0;
    if (!(j1 + j2 - J).is_integer()) return 0.0;  // triangle requires integer perimeter
    if ((j1 + j2 - J).twice() < 0 || (j1 - j2 + J).twice() < 0 || (j2 - j1 + J).twice() < 0)
        return 0.0;

    using detail::factorial;
    const auto f = [](HalfInt h) { return factorial(h.twice() / 2); };

    const double pre = std::sqrt((J.twice() + 1.0) *
                                 f(j1 + j2 - J) * f(j1 - j2 + J) * f(j2 - j1 + J) /
                                 f(j1 + j2 + J + 1)) *
                       std::sqrt(f(J + M) * f(J - M) *
                                 f(j1 + m1) * f(j1 - m1) * f(j2 + m2) * f(j2 - m2));

    // summation index bounds keep every factorial argument non-negative
    const int k_min = std::max({0, (j2 - J - m1).twice() / 2, (j1 - J + m2).twice() / 2});
    const int k_max = std::min({(j1 + j2 - J).twice() / 2, (j1 - m1).twice() / 2, (j2 + m2).twice() / 2});

    double sum = 0.0;
    for (int k = k_min; k <= k_max; ++k) {
        const double den = factorial(k) *
                           f(j1 + j2 - J - k) *
                           f(j1 - m1 - k) *
                           f(j2 + m2 - k) *
                           f(J - j2 + m1 + k) *
                           f(J - j1 - m2 + k);
        sum += (k % 2 == 0 ? 1.0 : -1.0) / den;
    }
    return pre * sum;
}

// One allowed electric-dipole sublevel pair of a manifold -> manifold
// transition, with its relative amplitude.
struct TransitionAmplitude {
    HalfInt m_lower;
    HalfInt m_upper;
    double amplitude;  // <F_l m_l; 1 q | F_u m_u>
};

// Enumerates sublevel pairs coupled by polarization component q
// (m_upper = m_lower + q, |dF| <= 1). Pairs whose coefficient vanishes
// (including F=0 -> F=0) are omitted.
inline std::vector<TransitionAmplitude> transition_amplitudes(HalfInt f_lower, HalfInt f_upper, int q) {
    if (q < -1 || q > 1) throw std::invalid_argument("transition_amplitudes: q must be -1, 0 or +1");
    std::vector<TransitionAmplitude> out;
    if (abs(f_upper - f_lower).twice() > 2) return out;
    for (int tm = -f_lower.twice(); tm <= f_lower.twice(); tm += 2) {
        const HalfInt ml = HalfInt::from_twice(tm);
        const HalfInt mu = ml + HalfInt(q);
        if (abs(mu) > f_upper) continue;
        const double amp = clebsch_gordan(f_lower, ml, HalfInt(1), HalfInt(q), f_upper, mu);
        if (std::abs(amp) < 1e-14) continue;
        out.push_back({ml, mu, amp});
    }
    return out;
}

} // namespace atomsim
