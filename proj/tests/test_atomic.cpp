#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "atomsim/angular.hpp"
#include "atomsim/atoms.hpp"
#include "atomsim/constants.hpp"

using namespace atomsim;

namespace {

// Independent Clebsch-Gordan oracle: builds the coupled states |J M> in
// the |j1 m1>|j2 m2> product basis by explicit ladder-operator algebra
// (top states by Gram-Schmidt against higher-J towers, descendants via
// J-), with the Condon-Shortley sign fix on each top state. Shares no
// code with the Racah-formula implementation under test.
class CgOracle {
  public:
    CgOracle(HalfInt j1, HalfInt j2) : j1_(j1), j2_(j2) {
        const int d1 = j1.twice() + 1, d2 = j2.twice() + 1;
        dim_ = d1 * d2;
        for (int a = 0; a < d1; ++a)
            for (int b = 0; b < d2; ++b)
                basis_.push_back({HalfInt::from_twice(-j1.twice() + 2 * a),
                                  HalfInt::from_twice(-j2.twice() + 2 * b)});
        build();
    }

    double coefficient(HalfInt m1, HalfInt m2, HalfInt J, HalfInt M) const {
        auto it = states_.find(key(J, M));
        if (it == states_.end()) return 0.0;
        for (int i = 0; i < dim_; ++i)
            if (basis_[i].first == m1 && basis_[i].second == m2) return it->second[i];
        return 0.0;
    }

  private:
    static long key(HalfInt J, HalfInt M) { return J.twice() * 1000L + M.twice(); }

    static double lower_coeff(HalfInt j, HalfInt m) {  // J-|j m> = c |j m-1>
        return std::sqrt(j.value() * (j.value() + 1) - m.value() * (m.value() - 1));
    }

    std::vector<double> apply_lowering(const std::vector<double>& v) const {
        std::vector<double> out(dim_, 0.0);
        for (int i = 0; i < dim_; ++i) {
            if (v[i] == 0.0) continue;
            const auto [m1, m2] = basis_[i];
            if (m1 > -j1_) out[index(m1 - half(2), m2)] += lower_coeff(j1_, m1) * v[i];
            if (m2 > -j2_) out[index(m1, m2 - half(2))] += lower_coeff(j2_, m2) * v[i];
        }
        return out;
    }

    int index(HalfInt m1, HalfInt m2) const {
        const int a = (m1.twice() + j1_.twice()) / 2;
        const int b = (m2.twice() + j2_.twice()) / 2;
        return a * (j2_.twice() + 1) + b;
    }

    void build() {
        for (int tJ = (j1_ + j2_).twice(); tJ >= abs(j1_ - j2_).twice(); tJ -= 2) {
            const HalfInt J = HalfInt::from_twice(tJ);
            // top state: in the M = J subspace, orthogonal to all higher-J states
            std::vector<double> top(dim_, 0.0);
            bool seeded = false;
            for (int i = 0; i < dim_; ++i) {
                if ((basis_[i].first + basis_[i].second).twice() != tJ) continue;
                if (!seeded) {
                    top[i] = 1.0;
                    seeded = true;
                }
            }
            for (int tJp = tJ + 2; tJp <= (j1_ + j2_).twice(); tJp += 2) {
                const auto& other = states_.at(key(HalfInt::from_twice(tJp), J));
                double ov = 0.0;
                for (int i = 0; i < dim_; ++i) ov += other[i] * top[i];
                for (int i = 0; i < dim_; ++i) top[i] -= ov * other[i];
            }
            normalize(top);
            // Condon-Shortley: component with the largest m1 is positive
            for (int i = dim_ - 1; i >= 0; --i) {
                bool in_subspace = (basis_[i].first + basis_[i].second).twice() == tJ;
                if (in_subspace && std::abs(top[i]) > 1e-12) {
                    if (top[i] < 0)
                        for (double& x : top) x = -x;
                    break;
                }
            }
            states_[key(J, J)] = top;
            // descend the tower
            std::vector<double> cur = top;
            for (int tM = tJ - 2; tM >= -tJ; tM -= 2) {
                cur = apply_lowering(cur);
                normalize(cur);
                states_[key(J, HalfInt::from_twice(tM))] = cur;
            }
        }
    }

    static void normalize(std::vector<double>& v) {
        double n = 0.0;
        for (double x : v) n += x * x;
        n = std::sqrt(n);
        for (double& x : v) x /= n;
    }

    HalfInt j1_, j2_;
    int dim_;
    std::vector<std::pair<HalfInt, HalfInt>> basis_;
    std::map<long, std::vector<double>> states_;
};

} // namespace

TEST_CASE("clebsch_gordan matches the spec examples") {
    CHECK_THAT(clebsch_gordan(half(1), half(1), half(1), half(-1), 0, 0),
               Catch::Matchers::WithinAbs(1.0 / std::sqrt(2.0), 1e-14));
    // +1/sqrt(3) per the ladder-operator oracle for this argument order;
    // the table value -1/sqrt(3) belongs to the exchanged (1 x 1/2) order.
    CHECK_THAT(clebsch_gordan(half(1), half(1), 1, 0, half(1), half(1)),
               Catch::Matchers::WithinAbs(1.0 / std::sqrt(3.0), 1e-14));
    CHECK_THROWS_AS(clebsch_gordan(1, 2, 1, 0, 1, 2), std::invalid_argument);
}

TEST_CASE("clebsch_gordan selection zeros") {
    CHECK(clebsch_gordan(half(1), half(1), half(1), half(1), 0, 0) == 0.0);      // M != m1+m2
    CHECK(clebsch_gordan(1, 0, 1, 0, 3, 0) == 0.0);                              // triangle
    CHECK_THROWS_AS(clebsch_gordan(half(1), half(1), 1, 0, 1, half(1)),          // M invalid for J
                    std::invalid_argument);
}

TEST_CASE("clebsch_gordan agrees with the ladder-operator oracle") {
    const std::vector<HalfInt> js = {HalfInt::from_twice(1), HalfInt(1), HalfInt::from_twice(3)};
    for (HalfInt j1 : js) {
        for (HalfInt j2 : js) {
            CgOracle oracle(j1, j2);
            for (int tJ = abs(j1 - j2).twice(); tJ <= (j1 + j2).twice(); tJ += 2) {
                const HalfInt J = HalfInt::from_twice(tJ);
                for (int tM = -tJ; tM <= tJ; tM += 2) {
                    const HalfInt M = HalfInt::from_twice(tM);
                    for (int tm1 = -j1.twice(); tm1 <= j1.twice(); tm1 += 2) {
                        const HalfInt m1 = HalfInt::from_twice(tm1);
                        const HalfInt m2 = M - m1;
                        if (abs(m2) > j2) continue;
                        const double expected = oracle.coefficient(m1, m2, J, M);
                        const double got = clebsch_gordan(j1, m1, j2, m2, J, M);
                        CHECK_THAT(got, Catch::Matchers::WithinAbs(expected, 1e-12));
                    }
                }
            }
        }
    }
}

TEST_CASE("clebsch_gordan orthogonality for j1, j2 <= 3/2") {
    const std::vector<HalfInt> js = {HalfInt::from_twice(1), HalfInt(1), HalfInt::from_twice(3)};
    for (HalfInt j1 : js) {
        for (HalfInt j2 : js) {
            for (int tJ = abs(j1 - j2).twice(); tJ <= (j1 + j2).twice(); tJ += 2) {
                for (int tJp = abs(j1 - j2).twice(); tJp <= (j1 + j2).twice(); tJp += 2) {
                    for (int tM = -tJ; tM <= tJ; tM += 2) {
                        for (int tMp = -tJp; tMp <= tJp; tMp += 2) {
                            double sum = 0.0;
                            for (int tm1 = -j1.twice(); tm1 <= j1.twice(); tm1 += 2) {
                                for (int tm2 = -j2.twice(); tm2 <= j2.twice(); tm2 += 2) {
                                    if (tm1 + tm2 != tM || tm1 + tm2 != tMp) continue;
                                    sum += clebsch_gordan(j1, HalfInt::from_twice(tm1), j2,
                                                          HalfInt::from_twice(tm2),
                                                          HalfInt::from_twice(tJ), HalfInt::from_twice(tM)) *
                                           clebsch_gordan(j1, HalfInt::from_twice(tm1), j2,
                                                          HalfInt::from_twice(tm2),
                                                          HalfInt::from_twice(tJp), HalfInt::from_twice(tMp));
                                }
                            }
                            const double expected = (tJ == tJp && tM == tMp) ? 1.0 : 0.0;
                            REQUIRE_THAT(sum, Catch::Matchers::WithinAbs(expected, 1e-12));
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("transition_amplitudes selection rules") {
    SECTION("F=1/2 -> F=1/2, sigma-: single pair") {
        const auto pairs = transition_amplitudes(half(1), half(1), -1);
        REQUIRE(pairs.size() == 1);
        CHECK(pairs[0].m_lower == half(1));
        CHECK(pairs[0].m_upper == half(-1));
    }
    SECTION("F=1/2 -> F=3/2, pi: two pairs matching the oracle") {
        const auto pairs = transition_amplitudes(half(1), half(3), 0);
        REQUIRE(pairs.size() == 2);
        CgOracle oracle(half(1), HalfInt(1));
        for (const auto& p : pairs) {
            CHECK(p.m_upper == p.m_lower);
            CHECK_THAT(p.amplitude,
                       Catch::Matchers::WithinAbs(oracle.coefficient(p.m_lower, 0, half(3), p.m_upper), 1e-12));
        }
    }
    SECTION("F=0 -> F=0 forbidden") {
        for (int q : {-1, 0, 1}) CHECK(transition_amplitudes(0, 0, q).empty());
    }
    SECTION("every pair obeys m_u - m_l = q") {
        for (int q : {-1, 0, 1})
            for (const auto& p : transition_amplitudes(half(3), half(3), q))
                CHECK((p.m_upper - p.m_lower).twice() == 2 * q);
    }
}

TEST_CASE("zeeman_shift") {
    SECTION("Rydberg sublevel splitting at 4.88 G") {
        const auto m = Manifold::hyperfine(half(1), 2.357, "54S1");
        const double b = 4.88e-4;  // T
        const double split = zeeman_shift(m[half(1)], b) - zeeman_shift(m[half(-1)], b);
        CHECK_THAT(split / constants::two_pi / 1e6, Catch::Matchers::WithinAbs(16.1, 0.05));
    }
    SECTION("zero field") {
        const auto lv = Level::hyperfine(half(1), half(1), 2.357, "x");
        CHECK(zeeman_shift(lv, 0.0) == 0.0);
    }
    SECTION("nuclear qubit slope ~9.5 kHz/G") {
        const auto m = Manifold::hyperfine(half(1), 0.0067875, "3P0");
        const double per_gauss =
            (zeeman_shift(m[half(1)], 1e-4) - zeeman_shift(m[half(-1)], 1e-4)) / constants::two_pi;
        CHECK_THAT(per_gauss / 1e3, Catch::Matchers::WithinRel(9.50, 0.01));
    }
    SECTION("generic level rejected") {
        CHECK_THROWS_AS(zeeman_shift(Level::generic("g"), 1e-4), std::invalid_argument);
    }
    SECTION("linear in B, odd in m") {
        const auto m = Manifold::fine(half(3), 1.2, "P");
        for (int tm : {-3, -1, 1, 3}) {
            const auto& lv = m[HalfInt::from_twice(tm)];
            CHECK_THAT(zeeman_shift(lv, 2e-4), Catch::Matchers::WithinRel(2.0 * zeeman_shift(lv, 1e-4), 1e-12));
            const auto& mirror = m[HalfInt::from_twice(-tm)];
            CHECK_THAT(zeeman_shift(mirror, 1e-4), Catch::Matchers::WithinRel(-zeeman_shift(lv, 1e-4), 1e-12));
        }
    }
}

TEST_CASE("manifold layout") {
    const auto m = Manifold::hyperfine(half(3), -0.5, "F32");
    REQUIRE(m.levels().size() == 4);
    CHECK(m.levels().front().m == half(-3));
    CHECK(m.levels().back().m == half(3));
    CHECK(m[half(-1)].m == half(-1));
    CHECK_THROWS_AS(m[half(5)], std::out_of_range);
    CHECK_THROWS_AS(m[HalfInt(1)], std::out_of_range);  // integer m in a half-integer manifold
}

TEST_CASE("atom species defaults and level lookup") {
    auto atom = make_atom(Species::Yb171, {Level::generic("g"), Level::generic("e")}, "a0");
    CHECK(atom.nuclear_spin == half(1));
    CHECK_THAT(atom.mass / constants::atomic_mass_unit, Catch::Matchers::WithinRel(170.936, 1e-3));
    CHECK(atom.level_index("e") == 1);
    CHECK_THROWS_AS(atom.level("nope"), std::invalid_argument);
    CHECK_THROWS_AS(make_atom(Species::Generic, {Level::generic("g"), Level::generic("g")}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_atom(Species::Generic, {}), std::invalid_argument);
}
