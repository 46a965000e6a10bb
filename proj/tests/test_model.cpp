#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numeric>
#include <random>
#include <vector>

#include <fftw3.h>

#include "atomsim/constants.hpp"
#include "atomsim/system.hpp"

using namespace atomsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

System two_level_system() {
    System sys;
    sys.add_atom(make_atom(Species::Generic, {Level::generic("g"), Level::generic("e")}));
    return sys;
}

double resolve_now(const Value& v) {
    ResolveContext ctx;
    return resolve(v, ctx);
}

} // namespace

TEST_CASE("bare coupling registration") {
    auto sys = two_level_system();
    const auto id = add_coupling(sys, {0}, "g", "e", constants::two_pi * 1e6);
    const auto& n = std::get<CouplingNode>(sys.node(id));
    CHECK(n.lower == 0);
    CHECK(n.upper == 1);
    CHECK_THAT(resolve_now(n.amplitude), WithinRel(constants::two_pi * 1e6, 1e-12));
    CHECK(n.cg == 1.0);

    CHECK_THROWS_AS(add_coupling(sys, {0}, "g", "nope", 1.0), std::invalid_argument);
    CHECK_THROWS_AS(add_coupling(sys, {0}, "g", "g", 1.0), std::invalid_argument);
}

TEST_CASE("manifold coupling expansion") {
    const auto lower = Manifold::hyperfine(half(1), -0.5, "q");
    const auto upper = Manifold::hyperfine(half(1), 2.357, "r");
    System sys;
    std::vector<Level> levels;
    for (const auto& lv : lower.levels()) levels.push_back(lv);
    for (const auto& lv : upper.levels()) levels.push_back(lv);
    const auto atom = sys.add_atom(make_atom(Species::Yb171, levels));

    SECTION("pure sigma- drives exactly one pair") {
        CouplingOptions opts;
        opts.quantization_axis = Vec3{0, 0, 1};
        opts.polarization = Polarization::circular({0, 0, 1}, +1);  // pure sigma-
        const auto ids = add_coupling(sys, atom, lower, upper, 1.0, opts);
        REQUIRE(ids.size() == 1);
        const auto& n = std::get<CouplingNode>(sys.node(ids[0]));
        CHECK(n.q == -1);
        CHECK(sys.atom(atom).levels[static_cast<std::size_t>(n.lower)].m == half(1));
        CHECK(sys.atom(atom).levels[static_cast<std::size_t>(n.upper)].m == half(-1));
    }

    SECTION("linear polarization perpendicular to the axis gives two sigma nodes") {
        CouplingOptions opts;
        opts.quantization_axis = Vec3{1, 0, 0};
        opts.polarization = Polarization::linear({0, 1, 0});
        const double omega = constants::two_pi * 2.5e6;
        const auto ids = add_coupling(sys, atom, lower, upper, omega, opts);
        REQUIRE(ids.size() == 2);
        for (const auto id : ids) {
            const auto& n = std::get<CouplingNode>(sys.node(id));
            CHECK(n.use_polarization);
            CHECK((n.q == -1 || n.q == +1));
            // |amplitude x CG x e_q| = Omega |CG| / sqrt(2)
            const HalfInt ml = n.q == -1 ? half(1) : half(-1);
            const double cg = clebsch_gordan(half(1), ml, 1, n.q, half(1), ml + n.q);
            const auto eq = spherical_components(n.polarization, n.quantization_axis).q(n.q);
            CHECK_THAT(std::abs(resolve_now(n.amplitude) * n.cg * std::abs(eq)),
                       WithinRel(omega * std::abs(cg) / std::sqrt(2.0), 1e-12));
        }
    }

    SECTION("explicit spherical amplitudes") {
        SphericalAmplitudes amps;
        amps.minus = constants::two_pi * 2.5e6;
        const auto ids = add_coupling(sys, atom, lower, upper, amps);
        REQUIRE(ids.size() == 1);
        CHECK(std::get<CouplingNode>(sys.node(ids[0])).q == -1);
    }

    SECTION("no allowed transition raises with the components tried") {
        const auto f0a = Manifold::hyperfine(0, 0.0, "f0a");
        const auto f0b = Manifold::hyperfine(0, 0.0, "f0b");
        System s2;
        const auto a2 = s2.add_atom(make_atom(Species::Sr88, {f0a.levels()[0], f0b.levels()[0]}));
        SphericalAmplitudes amps;
        amps.pi = 1.0;
        try {
            add_coupling(s2, a2, f0a, f0b, amps);
            FAIL("expected a throw");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("q=0") != std::string::npos);
        }
    }
}

TEST_CASE("zeeman detunings") {
    const auto ryd = Manifold::hyperfine(half(1), 2.357, "r");
    System sys;
    std::vector<Level> levels{Level::generic("g")};
    for (const auto& lv : ryd.levels()) levels.push_back(lv);
    const auto atom = sys.add_atom(make_atom(Species::Yb171, levels));

    SECTION("zero field, no offset: all shifts vanish") {
        for (const auto id : add_zeeman_detunings(sys, atom, ryd, 0.0))
            CHECK(resolve_now(std::get<DetuningNode>(sys.node(id)).shift) == 0.0);
    }
    SECTION("4.88 G splits the pair by 2 x 8.05 MHz") {
        const auto ids = add_zeeman_detunings(sys, atom, ryd, 4.88e-4);
        REQUIRE(ids.size() == 2);
        const double lo = resolve_now(std::get<DetuningNode>(sys.node(ids[0])).shift);
        const double hi = resolve_now(std::get<DetuningNode>(sys.node(ids[1])).shift);
        CHECK_THAT(hi / constants::two_pi / 1e6, WithinAbs(8.05, 0.03));
        CHECK_THAT(lo / constants::two_pi / 1e6, WithinAbs(-8.05, 0.03));
    }
    SECTION("common offset adds to every sublevel") {
        const double delta = constants::two_pi * 1e5;
        const auto ids = add_zeeman_detunings(sys, atom, ryd, 4.88e-4, delta);
        const auto base = add_zeeman_detunings(sys, atom, ryd, 4.88e-4);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            CHECK_THAT(resolve_now(std::get<DetuningNode>(sys.node(ids[i])).shift),
                       WithinRel(resolve_now(std::get<DetuningNode>(sys.node(base[i])).shift) + delta, 1e-12));
        }
    }
}

TEST_CASE("decay and dephasing registration") {
    SECTION("manifold decay branch rates sum to the total per upper sublevel") {
        const auto lower = Manifold::hyperfine(half(1), 0.0, "lo");
        const auto upper = Manifold::hyperfine(half(3), 0.5, "up");
        System sys;
        std::vector<Level> levels;
        for (const auto& lv : lower.levels()) levels.push_back(lv);
        for (const auto& lv : upper.levels()) levels.push_back(lv);
        const auto atom = sys.add_atom(make_atom(Species::Rb87, levels));
        const double gamma = constants::two_pi * 6e6;
        const auto ids = add_decay(sys, atom, upper, lower, gamma);
        std::map<int, double> per_upper;
        for (const auto id : ids) {
            const auto& n = std::get<DecayNode>(sys.node(id));
            per_upper[n.upper] += n.branch * resolve_now(n.rate);
        }
        REQUIRE(per_upper.size() == 4);
        for (const auto& [lvl, total] : per_upper) CHECK_THAT(total, WithinRel(gamma, 1e-12));
    }
    SECTION("zero-rate dephasing still registers a node") {
        auto sys = two_level_system();
        const auto id = add_dephasing(sys, {0}, {"e"}, 0.0);
        CHECK(std::holds_alternative<DephasingNode>(sys.node(id)));
    }
    SECTION("self-interaction rejected") {
        auto sys = two_level_system();
        CHECK_THROWS_AS(add_interaction(sys, {0}, {0}, "e", "e", 1.0), std::invalid_argument);
    }
}

TEST_CASE("resolve_value semantics") {
    SECTION("deterministic parameter returns its default") {
        Parameter omega("omega", constants::two_pi * 5e3, 0.0);
        ResolveContext ctx;
        CHECK(resolve(Value(omega), ctx) == constants::two_pi * 5e3);
    }
    SECTION("override wins regardless of std") {
        Parameter omega("omega", constants::two_pi * 5e3, constants::two_pi * 1e3);
        std::map<std::string, double> ov{{"omega", constants::two_pi * 6e3}};
        std::mt19937_64 rng(1);
        ResolveContext ctx{&ov, nullptr, &rng, {}};
        CHECK(resolve(Value(omega), ctx) == constants::two_pi * 6e3);
    }
    SECTION("sample mean matches the default within 3 standard errors") {
        Parameter p("p", 10.0, 0.5);
        double sum = 0.0;
        const int n = 10000;
        for (int i = 0; i < n; ++i) {
            std::mt19937_64 rng(shot_seed(42, static_cast<unsigned>(i)));
            ResolveContext ctx{nullptr, nullptr, &rng, {}};
            sum += resolve(Value(p), ctx);
        }
        const double mean = sum / n;
        CHECK_THAT(mean, WithinAbs(10.0, 3.0 * 0.5 / std::sqrt(static_cast<double>(n))));
    }
    SECTION("two references to the same parameter share the draw in one shot") {
        Parameter p("p", 1.0, 0.3);
        const Value expr = Value(p) * Value(p);
        for (int shot = 0; shot < 32; ++shot) {
            std::mt19937_64 rng(shot_seed(7, static_cast<unsigned>(shot)));
            ResolveContext ctx{nullptr, nullptr, &rng, {}};
            const double prod = resolve(expr, ctx);
            const double x = ctx.draws.at("p");
            REQUIRE_THAT(prod, WithinRel(x * x, 1e-12));
        }
    }
    SECTION("expression arithmetic") {
        Parameter p("p", 3.0);
        ResolveContext ctx;
        CHECK(resolve(Value(p) * 2.0 + 1.0, ctx) == 7.0);
        CHECK(resolve(-Value(p) / 2.0, ctx) == -1.5);
        CHECK(resolve(vsqrt(Value(p) * 3.0), ctx) == 3.0);
    }
    SECTION("unknown reference raises naming the parameter") {
        ResolveContext ctx;
        try {
            resolve(Value(ParamRef{"missing"}), ctx);
            FAIL("expected a throw");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()).find("missing") != std::string::npos);
        }
    }
    SECTION("fixed seed is bit-reproducible") {
        Parameter p("p", 1.0, 0.25);
        const Value expr = Value(p) + Value(Parameter("q", 0.0, 1.0));
        std::mt19937_64 r1(99), r2(99);
        ResolveContext c1{nullptr, nullptr, &r1, {}}, c2{nullptr, nullptr, &r2, {}};
        CHECK(resolve(expr, c1) == resolve(expr, c2));
    }
}

namespace {

// one-sided periodogram of a real series, in units of x^2/Hz
std::vector<double> periodogram(const std::vector<double>& x, double dt) {
    const int n = static_cast<int>(x.size());
    std::vector<std::complex<double>> spec(static_cast<std::size_t>(n / 2 + 1));
    std::vector<double> in = x;
    fftw_plan plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(spec.data()),
                                          FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    std::vector<double> psd(spec.size());
    for (std::size_t k = 0; k < spec.size(); ++k) psd[k] = 2.0 * dt / n * std::norm(spec[k]);
    return psd;
}

} // namespace

TEST_CASE("phase noise synthesis") {
    SECTION("zero model gives an identically zero trajectory") {
        LaserPhaseNoiseModel m;
        std::mt19937_64 rng(3);
        for (double phi : synthesize_phase_noise(m, 1e-4, 1e-8, rng)) CHECK(phi == 0.0);
    }

    SECTION("same seed reproduces, different seeds decorrelate") {
        LaserPhaseNoiseModel m;
        m.powerlaw_amplitude = 1e3;
        std::mt19937_64 r1(11), r2(11), r3(12);
        const auto a = synthesize_phase_noise(m, 1e-4, 1e-8, r1);
        const auto b = synthesize_phase_noise(m, 1e-4, 1e-8, r2);
        const auto c = synthesize_phase_noise(m, 1e-4, 1e-8, r3);
        CHECK(a == b);
        // sample cross-correlation of the increments
        const std::size_t n = a.size() - 1;
        double sac = 0, saa = 0, scc = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double da = a[i + 1] - a[i], dc = c[i + 1] - c[i];
            sac += da * dc;
            saa += da * da;
            scc += dc * dc;
        }
        CHECK(std::abs(sac / std::sqrt(saa * scc)) < 5.0 / std::sqrt(static_cast<double>(n)));
    }

    SECTION("white frequency noise: Wiener variance growth") {
        // Var[phi(t)] = (2 pi)^2 (A_pl / 2) t  for S_nu = A_pl
        LaserPhaseNoiseModel m;
        m.powerlaw_amplitude = 1e4;  // Hz^2/Hz
        const double dt = 1e-7;
        const int n = 10000;
        const int realizations = 300;
        std::vector<double> var(static_cast<std::size_t>(n), 0.0);
        for (int r = 0; r < realizations; ++r) {
            std::mt19937_64 rng(shot_seed(2024, static_cast<unsigned>(r)));
            const auto phi = synthesize_phase_noise(m, n * dt, dt, rng);
            for (std::size_t k = 0; k < phi.size(); ++k) var[k] += phi[k] * phi[k];
        }
        // least-squares slope through the origin over the early window,
        // where the circular-synthesis bridge correction is small
        double num = 0, den = 0;
        for (int k = 10; k <= n / 20; ++k) {
            const double t = k * dt;
            num += t * var[static_cast<std::size_t>(k)] / realizations;
            den += t * t;
        }
        const double slope = num / den;
        const double expected = 4.0 * constants::pi * constants::pi * m.powerlaw_amplitude / 2.0;
        CHECK_THAT(slope, WithinRel(expected, 0.10));
    }

    SECTION("servo bump: periodogram peak and area") {
        LaserPhaseNoiseModel m;
        m.servo_amplitude = 100.0;  // Hz^2/Hz
        m.servo_frequency = 2e5;
        m.servo_width = 2e4;
        const double dt = 1e-7;
        const int n = 20000;
        const int realizations = 200;
        std::vector<double> avg;
        for (int r = 0; r < realizations; ++r) {
            std::mt19937_64 rng(shot_seed(77, static_cast<unsigned>(r)));
            const auto phi = synthesize_phase_noise(m, n * dt, dt, rng);
            std::vector<double> nu(phi.size() - 1);
            for (std::size_t i = 0; i + 1 < phi.size(); ++i)
                nu[i] = (phi[i + 1] - phi[i]) / (constants::two_pi * dt);
            const auto psd = periodogram(nu, dt);
            if (avg.empty()) avg.assign(psd.size(), 0.0);
            for (std::size_t k = 0; k < psd.size(); ++k) avg[k] += psd[k] / realizations;
        }
        const double df = 1.0 / ((n - 1) * dt);
        // peak within one sigma of f0
        std::size_t peak = 1;
        for (std::size_t k = 1; k < avg.size(); ++k)
            if (avg[k] > avg[peak]) peak = k;
        CHECK_THAT(peak * df, WithinAbs(m.servo_frequency, m.servo_width));
        // bump area within 20% of A_G sigma sqrt(2 pi)
        double area = 0.0;
        for (std::size_t k = 1; k < avg.size(); ++k) {
            const double f = k * df;
            if (std::abs(f - m.servo_frequency) < 4.0 * m.servo_width) area += avg[k] * df;
        }
        CHECK_THAT(area, WithinRel(m.servo_amplitude * m.servo_width * std::sqrt(constants::two_pi), 0.20));
    }

    SECTION("argument validation") {
        LaserPhaseNoiseModel m;
        std::mt19937_64 rng(1);
        CHECK_THROWS_AS(synthesize_phase_noise(m, 1e-9, 1e-8, rng), std::invalid_argument);
        m.servo_width = -1.0;
        CHECK_THROWS_AS(synthesize_phase_noise(m, 1e-6, 1e-8, rng), std::invalid_argument);
    }
}

TEST_CASE("detector registration rules") {
    auto sys = two_level_system();
    add_detector(sys, PopulationDetector{{0}, "e", "P_e"});
    CHECK_THROWS_AS(add_detector(sys, PopulationDetector{{0}, "g", "P_e"}), std::invalid_argument);
    CHECK_THROWS_AS(add_detector(sys, PopulationDetector{{0}, "g", ""}), std::invalid_argument);
}
