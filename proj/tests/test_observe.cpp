#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>

#include "atomsim/constants.hpp"
#include "atomsim/metrics.hpp"
#include "atomsim/rng.hpp"
#include "atomsim/tomography.hpp"

using namespace atomsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

System qubit_system() {
    System sys;
    sys.add_atom(make_atom(Species::Generic, {Level::generic("g"), Level::generic("e")}));
    return sys;
}

} // namespace

TEST_CASE("population and coherence evaluation") {
    auto sys = qubit_system();
    const auto basis = build_basis(sys.atoms, {});
    const double inv = 1.0 / std::sqrt(2.0);

    SECTION("ground state has no excited population") {
        const std::vector<cd> psi{1.0, 0.0};
        CHECK(population(psi, basis, 0, 1) == 0.0);
        CHECK(population(psi, basis, 0, 0) == 1.0);
    }
    SECTION("equal superposition has coherence 1/2") {
        const std::vector<cd> psi{inv, inv};
        CHECK_THAT(coherence(psi, basis, 0, 0, 1).real(), WithinAbs(0.5, 1e-15));
        CHECK_THAT(coherence(psi, basis, 0, 0, 1).imag(), WithinAbs(0.0, 1e-15));
    }
    SECTION("population detectors over a complete level set sum to the norm") {
        std::mt19937_64 rng(3);
        std::vector<cd> psi(2);
        for (auto& x : psi) x = cd(gaussian(rng), gaussian(rng));
        const double total = population(psi, basis, 0, 0) + population(psi, basis, 0, 1);
        double norm = 0.0;
        for (const auto& x : psi) norm += std::norm(x);
        CHECK_THAT(total, WithinRel(norm, 1e-12));
    }
}

TEST_CASE("process tomography: identity channel") {
    auto sys = qubit_system();
    Sequence seq(1e-9);
    append(seq, Wait{1e-8});
    const auto res = process_tomography(sys, seq, {0}, "g", "e");

    SECTION("PTM is the identity") {
        CHECK((res.ptm - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-8);
    }
    SECTION("Choi is 2 |Phi+><Phi+|") {
        Eigen::Vector4cd phip;
        phip << 1, 0, 0, 1;  // (|00> + |11>) unnormalized; Choi = outer product
        const Eigen::Matrix4cd expected = phip * phip.adjoint();
        CHECK((res.choi - expected).cwiseAbs().maxCoeff() < 1e-8);
    }
    SECTION("single Kraus operator equal to the identity") {
        REQUIRE(res.kraus.size() == 1);
        Eigen::Matrix2cd k = res.kraus[0];
        k *= std::polar(1.0, -std::arg(k(0, 0)));  // fix the global phase
        CHECK((k - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-8);
    }
    SECTION("trace preservation") {
        CHECK(res.trace_defect < 1e-8);
        CHECK(res.cp_ok);
        CHECK_THAT(res.ptm(0, 0), WithinAbs(1.0, 1e-8));
        CHECK(std::abs(res.ptm(0, 1)) + std::abs(res.ptm(0, 2)) + std::abs(res.ptm(0, 3)) < 1e-8);
    }
}

TEST_CASE("process tomography: X pi pulse") {
    auto sys = qubit_system();
    const double omega = constants::two_pi * 1e6;
    const auto c = add_coupling(sys, {0}, "g", "e", omega, [] {
        CouplingOptions o;
        o.active = false;
        return o;
    }());
    Sequence seq(1e-11);
    append(seq, Pulse(c, constants::pi / omega));
    const auto res = process_tomography(sys, seq, {0}, "g", "e");
    Eigen::Vector4d expected;
    expected << 1, 1, -1, -1;
    CHECK((res.ptm - Eigen::Matrix4d(expected.asDiagonal())).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(res.trace_defect < 1e-8);
}

TEST_CASE("process tomography: amplitude damping channel") {
    // decay for a duration with e^{-Gamma t} = 0.9
    const double gamma = constants::two_pi * 1e4;
    const double t = -std::log(0.9) / gamma;
    auto sys = qubit_system();
    add_decay(sys, {0}, "e", "g", gamma);
    const double dt = t / 16384.0;
    Sequence seq(dt);
    append(seq, Wait{t});
    TomographyOptions opts;
    opts.solver.density_matrix = true;
    const auto res = process_tomography(sys, seq, {0}, "g", "e", opts);

    const double p = 1.0 - 0.9;
    REQUIRE(res.kraus.size() == 2);
    Eigen::Matrix2cd k0 = res.kraus[0], k1 = res.kraus[1];
    k0 *= std::polar(1.0, -std::arg(k0(0, 0)));
    k1 *= std::polar(1.0, -std::arg(k1(0, 1)));
    Eigen::Matrix2cd k0_ref = Eigen::Matrix2cd::Zero(), k1_ref = Eigen::Matrix2cd::Zero();
    k0_ref(0, 0) = 1.0;
    k0_ref(1, 1) = std::sqrt(1.0 - p);
    k1_ref(0, 1) = std::sqrt(p);
    CHECK((k0 - k0_ref).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((k1 - k1_ref).cwiseAbs().maxCoeff() < 1e-6);

    SECTION("Kraus completeness within the reported defects") {
        Eigen::Matrix2cd sum = Eigen::Matrix2cd::Zero();
        for (const auto& k : res.kraus) sum += k.adjoint() * k;
        const double defect = (sum - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
        CHECK(defect == res.completeness_defect);
        // bounded by the trace defect plus the truncated eigenvalue scale
        CHECK(defect <= res.trace_defect + 16.0 * (std::abs(res.choi_min_eigenvalue) + 1e-10));
    }
    SECTION("PTM first row stays (1,0,0,0)") {
        CHECK_THAT(res.ptm(0, 0), WithinAbs(1.0, 1e-8));
        CHECK(std::abs(res.ptm(0, 1)) + std::abs(res.ptm(0, 2)) + std::abs(res.ptm(0, 3)) < 1e-8);
    }
}

TEST_CASE("process tomography averages MCWF trajectories") {
    const double gamma = constants::two_pi * 1e4;
    const double t = -std::log(0.9) / gamma;
    auto sys = qubit_system();
    add_decay(sys, {0}, "e", "g", gamma);
    Sequence seq(t / 2048.0);
    append(seq, Wait{t});
    TomographyOptions opts;
    opts.solver.shots = 400;
    opts.solver.seed = 11;
    const auto res = process_tomography(sys, seq, {0}, "g", "e", opts);
    // trajectory average approaches the damping channel within shot noise
    CHECK_THAT(res.ptm(3, 3), WithinAbs(0.9, 0.05));
    CHECK_THAT(res.ptm(1, 1), WithinAbs(std::sqrt(0.9), 0.05));
}

TEST_CASE("entanglement fidelity") {
    SECTION("perfect gate gives unity") {
        const std::vector<std::vector<double>> p(4, std::vector<double>(10, 1.0));
        const std::vector<std::vector<double>> phi(4, std::vector<double>(10, 0.0));
        CHECK_THAT(entanglement_fidelity(p, phi, 4), WithinAbs(1.0, 1e-15));
    }
    SECTION("a common phase on every input is invisible") {
        const std::vector<std::vector<double>> p(4, std::vector<double>(5, 1.0));
        const std::vector<std::vector<double>> phi(4, std::vector<double>(5, 0.8134));
        CHECK_THAT(entanglement_fidelity(p, phi, 4), WithinAbs(1.0, 1e-12));
    }
    SECTION("gaussian phase noise gives F = exp(-sigma^2)") {
        const double sigma = 0.2;
        std::mt19937_64 rng(9);
        std::vector<std::vector<double>> p(4), phi(4);
        for (int j = 0; j < 4; ++j) {
            for (int t = 0; t < 40000; ++t) {
                p[static_cast<std::size_t>(j)].push_back(1.0);
                phi[static_cast<std::size_t>(j)].push_back(sigma * gaussian(rng));
            }
        }
        CHECK_THAT(entanglement_fidelity(p, phi, 4), WithinRel(std::exp(-sigma * sigma), 0.01));
    }
    SECTION("population loss enters quadratically") {
        const std::vector<std::vector<double>> p(4, std::vector<double>(1, 0.81));
        const std::vector<std::vector<double>> phi(4, std::vector<double>(1, 0.0));
        CHECK_THAT(entanglement_fidelity(p, phi, 4), WithinRel(0.81, 1e-12));
    }
}

TEST_CASE("[[4,2,2]] codewords and stabilizers") {
    const auto sx = pauli_string("XXXX");
    const auto sz = pauli_string("ZZZZ");

    SECTION("all four codewords are +1 eigenstates of both stabilizers") {
        for (int l = 0; l < 4; ++l) {
            const auto v = codeword_422(l);
            CHECK((sx * v - v).cwiseAbs().maxCoeff() == 0.0);
            CHECK((sz * v - v).cwiseAbs().maxCoeff() == 0.0);
        }
    }
    SECTION("the logical Bell state scores perfectly") {
        const auto bell = logical_bell_422();
        const auto m = stabilizer_metrics({bell}, bell, sz, sx);
        CHECK_THAT(m.f_raw, WithinAbs(1.0, 1e-14));
        CHECK_THAT(m.p_even, WithinAbs(1.0, 1e-14));
        CHECK_THAT(m.f_post, WithinAbs(1.0, 1e-14));
        CHECK_THAT(m.f_syndrome, WithinAbs(1.0, 1e-14));
    }
    SECTION("a single X error flips the Z parity and is rejected") {
        const auto bell = logical_bell_422();
        for (int q = 0; q < 4; ++q) {
            std::string err = "IIII";
            err[static_cast<std::size_t>(q)] = 'X';
            const Eigen::VectorXcd bad = pauli_string(err) * bell;
            const auto m = stabilizer_metrics({bad}, bell, sz, sx);
            CHECK_THAT(m.p_even, WithinAbs(0.0, 1e-14));
            CHECK(!m.post_defined);
        }
    }
    SECTION("a single Z error passes the parity check but fails the X stabilizer") {
        const auto bell = logical_bell_422();
        std::vector<Eigen::VectorXcd> ensemble{bell, pauli_string("IZII") * bell};
        const auto m = stabilizer_metrics(ensemble, bell, sz, sx);
        CHECK_THAT(m.p_even, WithinAbs(1.0, 1e-14));  // Z errors keep even parity
        CHECK(m.f_raw < 0.75);
        CHECK_THAT(m.f_syndrome, WithinAbs(1.0, 1e-12));  // syndrome projection removes the error
        CHECK(m.f_syndrome >= m.f_post);
        CHECK(m.f_post >= m.f_raw);
    }
    SECTION("every single-qubit Pauli error is flagged by at least one stabilizer") {
        const auto bell = logical_bell_422();
        for (int q = 0; q < 4; ++q) {
            for (char pc : {'X', 'Y', 'Z'}) {
                std::string err = "IIII";
                err[static_cast<std::size_t>(q)] = pc;
                const Eigen::VectorXcd bad = pauli_string(err) * bell;
                // flagged: the error state fails at least one projector
                const double z_accept = (0.5 * (Eigen::MatrixXcd::Identity(16, 16) + sz) * bad).squaredNorm();
                const double x_accept = (0.5 * (Eigen::MatrixXcd::Identity(16, 16) + sx) * bad).squaredNorm();
                CHECK(std::min(z_accept, x_accept) < 1e-12);
            }
        }
    }
    SECTION("ordering F_syndrome >= F_post >= F_raw on a mixed-error ensemble") {
        const auto bell = logical_bell_422();
        std::mt19937_64 rng(4);
        std::vector<Eigen::VectorXcd> ensemble;
        const char letters[3] = {'X', 'Y', 'Z'};
        for (int t = 0; t < 40; ++t) {
            ensemble.push_back(bell);
            std::string err = "IIII";
            err[rng() % 4] = letters[rng() % 3];
            ensemble.push_back(pauli_string(err) * bell);
        }
        const auto m = stabilizer_metrics(ensemble, bell, sz, sx);
        CHECK(m.f_syndrome >= m.f_post - 1e-12);
        CHECK(m.f_post >= m.f_raw - 1e-12);
    }
}

TEST_CASE("register extraction drops leakage") {
    // two 3-level atoms with a Rydberg level outside the register
    System sys;
    for (int i = 0; i < 2; ++i)
        sys.add_atom(make_atom(Species::Generic,
                               {Level::generic("0"), Level::generic("1"), Level::generic("r")},
                               "a" + std::to_string(i)));
    const auto basis = build_basis(sys.atoms, {});
    std::vector<cd> psi(static_cast<std::size_t>(basis.dim()), 0.0);
    const double a = 0.6, b = 0.8;
    psi[static_cast<std::size_t>(basis.index_of({0, 1}))] = a;   // |01>
    psi[static_cast<std::size_t>(basis.index_of({2, 1}))] = b;   // leaked
    const auto reg = extract_register(psi, basis, {{0, 1}, {0, 1}});
    REQUIRE(reg.size() == 4);
    CHECK_THAT(std::abs(reg(0b01)), WithinAbs(a, 1e-15));
    CHECK_THAT(reg.squaredNorm(), WithinAbs(a * a, 1e-15));  // leakage dropped
}
