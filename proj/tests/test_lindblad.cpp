#include <doctest.h>

#include <cmath>
#include <random>

#include "cavrec/errors.hpp"
#include "cavrec/lindblad.hpp"
#include "oracles.hpp"

using namespace cavrec;

namespace {
ChannelCoefficients coeffs(double gamma, double nbar, double t) { return channel_coefficients({gamma, nbar, t}); }

ComplexMatrix pad(const ComplexMatrix& m, Eigen::Index n) {
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    out.topLeftCorner(m.rows(), m.cols()) = m;
    return out;
}
}  // namespace

TEST_SUITE("lindblad") {
TEST_CASE("channel coefficients") {
    SUBCASE("half decay, unit occupancy") {
        const auto c = coeffs(1.0, 1.0, std::log(2.0));
        CHECK(std::abs(c.N_t - 0.5) < 1e-15);
        CHECK(std::abs(c.Gamma_n - 1.0 / 3.0) < 1e-15);
        CHECK(std::abs(c.Gamma_n1 - 2.0 / 3.0) < 1e-15);
        CHECK(std::abs(c.exp_gt - 0.5) < 1e-15);
    }
    SUBCASE("t = 0") {
        const auto c = coeffs(1.0, 0.7, 0.0);
        CHECK(c.N_t == 0.0);
        CHECK(c.Gamma_n == 0.0);
        CHECK(c.Gamma_n1 == 0.0);
        CHECK(c.x3 == 1.0);
    }
    SUBCASE("zero temperature") {
        for (double gt : {0.1, 1.0, 5.0}) {
            const auto c = coeffs(2.0, 0.0, gt / 2.0);
            CHECK(c.Gamma_n == 0.0);
            CHECK(std::abs(c.Gamma_n1 - (1.0 - std::exp(-gt))) < 1e-15);
        }
    }
    SUBCASE("algebra and ordering") {
        for (double nbar : {0.0, 0.2, 1.0, 3.0})
            for (double t : {0.01, 0.3, 2.0}) {
                const auto c = coeffs(1.3, nbar, t);
                const double e = 1.0 - std::exp(-1.3 * t);
                const double nt = nbar * e;
                CHECK(std::abs(c.Gamma_n - nbar * e / (1.0 + nt)) < 1e-15);
                CHECK(std::abs(c.Gamma_n1 - (nbar + 1.0) * e / (1.0 + nt)) < 1e-15);
                CHECK(c.Gamma_n < c.Gamma_n1);
            }
    }
    SUBCASE("invalid parameters") {
        CHECK_THROWS_AS(channel_coefficients({-1.0, 0.0, 1.0}), DomainError);
        CHECK_THROWS_AS(channel_coefficients({1.0, -0.1, 1.0}), DomainError);
        CHECK_THROWS_AS(channel_coefficients({1.0, 0.0, -1.0}), DomainError);
    }
}

TEST_CASE("effective displacement") {
    CHECK(effective_displacement(0.5, 1.0, 0.0) == Complex(0.0));
    const Complex a(0.3, -0.4);
    CHECK(std::abs(effective_displacement(a, 1e-6, 0.2) - a * 0.2) < 1e-7);
    CHECK(effective_displacement(a, 0.0, 0.2) == a * 0.2);
    const Complex b = effective_displacement(0.5, 1.0, 1.0);
    CHECK(std::abs(b - (std::exp(0.5) - 1.0)) < 1e-15);
    CHECK(std::abs(b.real() - 0.6487213) < 1e-7);
    CHECK(DriveSpec::make(0.5, 1.0, 1.0).beta == b);
}

TEST_CASE("superoperator commutation relations") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const ComplexMatrix r = oracle::random_hermitian(12, rng);
        const Eigen::Index n = 14;
        // [J-, J+] rho = J3 rho
        const ComplexMatrix lhs = pad(apply_jminus(apply_jplus(r)), n) - pad(apply_jplus(apply_jminus(r)), n);
        CHECK((lhs - pad(apply_j3(r), n)).cwiseAbs().maxCoeff() < 1e-12);
        // [J3, J+] rho = 2 J+ rho
        const ComplexMatrix jp = apply_jplus(r);
        const ComplexMatrix c3p = apply_j3(jp) - apply_jplus(apply_j3(r));
        CHECK((c3p - 2.0 * jp).cwiseAbs().maxCoeff() < 1e-12);
        // [J3, J-] rho = -2 J- rho
        const ComplexMatrix jm = apply_jminus(r);
        const ComplexMatrix c3m = apply_j3(jm) - apply_jminus(apply_j3(r));
        CHECK((c3m + 2.0 * jm).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("closed-form channel") {
    SUBCASE("identity at t = 0") {
        const auto cat = cat_state(1.5, 1, 32);
        CHECK(trace_distance(evolve_closed_form(cat, coeffs(1.0, 0.4, 0.0)), cat) == 0.0);
    }
    SUBCASE("vacuum relaxes to the thermal state") {
        const auto out = evolve_closed_form(fock_state(0, 64), coeffs(1.0, 0.5, 20.0));
        CHECK(trace_distance(out, thermal_state(0.5, 64)) < 1e-6);
    }
    SUBCASE("single-photon decay") {
        const auto out = evolve_closed_form(fock_state(1, 8), coeffs(1.0, 0.0, std::log(2.0)));
        CHECK(std::abs(out(0, 0).real() - 0.5) < 1e-15);
        CHECK(std::abs(out(1, 1).real() - 0.5) < 1e-15);
        CHECK(std::abs(out(2, 2)) < 1e-15);
    }
    SUBCASE("zero temperature equals the Kraus amplitude-damping channel") {
        std::mt19937_64 rng(3);
        for (int dim : {6, 12, 16}) {
            const ComplexMatrix r = oracle::random_density(dim, dim, rng);
            for (double gt : {0.05, 0.7, 3.0}) {
                const auto out = evolve_closed_form(FockDensityMatrix(r), coeffs(1.0, 0.0, gt));
                const ComplexMatrix ref = oracle::amplitude_damping_kraus(r, std::exp(-gt));
                CHECK((out.entries() - ref).cwiseAbs().maxCoeff() < 1e-13);
            }
        }
    }
    SUBCASE("semigroup") {
        std::mt19937_64 rng(5);
        const FockDensityMatrix rho(oracle::random_density(48, 6, rng));
        for (double nbar : {0.0, 0.3, 1.0}) {
            const auto a = evolve_closed_form(evolve_closed_form(rho, coeffs(1.0, nbar, 0.2)), coeffs(1.0, nbar, 0.5));
            const auto b = evolve_closed_form(rho, coeffs(1.0, nbar, 0.7));
            CHECK(trace_distance(a, b) < 1e-8);
        }
    }
    SUBCASE("trace and Hermiticity") {
        const auto out = evolve_closed_form(cat_state(Complex(1.0, 0.5), -1, 48), coeffs(1.0, 0.8, 0.4));
        CHECK(std::abs(out.trace() - 1.0) < 1e-9);
        CHECK((out.entries() - out.entries().adjoint()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(validate(out).min_eigenvalue > -1e-12);
    }
    SUBCASE("thermal mass pushed past a small cutoff raises") {
        CHECK_THROWS_AS(evolve_closed_form(fock_state(0, 4), coeffs(1.0, 2.0, 5.0)), TruncationError);
    }
}

TEST_CASE("numerical integrator") {
    SUBCASE("matches the closed form for single-photon decay") {
        const auto rho = fock_state(1, 16);
        const ChannelParams p{1.0, 0.0, std::log(2.0)};
        const auto num = evolve_numerical(rho, p, 0.0);
        CHECK(trace_distance(num.rho, evolve_closed_form(rho, channel_coefficients(p))) < 1e-8);
        CHECK(num.trace_drift < 1e-12);
    }
    SUBCASE("no generator leaves the state unchanged") {
        const auto cat = cat_state(1.0, 1, 24);
        IntegratorOptions opt;
        opt.steps = 50;
        const auto out = evolve_numerical(cat, {0.0, 0.3, 2.0}, 0.0, opt);
        CHECK(trace_distance(out.rho, cat) < 1e-15);
    }
    SUBCASE("driven damped vacuum stays coherent") {
        const ChannelParams p{1.0, 0.0, 1.0};
        const auto out = evolve_numerical(fock_state(0, 32), p, 0.5);
        const Complex amp = -2.0 * 0.5 * (1.0 - std::exp(-0.5));
        CHECK(trace_distance(out.rho, coherent_state(amp, 32)) < 1e-6);
        CHECK(std::abs(out.rho.trace() - 1.0) < 1e-9);
    }
    SUBCASE("Hermiticity after re-symmetrization") {
        const auto out = evolve_numerical(cat_state(1.0, 1, 24), {1.0, 0.3, 0.3}, Complex(0.2, 0.1));
        CHECK((out.rho.entries() - out.rho.entries().adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("drift above tolerance raises") {
        IntegratorOptions opt;
        opt.trace_drift_tol = -1.0;
        CHECK_THROWS_AS(evolve_numerical(fock_state(1, 8), {1.0, 0.0, 0.1}, 0.0, opt), IntegrationError);
    }
}

TEST_CASE("factorized evolution") {
    SUBCASE("no drive reduces to the closed form") {
        const auto cat = cat_state(1.5, 1, 48);
        const ChannelParams p{1.0, 0.2, 0.3};
        CHECK(trace_distance(factorized_evolution(cat, 0.0, p), evolve_closed_form(cat, channel_coefficients(p))) ==
              0.0);
    }
    SUBCASE("driven vacuum at zero temperature") {
        const ChannelParams p{1.0, 0.0, 1.0};
        const auto fac = factorized_evolution(fock_state(0, 40), 0.5, p);
        const auto num = evolve_numerical(fock_state(0, 40), p, 0.5);
        CHECK(trace_distance(fac, num.rho) < 1e-6);
    }
    SUBCASE("driven cat at finite temperature") {
        const ChannelParams p{1.0, 0.2, 0.1};
        const auto cat = cat_state(1.5, 1, 48);
        const auto fac = factorized_evolution(cat, Complex(0.0, 0.3), p);
        const auto num = evolve_numerical(cat, p, Complex(0.0, 0.3));
        CHECK(trace_distance(fac, num.rho) < 1e-6);
    }
    SUBCASE("grid of drives and channels") {
        const auto rho = cat_state(Complex(0.7, 0.4), -1, 40);
        for (Complex alpha : {Complex(0.4, 0.0), Complex(-0.2, 0.5)})
            for (double t : {0.2, 0.8})
                for (double nbar : {0.0, 0.4}) {
                    const ChannelParams p{1.0, nbar, t};
                    const double td = trace_distance(factorized_evolution(rho, alpha, p),
                                                     evolve_numerical(rho, p, alpha).rho);
                    CHECK(td < 1e-6);
                }
    }
}
}
