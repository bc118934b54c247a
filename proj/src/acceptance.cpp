#include "cavrec/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "cavrec/errors.hpp"
#include "cavrec/fock.hpp"
#include "cavrec/io.hpp"
#include "cavrec/lindblad.hpp"
#include "cavrec/probe.hpp"
#include "cavrec/reconstruct.hpp"

namespace cavrec {

namespace {

constexpr double kPi = std::numbers::pi;

CriterionResult below(int id, std::string name, double measured, double tol, std::string detail = {}) {
    return {id, std::move(name), measured, tol, "<", measured < tol, std::move(detail)};
}

ReconstructOptions pipeline_options(const AcceptanceOptions& opt) {
    ReconstructOptions r;
    if (opt.corrupt_chi_sign) r.weight_hook = [](WeightValue& w) { w.chi = -w.chi; };
    return r;
}

QuasiprobSpec grid_spec(double s, std::vector<Complex> grid) {
    QuasiprobSpec q;
    q.s = s;
    q.grid = std::move(grid);
    return q;
}

// Largest |W| deviation; a failed point counts as infinite.
double max_point_gap(const ReconstructionResult& a, const std::vector<double>& ref) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        const double d = a.points[i].error.empty() ? std::abs(a.points[i].W - ref[i])
                                                   : std::numeric_limits<double>::infinity();
        worst = std::max(worst, d);
    }
    return worst;
}

std::string table_text(const ReconstructionResult& r) {
    std::ostringstream os;
    io::write_result_table(os, r);
    return os.str();
}

CriterionResult reconstruction_identity(const AcceptanceOptions& opt) {
    const auto cat = cat_state(1.5, 1, 64);
    const auto spec = grid_spec(0.0, square_grid(-3.0, 3.0, 0.3));
    const auto res = scan_grid(cat, spec, {1.0, 0.2, 0.1}, pipeline_options(opt), opt.threads);
    std::vector<double> direct;
    for (Complex b : spec.grid) direct.push_back(quasiprob_direct(cat, b, 0.0));
    return below(1, "reconstruction identity (even cat 1.5, dim 64, gt=0.1, nbar=0.2, s=0, 21x21)",
                 max_point_gap(res, direct), 1e-8);
}

CriterionResult channel_independence(const AcceptanceOptions& opt) {
    const auto cat = cat_state(1.5, 1, 64);
    const auto spec = grid_spec(0.0, square_grid(-3.0, 3.0, 0.3));
    const auto a = scan_grid(cat, spec, {1.0, 0.1, 0.05}, pipeline_options(opt), opt.threads);
    const auto b = scan_grid(cat, spec, {1.0, 0.3, 0.2}, pipeline_options(opt), opt.threads);
    std::vector<double> ref;
    for (const auto& p : b.points) ref.push_back(p.error.empty() ? p.W : std::numeric_limits<double>::quiet_NaN());
    double gap = max_point_gap(a, ref);
    if (std::isnan(gap)) gap = std::numeric_limits<double>::infinity();
    return below(2, "channel independence ((gt, nbar) = (0.05, 0.1) vs (0.2, 0.3))", gap, 1e-7);
}

CriterionResult diagonal_consistency() {
    std::mt19937_64 rng(20240301);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto c = channel_coefficients({1.0, 0.5, 0.3});
    EvolveOptions loose;
    loose.tail_tol = 1.0;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd w(32);
        for (Eigen::Index k = 0; k < 32; ++k) w(k) = u(rng);
        w /= w.sum();
        const FockDensityMatrix rho(w.cast<Complex>().asDiagonal().toDenseMatrix());
        const auto full = evolve_closed_form(rho, c, loose);
        const auto diag = evolved_diagonal(PhotonDistribution::diagonal_of(rho), c, 32);
        for (std::size_t m = 0; m < 32; ++m) worst = std::max(worst, std::abs(diag.probs[m] - full(m, m).real()));
    }
    return below(3, "photon-number propagation equals channel diagonal (20 random, dim 32)", worst, 1e-10);
}

CriterionResult factorization() {
    double worst = 0.0;
    for (const auto& rho : {fock_state(0, 40), cat_state(1.5, 1, 40)})
        for (double nbar : {0.0, 0.2})
            for (double t : {0.1, 1.0}) {
                const ChannelParams p{1.0, nbar, t};
                const double td =
                    trace_distance(factorized_evolution(rho, 0.5, p), evolve_numerical(rho, p, 0.5).rho);
                worst = std::max(worst, td);
            }
    return below(4, "drive factorization vs integrator (alpha=0.5, 8 scenarios)", worst, 1e-6);
}

CriterionResult steady_state() {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    ComplexMatrix gm = ComplexMatrix::Zero(64, 64);
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) gm(i, j) = Complex(g(rng), g(rng));
    ComplexMatrix mixed = gm * gm.adjoint();
    mixed /= mixed.trace().real();

    const Complex alpha0(2.0, 1.0);
    const std::vector<FockDensityMatrix> states{fock_state(0, 64), fock_state(5, 64), cat_state(1.5, 1, 64),
                                                coherent_state(alpha0, 64), FockDensityMatrix(mixed)};
    const char* names[] = {"vacuum", "fock 5", "even cat 1.5", "coherent 2+i", "random mixed"};
    double worst = 0.0;
    std::size_t worst_state = 0;
    double worst_nbar = 0.0;
    for (double nbar : {0.0, 0.5, 1.0}) {
        const auto c = channel_coefficients({1.0, nbar, 20.0});
        const auto target = thermal_state(nbar, 64);
        for (std::size_t i = 0; i < states.size(); ++i) {
            const double td = trace_distance(evolve_closed_form(states[i], c), target);
            if (td > worst) {
                worst = td;
                worst_state = i;
                worst_nbar = nbar;
            }
        }
    }
    // A residual coherent amplitude alpha e^{-gt/2} survives for every nbar.
    char detail[160];
    std::snprintf(detail, sizeof detail, "worst: %s at nbar=%g; coherence floor |alpha0| e^{-gt/2} = %.6e",
                  names[worst_state], worst_nbar, std::abs(alpha0) * std::exp(-10.0));
    return below(5, "steady state at gt=20 (5 states x nbar in {0, 0.5, 1})", worst, 1e-5, detail);
}

CriterionResult exact_weights(const AcceptanceOptions& opt) {
    const ChannelParams p{1.0, 1.0, std::log(2.0)};
    const auto c = channel_coefficients(p);
    const double chi_err = std::abs(weight_chi(0.0, c).chi - 5.0);
    bool nonconv = false, singular = false;
    const auto rho = cat_state(1.0, 1, 32);
    try {
        reconstruct_point(rho, 0.0, grid_spec(0.0, {}), p, pipeline_options(opt));
    } catch (const NonConvergenceError&) {
        nonconv = true;
    }
    try {
        reconstruct_point(rho, 0.0, grid_spec(-1.0, {}), p, pipeline_options(opt));
    } catch (const SingularWeightError&) {
        singular = true;
    }
    CriterionResult r = below(6, "exact-fraction weight (s=0, gt=ln2, nbar=1: chi=5; error paths)", chi_err, 1e-12);
    r.pass = r.pass && nonconv && singular;
    r.detail = std::string("nonconvergence ") + (nonconv ? "raised" : "missing") + ", singular weight " +
               (singular ? "raised" : "missing");
    return r;
}

CriterionResult pinned_values(const AcceptanceOptions& opt) {
    const ChannelParams p{1.0, 0.2, 0.1};
    const auto ro = pipeline_options(opt);
    double worst = 0.0;
    try {
        worst = std::max(worst, std::abs(reconstruct_point(fock_state(0, 32), 0.0, grid_spec(0.0, {}), p, ro).W - 2.0 / kPi));
        worst = std::max(worst, std::abs(reconstruct_point(fock_state(1, 32), 0.0, grid_spec(0.0, {}), p, ro).W + 2.0 / kPi));
        worst = std::max(worst, std::abs(reconstruct_point(fock_state(0, 32), 1.0, grid_spec(-1.0, {}), p, ro).W -
                                         std::exp(-1.0) / kPi));
    } catch (const Error&) {
        worst = std::numeric_limits<double>::infinity();
    }
    return below(7, "pinned values W(0;0)=2/pi, -2/pi, Q(1;vac)=1/(e pi)", worst, 1e-8);
}

CriterionResult q_positivity(const AcceptanceOptions& opt) {
    const std::vector<FockDensityMatrix> states{fock_state(0, 64),
                                                fock_state(1, 64),
                                                fock_state(3, 64),
                                                cat_state(1.5, 1, 64),
                                                cat_state(1.5, -1, 64),
                                                coherent_state(Complex(1.0, -1.0), 64),
                                                thermal_state(0.6, 64)};
    const auto spec = grid_spec(-1.0, square_grid(-3.0, 3.0, 0.3));
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& rho : states) {
        const auto res = scan_grid(rho, spec, {1.0, 0.2, 0.1}, pipeline_options(opt), opt.threads);
        for (const auto& pt : res.points)
            lowest = std::min(lowest, pt.error.empty() ? pt.W : -std::numeric_limits<double>::infinity());
    }
    return {8, "Q function nonnegative (7 states, 21x21)", lowest, -1e-9, ">=", lowest >= -1e-9, {}};
}

CriterionResult probe_roundtrip() {
    const auto poisson = [](std::size_t trunc) {
        std::vector<double> p(trunc);
        double w = std::exp(-1.0);
        for (std::size_t m = 0; m < trunc; ++m) {
            p[m] = w;
            w /= static_cast<double>(m + 1);
        }
        return PhotonDistribution::from_probs(std::move(p));
    };
    const auto max_err = [](const PhotonDistribution& got, const PhotonDistribution& want) {
        double e = 0.0;
        for (std::size_t m = 0; m < got.trunc(); ++m) e = std::max(e, std::abs(got.probs[m] - want.probs[m]));
        return e;
    };
    const ProbeSpec spec{1.0, 256, 20};
    double delta_err = 0.0;
    for (std::size_t k = 0; k < 20; ++k) {
        std::vector<double> d(20, 0.0);
        d[k] = 1.0;
        const auto p = PhotonDistribution::from_probs(d);
        delta_err = std::max(delta_err, max_err(invert_fourier(inversion_signal(p, spec), spec), p));
    }
    const auto p1 = poisson(20);
    const double poisson_err = max_err(invert_fourier(inversion_signal(p1, spec), spec), p1);

    // Order in 1/n_samples. On the odd-harmonic lattice the midpoint sum is
    // exact, so those errors sit at round-off (floor 1e-13). A signal whose
    // frequencies are detuned off the lattice has a genuine quadrature error,
    // measured against the analytic continuum integral.
    constexpr double kFloor = 1e-13;
    const double detune = 1.01;
    std::vector<double> lattice, detuned;
    for (std::size_t n : {64u, 128u, 256u}) {
        const ProbeSpec s{1.0, n, 20};
        lattice.push_back(max_err(invert_fourier(inversion_signal(p1, s), s), p1));
        ProbeSignal sig;
        for (std::size_t j = 0; j < n; ++j) {
            const double tau = (static_cast<double>(j) + 0.5) * kPi / static_cast<double>(n);
            double v = 0.0;
            for (std::size_t k = 0; k < 20; ++k) v += p1.probs[k] * std::cos(static_cast<double>(2 * k + 3) * detune * tau);
            sig.taus.push_back(tau);
            sig.values.push_back(v);
        }
        const auto rec = invert_fourier(sig, s);
        double e = 0.0;
        for (std::size_t m = 0; m < 20; ++m) {
            const double b = static_cast<double>(2 * m + 3);
            double exact = 0.0;
            for (std::size_t k = 0; k < 20; ++k) {
                const double a = static_cast<double>(2 * k + 3) * detune;
                exact += p1.probs[k] * 0.5 * (std::sin((a - b) * kPi) / (a - b) + std::sin((a + b) * kPi) / (a + b));
            }
            e = std::max(e, std::abs(rec.probs[m] - 2.0 / kPi * exact));
        }
        detuned.push_back(e);
    }
    bool order_ok = true;
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < 3; ++i) {
        order_ok = order_ok && (lattice[i + 1] <= std::max(lattice[i] / 4.0, kFloor));
        const double ratio = detuned[i] / detuned[i + 1];
        worst_ratio = std::min(worst_ratio, ratio);
        order_ok = order_ok && ratio >= 4.0;
    }
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "delta %.3e (<1e-10), Poisson %.3e (<1e-6), lattice errors %.1e/%.1e/%.1e, detuned ratio min %.3f (>=4)",
                  delta_err, poisson_err, lattice[0], lattice[1], lattice[2], worst_ratio);
    return {9, "probe Fourier round trip (lambda=1, n=256, m_max=20; worst error / tolerance)",
            std::max(delta_err / 1e-10, poisson_err / 1e-6),
            1.0, "<", delta_err < 1e-10 && poisson_err < 1e-6 && order_ok, buf};
}

CriterionResult binomial_identity() {
    double worst = 0.0;
    for (unsigned n = 0; n <= 5; ++n)
        for (double x : {0.1, 0.5, 0.9}) worst = std::max(worst, binomial_series_identity_check(n, x));
    return below(10, "binomial series identity (n <= 5, x in {0.1, 0.5, 0.9})", worst, 1e-9);
}

CriterionResult superoperator_algebra() {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g;
    double worst = 0.0;
    const auto pad = [](const ComplexMatrix& m, Eigen::Index n) {
        ComplexMatrix out = ComplexMatrix::Zero(n, n);
        out.topLeftCorner(m.rows(), m.cols()) = m;
        return out;
    };
    for (int trial = 0; trial < 10; ++trial) {
        ComplexMatrix m(12, 12);
        for (Eigen::Index i = 0; i < 12; ++i)
            for (Eigen::Index j = 0; j < 12; ++j) m(i, j) = Complex(g(rng), g(rng));
        const ComplexMatrix r = 0.5 * (m + m.adjoint());
        const ComplexMatrix comm = pad(apply_jminus(apply_jplus(r)), 13) - pad(apply_jplus(apply_jminus(r)), 13);
        worst = std::max(worst, (comm - pad(apply_j3(r), 13)).cwiseAbs().maxCoeff());
        const ComplexMatrix jp = apply_jplus(r);
        worst = std::max(worst, (apply_j3(jp) - apply_jplus(apply_j3(r)) - 2.0 * jp).cwiseAbs().maxCoeff());
    }
    return below(11, "superoperator commutators [J-,J+]=J3, [J3,J+]=2J+ (dim 12)", worst, 1e-12);
}

CriterionResult determinism(const AcceptanceOptions& opt) {
    const auto cat = cat_state(1.5, 1, 64);
    const auto spec = grid_spec(0.0, square_grid(-3.0, 3.0, 0.6));
    const ChannelParams p{1.0, 0.2, 0.1};
    const std::string a = table_text(scan_grid(cat, spec, p, pipeline_options(opt), 1));
    const std::string b = table_text(scan_grid(cat, spec, p, pipeline_options(opt), 4));
    const std::string c = table_text(scan_grid(cat, spec, p, pipeline_options(opt), 1));
    const ProbeSpec ps{1.0, 128, 20};
    const auto dist = PhotonDistribution::diagonal_of(factorized_evolution(cat, 0.5, p));
    std::ostringstream s1, s2;
    io::write_signal(s1, inversion_signal(dist, ps));
    io::write_signal(s2, inversion_signal(dist, ps));
    const int mismatches = (a != b) + (a != c) + (s1.str() != s2.str());
    return {12, "determinism (tables and signals byte-identical across reruns and thread counts)",
            static_cast<double>(mismatches), 0.0, "==", mismatches == 0, {}};
}

template <class F>
CriterionResult guarded(int id, const char* name, F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        return {id, name, std::numeric_limits<double>::quiet_NaN(), 0.0, "<", false,
                std::string("unexpected error: ") + e.what()};
    }
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
    std::vector<CriterionResult> out;
    out.push_back(guarded(1, "reconstruction identity", [&] { return reconstruction_identity(opt); }));
    out.push_back(guarded(2, "channel independence", [&] { return channel_independence(opt); }));
    out.push_back(guarded(3, "diagonal consistency", [] { return diagonal_consistency(); }));
    out.push_back(guarded(4, "factorization", [] { return factorization(); }));
    out.push_back(guarded(5, "steady state", [] { return steady_state(); }));
    out.push_back(guarded(6, "exact weights", [&] { return exact_weights(opt); }));
    out.push_back(guarded(7, "pinned values", [&] { return pinned_values(opt); }));
    out.push_back(guarded(8, "Q positivity", [&] { return q_positivity(opt); }));
    out.push_back(guarded(9, "probe round trip", [] { return probe_roundtrip(); }));
    out.push_back(guarded(10, "binomial identity", [] { return binomial_identity(); }));
    out.push_back(guarded(11, "superoperator algebra", [] { return superoperator_algebra(); }));
    out.push_back(guarded(12, "determinism", [&] { return determinism(opt); }));
    return out;
}

std::string format_report(const std::vector<CriterionResult>& results) {
    std::ostringstream os;
    int passed = 0;
    for (const auto& r : results) {
        char line[512];
        std::snprintf(line, sizeof line, "[%s] C%02d %s: measured=%.6e required %s %.1e", r.pass ? "PASS" : "FAIL",
                      r.id, r.name.c_str(), r.measured, r.relation.c_str(), r.tolerance);
        os << line;
        if (!r.detail.empty()) os << " (" << r.detail << ')';
        os << '\n';
        passed += r.pass;
    }
    os << passed << '/' << results.size() << " criteria passed\n";
    return os.str();
}

bool all_passed(const std::vector<CriterionResult>& results) {
    return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.pass; });
}

}  // namespace cavrec
