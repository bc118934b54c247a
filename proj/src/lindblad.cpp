#include "cavrec/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cavrec/errors.hpp"

namespace cavrec {

namespace {

using Index = Eigen::Index;

double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// a^dag rho a kept inside the current cutoff (the top row/column falls off).
ComplexMatrix raise_truncated(const ComplexMatrix& rho) {
    const Index n = rho.rows();
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (Index k = 1; k < n; ++k)
        for (Index m = 1; m < n; ++m)
            out(m, k) = std::sqrt(static_cast<double>(m * k)) * rho(m - 1, k - 1);
    return out;
}

// exp(g S) rho as a power series in a shift superoperator S. Each term obeys
// |T_{j+1}| <= g dim / (j+1) |T_j|, so once j+1 >= g dim the terms are
// nonincreasing and the first one under tol ends the sum.
template <class Shift>
ComplexMatrix shift_exponential(const ComplexMatrix& rho, double g, double tol, Shift shift) {
    ComplexMatrix sum = rho;
    if (g == 0.0) return sum;
    const double dim = static_cast<double>(rho.rows());
    ComplexMatrix term = rho;
    for (Index j = 1; j <= rho.rows(); ++j) {
        term = (g / static_cast<double>(j)) * shift(term);
        sum += term;
        const double size = max_abs(term);
        if (size == 0.0 || (size < tol && static_cast<double>(j + 1) >= g * dim)) break;
    }
    return sum;
}

// Right-hand side of the driven thermal master equation, using shift
// arithmetic on the truncated ladder operators.
struct MasterEquation {
    Complex alpha;
    double down;  // gamma (nbar + 1) / 2
    double up;    // gamma nbar / 2
    Eigen::VectorXd sq;  // sq(m) = sqrt(m)

    ComplexMatrix operator()(const ComplexMatrix& r) const {
        const Index n = r.rows();
        ComplexMatrix out(n, n);
        const Complex ac = std::conj(alpha);
        for (Index k = 0; k < n; ++k) {
            for (Index m = 0; m < n; ++m) {
                const Complex below_m = m > 0 ? r(m - 1, k) : Complex{};
                const Complex above_m = m + 1 < n ? r(m + 1, k) : Complex{};
                const Complex below_k = k > 0 ? r(m, k - 1) : Complex{};
                const Complex above_k = k + 1 < n ? r(m, k + 1) : Complex{};
                // (A rho - rho A) with A = alpha^* a - alpha a^dag.
                const Complex a_rho = ac * (m + 1 < n ? sq(m + 1) : 0.0) * above_m - alpha * sq(m) * below_m;
                const Complex rho_a = ac * sq(k) * below_k - alpha * (k + 1 < n ? sq(k + 1) : 0.0) * above_k;
                Complex v = a_rho - rho_a;

                const auto dm = static_cast<double>(m);
                const auto dk = static_cast<double>(k);
                const Complex lowered = (m + 1 < n && k + 1 < n) ? sq(m + 1) * sq(k + 1) * r(m + 1, k + 1) : Complex{};
                const Complex raised = (m > 0 && k > 0) ? sq(m) * sq(k) * r(m - 1, k - 1) : Complex{};
                // a a^dag is diag(1, ..., n-1, 0) on the truncated space.
                const double aad_m = m + 1 < n ? dm + 1.0 : 0.0;
                const double aad_k = k + 1 < n ? dk + 1.0 : 0.0;
                v += down * (2.0 * lowered - (dm + dk) * r(m, k));
                v += up * (2.0 * raised - (aad_m + aad_k) * r(m, k));
                out(m, k) = v;
            }
        }
        return out;
    }
};

}  // namespace

void ChannelParams::validate() const {
    if (!std::isfinite(gamma) || gamma < 0.0) throw DomainError("gamma must be finite and >= 0");
    if (!std::isfinite(nbar) || nbar < 0.0) throw DomainError("nbar must be finite and >= 0");
    if (!std::isfinite(t) || t < 0.0) throw DomainError("t must be finite and >= 0");
    if (!std::isfinite(gamma * t)) throw DomainError("gamma * t must be finite");
}

ChannelCoefficients channel_coefficients(const ChannelParams& p) {
    p.validate();
    ChannelCoefficients c;
    c.gamma_t = p.gamma_t();
    c.exp_gt = std::exp(-c.gamma_t);
    const double loss = -std::expm1(-c.gamma_t);
    c.N_t = p.nbar * loss;
    c.Gamma_n = p.nbar * loss / (1.0 + c.N_t);
    c.Gamma_n1 = (p.nbar + 1.0) * loss / (1.0 + c.N_t);
    c.x3 = std::exp(-0.5 * c.gamma_t) / (1.0 + c.N_t);
    return c;
}

Complex effective_displacement(Complex alpha, double gamma, double t) {
    if (!(gamma >= 0.0) || !(t >= 0.0)) throw DomainError("effective_displacement needs gamma >= 0 and t >= 0");
    if (gamma == 0.0) return alpha * t;
    // -2 (1 - e^{gt/2}) / g = 2 expm1(gt/2) / g
    return alpha * (2.0 * std::expm1(0.5 * gamma * t) / gamma);
}

DriveSpec DriveSpec::make(Complex alpha, double gamma, double t_drive) {
    return DriveSpec{alpha, gamma, t_drive, effective_displacement(alpha, gamma, t_drive)};
}

ComplexMatrix apply_jminus(const ComplexMatrix& rho) {
    const Index n = rho.rows();
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (Index k = 0; k + 1 < n; ++k)
        for (Index m = 0; m + 1 < n; ++m)
            out(m, k) = std::sqrt(static_cast<double>((m + 1) * (k + 1))) * rho(m + 1, k + 1);
    return out;
}

ComplexMatrix apply_jplus(const ComplexMatrix& rho) {
    const Index n = rho.rows();
    ComplexMatrix out = ComplexMatrix::Zero(n + 1, n + 1);
    for (Index k = 1; k <= n; ++k)
        for (Index m = 1; m <= n; ++m)
            out(m, k) = std::sqrt(static_cast<double>(m * k)) * rho(m - 1, k - 1);
    return out;
}

ComplexMatrix apply_j3(const ComplexMatrix& rho) {
    ComplexMatrix out = rho;
    for (Index k = 0; k < rho.cols(); ++k)
        for (Index m = 0; m < rho.rows(); ++m) out(m, k) *= static_cast<double>(m + k + 1);
    return out;
}

FockDensityMatrix evolve_closed_form(const FockDensityMatrix& rho, const ChannelCoefficients& c,
                                     const EvolveOptions& opt) {
    if (c.gamma_t == 0.0) return rho;
    ComplexMatrix r = shift_exponential(rho.entries(), c.Gamma_n1, opt.series_tol, apply_jminus);

    // e^{gt/2} x3^{m+k+1} = e^{-gt (m+k)/2} (1 + N_t)^{-(m+k+1)}
    const double log_step = -0.5 * c.gamma_t - std::log1p(c.N_t);
    const double log_base = -std::log1p(c.N_t);
    for (Index k = 0; k < r.cols(); ++k)
        for (Index m = 0; m < r.rows(); ++m)
            r(m, k) *= std::exp(log_base + log_step * static_cast<double>(m + k));

    r = shift_exponential(r, c.Gamma_n, opt.series_tol, raise_truncated);

    const double lost = rho.trace() - r.trace().real();
    if (lost > opt.tail_tol)
        throw TruncationError("thermal channel pushes trace " + std::to_string(lost) + " past dim " +
                                  std::to_string(rho.dim()),
                              lost, opt.tail_tol);
    return FockDensityMatrix::unnormalized(std::move(r), rho.tail_mass_bound() + std::max(0.0, lost));
}

IntegrationResult evolve_numerical(const FockDensityMatrix& rho, const ChannelParams& p, Complex alpha,
                                   const IntegratorOptions& opt) {
    p.validate();
    std::size_t steps = opt.steps;
    if (steps == 0) {
        const double rate = std::max(p.gamma, std::abs(alpha));
        steps = static_cast<std::size_t>(std::ceil(rate * p.t / opt.max_gamma_dt));
    }
    if (steps == 0 || p.t == 0.0) return {rho, 0.0, 0};

    const Index n = static_cast<Index>(rho.dim());
    MasterEquation f{alpha, 0.5 * p.gamma * (p.nbar + 1.0), 0.5 * p.gamma * p.nbar, Eigen::VectorXd(n + 1)};
    for (Index m = 0; m <= n; ++m) f.sq(m) = std::sqrt(static_cast<double>(m));

    const double h = p.t / static_cast<double>(steps);
    ComplexMatrix r = rho.entries();
    for (std::size_t s = 0; s < steps; ++s) {
        const ComplexMatrix k1 = f(r);
        const ComplexMatrix k2 = f(r + (0.5 * h) * k1);
        const ComplexMatrix k3 = f(r + (0.5 * h) * k2);
        const ComplexMatrix k4 = f(r + h * k3);
        r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        r = 0.5 * (r + r.adjoint()).eval();
    }
    const double drift = std::abs(r.trace().real() - rho.trace());
    if (drift > opt.trace_drift_tol)
        throw IntegrationError("integrator trace drift " + std::to_string(drift) + " exceeds tolerance", drift);
    return {FockDensityMatrix::unnormalized(std::move(r), rho.tail_mass_bound()), drift, steps};
}

FockDensityMatrix factorized_evolution(const FockDensityMatrix& rho, Complex alpha, const ChannelParams& p,
                                       const EvolveOptions& opt, double displacement_tol) {
    const Complex beta = effective_displacement(alpha, p.gamma, p.t);
    return evolve_closed_form(displace_state(rho, beta, displacement_tol), channel_coefficients(p), opt);
}

}  // namespace cavrec
