#include "cavrec/fock.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cavrec/errors.hpp"

namespace cavrec {

namespace {

double hermiticity_error(const ComplexMatrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// Coherent-state amplitudes c_m = exp(-|a|^2/2) a^m / sqrt(m!) for m < dim, plus
// the probability carried by m >= dim, summed until it stops changing.
struct CoherentAmplitudes {
    ComplexVector coeffs;
    double tail = 0.0;
    // Same, but for the cat combination weight |1 + sign (-1)^m|^2.
    double tail_even = 0.0;
    double tail_odd = 0.0;
};

CoherentAmplitudes coherent_amplitudes(Complex alpha0, std::size_t dim) {
    CoherentAmplitudes out;
    out.coeffs.resize(static_cast<Eigen::Index>(dim));
    const double x = std::norm(alpha0);
    Complex c = std::exp(-0.5 * x);
    for (std::size_t m = 0; m < dim; ++m) {
        out.coeffs(static_cast<Eigen::Index>(m)) = c;
        c *= alpha0 / std::sqrt(static_cast<double>(m + 1));
    }
    // Past the Poisson peak the terms fall monotonically.
    for (std::size_t m = dim; m < dim + 100000; ++m) {
        const double p = std::norm(c);
        if (m % 2 == 0) {
            out.tail_even += p;
        } else {
            out.tail_odd += p;
        }
        out.tail += p;
        if (static_cast<double>(m) > x && (p == 0.0 || p < 1e-18 * out.tail)) break;
        c *= alpha0 / std::sqrt(static_cast<double>(m + 1));
    }
    return out;
}

FockDensityMatrix pure_state(const ComplexVector& psi, double tail) {
    const double norm2 = psi.squaredNorm();
    const ComplexVector v = psi / std::sqrt(norm2);
    return FockDensityMatrix(v * v.adjoint(), tail);
}

// Laguerre closed form for the displacement matrix, no checks.
ComplexMatrix displacement_elements(Complex beta, std::size_t dim) {
    const auto n = static_cast<Eigen::Index>(dim);
    ComplexMatrix d = ComplexMatrix::Zero(n, n);
    const double r = std::abs(beta);
    if (r == 0.0) {
        d.setIdentity();
        return d;
    }
    const double x = r * r;
    const double theta = std::arg(beta);
    const double log_r = std::log(r);
    for (Eigen::Index off = 0; off < n; ++off) {
        const double a = static_cast<double>(off);
        const Complex lower_phase = std::polar(1.0, a * theta);
        const Complex upper_phase = std::polar(off % 2 == 0 ? 1.0 : -1.0, -a * theta);
        // sqrt(k!/(k+off)!) r^off exp(-x/2), advanced in k by running product.
        double pref = std::exp(a * log_r - 0.5 * x - 0.5 * std::lgamma(a + 1.0));
        double l_prev = 0.0;
        double l_cur = 1.0;
        for (Eigen::Index k = 0; k + off < n; ++k) {
            if (k == 1) {
                l_prev = l_cur;
                l_cur = 1.0 + a - x;
            } else if (k > 1) {
                const double kk = static_cast<double>(k - 1);
                const double l_next = ((2.0 * kk + 1.0 + a - x) * l_cur - (kk + a) * l_prev) / (kk + 1.0);
                l_prev = l_cur;
                l_cur = l_next;
            }
            if (k > 0) pref *= std::sqrt(static_cast<double>(k) / static_cast<double>(k + off));
            const double value = pref * l_cur;
            d(k + off, k) = lower_phase * value;
            if (off > 0) d(k, k + off) = upper_phase * value;
        }
    }
    return d;
}

}  // namespace

FockDensityMatrix::FockDensityMatrix(ComplexMatrix entries, double tail_mass_bound, bool)
    : entries_(std::move(entries)), tail_mass_bound_(tail_mass_bound) {
    if (entries_.rows() == 0 || entries_.rows() != entries_.cols())
        throw DomainError("density matrix must be square with dim >= 1");
    if (!(tail_mass_bound_ >= 0.0)) throw DomainError("tail_mass_bound must be >= 0");
}

FockDensityMatrix::FockDensityMatrix(ComplexMatrix entries, double tail_mass_bound, const Tolerances& tol)
    : FockDensityMatrix(std::move(entries), tail_mass_bound, true) {
    const double herm = hermiticity_error(entries_);
    if (herm > tol.hermiticity)
        throw DomainError("density matrix not Hermitian (error " + std::to_string(herm) + ")");
    entries_ = 0.5 * (entries_ + entries_.adjoint()).eval();
    const double tr_err = std::abs(entries_.trace().real() - 1.0);
    if (tr_err > tol.trace)
        throw DomainError("density matrix trace differs from 1 by " + std::to_string(tr_err));
}

FockDensityMatrix FockDensityMatrix::unnormalized(ComplexMatrix entries, double tail_mass_bound) {
    FockDensityMatrix rho(std::move(entries), tail_mass_bound, true);
    const double herm = hermiticity_error(rho.entries_);
    if (herm > 1e-9) throw DomainError("density matrix not Hermitian (error " + std::to_string(herm) + ")");
    rho.entries_ = 0.5 * (rho.entries_ + rho.entries_.adjoint()).eval();
    return rho;
}

ValidationReport validate(const FockDensityMatrix& rho, const Tolerances& tol) {
    ValidationReport rep;
    const ComplexMatrix& m = rho.entries();
    rep.hermiticity_error = hermiticity_error(m);
    rep.trace_error = std::abs(m.trace().real() - 1.0);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    rep.min_eigenvalue = es.eigenvalues().minCoeff();
    rep.ok = rep.hermiticity_error <= tol.hermiticity && rep.trace_error <= tol.trace &&
             rep.min_eigenvalue >= -tol.positivity;
    return rep;
}

FockDensityMatrix coherent_state(Complex alpha0, std::size_t dim, const Tolerances& tol) {
    if (dim == 0) throw DomainError("dim must be >= 1");
    const auto amps = coherent_amplitudes(alpha0, dim);
    if (amps.tail > tol.tail_mass)
        throw TruncationError("coherent state tail mass " + std::to_string(amps.tail) + " exceeds tolerance at dim " +
                                  std::to_string(dim),
                              amps.tail, tol.tail_mass);
    return pure_state(amps.coeffs, amps.tail);
}

FockDensityMatrix fock_state(std::size_t n, std::size_t dim) {
    if (n >= dim) throw IndexError("Fock index " + std::to_string(n) + " outside dim " + std::to_string(dim));
    const auto d = static_cast<Eigen::Index>(dim);
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = 1.0;
    return FockDensityMatrix(std::move(m), 0.0);
}

FockDensityMatrix cat_state(Complex alpha0, int sign, std::size_t dim, const Tolerances& tol) {
    if (dim == 0) throw DomainError("dim must be >= 1");
    if (sign != 1 && sign != -1) throw DomainError("cat sign must be +1 or -1");
    auto amps = coherent_amplitudes(alpha0, dim);
    ComplexVector psi = amps.coeffs;
    for (Eigen::Index m = 0; m < psi.size(); ++m) {
        const bool odd = (m % 2) != 0;
        // Exact zeros on the suppressed parity.
        psi(m) = (odd == (sign == 1)) ? Complex{} : 2.0 * psi(m);
    }
    const double kept = psi.squaredNorm();
    const double lost = 4.0 * (sign == 1 ? amps.tail_even : amps.tail_odd);
    if (kept == 0.0) throw DomainError("cat state has zero norm (odd cat at alpha0 = 0)");
    const double tail = lost / (kept + lost);
    if (tail > tol.tail_mass)
        throw TruncationError("cat state tail mass " + std::to_string(tail) + " exceeds tolerance at dim " +
                                  std::to_string(dim),
                              tail, tol.tail_mass);
    return pure_state(psi, tail);
}

FockDensityMatrix thermal_state(double nbar, std::size_t dim) {
    if (dim == 0) throw DomainError("dim must be >= 1");
    if (!(nbar >= 0.0)) throw DomainError("nbar must be >= 0");
    const auto d = static_cast<Eigen::Index>(dim);
    const double q = nbar / (1.0 + nbar);
    Eigen::VectorXd p(d);
    double w = 1.0;
    for (Eigen::Index m = 0; m < d; ++m) {
        p(m) = w;
        w *= q;
    }
    const double tail = std::pow(q, static_cast<double>(dim));
    p /= p.sum();
    return FockDensityMatrix(p.cast<Complex>().asDiagonal().toDenseMatrix(), tail);
}

std::size_t recommended_dim(double amplitude) {
    const double r = std::abs(amplitude) + 3.0;
    return static_cast<std::size_t>(std::ceil(r * r));
}

DisplacementMatrix displacement_matrix(Complex beta, std::size_t dim, const Tolerances& tol) {
    const double room = std::sqrt(static_cast<double>(dim)) - std::abs(beta) - 3.0;
    if (room < 0.0 && std::abs(beta) > 0.0)
        throw TruncationError("|beta| = " + std::to_string(std::abs(beta)) + " leaves no headroom at dim " +
                                  std::to_string(dim),
                              std::abs(beta), std::sqrt(static_cast<double>(dim)) - 3.0);
    const std::size_t cols =
        std::abs(beta) == 0.0 ? dim : std::min(dim, static_cast<std::size_t>(std::floor(room * room)) + 1);
    return displacement_matrix(beta, dim, cols, tol);
}

DisplacementMatrix displacement_matrix(Complex beta, std::size_t dim, std::size_t check_columns,
                                       const Tolerances& tol) {
    if (dim == 0) throw DomainError("dim must be >= 1");
    DisplacementMatrix out;
    out.matrix = displacement_elements(beta, dim);
    out.checked_columns = std::min(check_columns, dim);
    for (std::size_t n = 0; n < out.checked_columns; ++n) {
        const double err = std::abs(1.0 - out.matrix.col(static_cast<Eigen::Index>(n)).squaredNorm());
        out.unitarity_deviation = std::max(out.unitarity_deviation, err);
    }
    if (out.unitarity_deviation > tol.unitarity)
        throw TruncationError("displacement matrix unitarity deviation " + std::to_string(out.unitarity_deviation) +
                                  " exceeds tolerance",
                              out.unitarity_deviation, tol.unitarity);
    return out;
}

FockDensityMatrix displace_state(const FockDensityMatrix& rho, Complex beta, double trace_tol) {
    if (std::abs(beta) == 0.0) return rho;
    const ComplexMatrix d = displacement_elements(beta, rho.dim());
    ComplexMatrix out = d.adjoint() * rho.entries() * d;
    const double lost = rho.trace() - out.trace().real();
    if (lost > trace_tol)
        throw TruncationError("displacement by |beta| = " + std::to_string(std::abs(beta)) + " leaks trace " +
                                  std::to_string(lost) + " past dim " + std::to_string(rho.dim()),
                              lost, trace_tol);
    return FockDensityMatrix::unnormalized(std::move(out), rho.tail_mass_bound() + std::max(0.0, lost));
}

double trace_distance(const FockDensityMatrix& a, const FockDensityMatrix& b) {
    if (a.dim() != b.dim())
        throw DomainError("trace_distance dim mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
    const ComplexMatrix diff = a.entries() - b.entries();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double mean_photon(const FockDensityMatrix& rho) {
    const Eigen::VectorXd p = rho.diagonal();
    double n = 0.0;
    for (Eigen::Index m = 0; m < p.size(); ++m) n += static_cast<double>(m) * p(m);
    return n;
}

double purity(const FockDensityMatrix& rho) {
    return (rho.entries() * rho.entries()).trace().real();
}

}  // namespace cavrec
