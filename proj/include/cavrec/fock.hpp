#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace cavrec {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

struct Tolerances {
    double hermiticity = 1e-12;
    double trace = 1e-10;
    double positivity = 1e-9;
    double unitarity = 1e-8;
    // Largest probability mass a constructor may drop past the cutoff.
    double tail_mass = 1e-10;
};

// Truncated density matrix on |0>..|dim-1>. Immutable once built.
class FockDensityMatrix {
public:
    // Takes ownership of entries; throws DomainError unless square, Hermitian
    // and unit trace to the given tolerances.
    explicit FockDensityMatrix(ComplexMatrix entries, double tail_mass_bound = 0.0,
                               const Tolerances& tol = {});

    // Skips the unit-trace requirement (Hermiticity still enforced). Used for
    // intermediate results of truncated maps whose trace may have leaked.
    static FockDensityMatrix unnormalized(ComplexMatrix entries, double tail_mass_bound);

    std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
    const ComplexMatrix& entries() const { return entries_; }
    Complex operator()(std::size_t m, std::size_t k) const { return entries_(m, k); }
    double tail_mass_bound() const { return tail_mass_bound_; }
    double trace() const { return entries_.trace().real(); }
    Eigen::VectorXd diagonal() const { return entries_.diagonal().real(); }

private:
    FockDensityMatrix(ComplexMatrix entries, double tail_mass_bound, bool);
    ComplexMatrix entries_;
    double tail_mass_bound_ = 0.0;
};

struct ValidationReport {
    double hermiticity_error = 0.0;
    double trace_error = 0.0;
    double min_eigenvalue = 0.0;
    bool ok = false;
};

ValidationReport validate(const FockDensityMatrix& rho, const Tolerances& tol = {});

FockDensityMatrix coherent_state(Complex alpha0, std::size_t dim, const Tolerances& tol = {});
FockDensityMatrix fock_state(std::size_t n, std::size_t dim);
// sign = +1 even cat, -1 odd cat.
FockDensityMatrix cat_state(Complex alpha0, int sign, std::size_t dim, const Tolerances& tol = {});
FockDensityMatrix thermal_state(double nbar, std::size_t dim);

// Suggested cutoff for a field of the given amplitude: (|amplitude| + 3)^2.
std::size_t recommended_dim(double amplitude);

struct DisplacementMatrix {
    ComplexMatrix matrix;
    // Largest |1 - column norm^2| among the checked leading columns.
    double unitarity_deviation = 0.0;
    std::size_t checked_columns = 0;
};

// <m|D(beta)|n> for D(beta) = exp(beta a^dag - beta^* a), from the associated
// Laguerre closed form. Columns whose support fits under the cutoff,
// (sqrt(n) + |beta| + 3)^2 <= dim, are checked for unit norm unless
// check_columns is given explicitly. Throws TruncationError when the deviation
// exceeds tol.unitarity or no column has headroom.
DisplacementMatrix displacement_matrix(Complex beta, std::size_t dim, const Tolerances& tol = {});
DisplacementMatrix displacement_matrix(Complex beta, std::size_t dim, std::size_t check_columns,
                                       const Tolerances& tol = {});

// D^dag(beta) rho D(beta). Throws TruncationError if the trace leaks by more
// than trace_tol.
FockDensityMatrix displace_state(const FockDensityMatrix& rho, Complex beta, double trace_tol = 1e-9);

double trace_distance(const FockDensityMatrix& a, const FockDensityMatrix& b);
double mean_photon(const FockDensityMatrix& rho);
double purity(const FockDensityMatrix& rho);

}  // namespace cavrec
