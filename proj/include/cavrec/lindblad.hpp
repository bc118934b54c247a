#pragma once

#include <cstddef>

#include "cavrec/fock.hpp"

namespace cavrec {

// Damping rate gamma (1/time), thermal occupancy nbar, elapsed time t.
struct ChannelParams {
    double gamma = 0.0;
    double nbar = 0.0;
    double t = 0.0;

    double gamma_t() const { return gamma * t; }
    // Throws DomainError for negative or non-finite fields.
    void validate() const;
};

struct ChannelCoefficients {
    double N_t = 0.0;       // nbar (1 - e^{-gamma t})
    double Gamma_n = 0.0;   // nbar (1 - e^{-gamma t}) / (1 + N_t)
    double Gamma_n1 = 0.0;  // (nbar + 1)(1 - e^{-gamma t}) / (1 + N_t)
    double x3 = 1.0;        // e^{-gamma t / 2} / (1 + N_t)
    double exp_gt = 1.0;    // e^{-gamma t}
    double gamma_t = 0.0;
};

ChannelCoefficients channel_coefficients(const ChannelParams& p);

// Drive amplitude held for t_drive, and the displacement it amounts to.
struct DriveSpec {
    Complex alpha;
    double gamma = 0.0;
    double t_drive = 0.0;
    Complex beta;

    static DriveSpec make(Complex alpha, double gamma, double t_drive);
};

// beta = -2 alpha (1 - e^{gamma t / 2}) / gamma, or alpha t when gamma = 0.
// The growing exponential is correct: the damping applied afterwards shrinks
// the field back to an amplitude of (2 alpha / gamma)(1 - e^{-gamma t/2}).
Complex effective_displacement(Complex alpha, double gamma, double t);

// Superoperators acting on a truncated matrix. jplus grows the matrix by one
// row and column so that no entry is lost; the others keep its size.
//   J- rho = a rho a^dag,  J+ rho = a^dag rho a,  J3 rho = a^dag a rho + rho a^dag a + rho
ComplexMatrix apply_jminus(const ComplexMatrix& rho);
ComplexMatrix apply_jplus(const ComplexMatrix& rho);
ComplexMatrix apply_j3(const ComplexMatrix& rho);

struct EvolveOptions {
    // Largest trace lost past the cutoff before TruncationError.
    double tail_tol = 1e-9;
    double series_tol = 1e-16;
};

// Undriven thermal channel through the ordered product
//   e^{gamma t/2} exp(Gamma_n J+) x3^{J3} exp(Gamma_n1 J-).
FockDensityMatrix evolve_closed_form(const FockDensityMatrix& rho, const ChannelCoefficients& c,
                                     const EvolveOptions& opt = {});

struct IntegratorOptions {
    // 0 picks the count so that gamma * dt <= max_gamma_dt.
    std::size_t steps = 0;
    double max_gamma_dt = 1e-3;
    double trace_drift_tol = 1e-7;
};

struct IntegrationResult {
    FockDensityMatrix rho;
    double trace_drift = 0.0;
    std::size_t steps = 0;
};

// Fixed-step RK4 on the full driven master equation: the coherent drive
// [alpha^* a - alpha a^dag, rho] plus the two thermal dissipators. Throws
// IntegrationError when the trace drifts more than trace_drift_tol.
IntegrationResult evolve_numerical(const FockDensityMatrix& rho, const ChannelParams& p, Complex alpha,
                                   const IntegratorOptions& opt = {});

// Damping after an equivalent displacement: e^{Lt} D^dag(beta) rho D(beta).
FockDensityMatrix factorized_evolution(const FockDensityMatrix& rho, Complex alpha, const ChannelParams& p,
                                       const EvolveOptions& opt = {}, double displacement_tol = 1e-9);

}  // namespace cavrec
