#pragma once

#include <stdexcept>
#include <string>

namespace cavrec {

// Root of every error the library raises. Validation-type errors map to CLI
// exit status 1, numerical ones to 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual bool numerical() const noexcept { return false; }
};

// Bad arguments: out-of-range parameters, mismatched dimensions, malformed input.
class DomainError : public Error {
public:
    using Error::Error;
};

class IndexError : public DomainError {
public:
    using DomainError::DomainError;
};

class NumericalError : public Error {
public:
    using Error::Error;
    bool numerical() const noexcept override { return true; }
};

// Probability mass or unitarity lost past the Fock cutoff exceeds tolerance.
class TruncationError : public NumericalError {
public:
    TruncationError(const std::string& what, double measured, double tolerance)
        : NumericalError(what), measured_(measured), tolerance_(tolerance) {}
    double measured() const noexcept { return measured_; }
    double tolerance() const noexcept { return tolerance_; }

private:
    double measured_;
    double tolerance_;
};

class IntegrationError : public NumericalError {
public:
    IntegrationError(const std::string& what, double trace_drift)
        : NumericalError(what), trace_drift_(trace_drift) {}
    double trace_drift() const noexcept { return trace_drift_; }

private:
    double trace_drift_;
};

// The chi_s denominator vanishes for this (s, gamma t, nbar).
class SingularWeightError : public NumericalError {
public:
    SingularWeightError(const std::string& what, double s, double gamma_t, double nbar, double denominator)
        : NumericalError(what), s_(s), gamma_t_(gamma_t), nbar_(nbar), denominator_(denominator) {}
    double s() const noexcept { return s_; }
    double gamma_t() const noexcept { return gamma_t_; }
    double nbar() const noexcept { return nbar_; }
    double denominator() const noexcept { return denominator_; }

private:
    double s_, gamma_t_, nbar_, denominator_;
};

// Weighted photon-number series could not be bounded; carries what was summed.
class NonConvergenceError : public NumericalError {
public:
    NonConvergenceError(const std::string& what, double partial_sum, double tail_estimate, double chi_gamma_n)
        : NumericalError(what), partial_sum_(partial_sum), tail_estimate_(tail_estimate), chi_gamma_n_(chi_gamma_n) {}
    double partial_sum() const noexcept { return partial_sum_; }
    double tail_estimate() const noexcept { return tail_estimate_; }
    double chi_gamma_n() const noexcept { return chi_gamma_n_; }

private:
    double partial_sum_, tail_estimate_, chi_gamma_n_;
};

// Probe sampling too coarse for the highest recovered frequency.
class AliasingError : public DomainError {
public:
    using DomainError::DomainError;
};

}  // namespace cavrec
