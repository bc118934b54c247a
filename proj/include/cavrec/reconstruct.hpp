#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cavrec/fock.hpp"
#include "cavrec/lindblad.hpp"

namespace cavrec {

// Photon-number probabilities P_m, m < trunc(), plus the mass known to sit
// beyond the cutoff.
struct PhotonDistribution {
    std::vector<double> probs;
    double tail_bound = 0.0;

    std::size_t trunc() const { return probs.size(); }
    double total() const;

    // Clamps round-off negatives above -1e-12 to zero; rejects anything worse
    // or a sum above 1 + 1e-9.
    static PhotonDistribution from_probs(std::vector<double> probs, double tail_bound = 0.0);
    static PhotonDistribution diagonal_of(const FockDensityMatrix& rho);
};

// Largest photon index the binomial sums support.
inline constexpr std::size_t kMaxPhotonIndex = 512;

// Diagonal of the thermal channel output computed from the diagonal alone:
//   P_m(t) = 1/(1+N_t) sum_k sum_n C(k,n) C(m,n) Gn^{m-n} Gn1^{k-n}
//            e^{-n g t} (1+N_t)^{-2n} P_k(0)
PhotonDistribution evolved_diagonal(const PhotonDistribution& p0, const ChannelCoefficients& c,
                                    std::size_t m_out);

struct QuasiprobSpec {
    double s = 0.0;
    std::vector<Complex> grid;
    // Terms of the weighted sum; nullopt chooses adaptively.
    std::optional<std::size_t> m_max;

    double u() const { return (s + 1.0) / (s - 1.0); }
    // s must lie in [-1, 1).
    void validate() const;
};

// Square grid re, im in {lo, lo + step, ..., hi} (row-major, imaginary part
// varying fastest).
std::vector<Complex> square_grid(double lo, double hi, double step);
std::vector<Complex> rect_grid(double re_lo, double re_hi, double im_lo, double im_hi, double step);

struct WeightValue {
    double chi = 0.0;
    double chi_gamma_n = 0.0;
    double norm_factor = 0.0;
    bool converged = false;
};

// Weight chi_s that maps the damped photon statistics back onto the initial
// state, and the factor turning the weighted sum into W(beta; s).
// Throws DomainError for s >= 1 and SingularWeightError when the chi_s
// denominator is below 1e-12 in magnitude.
WeightValue weight_chi(double s, const ChannelCoefficients& c);

struct WeightedSum {
    double F = 0.0;
    double tail_estimate = 0.0;
};

// F = sum_{m < m_max} chi^m P_m with an estimate of the neglected terms:
// |chi|^m_max times the leftover mass when |chi| <= 1, otherwise a geometric
// majorant drawn from the last computed terms. Unbounded (inf) when the
// weight has left its convergence disk. Throws NonConvergenceError when the
// estimate exceeds tail_tol.
WeightedSum weighted_sum(const PhotonDistribution& p_t, const WeightValue& w, std::size_t m_max,
                         double tail_tol = 1e-10);

struct ReconstructOptions {
    double tail_tol = 1e-10;
    // Target for the adaptive choice of m_max.
    double adaptive_tail = 1e-12;
    // Trace allowed to leak when displacing onto the grid point.
    double displacement_tol = 1e-4;
    // Applied to the weight before summing. Used for fault injection in the
    // verification suite; leave empty otherwise.
    std::function<void(WeightValue&)> weight_hook;
};

struct ReconstructionPoint {
    Complex beta;
    double F = 0.0;
    double W = 0.0;
    double tail_estimate = 0.0;
    bool converged = false;
    WeightValue weight;
    std::size_t m_max = 0;
    double truncation_loss = 0.0;
    // Empty on success; otherwise the message of the error that stopped this point.
    std::string error;
    bool numerical_failure = false;
};

// Displace, damp the diagonal, weight and normalize. Throws on failure.
ReconstructionPoint reconstruct_point(const FockDensityMatrix& rho0, Complex beta, const QuasiprobSpec& spec,
                                      const ChannelParams& p, const ReconstructOptions& opt = {});

// -2/(pi (s-1)) sum_k u^k <k|D^dag rho0 D|k>, straight from the initial state.
double quasiprob_direct(const FockDensityMatrix& rho0, Complex beta, double s, double displacement_tol = 1e-4);

struct ReconstructionResult {
    std::vector<ReconstructionPoint> points;
    double s = 0.0;
    ChannelParams channel;
    std::size_t dim = 0;
};

// reconstruct_point over spec.grid in order; a failing point is recorded
// with its error instead of aborting the scan. threads = 0 uses all cores.
ReconstructionResult scan_grid(const FockDensityMatrix& rho0, const QuasiprobSpec& spec, const ChannelParams& p,
                               const ReconstructOptions& opt = {}, unsigned threads = 1);

// |sum_m C(m,n) x^m - x^n / (1-x)^{n+1}| with the series summed until its
// tail is below 1e-15. Needs |x| < 1.
double binomial_series_identity_check(unsigned n, double x);

}  // namespace cavrec
