#include "cavrec/reconstruct.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include "cavrec/errors.hpp"

namespace cavrec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// The weighted sum alternates with terms up to |chi|^m P_m, which for
// |chi| ~ 2 and m ~ 60 exceed the result by many orders of magnitude; the
// propagation and the sum run in extended precision to keep that
// cancellation below 1e-9.
using Wide = long double;

// P_m(t) for m < m_out; binomial-power weights by running products.
template <class Real>
std::vector<Real> propagate_diagonal(const std::vector<double>& p0, const ChannelCoefficients& c, std::size_t m_out) {
    const std::size_t k_in = p0.size();
    const Real gn = c.Gamma_n;
    const Real gn1 = c.Gamma_n1;
    const Real one_n = Real(1) + Real(c.N_t);
    const Real y = Real(c.exp_gt) / (one_n * one_n);

    // S_n = y^n sum_{k >= n} C(k,n) Gn1^{k-n} P_k
    std::vector<Real> inner(k_in, Real(0));
    Real y_pow = 1;
    for (std::size_t n = 0; n < k_in; ++n) {
        Real acc = p0[n];
        Real w = 1;
        for (std::size_t k = n + 1; k < k_in && gn1 != Real(0); ++k) {
            w *= gn1 * Real(k) / Real(k - n);
            acc += w * Real(p0[k]);
        }
        inner[n] = acc * y_pow;
        y_pow *= y;
    }

    // P_m = 1/(1+N_t) sum_{n <= m} C(m,n) Gn^{m-n} S_n
    std::vector<Real> out(m_out, Real(0));
    for (std::size_t m = 0; m < m_out; ++m) {
        Real acc = 0;
        const std::size_t n_hi = std::min(m + 1, k_in);
        if (gn == Real(0)) {
            if (m < k_in) acc = inner[m];
        } else {
            // w = C(m,n) Gn^{m-n}, starting from Gn^m at n = 0.
            Real w = std::pow(gn, static_cast<Real>(m));
            for (std::size_t n = 0; n < n_hi; ++n) {
                acc += w * inner[n];
                w *= Real(m - n) / (Real(n + 1) * gn);
            }
        }
        out[m] = acc / one_n;
    }
    return out;
}

template <class Real>
WeightedSum weighted_sum_impl(const std::vector<Real>& probs, double tail_bound, const WeightValue& w,
                              std::size_t m_max, double tail_tol) {
    const std::size_t trunc = probs.size();
    if (m_max > trunc) throw DomainError("weighted_sum: m_max exceeds distribution truncation");

    const Real a = std::abs(Real(w.chi));
    std::vector<Real> terms(trunc);
    Real power = 1;
    for (std::size_t m = 0; m < trunc; ++m) {
        terms[m] = power * probs[m];
        power *= a;
    }
    Real sum = 0;
    power = 1;
    for (std::size_t m = 0; m < m_max; ++m) {
        sum += power * probs[m];
        power *= Real(w.chi);
    }
    WeightedSum out;
    out.F = static_cast<double>(sum);

    if (!w.converged) {
        out.tail_estimate = kInf;
    } else if (a <= Real(1)) {
        Real rest = tail_bound;
        for (std::size_t m = m_max; m < trunc; ++m) rest += probs[m];
        out.tail_estimate = rest == Real(0) ? 0.0 : static_cast<double>(std::pow(a, Real(m_max)) * rest);
    } else {
        Real explicit_part = 0;
        for (std::size_t m = m_max; m < trunc; ++m) explicit_part += terms[m];
        // Past the bulk of the distribution the term ratio decreases toward
        // |chi Gamma_n|, so the largest of the trailing ratios bounds the rest.
        const std::size_t window = std::min<std::size_t>(4, trunc);
        Real ratio = 0;
        bool all_zero = true;
        bool unbounded = false;
        for (std::size_t m = trunc - window; m < trunc; ++m) {
            if (terms[m] != Real(0)) all_zero = false;
            if (m + 1 < trunc) {
                if (terms[m] == Real(0)) {
                    if (terms[m + 1] != Real(0)) unbounded = true;
                } else {
                    ratio = std::max(ratio, terms[m + 1] / terms[m]);
                }
            }
        }
        double beyond = 0.0;
        if (!all_zero)
            beyond = (!unbounded && ratio < Real(1)) ? static_cast<double>(terms[trunc - 1] * ratio / (Real(1) - ratio))
                                                     : kInf;
        out.tail_estimate = static_cast<double>(explicit_part) + beyond;
    }
    if (!(out.tail_estimate <= tail_tol))
        throw NonConvergenceError("weighted photon sum not converged (|chi Gamma_n| = " +
                                      std::to_string(std::abs(w.chi_gamma_n)) +
                                      ", tail estimate = " + std::to_string(out.tail_estimate) + ")",
                                  out.F, out.tail_estimate, w.chi_gamma_n);
    return out;
}

void check_propagation_range(std::size_t k_in, std::size_t m_out) {
    if (m_out < k_in) throw DomainError("evolved_diagonal: m_out below input truncation");
    if (m_out > kMaxPhotonIndex + 1 || k_in > kMaxPhotonIndex + 1)
        throw DomainError("evolved_diagonal: photon index above " + std::to_string(kMaxPhotonIndex));
}

double wide_total(const std::vector<Wide>& p) {
    Wide s = 0;
    for (Wide x : p) s += x;
    return static_cast<double>(s);
}

ReconstructionPoint reconstruct_impl(const FockDensityMatrix& rho0, Complex beta, const QuasiprobSpec& spec,
                                     const ChannelCoefficients& c, const ReconstructOptions& opt,
                                     ReconstructionPoint& pt) {
    pt.beta = beta;
    pt.weight = weight_chi(spec.s, c);
    if (opt.weight_hook) opt.weight_hook(pt.weight);

    const FockDensityMatrix displaced = displace_state(rho0, beta, opt.displacement_tol);
    pt.truncation_loss = displaced.tail_mass_bound() - rho0.tail_mass_bound();
    const PhotonDistribution p0 = PhotonDistribution::diagonal_of(displaced);
    const std::size_t k = p0.trunc();
    const double total_in = p0.total();
    const auto weighted = [&](std::size_t m_out, std::size_t terms, double tol) {
        check_propagation_range(k, m_out);
        const std::vector<Wide> probs = propagate_diagonal<Wide>(p0.probs, c, m_out);
        const double tail = p0.tail_bound + std::max(0.0, total_in - wide_total(probs));
        return weighted_sum_impl(probs, tail, pt.weight, terms, tol);
    };

    if (spec.m_max) {
        const std::size_t m = std::max(k, *spec.m_max);
        const auto s = weighted(m, *spec.m_max, opt.tail_tol);
        pt.m_max = *spec.m_max;
        pt.F = s.F;
        pt.tail_estimate = s.tail_estimate;
    } else {
        // With Gamma_n = 0 the output support never exceeds the input's.
        std::size_t m = (c.Gamma_n == 0.0 || !pt.weight.converged) ? k : std::min(k + 8, kMaxPhotonIndex + 1);
        for (;;) {
            const bool last = m > kMaxPhotonIndex || c.Gamma_n == 0.0 || !pt.weight.converged;
            const auto s = weighted(m, m, last ? opt.tail_tol : kInf);
            if (last || s.tail_estimate < opt.adaptive_tail) {
                if (s.tail_estimate > opt.tail_tol)
                    throw NonConvergenceError("weighted photon sum tail " + std::to_string(s.tail_estimate) +
                                                  " above tolerance at the index cap",
                                              s.F, s.tail_estimate, pt.weight.chi_gamma_n);
                pt.m_max = m;
                pt.F = s.F;
                pt.tail_estimate = s.tail_estimate;
                break;
            }
            m = std::min(2 * m, kMaxPhotonIndex + 1);
        }
    }
    pt.W = pt.weight.norm_factor * pt.F;
    pt.converged = pt.weight.converged;
    return pt;
}

}  // namespace

double PhotonDistribution::total() const {
    double s = 0.0;
    for (double p : probs) s += p;
    return s;
}

PhotonDistribution PhotonDistribution::from_probs(std::vector<double> probs, double tail_bound) {
    for (std::size_t m = 0; m < probs.size(); ++m) {
        if (!std::isfinite(probs[m]) || probs[m] < -1e-12)
            throw DomainError("photon probability P_" + std::to_string(m) + " = " + std::to_string(probs[m]) +
                              " is not a valid probability");
        if (probs[m] < 0.0) probs[m] = 0.0;
    }
    PhotonDistribution d{std::move(probs), std::max(0.0, tail_bound)};
    if (d.total() > 1.0 + 1e-9) throw DomainError("photon probabilities sum to " + std::to_string(d.total()));
    return d;
}

PhotonDistribution PhotonDistribution::diagonal_of(const FockDensityMatrix& rho) {
    const Eigen::VectorXd diag = rho.diagonal();
    return from_probs(std::vector<double>(diag.data(), diag.data() + diag.size()), rho.tail_mass_bound());
}

PhotonDistribution evolved_diagonal(const PhotonDistribution& p0, const ChannelCoefficients& c, std::size_t m_out) {
    check_propagation_range(p0.trunc(), m_out);
    const std::vector<Wide> wide = propagate_diagonal<Wide>(p0.probs, c, m_out);
    PhotonDistribution res{std::vector<double>(wide.begin(), wide.end()), 0.0};
    res.tail_bound = p0.tail_bound + std::max(0.0, p0.total() - wide_total(wide));
    return res;
}

void QuasiprobSpec::validate() const {
    if (!(s >= -1.0 && s < 1.0)) throw DomainError("order parameter s must lie in [-1, 1), got " + std::to_string(s));
}

std::vector<Complex> rect_grid(double re_lo, double re_hi, double im_lo, double im_hi, double step) {
    if (!(step > 0.0)) throw DomainError("grid step must be > 0");
    if (re_hi < re_lo || im_hi < im_lo) throw DomainError("grid bounds reversed");
    const auto count = [step](double lo, double hi) {
        return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    };
    const std::size_t nr = count(re_lo, re_hi);
    const std::size_t ni = count(im_lo, im_hi);
    std::vector<Complex> g;
    g.reserve(nr * ni);
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < ni; ++j)
            g.emplace_back(re_lo + static_cast<double>(i) * step, im_lo + static_cast<double>(j) * step);
    return g;
}

std::vector<Complex> square_grid(double lo, double hi, double step) {
    return rect_grid(lo, hi, lo, hi, step);
}

WeightValue weight_chi(double s, const ChannelCoefficients& c) {
    if (!(s < 1.0)) throw DomainError("weight_chi needs s < 1, got " + std::to_string(s));
    const double u = (s + 1.0) / (s - 1.0);
    const double y = c.exp_gt / ((1.0 + c.N_t) * (1.0 + c.N_t));
    const double num = u - c.Gamma_n1;
    const double den = y + c.Gamma_n * num;
    if (std::abs(den) < 1e-12) {
        const double nbar = c.exp_gt < 1.0 ? c.N_t / (1.0 - c.exp_gt) : 0.0;
        throw SingularWeightError("chi_s denominator vanishes (s = " + std::to_string(s) +
                                      ", gamma t = " + std::to_string(c.gamma_t) + ", nbar = " + std::to_string(nbar) +
                                      ")",
                                  s, c.gamma_t, nbar, den);
    }
    WeightValue w;
    w.chi = num / den;
    w.chi_gamma_n = w.chi * c.Gamma_n;
    w.norm_factor = -2.0 * (1.0 + c.N_t) * (1.0 - w.chi_gamma_n) / (std::numbers::pi * (s - 1.0));
    w.converged = std::abs(w.chi_gamma_n) < 1.0;
    return w;
}

WeightedSum weighted_sum(const PhotonDistribution& p_t, const WeightValue& w, std::size_t m_max, double tail_tol) {
    return weighted_sum_impl(std::vector<Wide>(p_t.probs.begin(), p_t.probs.end()), p_t.tail_bound, w, m_max,
                             tail_tol);
}

ReconstructionPoint reconstruct_point(const FockDensityMatrix& rho0, Complex beta, const QuasiprobSpec& spec,
                                      const ChannelParams& p, const ReconstructOptions& opt) {
    spec.validate();
    ReconstructionPoint pt;
    return reconstruct_impl(rho0, beta, spec, channel_coefficients(p), opt, pt);
}

double quasiprob_direct(const FockDensityMatrix& rho0, Complex beta, double s, double displacement_tol) {
    if (!(s < 1.0)) throw DomainError("quasiprob_direct needs s < 1, got " + std::to_string(s));
    const double u = (s + 1.0) / (s - 1.0);
    const Eigen::VectorXd p = displace_state(rho0, beta, displacement_tol).diagonal();
    double sum = 0.0;
    double power = 1.0;
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        sum += power * p(k);
        power *= u;
    }
    return -2.0 / (std::numbers::pi * (s - 1.0)) * sum;
}

ReconstructionResult scan_grid(const FockDensityMatrix& rho0, const QuasiprobSpec& spec, const ChannelParams& p,
                               const ReconstructOptions& opt, unsigned threads) {
    spec.validate();
    const ChannelCoefficients c = channel_coefficients(p);
    ReconstructionResult res;
    res.s = spec.s;
    res.channel = p;
    res.dim = rho0.dim();
    res.points.resize(spec.grid.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < spec.grid.size(); i = next++) {
            ReconstructionPoint& pt = res.points[i];
            try {
                reconstruct_impl(rho0, spec.grid[i], spec, c, opt, pt);
            } catch (const NonConvergenceError& e) {
                pt.F = e.partial_sum();
                pt.W = pt.weight.norm_factor * pt.F;
                pt.tail_estimate = e.tail_estimate();
                pt.converged = false;
                pt.error = e.what();
                pt.numerical_failure = true;
            } catch (const Error& e) {
                pt.F = pt.W = std::numeric_limits<double>::quiet_NaN();
                pt.tail_estimate = kInf;
                pt.converged = false;
                pt.error = e.what();
                pt.numerical_failure = e.numerical();
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, spec.grid.size())));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return res;
}

double binomial_series_identity_check(unsigned n, double x) {
    if (!(std::abs(x) < 1.0)) throw DomainError("binomial series identity needs |x| < 1");
    if (n > 20) throw DomainError("binomial series identity check supports n <= 20");
    using Real = long double;
    const Real xl = x;
    Real sum = 0.0L;
    Real comp = 0.0L;
    for (std::size_t m = n;; ++m) {
        Real binom = 1.0L;
        for (unsigned i = 1; i <= n; ++i) binom = binom * static_cast<Real>(m - n + i) / static_cast<Real>(i);
        const Real term = binom * std::pow(xl, static_cast<Real>(m));
        // Neumaier summation.
        const Real t = sum + term;
        comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
        const Real ratio = std::abs(xl) * static_cast<Real>(m + 1) / static_cast<Real>(m + 1 - n);
        if (ratio < 1.0L && std::abs(term) * ratio / (1.0L - ratio) < 1e-15L) break;
        if (term == 0.0L && m > n) break;
    }
    sum += comp;
    const Real closed = std::pow(xl, static_cast<Real>(n)) / std::pow(1.0L - xl, static_cast<Real>(n + 1));
    return static_cast<double>(std::abs(sum - closed));
}

}  // namespace cavrec
