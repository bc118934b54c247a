#include "cavrec/probe.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "cavrec/errors.hpp"

namespace cavrec {

double ProbeSpec::tau_max() const { return std::numbers::pi / lambda_coupling; }

void ProbeSpec::validate() const {
    if (!(lambda_coupling > 0.0) || !std::isfinite(lambda_coupling))
        throw DomainError("probe coupling lambda must be finite and > 0");
    if (m_max == 0) throw DomainError("probe m_max must be >= 1");
    if (n_samples <= 2 * m_max + 3)
        throw AliasingError("probe needs n_samples > 2 m_max + 3 = " + std::to_string(2 * m_max + 3) + ", got " +
                            std::to_string(n_samples));
}

ProbeSignal inversion_signal(const PhotonDistribution& p, const ProbeSpec& spec, const std::optional<ProbeNoise>& noise) {
    spec.validate();
    ProbeSignal sig;
    sig.taus.resize(spec.n_samples);
    sig.values.assign(spec.n_samples, 0.0);
    const double dt = spec.tau_max() / static_cast<double>(spec.n_samples);
    for (std::size_t j = 0; j < spec.n_samples; ++j) {
        const double tau = (static_cast<double>(j) + 0.5) * dt;
        sig.taus[j] = tau;
        double v = 0.0;
        for (std::size_t m = 0; m < p.trunc(); ++m)
            v += p.probs[m] * std::cos(static_cast<double>(2 * m + 3) * spec.lambda_coupling * tau);
        sig.values[j] = v;
    }
    if (noise && noise->sigma > 0.0) {
        std::mt19937_64 rng(noise->seed);
        std::normal_distribution<double> gauss(0.0, noise->sigma);
        for (double& v : sig.values) v += gauss(rng);
    }
    return sig;
}

PhotonDistribution invert_fourier(const ProbeSignal& sig, const ProbeSpec& spec) {
    spec.validate();
    if (sig.taus.size() != sig.values.size()) throw DomainError("probe signal taus/values length mismatch");
    if (sig.taus.size() != spec.n_samples)
        throw DomainError("probe signal has " + std::to_string(sig.taus.size()) + " samples, spec expects " +
                          std::to_string(spec.n_samples));
    const double weight = spec.tau_max() / static_cast<double>(spec.n_samples);
    const double scale = 2.0 * spec.lambda_coupling / std::numbers::pi;
    std::vector<double> probs(spec.m_max, 0.0);
    for (std::size_t m = 0; m < spec.m_max; ++m) {
        const double freq = static_cast<double>(2 * m + 3) * spec.lambda_coupling;
        double acc = 0.0;
        for (std::size_t j = 0; j < sig.taus.size(); ++j) acc += sig.values[j] * std::cos(freq * sig.taus[j]);
        probs[m] = scale * weight * acc;
    }
    // Estimates, not validated probabilities: noise can push them negative.
    return PhotonDistribution{std::move(probs), 0.0};
}

}  // namespace cavrec
