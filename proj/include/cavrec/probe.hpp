#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "cavrec/reconstruct.hpp"

namespace cavrec {

struct ProbeSpec {
    double lambda_coupling = 1.0;
    std::size_t n_samples = 256;
    std::size_t m_max = 20;

    double tau_max() const;
    // Throws DomainError for lambda <= 0, AliasingError unless n_samples > 2 m_max + 3.
    void validate() const;
};

struct ProbeSignal {
    std::vector<double> taus;
    std::vector<double> values;
};

// Additive Gaussian noise on the inversion samples; off unless sigma > 0.
struct ProbeNoise {
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

// Atomic inversion sum_m P_m cos((2m+3) lambda tau) at the midpoints
// tau_j = (j + 1/2) tau_max / n_samples.
ProbeSignal inversion_signal(const PhotonDistribution& p, const ProbeSpec& spec,
                             const std::optional<ProbeNoise>& noise = std::nullopt);

// Midpoint-rule Fourier inversion over [0, pi/lambda]:
//   P_m = (2 lambda / pi) sum_j (tau_max / n) value_j cos((2m+3) lambda tau_j).
PhotonDistribution invert_fourier(const ProbeSignal& sig, const ProbeSpec& spec);

}  // namespace cavrec
