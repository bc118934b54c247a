#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cavrec/fock.hpp"
#include "cavrec/lindblad.hpp"
#include "cavrec/probe.hpp"
#include "cavrec/reconstruct.hpp"

namespace cavrec {

struct StateConfig {
    // coherent | fock | cat | thermal | file
    std::string kind = "coherent";
    Complex alpha = 0.0;
    std::size_t n = 0;
    int sign = 1;
    double nbar = 0.0;
    std::size_t dim = 32;
    // For kind = file; relative paths resolve against the config directory.
    std::string path;
};

struct GridConfig {
    double re_min = -3.0;
    double re_max = 3.0;
    double im_min = -3.0;
    double im_max = 3.0;
    double step = 0.3;
};

struct QuasiprobConfig {
    double s = 0.0;
    // Explicit points take precedence over the grid when present.
    std::optional<std::vector<Complex>> points;
    GridConfig grid;
    std::optional<std::size_t> m_max;
};

struct ProbeConfig {
    double lambda_coupling = 1.0;
    std::size_t n_samples = 256;
    std::size_t m_max = 20;
    double noise_sigma = 0.0;
    // state: diagonal of the evolved state; distribution: the list below.
    std::string source = "state";
    std::vector<double> distribution;
};

struct ToleranceConfig {
    double tail_tol = 1e-10;
    double adaptive_tail = 1e-12;
    double displacement_tol = 1e-4;
    double evolve_tail_tol = 1e-9;
    double trace_drift_tol = 1e-7;
};

struct RunConfig {
    StateConfig state;
    ChannelParams channel{1.0, 0.0, 0.0};
    Complex drive_alpha = 0.0;
    // both | factorized | numerical
    std::string evolve_method = "both";
    std::size_t evolve_steps = 0;
    QuasiprobConfig quasiprob;
    ProbeConfig probe;
    ToleranceConfig tolerances;
    std::uint64_t seed = 0;
    unsigned threads = 0;

    std::filesystem::path base_dir;
};

// Throws DomainError naming the offending field.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

// Every field with its effective value.
nlohmann::json resolved_config(const RunConfig& cfg);

FockDensityMatrix build_state(const RunConfig& cfg);
QuasiprobSpec build_quasiprob(const RunConfig& cfg);
ProbeSpec build_probe(const RunConfig& cfg);
ReconstructOptions build_reconstruct_options(const RunConfig& cfg);

}  // namespace cavrec
