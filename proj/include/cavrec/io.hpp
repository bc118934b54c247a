#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "cavrec/fock.hpp"
#include "cavrec/probe.hpp"
#include "cavrec/reconstruct.hpp"

namespace cavrec::io {

using nlohmann::json;

// 17 significant digits; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double v);

// {"dim": N, "entries": [[re, im], ...] row-major, "tail_mass_bound": x}
json state_to_json(const FockDensityMatrix& rho);
FockDensityMatrix state_from_json(const json& j);
void write_state(const std::filesystem::path& path, const FockDensityMatrix& rho);
FockDensityMatrix read_state(const std::filesystem::path& path);

inline constexpr const char* kResultHeader = "beta_re,beta_im,s,W,F,tail_estimate,converged";

void write_result_table(std::ostream& os, const ReconstructionResult& res);
// beta_re,beta_im,W_direct,W,abs_diff; returns the largest abs_diff over
// points that converged.
double write_oracle_table(std::ostream& os, const ReconstructionResult& res, const FockDensityMatrix& rho0,
                          double displacement_tol);

void write_signal(std::ostream& os, const ProbeSignal& sig);
ProbeSignal read_signal(std::istream& is);
void write_distribution(std::ostream& os, const PhotonDistribution& p);

void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

}  // namespace cavrec::io
