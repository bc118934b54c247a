#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "cavrec/acceptance.hpp"
#include "cavrec/config.hpp"

namespace cavrec {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

// Each command writes its outputs under out (created if missing) together
// with resolved_config.json and returns the process exit status. Library
// errors propagate to the caller.

// state.json
int cmd_prepare(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);

// evolved_factorized.json and/or evolved_numerical.json, evolve_report.json
int cmd_evolve(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);

// reconstruction.csv, reconstruction.meta.json, oracle.csv. Returns
// kExitNumerical when any row failed or did not converge.
int cmd_reconstruct(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);

// signal.csv, signal.meta.json, distribution.csv, recovered.csv
int cmd_probe(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);

// Prints the acceptance report; also writes verify_report.txt when out is set.
int cmd_verify(const AcceptanceOptions& opt, const std::optional<std::filesystem::path>& out, std::ostream& log);

}  // namespace cavrec
