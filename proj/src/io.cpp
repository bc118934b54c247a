#include "cavrec/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cavrec/errors.hpp"

namespace cavrec::io {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json state_to_json(const FockDensityMatrix& rho) {
    json entries = json::array();
    const auto n = static_cast<Eigen::Index>(rho.dim());
    for (Eigen::Index m = 0; m < n; ++m)
        for (Eigen::Index k = 0; k < n; ++k) entries.push_back({rho.entries()(m, k).real(), rho.entries()(m, k).imag()});
    return json{{"dim", rho.dim()}, {"entries", std::move(entries)}, {"tail_mass_bound", rho.tail_mass_bound()}};
}

FockDensityMatrix state_from_json(const json& j) {
    if (!j.is_object()) throw DomainError("state file: expected an object");
    for (const char* key : {"dim", "entries", "tail_mass_bound"})
        if (!j.contains(key)) throw DomainError(std::string("state file: missing field '") + key + "'");
    if (!j["dim"].is_number_integer() || j["dim"].get<long long>() <= 0)
        throw DomainError("state file: 'dim' must be a positive integer");
    const auto dim = j["dim"].get<std::size_t>();
    const json& e = j["entries"];
    if (!e.is_array() || e.size() != dim * dim)
        throw DomainError("state file: 'entries' must hold dim*dim = " + std::to_string(dim * dim) + " pairs");
    if (!j["tail_mass_bound"].is_number()) throw DomainError("state file: 'tail_mass_bound' must be a number");
    const double tail = j["tail_mass_bound"].get<double>();

    const auto n = static_cast<Eigen::Index>(dim);
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < e.size(); ++i) {
        const json& pair = e[i];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
            throw DomainError("state file: entry " + std::to_string(i) + " is not a [re, im] pair");
        m(static_cast<Eigen::Index>(i / dim), static_cast<Eigen::Index>(i % dim)) =
            Complex(pair[0].get<double>(), pair[1].get<double>());
    }
    const double trace = m.trace().real();
    if (std::abs(trace - 1.0) > std::max(1e-10, tail + 1e-10))
        throw DomainError("state file: trace " + format_double(trace) + " inconsistent with tail_mass_bound");
    return FockDensityMatrix::unnormalized(std::move(m), tail);
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw DomainError("cannot write " + path.string());
    os << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw DomainError("cannot read " + path.string());
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw DomainError(path.string() + ": " + e.what());
    }
}

void write_state(const std::filesystem::path& path, const FockDensityMatrix& rho) {
    write_json(path, state_to_json(rho));
}

FockDensityMatrix read_state(const std::filesystem::path& path) { return state_from_json(read_json(path)); }

void write_result_table(std::ostream& os, const ReconstructionResult& res) {
    os << kResultHeader << '\n';
    for (const auto& p : res.points) {
        os << format_double(p.beta.real()) << ',' << format_double(p.beta.imag()) << ',' << format_double(res.s)
           << ',' << format_double(p.W) << ',' << format_double(p.F) << ',' << format_double(p.tail_estimate) << ','
           << (p.converged && p.error.empty() ? "true" : "false") << '\n';
    }
}

double write_oracle_table(std::ostream& os, const ReconstructionResult& res, const FockDensityMatrix& rho0,
                          double displacement_tol) {
    os << "beta_re,beta_im,W_direct,W,abs_diff\n";
    double worst = 0.0;
    for (const auto& p : res.points) {
        double direct = std::nan("");
        try {
            direct = quasiprob_direct(rho0, p.beta, res.s, displacement_tol);
        } catch (const Error&) {
        }
        const double diff = std::abs(p.W - direct);
        if (p.error.empty() && std::isfinite(diff)) worst = std::max(worst, diff);
        os << format_double(p.beta.real()) << ',' << format_double(p.beta.imag()) << ',' << format_double(direct)
           << ',' << format_double(p.W) << ',' << format_double(diff) << '\n';
    }
    return worst;
}

void write_signal(std::ostream& os, const ProbeSignal& sig) {
    os << "tau,value\n";
    for (std::size_t j = 0; j < sig.taus.size(); ++j)
        os << format_double(sig.taus[j]) << ',' << format_double(sig.values[j]) << '\n';
}

ProbeSignal read_signal(std::istream& is) {
    ProbeSignal sig;
    std::string line;
    if (!std::getline(is, line) || line != "tau,value") throw DomainError("signal file: expected header 'tau,value'");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw DomainError("signal file: malformed row '" + line + "'");
        try {
            sig.taus.push_back(std::stod(line.substr(0, comma)));
            sig.values.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw DomainError("signal file: malformed row '" + line + "'");
        }
    }
    return sig;
}

void write_distribution(std::ostream& os, const PhotonDistribution& p) {
    os << "m,P\n";
    for (std::size_t m = 0; m < p.trunc(); ++m) os << m << ',' << format_double(p.probs[m]) << '\n';
}

}  // namespace cavrec::io
