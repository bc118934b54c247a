#include "cavrec/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "cavrec/errors.hpp"
#include "cavrec/io.hpp"

namespace cavrec {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Below this lambda / gamma the probe signal model is outside its regime.
constexpr double kStrongCoupling = 10.0;

void prepare_out(const fs::path& out, const RunConfig& cfg) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw DomainError("cannot create output directory " + out.string() + ": " + ec.message());
    io::write_json(out / "resolved_config.json", resolved_config(cfg));
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DomainError("cannot write " + path.string());
    os << text;
}

template <class F>
void write_stream(const fs::path& path, F&& f) {
    std::ostringstream os;
    f(os);
    write_text(path, os.str());
}

json state_summary(const FockDensityMatrix& rho) {
    return {{"dim", rho.dim()},
            {"trace", rho.trace()},
            {"mean_photon", mean_photon(rho)},
            {"purity", purity(rho)},
            {"tail_mass_bound", rho.tail_mass_bound()}};
}

json coefficients_json(const ChannelCoefficients& c) {
    return {{"N_t", c.N_t},     {"Gamma_n", c.Gamma_n}, {"Gamma_n1", c.Gamma_n1},
            {"x3", c.x3},       {"exp_gt", c.exp_gt},   {"gamma_t", c.gamma_t}};
}

}  // namespace

int cmd_prepare(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const auto rho = build_state(cfg);
    prepare_out(out, cfg);
    io::write_state(out / "state.json", rho);
    log << "prepared " << cfg.state.kind << " state, dim " << rho.dim() << " -> " << (out / "state.json").string()
        << '\n';
    return kExitOk;
}

int cmd_evolve(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    cfg.channel.validate();
    const auto rho0 = build_state(cfg);
    prepare_out(out, cfg);
    const bool closed = cfg.evolve_method != "numerical";
    const bool numeric = cfg.evolve_method != "factorized";

    const Complex beta = effective_displacement(cfg.drive_alpha, cfg.channel.gamma, cfg.channel.t);
    json report{{"config", resolved_config(cfg)},
                {"beta", {beta.real(), beta.imag()}},
                {"coefficients", coefficients_json(channel_coefficients(cfg.channel))},
                {"input", state_summary(rho0)}};

    std::optional<FockDensityMatrix> fact;
    std::optional<IntegrationResult> num;
    if (closed) {
        EvolveOptions opt;
        opt.tail_tol = cfg.tolerances.evolve_tail_tol;
        fact = factorized_evolution(rho0, cfg.drive_alpha, cfg.channel, opt, cfg.tolerances.evolve_tail_tol);
        io::write_state(out / "evolved_factorized.json", *fact);
        report["factorized"] = state_summary(*fact);
    }
    if (numeric) {
        IntegratorOptions opt;
        opt.steps = cfg.evolve_steps;
        opt.trace_drift_tol = cfg.tolerances.trace_drift_tol;
        num = evolve_numerical(rho0, cfg.channel, cfg.drive_alpha, opt);
        io::write_state(out / "evolved_numerical.json", num->rho);
        json s = state_summary(num->rho);
        s["steps"] = num->steps;
        s["trace_drift"] = num->trace_drift;
        report["numerical"] = s;
    }
    if (fact && num) {
        const double td = trace_distance(*fact, num->rho);
        report["trace_distance"] = td;
        log << "trace distance factorized vs numerical: " << io::format_double(td) << '\n';
    }
    io::write_json(out / "evolve_report.json", report);
    log << "evolved " << cfg.state.kind << " state (method " << cfg.evolve_method << ") -> " << out.string() << '\n';
    return kExitOk;
}

int cmd_reconstruct(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    cfg.channel.validate();
    const auto rho0 = build_state(cfg);
    const auto spec = build_quasiprob(cfg);
    spec.validate();
    const auto opt = build_reconstruct_options(cfg);
    prepare_out(out, cfg);

    const auto res = scan_grid(rho0, spec, cfg.channel, opt, cfg.threads);

    write_stream(out / "reconstruction.csv", [&](std::ostream& os) { io::write_result_table(os, res); });
    double max_dev = 0.0;
    write_stream(out / "oracle.csv", [&](std::ostream& os) {
        max_dev = io::write_oracle_table(os, res, rho0, opt.displacement_tol);
    });

    const auto coeff = channel_coefficients(cfg.channel);
    json weight = nullptr;
    try {
        const auto w = weight_chi(spec.s, coeff);
        weight = {{"chi", w.chi},
                  {"chi_gamma_n", w.chi_gamma_n},
                  {"norm_factor", w.norm_factor},
                  {"converged", w.converged}};
    } catch (const SingularWeightError& e) {
        weight = {{"error", e.what()}};
    }

    std::size_t failed = 0;
    std::size_t diverged = 0;
    json failures = json::array();
    for (std::size_t i = 0; i < res.points.size(); ++i) {
        const auto& p = res.points[i];
        if (p.converged && p.error.empty()) continue;
        // A non-converged sum keeps its partial value; other failures leave NaN.
        const bool partial = !std::isnan(p.W);
        ++(partial ? diverged : failed);
        failures.push_back({{"index", i},
                            {"beta", {p.beta.real(), p.beta.imag()}},
                            {"kind", partial ? "not_converged" : "failed"},
                            {"error", p.error}});
    }
    const json meta{{"config", resolved_config(cfg)},
                    {"table", "reconstruction.csv"},
                    {"columns", io::kResultHeader},
                    {"oracle_table", "oracle.csv"},
                    {"dim", rho0.dim()},
                    {"points", res.points.size()},
                    {"failed_points", failed},
                    {"unconverged_points", diverged},
                    {"max_oracle_deviation", max_dev},
                    {"coefficients", coefficients_json(coeff)},
                    {"weight", weight},
                    {"failures", failures}};
    io::write_json(out / "reconstruction.meta.json", meta);

    log << "reconstructed " << res.points.size() << " points (s = " << io::format_double(spec.s)
        << "), max deviation from direct evaluation " << io::format_double(max_dev) << '\n';
    if (failed + diverged > 0) {
        log << failed << " points failed, " << diverged << " did not converge\n";
        return kExitNumerical;
    }
    return kExitOk;
}

int cmd_probe(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const auto spec = build_probe(cfg);
    spec.validate();
    PhotonDistribution truth;
    if (cfg.probe.source == "distribution") {
        truth = PhotonDistribution::from_probs(cfg.probe.distribution);
    } else {
        const auto rho0 = build_state(cfg);
        EvolveOptions opt;
        opt.tail_tol = cfg.tolerances.evolve_tail_tol;
        truth = PhotonDistribution::diagonal_of(
            factorized_evolution(rho0, cfg.drive_alpha, cfg.channel, opt, cfg.tolerances.evolve_tail_tol));
    }
    prepare_out(out, cfg);

    std::optional<ProbeNoise> noise;
    if (cfg.probe.noise_sigma > 0.0) noise = ProbeNoise{cfg.probe.noise_sigma, cfg.seed};
    const auto sig = inversion_signal(truth, spec, noise);
    const auto rec = invert_fourier(sig, spec);

    double max_err = 0.0;
    for (std::size_t m = 0; m < rec.trunc(); ++m) {
        const double t = m < truth.trunc() ? truth.probs[m] : 0.0;
        max_err = std::max(max_err, std::abs(rec.probs[m] - t));
    }
    double beyond = truth.tail_bound;
    for (std::size_t m = spec.m_max; m < truth.trunc(); ++m) beyond += truth.probs[m];

    const double ratio = cfg.channel.gamma > 0.0 ? spec.lambda_coupling / cfg.channel.gamma
                                                 : std::numeric_limits<double>::infinity();
    write_stream(out / "signal.csv", [&](std::ostream& os) { io::write_signal(os, sig); });
    write_stream(out / "distribution.csv", [&](std::ostream& os) { io::write_distribution(os, truth); });
    write_stream(out / "recovered.csv", [&](std::ostream& os) { io::write_distribution(os, rec); });
    const json meta{
        {"config", resolved_config(cfg)},
        {"table", "signal.csv"},
        {"lambda", spec.lambda_coupling},
        {"n_samples", spec.n_samples},
        {"m_max", spec.m_max},
        {"tau_max", spec.tau_max()},
        {"noise", {{"sigma", cfg.probe.noise_sigma}, {"seed", cfg.seed}}},
        {"source", cfg.probe.source},
        {"strong_coupling",
         {{"lambda_over_gamma", std::isfinite(ratio) ? json(ratio) : json("inf")},
          {"threshold", kStrongCoupling},
          {"satisfied", ratio >= kStrongCoupling}}},
        {"mass_beyond_m_max", beyond},
        {"max_recovery_error", max_err},
    };
    io::write_json(out / "signal.meta.json", meta);

    log << "probe signal: " << sig.taus.size() << " samples, max recovery error " << io::format_double(max_err)
        << '\n';
    if (ratio < kStrongCoupling)
        log << "warning: lambda / gamma = " << io::format_double(ratio) << " is below " << kStrongCoupling << '\n';
    return kExitOk;
}

int cmd_verify(const AcceptanceOptions& opt, const std::optional<fs::path>& out, std::ostream& log) {
    const auto results = run_acceptance(opt);
    const std::string report = format_report(results);
    log << report;
    if (out) {
        std::error_code ec;
        fs::create_directories(*out, ec);
        if (ec) throw DomainError("cannot create output directory " + out->string() + ": " + ec.message());
        write_text(*out / "verify_report.txt", report);
    }
    return all_passed(results) ? kExitOk : kExitNumerical;
}

}  // namespace cavrec
