#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cavrec/commands.hpp"
#include "cavrec/errors.hpp"

namespace {

struct Flags {
    std::string config;
    std::string out = "cavrec_out";
    std::optional<unsigned> threads;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, Flags& f, bool need_config) {
    auto* c = sub->add_option("--config", f.config, "Run configuration (JSON)");
    if (need_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", f.out, "Output directory")->capture_default_str();
    sub->add_option("--threads", f.threads, "Worker threads, 0 = all cores");
    sub->add_option("--seed", f.seed, "Seed for the optional probe noise");
}

}  // namespace

int main(int argc, char** argv) {
    using namespace cavrec;
    CLI::App app{"Thermal-channel cavity field simulation and quasiprobability reconstruction"};
    app.require_subcommand(1);
    app.set_version_flag("--version", CAVREC_VERSION);

    Flags f;
    auto* prepare = app.add_subcommand("prepare", "Build an initial state and write state.json");
    auto* evolve = app.add_subcommand("evolve", "Evolve the state: closed form and/or integrator");
    auto* reconstruct = app.add_subcommand("reconstruct", "Reconstruct W(beta; s) over a grid");
    auto* probe = app.add_subcommand("probe", "Simulate the atomic probe signal and invert it");
    auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
    for (auto* sub : {prepare, evolve, reconstruct, probe}) add_common(sub, f, true);
    bool verify_out = false;
    verify->add_option("--out", f.out, "Directory for verify_report.txt")->each([&](const std::string&) {
        verify_out = true;
    });
    verify->add_option("--threads", f.threads, "Worker threads, 0 = all cores");
    verify->add_option("--seed", f.seed, "Accepted for uniformity; the suite uses fixed seeds");
    std::string fault;
    verify->add_option("--inject-fault", fault)->check(CLI::IsMember({"chi-sign"}))->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (verify->parsed()) {
            AcceptanceOptions opt;
            opt.corrupt_chi_sign = fault == "chi-sign";
            opt.threads = f.threads.value_or(1);
            std::optional<std::filesystem::path> out;
            if (verify_out) out = f.out;
            return cmd_verify(opt, out, std::cout);
        }
        RunConfig cfg = load_config(f.config);
        if (f.threads) cfg.threads = *f.threads;
        if (f.seed) cfg.seed = *f.seed;
        if (prepare->parsed()) return cmd_prepare(cfg, f.out, std::cout);
        if (evolve->parsed()) return cmd_evolve(cfg, f.out, std::cout);
        if (reconstruct->parsed()) return cmd_reconstruct(cfg, f.out, std::cout);
        return cmd_probe(cfg, f.out, std::cout);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.numerical() ? kExitNumerical : kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
}
