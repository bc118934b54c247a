#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "cavrec/config.hpp"
#include "cavrec/errors.hpp"
#include "cavrec/io.hpp"
#include "oracles.hpp"

using namespace cavrec;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {
fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("cavrec_io_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

json minimal_state() {
    return {{"dim", 2}, {"entries", {{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}}}, {"tail_mass_bound", 0.0}};
}
}  // namespace

TEST_SUITE("io") {
TEST_CASE("format_double keeps 17 digits") {
    const double x = 0.1 + 0.2;
    CHECK(io::format_double(x) == "0.30000000000000004");
    CHECK(std::stod(io::format_double(std::numbers::pi)) == std::numbers::pi);
    CHECK(io::format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(io::format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(io::format_double(std::nan("")) == "nan");
}

TEST_CASE("state file round trip is bit exact") {
    const fs::path dir = scratch_dir("roundtrip");
    std::mt19937_64 rng(31);
    const auto rho = FockDensityMatrix(oracle::random_density(9, 6, rng));
    io::write_state(dir / "s.json", rho);
    const auto back = io::read_state(dir / "s.json");
    REQUIRE(back.dim() == rho.dim());
    for (std::size_t m = 0; m < rho.dim(); ++m)
        for (std::size_t k = 0; k < rho.dim(); ++k) CHECK(back(m, k) == rho(m, k));

    const auto cat = cat_state(1.5, 1, 30);
    io::write_state(dir / "cat.json", cat);
    const auto cat_back = io::read_state(dir / "cat.json");
    CHECK(cat_back.tail_mass_bound() == cat.tail_mass_bound());
    CHECK((cat_back.entries() - cat.entries()).cwiseAbs().maxCoeff() == 0.0);
    fs::remove_all(dir);
}

TEST_CASE("state file layout") {
    const json j = io::state_to_json(fock_state(1, 2));
    CHECK(j["dim"] == 2);
    REQUIRE(j["entries"].size() == 4);
    CHECK(j["entries"][3][0] == 1.0);
    CHECK(j["entries"][0][0] == 0.0);
    CHECK(j["tail_mass_bound"] == 0.0);
}

TEST_CASE("malformed state files are rejected") {
    CHECK_NOTHROW(io::state_from_json(minimal_state()));
    CHECK_THROWS_AS(io::state_from_json(json::array()), DomainError);
    for (const char* key : {"dim", "entries", "tail_mass_bound"}) {
        json j = minimal_state();
        j.erase(key);
        CHECK_THROWS_AS(io::state_from_json(j), DomainError);
    }
    json j = minimal_state();
    j["dim"] = 3;
    CHECK_THROWS_AS(io::state_from_json(j), DomainError);
    j = minimal_state();
    j["entries"][1] = {0.0};
    CHECK_THROWS_AS(io::state_from_json(j), DomainError);
    j = minimal_state();
    j["entries"][0] = {0.5, 0.0};
    CHECK_THROWS_AS(io::state_from_json(j), DomainError);
    // Missing trace is acceptable when the tail bound accounts for it.
    j["tail_mass_bound"] = 0.5;
    CHECK_NOTHROW(io::state_from_json(j));
    j = minimal_state();
    j["entries"][1] = {0.3, 0.1};
    CHECK_THROWS_AS(io::state_from_json(j), DomainError);

    const fs::path dir = scratch_dir("malformed");
    std::ofstream(dir / "bad.json") << "{ not json";
    CHECK_THROWS_AS(io::read_state(dir / "bad.json"), DomainError);
    CHECK_THROWS_AS(io::read_state(dir / "missing.json"), DomainError);
    fs::remove_all(dir);
}

TEST_CASE("signal write and read") {
    ProbeSignal sig{{0.1, 0.2, 1.0 / 3.0}, {0.5, -0.25, std::exp(-1.0)}};
    std::stringstream ss;
    io::write_signal(ss, sig);
    CHECK(ss.str().rfind("tau,value\n", 0) == 0);
    const auto back = io::read_signal(ss);
    CHECK(back.taus == sig.taus);
    CHECK(back.values == sig.values);

    std::istringstream wrong_header("t,v\n0,1\n");
    CHECK_THROWS_AS(io::read_signal(wrong_header), DomainError);
    std::istringstream bad_row("tau,value\n0.1\n");
    CHECK_THROWS_AS(io::read_signal(bad_row), DomainError);
    std::istringstream bad_number("tau,value\n0.1,abc\n");
    CHECK_THROWS_AS(io::read_signal(bad_number), DomainError);
}

TEST_CASE("result table") {
    ReconstructionResult res;
    res.s = 0.0;
    ReconstructionPoint p;
    p.beta = {0.5, -0.25};
    p.W = 2.0 / std::numbers::pi;
    p.F = 1.0;
    p.converged = true;
    res.points.push_back(p);
    p.converged = false;
    p.tail_estimate = std::numeric_limits<double>::infinity();
    res.points.push_back(p);
    std::ostringstream os;
    io::write_result_table(os, res);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == io::kResultHeader);
    std::getline(is, line);
    CHECK(line == "0.5,-0.25,0,0.63661977236758138,1,0,true");
    std::getline(is, line);
    CHECK(line == "0.5,-0.25,0,0.63661977236758138,1,inf,false");
}
}

TEST_SUITE("config") {
TEST_CASE("defaults and resolved config") {
    const RunConfig cfg = parse_config(json::object());
    CHECK(cfg.state.kind == "coherent");
    CHECK(cfg.channel.gamma == 1.0);
    CHECK(cfg.evolve_method == "both");
    const json r = resolved_config(cfg);
    CHECK(r["quasiprob"]["m_max"].is_null());
    CHECK(r["probe"]["n_samples"] == 256);
    // The resolved form parses back to the same resolved form.
    CHECK(resolved_config(parse_config(r)) == r);
}

TEST_CASE("fields are parsed") {
    const json j = {{"state", {{"kind", "cat"}, {"alpha", {1.5, 0.0}}, {"sign", -1}, {"dim", 40}}},
                    {"channel", {{"gamma", 0.5}, {"nbar", 0.2}, {"t", 0.4}}},
                    {"drive", {{"alpha", 0.25}}},
                    {"quasiprob", {{"s", -0.5}, {"points", {{0.0, 0.0}, {1.0, -1.0}}}, {"m_max", 30}}},
                    {"probe", {{"source", "distribution"}, {"distribution", {0.5, 0.5}}}},
                    {"seed", 99},
                    {"threads", 2}};
    const RunConfig cfg = parse_config(j);
    CHECK(cfg.state.sign == -1);
    CHECK(cfg.state.alpha == Complex(1.5, 0.0));
    CHECK(cfg.drive_alpha == Complex(0.25, 0.0));
    CHECK(cfg.channel.t == 0.4);
    const auto spec = build_quasiprob(cfg);
    REQUIRE(spec.grid.size() == 2);
    CHECK(spec.grid[1] == Complex(1.0, -1.0));
    CHECK(*spec.m_max == 30);
    CHECK(cfg.seed == 99);
    CHECK(cfg.threads == 2);
    const auto rho = build_state(cfg);
    CHECK(rho.dim() == 40);
    CHECK(std::abs(rho(0, 0)) < 1e-15);
}

TEST_CASE("grid from bounds") {
    const json j = {{"quasiprob", {{"grid", {{"re_min", -1.0}, {"re_max", 1.0}, {"im_min", 0.0}, {"im_max", 0.5},
                                             {"step", 0.5}}}}}};
    const auto spec = build_quasiprob(parse_config(j));
    CHECK(spec.grid.size() == 5 * 2);
    CHECK(spec.grid.front() == Complex(-1.0, 0.0));
    CHECK(spec.grid.back() == Complex(1.0, 0.5));
}

TEST_CASE("schema violations name the field") {
    const auto message = [](const json& j) {
        try {
            parse_config(j);
        } catch (const DomainError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message({{"bogus", 1}}).find("bogus") != std::string::npos);
    CHECK(message({{"state", {{"kind", "squeezed"}}}}).find("state.kind") != std::string::npos);
    CHECK(message({{"state", {{"dimm", 3}}}}).find("state.dimm") != std::string::npos);
    CHECK(message({{"channel", {{"gamma", -1.0}}}}).find("channel.gamma") != std::string::npos);
    CHECK(message({{"channel", {{"t", "soon"}}}}).find("channel.t") != std::string::npos);
    CHECK(message({{"quasiprob", {{"s", 1.0}}}}).find("quasiprob.s") != std::string::npos);
    CHECK(message({{"quasiprob", {{"points", {{1.0, 2.0, 3.0}}}}}}).find("quasiprob.points[0]") !=
          std::string::npos);
    CHECK(message({{"quasiprob", {{"grid", {{"step", 0.0}}}}}}).find("quasiprob.grid.step") != std::string::npos);
    CHECK(message({{"probe", {{"n_samples", 10}}}}).find("probe.n_samples") != std::string::npos);
    CHECK(message({{"probe", {{"source", "distribution"}}}}).find("probe.distribution") != std::string::npos);
    CHECK(message({{"evolve", {{"method", "euler"}}}}).find("evolve.method") != std::string::npos);
    CHECK(message({{"state", {{"kind", "fock"}, {"n", 5}, {"dim", 5}}}}).find("state.n") != std::string::npos);
    CHECK(message({{"state", {{"kind", "cat"}, {"sign", 0}}}}).find("state.sign") != std::string::npos);
    CHECK(message({{"seed", -3}}).find("seed") != std::string::npos);
    CHECK(message({{"tolerances", {{"tail_tol", 0.0}}}}).find("tolerances.tail_tol") != std::string::npos);
    CHECK(message(json::array()).find("expected an object") != std::string::npos);
}

TEST_CASE("file state resolves against the config directory") {
    const fs::path dir = scratch_dir("config");
    io::write_state(dir / "in.json", fock_state(2, 4));
    io::write_json(dir / "run.json", {{"state", {{"kind", "file"}, {"path", "in.json"}}}});
    const auto cfg = load_config(dir / "run.json");
    const auto rho = build_state(cfg);
    CHECK(rho(2, 2) == Complex(1.0, 0.0));
    fs::remove_all(dir);
}
}
