#include "cavrec/config.hpp"

#include <cmath>
#include <set>

#include "cavrec/errors.hpp"
#include "cavrec/io.hpp"

namespace cavrec {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
    throw DomainError("config: " + field + ": " + msg);
}

// Reads the members of one JSON object and rejects keys nobody asked for.
class Section {
public:
    Section(const json& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {
        if (!j_.is_object()) fail(where(), "expected an object");
    }
    ~Section() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (const auto& [key, _] : j_.items())
            if (!seen_.count(key)) fail(field(key), "unknown key");
    }
    Section(const Section&) = delete;
    Section& operator=(const Section&) = delete;

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key) && !j_.at(key).is_null();
    }
    const json& at(const std::string& key) { return j_.at(key); }
    std::string field(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

    void number(const std::string& key, double& out) {
        if (!has(key)) return;
        const json& v = at(key);
        if (!v.is_number()) fail(field(key), "expected a number");
        out = v.get<double>();
        if (!std::isfinite(out)) fail(field(key), "must be finite");
    }
    void count(const std::string& key, std::size_t& out) {
        if (!has(key)) return;
        const json& v = at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) fail(field(key), "expected a non-negative integer");
        out = v.get<std::size_t>();
    }
    void complex(const std::string& key, Complex& out) {
        if (!has(key)) return;
        out = parse_complex(at(key), field(key));
    }
    void string(const std::string& key, std::string& out) {
        if (!has(key)) return;
        if (!at(key).is_string()) fail(field(key), "expected a string");
        out = at(key).get<std::string>();
    }

    static Complex parse_complex(const json& v, const std::string& where) {
        if (v.is_number()) return {v.get<double>(), 0.0};
        if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
            return {v[0].get<double>(), v[1].get<double>()};
        fail(where, "expected a number or [re, im]");
    }

private:
    std::string where() const { return prefix_.empty() ? "<root>" : prefix_; }
    const json& j_;
    std::string prefix_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& msg) {
    if (!ok) fail(field, msg);
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

void parse_state(const json& j, StateConfig& st) {
    Section s(j, "state");
    s.string("kind", st.kind);
    static const std::set<std::string> kinds{"coherent", "fock", "cat", "thermal", "file"};
    require(kinds.count(st.kind) > 0, "state.kind", "must be one of coherent, fock, cat, thermal, file");
    s.complex("alpha", st.alpha);
    s.count("n", st.n);
    s.number("nbar", st.nbar);
    s.count("dim", st.dim);
    s.string("path", st.path);
    if (s.has("sign")) {
        const json& v = s.at("sign");
        require(v.is_number_integer() && (v.get<int>() == 1 || v.get<int>() == -1), "state.sign", "must be 1 or -1");
        st.sign = v.get<int>();
    }
    require(st.dim >= 1, "state.dim", "must be >= 1");
    require(st.nbar >= 0.0, "state.nbar", "must be >= 0");
    if (st.kind == "fock") require(st.n < st.dim, "state.n", "must be below state.dim");
    if (st.kind == "file") require(!st.path.empty(), "state.path", "required for kind 'file'");
}

void parse_channel(const json& j, ChannelParams& ch) {
    Section s(j, "channel");
    s.number("gamma", ch.gamma);
    s.number("nbar", ch.nbar);
    s.number("t", ch.t);
    require(ch.gamma >= 0.0, "channel.gamma", "must be >= 0");
    require(ch.nbar >= 0.0, "channel.nbar", "must be >= 0");
    require(ch.t >= 0.0, "channel.t", "must be >= 0");
}

void parse_quasiprob(const json& j, QuasiprobConfig& q) {
    Section s(j, "quasiprob");
    s.number("s", q.s);
    require(q.s >= -1.0 && q.s < 1.0, "quasiprob.s", "must lie in [-1, 1)");
    if (s.has("points")) {
        const json& v = s.at("points");
        require(v.is_array(), "quasiprob.points", "expected an array of [re, im]");
        std::vector<Complex> pts;
        for (std::size_t i = 0; i < v.size(); ++i)
            pts.push_back(Section::parse_complex(v[i], "quasiprob.points[" + std::to_string(i) + "]"));
        q.points = std::move(pts);
    }
    if (s.has("grid")) {
        Section g(s.at("grid"), "quasiprob.grid");
        g.number("re_min", q.grid.re_min);
        g.number("re_max", q.grid.re_max);
        g.number("im_min", q.grid.im_min);
        g.number("im_max", q.grid.im_max);
        g.number("step", q.grid.step);
    }
    require(q.grid.step > 0.0, "quasiprob.grid.step", "must be > 0");
    require(q.grid.re_max >= q.grid.re_min, "quasiprob.grid.re_max", "must be >= re_min");
    require(q.grid.im_max >= q.grid.im_min, "quasiprob.grid.im_max", "must be >= im_min");
    if (s.has("m_max")) {
        std::size_t m = 0;
        s.count("m_max", m);
        require(m >= 1 && m <= kMaxPhotonIndex + 1, "quasiprob.m_max",
                "must lie in [1, " + std::to_string(kMaxPhotonIndex + 1) + "]");
        q.m_max = m;
    }
}

void parse_probe(const json& j, ProbeConfig& p) {
    Section s(j, "probe");
    s.number("lambda", p.lambda_coupling);
    s.count("n_samples", p.n_samples);
    s.count("m_max", p.m_max);
    s.number("noise_sigma", p.noise_sigma);
    s.string("source", p.source);
    if (s.has("distribution")) {
        const json& v = s.at("distribution");
        require(v.is_array(), "probe.distribution", "expected an array of numbers");
        p.distribution.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            require(v[i].is_number(), "probe.distribution[" + std::to_string(i) + "]", "expected a number");
            p.distribution.push_back(v[i].get<double>());
        }
    }
    require(p.lambda_coupling > 0.0, "probe.lambda", "must be > 0");
    require(p.noise_sigma >= 0.0, "probe.noise_sigma", "must be >= 0");
    require(p.n_samples > 2 * p.m_max + 3, "probe.n_samples", "must exceed 2 m_max + 3");
    require(p.source == "state" || p.source == "distribution", "probe.source", "must be 'state' or 'distribution'");
    if (p.source == "distribution")
        require(!p.distribution.empty(), "probe.distribution", "required when source is 'distribution'");
}

void parse_tolerances(const json& j, ToleranceConfig& t) {
    Section s(j, "tolerances");
    s.number("tail_tol", t.tail_tol);
    s.number("adaptive_tail", t.adaptive_tail);
    s.number("displacement_tol", t.displacement_tol);
    s.number("evolve_tail_tol", t.evolve_tail_tol);
    s.number("trace_drift_tol", t.trace_drift_tol);
    for (const char* k : {"tail_tol", "adaptive_tail", "displacement_tol", "evolve_tail_tol", "trace_drift_tol"})
        require(!s.has(k) || s.at(k).get<double>() > 0.0, s.field(k), "must be > 0");
}

}  // namespace

RunConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
    RunConfig cfg;
    cfg.base_dir = base_dir;
    Section root(j, "");
    if (root.has("state")) parse_state(root.at("state"), cfg.state);
    if (root.has("channel")) parse_channel(root.at("channel"), cfg.channel);
    if (root.has("drive")) {
        Section d(root.at("drive"), "drive");
        d.complex("alpha", cfg.drive_alpha);
    }
    if (root.has("evolve")) {
        Section e(root.at("evolve"), "evolve");
        e.string("method", cfg.evolve_method);
        e.count("steps", cfg.evolve_steps);
        require(cfg.evolve_method == "both" || cfg.evolve_method == "factorized" || cfg.evolve_method == "numerical",
                "evolve.method", "must be both, factorized or numerical");
    }
    if (root.has("quasiprob")) parse_quasiprob(root.at("quasiprob"), cfg.quasiprob);
    if (root.has("probe")) parse_probe(root.at("probe"), cfg.probe);
    if (root.has("tolerances")) parse_tolerances(root.at("tolerances"), cfg.tolerances);
    if (root.has("seed")) {
        const json& v = root.at("seed");
        require(v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0), "seed",
                "expected a non-negative integer");
        cfg.seed = v.get<std::uint64_t>();
    }
    if (root.has("threads")) {
        std::size_t t = 0;
        root.count("threads", t);
        cfg.threads = static_cast<unsigned>(t);
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    return parse_config(io::read_json(path), path.parent_path());
}

json resolved_config(const RunConfig& cfg) {
    const auto& st = cfg.state;
    const auto& q = cfg.quasiprob;
    const auto& p = cfg.probe;
    const auto& t = cfg.tolerances;
    json points = nullptr;
    if (q.points) {
        points = json::array();
        for (Complex z : *q.points) points.push_back(complex_json(z));
    }
    return {
        {"state",
         {{"kind", st.kind},
          {"alpha", complex_json(st.alpha)},
          {"n", st.n},
          {"sign", st.sign},
          {"nbar", st.nbar},
          {"dim", st.dim},
          {"path", st.path}}},
        {"channel", {{"gamma", cfg.channel.gamma}, {"nbar", cfg.channel.nbar}, {"t", cfg.channel.t}}},
        {"drive", {{"alpha", complex_json(cfg.drive_alpha)}}},
        {"evolve", {{"method", cfg.evolve_method}, {"steps", cfg.evolve_steps}}},
        {"quasiprob",
         {{"s", q.s},
          {"points", points},
          {"grid",
           {{"re_min", q.grid.re_min},
            {"re_max", q.grid.re_max},
            {"im_min", q.grid.im_min},
            {"im_max", q.grid.im_max},
            {"step", q.grid.step}}},
          {"m_max", q.m_max ? json(*q.m_max) : json(nullptr)}}},
        {"probe",
         {{"lambda", p.lambda_coupling},
          {"n_samples", p.n_samples},
          {"m_max", p.m_max},
          {"noise_sigma", p.noise_sigma},
          {"source", p.source},
          {"distribution", p.distribution}}},
        {"tolerances",
         {{"tail_tol", t.tail_tol},
          {"adaptive_tail", t.adaptive_tail},
          {"displacement_tol", t.displacement_tol},
          {"evolve_tail_tol", t.evolve_tail_tol},
          {"trace_drift_tol", t.trace_drift_tol}}},
        {"seed", cfg.seed},
        {"threads", cfg.threads},
    };
}

FockDensityMatrix build_state(const RunConfig& cfg) {
    const auto& st = cfg.state;
    if (st.kind == "coherent") return coherent_state(st.alpha, st.dim);
    if (st.kind == "fock") return fock_state(st.n, st.dim);
    if (st.kind == "cat") return cat_state(st.alpha, st.sign, st.dim);
    if (st.kind == "thermal") return thermal_state(st.nbar, st.dim);
    std::filesystem::path path(st.path);
    if (path.is_relative() && !cfg.base_dir.empty()) path = cfg.base_dir / path;
    return io::read_state(path);
}

QuasiprobSpec build_quasiprob(const RunConfig& cfg) {
    const auto& q = cfg.quasiprob;
    QuasiprobSpec spec;
    spec.s = q.s;
    spec.m_max = q.m_max;
    spec.grid = q.points ? *q.points : rect_grid(q.grid.re_min, q.grid.re_max, q.grid.im_min, q.grid.im_max, q.grid.step);
    return spec;
}

ProbeSpec build_probe(const RunConfig& cfg) {
    return ProbeSpec{cfg.probe.lambda_coupling, cfg.probe.n_samples, cfg.probe.m_max};
}

ReconstructOptions build_reconstruct_options(const RunConfig& cfg) {
    ReconstructOptions opt;
    opt.tail_tol = cfg.tolerances.tail_tol;
    opt.adaptive_tail = cfg.tolerances.adaptive_tail;
    opt.displacement_tol = cfg.tolerances.displacement_tol;
    return opt;
}

}  // namespace cavrec
