// wavekin: config-driven scenario runner for the wave-turbulence laboratory.
//
// Subcommands: propagate, resonances, cr-op, wk-op, expansion, mc,
// oracle-compare, decay, validate.  Every run writes manifest.json with the
// fully resolved configuration; re-running from that manifest reproduces the
// outputs byte for byte.  Exit codes: 0 success, 2 configuration/guard
// violation, 3 runtime or tolerance failure.

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "wavekin/duhamel.hpp"
#include "wavekin/ensemble.hpp"
#include "wavekin/kinetic.hpp"
#include "wavekin/lattice.hpp"
#include "wavekin/nls.hpp"
#include "wavekin/parallel.hpp"
#include "wavekin/resonance.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace wavekin;

namespace {

constexpr const char* kVersion = "1.0.0";

// thrown for configuration and regime-guard problems (exit 2)
struct GuardError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// ---------------------------------------------------------------------------
// configuration: flat string key -> value map, schema-checked per experiment

struct Config {
    std::string experiment;
    std::map<std::string, std::string> kv;  // sorted: deterministic manifests

    bool has(const std::string& k) const { return kv.count(k) != 0; }

    const std::string& raw(const std::string& k) const {
        auto it = kv.find(k);
        if (it == kv.end())
            throw GuardError("config: missing key '" + experiment + "." + k + "'");
        return it->second;
    }

    double get_d(const std::string& k) const {
        const std::string& v = raw(k);
        try {
            std::size_t pos = 0;
            const double x = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw GuardError("config: key '" + experiment + "." + k +
                             "' is not a number: '" + v + "'");
        }
    }

    long long get_i(const std::string& k) const {
        const std::string& v = raw(k);
        try {
            std::size_t pos = 0;
            const long long x = std::stoll(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw GuardError("config: key '" + experiment + "." + k +
                             "' is not an integer: '" + v + "'");
        }
    }

    std::uint64_t get_u64(const std::string& k) const {
        const std::string& v = raw(k);
        try {
            std::size_t pos = 0;
            const std::uint64_t x = std::stoull(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw GuardError("config: key '" + experiment + "." + k +
                             "' is not an unsigned integer: '" + v + "'");
        }
    }

    bool get_b(const std::string& k) const {
        const std::string v = raw(k);
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        throw GuardError("config: key '" + experiment + "." + k +
                         "' is not a boolean: '" + v + "'");
    }

    std::vector<double> get_list(const std::string& k) const {
        std::vector<double> out;
        std::stringstream ss(raw(k));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            try {
                out.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw GuardError("config: key '" + experiment + "." + k +
                                 "' has a non-numeric entry: '" + tok + "'");
            }
        }
        if (out.empty())
            throw GuardError("config: key '" + experiment + "." + k + "' is empty");
        return out;
    }
};

std::string json_scalar_to_string(const nlohmann::json& v, const std::string& path) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();  // shortest round-trip form
    throw GuardError("config: value at '" + path + "' must be a scalar");
}

// key=value lines ('#' comments) or a flat JSON object; a manifest.json from
// a previous run is accepted directly (its "config" object is used)
void load_config_file(const std::string& path, Config& cfg) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw GuardError("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const std::exception& e) {
            throw GuardError(std::string("config: JSON parse error: ") + e.what());
        }
        const nlohmann::json* body = &j;
        if (j.contains("config") && j["config"].is_object()) {
            body = &j["config"];  // manifest re-run
            if (j.contains("experiment"))
                cfg.kv["experiment"] =
                    json_scalar_to_string(j["experiment"], "experiment");
        }
        for (const auto& [k, v] : body->items())
            cfg.kv[k] = json_scalar_to_string(v, k);
        return;
    }
    std::stringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw GuardError("config: '" + path + "' line " +
                             std::to_string(lineno) + ": expected key=value");
        const std::string k = trim(line.substr(0, eq));
        const std::string v = trim(line.substr(eq + 1));
        if (k.empty())
            throw GuardError("config: '" + path + "' line " +
                             std::to_string(lineno) + ": empty key");
        cfg.kv[k] = v;
    }
}

struct KeySpec {
    const char* key;
    const char* def;  // default value; nullptr = required
};

const std::vector<KeySpec> kCommonKeys = {
    {"L", "2"},          {"h", "0.1"},         {"sigma", "0.15"},
    {"eps", "0.01"},     {"delta0", "0.05"},   {"profile", "bump"},
    {"profile_radius", "1"}, {"profile_param", "0"},
    {"seed", "1"},       {"random_phases", "false"}, {"realization", "0"},
};

std::map<std::string, std::vector<KeySpec>> experiment_keys() {
    return {
        {"propagate", {{"times", "0,0.5,1,2,4"}, {"k1", "0"}, {"k2", "0"}}},
        {"resonances", {{"radius", nullptr}, {"Kx", "0"}, {"Ky", "0"}}},
        {"cr-op",
         {{"k1", "0"}, {"k2", "0"}, {"xi_min", "-8"}, {"xi_max", "8"},
          {"xi_points", "33"}, {"times_2pi", "false"}, {"rel_tol", "1e-7"},
          {"abs_tol", "1e-13"}}},
        {"wk-op", {{"k1", "0"}, {"k2", "0"}, {"rel_tol", "1e-7"},
                   {"abs_tol", "1e-13"}}},
        {"expansion",
         {{"Kx", "0"}, {"Ky", "0"}, {"times", "0.5,1"}, {"order", "1"},
          {"quad_rel_tol", "1e-10"}, {"budget", "10000000"},
          {"allow_long_time", "false"}}},
        {"mc",
         {{"Kx", "1"}, {"Ky", "0"}, {"Kpx", ""}, {"Kpy", ""}, {"t", "1"},
          {"n_realizations", "10000"}, {"eps1", "0.02"},
          {"eps2", "0.014142135623730951"}, {"eps3", "0.01"},
          {"include_v2", "true"}, {"antisym", "false"}}},
        {"oracle-compare",
         {{"N", "512"}, {"S", "160"}, {"dt", "0.001"}, {"lambda", "1"},
          {"t", "1"}, {"k1", "0"}, {"k2", "0"}, {"eps1", "0.04"},
          {"eps2", "0.02"}, {"eps3", "0.01"}}},
        {"decay",
         {{"k1", "0"}, {"k2", "0"}, {"times", "10,31.6,100,316,1000"},
          {"uc1", "0"}, {"uc2", "0"}, {"uw", "1"}, {"vc1", "0"}, {"vc2", "0"},
          {"vw", "1"}, {"wc1", "0"}, {"wc2", "0"}, {"ww", "1"}}},
        {"validate", {{"strict_ratio", "1"}}},
    };
}

// schema check + defaults; after this every allowed key has a value
void resolve_config(Config& cfg) {
    const auto per_exp = experiment_keys();
    const auto it = per_exp.find(cfg.experiment);
    if (it == per_exp.end())
        throw GuardError("config: unknown experiment '" + cfg.experiment + "'");
    std::set<std::string> allowed = {"experiment"};
    std::vector<KeySpec> specs(kCommonKeys);
    specs.insert(specs.end(), it->second.begin(), it->second.end());
    for (const KeySpec& s : specs) allowed.insert(s.key);
    for (const auto& [k, v] : cfg.kv)
        if (!allowed.count(k))
            throw GuardError("config schema: unknown key '" + cfg.experiment +
                             "." + k + "'");
    if (cfg.has("experiment") && cfg.raw("experiment") != cfg.experiment)
        throw GuardError("config schema: 'experiment' is '" +
                         cfg.raw("experiment") + "' but the subcommand is '" +
                         cfg.experiment + "'");
    cfg.kv["experiment"] = cfg.experiment;
    for (const KeySpec& s : specs) {
        if (cfg.has(s.key)) continue;
        if (s.def == nullptr) {
            // the only defaultable-from-elsewhere key: radius <- profile_radius
            if (std::string(s.key) == "radius" && cfg.has("profile_radius")) {
                cfg.kv["radius"] = cfg.raw("profile_radius");
                continue;
            }
            throw GuardError("config: missing key '" + cfg.experiment + "." +
                             s.key + "'");
        }
        cfg.kv[s.key] = s.def;
    }
    if (!cfg.has("radius") && allowed.count("radius"))
        cfg.kv["radius"] = cfg.raw("profile_radius");
}

ScalingParams scaling_of(const Config& c) {
    return ScalingParams{c.get_d("L"), c.get_d("h"), c.get_d("sigma"),
                         c.get_d("eps"), c.get_d("delta0")};
}

SpectralProfile profile_of(const Config& c) {
    return make_profile(c.raw("profile"), c.get_d("profile_radius"),
                        c.get_d("profile_param"));
}

// ---------------------------------------------------------------------------
// output helpers

struct CsvWriter {
    std::FILE* f = nullptr;
    explicit CsvWriter(const fs::path& p) {
        f = std::fopen(p.string().c_str(), "wb");
        if (!f) throw std::runtime_error("cannot open output " + p.string());
    }
    ~CsvWriter() {
        if (f) std::fclose(f);
    }
    void header(const char* h) { std::fprintf(f, "%s\n", h); }
    void field_d(double v, bool last = false) {
        std::fprintf(f, "%.17g%c", v, last ? '\n' : ',');
    }
    void field_i(long long v, bool last = false) {
        std::fprintf(f, "%lld%c", v, last ? '\n' : ',');
    }
    void field_s(const std::string& v, bool last = false) {
        std::fprintf(f, "%s%c", v.c_str(), last ? '\n' : ',');
    }
};

void write_json(const fs::path& p, const ordered_json& j) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output " + p.string());
    out << j.dump(2) << "\n";
}

void write_manifest(const fs::path& out_dir, const Config& cfg,
                    const std::vector<std::string>& outputs) {
    ordered_json j;
    j["experiment"] = cfg.experiment;
    ordered_json art;
    art["name"] = "wavekin";
    art["version"] = kVersion;
    std::string canon = std::string(kVersion) + "|" + cfg.experiment;
    for (const auto& [k, v] : cfg.kv) canon += "|" + k + "=" + v;
    char hash[24];
    std::snprintf(hash, sizeof hash, "0x%016" PRIx64, fnv1a(canon));
    art["config_hash"] = hash;
    j["artifact"] = art;
    ordered_json conf;
    for (const auto& [k, v] : cfg.kv) conf[k] = v;  // sorted map: stable order
    j["config"] = conf;
    j["outputs"] = outputs;
    write_json(out_dir / "manifest.json", j);
}

ordered_json json_complex(cd z) {
    ordered_json j;
    j["re"] = z.real();
    j["im"] = z.imag();
    return j;
}

ordered_json json_moment(const MomentEstimate& m) {
    ordered_json j;
    j["mean"] = m.mean;
    j["stderr"] = m.stderr_;
    j["n"] = m.n;
    return j;
}

// ---------------------------------------------------------------------------
// experiments

const PhaseEnsemble* phases_of(const Config& c, PhaseEnsemble& storage) {
    if (!c.get_b("random_phases")) return nullptr;
    storage.seed = c.get_u64("seed");
    return &storage;
}

int run_propagate(const Config& c, const fs::path& out) {
    const ScalingParams p = scaling_of(c);
    const SpectralProfile eta = profile_of(c);
    PhaseEnsemble pe;
    const PhaseEnsemble* phases = phases_of(c, pe);
    const WavePacketSum phi = build_phi(p, eta, phases, c.get_u64("realization"));
    const double k1 = c.get_d("k1"), k2 = c.get_d("k2");
    CsvWriter csv(out / "propagate.csv");
    csv.header("t,re,im,abs");
    for (double t : c.get_list("times")) {
        const WavePacketSum vt = propagate(phi, t);
        const cd val = coarse_grain(vt, k1, k2, p.sigma);
        csv.field_d(t);
        csv.field_d(val.real());
        csv.field_d(val.imag());
        csv.field_d(std::abs(val), true);
    }
    write_manifest(out, c, {"propagate.csv"});
    return 0;
}

std::vector<ResonantLevel> resonance_levels_cached(const Config& c) {
    const ScalingParams p = scaling_of(c);
    const SpectralProfile eta = profile_of(c);
    const double radius = c.get_d("radius");
    const IVec2 mK{c.get_i("Kx"), c.get_i("Ky")};
    const LatticeSpec lat{p.L};

    fs::path cache_file;
    const char* cache_dir = std::getenv("WAVEKIN_CACHE");
    if (cache_dir && *cache_dir) {
        std::string key = "levels";
        for (const char* k : {"L", "radius", "Kx", "Ky", "profile",
                              "profile_radius", "profile_param", "seed",
                              "random_phases", "realization"})
            key += "|" + std::string(k) + "=" + c.raw(k);
        char name[40];
        std::snprintf(name, sizeof name, "levels_%016" PRIx64 ".bin", fnv1a(key));
        cache_file = fs::path(cache_dir) / name;
        std::ifstream in(cache_file, std::ios::binary);
        if (in) {
            char magic[8];
            std::uint64_t n = 0;
            in.read(magic, 8);
            in.read(reinterpret_cast<char*>(&n), 8);
            if (in && std::memcmp(magic, "WKLV0001", 8) == 0) {
                std::vector<ResonantLevel> levels(n);
                for (auto& lv : levels) {
                    double re = 0, im = 0;
                    in.read(reinterpret_cast<char*>(&lv.defect_num), 8);
                    in.read(reinterpret_cast<char*>(&lv.count), 8);
                    in.read(reinterpret_cast<char*>(&re), 8);
                    in.read(reinterpret_cast<char*>(&im), 8);
                    lv.value = cd(re, im);
                }
                if (in) return levels;
            }
        }
    }

    PhaseEnsemble pe;
    const PhaseEnsemble* phases = phases_of(c, pe);
    const long long half_width =
        static_cast<long long>(std::floor(radius * p.L));
    const SiteTable zeta = make_site_table(lat, eta, half_width, phases,
                                           c.get_u64("realization"));
    const auto levels = level_set_profile(lat, zeta, mK, radius);

    if (!cache_file.empty()) {
        fs::create_directories(cache_file.parent_path());
        std::ofstream outf(cache_file, std::ios::binary);
        if (outf) {
            const std::uint64_t n = levels.size();
            outf.write("WKLV0001", 8);
            outf.write(reinterpret_cast<const char*>(&n), 8);
            for (const auto& lv : levels) {
                const double re = lv.value.real(), im = lv.value.imag();
                outf.write(reinterpret_cast<const char*>(&lv.defect_num), 8);
                outf.write(reinterpret_cast<const char*>(&lv.count), 8);
                outf.write(reinterpret_cast<const char*>(&re), 8);
                outf.write(reinterpret_cast<const char*>(&im), 8);
            }
        }
    }
    return levels;
}

int run_resonances(const Config& c, const fs::path& out) {
    const auto levels = resonance_levels_cached(c);
    const double L = c.get_d("L");
    CsvWriter csv(out / "resonances.csv");
    csv.header("xi_num,xi_den,count,re,im");
    for (const auto& lv : levels) {
        csv.field_i(lv.defect_num);
        csv.field_d(L * L);
        csv.field_i(lv.count);
        csv.field_d(lv.value.real());
        csv.field_d(lv.value.imag(), true);
    }
    write_manifest(out, c, {"resonances.csv"});
    return 0;
}

int run_cr_op(const Config& c, const fs::path& out) {
    const SpectralProfile eta = profile_of(c);
    const double k1 = c.get_d("k1"), k2 = c.get_d("k2");
    ChartOptions opt{c.get_d("rel_tol"), c.get_d("abs_tol")};
    const cd value = cr_operator(eta, eta, eta, k1, k2, opt);

    std::vector<std::string> outputs;
    const long long n = c.get_i("xi_points");
    if (n > 0) {
        const double lo = c.get_d("xi_min"), hi = c.get_d("xi_max");
        if (!(hi > lo)) throw GuardError("config: need xi_max > xi_min");
        std::vector<double> grid(n);
        for (long long i = 0; i < n; ++i)
            grid[i] = n == 1 ? lo : lo + (hi - lo) * i / double(n - 1);
        const KineticProfile prof = khat_profile(eta, eta, eta, k1, k2, grid,
                                                 c.get_b("times_2pi"), opt);
        CsvWriter csv(out / "kinetic_profile.csv");
        csv.header("xi,re,im");
        for (std::size_t i = 0; i < prof.xi.size(); ++i) {
            csv.field_d(prof.xi[i]);
            csv.field_d(prof.value[i].real());
            csv.field_d(prof.value[i].imag(), true);
        }
        outputs.push_back("kinetic_profile.csv");
    }

    ordered_json rep;
    rep["k"] = {k1, k2};
    rep["cr_operator"] = json_complex(value);
    write_json(out / "report.json", rep);
    outputs.push_back("report.json");
    write_manifest(out, c, outputs);
    return 0;
}

int run_wk_op(const Config& c, const fs::path& out) {
    const SpectralProfile n = profile_of(c);
    const double k1 = c.get_d("k1"), k2 = c.get_d("k2");
    ChartOptions opt{c.get_d("rel_tol"), c.get_d("abs_tol")};
    const double value = wk_operator(n, k1, k2, opt);
    ordered_json rep;
    rep["k"] = {k1, k2};
    rep["wk_operator"] = value;
    write_json(out / "report.json", rep);
    write_manifest(out, c, {"report.json"});
    return 0;
}

int run_expansion(const Config& c, const fs::path& out) {
    const ScalingParams p = scaling_of(c);
    const SpectralProfile eta = profile_of(c);
    PhaseEnsemble pe;
    const PhaseEnsemble* phases = phases_of(c, pe);
    const std::uint64_t realization = c.get_u64("realization");
    const IVec2 mK{c.get_i("Kx"), c.get_i("Ky")};
    const long long order = c.get_i("order");
    if (order < 1 || order > 2)
        throw GuardError("config: expansion.order must be 1 or 2");
    const std::vector<double> times = c.get_list("times");

    // the expansion kernels are only uniformly controlled up to the kinetic
    // time horizon
    const double t_max = 1.0 / (p.sigma * p.sigma * p.L * p.L);
    if (!c.get_b("allow_long_time"))
        for (double t : times)
            if (std::abs(t) > t_max)
                throw GuardError(
                    "guard violated: t <= 1/(sigma^2 L^2) (t = " + fmt_double(t) +
                    ", bound = " + fmt_double(t_max) +
                    "); set allow_long_time=true to override");

    ExpansionOptions eopt;
    eopt.quad_rel_tol = c.get_d("quad_rel_tol");
    eopt.budget = static_cast<std::size_t>(c.get_i("budget"));

    const std::string Klabel =
        std::to_string(mK.x) + ":" + std::to_string(mK.y);
    CsvWriter csv(out / "expansion.csv");
    csv.header("K,t,order,re,im,remainder_abs,budget_used");
    for (double t : times) {
        const ExpansionValue v1 =
            v1_exact(p, eta, mK, t, eopt, phases, realization);
        const cd v1l = v1_leading(p, eta, mK, t, phases, realization);
        csv.field_s(Klabel);
        csv.field_d(t);
        csv.field_i(1);
        csv.field_d(v1.value.real());
        csv.field_d(v1.value.imag());
        csv.field_d(std::abs(v1.value - v1l));
        csv.field_i(static_cast<long long>(v1.terms_used), true);
        if (order >= 2) {
            const ExpansionValue v2 = v2_exact(p, eta, mK, t, eopt.quad_rel_tol,
                                               eopt.budget, phases, realization);
            const cd v2l = v2_leading(p, eta, mK, t, phases, realization);
            csv.field_s(Klabel);
            csv.field_d(t);
            csv.field_i(2);
            csv.field_d(v2.value.real());
            csv.field_d(v2.value.imag());
            csv.field_d(std::abs(v2.value - v2l));
            csv.field_i(static_cast<long long>(v2.terms_used), true);
        }
    }
    write_manifest(out, c, {"expansion.csv"});
    return 0;
}

int run_mc(const Config& c, const fs::path& out) {
    const ScalingParams p = scaling_of(c);
    const SpectralProfile eta = profile_of(c);
    const IVec2 mK{c.get_i("Kx"), c.get_i("Ky")};
    std::optional<IVec2> mKp;
    if (!c.raw("Kpx").empty() || !c.raw("Kpy").empty()) {
        if (c.raw("Kpx").empty() || c.raw("Kpy").empty())
            throw GuardError("config: Kpx and Kpy must be given together");
        mKp = IVec2{c.get_i("Kpx"), c.get_i("Kpy")};
    }
    EnsembleOptions opt;
    opt.n_realizations = static_cast<std::size_t>(c.get_i("n_realizations"));
    opt.eps = {c.get_d("eps1"), c.get_d("eps2"), c.get_d("eps3")};
    opt.include_v2 = c.get_b("include_v2");
    opt.antisym = c.get_b("antisym");
    opt.seed = c.get_u64("seed");
    const double t = c.get_d("t");
    const EnsembleResult r =
        variance_mc(p, eta, mK, t, opt, mKp ? &*mKp : nullptr);

    ordered_json rep;
    rep["K"] = {mK.x, mK.y};
    if (mKp) rep["Kprime"] = {mKp->x, mKp->y};
    rep["t"] = t;
    rep["seed"] = opt.seed;
    rep["n_realizations"] = opt.n_realizations;
    rep["eps_ladder"] = {r.eps[0], r.eps[1], r.eps[2]};
    for (int i = 0; i < 3; ++i) {
        rep["abs2_fwd"].push_back(json_moment(r.abs2_fwd[i]));
        if (opt.antisym) rep["abs2_bwd"].push_back(json_moment(r.abs2_bwd[i]));
    }
    rep["fit_fwd"]["coeff"] = r.fit_fwd.coeff;
    rep["fit_fwd"]["coeff_err"] = r.fit_fwd.coeff_err;
    if (opt.antisym) {
        rep["fit_bwd"]["coeff"] = r.fit_bwd.coeff;
        rep["fit_bwd"]["coeff_err"] = r.fit_bwd.coeff_err;
    }
    rep["phi_abs2_exact"] = r.phi_abs2_exact;
    rep["phi_abs2_mc"] = json_moment(r.phi_abs2_mc);
    rep["v1_abs2_exact"] = r.v1_abs2_exact;
    rep["v1_abs2_mc"] = json_moment(r.v1_abs2_mc);
    if (mKp) rep["cross_abs"] = json_moment(r.cross_abs);
    write_json(out / "report.json", rep);
    write_manifest(out, c, {"report.json"});
    return 0;
}

int run_oracle_compare(const Config& c, const fs::path& out) {
    const SpectralProfile eta = profile_of(c);
    PhaseEnsemble pe;
    const PhaseEnsemble* phases = phases_of(c, pe);
    const std::uint64_t realization = c.get_u64("realization");
    const double t = c.get_d("t");
    const double k1 = c.get_d("k1"), k2 = c.get_d("k2");
    const double eps_ladder[3] = {c.get_d("eps1"), c.get_d("eps2"),
                                  c.get_d("eps3")};
    NlsConfig ncfg;
    ncfg.N = static_cast<int>(c.get_i("N"));
    ncfg.S = c.get_d("S");
    ncfg.dt = c.get_d("dt");
    ncfg.lambda = c.get_d("lambda");

    CsvWriter csv(out / "oracle.csv");
    csv.header("eps,obs_re,obs_im,model_re,model_im,residual_abs");
    double res[3] = {0, 0, 0};
    for (int i = 0; i < 3; ++i) {
        ScalingParams p = scaling_of(c);
        p.eps = eps_ladder[i];
        SplitStepSolver sol(ncfg);
        sol.set_initial_lattice(p, eta, phases, realization);
        sol.run_until(t);
        const cd obs = sol.observe(k1, k2, p.sigma);
        const cd phi = coarse_grain_phi(p, eta, k1, k2, phases, realization);
        const IVec2 mK{std::llround(k1 * p.L), std::llround(k2 * p.L)};
        const cd v1 = v1_exact(p, eta, mK, t, {}, phases, realization).value;
        const cd model = p.eps * phi - cd(0.0, 1.0) * std::pow(p.eps, 3) * v1;
        res[i] = std::abs(obs - model);
        csv.field_d(p.eps);
        csv.field_d(obs.real());
        csv.field_d(obs.imag());
        csv.field_d(model.real());
        csv.field_d(model.imag());
        csv.field_d(res[i], true);
    }
    const double slope = std::log(res[0] / res[2]) /
                         std::log(eps_ladder[0] / eps_ladder[2]);
    ordered_json rep;
    rep["t"] = t;
    rep["eps_ladder"] = {eps_ladder[0], eps_ladder[1], eps_ladder[2]};
    rep["residual_abs"] = {res[0], res[1], res[2]};
    rep["loglog_slope"] = slope;
    write_json(out / "report.json", rep);
    write_manifest(out, c, {"oracle.csv", "report.json"});
    return 0;
}

int run_decay(const Config& c, const fs::path& out) {
    // frequency-side Gaussian packets e^{-|k-c|^2/(2 w^2)}
    auto packet = [&](const char* c1, const char* c2, const char* w) {
        const double x = c.get_d(c1), y = c.get_d(c2), s = c.get_d(w);
        if (!(s > 0.0)) throw GuardError("config: packet widths must be positive");
        WavePacketSum f;
        f.terms.push_back(make_gaussian(std::exp(-(x * x + y * y) / (2 * s * s)),
                                        cd(1.0 / (2 * s * s), 0.0),
                                        {cd(x / (s * s)), cd(y / (s * s))}));
        return f;
    };
    const WavePacketSum u = packet("uc1", "uc2", "uw");
    const WavePacketSum v = packet("vc1", "vc2", "vw");
    const WavePacketSum w = packet("wc1", "wc2", "ww");
    const double k1 = c.get_d("k1"), k2 = c.get_d("k2");
    const std::vector<double> times = c.get_list("times");
    const std::vector<cd> vals = decay_profile(u, v, w, k1, k2, times);

    CsvWriter csv(out / "decay.csv");
    csv.header("t,re,im,abs");
    for (std::size_t i = 0; i < times.size(); ++i) {
        csv.field_d(times[i]);
        csv.field_d(vals[i].real());
        csv.field_d(vals[i].imag());
        csv.field_d(std::abs(vals[i]), true);
    }
    ordered_json rep;
    rep["k"] = {k1, k2};
    if (times.size() >= 2 && times.front() > 0.0 && times.back() > 0.0 &&
        std::abs(vals.front()) > 0.0 && std::abs(vals.back()) > 0.0) {
        rep["loglog_slope"] =
            std::log(std::abs(vals.back()) / std::abs(vals.front())) /
            std::log(times.back() / times.front());
    }
    write_json(out / "report.json", rep);
    write_manifest(out, c, {"decay.csv", "report.json"});
    return 0;
}

int run_validate(const Config& c, const fs::path& out) {
    const ScalingParams p = scaling_of(c);
    const RegimeReport r = validate_regime(p, c.get_d("strict_ratio"));
    ordered_json rep;
    rep["ok"] = r.ok;
    for (const auto& [label, ratio] : r.margins) {
        ordered_json m;
        m["constraint"] = label;
        m["ratio"] = ratio;
        rep["margins"].push_back(m);
    }
    rep["violations"] = r.violations;
    rep["window1"] = {r.window1_lo, r.window1_hi};
    rep["window2"] = {r.window2_lo, r.window2_hi};
    write_json(out / "report.json", rep);
    write_manifest(out, c, {"report.json"});
    if (!r.ok) {
        for (const auto& vio : r.violations)
            std::fprintf(stderr, "regime violation: %s\n", vio.c_str());
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wavekin: numerical laboratory for discrete wave turbulence"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    int threads = 0;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::vector<std::string> overrides;

    const std::vector<std::string> names = {
        "propagate", "resonances", "cr-op", "wk-op",      "expansion",
        "mc",        "oracle-compare",      "decay",      "validate"};
    for (const std::string& name : names) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "configuration file");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--threads", threads, "worker thread cap");
        sub->add_option("--seed", seed, "phase ensemble seed")
            ->each([&](const std::string&) { seed_given = true; });
        sub->add_option("--override", overrides, "KEY=VAL config override");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    Config cfg;
    cfg.experiment = app.get_subcommands().front()->get_name();
    int rc = 0;
    try {
        if (!config_path.empty()) load_config_file(config_path, cfg);
        for (const std::string& ov : overrides) {
            const auto eq = ov.find('=');
            if (eq == std::string::npos || eq == 0)
                throw GuardError("--override expects KEY=VAL, got '" + ov + "'");
            cfg.kv[trim(ov.substr(0, eq))] = trim(ov.substr(eq + 1));
        }
        if (seed_given) cfg.kv["seed"] = std::to_string(seed);
        resolve_config(cfg);
        set_thread_count(threads);

        const fs::path out(out_dir);
        fs::create_directories(out);
        if (cfg.experiment == "propagate") rc = run_propagate(cfg, out);
        else if (cfg.experiment == "resonances") rc = run_resonances(cfg, out);
        else if (cfg.experiment == "cr-op") rc = run_cr_op(cfg, out);
        else if (cfg.experiment == "wk-op") rc = run_wk_op(cfg, out);
        else if (cfg.experiment == "expansion") rc = run_expansion(cfg, out);
        else if (cfg.experiment == "mc") rc = run_mc(cfg, out);
        else if (cfg.experiment == "oracle-compare") rc = run_oracle_compare(cfg, out);
        else if (cfg.experiment == "decay") rc = run_decay(cfg, out);
        else if (cfg.experiment == "validate") rc = run_validate(cfg, out);
    } catch (const GuardError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return rc;
}
