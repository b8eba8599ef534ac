#include "dicke/app/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <openssl/sha.h>
#include <yaml-cpp/yaml.h>

namespace dicke::app {

namespace {

enum class Group { physics, numerics, io };

struct KeyDef {
    std::string name;
    std::string type;
    std::string doc;
    Group group;
    std::function<void(RunConfig&, const YAML::Node&)> set;
    std::function<std::string(const RunConfig&)> get;
};

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

[[noreturn]] void type_error(const std::string& key, const char* expected, const YAML::Node& node) {
    std::string got = node.IsScalar() ? "'" + node.Scalar() + "'" : "a non-scalar value";
    throw ConfigError(fmt::format("key '{}': expected {}, got {}", key, expected, got));
}

template <class T>
T scalar_as(const std::string& key, const YAML::Node& node, const char* expected) {
    if (!node.IsScalar()) type_error(key, expected, node);
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        type_error(key, expected, node);
    }
}

struct Range {
    std::optional<double> lo, hi;
    bool lo_open = false;
};

void check_range(const std::string& key, double v, const Range& r) {
    const bool below = r.lo && (r.lo_open ? !(v > *r.lo) : !(v >= *r.lo));
    const bool above = r.hi && !(v <= *r.hi);
    if (below || above || std::isnan(v)) {
        std::string bound;
        if (r.lo) bound += fmt::format("{} {}", r.lo_open ? ">" : ">=", fmt_double(*r.lo));
        if (r.hi) bound += fmt::format("{}<= {}", bound.empty() ? "" : " and ", fmt_double(*r.hi));
        throw ConfigError(fmt::format("key '{}': value {} out of range (must be {})", key, fmt_double(v), bound));
    }
}

template <class Acc>
KeyDef real(std::string name, Group g, std::string doc, Acc acc, Range r = {}) {
    return {name, "real", std::move(doc), g,
            [name, acc, r](RunConfig& c, const YAML::Node& n) {
                const double v = scalar_as<double>(name, n, "a real number");
                check_range(name, v, r);
                acc(c) = v;
            },
            [acc](const RunConfig& c) { return fmt_double(acc(const_cast<RunConfig&>(c))); }};
}

template <class Acc>
KeyDef integer(std::string name, Group g, std::string doc, Acc acc, Range r = {}) {
    return {name, "integer", std::move(doc), g,
            [name, acc, r](RunConfig& c, const YAML::Node& n) {
                const long long v = scalar_as<long long>(name, n, "an integer");
                check_range(name, static_cast<double>(v), r);
                acc(c) = static_cast<std::remove_reference_t<decltype(acc(c))>>(v);
            },
            [acc](const RunConfig& c) { return std::to_string(acc(const_cast<RunConfig&>(c))); }};
}

template <class Acc>
KeyDef boolean(std::string name, Group g, std::string doc, Acc acc) {
    return {name, "bool", std::move(doc), g,
            [name, acc](RunConfig& c, const YAML::Node& n) { acc(c) = scalar_as<bool>(name, n, "true or false"); },
            [acc](const RunConfig& c) { return std::string(acc(const_cast<RunConfig&>(c)) ? "true" : "false"); }};
}

template <class Acc>
KeyDef text(std::string name, Group g, std::string doc, Acc acc, std::vector<std::string> choices = {}) {
    return {name, "string", std::move(doc), g,
            [name, acc, choices](RunConfig& c, const YAML::Node& n) {
                auto v = scalar_as<std::string>(name, n, "a string");
                if (!choices.empty() && std::find(choices.begin(), choices.end(), v) == choices.end()) {
                    std::string list;
                    for (const auto& ch : choices) list += (list.empty() ? "" : ", ") + ch;
                    throw ConfigError(fmt::format("key '{}': '{}' is not one of {}", name, v, list));
                }
                acc(c) = v;
            },
            [acc](const RunConfig& c) { return fmt::format("\"{}\"", acc(const_cast<RunConfig&>(c))); }};
}

const std::vector<std::string> kSweepKeys = {"", "g", "drive_amplitude", "gamma", "temperature"};

PairKind parse_pair_kind(const std::string& s) {
    if (s == "random") return PairKind::random_pure;
    if (s == "random_product") return PairKind::random_product;
    throw ConfigError("key 'pair_kind': '" + s + "' is not one of random, random_product");
}

const std::vector<KeyDef>& key_table() {
    static const std::vector<KeyDef> table = [] {
        using G = Group;
        std::vector<KeyDef> t;
        // physics
        t.push_back(integer("n_emitters", G::physics, "number of two-level emitters (required)",
                            [](RunConfig& c) -> int& { return c.model.n_emitters; }, {1, 6}));
        t.push_back(real("g", G::physics, "emitter-cavity coupling in units of omega0 (required)",
                         [](RunConfig& c) -> double& { return c.model.g; }, {0.0, {}}));
        t.push_back(real("omega0", G::physics, "reference frequency",
                         [](RunConfig& c) -> double& { return c.model.omega0; }, {0.0, {}, true}));
        t.push_back(real("omega_c", G::physics, "cavity frequency (default omega0)",
                         [](RunConfig& c) -> double& { return c.model.omega_c; }, {0.0, {}, true}));
        t.push_back(real("omega_x", G::physics, "emitter transition frequency (default omega0)",
                         [](RunConfig& c) -> double& { return c.model.omega_x; }, {0.0, {}, true}));
        t.push_back(real("omega_d", G::physics, "drive frequency (default omega0)",
                         [](RunConfig& c) -> double& { return c.model.omega_d; }, {0.0, {}, true}));
        t.push_back(real("drive_amplitude", G::physics, "drive amplitude Omega",
                         [](RunConfig& c) -> double& { return c.model.drive_amplitude; }, {0.0, {}}));
        t.push_back(integer("photon_cutoff", G::physics, "largest Fock number kept",
                            [](RunConfig& c) -> int& { return c.photon_cutoff; }, {1, 400}));
        t.push_back(real("gamma", G::physics, "Ohmic coupling strength",
                         [](RunConfig& c) -> double& { return c.spectral.gamma; }, {0.0, {}, true}));
        t.push_back(real("temperature", G::physics, "bath temperature k_B T / omega0",
                         [](RunConfig& c) -> double& { return c.spectral.temperature; }, {0.0, {}}));
        t.push_back(boolean("lamb_shift", G::physics, "include the imaginary part of Z",
                            [](RunConfig& c) -> bool& { return c.spectral.lamb_shift; }));
        t.push_back(real("lamb_cutoff", G::physics, "upper frequency of the principal-value integral",
                         [](RunConfig& c) -> double& { return c.spectral.lamb_cutoff; }, {0.0, {}, true}));
        // numerics
        t.push_back(integer("n_steps", G::numerics, "propagator steps per drive period (power of two)",
                            [](RunConfig& c) -> int& { return c.floquet.n_steps; }, {32, 1 << 20}));
        t.push_back(integer("magnus_order", G::numerics, "2 or 4",
                            [](RunConfig& c) -> int& { return c.floquet.magnus_order; }, {2, 4}));
        t.push_back(integer("nu_max", G::numerics, "Fourier modes kept: -nu_max..nu_max",
                            [](RunConfig& c) -> int& { return c.floquet.nu_max; }, {0, 1 << 16}));
        t.push_back(real("degeneracy_tol", G::numerics, "quasienergy degeneracy threshold",
                         [](RunConfig& c) -> double& { return c.floquet.degeneracy_tol; }, {0.0, {}, true}));
        t.push_back(boolean("force_driven", G::numerics, "use the propagator path even when Omega = 0",
                            [](RunConfig& c) -> bool& { return c.force_driven; }));
        t.push_back(integer("dt_per_period", G::numerics, "non-Markovianity grid points per period",
                            [](RunConfig& c) -> int& { return c.grid.steps_per_period; }, {1, 1 << 16}));
        t.push_back(real("t_max_factor", G::numerics, "horizon in units of 1 / gap(W)",
                         [](RunConfig& c) -> double& { return c.grid.horizon_factor; }, {0.0, {}, true}));
        t.push_back(real("max_periods", G::numerics, "cap on the horizon in periods",
                         [](RunConfig& c) -> double& { return c.grid.max_periods; }, {0.0, {}, true}));
        t.push_back(integer("n_samples", G::numerics, "random pairs per point",
                            [](RunConfig& c) -> int& { return c.n_samples; }, {0, 1e7}));
        t.push_back(integer("seed", G::numerics, "base seed of the random pairs",
                            [](RunConfig& c) -> std::uint64_t& { return c.seed; }, {0, {}}));
        t.push_back(KeyDef{"pair_kind", "string", "random | random_product", G::numerics,
                           [](RunConfig& c, const YAML::Node& n) {
                               c.pair_kind = parse_pair_kind(scalar_as<std::string>("pair_kind", n, "a string"));
                           },
                           [](const RunConfig& c) { return fmt::format("\"{}\"", to_string(c.pair_kind)); }});
        t.push_back(text("sweep_key", G::numerics, "swept parameter: g, drive_amplitude, gamma, temperature or empty",
                         [](RunConfig& c) -> std::string& { return c.sweep_key; }, kSweepKeys));
        t.push_back(KeyDef{"sweep_values", "list of reals", "values of the swept parameter", G::numerics,
                           [](RunConfig& c, const YAML::Node& n) {
                               if (!n.IsSequence()) type_error("sweep_values", "a list of reals", n);
                               c.sweep_values.clear();
                               for (const auto& v : n)
                                   c.sweep_values.push_back(scalar_as<double>("sweep_values", v, "a real number"));
                           },
                           [](const RunConfig& c) {
                               std::string s = "[";
                               for (std::size_t i = 0; i < c.sweep_values.size(); ++i)
                                   s += (i ? ", " : "") + fmt_double(c.sweep_values[i]);
                               return s + "]";
                           }});
        t.push_back(real("husimi_range", G::numerics, "Husimi grid spans [-r, r] on both axes",
                         [](RunConfig& c) -> double& { return c.husimi.re_max; }, {0.0, {}, true}));
        t.push_back(integer("husimi_points", G::numerics, "grid points per axis",
                            [](RunConfig& c) -> int& { return c.husimi.n_re; }, {1, 10001}));
        t.push_back(real("sc_kappa", G::numerics, "semiclassical cavity decay (negative: gamma)",
                         [](RunConfig& c) -> double& { return c.semiclassical.kappa; }));
        t.push_back(real("sc_periods", G::numerics, "semiclassical run length in drive periods",
                         [](RunConfig& c) -> double& { return c.semiclassical.periods; }, {0.0, {}}));
        t.push_back(integer("sc_steps_per_period", G::numerics, "RK4 steps per drive period",
                            [](RunConfig& c) -> int& { return c.semiclassical.steps_per_period; }, {1, 1 << 20}));
        t.push_back(integer("sc_sample_every", G::numerics, "record every n-th step",
                            [](RunConfig& c) -> int& { return c.semiclassical.sample_every; }, {1, {}}));
        t.push_back(text("sc_initial", G::numerics, "ground | excited | branch",
                         [](RunConfig& c) -> std::string& { return c.semiclassical.initial; },
                         {"ground", "excited", "branch"}));
        t.push_back(real("sc_alpha0_re", G::numerics, "initial Re alpha",
                         [](RunConfig& c) -> double& { return c.semiclassical.alpha0_re; }));
        t.push_back(real("sc_alpha0_im", G::numerics, "initial Im alpha",
                         [](RunConfig& c) -> double& { return c.semiclassical.alpha0_im; }));
        t.push_back(real("sc_branch_c", G::numerics, "total pseudospin of the branch start (negative: N^2)",
                         [](RunConfig& c) -> double& { return c.semiclassical.branch_c; }));
        // io
        t.push_back(KeyDef{"output_dir", "string", "directory for CSV and metadata", G::io,
                           [](RunConfig& c, const YAML::Node& n) {
                               c.output_dir = scalar_as<std::string>("output_dir", n, "a string");
                           },
                           [](const RunConfig& c) { return fmt::format("\"{}\"", c.output_dir.string()); }});
        t.push_back(KeyDef{"cache_dir", "string", "cache directory (empty disables the cache)", G::io,
                           [](RunConfig& c, const YAML::Node& n) {
                               c.cache_dir = scalar_as<std::string>("cache_dir", n, "a string");
                           },
                           [](const RunConfig& c) { return fmt::format("\"{}\"", c.cache_dir.string()); }});
        t.push_back(integer("threads", G::io, "worker threads for sweeps",
                            [](RunConfig& c) -> int& { return c.threads; }, {1, 1024}));
        std::sort(t.begin(), t.end(), [](const KeyDef& a, const KeyDef& b) { return a.name < b.name; });
        return t;
    }();
    return table;
}

void validate(RunConfig& c, const std::set<std::string>& seen) {
    for (const char* k : {"omega_c", "omega_x", "omega_d"})
        if (!seen.contains(k)) {
            if (std::string(k) == "omega_c") c.model.omega_c = c.model.omega0;
            if (std::string(k) == "omega_x") c.model.omega_x = c.model.omega0;
            if (std::string(k) == "omega_d") c.model.omega_d = c.model.omega0;
        }
    c.spectral.omega0 = c.model.omega0;
    c.husimi.re_min = c.husimi.im_min = -c.husimi.re_max;
    c.husimi.im_max = c.husimi.re_max;
    c.husimi.n_im = c.husimi.n_re;

    if (c.sweep_key.empty() && !c.sweep_values.empty())
        throw ConfigError("key 'sweep_values': given without 'sweep_key'");
    if (!c.sweep_key.empty() && c.sweep_values.empty())
        throw ConfigError("key 'sweep_values': 'sweep_key' is set but no values were given");
    for (double v : c.sweep_values) {
        if (std::isnan(v) || v < 0 || ((c.sweep_key == "gamma") && v <= 0))
            throw ConfigError(fmt::format("key 'sweep_values': value {} out of range for '{}'", fmt_double(v),
                                          c.sweep_key));
    }
    try {
        c.model.validate();
        (void)c.space();
        c.spectral.validate();
        c.floquet.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
}

RunConfig from_node(const YAML::Node& root) {
    if (!root.IsMap()) throw ConfigError("configuration must be a mapping of key: value entries");
    const auto& table = key_table();
    RunConfig cfg;
    std::set<std::string> seen;
    for (const auto& kv : root) {
        const auto key = kv.first.as<std::string>();
        auto it = std::find_if(table.begin(), table.end(), [&](const KeyDef& d) { return d.name == key; });
        if (it == table.end()) throw ConfigError(fmt::format("unknown key '{}'", key));
        it->set(cfg, kv.second);
        seen.insert(key);
    }
    for (const char* req : {"n_emitters", "g"})
        if (!seen.contains(req)) throw ConfigError(fmt::format("missing required key '{}'", req));
    validate(cfg, seen);
    return cfg;
}

}  // namespace

std::vector<double> RunConfig::sweep_points() const {
    if (sweep_key.empty()) return {model.g};
    return sweep_values;
}

ModelParams RunConfig::model_at(double value) const {
    ModelParams p = model;
    if (sweep_key == "g" || sweep_key.empty()) p.g = value;
    if (sweep_key == "drive_amplitude") p.drive_amplitude = value;
    return p;
}

SpectralModel RunConfig::spectral_at(double value) const {
    SpectralModel s = spectral;
    if (sweep_key == "gamma") s.gamma = value;
    if (sweep_key == "temperature") s.temperature = value;
    return s;
}

semiclassical::Params RunConfig::semiclassical_params() const {
    semiclassical::Params p;
    p.n_emitters = model.n_emitters;
    p.g = model.g;
    p.drive_amplitude = model.drive_amplitude;
    p.kappa = semiclassical.kappa < 0 ? spectral.gamma : semiclassical.kappa;
    p.detuning_cavity = model.omega_c - model.omega_d;
    p.detuning_emitter = model.omega_x - model.omega_d;
    return p;
}

RunConfig parse_config_text(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.what());
    }
    if (root.IsNull()) throw ConfigError("missing required key 'n_emitters'");
    return from_node(root);
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read configuration file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string emit_canonical(const RunConfig& cfg) {
    std::string out;
    for (const auto& d : key_table()) out += d.name + ": " + d.get(cfg) + "\n";
    return out;
}

std::string config_hash(const RunConfig& cfg) {
    std::string text;
    for (const auto& d : key_table())
        if (d.group != Group::io) text += d.name + ": " + d.get(cfg) + "\n";
    return sha256_hex(text.data(), text.size());
}

std::string reference_text() {
    const RunConfig defaults;
    std::string out = "# key (type) default: description\n";
    for (const auto& d : key_table()) {
        std::string def = d.get(defaults);
        if (d.name == "n_emitters" || d.name == "g") def = "(required)";
        out += fmt::format("{} ({}) {}: {}\n", d.name, d.type, def, d.doc);
    }
    return out;
}

std::string sha256_hex(const void* data, std::size_t size) {
    unsigned char digest[SHA256_DIGEST_LENGTH];
    SHA256(static_cast<const unsigned char*>(data), size, digest);
    std::string hex;
    for (unsigned char b : digest) hex += fmt::format("{:02x}", b);
    return hex;
}

}  // namespace dicke::app
