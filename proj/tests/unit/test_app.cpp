#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dicke/app/commands.hpp"

using namespace dicke;
using namespace dicke::app;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("dicke-test-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

const char* kSmall = R"(n_emitters: 1
g: 0.1
drive_amplitude: 0.05
gamma: 0.05
photon_cutoff: 4
n_steps: 64
nu_max: 12
max_periods: 40
n_samples: 2
)";

RunConfig small_config(const fs::path& dir, const std::string& extra = "") {
    RunConfig cfg = parse_config_text(std::string(kSmall) + extra);
    cfg.output_dir = dir / "out";
    cfg.cache_dir = dir / "cache";
    return cfg;
}

PointData small_point() {
    const RunConfig cfg = parse_config_text(kSmall);
    PointData d;
    d.basis = build_floquet_basis(cfg.model, cfg.space(), cfg.floquet);
    d.dissipator = assemble_dissipator(d.basis, build_coupling_channels(cfg.space()), cfg.spectral);
    return d;
}

}  // namespace

TEST_CASE("minimal configuration and defaults") {
    const RunConfig cfg = parse_config_text("n_emitters: 2\ng: 0.3\n");
    CHECK(cfg.model.n_emitters == 2);
    CHECK(cfg.model.g == 0.3);
    CHECK(cfg.model.omega_c == cfg.model.omega0);
    CHECK(cfg.model.omega_d == cfg.model.omega0);
    CHECK(cfg.model.drive_amplitude == 0.0);
    CHECK(cfg.photon_cutoff == 12);
    CHECK(cfg.n_samples == 200);
    CHECK(cfg.sweep_points() == std::vector<double>{0.3});
}

TEST_CASE("configuration errors name the key") {
    auto message = [](const std::string& text) {
        try {
            parse_config_text(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message("n_emitters: 1\ng: 0.1\ngama: 0.1\n").find("gama") != std::string::npos);
    CHECK(message("n_emitters: 1\n").find("'g'") != std::string::npos);
    CHECK(message("n_emitters: 1\ng: abc\n").find("'g'") != std::string::npos);
    CHECK(message("n_emitters: 9\ng: 0.1\n").find("n_emitters") != std::string::npos);
    CHECK(message("n_emitters: 1\ng: 0.1\nphoton_cutoff: 0\n").find("photon_cutoff") != std::string::npos);
    CHECK(message("n_emitters: 1\ng: 0.1\npair_kind: sobol\n").find("pair_kind") != std::string::npos);
    CHECK(message("n_emitters: 1\ng: 0.1\nsweep_key: omega0\n").find("sweep_key") != std::string::npos);
    CHECK(message("n_emitters: 1\ng: 0.1\nn_steps: 100\n").find("n_steps") != std::string::npos);
}

TEST_CASE("canonical form and hash") {
    const RunConfig a = parse_config_text(kSmall);
    const std::string canon = emit_canonical(a);
    const RunConfig b = parse_config_text(canon);
    CHECK(emit_canonical(b) == canon);
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 64);

    RunConfig c = a;
    c.threads = 4;
    c.output_dir = "elsewhere";
    CHECK(config_hash(c) == config_hash(a));
    c.model.g = 0.1000000001;
    CHECK(config_hash(c) != config_hash(a));

    // key order in the file does not matter
    const RunConfig d = parse_config_text("g: 0.1\nn_samples: 2\nphoton_cutoff: 4\nn_emitters: 1\ndrive_amplitude: "
                                          "0.05\nmax_periods: 40\nnu_max: 12\nn_steps: 64\ngamma: 0.05\n");
    CHECK(config_hash(d) == config_hash(a));
    CHECK(sha256_hex("abc", 3) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("sweeps") {
    const RunConfig cfg = parse_config_text("n_emitters: 1\ng: 0.1\nsweep_key: temperature\nsweep_values: [0.1, 0.2]\n");
    CHECK(cfg.sweep_points() == std::vector<double>{0.1, 0.2});
    CHECK(cfg.spectral_at(0.2).temperature == 0.2);
    CHECK(cfg.model_at(0.2).g == 0.1);
    const RunConfig om = parse_config_text("n_emitters: 1\ng: 0.1\nsweep_key: drive_amplitude\nsweep_values: [0.3]\n");
    CHECK(om.model_at(0.3).drive_amplitude == 0.3);
}

TEST_CASE("CSV formatting") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678901234567})
        CHECK(std::stod(fmt_real(v)) == v);
    CsvTable t({"a", "b"});
    t.add_row({"1", "2"});
    CHECK_THROWS(t.add_row({"1"}));
    CHECK(t.render() == "a,b\n1,2\n");
}

TEST_CASE("parallel_for visits every index once") {
    for (int threads : {1, 2, 5}) {
        std::vector<std::atomic<int>> hits(37);
        parallel_for(hits.size(), threads, [&](std::size_t i) { ++hits[i]; });
        for (const auto& h : hits) CHECK(h.load() == 1);
    }
    CHECK_THROWS_AS(parallel_for(10, 3,
                                 [](std::size_t i) {
                                     if (i == 7) throw NumericalError("boom");
                                 }),
                    NumericalError);
}

TEST_CASE("cache container round trip") {
    const PointData d = small_point();
    const std::string bytes = encode_point(d);
    REQUIRE(bytes.substr(0, 8) == "DICKEBIN");
    const auto back = decode_point(bytes);
    REQUIRE(back);
    CHECK(back->basis.energies == d.basis.energies);
    CHECK(back->basis.nu_max == d.basis.nu_max);
    for (std::size_t k = 0; k < d.basis.fourier.size(); ++k) CHECK(back->basis.fourier[k] == d.basis.fourier[k]);
    CHECK(back->dissipator.rates == d.dissipator.rates);
    CHECK(back->dissipator.coherence == d.dissipator.coherence);
    CHECK(encode_point(*back) == bytes);

    // the cached basis reproduces W and Z exactly
    const RunConfig cfg = parse_config_text(kSmall);
    const DissipatorData again = assemble_dissipator(back->basis, build_coupling_channels(cfg.space()), cfg.spectral);
    CHECK(again.rates == d.dissipator.rates);
    CHECK(again.coherence == d.dissipator.coherence);

    std::string other_version = bytes;
    other_version[8] = static_cast<char>(kCacheVersion + 1);
    CHECK_FALSE(decode_point(other_version).has_value());

    std::string flipped = bytes;
    flipped[100] ^= 0x01;
    CHECK_THROWS_AS(decode_point(flipped), CacheCorruption);
    CHECK_THROWS_AS(decode_point(bytes.substr(0, bytes.size() / 2)), CacheCorruption);
    CHECK_THROWS_AS(decode_point("NOTDICKE" + bytes.substr(8)), CacheCorruption);
}

TEST_CASE("cache directory") {
    const fs::path dir = scratch("cache");
    const Cache cache(dir);
    const PointData d = small_point();
    CHECK_FALSE(cache.load("k1").has_value());
    cache.store("k1", d);
    const auto hit = cache.load("k1");
    REQUIRE(hit);
    CHECK(hit->dissipator.rates == d.dissipator.rates);

    std::string bytes = slurp(cache.path_for("k1"));
    bytes[bytes.size() - 70] ^= 0x04;
    std::ofstream(cache.path_for("k1"), std::ios::binary) << bytes;
    CHECK_THROWS_AS(cache.load("k1"), CacheCorruption);

    const Cache off("");
    CHECK_FALSE(off.enabled());
    off.store("k1", d);
    CHECK_FALSE(off.load("k1").has_value());

    const RunConfig cfg = parse_config_text(kSmall);
    RunConfig moved = cfg;
    moved.model.g = 0.2;
    CHECK(point_key(cfg.model, cfg.space(), cfg.floquet, cfg.spectral, false) !=
          point_key(moved.model, cfg.space(), cfg.floquet, cfg.spectral, false));
    CHECK(point_key(cfg.model, cfg.space(), cfg.floquet, cfg.spectral, false) !=
          point_key(cfg.model, cfg.space(), cfg.floquet, cfg.spectral, true));
}

TEST_CASE("nonmark at zero coupling") {
    const fs::path dir = scratch("nonmark0");
    const RunConfig cfg = small_config(dir, "sweep_key: g\nsweep_values: [0.0]\ndrive_amplitude: 0.0\n");
    const CommandResult r = run_command("nonmark", cfg);
    CHECK(r.exit_code == kSuccess);
    const auto rows = read_csv(r.csv);
    REQUIRE(rows.size() == 1 + 3);
    CHECK(rows[0] == std::vector<std::string>{"g", "omega", "N_value", "pair_kind", "seed", "converged"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::stod(rows[i][2]) <= 1e-10);
        CHECK(rows[i][5] == "1");
    }
    const auto meta = nlohmann::json::parse(slurp(r.csv.string() + ".meta.json"));
    CHECK(meta["command"] == "nonmark");
    CHECK(meta["config_hash"] == config_hash(cfg));
    CHECK(meta["rows"] == 3);
}

TEST_CASE("deltan output is ascending and reproducible") {
    const fs::path dir = scratch("deltan");
    RunConfig cfg = small_config(dir, "sweep_key: g\nsweep_values: [0.05, 0.0, 0.02, 0.05]\nn_samples: 1\n");
    const CommandResult first = run_command("deltan", cfg);
    const std::string bytes = slurp(first.csv);
    const auto rows = read_csv(first.csv);
    REQUIRE(rows.size() == 4);
    CHECK(std::stod(rows[1][0]) == 0.0);
    CHECK(std::stod(rows[2][0]) == 0.02);
    CHECK(std::stod(rows[3][0]) == 0.05);
    CHECK(std::stod(rows[1][1]) <= 1e-10);

    // second run: cache hits and a second thread count give the same bytes
    cfg.threads = 2;
    const CommandResult second = run_command("deltan", cfg);
    CHECK(slurp(second.csv) == bytes);
    cfg.cache_dir = "";
    cfg.output_dir = dir / "nocache";
    CHECK(slurp(run_command("deltan", cfg).csv) == bytes);

    RunConfig undriven = small_config(dir, "drive_amplitude: 0.0\n");
    CHECK_THROWS_AS(run_command("deltan", undriven), ConfigError);
}

TEST_CASE("other commands write their schemas") {
    const fs::path dir = scratch("schemas");
    const RunConfig cfg = small_config(dir, "husimi_points: 11\nsc_periods: 5\nsc_steps_per_period: 64\nsc_sample_every: 64\n");
    CHECK(read_csv(run_command("spectrum", cfg).csv)[0] == std::vector<std::string>{"g", "level_index", "energy"});
    const auto fl = read_csv(run_command("floquet", cfg).csv);
    CHECK(fl[0].size() == 6);
    CHECK(fl.size() == 1 + 10);
    const auto hu = read_csv(run_command("husimi", cfg).csv);
    CHECK(hu.size() == 1 + 121);
    const auto sc = read_csv(run_command("semiclassical", cfg).csv);
    CHECK(sc[0].front() == "t");
    CHECK(sc[0].back() == "C");
    CHECK(sc.size() == 1 + 6);
    CHECK_THROWS_AS(run_command("bogus", cfg), ConfigError);
}
