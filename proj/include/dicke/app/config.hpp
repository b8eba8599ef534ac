#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "dicke/measures.hpp"
#include "dicke/semiclassical.hpp"

namespace dicke::app {

/// Bad, missing or out-of-range configuration entry. The message names the key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SemiclassicalSettings {
    double kappa = -1.0;  // negative: use gamma
    double periods = 1000.0;
    int steps_per_period = 256;
    int sample_every = 256;
    std::string initial = "ground";  // ground | excited | branch
    double alpha0_re = 0.0;
    double alpha0_im = 0.0;
    double branch_c = -1.0;  // negative: N^2
};

struct RunConfig {
    ModelParams model;
    int photon_cutoff = 12;
    SpectralModel spectral;
    FloquetNumerics floquet;
    GridSpec grid;
    bool force_driven = false;

    int n_samples = 200;
    std::uint64_t seed = 1;
    PairKind pair_kind = PairKind::random_pure;

    std::string sweep_key;  // empty: single point
    std::vector<double> sweep_values;

    HusimiGrid husimi;
    SemiclassicalSettings semiclassical;

    std::filesystem::path output_dir = "out";
    std::filesystem::path cache_dir = ".dicke-cache";
    int threads = 1;

    SpaceConfig space() const { return SpaceConfig(photon_cutoff, model.n_emitters); }
    /// Values of the swept key, or the configured value of g for a single point.
    std::vector<double> sweep_points() const;
    /// Model parameters with the swept key set to `value`.
    ModelParams model_at(double value) const;
    SpectralModel spectral_at(double value) const;
    semiclassical::Params semiclassical_params() const;
};

RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text);

/// Every key in sorted order, doubles with 17 significant digits.
std::string emit_canonical(const RunConfig& cfg);
/// SHA-256 of the canonical physics and numerics keys (paths and threads excluded).
std::string config_hash(const RunConfig& cfg);
/// Key reference with types, defaults and descriptions.
std::string reference_text();

std::string sha256_hex(const void* data, std::size_t size);

}  // namespace dicke::app
