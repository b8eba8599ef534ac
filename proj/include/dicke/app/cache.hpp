#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "dicke/dissipator.hpp"

namespace dicke::app {

/// A cache file whose checksum or structure does not verify.
class CacheCorruption : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PointData {
    FloquetBasis basis;
    DissipatorData dissipator;
};

inline constexpr std::uint32_t kCacheVersion = 1;

/// Container layout, all integers and doubles little-endian:
///   "DICKEBIN" | u32 version | u64 payload size | payload | hex SHA-256(payload)
std::string encode_point(const PointData& data);
/// Throws CacheCorruption; returns nullopt on a version mismatch.
std::optional<PointData> decode_point(const std::string& bytes);

/// Identifies the inputs of one FloquetBasis + DissipatorData computation.
std::string point_key(const ModelParams& p, const SpaceConfig& space, const FloquetNumerics& num,
                      const SpectralModel& s, bool force_driven);

class Cache {
public:
    /// An empty directory disables the cache.
    explicit Cache(std::filesystem::path dir);

    bool enabled() const { return !dir_.empty(); }
    std::filesystem::path path_for(const std::string& key) const;

    /// nullopt on a miss or a version mismatch; throws CacheCorruption.
    std::optional<PointData> load(const std::string& key) const;
    /// Atomic write (temporary file, then rename).
    void store(const std::string& key, const PointData& data) const;

private:
    std::filesystem::path dir_;
};

/// Writes `content` to `path` through a temporary file and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace dicke::app
