#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dicke/app/cache.hpp"
#include "dicke/app/config.hpp"
#include "dicke/app/output.hpp"

namespace dicke::app {

enum ExitCode : int { kSuccess = 0, kFailure = 1, kConfigError = 2, kConvergenceFailure = 3, kCacheCorruption = 4 };

const std::vector<std::string>& command_names();

/// Floquet basis and dissipator for one parameter point, from the cache when possible.
PointData compute_point(const ModelParams& p, const SpaceConfig& space, const RunConfig& cfg, const SpectralModel& s,
                        const Cache& cache);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Every index is
/// processed exactly once; the first exception is rethrown after all workers stop.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

struct CommandResult {
    int exit_code = kSuccess;
    std::filesystem::path csv;
    CsvTable table{{}};
    RunMeta meta;
};

/// Computes and writes the artifacts of `name`. Throws ConfigError and
/// CacheCorruption; numerical failures propagate as NumericalError.
CommandResult run_command(const std::string& name, const RunConfig& cfg);

}  // namespace dicke::app
