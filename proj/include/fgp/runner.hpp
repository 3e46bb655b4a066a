#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "fgp/config.hpp"

namespace fgp {

inline constexpr const char* kLibraryVersion = "fgp 0.1.0";

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 2 validation failure, 3 numerical failure
  std::string message;
};

// Executes the experiment described by the config, writing results.csv,
// manifest.txt and plot-data files into output_dir. Partial outputs are
// removed on failure.
RunOutcome run_experiment(const Config& cfg, const std::string& output_dir,
                          std::optional<std::uint64_t> seed_override = {});

RunOutcome run_experiment_file(const std::string& config_path,
                               const std::string& output_dir,
                               std::optional<std::uint64_t> seed_override = {});

}  // namespace fgp
