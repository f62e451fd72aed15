#pragma once

// Command-line driver. `run` is the whole CLI, usable in-process.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "camcue/plucker.hpp"
#include "camcue/pose_net.hpp"
#include "camcue/trainer.hpp"
#include "camcue/view_selection.hpp"

namespace camcue::cli {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitInputError = 2 };

struct RunConfig {
  std::uint64_t seed = 0;
  std::optional<int> threads;
  SelectionConfig selection;
  PatchConfig patch;
  AdapterConfig adapter;
  LossConfig loss;
  TrainConfig train;
  // Optional default paths; command-line flags win.
  std::optional<std::string> scene_dir, out, pred, gt;

  void validate() const;
};

// Throws Error(ConfigError) on unknown keys or wrong types.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

// Flag > config > CAMCUE_THREADS > hardware concurrency.
int resolve_threads(std::optional<int> flag, const RunConfig& cfg);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace camcue::cli
