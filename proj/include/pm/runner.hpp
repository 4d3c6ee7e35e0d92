#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pm/entry.hpp"
#include "pm/types.hpp"

namespace pm {

/// Configuration problem, anchored to a line of the source text when known.
struct ConfigError : MarketError {
  ConfigError(const std::string& origin, std::size_t line, const std::string& what)
      : MarketError(origin + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line(line) {}
  std::size_t line;
};

struct RunConfig {
  enum class Source { builtin, inline_game, synthetic };
  Source source = Source::builtin;
  std::string builtin_name;
  nlohmann::json game;  // inline game description
  double synthetic_shift = 0.0;
  double synthetic_major_weight = 0.6;
  std::uint64_t synthetic_seed = 7;
  std::optional<std::size_t> n_platforms;
  std::optional<ChoiceRule> choice;

  std::vector<PlatformIndex> order;  // 0-based; empty means round-robin
  std::optional<StrategyProfile> start;
  std::size_t max_steps = 100'000;

  std::string sweep_axis;  // models | platforms | population
  std::vector<nlohmann::json> sweep_values;
  std::size_t repetitions = 1;
  std::vector<std::uint64_t> seeds;

  std::string training_method = "both";  // resampling | direct_gradient | both
  nlohmann::json training_instance = "toy";
  TrainingConfig resampling = TrainingConfig::resampling_defaults();
  TrainingConfig direct = TrainingConfig::direct_gradient_defaults();

  std::string out_dir;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

/// Parses JSON config text. `origin` names the source in error messages.
RunConfig parse_config(const std::string& text, const std::string& origin = "config");
RunConfig load_config(const std::string& path);

/// Game described by the instance/choice blocks.
GameSpec build_instance(const RunConfig& config);

/// Default output directory: $PMARKET_OUT, else "out".
std::string default_out_dir();

/// Uniform start profile over M^N drawn from `seed`.
StrategyProfile seeded_start(const GameSpec& spec, std::uint64_t seed);

int cmd_run(const RunConfig& config, std::ostream& log);
int cmd_sweep(const RunConfig& config, std::ostream& log);
int cmd_entry(const RunConfig& config, std::ostream& log);

struct VerifyOptions {
  std::string fixtures_dir;  // empty: builtin registry
  std::vector<std::string> only;
  bool strict = false;  // count known discrepancies as failures
};

/// Exit status 0 when every check passes, 1 on mismatch, 2 on configuration errors.
int cmd_verify_fixtures(const VerifyOptions& options, std::ostream& out);
int cmd_list_fixtures(const std::string& export_dir, std::ostream& out);

}  // namespace pm
