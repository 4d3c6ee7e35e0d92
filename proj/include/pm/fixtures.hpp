#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pm/types.hpp"

namespace pm {

struct UnknownFixtureError : MarketError {
  using MarketError::MarketError;
};

/// One expectation attached to a fixture. Profiles and model indices in `args`
/// are 1-based, matching the rendered tables.
struct FixtureCheck {
  std::string kind;
  nlohmann::json args;
  double tolerance = 0.0;
  // False when the reference value is known not to follow from the fixture's
  // inputs. Such checks are expected to mismatch and are reported separately.
  bool reproducible = true;
  std::string note;
};

struct Fixture {
  std::string name;
  std::string description;
  GameSpec spec;
  std::vector<FixtureCheck> checks;
  std::vector<std::string> notes;
  nlohmann::json extra = nlohmann::json::object();  // raw inputs kept for reference
};

const std::vector<std::string>& fixture_names();

/// Throws UnknownFixtureError for names outside the registry.
Fixture builtin_fixture(const std::string& name);
GameSpec builtin_instance(const std::string& name);

nlohmann::json game_to_json(const GameSpec& spec);
GameSpec game_from_json(const nlohmann::json& j);
nlohmann::json fixture_to_json(const Fixture& fixture);
Fixture fixture_from_json(const nlohmann::json& j);

enum class CheckStatus { pass, fail, known_discrepancy, unexpected_match };
std::string to_string(CheckStatus status);

struct CheckResult {
  std::string fixture;
  std::string label;
  CheckStatus status = CheckStatus::fail;
  std::string expected;
  std::string actual;
  double tolerance = 0.0;
  std::string note;

  bool ok() const { return status == CheckStatus::pass || status == CheckStatus::known_discrepancy; }
};

/// Re-derives every expectation of a fixture from its game.
std::vector<CheckResult> verify_fixture(const Fixture& fixture);

}  // namespace pm
