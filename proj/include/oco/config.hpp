#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "oco/adversaries.hpp"
#include "oco/core.hpp"
#include "oco/harness.hpp"
#include "oco/players.hpp"

namespace oco {

// Raised for malformed configuration text. The message starts with either
// "line N:" (syntax) or the dotted path of the offending field.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Sections are kept as canonical JSON (keys sorted); two specs are equal
// when their canonical renderings are equal.
struct ExperimentSpec {
  nlohmann::json game;
  nlohmann::json player;
  nlohmann::json adversary;
  std::vector<int> horizons;
  int trials = 1;
  std::uint64_t seed = 0;
  std::string output = "out";

  bool operator==(const ExperimentSpec& other) const;
};

// Strict: unknown keys are errors (with a spelling suggestion), every
// section is built once to surface constraint violations.
ExperimentSpec parse_config(const std::string& text);

// Only the `game` section is required and only its present parts are
// checked; used by the subcommands that do not run a sweep.
nlohmann::json parse_game_config(const std::string& text);

std::string render(const ExperimentSpec& spec);

DecisionSet build_decision_set(const nlohmann::json& j, const std::string& path = "game.decisions");
OpponentSet build_opponent_set(const nlohmann::json& j, const std::string& path = "game.opponents");
LossFunction build_loss(const nlohmann::json& j, int dim_hint, const std::string& path = "game.loss");
Game build_game(const nlohmann::json& game);
std::unique_ptr<Player> build_player(const nlohmann::json& j);
std::unique_ptr<Adversary> build_adversary(const nlohmann::json& j, const Game& game);

struct RunOutcome {
  SweepResult sweep;
  std::string csv_path;
  std::string summary_path;
};

// Runs the sweep and writes <output>/trials.csv and <output>/summary.json.
// Both files are produced completely or not at all.
RunOutcome run_experiment(const ExperimentSpec& spec, int threads = 1);

// Closest candidate within edit distance 2 (ties broken by order), or "".
std::string suggest_key(const std::string& key, const std::vector<std::string>& candidates);

}  // namespace oco
