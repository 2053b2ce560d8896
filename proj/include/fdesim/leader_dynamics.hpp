#pragma once

// Opinion leaders: the attitude-oracle contract, CA/oracle fusion and the
// per-round leader update.

#include <atomic>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fdesim/ca_engine.hpp"
#include "fdesim/core.hpp"

namespace fdesim {

using AgentId = int;

struct LeaderProfile {
  AgentId id = 0;
  std::string persona;
  DiscreteAttitude current_attitude = DiscreteAttitude::Neutral;
};

enum class ActionKind { Post, Comment, Repost };

std::string to_string(ActionKind kind);
/// Case-insensitive "post" / "comment" / "repost".
std::optional<ActionKind> parse_action_kind(std::string_view text);

struct LeaderAction {
  AgentId author = 0;
  int round = 0;
  ActionKind kind = ActionKind::Post;
  std::string text;

  friend bool operator==(const LeaderAction&, const LeaderAction&) = default;
};

struct ActionRequest {
  const LeaderProfile& profile;
  std::span<const LeaderAction> visible;
  const NewsEvent* news;  // pending offline news, if any
  int round;
};

/// The prompt/response fields are empty for oracles that have none.
struct ActionOutcome {
  LeaderAction action;
  std::string prompt;
  std::string raw_response;
};

struct ScoreOutcome {
  DiscreteAttitude attitude = DiscreteAttitude::Neutral;
  std::string prompt;
  std::string raw_response;
};

/// Produces a leader's action, then scores that action to an attitude.
/// Implementations must be safe to call concurrently for different agents.
/// Unreachable backends throw OracleTransportError; answers that are not a
/// legal attitude throw OracleSemanticError.
class AttitudeOracle {
 public:
  virtual ~AttitudeOracle() = default;

  virtual ActionOutcome act(const ActionRequest& request) = 0;
  virtual ScoreOutcome score(const LeaderAction& action, std::string_view event_context) = 0;

  /// Stable identifier of the oracle's configuration, recorded in manifests.
  virtual std::string digest() const = 0;

  virtual int max_parallelism() const { return 1; }
};

/// clip(alpha * ca_value + (1 - alpha) * oracle_value).
OpinionValue fuse_opinion(double ca_value, DiscreteAttitude oracle_value, double alpha);

/// +1 above 1/3, -1 below -1/3, 0 otherwise.
DiscreteAttitude bucket_attitude(OpinionValue fused);

/// Inclusive round range; an empty `last_round` is open-ended.
struct ScheduleSegment {
  int first_round = 0;
  std::optional<int> last_round;
  DiscreteAttitude attitude = DiscreteAttitude::Neutral;
};

/// Deterministic stand-in for the language model: the attitude is read from a
/// round schedule and the action text is a fixed template.
class ScriptedOracle : public AttitudeOracle {
 public:
  /// Segments must be ordered and non-overlapping. Throws ConfigError.
  explicit ScriptedOracle(std::vector<ScheduleSegment> schedule);

  /// Throws ConfigError for rounds no segment covers.
  DiscreteAttitude attitude_at(int round) const;
  bool covers(int first_round, int last_round) const;

  ActionOutcome act(const ActionRequest& request) override;
  ScoreOutcome score(const LeaderAction& action, std::string_view event_context) override;
  std::string digest() const override;
  int max_parallelism() const override { return 4; }

  std::span<const ScheduleSegment> schedule() const noexcept { return schedule_; }

 private:
  std::vector<ScheduleSegment> schedule_;
};

/// Wraps another oracle and counts calls.
class CountingOracle : public AttitudeOracle {
 public:
  explicit CountingOracle(AttitudeOracle& inner) : inner_(inner) {}

  ActionOutcome act(const ActionRequest& request) override;
  ScoreOutcome score(const LeaderAction& action, std::string_view event_context) override;
  std::string digest() const override { return inner_.digest(); }
  int max_parallelism() const override { return inner_.max_parallelism(); }

  long act_calls() const noexcept { return act_calls_.load(); }
  long score_calls() const noexcept { return score_calls_.load(); }

 private:
  AttitudeOracle& inner_;
  std::atomic<long> act_calls_{0};
  std::atomic<long> score_calls_{0};
};

/// Leader opinions plus per-cell profiles and the actions of the last few
/// rounds (enough to fill any leader's visible context).
struct LeaderPopulation {
  OpinionGrid opinions;
  std::vector<LeaderProfile> profiles;  // indexed by cell
  std::vector<LeaderAction> recent;
};

inline constexpr const char* kDefaultPersona =
    "Talkative, provocative commentator with a large following. Amplifies the "
    "story, exaggerates for effect, and rarely stays neutral.";

/// Profiles are assigned personas round-robin; attitudes start from the
/// bucketed initial opinions.
LeaderPopulation make_leader_population(OpinionGrid opinions, std::span<const std::string> personas = {});

struct LeaderStepOptions {
  Neighborhood neighborhood;
  int context_window = 5;
};

/// What one leader did in one round, for the action log.
struct ActionRecord {
  LeaderAction action;
  DiscreteAttitude scored = DiscreteAttitude::Neutral;
  OpinionValue opinion;  // fused value after this round
  std::optional<std::string> news;
  std::string action_prompt;
  std::string action_response;
  std::string attitude_prompt;
  std::string attitude_response;
};

struct LeaderRoundResult {
  LeaderPopulation next;
  std::vector<ActionRecord> actions;  // ordered by agent id
};

/// Actions a leader may read: other leaders' recent actions whose author sits
/// within epsilon of this leader's opinion. Keeps the `limit` most recent
/// (closer authors first within a round), returned oldest first.
std::vector<LeaderAction> visible_actions(const LeaderPopulation& pop, int cell, double epsilon,
                                          int limit, Neighborhood nb);

/// One leader round: oracle action, oracle attitude, CA step, fusion.
/// Exactly two oracle calls per active leader. Throws OracleTransportError
/// untouched and OracleSemanticError tagged with the agent id.
LeaderRoundResult step_leaders(const LeaderPopulation& pop, AttitudeOracle& oracle,
                               const NewsTimeline& timeline, const SimulationParams& p, int round,
                               const LeaderStepOptions& options = {});

}  // namespace fdesim
