#pragma once

// Comparison models run under the shared harness: pure CA, Hegselmann-Krause
// bounded confidence, and oracle-only leaders.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fdesim/core.hpp"

namespace fdesim {

struct ScenarioConfig;

enum class BaselineKind { PureCA, HK, OracleOnly };

std::string to_string(BaselineKind kind);
/// Accepts "pure-ca", "hk", "oracle-only" (underscores also accepted).
/// Throws ConfigError for anything else.
BaselineKind parse_baseline_kind(std::string_view name);

/// Mean of every opinion within epsilon of o_i. `all_opinions` must contain
/// o_i, so the confidence set is never empty. Summation runs over the sorted
/// values, so the result does not depend on agent order.
OpinionValue hk_update(OpinionValue o_i, std::span<const OpinionValue> all_opinions, double epsilon);

/// One synchronous HK step over a pooled population.
std::vector<OpinionValue> hk_step(std::span<const OpinionValue> opinions, double epsilon);

/// Runs `kind` on the scenario's parameters, timeline, seed and oracle.
/// PureCA: leader CA + clip, followers without decay.
/// HK: leaders and followers pooled under hk_update.
/// OracleOnly: leaders take the oracle attitude (alpha = 0); each follower
/// copies the mean of its coupled leaders.
Trajectory run_baseline(BaselineKind kind, const ScenarioConfig& scenario);

}  // namespace fdesim
