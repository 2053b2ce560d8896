#include "fdesim/leader_dynamics.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include "parallel.hpp"

namespace fdesim {

std::string to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::Post: return "post";
    case ActionKind::Comment: return "comment";
    case ActionKind::Repost: return "repost";
  }
  return "post";
}

std::optional<ActionKind> parse_action_kind(std::string_view text) {
  std::string lower;
  for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "post") return ActionKind::Post;
  if (lower == "comment") return ActionKind::Comment;
  if (lower == "repost") return ActionKind::Repost;
  return std::nullopt;
}

OpinionValue fuse_opinion(double ca_value, DiscreteAttitude oracle_value, double alpha) {
  return clip(alpha * ca_value + (1.0 - alpha) * to_real(oracle_value));
}

DiscreteAttitude bucket_attitude(OpinionValue fused) {
  const double v = fused.value();
  if (v > 1.0 / 3.0) return DiscreteAttitude::Support;
  if (v < -1.0 / 3.0) return DiscreteAttitude::Oppose;
  return DiscreteAttitude::Neutral;
}

ScriptedOracle::ScriptedOracle(std::vector<ScheduleSegment> schedule) : schedule_(std::move(schedule)) {
  if (schedule_.empty()) throw ConfigError("scripted schedule is empty");
  for (std::size_t i = 0; i < schedule_.size(); ++i) {
    const auto& s = schedule_[i];
    if (s.first_round < 0) throw ConfigError("schedule rounds must be >= 0");
    if (s.last_round && *s.last_round < s.first_round)
      throw ConfigError("schedule segment ends before it starts");
    if (i + 1 < schedule_.size()) {
      if (!s.last_round || *s.last_round >= schedule_[i + 1].first_round)
        throw ConfigError("schedule segments must be ordered and non-overlapping");
    }
  }
}

DiscreteAttitude ScriptedOracle::attitude_at(int round) const {
  for (const auto& s : schedule_) {
    if (round >= s.first_round && (!s.last_round || round <= *s.last_round)) return s.attitude;
  }
  throw ConfigError("round " + std::to_string(round) + " is outside the scripted schedule");
}

bool ScriptedOracle::covers(int first_round, int last_round) const {
  int next = first_round;
  for (const auto& s : schedule_) {
    if (next > last_round) break;
    if (s.first_round > next) return false;
    if (!s.last_round) return true;
    next = std::max(next, *s.last_round + 1);
  }
  return next > last_round;
}

ActionOutcome ScriptedOracle::act(const ActionRequest& request) {
  const DiscreteAttitude stance = attitude_at(request.round);
  ActionKind kind = ActionKind::Post;
  if (!request.news && !request.visible.empty()) kind = ActionKind::Comment;
  LeaderAction action{request.profile.id, request.round, kind,
                      "agent " + std::to_string(request.profile.id) + " asserts stance " + to_string(stance)};
  return {std::move(action), {}, {}};
}

ScoreOutcome ScriptedOracle::score(const LeaderAction& action, std::string_view) {
  return {attitude_at(action.round), {}, {}};
}

std::string ScriptedOracle::digest() const {
  std::string out = "scripted";
  for (const auto& s : schedule_) {
    out += ";" + std::to_string(s.first_round) + "-" + (s.last_round ? std::to_string(*s.last_round) : "") +
           ":" + to_string(s.attitude);
  }
  return out;
}

ActionOutcome CountingOracle::act(const ActionRequest& request) {
  ++act_calls_;
  return inner_.act(request);
}

ScoreOutcome CountingOracle::score(const LeaderAction& action, std::string_view event_context) {
  ++score_calls_;
  return inner_.score(action, event_context);
}

LeaderPopulation make_leader_population(OpinionGrid opinions, std::span<const std::string> personas) {
  LeaderPopulation pop;
  pop.profiles.resize(static_cast<std::size_t>(opinions.size()));
  std::size_t next_persona = 0;
  for (int i = 0; i < opinions.size(); ++i) {
    auto& profile = pop.profiles[static_cast<std::size_t>(i)];
    profile.id = i;
    profile.current_attitude = bucket_attitude(opinions[i]);
    if (!opinions.active(i)) continue;
    if (personas.empty()) {
      profile.persona = kDefaultPersona;
    } else {
      profile.persona = personas[next_persona++ % personas.size()];
    }
    if (profile.persona.empty()) throw ConfigError("leader persona text must not be empty");
  }
  pop.opinions = std::move(opinions);
  return pop;
}

namespace {

int grid_distance(GridShape shape, int a, int b, Neighborhood nb) {
  int dr = std::abs(a / shape.cols - b / shape.cols);
  int dc = std::abs(a % shape.cols - b % shape.cols);
  if (nb.boundary == Boundary::Toroidal) {
    dr = std::min(dr, shape.rows - dr);
    dc = std::min(dc, shape.cols - dc);
  }
  return std::max(dr, dc);
}

}  // namespace

std::vector<LeaderAction> visible_actions(const LeaderPopulation& pop, int cell, double epsilon,
                                          int limit, Neighborhood nb) {
  const double own = pop.opinions[cell].value();
  std::vector<const LeaderAction*> candidates;
  for (const auto& a : pop.recent) {
    if (a.author == cell || a.author < 0 || a.author >= pop.opinions.size()) continue;
    if (!pop.opinions.active(a.author)) continue;
    if (std::abs(pop.opinions[a.author].value() - own) > epsilon) continue;
    candidates.push_back(&a);
  }
  const GridShape shape = pop.opinions.shape();
  std::stable_sort(candidates.begin(), candidates.end(), [&](const LeaderAction* x, const LeaderAction* y) {
    if (x->round != y->round) return x->round > y->round;
    const int dx = grid_distance(shape, cell, x->author, nb);
    const int dy = grid_distance(shape, cell, y->author, nb);
    if (dx != dy) return dx < dy;
    return x->author < y->author;
  });
  if (static_cast<int>(candidates.size()) > limit) candidates.resize(static_cast<std::size_t>(std::max(limit, 0)));

  std::vector<LeaderAction> out;
  out.reserve(candidates.size());
  for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) out.push_back(**it);
  return out;
}

LeaderRoundResult step_leaders(const LeaderPopulation& pop, AttitudeOracle& oracle,
                               const NewsTimeline& timeline, const SimulationParams& p, int round,
                               const LeaderStepOptions& options) {
  const NewsEvent* news = timeline.event_at(round);
  const std::string& event_context = timeline.latest_at(round).text;
  const Grid<double> ca = step_leader_grid(pop.opinions, p, options.neighborhood);

  std::vector<int> cells;
  for (int i = 0; i < pop.opinions.size(); ++i) {
    if (pop.opinions.active(i)) cells.push_back(i);
  }

  std::vector<ActionRecord> records(cells.size());
  detail::parallel_for(static_cast<int>(cells.size()), oracle.max_parallelism(), [&](int k) {
    const int cell = cells[static_cast<std::size_t>(k)];
    const auto visible = visible_actions(pop, cell, p.epsilon(), options.context_window, options.neighborhood);
    const ActionRequest request{pop.profiles[static_cast<std::size_t>(cell)], visible, news, round};
    try {
      ActionOutcome acted = oracle.act(request);
      acted.action.author = cell;
      acted.action.round = round;
      ScoreOutcome scored = oracle.score(acted.action, event_context);

      auto& rec = records[static_cast<std::size_t>(k)];
      rec.scored = scored.attitude;
      rec.opinion = fuse_opinion(ca[cell], scored.attitude, p.alpha());
      if (news) rec.news = news->text;
      rec.action_prompt = std::move(acted.prompt);
      rec.action_response = std::move(acted.raw_response);
      rec.attitude_prompt = std::move(scored.prompt);
      rec.attitude_response = std::move(scored.raw_response);
      rec.action = std::move(acted.action);
    } catch (const OracleSemanticError& e) {
      if (e.agent()) throw;
      throw OracleSemanticError(e.what(), e.raw_response(), cell);
    }
  });

  LeaderRoundResult result;
  result.next.opinions = pop.opinions;
  result.next.profiles = pop.profiles;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const int cell = cells[k];
    result.next.opinions[cell] = records[k].opinion;
    result.next.profiles[static_cast<std::size_t>(cell)].current_attitude = bucket_attitude(records[k].opinion);
  }

  // Only actions from the last `context_window` rounds can ever be visible.
  const int oldest_kept = round - options.context_window + 1;
  for (const auto& a : pop.recent) {
    if (a.round >= oldest_kept) result.next.recent.push_back(a);
  }
  if (options.context_window > 0) {
    for (const auto& rec : records) result.next.recent.push_back(rec.action);
  }
  result.actions = std::move(records);
  return result;
}

}  // namespace fdesim
