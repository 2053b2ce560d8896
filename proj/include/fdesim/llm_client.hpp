#pragma once

// Attitude oracle backed by a remote chat-completion endpoint: prompt
// templates, answer parsing, retrying transport and an on-disk response cache.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fdesim/leader_dynamics.hpp"

namespace fdesim {

struct ProviderConfig {
  std::string endpoint;  // full URL of the chat-completions resource
  std::string model;
  std::string token_env = "FDESIM_API_KEY";
  std::chrono::milliseconds timeout{30000};
  int max_retries = 3;
  int max_concurrency = 4;
  double temperature = 0.0;         // attitude scoring
  double action_temperature = 0.3;  // action generation
  std::chrono::milliseconds backoff{500};
  std::filesystem::path cache_dir = ".fdesim-cache";
};

/// Throws ConfigError unless timeout > 0, max_retries >= 0, concurrency >= 1
/// and the endpoint is an http(s) URL.
void validate(const ProviderConfig& cfg);

/// Reads the token from the environment variable named in the config.
/// Throws ConfigError if it is unset or empty.
std::string resolve_token(const ProviderConfig& cfg);

struct HttpResponse {
  int status = 0;
  std::string body;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  /// Throws OracleTransportError when no response was received.
  virtual HttpResponse post(const std::string& url, const std::string& body,
                            const std::vector<std::pair<std::string, std::string>>& headers,
                            std::chrono::milliseconds timeout) = 0;
};

/// cpp-httplib transport (http and https).
std::unique_ptr<HttpTransport> make_http_transport();

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

class LlmClient {
 public:
  LlmClient(ProviderConfig cfg, std::string token,
            std::unique_ptr<HttpTransport> transport = make_http_transport());

  /// Cached chat completion. Cache entries are keyed by (model, temperature,
  /// prompt); a hit makes no network call. Misses make at most
  /// 1 + max_retries attempts with exponential backoff, retrying on transport
  /// errors, 429 and 5xx. Throws OracleTransportError when attempts run out
  /// or the endpoint answers with a non-retryable status.
  std::string complete(std::string_view prompt, double temperature);
  std::string complete(std::string_view prompt) { return complete(prompt, cfg_.temperature); }

  const ProviderConfig& config() const noexcept { return cfg_; }
  long network_calls() const noexcept { return network_calls_.load(); }
  long cache_hits() const noexcept { return cache_hits_.load(); }

  /// Hash over the sorted cache keys this client has served so far.
  std::string cache_digest() const;

 private:
  std::string cache_key(std::string_view prompt, double temperature) const;
  std::optional<std::string> cache_lookup(const std::string& key, std::string_view prompt) const;
  void cache_store(const std::string& key, std::string_view prompt, double temperature,
                   const std::string& response);
  std::string request_once(std::string_view prompt, double temperature);

  ProviderConfig cfg_;
  std::string token_;
  std::unique_ptr<HttpTransport> transport_;

  std::atomic<long> network_calls_{0};
  std::atomic<long> cache_hits_{0};

  mutable std::mutex cache_mutex_;
  std::set<std::string> keys_used_;

  std::mutex slots_mutex_;
  std::condition_variable slots_cv_;
  int slots_in_use_ = 0;
};

inline constexpr int kDefaultContextWindow = 5;

/// Action prompt: persona, current attitude, pending news (verbatim), the
/// `limit` most recent visible actions and few-shot examples. The answer
/// format is "ACTION: <post|comment|repost>" and "TEXT: <content>".
std::string render_action_prompt(const LeaderProfile& profile, std::span<const LeaderAction> visible,
                                 const std::optional<std::string>& news, int limit = kDefaultContextWindow);

/// Attitude prompt: a forced choice among -1, 0 and 1 with an
/// "ATTITUDE: <value>" answer line. Throws ConfigError if the event context
/// or the action text is empty.
std::string render_attitude_prompt(const LeaderAction& action, std::string_view event_context);

/// First standalone -1, 0 or 1 after the "ATTITUDE:" marker.
/// Throws OracleSemanticError carrying the raw text otherwise.
DiscreteAttitude parse_attitude(std::string_view raw);

/// Reads "ACTION:" and "TEXT:" lines. Without a TEXT line the whole response
/// is the text. Throws OracleSemanticError for a missing or unknown kind.
LeaderAction parse_action(std::string_view raw, AgentId author, int round);

class LlmOracle : public AttitudeOracle {
 public:
  explicit LlmOracle(LlmClient& client, int context_window = kDefaultContextWindow)
      : client_(client), context_window_(context_window) {}

  ActionOutcome act(const ActionRequest& request) override;
  ScoreOutcome score(const LeaderAction& action, std::string_view event_context) override;
  std::string digest() const override;
  int max_parallelism() const override { return client_.config().max_concurrency; }

 private:
  LlmClient& client_;
  int context_window_;
};

}  // namespace fdesim
