#include "fdesim/llm_client.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace fdesim {

using json = nlohmann::json;

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) { return !std::isspace(static_cast<unsigned char>(c)); };
  auto b = std::find_if(s.begin(), s.end(), not_space);
  auto e = std::find_if(s.rbegin(), s.rend(), not_space).base();
  return b < e ? std::string_view(&*b, static_cast<std::size_t>(e - b)) : std::string_view{};
}

std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw ConfigError("endpoint must be an absolute URL: " + url);
  const auto path = url.find('/', scheme + 3);
  if (path == std::string::npos) return {url, "/"};
  return {url.substr(0, path), url.substr(path)};
}

std::string format_temperature(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", t);
  return buf;
}

const char* attitude_label(DiscreteAttitude a) {
  switch (a) {
    case DiscreteAttitude::Oppose: return "oppose";
    case DiscreteAttitude::Neutral: return "neutral";
    case DiscreteAttitude::Support: return "support";
  }
  return "neutral";
}

class HttplibTransport : public HttpTransport {
 public:
  HttpResponse post(const std::string& url, const std::string& body,
                    const std::vector<std::pair<std::string, std::string>>& headers,
                    std::chrono::milliseconds timeout) override {
    const auto [base, path] = split_url(url);
    httplib::Client client(base);
    const auto secs = static_cast<time_t>(timeout.count() / 1000);
    const auto usecs = static_cast<time_t>((timeout.count() % 1000) * 1000);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = client.Post(path, h, body, "application/json");
    if (!res) throw OracleTransportError("request to " + base + " failed: " + httplib::to_string(res.error()));
    return {res->status, res->body};
  }
};

}  // namespace

void validate(const ProviderConfig& cfg) {
  std::vector<std::string> problems;
  if (cfg.endpoint.rfind("http://", 0) != 0 && cfg.endpoint.rfind("https://", 0) != 0)
    problems.push_back("endpoint must start with http:// or https://");
  if (cfg.model.empty()) problems.push_back("model must not be empty");
  if (cfg.token_env.empty()) problems.push_back("token_env must name an environment variable");
  if (cfg.timeout.count() <= 0) problems.push_back("timeout must be > 0");
  if (cfg.max_retries < 0) problems.push_back("max_retries must be >= 0");
  if (cfg.max_concurrency < 1) problems.push_back("max_concurrency must be >= 1");
  if (cfg.backoff.count() < 0) problems.push_back("backoff must be >= 0");
  if (!problems.empty()) {
    std::string msg = "invalid provider config:";
    for (const auto& p : problems) msg += " " + p + ";";
    msg.pop_back();
    throw ConfigError(msg);
  }
}

std::string resolve_token(const ProviderConfig& cfg) {
  const char* value = std::getenv(cfg.token_env.c_str());
  if (!value || !*value) throw ConfigError("environment variable " + cfg.token_env + " is not set");
  return value;
}

std::unique_ptr<HttpTransport> make_http_transport() { return std::make_unique<HttplibTransport>(); }

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

LlmClient::LlmClient(ProviderConfig cfg, std::string token, std::unique_ptr<HttpTransport> transport)
    : cfg_(std::move(cfg)), token_(std::move(token)), transport_(std::move(transport)) {
  validate(cfg_);
  if (!transport_) throw ConfigError("LlmClient needs a transport");
}

std::string LlmClient::cache_key(std::string_view prompt, double temperature) const {
  std::string material = cfg_.model;
  material += '\n';
  material += format_temperature(temperature);
  material += '\n';
  material += prompt;
  return sha256_hex(material);
}

std::optional<std::string> LlmClient::cache_lookup(const std::string& key, std::string_view prompt) const {
  const auto path = cfg_.cache_dir / (key + ".json");
  std::lock_guard lock(cache_mutex_);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    const json entry = json::parse(in);
    if (entry.at("model").get<std::string>() != cfg_.model || entry.at("prompt").get<std::string>() != prompt)
      return std::nullopt;
    return entry.at("response").get<std::string>();
  } catch (const json::exception&) {
    return std::nullopt;  // unreadable entry: refetch and overwrite
  }
}

void LlmClient::cache_store(const std::string& key, std::string_view prompt, double temperature,
                            const std::string& response) {
  const json entry = {{"model", cfg_.model},
                      {"temperature", temperature},
                      {"prompt", std::string(prompt)},
                      {"response", response}};
  std::lock_guard lock(cache_mutex_);
  std::filesystem::create_directories(cfg_.cache_dir);
  const auto final_path = cfg_.cache_dir / (key + ".json");
  const auto tmp_path = cfg_.cache_dir / (key + ".json.tmp");
  {
    std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write cache entry " + tmp_path.string());
    out << entry.dump(2) << '\n';
  }
  std::filesystem::rename(tmp_path, final_path);
}

std::string LlmClient::request_once(std::string_view prompt, double temperature) {
  const json body = {{"model", cfg_.model},
                     {"temperature", temperature},
                     {"messages", json::array({{{"role", "user"}, {"content", std::string(prompt)}}})}};
  const std::vector<std::pair<std::string, std::string>> headers = {
      {"Authorization", "Bearer " + token_}};

  std::optional<OracleTransportError> last;
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(cfg_.backoff * (1LL << std::min(attempt - 1, 16)));

    HttpResponse res;
    try {
      ++network_calls_;
      res = transport_->post(cfg_.endpoint, body.dump(), headers, cfg_.timeout);
    } catch (const OracleTransportError& e) {
      last = e;
      continue;
    }

    if (res.status >= 200 && res.status < 300) {
      try {
        const json parsed = json::parse(res.body);
        return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const json::exception& e) {
        throw OracleTransportError(std::string("malformed completion body: ") + e.what(), res.status);
      }
    }
    if (res.status == 429 || res.status >= 500) {
      last = OracleTransportError("endpoint returned HTTP " + std::to_string(res.status), res.status);
      continue;
    }
    throw OracleTransportError("endpoint returned HTTP " + std::to_string(res.status), res.status);
  }
  throw OracleTransportError("retries exhausted after " + std::to_string(cfg_.max_retries + 1) +
                                 " attempts: " + (last ? last->what() : "no response"),
                             last ? last->status() : std::nullopt);
}

std::string LlmClient::complete(std::string_view prompt, double temperature) {
  const std::string key = cache_key(prompt, temperature);
  {
    std::lock_guard lock(cache_mutex_);
    keys_used_.insert(key);
  }
  if (auto hit = cache_lookup(key, prompt)) {
    ++cache_hits_;
    return *hit;
  }

  {
    std::unique_lock lock(slots_mutex_);
    slots_cv_.wait(lock, [&] { return slots_in_use_ < cfg_.max_concurrency; });
    ++slots_in_use_;
  }
  std::string response;
  try {
    response = request_once(prompt, temperature);
  } catch (...) {
    {
      std::lock_guard lock(slots_mutex_);
      --slots_in_use_;
    }
    slots_cv_.notify_one();
    throw;
  }
  {
    std::lock_guard lock(slots_mutex_);
    --slots_in_use_;
  }
  slots_cv_.notify_one();

  cache_store(key, prompt, temperature, response);
  return response;
}

std::string LlmClient::cache_digest() const {
  std::lock_guard lock(cache_mutex_);
  std::string joined;
  for (const auto& k : keys_used_) {
    joined += k;
    joined += '\n';
  }
  return sha256_hex(joined);
}

// Prompt wording is our own reconstruction of the agent-profile layout; the
// original prompts were not published.
std::string render_action_prompt(const LeaderProfile& profile, std::span<const LeaderAction> visible,
                                 const std::optional<std::string>& news, int limit) {
  std::ostringstream p;
  p << "You are role-playing an opinion leader on a microblogging platform.\n\n"
    << "Profile: " << profile.persona << "\n"
    << "Your current attitude toward the event: " << to_string(profile.current_attitude) << " ("
    << attitude_label(profile.current_attitude) << ").\n"
    << "Keep your action consistent with your current attitude unless new information gives you "
       "a strong reason to change it.\n";

  if (news) p << "\n[Breaking news]\n" << *news << "\n";

  p << "\n[Recent posts from accounts like yours]\n";
  const std::size_t keep = std::min(visible.size(), static_cast<std::size_t>(std::max(limit, 0)));
  if (keep == 0) p << "(none)\n";
  for (std::size_t i = visible.size() - keep; i < visible.size(); ++i) {
    const auto& a = visible[i];
    p << "- agent " << a.author << " (" << to_string(a.kind) << ", round " << a.round << "): " << a.text << "\n";
  }

  p << "\nExamples:\n"
    << "News: A vocational-school student places 12th in an international math contest.\n"
    << "ACTION: post\n"
    << "TEXT: Talent comes from everywhere! This is the most inspiring thing I've read all year.\n\n"
    << "News: Police say the viral subway-assault video left out who started the fight.\n"
    << "ACTION: repost\n"
    << "TEXT: So the 'victim' threw the first insult. Wait for the facts before you pile on.\n\n"
    << "Choose one action (post, comment or repost) and write its content.\n"
    << "Answer with exactly two lines:\n"
    << "ACTION: <post|comment|repost>\n"
    << "TEXT: <content>\n";
  return p.str();
}

std::string render_attitude_prompt(const LeaderAction& action, std::string_view event_context) {
  if (trim(event_context).empty()) throw ConfigError("attitude scoring needs a non-empty event context");
  if (trim(action.text).empty()) throw ConfigError("attitude scoring needs a non-empty action text");
  std::ostringstream p;
  p << "Rate the attitude a social media message expresses toward an event.\n\n"
    << "Event: " << event_context << "\n"
    << "Message (" << to_string(action.kind) << " by agent " << action.author << "): " << action.text << "\n\n"
    << "Choose exactly one of three values:\n"
    << "1 = supports the claim in the event\n"
    << "0 = neutral or undecided\n"
    << "-1 = opposes the claim (supports the opposing side)\n\n"
    << "Reply with a single line:\n"
    << "ATTITUDE: <1|0|-1>\n";
  return p.str();
}

namespace {

std::optional<DiscreteAttitude> first_level_token(std::string_view s) {
  const auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i > 0) {
      const char prev = s[i - 1];
      if (is_word(prev) || prev == '.' || prev == '+' || prev == '-') continue;
    }
    std::size_t j = i;
    int sign = 1;
    if (s[j] == '+' || s[j] == '-') {
      sign = s[j] == '-' ? -1 : 1;
      ++j;
    }
    if (j >= s.size() || (s[j] != '0' && s[j] != '1')) continue;
    const std::size_t after = j + 1;
    if (after < s.size()) {
      if (is_word(s[after])) continue;
      if (s[after] == '.' && after + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[after + 1])))
        continue;
    }
    return attitude_from_int(sign * (s[j] - '0'));
  }
  return std::nullopt;
}

}  // namespace

DiscreteAttitude parse_attitude(std::string_view raw) {
  const std::string lower = lowercase(raw);
  constexpr std::string_view marker = "attitude:";
  for (auto pos = lower.find(marker); pos != std::string::npos; pos = lower.find(marker, pos + 1)) {
    const auto start = pos + marker.size();
    const auto end = std::min(lower.find('\n', start), lower.size());
    if (auto level = first_level_token(std::string_view(raw).substr(start, end - start))) return *level;
  }
  throw OracleSemanticError("no attitude in {-1, 0, 1} on an ATTITUDE: line", std::string(raw));
}

LeaderAction parse_action(std::string_view raw, AgentId author, int round) {
  const std::string lower = lowercase(raw);
  const auto kind_pos = lower.find("action:");
  if (kind_pos == std::string::npos)
    throw OracleSemanticError("response has no ACTION: line", std::string(raw));

  const auto line_end = std::min(lower.find('\n', kind_pos), lower.size());
  std::string word;
  for (char c : std::string_view(lower).substr(kind_pos + 7, line_end - kind_pos - 7)) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      word.push_back(c);
    } else if (!word.empty()) {
      break;
    }
  }
  const auto kind = parse_action_kind(word);
  if (!kind) throw OracleSemanticError("unknown action kind '" + word + "'", std::string(raw));

  std::string_view text = trim(raw);
  if (const auto text_pos = lower.find("text:"); text_pos != std::string::npos)
    text = trim(raw.substr(text_pos + 5));
  if (text.empty()) throw OracleSemanticError("response has an empty action text", std::string(raw));
  return {author, round, *kind, std::string(text)};
}

ActionOutcome LlmOracle::act(const ActionRequest& request) {
  std::optional<std::string> news;
  if (request.news) news = request.news->text;
  std::string prompt = render_action_prompt(request.profile, request.visible, news, context_window_);
  std::string raw = client_.complete(prompt, client_.config().action_temperature);
  LeaderAction action = parse_action(raw, request.profile.id, request.round);
  return {std::move(action), std::move(prompt), std::move(raw)};
}

ScoreOutcome LlmOracle::score(const LeaderAction& action, std::string_view event_context) {
  std::string prompt = render_attitude_prompt(action, event_context);
  std::string raw = client_.complete(prompt, client_.config().temperature);
  const DiscreteAttitude attitude = parse_attitude(raw);
  return {attitude, std::move(prompt), std::move(raw)};
}

std::string LlmOracle::digest() const {
  return "live:" + client_.config().model + ":" + client_.cache_digest();
}

}  // namespace fdesim
