#pragma once

// LLM-as-judge scoring of coherence and persuasion on a 1-5 scale through an
// OpenAI-style chat-completion endpoint.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "clear/corpus.hpp"
#include "clear/error.hpp"

namespace clear {

enum class Dimension { coherence, persuasion };

inline std::string_view to_string(Dimension d) { return d == Dimension::coherence ? "coherence" : "persuasion"; }

inline Dimension parse_dimension(std::string_view s) {
  if (s == "coherence") return Dimension::coherence;
  if (s == "persuasion") return Dimension::persuasion;
  throw ParseError("unknown judge dimension '" + std::string(s) + "'");
}

inline constexpr std::string_view kRetrySuffix = "Respond with only the integer score.";

inline std::string build_prompt(Dimension dimension, std::string_view text) {
  static constexpr std::string_view kIntro =
      "You are a lecturer of the writing class. You are given the following proposition on a controversial topic. "
      "You need to carefully read the proposition and evaluate it based on the criteria:\n\n";
  static constexpr std::string_view kCoherenceCriteria =
      "- Clarity\n\n- Relevance\n\n- Logical consistency\n\n- Validity of reasoning\n\n";
  static constexpr std::string_view kPersuasionCriteria =
      "- Language and rhetoric\n\n- Addressing opposing viewpoints\n\n- Credibility\n\n- Overall effectiveness\n\n";
  std::string prompt(kIntro);
  prompt += dimension == Dimension::coherence ? kCoherenceCriteria : kPersuasionCriteria;
  prompt += "Now you need to assign a score for ";
  prompt += to_string(dimension);
  prompt +=
      " on a scale of 1 to 5, where 1 is the lowest and 5 is the highest based on the Evaluation Criteria. "
      "Note, you should be very strict when giving the score.";
  prompt += "\n\n";
  prompt += text;
  return prompt;
}

namespace detail {

struct IntegerToken {
  std::size_t pos;
  long value;
};

// Digit runs that are not part of a word or a decimal number.
inline std::vector<IntegerToken> standalone_integers(std::string_view s) {
  std::vector<IntegerToken> out;
  auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  auto digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
  for (std::size_t i = 0; i < s.size();) {
    if (!digit(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && digit(s[j])) ++j;
    bool left_ok = i == 0 || (!alnum(s[i - 1]) && !(s[i - 1] == '.' && i >= 2 && digit(s[i - 2])));
    bool right_ok = j == s.size() || (!alnum(s[j]) && !(s[j] == '.' && j + 1 < s.size() && digit(s[j + 1])));
    if (left_ok && right_ok && j - i <= 9) out.push_back({i, std::stol(std::string(s.substr(i, j - i)))});
    i = j;
  }
  return out;
}

}  // namespace detail

// First integer in [1,5] after the last "score" (case-insensitive), else the
// first standalone integer in [1,5] anywhere.
inline std::optional<int> parse_rating(std::string_view response) {
  auto ints = detail::standalone_integers(response);
  std::string lower(response);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  auto in_range = [](const detail::IntegerToken& t) { return t.value >= 1 && t.value <= 5; };
  if (auto at = lower.rfind("score"); at != std::string::npos) {
    for (const auto& t : ints)
      if (t.pos > at && in_range(t)) return static_cast<int>(t.value);
  }
  for (const auto& t : ints)
    if (in_range(t)) return static_cast<int>(t.value);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Transport

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  // Returns the first choice's message content; throws TransportError.
  virtual std::string complete(const std::string& user_message) = 0;
};

struct JudgeConfig {
  std::string base_url;  // e.g. http://127.0.0.1:8000/v1
  std::string model;
  std::string api_key;   // usually from CLEAR_JUDGE_API_KEY
  int retries = 3;
  int timeout_seconds = 120;
  int max_in_flight = 4;
};

class HttpChatClient final : public ChatClient {
 public:
  explicit HttpChatClient(JudgeConfig config) : config_(std::move(config)) {
    const auto& url = config_.base_url;
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ValidationError("judge URL needs a scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    origin_ = url.substr(0, path_start);
    prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }

  std::string complete(const std::string& user_message) override {
    nlohmann::json body{{"model", config_.model},
                        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", user_message}}})},
                        {"temperature", 0}};
    httplib::Client client(origin_);
    client.set_connection_timeout(config_.timeout_seconds);
    client.set_read_timeout(config_.timeout_seconds);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
    auto res = client.Post(prefix_ + "/chat/completions", headers, body.dump(), "application/json");
    if (!res) throw TransportError("judge request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw TransportError("judge endpoint returned HTTP " + std::to_string(res->status));
    try {
      auto j = nlohmann::json::parse(res->body);
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw TransportError(std::string("judge response is not a chat completion: ") + e.what());
    }
  }

 private:
  JudgeConfig config_;
  std::string origin_;
  std::string prefix_;
};

// ---------------------------------------------------------------------------
// Judging

enum class JudgeFailure { none, parse, transport };

struct JudgeResult {
  std::string pair_id;
  Side side = Side::original;
  Dimension dimension = Dimension::coherence;
  std::optional<int> score;
  std::string raw_response;
  int attempts = 0;
  JudgeFailure failure = JudgeFailure::none;
  std::string error;
};

// Never throws for judge-side problems; failures are recorded in the result.
inline JudgeResult judge_once(std::string_view text, Dimension dimension, ChatClient& client, int retries) {
  JudgeResult r;
  r.dimension = dimension;
  const std::string prompt = build_prompt(dimension, text);
  for (int attempt = 0; attempt <= std::max(retries, 0); ++attempt) {
    r.attempts = attempt + 1;
    std::string message = attempt == 0 ? prompt : prompt + "\n\n" + std::string(kRetrySuffix);
    try {
      r.raw_response = client.complete(message);
    } catch (const TransportError& e) {
      r.failure = JudgeFailure::transport;
      r.error = e.what();
      continue;
    }
    if (auto s = parse_rating(r.raw_response)) {
      r.score = *s;
      r.failure = JudgeFailure::none;
      r.error.clear();
      return r;
    }
    r.failure = JudgeFailure::parse;
    r.error = "no rating in [1,5] found in judge response";
  }
  return r;
}

// Throwing variant: TransportError or JudgeParseError after the retries.
inline JudgeResult judge(std::string_view text, Dimension dimension, ChatClient& client, int retries = 3) {
  auto r = judge_once(text, dimension, client, retries);
  if (r.failure == JudgeFailure::transport) throw TransportError(r.error);
  if (r.failure == JudgeFailure::parse) throw JudgeParseError(r.error, r.raw_response);
  return r;
}

struct JudgeRequest {
  std::string pair_id;
  Side side = Side::original;
  Dimension dimension = Dimension::coherence;
  std::string text;
};

// Runs requests on at most `max_in_flight` threads; results keep request order.
template <typename ClientFactory>
std::vector<JudgeResult> judge_batch(std::span<const JudgeRequest> requests, ClientFactory&& make_client, int retries,
                                     int max_in_flight) {
  std::vector<JudgeResult> results(requests.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    auto client = make_client();
    for (std::size_t i = next++; i < requests.size(); i = next++) {
      const auto& req = requests[i];
      results[i] = judge_once(req.text, req.dimension, *client, retries);
      results[i].pair_id = req.pair_id;
      results[i].side = req.side;
    }
  };
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(max_in_flight, 1)), requests.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return results;
}

}  // namespace clear
