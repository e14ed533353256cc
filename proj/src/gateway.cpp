#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "nckg/gateway.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace nckg {

using nlohmann::json;

HttpStatus::HttpStatus(int code, std::string body_excerpt)
    : GatewayError("HTTP " + std::to_string(code) + ": " + body_excerpt), code_(code), excerpt_(std::move(body_excerpt)) {}

MockMiss::MockMiss(std::string sha256, std::optional<TemplateId> tag)
    : GatewayError("mock script has no response for prompt_sha256 " + sha256 +
                   (tag ? " (template " + std::string(to_string(*tag)) + ")" : std::string())),
      sha_(std::move(sha256)) {}

std::string_view to_string(Role r) {
  switch (r) {
    case Role::System:
      return "system";
    case Role::User:
      return "user";
    case Role::Assistant:
      return "assistant";
  }
  return "user";
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string fingerprint(const ChatRequest& req) {
  std::string joined;
  for (std::size_t i = 0; i < req.messages.size(); ++i) {
    if (i > 0) joined += '\n';
    joined += req.messages[i].content;
  }
  return sha256_hex(joined);
}

void check_request(const ChatRequest& req) {
  if (req.messages.empty()) throw ConfigError("chat request has no messages");
  if (req.messages.front().role == Role::Assistant) {
    throw ConfigError("first chat message must come from the system or the user");
  }
  if (req.temperature < 0.0) throw ConfigError("temperature must be non-negative");
  if (req.max_tokens && *req.max_tokens <= 0) throw ConfigError("max_tokens must be positive");
}

// ---------------------------------------------------------------------------
// Mock

MockBackend::MockBackend(std::vector<Entry> entries) {
  for (auto& e : entries) {
    if (e.prompt_sha256) {
      by_sha_[*e.prompt_sha256] = e.response;
    } else if (e.template_id) {
      by_template_[*e.template_id] = e.response;
    }
  }
}

std::shared_ptr<MockBackend> MockBackend::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("mock script is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) throw ConfigError("mock script must be a JSON array");
  std::vector<Entry> entries;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("match") || !item["match"].is_object() ||
        !item.contains("response") || !item["response"].is_string()) {
      throw ConfigError("mock entry needs an object 'match' and a string 'response'");
    }
    Entry e;
    const auto& m = item["match"];
    if (m.contains("prompt_sha256")) e.prompt_sha256 = m["prompt_sha256"].get<std::string>();
    if (m.contains("template_id")) {
      const auto name = m["template_id"].get<std::string>();
      e.template_id = parse_template_id(name);
      if (!e.template_id) throw ConfigError("mock entry names unknown template " + name);
    }
    if (!e.prompt_sha256 && !e.template_id) {
      throw ConfigError("mock entry match needs prompt_sha256 or template_id");
    }
    e.response = item["response"].get<std::string>();
    entries.push_back(std::move(e));
  }
  return std::make_shared<MockBackend>(std::move(entries));
}

std::shared_ptr<MockBackend> MockBackend::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read mock script " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

ChatResponse MockBackend::complete(const ChatRequest& req) {
  check_request(req);
  calls_.fetch_add(1);
  const auto sha = fingerprint(req);
  if (auto it = by_sha_.find(sha); it != by_sha_.end()) return {it->second, "stop", {}};
  if (req.tag) {
    if (auto it = by_template_.find(*req.tag); it != by_template_.end()) return {it->second, "stop", {}};
  }
  throw MockMiss(sha, req.tag);
}

// ---------------------------------------------------------------------------
// HTTP

std::string request_to_json(const ChatRequest& req) {
  json j;
  j["model"] = req.model;
  j["messages"] = json::array();
  for (const auto& m : req.messages) {
    j["messages"].push_back({{"role", std::string(to_string(m.role))}, {"content", m.content}});
  }
  j["temperature"] = req.temperature;
  if (req.max_tokens) j["max_tokens"] = *req.max_tokens;
  return j.dump();
}

ChatResponse parse_chat_response(std::string_view body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw MalformedResponse(std::string("response is not JSON: ") + e.what());
  }
  try {
    const auto& choice = j.at("choices").at(0);
    ChatResponse r;
    const auto& content = choice.at("message").at("content");
    if (!content.is_null()) r.content = content.get<std::string>();
    if (choice.contains("finish_reason") && choice["finish_reason"].is_string()) {
      r.finish_reason = choice["finish_reason"].get<std::string>();
    }
    if (r.finish_reason == "stop" && content.is_null()) {
      throw MalformedResponse("response stopped normally but carries no content");
    }
    if (j.contains("usage") && j["usage"].is_object()) {
      r.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0);
      r.usage.completion_tokens = j["usage"].value("completion_tokens", 0);
    }
    return r;
  } catch (const json::exception& e) {
    throw MalformedResponse(std::string("unexpected response shape: ") + e.what());
  }
}

HttpBackend::HttpBackend(HttpOptions opts) : opts_(std::move(opts)) {
  const auto scheme_end = opts_.endpoint.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint must start with http:// or https://");
  const auto scheme = opts_.endpoint.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("unsupported endpoint scheme " + scheme);
  const auto path_start = opts_.endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    scheme_host_port_ = opts_.endpoint;
    path_ = "/v1/chat/completions";
  } else {
    scheme_host_port_ = opts_.endpoint.substr(0, path_start);
    path_ = opts_.endpoint.substr(path_start);
  }
  if (opts_.max_retries < 0) throw ConfigError("max_retries must be non-negative");
}

std::chrono::milliseconds HttpBackend::backoff(std::chrono::milliseconds base, int retry) {
  return base * (std::int64_t{1} << std::min(retry, 20));
}

namespace {

std::string excerpt(const std::string& body) {
  constexpr std::size_t kMax = 200;
  return body.size() <= kMax ? body : body.substr(0, kMax) + "...";
}

}  // namespace

ChatResponse HttpBackend::complete(const ChatRequest& req) {
  check_request(req);
  httplib::Client client(scheme_host_port_);
  const auto secs = static_cast<time_t>(opts_.timeout_s);
  const auto usecs = static_cast<time_t>((opts_.timeout_s - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (!opts_.api_key.empty()) headers.emplace("Authorization", "Bearer " + opts_.api_key);
  const auto payload = request_to_json(req);

  std::mt19937 rng(std::random_device{}());
  for (int attempt = 0;; ++attempt) {
    attempts_.fetch_add(1);
    auto res = client.Post(path_, headers, payload, "application/json");
    std::function<void()> give_up;
    if (!res) {
      const auto err = res.error();
      const auto what = httplib::to_string(err);
      if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
        give_up = [what] { throw Timeout("request timed out: " + what); };
      } else {
        give_up = [what] { throw TransportError("transport error: " + what); };
      }
    } else if (res->status == 429 || res->status >= 500) {
      give_up = [&res] { throw HttpStatus(res->status, excerpt(res->body)); };
    } else if (res->status < 200 || res->status >= 300) {
      throw HttpStatus(res->status, excerpt(res->body));
    } else {
      return parse_chat_response(res->body);
    }
    if (attempt >= opts_.max_retries) give_up();
    auto delay = backoff(opts_.retry_base, attempt);
    if (opts_.jitter && delay.count() > 0) {
      std::uniform_int_distribution<std::int64_t> dist(0, delay.count() / 4);
      delay += std::chrono::milliseconds(dist(rng));
    }
    std::this_thread::sleep_for(delay);
  }
}

// ---------------------------------------------------------------------------
// Gateway

Gateway::Gateway(std::shared_ptr<ChatBackend> backend, std::string model, std::size_t max_in_flight,
                 PromptLibrary prompts)
    : backend_(std::move(backend)),
      model_(std::move(model)),
      max_in_flight_(max_in_flight == 0 ? 1 : max_in_flight),
      prompts_(std::move(prompts)) {}

std::unique_ptr<Gateway> Gateway::from_config(const GatewayConfig& cfg,
                             const std::function<const char*(const char*)>& getenv) {
  auto prompts = cfg.prompt_dir ? PromptLibrary::from_directory(*cfg.prompt_dir) : PromptLibrary::builtin();
  if (cfg.backend == BackendKind::Mock) {
    if (cfg.mock_script.empty()) throw ConfigError("mock backend needs a script file");
    auto mock = MockBackend::from_file(cfg.mock_script);
    return std::make_unique<Gateway>(std::move(mock), cfg.model, cfg.max_in_flight, std::move(prompts));
  }
  if (cfg.endpoint.empty()) throw ConfigError("http backend needs an endpoint");
  if (cfg.api_key_env.empty()) throw ConfigError("http backend needs an API key variable name");
  const char* key = getenv ? getenv(cfg.api_key_env.c_str()) : std::getenv(cfg.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw ConfigError("environment variable " + cfg.api_key_env + " is not set; the http backend needs an API key");
  }
  HttpOptions opts;
  opts.endpoint = cfg.endpoint;
  opts.api_key = key;
  opts.timeout_s = cfg.timeout_s;
  opts.max_retries = cfg.max_retries;
  opts.retry_base = cfg.retry_base;
  return std::make_unique<Gateway>(std::make_shared<HttpBackend>(std::move(opts)), cfg.model, cfg.max_in_flight,
                                   std::move(prompts));
}

ChatResponse Gateway::complete(const ChatRequest& req) {
  {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [this] { return in_flight_ < max_in_flight_; });
    ++in_flight_;
    auto peak = peak_.load();
    while (in_flight_ > peak && !peak_.compare_exchange_weak(peak, in_flight_)) {
    }
  }
  struct Release {
    Gateway* g;
    ~Release() {
      {
        std::lock_guard lock(g->mu_);
        --g->in_flight_;
      }
      g->cv_.notify_one();
    }
  } release{this};
  return backend_->complete(req);
}

std::string Gateway::ask(TemplateId id, const Slots& slots) {
  ChatRequest req;
  req.model = model_;
  req.messages.push_back({Role::User, prompts_.render(id, slots)});
  req.temperature = 0.0;
  req.tag = id;
  return complete(req).content;
}

std::vector<std::string> parse_term_list(std::string_view content) {
  std::vector<std::string> terms;
  std::size_t start = 0;
  for (;;) {
    auto end = content.find(',', start);
    auto piece = content.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    auto is_trim = [](char c) {
      return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '"' || c == '\'' || c == '.';
    };
    while (!piece.empty() && is_trim(piece.front())) piece.remove_prefix(1);
    while (!piece.empty() && is_trim(piece.back())) piece.remove_suffix(1);
    terms.emplace_back(piece);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  if (terms.size() != 2 || terms[0].empty() || terms[1].empty()) {
    throw TermCountMismatch("expected exactly two comma-separated terms, got " + std::to_string(terms.size()) +
                            " in \"" + std::string(content) + "\"");
  }
  return terms;
}

}  // namespace nckg
