#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nckg/prompts.hpp"

namespace nckg {

class GatewayError : public Error {
 public:
  using Error::Error;
};

class Timeout : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

class TransportError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

class HttpStatus : public GatewayError {
 public:
  HttpStatus(int code, std::string body_excerpt);
  int code() const { return code_; }
  const std::string& body_excerpt() const { return excerpt_; }

 private:
  int code_;
  std::string excerpt_;
};

class MalformedResponse : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

class MockMiss : public GatewayError {
 public:
  MockMiss(std::string sha256, std::optional<TemplateId> tag);
  const std::string& sha256() const { return sha_; }

 private:
  std::string sha_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class TermCountMismatch : public Error {
 public:
  using Error::Error;
};

enum class Role { System, User, Assistant };

std::string_view to_string(Role r);

struct ChatMessage {
  Role role = Role::User;
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  std::optional<int> max_tokens;
  /// Template the prompt was rendered from; used by mock lookup, never sent.
  std::optional<TemplateId> tag;
};

struct Usage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

struct ChatResponse {
  std::string content;
  std::string finish_reason;
  Usage usage;
};

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Stable request hash: SHA-256 of the message contents joined by '\n'.
std::string fingerprint(const ChatRequest& req);

/// Throws ConfigError when the request shape is invalid.
void check_request(const ChatRequest& req);

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatResponse complete(const ChatRequest& req) = 0;
};

/// Scripted responses: JSON list of {"match": {"prompt_sha256"|"template_id"}, "response"}.
/// A hash match wins over a template match; anything else is a MockMiss.
class MockBackend : public ChatBackend {
 public:
  struct Entry {
    std::optional<std::string> prompt_sha256;
    std::optional<TemplateId> template_id;
    std::string response;
  };

  explicit MockBackend(std::vector<Entry> entries);
  static std::shared_ptr<MockBackend> from_json(std::string_view text);
  static std::shared_ptr<MockBackend> from_file(const std::filesystem::path& path);

  ChatResponse complete(const ChatRequest& req) override;
  std::size_t calls() const { return calls_.load(); }

 private:
  std::map<std::string, std::string> by_sha_;
  std::map<TemplateId, std::string> by_template_;
  std::atomic<std::size_t> calls_{0};
};

struct HttpOptions {
  std::string endpoint;  // scheme://host[:port][/path]; path defaults to /v1/chat/completions
  std::string api_key;
  double timeout_s = 60.0;
  int max_retries = 3;
  std::chrono::milliseconds retry_base{1000};
  bool jitter = true;
};

/// Chat-completions client. Retries transport errors, 429 and 5xx with
/// exponential backoff (base * 2^attempt, plus up to 25% jitter).
class HttpBackend : public ChatBackend {
 public:
  explicit HttpBackend(HttpOptions opts);
  ChatResponse complete(const ChatRequest& req) override;

  /// Total HTTP attempts made, retries included.
  std::size_t attempts() const { return attempts_.load(); }

  /// Delay before retry number `retry` (0-based), without jitter.
  static std::chrono::milliseconds backoff(std::chrono::milliseconds base, int retry);

 private:
  HttpOptions opts_;
  std::string scheme_host_port_;
  std::string path_;
  std::atomic<std::size_t> attempts_{0};
};

std::string request_to_json(const ChatRequest& req);
ChatResponse parse_chat_response(std::string_view body);

enum class BackendKind { Http, Mock };

struct GatewayConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string api_key_env = "NCKG_API_KEY";
  std::string model = "gpt-4o";
  double timeout_s = 60.0;
  int max_retries = 3;
  BackendKind backend = BackendKind::Mock;
  std::filesystem::path mock_script;
  std::size_t max_in_flight = 4;
  std::chrono::milliseconds retry_base{1000};
  std::optional<std::filesystem::path> prompt_dir;
};

/// Renders templates and forwards requests to a backend, capping concurrent calls.
class Gateway {
 public:
  Gateway(std::shared_ptr<ChatBackend> backend, std::string model, std::size_t max_in_flight = 4,
          PromptLibrary prompts = PromptLibrary::builtin());

  /// Resolves the backend; the Http backend needs the key variable to be set.
  /// `getenv` is injectable for tests.
  static std::unique_ptr<Gateway> from_config(const GatewayConfig& cfg,
                                              const std::function<const char*(const char*)>& getenv = nullptr);

  ChatResponse complete(const ChatRequest& req);

  /// Renders `id` with `slots`, sends it as one user message at temperature 0,
  /// and returns the response content.
  std::string ask(TemplateId id, const Slots& slots);

  const PromptLibrary& prompts() const { return prompts_; }
  const std::string& model() const { return model_; }
  ChatBackend& backend() { return *backend_; }
  std::size_t max_in_flight() const { return max_in_flight_; }
  /// Highest number of simultaneous backend calls observed.
  std::size_t peak_in_flight() const { return peak_.load(); }

 private:
  std::shared_ptr<ChatBackend> backend_;
  std::string model_;
  std::size_t max_in_flight_;
  PromptLibrary prompts_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::size_t in_flight_ = 0;
  std::atomic<std::size_t> peak_{0};
};

/// Splits "a, b" into exactly two trimmed, unquoted, non-empty terms.
std::vector<std::string> parse_term_list(std::string_view content);

}  // namespace nckg
