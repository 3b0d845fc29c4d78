#include "todsim/remote.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "httplib.h"
#include "todsim/errors.hpp"

namespace todsim {
namespace {

constexpr int kMaxTokensCeiling = 4096;

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool retryable_status(int status) {
  return status == 408 || status == 429 || status >= 500;
}

}  // namespace

void validate_params(const GenerationParams& params) {
  if (params.temperature < 0.0 || params.temperature > 2.0) {
    throw Error("InvalidParams", "temperature must be in [0, 2]");
  }
  if (params.max_tokens <= 0 || params.max_tokens > kMaxTokensCeiling) {
    throw Error("InvalidParams",
                "max_tokens must be in (0, " + std::to_string(kMaxTokensCeiling) + "]");
  }
}

// Counting gate bounding the number of in-flight requests.
struct RemoteClient::Gate {
  explicit Gate(int limit) : slots(limit > 0 ? limit : 1) {}

  void acquire() {
    std::unique_lock lock(mutex);
    ready.wait(lock, [this] { return slots > 0; });
    --slots;
  }
  void release() {
    {
      std::lock_guard lock(mutex);
      ++slots;
    }
    ready.notify_one();
  }

  std::mutex mutex;
  std::condition_variable ready;
  int slots;
};

RemoteClient::RemoteClient(EndpointConfig config)
    : config_(std::move(config)), gate_(std::make_unique<Gate>(config_.concurrency)) {}

RemoteClient::~RemoteClient() = default;

GenerationResult RemoteClient::generate(const std::string& prompt,
                                        const GenerationParams& params) {
  if (config_.base_url.empty()) throw Error("InvalidConfig", "endpoint base URL not set");
  if (prompt.empty()) throw Error("InvalidParams", "prompt must be non-empty");
  validate_params(params);

  nlohmann::json body;
  body["model"] = params.model_id;
  body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", prompt}}});
  body["temperature"] = params.temperature;
  body["max_tokens"] = params.max_tokens;
  if (!params.stop_sequences.empty()) body["stop"] = params.stop_sequences;
  const std::string payload = body.dump();

  const char* api_key =
      config_.api_key_env.empty() ? nullptr : std::getenv(config_.api_key_env.c_str());

  const auto log = [this, &prompt](int attempt, int status, const std::string& response) {
    if (config_.request_log_path.empty()) return;
    nlohmann::json entry;
    entry["timestamp"] = iso_timestamp();
    entry["attempt"] = attempt;
    entry["status"] = status;
    entry["prompt"] = prompt;
    entry["response"] = response;
    std::lock_guard lock(log_mutex_);
    std::ofstream out(config_.request_log_path, std::ios::app);
    out << entry.dump() << '\n';
  };

  gate_->acquire();
  struct Release {
    Gate* gate;
    ~Release() { gate->release(); }
  } release{gate_.get()};

  std::string last_failure = "no attempts made";
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      const double delay_ms = config_.backoff_base_ms * static_cast<double>(1 << (attempt - 1));
      std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(delay_ms));
    }

    httplib::Client client(config_.base_url);
    client.set_connection_timeout(std::chrono::duration<double>(config_.timeout_seconds));
    client.set_read_timeout(std::chrono::duration<double>(config_.timeout_seconds));
    httplib::Headers headers;
    if (api_key != nullptr) headers.emplace("Authorization", std::string("Bearer ") + api_key);

    auto result = client.Post("/v1/chat/completions", headers, payload, "application/json");
    if (!result) {
      last_failure = "transport: " + httplib::to_string(result.error());
      log(attempt, 0, last_failure);
      continue;
    }
    log(attempt, result->status, result->body);
    if (result->status == 401 || result->status == 403) {
      throw AuthError("endpoint returned HTTP " + std::to_string(result->status));
    }
    if (retryable_status(result->status)) {
      last_failure = "HTTP " + std::to_string(result->status);
      continue;
    }
    if (result->status != 200) {
      throw TransportError("unexpected HTTP " + std::to_string(result->status));
    }

    std::string text;
    try {
      const auto parsed = nlohmann::json::parse(result->body);
      text = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& ex) {
      throw TransportError(std::string("malformed response: ") + ex.what());
    }
    if (text.empty()) throw ModelRefusal();
    return GenerationResult{std::move(text), attempt};
  }
  throw TransportError("retries exhausted; last failure: " + last_failure);
}

RemoteEmbeddingProvider::RemoteEmbeddingProvider(EndpointConfig config, std::string model_id,
                                                 std::size_t dimension)
    : config_(std::move(config)), model_id_(std::move(model_id)), dimension_(dimension) {}

std::vector<double> RemoteEmbeddingProvider::embed(const std::string& text) const {
  nlohmann::json body;
  body["model"] = model_id_;
  body["input"] = text;

  httplib::Client client(config_.base_url);
  client.set_connection_timeout(std::chrono::duration<double>(config_.timeout_seconds));
  client.set_read_timeout(std::chrono::duration<double>(config_.timeout_seconds));
  httplib::Headers headers;
  const char* api_key =
      config_.api_key_env.empty() ? nullptr : std::getenv(config_.api_key_env.c_str());
  if (api_key != nullptr) headers.emplace("Authorization", std::string("Bearer ") + api_key);

  auto result = client.Post("/v1/embeddings", headers, body.dump(), "application/json");
  if (!result || result->status != 200) {
    throw ProviderFailure(result ? "HTTP " + std::to_string(result->status)
                                 : "transport: " + httplib::to_string(result.error()));
  }
  try {
    const auto parsed = nlohmann::json::parse(result->body);
    auto vec = parsed.at("data").at(0).at("embedding").get<std::vector<double>>();
    if (vec.size() != dimension_) {
      throw ProviderFailure("embedding dimension mismatch: got " + std::to_string(vec.size()));
    }
    return vec;
  } catch (const nlohmann::json::exception& ex) {
    throw ProviderFailure(std::string("malformed embedding response: ") + ex.what());
  }
}

}  // namespace todsim
