#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "todsim/metrics.hpp"

namespace todsim {

struct GenerationParams {
  double temperature = 0.9;
  int max_tokens = 256;
  std::vector<std::string> stop_sequences;
  std::string model_id = "default";
};

// Validates the parameter ranges (temperature in [0,2], max_tokens bounded).
void validate_params(const GenerationParams& params);

struct EndpointConfig {
  std::string base_url;                            // e.g. http://localhost:8080
  std::string api_key_env = "TODSIM_API_KEY";      // name of the env var, never the key
  double timeout_seconds = 30.0;
  int max_retries = 3;
  int concurrency = 4;                             // in-flight request ceiling
  double backoff_base_ms = 250.0;
  std::string request_log_path;                    // JSONL log; empty disables
};

struct GenerationResult {
  std::string text;
  int retries = 0;
};

// Chat-completions client: one user-role message per request, first choice's
// message content as the reply. Retries transient failures with exponential
// backoff; authorization failures are never retried.
class RemoteClient {
 public:
  explicit RemoteClient(EndpointConfig config);
  ~RemoteClient();

  RemoteClient(const RemoteClient&) = delete;
  RemoteClient& operator=(const RemoteClient&) = delete;

  GenerationResult generate(const std::string& prompt, const GenerationParams& params);

  const EndpointConfig& config() const { return config_; }

 private:
  struct Gate;
  EndpointConfig config_;
  std::unique_ptr<Gate> gate_;
  std::mutex log_mutex_;
};

// Embedding endpoint as an optional provider behind the metrics interface.
class RemoteEmbeddingProvider : public EmbeddingProvider {
 public:
  RemoteEmbeddingProvider(EndpointConfig config, std::string model_id, std::size_t dimension);
  std::size_t dimension() const override { return dimension_; }
  std::vector<double> embed(const std::string& text) const override;

 private:
  EndpointConfig config_;
  std::string model_id_;
  std::size_t dimension_;
};

}  // namespace todsim
