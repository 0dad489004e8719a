#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <string>

#include "tribound/oracle.hpp"

namespace tribound {

struct RemoteOptions {
  std::string base_url;  ///< scheme://host:port[/prefix]
  std::size_t n_classes = 0;
  std::size_t input_dim = 0;
  std::size_t batch_limit = 256;
  std::chrono::milliseconds timeout{30000};
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
};

/// Hard-label HTTP backend.
///
/// Request:  POST {base_url}/v1/predict
///           {"shape":[B,d],"data":[B*d numbers, row-major]}
/// Response: HTTP 200, {"labels":[B integers]}
///
/// Batches larger than `batch_limit` are split. Each request is tried up to
/// `attempts` times with exponential backoff; anything but a well-formed 200
/// response after the last attempt raises TransportError. Not thread-safe on
/// its own: load_oracle() wraps it in a SerializingOracle.
class RemoteOracle final : public Oracle {
 public:
  explicit RemoteOracle(RemoteOptions options);
  ~RemoteOracle() override;

  std::size_t n_classes() const override { return options_.n_classes; }
  std::size_t input_dim() const override { return options_.input_dim; }
  void predict_rows(std::span<const double> rows,
                    std::span<ClassId> out) const override;

  /// Throws BackendUnavailable when no HTTP server answers at base_url.
  void probe() const;

  const RemoteOptions& options() const { return options_; }

 private:
  struct Impl;
  RemoteOptions options_;
  std::unique_ptr<Impl> impl_;
};

/// JSON request body for one batch, floats in shortest round-trip form.
std::string encode_predict_request(std::span<const double> rows,
                                   std::size_t batch, std::size_t dim);

/// Parses a response body; throws TransportError unless it holds exactly
/// `batch` labels in [0, n_classes).
std::vector<ClassId> decode_predict_response(const std::string& body,
                                             std::size_t batch,
                                             std::size_t n_classes);

}  // namespace tribound
