#include "tribound/remote_oracle.hpp"

#include <algorithm>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "tribound/error.hpp"

namespace tribound {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host:port
  std::string prefix;  // path without trailing slash
};

SplitUrl split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw ConfigError("remote url must include a scheme: " + url);
  }
  const auto path = url.find('/', scheme + 3);
  SplitUrl out;
  out.origin = url.substr(0, path);
  if (path != std::string::npos) out.prefix = url.substr(path);
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

}  // namespace

struct RemoteOracle::Impl {
  SplitUrl url;
  httplib::Client client;

  explicit Impl(const RemoteOptions& o)
      : url(split_url(o.base_url)), client(url.origin) {
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(o.timeout);
    const auto usecs =
        std::chrono::duration_cast<std::chrono::microseconds>(o.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
  }
};

RemoteOracle::RemoteOracle(RemoteOptions options)
    : options_(std::move(options)) {
  if (options_.n_classes == 0 || options_.input_dim == 0) {
    throw ConfigError("remote oracle needs n_classes and input_dim");
  }
  if (options_.batch_limit == 0) throw ConfigError("batch limit must be > 0");
  if (options_.attempts < 1) throw ConfigError("attempts must be >= 1");
  impl_ = std::make_unique<Impl>(options_);
}

RemoteOracle::~RemoteOracle() = default;

void RemoteOracle::probe() const {
  auto res = impl_->client.Get(impl_->url.prefix.empty() ? "/" : impl_->url.prefix);
  if (!res) {
    throw BackendUnavailable("no HTTP server at " + options_.base_url + " (" +
                             httplib::to_string(res.error()) + ")");
  }
}

std::string encode_predict_request(std::span<const double> rows,
                                   std::size_t batch, std::size_t dim) {
  nlohmann::json body;
  body["shape"] = {batch, dim};
  body["data"] = std::vector<double>(rows.begin(), rows.begin() + batch * dim);
  return body.dump();
}

std::vector<ClassId> decode_predict_response(const std::string& body,
                                             std::size_t batch,
                                             std::size_t n_classes) {
  nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("labels") ||
      !j["labels"].is_array()) {
    throw TransportError("malformed predict response");
  }
  const auto& labels = j["labels"];
  if (labels.size() != batch) {
    throw TransportError("expected " + std::to_string(batch) + " labels, got " +
                         std::to_string(labels.size()));
  }
  std::vector<ClassId> out;
  out.reserve(batch);
  for (const auto& v : labels) {
    if (!v.is_number_integer() || v.get<long long>() < 0 ||
        static_cast<unsigned long long>(v.get<long long>()) >= n_classes) {
      throw TransportError("response label out of range");
    }
    out.push_back(static_cast<ClassId>(v.get<long long>()));
  }
  return out;
}

void RemoteOracle::predict_rows(std::span<const double> rows,
                                std::span<ClassId> out) const {
  const std::size_t d = options_.input_dim;
  const std::string path = impl_->url.prefix + "/v1/predict";

  for (std::size_t start = 0; start < out.size(); start += options_.batch_limit) {
    const std::size_t batch = std::min(options_.batch_limit, out.size() - start);
    const std::string body =
        encode_predict_request(rows.subspan(start * d), batch, d);

    std::string failure;
    auto backoff = options_.initial_backoff;
    bool done = false;
    for (int attempt = 0; attempt < options_.attempts && !done; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
      }
      auto res = impl_->client.Post(path, body, "application/json");
      if (!res) {
        failure = "request failed: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status != 200) {
        failure = "HTTP status " + std::to_string(res->status);
        continue;
      }
      try {
        auto labels = decode_predict_response(res->body, batch, options_.n_classes);
        std::copy(labels.begin(), labels.end(), out.begin() + start);
        done = true;
      } catch (const TransportError& e) {
        failure = e.what();
      }
    }
    if (!done) {
      throw TransportError(options_.base_url + ": " + failure + " after " +
                           std::to_string(options_.attempts) + " attempts");
    }
  }
}

}  // namespace tribound
