#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "support.hpp"
#include "tribound/error.hpp"
#include "tribound/mxt.hpp"
#include "tribound/oracle.hpp"
#include "tribound/oracle_config.hpp"
#include "tribound/remote_oracle.hpp"
#include "tribound/synthlab.hpp"

using namespace tribound;
namespace fs = std::filesystem;

namespace {

ClassId parity_of_sum(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v;
  return static_cast<ClassId>(static_cast<long long>(std::floor(s * 3)) & 3);
}

// Local hard-label server over a FunctionOracle-style rule. Can be told to
// fail the first `fail_first` requests with HTTP 500.
class TestServer {
 public:
  explicit TestServer(std::size_t dim, int fail_first = 0)
      : dim_(dim), failures_left_(fail_first) {
    server_.Post("/v1/predict", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      if (failures_left_.fetch_sub(1) > 0) {
        res.status = 500;
        return;
      }
      const auto j = nlohmann::json::parse(req.body);
      const std::size_t b = j["shape"][0].get<std::size_t>();
      max_batch_ = std::max<std::size_t>(max_batch_, b);
      const auto data = j["data"].get<std::vector<double>>();
      nlohmann::json labels = nlohmann::json::array();
      for (std::size_t i = 0; i < b; ++i) {
        labels.push_back(parity_of_sum({data.data() + i * dim_, dim_}));
      }
      res.set_content(nlohmann::json{{"labels", labels}}.dump(), "application/json");
    });
    server_.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("ok", "text/plain");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~TestServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int requests() const { return requests_; }
  std::size_t max_batch() const { return max_batch_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::size_t dim_;
  std::atomic<int> failures_left_;
  std::atomic<int> requests_{0};
  std::atomic<std::size_t> max_batch_{0};
};

std::vector<double> random_rows(SplitMix64& rng, std::size_t rows, std::size_t d) {
  return testing::random_vector(rng, rows * d);
}

int free_port() {
  httplib::Server s;
  return s.bind_to_any_port("127.0.0.1");
}

}  // namespace

TEST_CASE("synthetic clean oracle from config") {
  OracleConfig c;
  c.kind = OracleKind::SyntheticClean;
  c.seed = 7;
  c.n_classes = 10;
  c.dim = 3072;
  const auto o = load_oracle(c);
  CHECK(o->n_classes() == 10);
  CHECK(o->input_dim() == 3072);
  const auto model = CentroidModel::generate(7, 10, 3072);
  CHECK(predict_one(*o, model.centroid(3)) == 3);
}

TEST_CASE("predict_batch validates shapes and labels") {
  FunctionOracle o(4, 3, parity_of_sum);
  std::vector<double> bad(7, 0.0);
  CHECK_THROWS_AS(predict_batch(o, bad), ShapeMismatch);
  CHECK_THROWS_AS(predict_batch(o, std::span<const double>{}), ShapeMismatch);
  FunctionOracle liar(2, 1, [](std::span<const double>) -> ClassId { return 5; });
  std::vector<double> one{1.0};
  CHECK_THROWS(predict_batch(liar, one));
}

TEST_CASE("large batch equals one-at-a-time queries") {
  const auto o = gen_backdoor_oracle(3, 10, 8, 2, 0.8);
  SplitMix64 rng(1);
  const std::size_t rows = 200000, d = 8;
  auto data = random_rows(rng, rows, d);
  for (auto& v : data) v *= 6.0;
  const auto batch = predict_batch(*o, data);
  REQUIRE(batch.size() == rows);
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    mismatches += predict_one(*o, std::span<const double>(data).subspan(i * d, d)) != batch[i];
  }
  CHECK(mismatches == 0);
  CHECK(predict_batch(*o, data) == batch);
}

TEST_CASE("batch splitting is transparent for every backend") {
  SplitMix64 rng(2);
  const std::size_t d = 5, rows = 333;
  const auto data = random_rows(rng, rows, d);
  std::vector<OraclePtr> backends{
      std::make_shared<FunctionOracle>(4, d, parity_of_sum),
      gen_clean_oracle(1, 4, d),
      gen_backdoor_oracle(1, 4, d, 0, 1.0),
      std::make_shared<CachingOracle>(gen_clean_oracle(2, 4, d)),
  };
  for (const auto& o : backends) {
    const auto whole = predict_batch(*o, data);
    std::vector<ClassId> pieces;
    for (std::size_t start = 0; start < rows; start += 17) {
      const std::size_t n = std::min<std::size_t>(17, rows - start);
      const auto part = predict_batch(*o, std::span<const double>(data).subspan(start * d, n * d));
      pieces.insert(pieces.end(), part.begin(), part.end());
    }
    CHECK(pieces == whole);
  }
}

TEST_CASE("cache serves repeats without reaching the backend") {
  std::atomic<int> calls{0};
  auto inner = std::make_shared<FunctionOracle>(4, 2, [&](std::span<const double> x) {
    ++calls;
    return parity_of_sum(x);
  });
  CachingOracle cache(inner);
  std::vector<double> rows{0.1, 0.2, 0.3, 0.4, 0.1, 0.2};
  const auto first = predict_batch(cache, rows);
  CHECK(calls == 2);
  CHECK(cache.size() == 2);
  const auto second = predict_batch(cache, rows);
  CHECK(first == second);
  CHECK(calls == 2);
  CHECK(cache.hits() >= 3);
}

TEST_CASE("tabulated oracle replays stored labels") {
  const auto dir = fs::temp_directory_path() / "tribound_tab_test";
  fs::create_directories(dir);
  SplitMix64 rng(6);
  const std::size_t d = 4, rows = 50;
  const auto data = random_rows(rng, rows, d);
  std::vector<std::uint32_t> labels(rows);
  for (std::size_t i = 0; i < rows; ++i) labels[i] = static_cast<std::uint32_t>(i % 10);
  write_mxt(dir / "grid.mxt", make_label_table(data, d, labels));

  OracleConfig c;
  c.kind = OracleKind::Tabulated;
  c.path = dir / "grid.mxt";
  const auto o = load_oracle(c);
  CHECK(o->n_classes() == 10);
  CHECK(o->input_dim() == d);
  const auto got = predict_batch(*o, data);
  for (std::size_t i = 0; i < rows; ++i) CHECK(got[i] == labels[i]);

  std::vector<double> unseen(d, 123.0);
  CHECK_THROWS_AS(predict_batch(*o, unseen), ReplayMiss);

  c.path = dir / "missing.mxt";
  CHECK_THROWS_AS(load_oracle(c), BackendUnavailable);
  fs::remove_all(dir);
}

TEST_CASE("config parsing") {
  const auto good = nlohmann::json::parse(
      R"({"kind":"synthetic-backdoor","seed":3,"n_classes":10,"dim":16,"target":4,"strength":0.5})");
  const auto c = OracleConfig::from_json(good);
  CHECK(c.kind == OracleKind::SyntheticBackdoor);
  CHECK(c.target == 4);
  CHECK(OracleConfig::from_json(c.to_json()).to_json() == c.to_json());

  CHECK_THROWS_AS(OracleConfig::from_json(nlohmann::json::parse(
                      R"({"kind":"synthetic-clean","seed":1,"n_classes":10,"dim":4,"bogus":1})")),
                  ConfigError);
  CHECK_THROWS_AS(OracleConfig::from_json(nlohmann::json::parse(R"({"kind":"nope"})")),
                  ConfigError);
  CHECK_THROWS_AS(OracleConfig::from_json(nlohmann::json::parse(
                      R"({"kind":"synthetic-backdoor","seed":1,"n_classes":10,"dim":4,"target":10,"strength":0.5})")),
                  ConfigError);
  CHECK_THROWS_AS(OracleConfig::from_json(nlohmann::json::parse(
                      R"({"kind":"synthetic-backdoor","seed":1,"n_classes":10,"dim":4,"target":1,"strength":0})")),
                  ConfigError);
}

TEST_CASE("wire format") {
  std::vector<double> rows{0.1, -2.5, 1e-300, 3.0};
  const auto body = nlohmann::json::parse(encode_predict_request(rows, 2, 2));
  CHECK(body["shape"] == nlohmann::json::array({2, 2}));
  CHECK(body["data"].get<std::vector<double>>() == rows);
  CHECK(decode_predict_response(R"({"labels":[1,0]})", 2, 2) == std::vector<ClassId>{1, 0});
  CHECK_THROWS_AS(decode_predict_response(R"({"labels":[1]})", 2, 2), TransportError);
  CHECK_THROWS_AS(decode_predict_response(R"({"labels":[1,7]})", 2, 2), TransportError);
  CHECK_THROWS_AS(decode_predict_response(R"(not json)", 2, 2), TransportError);
  CHECK_THROWS_AS(decode_predict_response(R"({"labels":[1,-1]})", 2, 2), TransportError);
}

TEST_CASE("remote oracle honours the batch limit") {
  TestServer server(3);
  RemoteOptions opt;
  opt.base_url = server.url();
  opt.n_classes = 4;
  opt.input_dim = 3;
  opt.batch_limit = 64;
  opt.initial_backoff = std::chrono::milliseconds(1);
  RemoteOracle remote(opt);
  remote.probe();
  SplitMix64 rng(3);
  const auto data = random_rows(rng, 1000, 3);
  const auto got = predict_batch(remote, data);
  FunctionOracle local(4, 3, parity_of_sum);
  CHECK(got == predict_batch(local, data));
  CHECK(server.max_batch() <= 64);
  CHECK(server.requests() == 16);
}

TEST_CASE("remote oracle retries transient failures") {
  TestServer server(2, 2);
  RemoteOptions opt;
  opt.base_url = server.url();
  opt.n_classes = 4;
  opt.input_dim = 2;
  opt.initial_backoff = std::chrono::milliseconds(1);
  RemoteOracle remote(opt);
  std::vector<double> rows{0.1, 0.2, 0.5, 0.9};
  CHECK(predict_batch(remote, rows).size() == 2);
  CHECK(server.requests() == 3);

  TestServer broken(2, 1000);
  opt.base_url = broken.url();
  RemoteOracle failing(opt);
  CHECK_THROWS_AS(predict_batch(failing, rows), TransportError);
  CHECK(broken.requests() == 3);
}

TEST_CASE("dead endpoint is reported as unavailable") {
  OracleConfig c;
  c.kind = OracleKind::Remote;
  c.url = "http://127.0.0.1:" + std::to_string(free_port());
  c.n_classes = 10;
  c.dim = 4;
  c.batch = 256;
  c.timeout_ms = 500;
  CHECK_THROWS_AS(load_oracle(c), BackendUnavailable);
}

TEST_CASE("remote config runs through load_oracle") {
  TestServer server(3);
  OracleConfig c;
  c.kind = OracleKind::Remote;
  c.url = server.url();
  c.n_classes = 4;
  c.dim = 3;
  c.batch = 10;
  c.cache = true;
  const auto o = load_oracle(c);
  std::vector<double> rows(30 * 3);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = 0.01 * static_cast<double>(i);
  const auto a = predict_batch(*o, rows);
  const int after_first = server.requests();
  CHECK(predict_batch(*o, rows) == a);
  CHECK(server.requests() == after_first);
}
