#include "tribound/oracle.hpp"

#include <bit>
#include <cstring>
#include <string>

#include "tribound/error.hpp"

namespace tribound {

std::vector<ClassId> predict_batch(const Oracle& oracle,
                                   std::span<const double> rows) {
  const std::size_t d = oracle.input_dim();
  if (rows.empty()) throw ShapeMismatch("empty batch");
  if (d == 0 || rows.size() % d != 0) {
    throw ShapeMismatch("batch of " + std::to_string(rows.size()) +
                        " values is not a whole number of rows of length " +
                        std::to_string(d));
  }
  std::vector<ClassId> labels(rows.size() / d);
  oracle.predict_rows(rows, labels);
  const std::size_t n = oracle.n_classes();
  for (ClassId l : labels) {
    if (l >= n) {
      throw BackendError("oracle returned label " + std::to_string(l) +
                         " outside [0, " + std::to_string(n) + ")");
    }
  }
  return labels;
}

ClassId predict_one(const Oracle& oracle, std::span<const double> input) {
  if (input.size() != oracle.input_dim()) {
    throw ShapeMismatch("input has " + std::to_string(input.size()) +
                        " values, oracle expects " +
                        std::to_string(oracle.input_dim()));
  }
  return predict_batch(oracle, input).front();
}

std::uint64_t content_hash(std::span<const double> row) {
  // Word-wise multiply-rotate mix with a SplitMix64 finalizer.
  std::uint64_t h = 0x9E3779B97F4A7C15ULL ^ (row.size() * 0xC2B2AE3D27D4EB4FULL);
  for (double v : row) {
    const auto w = std::bit_cast<std::uint64_t>(v);
    h ^= w * 0x87C37B91114253D5ULL;
    h = std::rotl(h, 31) * 0x4CF5AD432745937FULL;
  }
  h = (h ^ (h >> 30)) * 0xBF58476D1CE4E5B9ULL;
  h = (h ^ (h >> 27)) * 0x94D049BB133111EBULL;
  return h ^ (h >> 31);
}

CachingOracle::CachingOracle(OraclePtr inner) : inner_(std::move(inner)) {}

void CachingOracle::predict_rows(std::span<const double> rows,
                                 std::span<ClassId> out) const {
  const std::size_t d = inner_->input_dim();
  const std::size_t count = out.size();
  std::vector<std::uint64_t> keys(count);
  // Rows absent from the cache, each distinct key sent once; `slot` maps every
  // missing row to its position in the backend batch.
  std::vector<std::size_t> missing;
  std::vector<std::size_t> unique_rows;
  std::vector<std::size_t> slot;
  {
    std::unordered_map<std::uint64_t, std::size_t> pending;
    std::shared_lock lock(mutex_);
    for (std::size_t i = 0; i < count; ++i) {
      keys[i] = content_hash(rows.subspan(i * d, d));
      if (auto it = table_.find(keys[i]); it != table_.end()) {
        out[i] = it->second;
        continue;
      }
      const auto [pos, fresh] = pending.try_emplace(keys[i], unique_rows.size());
      if (fresh) unique_rows.push_back(i);
      missing.push_back(i);
      slot.push_back(pos->second);
    }
  }
  if (missing.empty()) {
    std::unique_lock lock(mutex_);
    hits_ += count;
    return;
  }

  std::vector<double> buffer(unique_rows.size() * d);
  for (std::size_t j = 0; j < unique_rows.size(); ++j) {
    std::memcpy(buffer.data() + j * d, rows.data() + unique_rows[j] * d,
                d * sizeof(double));
  }
  const std::vector<ClassId> fresh = predict_batch(*inner_, buffer);

  std::unique_lock lock(mutex_);
  for (std::size_t j = 0; j < missing.size(); ++j) out[missing[j]] = fresh[slot[j]];
  for (std::size_t j = 0; j < unique_rows.size(); ++j) {
    table_.emplace(keys[unique_rows[j]], fresh[j]);
  }
  hits_ += count - unique_rows.size();
  misses_ += unique_rows.size();
}

std::size_t CachingOracle::size() const {
  std::shared_lock lock(mutex_);
  return table_.size();
}

std::size_t CachingOracle::hits() const {
  std::shared_lock lock(mutex_);
  return hits_;
}

std::size_t CachingOracle::misses() const {
  std::shared_lock lock(mutex_);
  return misses_;
}

std::uint64_t tabulated_key(std::span<const double> row) {
  std::vector<double> rounded(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) {
    rounded[i] = static_cast<double>(static_cast<float>(row[i]));
  }
  return content_hash(rounded);
}

TabulatedOracle::TabulatedOracle(std::span<const float> table,
                                 std::size_t rows, std::size_t dim,
                                 std::size_t n_classes)
    : dim_(dim), n_classes_(n_classes) {
  if (table.size() != rows * (dim + 1)) {
    throw ShapeMismatch("tabulated data does not match [rows, dim + 1]");
  }
  std::vector<double> row(dim);
  for (std::size_t r = 0; r < rows; ++r) {
    const float* src = table.data() + r * (dim + 1);
    for (std::size_t i = 0; i < dim; ++i) row[i] = src[i];
    const float raw = src[dim];
    if (!(raw >= 0.0f) || raw != static_cast<float>(static_cast<ClassId>(raw)) ||
        static_cast<std::size_t>(raw) >= n_classes) {
      throw ConfigError("tabulated row " + std::to_string(r) +
                        " has an invalid label");
    }
    table_.insert_or_assign(content_hash(row), static_cast<ClassId>(raw));
  }
}

void TabulatedOracle::predict_rows(std::span<const double> rows,
                                   std::span<ClassId> out) const {
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto it = table_.find(tabulated_key(rows.subspan(i * dim_, dim_)));
    if (it == table_.end()) {
      throw ReplayMiss("input row " + std::to_string(i) +
                       " is not present in the tabulated oracle");
    }
    out[i] = it->second;
  }
}

}  // namespace tribound
