#pragma once

// Hard-label classifier access. Oracles only ever return class indices; no
// logits or gradients cross this interface.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tribound/geometry.hpp"

namespace tribound {

class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual std::size_t n_classes() const = 0;
  virtual std::size_t input_dim() const = 0;

  /// Labels for `out.size()` row-major inputs of input_dim() values each.
  /// Callers go through predict_batch(), which validates shapes. Must be
  /// deterministic and safe to call concurrently.
  virtual void predict_rows(std::span<const double> rows,
                            std::span<ClassId> out) const = 0;
};

using OraclePtr = std::shared_ptr<const Oracle>;

/// One label per row, order-preserving. Throws ShapeMismatch when the data is
/// empty or not a whole number of input_dim() rows.
std::vector<ClassId> predict_batch(const Oracle& oracle,
                                   std::span<const double> rows);

ClassId predict_one(const Oracle& oracle, std::span<const double> input);

/// 64-bit content hash of the raw bytes of an input row.
std::uint64_t content_hash(std::span<const double> row);

/// Write-through replay cache keyed by content_hash(). Repeated queries never
/// reach the wrapped backend.
class CachingOracle final : public Oracle {
 public:
  explicit CachingOracle(OraclePtr inner);

  std::size_t n_classes() const override { return inner_->n_classes(); }
  std::size_t input_dim() const override { return inner_->input_dim(); }
  void predict_rows(std::span<const double> rows,
                    std::span<ClassId> out) const override;

  std::size_t size() const;
  std::size_t hits() const;
  std::size_t misses() const;

 private:
  OraclePtr inner_;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<std::uint64_t, ClassId> table_;
  mutable std::size_t hits_ = 0;
  mutable std::size_t misses_ = 0;
};

/// Funnels every call through one mutex, for backends that cannot serve
/// concurrent requests.
class SerializingOracle final : public Oracle {
 public:
  explicit SerializingOracle(OraclePtr inner) : inner_(std::move(inner)) {}

  std::size_t n_classes() const override { return inner_->n_classes(); }
  std::size_t input_dim() const override { return inner_->input_dim(); }
  void predict_rows(std::span<const double> rows,
                    std::span<ClassId> out) const override {
    std::lock_guard lock(mutex_);
    inner_->predict_rows(rows, out);
  }

 private:
  OraclePtr inner_;
  mutable std::mutex mutex_;
};

/// Replays labels stored in a table of (input, label) rows. Lookup is by the
/// content hash of the float32-rounded input, matching MXT storage.
class TabulatedOracle final : public Oracle {
 public:
  /// `table` is row-major [rows, dim + 1]; the last column holds the label.
  TabulatedOracle(std::span<const float> table, std::size_t rows,
                  std::size_t dim, std::size_t n_classes);

  std::size_t n_classes() const override { return n_classes_; }
  std::size_t input_dim() const override { return dim_; }
  void predict_rows(std::span<const double> rows,
                    std::span<ClassId> out) const override;

  std::size_t size() const { return table_.size(); }

 private:
  std::size_t dim_;
  std::size_t n_classes_;
  std::unordered_map<std::uint64_t, ClassId> table_;
};

/// Hash used by TabulatedOracle: content_hash of the row rounded to float32
/// and widened back to double.
std::uint64_t tabulated_key(std::span<const double> row);

/// Deterministic oracle from a plain function; handy for tests and bindings.
class FunctionOracle final : public Oracle {
 public:
  using Fn = std::function<ClassId(std::span<const double>)>;
  FunctionOracle(std::size_t n_classes, std::size_t dim, Fn fn)
      : n_classes_(n_classes), dim_(dim), fn_(std::move(fn)) {}

  std::size_t n_classes() const override { return n_classes_; }
  std::size_t input_dim() const override { return dim_; }
  void predict_rows(std::span<const double> rows,
                    std::span<ClassId> out) const override {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = fn_(rows.subspan(i * dim_, dim_));
    }
  }

 private:
  std::size_t n_classes_;
  std::size_t dim_;
  Fn fn_;
};

}  // namespace tribound
