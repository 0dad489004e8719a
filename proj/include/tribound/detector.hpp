#pragma once

// N-plot scans, threshold verdicts, threshold calibration, target-label
// identification and AUROC over model sets.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tribound/boundary.hpp"
#include "tribound/metrics.hpp"
#include "tribound/oracle.hpp"
#include "tribound/rng.hpp"
#include "tribound/synthlab.hpp"

namespace tribound {

struct ScanParams {
  std::size_t n_plots = 20;
  std::size_t density = 100;
  double eta = 5.0;
  double alpha = kDefaultAlpha;
  double t = kDefaultT;
  std::uint64_t seed = 0;
  bool distinct_labels = true;
  std::optional<ClampRange> clamp;
  std::size_t jobs = 1;  ///< 0 = hardware concurrency
  double dominance_ratio = 2.0;
  double dominance_floor = 0.4;

  /// Throws the matching ConfigError subclass for out-of-range values.
  void validate() const;
};

enum class Verdict { Clean, Backdoored };
std::string to_string(Verdict v);

/// Backdoored iff score <= gamma.
inline Verdict verdict(double score, double gamma) {
  return score <= gamma ? Verdict::Backdoored : Verdict::Clean;
}

/// Verdict thresholds. Defaults are the published 10-class operating points
/// (RE 0.873, ATS 0.184).
struct Thresholds {
  double re = 0.873;
  double ats = 0.184;
};

struct TargetCall {
  ClassId label = 0;
  double probability = 0.0;  ///< p_max
  double ratio = 0.0;        ///< p_max / p_second (inf when p_second = 0)
};

struct DetectionReport {
  std::string model_id;
  AggregateMetrics aggregate;
  Verdict verdict_re = Verdict::Clean;
  Verdict verdict_ats = Verdict::Clean;
  Thresholds thresholds;
  std::optional<TargetCall> target;
  ScanParams params;
  std::vector<std::array<std::size_t, 3>> triplets;  ///< pool indices per plot
  std::vector<BoundaryMap> maps;                     ///< only when kept
};

/// Seeded triplet draws from a pool. With distinct labels, the second sample
/// is drawn uniformly among samples whose class differs from the first, the
/// third among those differing from both; otherwise three distinct indices
/// uniformly.
class TripletSampler {
 public:
  /// Throws InsufficientSamples when the pool cannot supply a triplet.
  TripletSampler(std::span<const ClassId> predicted, bool distinct_labels,
                 std::uint64_t seed);

  std::array<std::size_t, 3> next();

 private:
  std::vector<ClassId> classes_;
  bool distinct_;
  SplitMix64 rng_;
};

DetectionReport scan(const Oracle& oracle, const LabeledPool& pool,
                     const ScanParams& params, const Thresholds& thresholds = {},
                     std::string model_id = {}, bool keep_maps = false);

/// Argmax class if p_max >= floor and p_max >= ratio * p_second.
std::optional<TargetCall> identify_target(std::span<const double> mean_dist,
                                          double dominance_ratio = 2.0,
                                          double dominance_floor = 0.4);

// Calibration ---------------------------------------------------------------

struct SweepRow {
  double gamma = 0.0;  ///< +-inf for the sentinels
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct CalibrationResult {
  double gamma_bar = 0.0;
  double f1 = 0.0;  ///< F1 of gamma_bar on the full input
  std::size_t candidates = 0;
  std::size_t resamples = 1;
  std::vector<SweepRow> sweep;  ///< full-input sweep, ascending gamma
};

/// F1 of the rule "backdoored iff score <= gamma" for every candidate:
/// -inf, the midpoints between consecutive distinct sorted scores, +inf.
std::vector<SweepRow> threshold_sweep(std::span<const double> scores,
                                      const std::vector<bool>& is_backdoor);

/// Argmax-F1 threshold, ties to the larger gamma, +inf reported as the
/// largest score. With resamples > 1, the mean of per-bootstrap argmax
/// thresholds. Throws SingleClassInput, EmptyInput or ShapeMismatch.
CalibrationResult calibrate_threshold(std::span<const double> scores,
                                      const std::vector<bool>& is_backdoor,
                                      std::size_t resamples = 1,
                                      std::uint64_t seed = 0);

/// Mann-Whitney AUROC with suspicion = -score: probability that a random
/// backdoored score is below a random clean one, ties counting half.
double auroc(std::span<const double> clean_scores,
             std::span<const double> backdoor_scores);

// Zoo evaluation ------------------------------------------------------------

enum class GroundTruth { Clean, Backdoored };
std::string to_string(GroundTruth g);

struct ZooModel {
  std::string id;
  OraclePtr oracle;
  LabeledPool pool;
  GroundTruth truth = GroundTruth::Clean;
  std::optional<ClassId> target;
};

struct ZooRow {
  std::string id;
  GroundTruth truth = GroundTruth::Clean;
  std::optional<ClassId> target;
  DetectionReport report;
};

struct Evaluation {
  std::vector<ZooRow> rows;
  double auroc_re = 0.0;
  double auroc_ats = 0.0;
  double accuracy_re = 0.0;   ///< verdict accuracy under the thresholds
  double accuracy_ats = 0.0;
  std::optional<double> target_accuracy;
  std::size_t target_trials = 0;
  // Group means, raw numbers for summary plots.
  double clean_mean_re = 0.0, clean_mean_ats = 0.0;
  double backdoor_mean_re = 0.0, backdoor_mean_ats = 0.0;
};

/// Scans every model (up to `model_jobs` concurrently, each scan using
/// params.jobs workers). Throws MissingClass unless both ground truths occur.
Evaluation evaluate_zoo(std::span<const ZooModel> models, const ScanParams& params,
                        const Thresholds& thresholds = {},
                        std::size_t model_jobs = 1);

}  // namespace tribound
