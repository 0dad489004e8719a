#include "tribound/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "tribound/error.hpp"
#include "tribound/parallel.hpp"

namespace tribound {

void ScanParams::validate() const {
  if (n_plots < 1) throw InvalidParams("number of plots must be >= 1");
  if (density < 2) throw InvalidDensity("grid density must be >= 2");
  if (!(eta >= 1.0) || !std::isfinite(eta)) throw InvalidEta("eta must be >= 1");
  if (!(alpha >= 1.0)) throw InvalidAlpha("alpha must be >= 1");
  if (!(t > 0.0 && t <= 1.0)) throw InvalidT("t must lie in (0, 1]");
  if (clamp && !(clamp->lo < clamp->hi)) throw InvalidParams("clamp needs lo < hi");
  if (!(dominance_ratio > 1.0)) throw InvalidParams("dominance ratio must be > 1");
  if (!(dominance_floor > 0.0 && dominance_floor < 1.0)) {
    throw InvalidParams("dominance floor must lie in (0, 1)");
  }
}

std::string to_string(Verdict v) {
  return v == Verdict::Backdoored ? "backdoored" : "clean";
}

std::string to_string(GroundTruth g) {
  return g == GroundTruth::Backdoored ? "backdoored" : "clean";
}

// Triplets --------------------------------------------------------------------

TripletSampler::TripletSampler(std::span<const ClassId> predicted,
                               bool distinct_labels, std::uint64_t seed)
    : classes_(predicted.begin(), predicted.end()),
      distinct_(distinct_labels),
      rng_(derive_seed(seed, 4)) {
  if (classes_.size() < 3) {
    throw InsufficientSamples("pool holds " + std::to_string(classes_.size()) +
                              " samples, a triplet needs 3");
  }
  if (distinct_) {
    const std::set<ClassId> unique(classes_.begin(), classes_.end());
    if (unique.size() < 3) {
      throw InsufficientSamples("pool spans " + std::to_string(unique.size()) +
                                " predicted classes, distinct-label triplets need 3");
    }
  }
}

std::array<std::size_t, 3> TripletSampler::next() {
  const std::uint64_t n = classes_.size();
  std::array<std::size_t, 3> idx{};
  idx[0] = rng_.below(n);
  do {
    idx[1] = rng_.below(n);
  } while (idx[1] == idx[0] || (distinct_ && classes_[idx[1]] == classes_[idx[0]]));
  do {
    idx[2] = rng_.below(n);
  } while (idx[2] == idx[0] || idx[2] == idx[1] ||
           (distinct_ && (classes_[idx[2]] == classes_[idx[0]] ||
                          classes_[idx[2]] == classes_[idx[1]])));
  return idx;
}

// Scan ------------------------------------------------------------------------

namespace {

SampleTriplet make_triplet(const LabeledPool& pool, std::span<const ClassId> predicted,
                           const std::array<std::size_t, 3>& idx) {
  SampleTriplet t;
  auto copy = [&](std::size_t i) {
    const auto s = pool.sample(i);
    return Vector(s.begin(), s.end());
  };
  t.x1 = copy(idx[0]);
  t.x2 = copy(idx[1]);
  t.x3 = copy(idx[2]);
  t.labels = std::array<ClassId, 3>{predicted[idx[0]], predicted[idx[1]],
                                    predicted[idx[2]]};
  return t;
}

constexpr int kMaxDegenerateDraws = 1000;

}  // namespace

DetectionReport scan(const Oracle& oracle, const LabeledPool& pool,
                     const ScanParams& params, const Thresholds& thresholds,
                     std::string model_id, bool keep_maps) {
  params.validate();
  if (pool.size() < 3) {
    throw InsufficientSamples("pool holds " + std::to_string(pool.size()) +
                              " samples, a triplet needs 3");
  }
  if (pool.dim != oracle.input_dim()) {
    throw ShapeMismatch("pool dimension " + std::to_string(pool.dim) +
                        " != oracle input_dim " + std::to_string(oracle.input_dim()));
  }

  const std::vector<ClassId> predicted = predict_batch(oracle, pool.samples);
  TripletSampler sampler(predicted, params.distinct_labels, params.seed);

  DetectionReport report;
  report.model_id = std::move(model_id);
  report.params = params;
  report.thresholds = thresholds;

  // Draw every triplet up front so the plan does not depend on scheduling.
  std::vector<SampleTriplet> triplets;
  triplets.reserve(params.n_plots);
  int rejected = 0;
  while (triplets.size() < params.n_plots) {
    const auto idx = sampler.next();
    SampleTriplet t = make_triplet(pool, predicted, idx);
    try {
      (void)span_plane(t);
    } catch (const DegenerateTriplet&) {
      if (++rejected >= kMaxDegenerateDraws) throw;
      continue;
    }
    report.triplets.push_back(idx);
    triplets.push_back(std::move(t));
  }

  std::vector<BoundaryMap> maps(params.n_plots);
  std::vector<PlotMetrics> metrics(params.n_plots);
  PlotOptions options;
  options.clamp = params.clamp;
  options.jobs = 1;
  parallel_for(params.n_plots, params.jobs, [&](std::size_t k) {
    BoundaryMap map = plot_boundary(oracle, triplets[k], params.eta,
                                    params.density, options);
    map.triplet_id = k;
    map.seed = params.seed;
    metrics[k] = plot_metrics(map, params.alpha, params.t);
    if (keep_maps) maps[k] = std::move(map);
  });

  report.aggregate = aggregate(metrics);
  report.verdict_re = verdict(report.aggregate.mean_re, thresholds.re);
  report.verdict_ats = verdict(report.aggregate.mean_ats, thresholds.ats);
  report.target = identify_target(report.aggregate.mean_distribution,
                                  params.dominance_ratio, params.dominance_floor);
  if (keep_maps) report.maps = std::move(maps);
  return report;
}

std::optional<TargetCall> identify_target(std::span<const double> mean_dist,
                                          double dominance_ratio,
                                          double dominance_floor) {
  if (!(dominance_ratio > 1.0)) throw InvalidParams("dominance ratio must be > 1");
  if (!(dominance_floor > 0.0 && dominance_floor < 1.0)) {
    throw InvalidParams("dominance floor must lie in (0, 1)");
  }
  if (mean_dist.empty()) return std::nullopt;

  std::size_t best = 0;
  for (std::size_t m = 1; m < mean_dist.size(); ++m) {
    if (mean_dist[m] > mean_dist[best]) best = m;
  }
  double second = 0.0;
  for (std::size_t m = 0; m < mean_dist.size(); ++m) {
    if (m != best) second = std::max(second, mean_dist[m]);
  }
  const double top = mean_dist[best];
  if (top < dominance_floor || top < dominance_ratio * second) return std::nullopt;

  TargetCall call;
  call.label = static_cast<ClassId>(best);
  call.probability = top;
  call.ratio = second > 0.0 ? top / second : std::numeric_limits<double>::infinity();
  return call;
}

// Calibration -----------------------------------------------------------------

namespace {

struct Counts {
  std::size_t tp = 0, fp = 0, positives = 0;
};

// F1 = 2TP / (2TP + FP + FN), compared as exact fractions.
struct F1Fraction {
  std::size_t num = 0, den = 1;
  bool operator<(const F1Fraction& o) const { return num * o.den < o.num * den; }
  bool operator==(const F1Fraction& o) const { return num * o.den == o.num * den; }
  double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / den; }
};

F1Fraction f1_of(const Counts& c) {
  const std::size_t fn = c.positives - c.tp;
  if (c.tp == 0) return {0, 1};
  return {2 * c.tp, 2 * c.tp + c.fp + fn};
}

void check_labeled(std::span<const double> scores, const std::vector<bool>& flags) {
  if (scores.empty()) throw EmptyInput("no scores to calibrate on");
  if (scores.size() != flags.size()) {
    throw ShapeMismatch("scores and labels differ in length");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) throw ConfigError("scores must be finite");
  }
  const auto pos = std::count(flags.begin(), flags.end(), true);
  if (pos == 0 || pos == static_cast<long>(flags.size())) {
    throw SingleClassInput("calibration needs both clean and backdoored scores");
  }
}

struct Candidate {
  double gamma;
  Counts counts;
};

// Candidates in ascending order with their confusion counts.
std::vector<Candidate> candidates(std::span<const double> scores,
                                  const std::vector<bool>& flags) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  Counts running;
  running.positives = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
  std::vector<Candidate> out;
  out.push_back({-std::numeric_limits<double>::infinity(), running});
  std::size_t i = 0;
  while (i < order.size()) {
    const double value = scores[order[i]];
    while (i < order.size() && scores[order[i]] == value) {
      if (flags[order[i]]) ++running.tp; else ++running.fp;
      ++i;
    }
    const double gamma = i < order.size()
                             ? std::midpoint(value, scores[order[i]])
                             : std::numeric_limits<double>::infinity();
    out.push_back({gamma, running});
  }
  return out;
}

// Index of the best candidate, ties resolved toward the larger gamma.
std::size_t best_candidate(const std::vector<Candidate>& cands) {
  std::size_t best = 0;
  F1Fraction best_f1 = f1_of(cands[0].counts);
  for (std::size_t i = 1; i < cands.size(); ++i) {
    const F1Fraction f = f1_of(cands[i].counts);
    if (best_f1 < f || f == best_f1) {
      best = i;
      best_f1 = f;
    }
  }
  return best;
}

double finite_gamma(double gamma, std::span<const double> scores) {
  if (std::isinf(gamma) && gamma > 0) return *std::max_element(scores.begin(), scores.end());
  return gamma;
}

}  // namespace

std::vector<SweepRow> threshold_sweep(std::span<const double> scores,
                                      const std::vector<bool>& is_backdoor) {
  check_labeled(scores, is_backdoor);
  std::vector<SweepRow> rows;
  for (const auto& c : candidates(scores, is_backdoor)) {
    SweepRow r;
    r.gamma = c.gamma;
    const std::size_t predicted = c.counts.tp + c.counts.fp;
    r.precision = predicted ? static_cast<double>(c.counts.tp) / predicted : 0.0;
    r.recall = static_cast<double>(c.counts.tp) / c.counts.positives;
    r.f1 = f1_of(c.counts).value();
    rows.push_back(r);
  }
  return rows;
}

CalibrationResult calibrate_threshold(std::span<const double> scores,
                                      const std::vector<bool>& is_backdoor,
                                      std::size_t resamples, std::uint64_t seed) {
  check_labeled(scores, is_backdoor);
  if (resamples < 1) throw InvalidParams("resamples must be >= 1");

  CalibrationResult result;
  result.resamples = resamples;
  result.sweep = threshold_sweep(scores, is_backdoor);
  result.candidates = result.sweep.size();

  const auto full = candidates(scores, is_backdoor);
  if (resamples == 1) {
    const auto& best = full[best_candidate(full)];
    result.gamma_bar = finite_gamma(best.gamma, scores);
    result.f1 = f1_of(best.counts).value();
    return result;
  }

  const std::size_t n = scores.size();
  double sum = 0.0;
  std::vector<double> s(n);
  std::vector<bool> f(n);
  for (std::size_t r = 0; r < resamples; ++r) {
    SplitMix64 rng(derive_seed(seed, 100 + r));
    for (;;) {
      for (std::size_t i = 0; i < n; ++i) {
        const auto j = rng.below(n);
        s[i] = scores[j];
        f[i] = is_backdoor[j];
      }
      const auto pos = std::count(f.begin(), f.end(), true);
      if (pos > 0 && pos < static_cast<long>(n)) break;
    }
    const auto cands = candidates(s, f);
    sum += finite_gamma(cands[best_candidate(cands)].gamma, s);
  }
  result.gamma_bar = sum / static_cast<double>(resamples);

  Counts at_bar;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_backdoor[i]) ++at_bar.positives;
    if (scores[i] <= result.gamma_bar) {
      if (is_backdoor[i]) ++at_bar.tp; else ++at_bar.fp;
    }
  }
  result.f1 = f1_of(at_bar).value();
  return result;
}

double auroc(std::span<const double> clean_scores,
             std::span<const double> backdoor_scores) {
  if (clean_scores.empty() || backdoor_scores.empty()) {
    throw EmptyInput("AUROC needs clean and backdoored scores");
  }
  std::vector<double> clean(clean_scores.begin(), clean_scores.end());
  std::sort(clean.begin(), clean.end());
  // Twice the Mann-Whitney count keeps half-credit ties integral.
  std::uint64_t twice = 0;
  for (double b : backdoor_scores) {
    const auto [lo, hi] = std::equal_range(clean.begin(), clean.end(), b);
    const auto above = static_cast<std::uint64_t>(clean.end() - hi);
    const auto ties = static_cast<std::uint64_t>(hi - lo);
    twice += 2 * above + ties;
  }
  return static_cast<double>(twice) /
         (2.0 * static_cast<double>(clean.size()) *
          static_cast<double>(backdoor_scores.size()));
}

// Zoo -------------------------------------------------------------------------

Evaluation evaluate_zoo(std::span<const ZooModel> models, const ScanParams& params,
                        const Thresholds& thresholds, std::size_t model_jobs) {
  const auto backdoored = std::count_if(models.begin(), models.end(), [](const ZooModel& m) {
    return m.truth == GroundTruth::Backdoored;
  });
  if (backdoored == 0 || backdoored == static_cast<long>(models.size())) {
    throw MissingClass("zoo needs at least one clean and one backdoored model");
  }
  params.validate();

  Evaluation ev;
  ev.rows.resize(models.size());
  parallel_for(models.size(), model_jobs, [&](std::size_t i) {
    const ZooModel& m = models[i];
    ZooRow row;
    row.id = m.id;
    row.truth = m.truth;
    row.target = m.target;
    row.report = scan(*m.oracle, m.pool, params, thresholds, m.id);
    ev.rows[i] = std::move(row);
  });

  std::vector<double> clean_re, clean_ats, bd_re, bd_ats;
  std::size_t correct_re = 0, correct_ats = 0, hits = 0;
  for (const auto& row : ev.rows) {
    const auto& agg = row.report.aggregate;
    const bool is_bd = row.truth == GroundTruth::Backdoored;
    (is_bd ? bd_re : clean_re).push_back(agg.mean_re);
    (is_bd ? bd_ats : clean_ats).push_back(agg.mean_ats);
    correct_re += (row.report.verdict_re == Verdict::Backdoored) == is_bd;
    correct_ats += (row.report.verdict_ats == Verdict::Backdoored) == is_bd;
    if (is_bd && row.target) {
      ++ev.target_trials;
      hits += row.report.target && row.report.target->label == *row.target;
    }
  }
  ev.auroc_re = auroc(clean_re, bd_re);
  ev.auroc_ats = auroc(clean_ats, bd_ats);
  const double n = static_cast<double>(ev.rows.size());
  ev.accuracy_re = static_cast<double>(correct_re) / n;
  ev.accuracy_ats = static_cast<double>(correct_ats) / n;
  if (ev.target_trials > 0) {
    ev.target_accuracy = static_cast<double>(hits) / static_cast<double>(ev.target_trials);
  }
  auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  ev.clean_mean_re = mean(clean_re);
  ev.clean_mean_ats = mean(clean_ats);
  ev.backdoor_mean_re = mean(bd_re);
  ev.backdoor_mean_ats = mean(bd_ats);
  return ev;
}

}  // namespace tribound
