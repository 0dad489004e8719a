// tribound: decision-boundary backdoor scanner.
//
// Exit codes: 0 ok, 1 unexpected failure, 2 configuration error,
// 3 backend failure, 4 insufficient samples, 5 single-class calibration input,
// 6 zoo manifest missing clean or backdoored models.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tribound/boundary.hpp"
#include "tribound/detector.hpp"
#include "tribound/error.hpp"
#include "tribound/oracle_config.hpp"
#include "tribound/pool_io.hpp"
#include "tribound/report_io.hpp"
#include "tribound/zoo.hpp"

namespace fs = std::filesystem;
using namespace tribound;

namespace {

enum Exit : int {
  kOk = 0,
  kFailure = 1,
  kConfig = 2,
  kBackend = 3,
  kSamples = 4,
  kSingleClass = 5,
  kMissingClass = 6,
};

struct ScanFlags {
  ScanParams params;
  Thresholds thresholds;
  std::vector<double> clamp;
  std::string distinct = "true";
};

void add_scan_flags(CLI::App* cmd, ScanFlags& f) {
  cmd->add_option("--plots", f.params.n_plots, "Number of boundary plots N")
      ->capture_default_str();
  cmd->add_option("--density", f.params.density, "Grid points per axis S")
      ->capture_default_str();
  cmd->add_option("--eta", f.params.eta, "Expansion factor")->capture_default_str();
  cmd->add_option("--alpha", f.params.alpha, "Renyi entropy order")->capture_default_str();
  cmd->add_option("--t", f.params.t, "ATS area constraint")->capture_default_str();
  cmd->add_option("--seed", f.params.seed, "Triplet sampling seed")->capture_default_str();
  cmd->add_option("--threshold-re", f.thresholds.re, "RE verdict threshold")
      ->capture_default_str();
  cmd->add_option("--threshold-ats", f.thresholds.ats, "ATS verdict threshold")
      ->capture_default_str();
  cmd->add_option("--jobs", f.params.jobs, "Worker threads (0 = all cores)")
      ->capture_default_str();
  cmd->add_option("--clamp", f.clamp, "Clamp embedded inputs to [LO, HI]")
      ->expected(2);
  cmd->add_option("--distinct-labels", f.distinct,
                  "Draw triplets from three distinct predicted classes")
      ->check(CLI::IsMember({"true", "false", "1", "0"}))
      ->capture_default_str();
  cmd->add_option("--dominance-ratio", f.params.dominance_ratio,
                  "Target call needs p_max >= ratio * p_second")
      ->capture_default_str();
  cmd->add_option("--dominance-floor", f.params.dominance_floor,
                  "Target call needs p_max >= floor")
      ->capture_default_str();
}

void finish_scan_flags(ScanFlags& f) {
  f.params.distinct_labels = f.distinct == "true" || f.distinct == "1";
  if (!f.clamp.empty()) f.params.clamp = ClampRange{f.clamp[0], f.clamp[1]};
  f.params.validate();
}

std::string plot_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "plot_%03zu.png", k);
  return buf;
}

void write_bytes(const fs::path& file, const std::vector<std::uint8_t>& bytes) {
  fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + file.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

// scan ------------------------------------------------------------------------

struct ScanCommand {
  std::string oracle, pool, out = "report.json", render, model_id;
  std::size_t scale = 1;
  ScanFlags flags;
};

int run_scan(ScanCommand& c) {
  finish_scan_flags(c.flags);
  const OracleConfig config = read_oracle_config(c.oracle);
  const LabeledPool pool = read_pool_dir(c.pool);
  const OraclePtr oracle = load_oracle(config);
  const std::string id = c.model_id.empty() ? fs::path(c.oracle).stem().string() : c.model_id;

  const bool render = !c.render.empty();
  const DetectionReport report =
      scan(*oracle, pool, c.flags.params, c.flags.thresholds, id, render);
  write_text(c.out, canonical_json(to_json(report)));

  if (render) {
    const auto palette = default_palette(oracle->n_classes());
    for (std::size_t k = 0; k < report.maps.size(); ++k) {
      write_bytes(fs::path(c.render) / id / plot_name(k),
                  render_image(report.maps[k], palette, c.scale));
    }
  }

  std::printf("model %s\n", id.c_str());
  std::printf("mean RE  %.6f  (threshold %.6g)  -> %s\n", report.aggregate.mean_re,
              report.thresholds.re, to_string(report.verdict_re).c_str());
  std::printf("mean ATS %.6f  (threshold %.6g)  -> %s\n", report.aggregate.mean_ats,
              report.thresholds.ats, to_string(report.verdict_ats).c_str());
  if (report.target) {
    std::printf("target label %u (p = %.4f)\n", report.target->label,
                report.target->probability);
  } else {
    std::printf("target label none\n");
  }
  return kOk;
}

// calibrate -------------------------------------------------------------------

struct CalibrateCommand {
  std::string scores, evaluation, metric = "re", out = "calibration.json";
  std::size_t resamples = 1;
  std::uint64_t seed = 0;
};

bool parse_flag(std::string text, bool& out) {
  for (auto& ch : text) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (text == "1" || text == "backdoored" || text == "backdoor" || text == "true") {
    out = true;
    return true;
  }
  if (text == "0" || text == "clean" || text == "false") {
    out = false;
    return true;
  }
  return false;
}

// CSV rows "score,label"; label is backdoored/clean or 1/0. A header row is
// optional.
void read_score_csv(const std::string& file, std::vector<double>& scores,
                    std::vector<bool>& flags) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ConfigError(file + ":" + std::to_string(line_no) + ": expected score,label");
    }
    std::string a = line.substr(0, comma), b = line.substr(comma + 1);
    auto strip = [](std::string& s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
    };
    strip(a);
    strip(b);
    double score = 0.0;
    const auto [ptr, ec] = std::from_chars(a.data(), a.data() + a.size(), score);
    bool flag = false;
    if (ec != std::errc{} || ptr != a.data() + a.size() || !parse_flag(b, flag)) {
      if (line_no == 1 && scores.empty()) continue;  // header
      throw ConfigError(file + ":" + std::to_string(line_no) + ": bad row '" + line + "'");
    }
    scores.push_back(score);
    flags.push_back(flag);
  }
}

void read_evaluation_scores(const std::string& file, const std::string& metric,
                            std::vector<double>& scores, std::vector<bool>& flags) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file);
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("models")) {
    throw ConfigError(file + " is not an evaluation document");
  }
  const std::string key = "mean_" + metric;
  for (const auto& m : j["models"]) {
    if (!m.contains(key) || !m[key].is_number()) {
      throw ConfigError(file + ": model without " + key);
    }
    scores.push_back(m[key].get<double>());
    flags.push_back(m.value("ground_truth", "") == "backdoored");
  }
}

int run_calibrate(const CalibrateCommand& c) {
  std::vector<double> scores;
  std::vector<bool> flags;
  if (!c.scores.empty()) {
    read_score_csv(c.scores, scores, flags);
  } else {
    read_evaluation_scores(c.evaluation, c.metric, scores, flags);
  }
  if (scores.empty()) throw ConfigError("no scores to calibrate on");
  const CalibrationResult result = calibrate_threshold(scores, flags, c.resamples, c.seed);
  write_text(c.out, canonical_json(to_json(result)));
  std::printf("gamma_bar %.9g  F1 %.6f  (%zu candidates, %zu resamples)\n",
              result.gamma_bar, result.f1, result.candidates, result.resamples);
  return kOk;
}

// evaluate --------------------------------------------------------------------

struct EvaluateCommand {
  std::string manifest, pool, out = "evaluation.json";
  std::size_t model_jobs = 1;
  ScanFlags flags;
};

int run_evaluate(EvaluateCommand& c) {
  finish_scan_flags(c.flags);
  const auto entries = read_manifest(c.manifest);
  std::size_t backdoored = 0;
  for (const auto& e : entries) backdoored += e.truth == GroundTruth::Backdoored;
  if (backdoored == 0 || backdoored == entries.size()) {
    throw MissingClass("manifest needs at least one clean and one backdoored model");
  }
  std::optional<fs::path> default_pool;
  if (!c.pool.empty()) default_pool = c.pool;
  const auto zoo = load_zoo(entries, default_pool);
  const Evaluation ev = evaluate_zoo(zoo, c.flags.params, c.flags.thresholds, c.model_jobs);
  write_text(c.out, canonical_json(to_json(ev)));

  std::printf("%zu models\n", ev.rows.size());
  std::printf("AUROC RE  %.4f   accuracy %.4f\n", ev.auroc_re, ev.accuracy_re);
  std::printf("AUROC ATS %.4f   accuracy %.4f\n", ev.auroc_ats, ev.accuracy_ats);
  if (ev.target_accuracy) {
    std::printf("target identification %.4f over %zu models\n", *ev.target_accuracy,
                ev.target_trials);
  }
  return kOk;
}

// synth -----------------------------------------------------------------------

struct SynthCommand {
  SynthZooSpec spec;
  double sigma = -1.0;
  std::string out = "zoo";
};

int run_synth(SynthCommand& c) {
  if (c.sigma >= 0.0) c.spec.sigma = c.sigma;
  const fs::path root = c.out;
  fs::create_directories(root / "oracles");
  nlohmann::json manifest = nlohmann::json::array();
  for (const auto& plan : plan_synthetic_zoo(c.spec)) {
    ManifestEntry entry = plan.entry;
    entry.pool = fs::path("pools") / entry.id;
    write_text(root / "oracles" / (entry.id + ".json"),
               canonical_json(entry.oracle.to_json()));
    write_pool_dir(root / *entry.pool,
                   synthetic_pool(entry.oracle, c.spec.per_class, c.spec.sigma,
                                  plan.pool_seed));
    manifest.push_back(to_json(entry));
  }
  write_text(root / "manifest.json", canonical_json(manifest));
  std::printf("wrote %zu oracle configs and pools to %s\n", manifest.size(),
              root.string().c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hard-label decision-boundary backdoor scanner"};
  app.require_subcommand(1);

  ScanCommand scan_cmd;
  auto* scan_app = app.add_subcommand("scan", "Scan one model and write a detection report");
  scan_app->add_option("--oracle", scan_cmd.oracle, "Oracle config JSON")->required();
  scan_app->add_option("--pool", scan_cmd.pool, "Clean sample pool directory")->required();
  scan_app->add_option("--out", scan_cmd.out, "Report JSON path")->capture_default_str();
  scan_app->add_option("--render", scan_cmd.render,
                       "Write PNG maps to DIR/{model_id}/plot_{k}.png");
  scan_app->add_option("--scale", scan_cmd.scale, "PNG pixels per grid cell")
      ->capture_default_str();
  scan_app->add_option("--model-id", scan_cmd.model_id,
                       "Model id (default: oracle file stem)");
  add_scan_flags(scan_app, scan_cmd.flags);

  CalibrateCommand cal_cmd;
  auto* cal_app = app.add_subcommand("calibrate", "Estimate an F1-maximising threshold");
  auto* scores_opt = cal_app->add_option("--scores", cal_cmd.scores,
                                         "CSV of score,label (backdoored/clean or 1/0)");
  auto* eval_opt = cal_app->add_option("--evaluation", cal_cmd.evaluation,
                                       "Evaluation JSON to take scores from");
  scores_opt->excludes(eval_opt);
  cal_app->add_option("--metric", cal_cmd.metric, "Metric when reading an evaluation")
      ->check(CLI::IsMember({"re", "ats"}))
      ->capture_default_str();
  cal_app->add_option("--resamples", cal_cmd.resamples, "Bootstrap resamples")
      ->capture_default_str();
  cal_app->add_option("--seed", cal_cmd.seed, "Bootstrap seed")->capture_default_str();
  cal_app->add_option("--out", cal_cmd.out, "Calibration JSON path")->capture_default_str();

  EvaluateCommand eval_cmd;
  auto* eval_app = app.add_subcommand("evaluate", "Scan a model zoo and compute AUROC");
  eval_app->add_option("--manifest", eval_cmd.manifest, "Zoo manifest JSON")->required();
  eval_app->add_option("--pool", eval_cmd.pool, "Pool for entries without their own");
  eval_app->add_option("--out", eval_cmd.out, "Evaluation JSON path")->capture_default_str();
  eval_app->add_option("--model-jobs", eval_cmd.model_jobs, "Models scanned concurrently")
      ->capture_default_str();
  add_scan_flags(eval_app, eval_cmd.flags);

  SynthCommand synth_cmd;
  auto* synth_app = app.add_subcommand("synth", "Generate a synthetic model zoo");
  synth_app->add_option("--clean", synth_cmd.spec.clean, "Clean models")->capture_default_str();
  synth_app->add_option("--backdoor", synth_cmd.spec.backdoor, "Backdoored models")
      ->capture_default_str();
  synth_app->add_option("--n", synth_cmd.spec.n_classes, "Classes")->capture_default_str();
  synth_app->add_option("--d", synth_cmd.spec.dim, "Input dimension")->capture_default_str();
  synth_app->add_option("--seed", synth_cmd.spec.seed, "Zoo seed")->capture_default_str();
  synth_app->add_option("--strength", synth_cmd.spec.strength, "Backdoor strength in (0, 1]")
      ->capture_default_str();
  synth_app->add_option("--radius", synth_cmd.spec.radius, "Centroid radius")
      ->capture_default_str();
  synth_app->add_option("--sigma", synth_cmd.sigma, "Pool noise norm (default 0.1 * radius)");
  synth_app->add_option("--per-class", synth_cmd.spec.per_class, "Pool samples per class")
      ->capture_default_str();
  synth_app->add_option("--out", synth_cmd.out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*scan_app) return run_scan(scan_cmd);
    if (*cal_app) {
      if (cal_cmd.scores.empty() && cal_cmd.evaluation.empty()) {
        throw ConfigError("calibrate needs --scores or --evaluation");
      }
      return run_calibrate(cal_cmd);
    }
    if (*eval_app) return run_evaluate(eval_cmd);
    if (*synth_app) return run_synth(synth_cmd);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const BackendError& e) {
    std::cerr << "backend error: " << e.what() << '\n';
    return kBackend;
  } catch (const InsufficientSamples& e) {
    std::cerr << "insufficient samples: " << e.what() << '\n';
    return kSamples;
  } catch (const DegenerateTriplet& e) {
    std::cerr << "insufficient samples: " << e.what() << '\n';
    return kSamples;
  } catch (const SingleClassInput& e) {
    std::cerr << "single-class input: " << e.what() << '\n';
    return kSingleClass;
  } catch (const MissingClass& e) {
    std::cerr << "manifest: " << e.what() << '\n';
    return kMissingClass;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
