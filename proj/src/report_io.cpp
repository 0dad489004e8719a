#include "tribound/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "tribound/error.hpp"

namespace tribound {

namespace {

void write_value(const nlohmann::json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner + nlohmann::json(it.key()).dump() + ": ";
        write_value(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const nlohmann::json& v) {
        return v.is_primitive();
      });
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += inner;
        write_value(v, out, indent + 1);
      }
      out += flat ? "]" : "\n" + pad + "]";
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.9g", v == 0.0 ? 0.0 : v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

nlohmann::json labels_json(std::span<const ClassId> labels) {
  return nlohmann::json(std::vector<ClassId>(labels.begin(), labels.end()));
}

}  // namespace

std::string canonical_json(const nlohmann::json& j) {
  std::string out;
  write_value(j, out, 0);
  out += "\n";
  return out;
}

nlohmann::json to_json(const ScanParams& p) {
  nlohmann::json j;
  j["n_plots"] = p.n_plots;
  j["density"] = p.density;
  j["eta"] = p.eta;
  j["alpha"] = p.alpha;
  j["t"] = p.t;
  j["seed"] = p.seed;
  j["distinct_labels"] = p.distinct_labels;
  j["clamp"] = p.clamp ? nlohmann::json{p.clamp->lo, p.clamp->hi} : nlohmann::json(nullptr);
  j["dominance_ratio"] = p.dominance_ratio;
  j["dominance_floor"] = p.dominance_floor;
  return j;
}

nlohmann::json to_json(const DetectionReport& r) {
  nlohmann::json j;
  j["model_id"] = r.model_id;
  j["params"] = to_json(r.params);
  j["thresholds"] = {{"re", r.thresholds.re}, {"ats", r.thresholds.ats}};
  j["aggregate"] = {{"mean_re", r.aggregate.mean_re},
                    {"mean_ats", r.aggregate.mean_ats},
                    {"mean_distribution", r.aggregate.mean_distribution}};
  j["verdict_re"] = to_string(r.verdict_re);
  j["verdict_ats"] = to_string(r.verdict_ats);
  if (r.target) {
    j["target_label"] = r.target->label;
    j["target_dominance"] = {{"probability", r.target->probability},
                             {"ratio", r.target->ratio}};
  } else {
    j["target_label"] = nullptr;
    j["target_dominance"] = nullptr;
  }
  nlohmann::json plots = nlohmann::json::array();
  for (std::size_t k = 0; k < r.aggregate.per_plot.size(); ++k) {
    const auto& pm = r.aggregate.per_plot[k];
    nlohmann::json p;
    p["index"] = k;
    p["re"] = pm.re;
    p["ats"] = pm.ats;
    p["anchor_labels"] = labels_json(pm.anchor_labels);
    p["distribution"] = pm.distribution.p;
    if (k < r.triplets.size()) {
      p["samples"] = {r.triplets[k][0], r.triplets[k][1], r.triplets[k][2]};
    }
    plots.push_back(std::move(p));
  }
  j["per_plot"] = std::move(plots);
  return j;
}

nlohmann::json to_json(const CalibrationResult& c) {
  nlohmann::json j;
  j["gamma_bar"] = c.gamma_bar;
  j["f1"] = c.f1;
  j["candidates"] = c.candidates;
  j["resamples"] = c.resamples;
  nlohmann::json sweep = nlohmann::json::array();
  for (const auto& row : c.sweep) {
    nlohmann::json r;
    // Sentinels are spelled out since JSON has no infinity.
    if (std::isinf(row.gamma)) {
      r["gamma"] = row.gamma > 0 ? "+inf" : "-inf";
    } else {
      r["gamma"] = row.gamma;
    }
    r["precision"] = row.precision;
    r["recall"] = row.recall;
    r["f1"] = row.f1;
    sweep.push_back(std::move(r));
  }
  j["sweep"] = std::move(sweep);
  return j;
}

nlohmann::json to_json(const Evaluation& ev) {
  nlohmann::json j;
  j["auroc_re"] = ev.auroc_re;
  j["auroc_ats"] = ev.auroc_ats;
  j["accuracy_re"] = ev.accuracy_re;
  j["accuracy_ats"] = ev.accuracy_ats;
  j["target_accuracy"] = ev.target_accuracy ? nlohmann::json(*ev.target_accuracy)
                                            : nlohmann::json(nullptr);
  j["target_trials"] = ev.target_trials;
  j["summary"] = {
      {"clean", {{"mean_re", ev.clean_mean_re}, {"mean_ats", ev.clean_mean_ats}}},
      {"backdoored",
       {{"mean_re", ev.backdoor_mean_re}, {"mean_ats", ev.backdoor_mean_ats}}}};
  nlohmann::json models = nlohmann::json::array();
  for (const auto& row : ev.rows) {
    nlohmann::json m;
    m["id"] = row.id;
    m["ground_truth"] = to_string(row.truth);
    m["target_label"] = row.target ? nlohmann::json(*row.target) : nlohmann::json(nullptr);
    m["mean_re"] = row.report.aggregate.mean_re;
    m["mean_ats"] = row.report.aggregate.mean_ats;
    m["verdict_re"] = to_string(row.report.verdict_re);
    m["verdict_ats"] = to_string(row.report.verdict_ats);
    m["identified_target"] = row.report.target ? nlohmann::json(row.report.target->label)
                                               : nlohmann::json(nullptr);
    models.push_back(std::move(m));
  }
  j["models"] = std::move(models);
  return j;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open manifest " + file.string());
  const nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_array()) {
    throw ConfigError("manifest must be a JSON array: " + file.string());
  }
  const auto base = file.parent_path();
  static const std::set<std::string> keys{"id", "oracle", "ground_truth",
                                          "target_label", "pool"};
  std::vector<ManifestEntry> out;
  std::set<std::string> ids;
  for (const auto& e : j) {
    if (!e.is_object()) throw ConfigError("manifest entries must be objects");
    for (const auto& [key, _] : e.items()) {
      if (!keys.contains(key)) throw ConfigError("unexpected manifest key '" + key + "'");
    }
    if (!e.contains("id") || !e["id"].is_string()) {
      throw ConfigError("manifest entry without a string id");
    }
    ManifestEntry m;
    m.id = e["id"].get<std::string>();
    if (!ids.insert(m.id).second) throw ConfigError("duplicate model id " + m.id);
    if (!e.contains("oracle")) throw ConfigError("entry " + m.id + " has no oracle");
    m.oracle = OracleConfig::from_json(e["oracle"], base);
    const std::string truth = e.value("ground_truth", "");
    if (truth == "clean") {
      m.truth = GroundTruth::Clean;
    } else if (truth == "backdoored") {
      m.truth = GroundTruth::Backdoored;
    } else {
      throw ConfigError("entry " + m.id + ": ground_truth must be clean or backdoored");
    }
    if (e.contains("target_label") && !e["target_label"].is_null()) {
      if (!e["target_label"].is_number_unsigned()) {
        throw ConfigError("entry " + m.id + ": target_label must be a class index");
      }
      m.target = e["target_label"].get<ClassId>();
    }
    if (e.contains("pool")) {
      std::filesystem::path p = e["pool"].get<std::string>();
      m.pool = p.is_relative() ? base / p : p;
    }
    out.push_back(std::move(m));
  }
  return out;
}

nlohmann::json to_json(const ManifestEntry& e) {
  nlohmann::json j;
  j["id"] = e.id;
  j["oracle"] = e.oracle.to_json();
  j["ground_truth"] = to_string(e.truth);
  if (e.target) j["target_label"] = *e.target;
  if (e.pool) j["pool"] = e.pool->generic_string();
  return j;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + file.string());
  out << text;
}

}  // namespace tribound
