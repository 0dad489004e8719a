#include "tribound/pool_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "tribound/error.hpp"
#include "tribound/mxt.hpp"

namespace tribound {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

LabeledPool read_pool_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw InsufficientSamples("pool directory not found: " + dir.string());
  }
  const fs::path csv = dir / "labels.csv";
  std::ifstream in(csv);
  if (!in) throw InsufficientSamples("pool has no labels.csv: " + csv.string());

  LabeledPool pool;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) {
      throw ConfigError(csv.string() + ":" + std::to_string(line_no) +
                        ": expected path,label");
    }
    const std::string path = trim(line.substr(0, comma));
    const std::string label_text = trim(line.substr(comma + 1));
    if (line_no == 1 && path == "path" && label_text == "label") continue;

    ClassId label = 0;
    const auto [ptr, ec] = std::from_chars(label_text.data(),
                                           label_text.data() + label_text.size(), label);
    if (ec != std::errc{} || ptr != label_text.data() + label_text.size()) {
      throw ConfigError(csv.string() + ":" + std::to_string(line_no) +
                        ": bad label '" + label_text + "'");
    }
    const fs::path sample_path = dir / path;
    if (!fs::exists(sample_path)) {
      throw ConfigError("pool sample missing: " + sample_path.string());
    }
    const Tensor t = read_mxt(sample_path);
    if (pool.dim == 0) pool.dim = t.data.size();
    if (t.data.size() != pool.dim || pool.dim == 0) {
      throw ConfigError("pool sample " + sample_path.string() +
                        " has a different size from the first sample");
    }
    pool.samples.insert(pool.samples.end(), t.data.begin(), t.data.end());
    pool.labels.push_back(label);
  }
  return pool;
}

void write_pool_dir(const fs::path& dir, const LabeledPool& pool) {
  fs::create_directories(dir);
  std::ofstream csv(dir / "labels.csv", std::ios::trunc);
  if (!csv) throw ConfigError("cannot write " + (dir / "labels.csv").string());
  csv << "path,label\n";
  std::map<ClassId, std::size_t> per_class;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const ClassId label = pool.labels[i];
    const std::string rel = "class_" + std::to_string(label) + "/sample_" +
                            std::to_string(per_class[label]++) + ".mxt";
    fs::create_directories(dir / ("class_" + std::to_string(label)));
    Tensor t;
    t.dims = {static_cast<std::uint32_t>(pool.dim)};
    const auto s = pool.sample(i);
    t.data.assign(s.begin(), s.end());
    write_mxt(dir / rel, t);
    csv << rel << ',' << label << '\n';
  }
}

}  // namespace tribound
