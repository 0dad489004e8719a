#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "tribound_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(TRIBOUND_EXE) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

std::string w(const std::string& rel) { return (kWork / rel).string(); }

struct Fixture {
  Fixture() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
};

}  // namespace

TEST_CASE_FIXTURE(Fixture, "synth, scan and evaluate") {
  REQUIRE(run("synth --clean 2 --backdoor 2 --d 64 --seed 3 --out " + w("zoo")) == 0);
  CHECK(fs::exists(kWork / "zoo" / "manifest.json"));
  CHECK(fs::exists(kWork / "zoo" / "oracles" / "backdoor_001.json"));
  REQUIRE(run("synth --clean 2 --backdoor 2 --d 64 --seed 3 --out " + w("zoo2")) == 0);
  CHECK(slurp(kWork / "zoo" / "manifest.json") == slurp(kWork / "zoo2" / "manifest.json"));
  CHECK(slurp(kWork / "zoo" / "pools" / "clean_000" / "class_4" / "sample_2.mxt") ==
        slurp(kWork / "zoo2" / "pools" / "clean_000" / "class_4" / "sample_2.mxt"));

  const std::string scan = "scan --oracle " + w("zoo/oracles/backdoor_000.json") +
                           " --pool " + w("zoo/pools/backdoor_000") +
                           " --plots 4 --density 30 --seed 42 --model-id m";
  REQUIRE(run(scan + " --out " + w("r1.json") + " --render " + w("png1")) == 0);
  REQUIRE(run(scan + " --out " + w("r2.json") + " --render " + w("png2")) == 0);
  CHECK(slurp(kWork / "r1.json") == slurp(kWork / "r2.json"));
  for (int k = 0; k < 4; ++k) {
    const auto name = "plot_00" + std::to_string(k) + ".png";
    REQUIRE(fs::exists(kWork / "png1" / "m" / name));
    CHECK(slurp(kWork / "png1" / "m" / name) == slurp(kWork / "png2" / "m" / name));
  }
  const auto report = nlohmann::json::parse(slurp(kWork / "r1.json"));
  CHECK(report["verdict_re"] == "backdoored");
  CHECK(report["per_plot"].size() == 4);

  REQUIRE(run("evaluate --manifest " + w("zoo/manifest.json") +
              " --plots 4 --density 30 --out " + w("eval.json")) == 0);
  const auto ev = nlohmann::json::parse(slurp(kWork / "eval.json"));
  CHECK(ev["auroc_re"].is_number());
  CHECK(ev["auroc_ats"].is_number());
  CHECK(ev["models"].size() == 4);
}

TEST_CASE_FIXTURE(Fixture, "exit codes") {
  CHECK(run("") == 2);
  CHECK(run("scan --bogus") == 2);
  CHECK(run("scan --oracle x.json --pool y --eta 0.5") == 2);

  write(kWork / "clean.json",
        R"({"kind":"synthetic-clean","seed":1,"n_classes":10,"dim":8})");
  CHECK(run("scan --oracle " + w("clean.json") + " --pool " + w("nowhere")) == 4);

  write(kWork / "dead.json",
        R"({"kind":"remote","url":"http://127.0.0.1:1","n_classes":10,"dim":8,"timeout_ms":300})");
  REQUIRE(run("synth --clean 1 --backdoor 1 --d 8 --out " + w("zoo")) == 0);
  CHECK(run("scan --oracle " + w("dead.json") + " --pool " + w("zoo/pools/clean_000")) == 3);

  write(kWork / "cal.csv", "score,label\n2.0,clean\n1.9,clean\n1.8,clean\n"
                           "0.5,backdoored\n0.6,backdoored\n1.0,backdoored\n");
  REQUIRE(run("calibrate --scores " + w("cal.csv") + " --out " + w("cal.json")) == 0);
  const auto cal = nlohmann::json::parse(slurp(kWork / "cal.json"));
  CHECK(cal["gamma_bar"].get<double>() == doctest::Approx(1.4));
  CHECK(cal["f1"].get<double>() == 1.0);

  write(kWork / "one.csv", "1.0,clean\n2.0,0\n");
  CHECK(run("calibrate --scores " + w("one.csv")) == 5);
  write(kWork / "empty.csv", "");
  CHECK(run("calibrate --scores " + w("empty.csv")) == 2);

  write(kWork / "m.json",
        R"([{"id":"a","ground_truth":"clean","oracle":{"kind":"synthetic-clean","seed":1,"n_classes":10,"dim":8}}])");
  CHECK(run("evaluate --manifest " + w("m.json")) == 6);
}
