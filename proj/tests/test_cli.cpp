#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "experiments.hpp"

using namespace kquant::cli;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return ExperimentConfig::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("kquant_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string offending_key(const ExperimentConfig& c) {
  try {
    validate(c);
  } catch (const ConfigInvalid& e) {
    return e.key();
  }
  return "";
}

}  // namespace

TEST_CASE("config grammar") {
  const ExperimentConfig c = parse(
      "# comment\n"
      "experiment = snc-eval\n"
      "output = out  # trailing\n"
      "\n"
      "[snc]\n"
      "a = [1, 1]\n"
      "b = [0, 1/2]\n"
      "c = [0, 0]\n"
      "d = [0, 1]\n"
      "betas = 2, 4\n");
  CHECK(c.experiment() == "snc-eval");
  CHECK(c.output_dir() == "out");
  CHECK(c.get_string("snc.a", "") == "[1, 1]");
  CHECK(c.get_list("snc.betas", {}).size() == 2);
  CHECK(c.section_keys("snc") == std::vector<std::string>{"a", "b", "betas", "c", "d"});
  CHECK_NOTHROW(validate(c));

  CHECK_THROWS_AS(parse("[snc]\na = 1\n"), ConfigInvalid);
  CHECK_THROWS_AS(parse("experiment = snc-eval\n[snc]\na = 1\na = 2\n"), ConfigInvalid);
  CHECK_THROWS_AS(parse("experiment = snc-eval\njunk line\n"), ConfigInvalid);
}

TEST_CASE("validation names the offending key") {
  CHECK(offending_key(parse("experiment = quantize-sweep\n[quantize]\nbetas = 1, -1\n")) == "quantize.betas");
  CHECK(offending_key(parse("experiment = functional-report\n[quantize]\nbeta = 0\n")) == "quantize.beta");
  CHECK(offending_key(parse("experiment = functional-report\n[quantize]\ncolor = 3\n")) == "quantize.color");
  CHECK(offending_key(parse("experiment = ray-slope\n[rays]\nx = breakpoints = []; slopes = [1]\n[slope]\nt_max = 2\n")) ==
        "slope.t_max");
  CHECK_THROWS_AS(validate(parse("experiment = no-such-thing\n")), ConfigInvalid);

  const ExperimentConfig missing = parse("experiment = ray-slope\n[rays]\nq = file:does/not/exist.toric\n");
  try {
    validate(missing);
    FAIL("expected ConfigInvalid");
  } catch (const ConfigInvalid& e) {
    CHECK(std::string(e.what()).find("does/not/exist.toric") != std::string::npos);
  }
}

TEST_CASE("functional-report on the zero potential") {
  const fs::path out = scratch("zero");
  RunOptions opts;
  opts.output_dir = out.string();
  const RunSummary s = run(parse("experiment = functional-report\n[potential]\nsource = zero\n"), opts);
  CHECK(s.exit_code == kOk);
  CHECK(fs::exists(out / "results.json"));
  CHECK(fs::exists(out / "summary.txt"));
  CHECK(fs::exists(out / "metadata.json"));
  CHECK(slurp(out / "summary.txt").find("[FAIL]") == std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("snc-eval reports the exact value -1 at beta = 4") {
  const fs::path out = scratch("snc");
  RunOptions opts;
  opts.output_dir = out.string();
  const RunSummary s =
      run(parse("experiment = snc-eval\n[snc]\na = [1, 1]\nb = [0, 1/2]\nc = [0, 0]\nd = [0, 1]\nbetas = 4\n"), opts);
  CHECK(s.exit_code == kOk);
  CHECK(slurp(out / "results.json").find("\"-1\"") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("results are byte-identical across runs and job counts") {
  const std::string text =
      "experiment = invariant-suite\n[potential]\ncount = 4\n[quantize]\nbetas = 1, 8, 32\n[fuzz]\ncases = 20\n";
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  RunOptions oa;
  oa.output_dir = a.string();
  RunOptions ob;
  ob.output_dir = b.string();
  ob.jobs = 4;
  CHECK(run(parse(text), oa).exit_code == kOk);
  CHECK(run(parse(text), ob).exit_code == kOk);
  CHECK(slurp(a / "results.json") == slurp(b / "results.json"));
  CHECK(slurp(a / "summary.txt") == slurp(b / "summary.txt"));
  fs::remove_all(a);
  fs::remove_all(b);
}
