#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "riccati_spectra/cli.hpp"
#include "riccati_spectra/system_file.hpp"
#include "support/suite.hpp"

using namespace riccati_spectra;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "riccati-spectra");
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "riccati_spectra_cli_tests";
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream(path) << text;
  return path.string();
}

std::string plant_file(const std::string& name, const suite::Plant& p) {
  SystemFile f;
  f.A = p.A;
  f.C = p.C;
  f.W = p.W;
  f.V = p.V;
  f.label = p.name;
  return write_temp(name, to_json_text(f));
}

const std::string kScalar = R"({"schema_version": "1", "label": "scalar", "A": [[-1]], "C": [[1]], "W": [[3]], "V": [[1]]})";

}  // namespace

TEST_CASE("analyze the scalar file") {
  const Run r = run({"analyze", write_temp("scalar.json", kScalar)});
  CHECK(r.code == 0);
  CHECK(r.out.find("trace_from_care") != std::string::npos);
  CHECK(r.out.find("overall                             PASS") != std::string::npos);
}

TEST_CASE("input errors exit with 1") {
  SUBCASE("V = 0") {
    const Run r = run({"analyze", write_temp("v0.json", R"({"schema_version":"1","A":[[-1]],"C":[[1]],"W":[[3]],"V":[[0]]})")});
    CHECK(r.code == 1);
    CHECK(r.err.find("V not positive definite") != std::string::npos);
  }
  SUBCASE("undetectable") {
    const Run r = run({"analyze", write_temp("undet.json", R"({"schema_version":"1","A":[[1]],"C":[[0]],"W":[[1]],"V":[[1]]})")});
    CHECK(r.code == 1);
    CHECK(r.err.find("unobservable eigenvalue(s) 1") != std::string::npos);
  }
  SUBCASE("syntax error names line and column") {
    const Run r = run({"analyze", write_temp("bad.json", "{\n  \"schema_version\": \"1\",\n  \"A\": [[-1]]\n  \"C\": 1\n}")});
    CHECK(r.code == 1);
    CHECK(r.err.find("bad.json:4:") != std::string::npos);
  }
  SUBCASE("field diagnostics") {
    CHECK(run({"analyze", write_temp("missing.json", R"({"schema_version":"1","A":[[-1]],"C":[[1]],"W":[[3]]})")})
              .err.find("field 'V' is missing") != std::string::npos);
    CHECK(run({"analyze", write_temp("ragged.json",
                                     R"({"schema_version":"1","A":[[-1,0],[0]],"C":[[1,0]],"W":[[1,0],[0,1]],"V":[[1]]})")})
              .err.find("field 'A' row 1") != std::string::npos);
    CHECK(run({"analyze", write_temp("string.json", R"({"schema_version":"1","A":[["x"]],"C":[[1]],"W":[[3]],"V":[[1]]})")})
              .err.find("is not a number") != std::string::npos);
    CHECK(run({"analyze", write_temp("version.json", R"({"schema_version":"2","A":[[-1]],"C":[[1]],"W":[[3]],"V":[[1]]})")})
              .code == 1);
    CHECK(run({"analyze", write_temp("dims.json", R"({"schema_version":"1","A":[[-1]],"C":[[1]],"W":[[3]],"V":[[1,0],[0,1]]})")})
              .err.find("field 'V' must be 1x1") != std::string::npos);
  }
  SUBCASE("no stabilizing solution") {
    const Run r = run({"analyze", write_temp("osc.json",
                                             R"({"schema_version":"1","A":[[0,1],[-1,0]],"C":[[1,0]],"W":[[0,0],[0,0]],"V":[[1]]})")});
    CHECK(r.code == 1);
    CHECK(r.err.find("no stabilizing solution") != std::string::npos);
  }
  SUBCASE("bad flags") {
    CHECK(run({"analyze"}).code == 1);
    CHECK(run({"analyze", "x.json", "--format", "yaml"}).code == 1);
    CHECK(run({"analyze", "/nonexistent/file.json"}).code == 1);
  }
}

TEST_CASE("verify") {
  SUBCASE("noise-free unstable scalar") {
    const Run r = run({"verify", write_temp("w0.json", R"({"schema_version":"1","A":[[1]],"C":[[1]],"W":[[0]],"V":[[1]]})"),
                       "--format", "json"});
    CHECK(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["spectral"]["trace_from_care"].get<double>() == doctest::Approx(2.0));
    CHECK(doc["spectral"]["trace_from_integral"].get<double>() == doctest::Approx(2.0));
    CHECK(doc["verdict"]["passed"].get<bool>());
  }
  SUBCASE("random plant with four states and two outputs") {
    suite::Sampler s(61);
    suite::Plant p;
    do {
      p.A = s.gaussian(4, 4);
      p.C = s.gaussian(2, 4);
      const RealMatrix G = s.gaussian(4, 4);
      p.W = G * G.transpose();
      const RealMatrix H = s.gaussian(2, 2);
      p.V = RealMatrix::Identity(2, 2) + H * H.transpose();
      p.name = "m4l2";
    } while (!suite::acceptable(p));
    const Run r = run({"verify", plant_file("m4l2.json", p), "--tol", "1e-6"});
    CHECK(r.code == 0);
    CHECK(r.out.find("zeros_poles_identity") != std::string::npos);
    CHECK(r.out.find("bode_identity") != std::string::npos);
  }
  SUBCASE("flags select the extra checks") {
    const Run r = run({"verify", write_temp("scalar.json", kScalar), "--with-bode", "--format", "json"});
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["spectral"]["zeros_poles"].is_null());
    CHECK(doc["spectral"]["bode"].is_object());
    CHECK(doc["special_cases"].empty());
  }
}

TEST_CASE("JSON report format") {
  const std::string path = write_temp("scalar.json", kScalar);
  const Run r = run({"verify", path, "--format", "json"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::ordered_json::parse(r.out);
  std::vector<std::string> keys;
  for (const auto& item : doc.items()) keys.push_back(item.key());
  const std::vector<std::string> expected{"schema_version", "command",       "model",      "care",   "spectral",
                                          "bounds",         "special_cases", "simulation", "verdict"};
  CHECK(keys == expected);
  CHECK(doc["schema_version"] == "1");
  CHECK(doc.dump(2) + "\n" == r.out);  // round trip
  CHECK(run({"verify", path, "--format", "json"}).out == r.out);

  SUBCASE("text carries the same numbers") {
    const Run text = run({"verify", path});
    std::ostringstream os;
    os.precision(12);
    os << doc["spectral"]["trace_from_integral"].get<double>();
    CHECK(text.out.find(os.str().substr(0, 10)) != std::string::npos);
  }
  SUBCASE("--output writes a file") {
    const std::string out_path = write_temp("report.json", "");
    const Run o = run({"verify", path, "--format", "json", "--output", out_path});
    CHECK(o.out.empty());
    std::ifstream in(out_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    CHECK(buffer.str() == r.out);
  }
  SUBCASE("unbounded trace shows up as null") {
    const Run u = run({"analyze", write_temp("wide.json",
                                              R"({"schema_version":"1","A":[[-1,0],[0,-2]],"C":[[1,1]],"W":[[1,0],[0,1]],"V":[[1]]})"),
                       "--format", "json"});
    CHECK(nlohmann::json::parse(u.out)["bounds"]["upper"].is_null());
  }
}

TEST_CASE("jensen command") {
  SUBCASE("(s-1)/(s+1)") {
    const Run r = run({"jensen", "--num=-1,1", "--den=1,1", "--format", "json"});
    CHECK(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["jensen"]["closed_form"].get<double>() == doctest::Approx(0.0).scale(1.0));
    CHECK(doc["jensen"]["residual"].get<double>() <= 1e-8);
  }
  SUBCASE("(s+2)/(s-1) in the second form") {
    const Run r = run({"jensen", "--num=2,1", "--den=-1,1", "--mode", "prop2", "--format", "json"});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["jensen"]["closed_form"].get<double>() == doctest::Approx(0.5));
  }
  SUBCASE("errors") {
    CHECK(run({"jensen", "--num=1", "--den=1,1"}).code == 1);
    const Run axis = run({"jensen", "--num=1,0,1", "--den=1,2,1"});
    CHECK(axis.code == 1);
    CHECK(axis.err.find("imaginary axis") != std::string::npos);
    CHECK(run({"jensen", "--num=2,1", "--den=-1,1"}).code == 1);  // unstable pole in the first form
  }
}

TEST_CASE("simulate command") {
  const std::string path = write_temp("scalar.json", kScalar);
  SUBCASE("defaults pass") {
    const Run r = run({"simulate", path, "--format", "json"});
    CHECK(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["simulation"]["relative_gap_output"].get<double>() <= 0.05);
    CHECK(doc["simulation"]["whiteness"]["passed"].get<bool>());
  }
  SUBCASE("repeated seed gives identical bytes") {
    const Run a = run({"simulate", path, "--trials", "20", "--t-end", "10", "--seed", "7"});
    const Run b = run({"simulate", path, "--trials", "20", "--t-end", "10", "--seed", "7"});
    CHECK(a.out == b.out);
  }
  SUBCASE("step beyond the explicit stability limit") {
    const Run r = run({"simulate", path, "--dt", "1.5", "--t-end", "500", "--trials", "2"});
    CHECK(r.code == 3);
    CHECK(r.err.find("trial -1") != std::string::npos);
  }
  SUBCASE("transient gain mode") {
    const Run r = run({"simulate", path, "--trials", "50", "--t-end", "40", "--gain-mode", "transient"});
    CHECK(r.code == 0);
  }
}

TEST_CASE("the installed executable") {
  const std::string path = write_temp("scalar.json", kScalar);
  const std::string cmd = std::string(RICCATI_SPECTRA_CLI) + " analyze " + path + " > /dev/null";
  CHECK(std::system(cmd.c_str()) == 0);
}
