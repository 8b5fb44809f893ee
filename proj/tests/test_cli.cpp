#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <gazeguard/io.hpp>
#include <gazeguard/types.hpp>
#include <gazeguard/validation.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using namespace gazeguard;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + GAZEGUARD_BIN + "\" " + args;
  const int status = std::system(cmd.c_str());
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct TempFile {
  std::string path;
  explicit TempFile(std::string name) : path(std::move(name)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("help exits cleanly") {
  CHECK(run("--help > cli_help.txt") == 0);
  CHECK(slurp("cli_help.txt").find("privatize") != std::string::npos);
  std::remove("cli_help.txt");
}

TEST_CASE("unknown flags fail with an InvalidParameter error line") {
  const TempFile err("cli_err.txt");
  CHECK(run("privatize --no-such-flag 2> cli_err.txt") == 1);
  CHECK(slurp(err.path).find("error: InvalidParameter") != std::string::npos);
}

TEST_CASE("missing input file fails with an IoError line") {
  const TempFile err("cli_io_err.txt");
  CHECK(run("validate --recording missing.csv 2> cli_io_err.txt") == 1);
  CHECK(slurp(err.path).find("error: IoError") != std::string::npos);
}

TEST_CASE("synth is byte-reproducible for a fixed seed") {
  const TempFile a("cli_synth_a.csv");
  const TempFile b("cli_synth_b.csv");
  const std::string flags = "synth --users 2 --trials 2 --duration 10 --seed 9 --out ";
  REQUIRE(run(flags + a.path) == 0);
  REQUIRE(run(flags + b.path) == 0);
  const std::string bytes = slurp(a.path);
  CHECK(!bytes.empty());
  CHECK(bytes == slurp(b.path));
}

TEST_CASE("privatize with sigma zero copies the input bytes") {
  const TempFile in("cli_priv_in.csv");
  const TempFile out("cli_priv_out.csv");
  REQUIRE(run("synth --users 2 --trials 2 --duration 10 --seed 4 --out " + in.path) == 0);
  REQUIRE(run("privatize --input " + in.path + " --output " + out.path +
              " --mechanism gaussian --sigma 0 > /dev/null") == 0);
  CHECK(slurp(out.path) == slurp(in.path));
}

TEST_CASE("privatize accepts a JSON mechanism config") {
  const TempFile in("cli_cfg_in.csv");
  const TempFile out("cli_cfg_out.csv");
  const TempFile cfg("cli_mech.json");
  REQUIRE(run("synth --users 2 --trials 2 --duration 10 --seed 4 --out " + in.path) == 0);
  {
    std::ofstream f(cfg.path);
    f << "{\"mechanism\": \"spatial\", \"l\": 144}";
  }
  CHECK(run("privatize --input " + in.path + " --output " + out.path +
            " --config " + cfg.path + " > /dev/null") == 0);
  CHECK(!slurp(out.path).empty());

  const TempFile bad("cli_mech_bad.json");
  const TempFile err("cli_cfg_err.txt");
  {
    std::ofstream f(bad.path);
    f << "{\"mechanism\": \"gaussian\"}";  // missing sigma
  }
  CHECK(run("privatize --input " + in.path + " --output " + out.path +
            " --config " + bad.path + " 2> " + err.path) == 1);
  CHECK(slurp(err.path).find("error: SchemaError") != std::string::npos);
}

TEST_CASE("identify with reference equal to query is perfect") {
  const TempFile data("cli_id_data.csv");
  const TempFile log("cli_id_log.txt");
  REQUIRE(run("synth --users 2 --trials 2 --duration 10 --seed 8 --out " + data.path) == 0);
  CHECK(run("identify --query " + data.path + " --reference " + data.path +
            " > " + log.path) == 0);
  CHECK(slurp(log.path).find("mean_accuracy 1.000000000") != std::string::npos);
}

TEST_CASE("sweep writes one row per strength") {
  const TempFile data("cli_sweep_data.csv");
  const TempFile curve("cli_sweep_curve.csv");
  REQUIRE(run("synth --users 2 --trials 2 --duration 10 --seed 2 --out " + data.path) == 0);
  CHECK(run("sweep --input " + data.path +
            " --mechanism temporal --strengths 3 --jobs 1 --out " + curve.path +
            " > /dev/null") == 0);
  std::ifstream in(curve.path);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "mechanism,strength,id_accuracy,aoi_f1");
  CHECK(lines[1].rfind("temporal,3,", 0) == 0);

  const TempFile err("cli_sweep_err.txt");
  CHECK(run("sweep --input " + data.path +
            " --mechanism temporal --strengths 5,3 --out x.csv 2> " + err.path) == 1);
  CHECK(slurp(err.path).find("error: InvalidParameter") != std::string::npos);
}

TEST_CASE("validate reports zero error on a perfect recording") {
  const ValidationSchedule sched = default_schedule();
  GazeStream recording;
  recording.user_id = "v";
  recording.trial_id = 1;
  recording.nominal_rate_hz = 72.0;
  const double total = sched.dwell_s * static_cast<double>(sched.order.size());
  const std::size_t n = static_cast<std::size_t>(total * 72.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / 72.0;
    std::size_t slot = static_cast<std::size_t>(t / sched.dwell_s);
    if (slot >= sched.order.size()) slot = sched.order.size() - 1;
    const GazeSample c = sched.target_center(sched.order[slot]);
    recording.samples.push_back({c.theta_deg, c.psi_deg, t});
  }
  const TempFile rec("cli_val_rec.csv");
  const TempFile log("cli_val_log.txt");
  write_stream_csv({recording}, rec.path);
  CHECK(run("validate --recording " + rec.path + " > " + log.path) == 0);
  CHECK(slurp(log.path).find("overall mean 0.000000000") != std::string::npos);
}

TEST_CASE("aoi identity retention from the command line") {
  const TempFile data("cli_aoi_data.csv");
  const TempFile scene("cli_aoi_scene.json");
  const TempFile log("cli_aoi_log.txt");
  GazeStream s;
  s.user_id = "u1";
  s.trial_id = 1;
  s.nominal_rate_hz = 10.0;
  for (int i = 0; i < 30; ++i) {
    s.samples.push_back({static_cast<double>(i % 12), 0.0, i / 10.0});
  }
  write_stream_csv({s}, data.path);
  {
    std::ofstream f(scene.path);
    f << "[{\"id\": \"panel\", \"theta_min\": 0, \"theta_max\": 6, "
         "\"psi_min\": -5, \"psi_max\": 5}]";
  }
  CHECK(run("aoi --original " + data.path + " --privatized " + data.path +
            " --scene " + scene.path + " > " + log.path) == 0);
  CHECK(slurp(log.path).find("f1 1.000000000") != std::string::npos);
}

TEST_CASE("bench runs on a short stream") {
  CHECK(run("bench --mechanism gaussian --samples 10000 > /dev/null") == 0);
  const TempFile err("cli_bench_err.txt");
  CHECK(run("bench --mechanism gaussian --samples 100 2> " + err.path) == 1);
  CHECK(slurp(err.path).find("error: InvalidParameter") != std::string::npos);
}
