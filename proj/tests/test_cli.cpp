#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#ifndef IDD_CLI_PATH
#error "IDD_CLI_PATH must point at the built binary"
#endif

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(IDD_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

const char* kConfig1d = R"({
  "stream": {"kind": "gaussian_translation", "d": 1, "batch_size": 30,
              "horizon": 30, "change_point": 30, "seed": 5,
              "gauss_sigma": 0.5, "gauss_delta": 0.0},
  "detector": {"alpha_t2": 0.05, "alpha_spe": 0.05, "m_atoms": 12,
                "solver": "exact_1d", "k_override": 3},
  "benchmark": {"n0": 25}
})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("calibrate on an undersized stream exits with the input code") {
    write_file("/tmp/idd_cli_two.csv", "t,x1\n1,0.1\n1,0.4\n2,0.2\n2,0.5\n");
    write_file("/tmp/idd_cli_cfg.json", kConfig1d);
    CHECK(run_cli("calibrate --config /tmp/idd_cli_cfg.json --stream /tmp/idd_cli_two.csv "
                  "--out /tmp/idd_cli_model.json") == 2);
    std::remove("/tmp/idd_cli_two.csv");
}

TEST_CASE("bad config keys exit with the input code") {
    write_file("/tmp/idd_cli_bad.json", R"({"stream": {"knid": "barycenter"}})");
    CHECK(run_cli("simulate --config /tmp/idd_cli_bad.json --out /tmp/idd_cli_s.csv") == 2);
    std::remove("/tmp/idd_cli_bad.json");
}

TEST_CASE("calibrate is byte-deterministic and self-monitoring is near level") {
    write_file("/tmp/idd_cli_cfg.json", kConfig1d);
    REQUIRE(run_cli("simulate --config /tmp/idd_cli_cfg.json --out /tmp/idd_cli_stream.csv") == 0);
    REQUIRE(run_cli("calibrate --config /tmp/idd_cli_cfg.json --stream /tmp/idd_cli_stream.csv "
                    "--out /tmp/idd_cli_m1.json") == 0);
    REQUIRE(run_cli("calibrate --config /tmp/idd_cli_cfg.json --stream /tmp/idd_cli_stream.csv "
                    "--out /tmp/idd_cli_m2.json") == 0);
    CHECK(slurp("/tmp/idd_cli_m1.json") == slurp("/tmp/idd_cli_m2.json"));

    // monitoring the calibration stream itself: in-sample exceedance is
    // bounded by the order-statistic construction
    REQUIRE(run_cli("monitor --model /tmp/idd_cli_m1.json --stream /tmp/idd_cli_stream.csv "
                    "--out /tmp/idd_cli_alarms.csv") == 0);
    std::ifstream in("/tmp/idd_cli_alarms.csv");
    std::string line;
    std::getline(in, line);  // header
    int alarms = 0, rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++rows;
        auto pos = line.rfind(",1,");
        alarms += (pos != std::string::npos) ? 1 : 0;
    }
    CHECK(rows == 30);
    const double n0 = 30.0;
    CHECK(static_cast<double>(alarms) / n0 <= 0.05 + 0.05 + 2.0 / (n0 + 1));

    std::remove("/tmp/idd_cli_stream.csv");
    std::remove("/tmp/idd_cli_m1.json");
    std::remove("/tmp/idd_cli_m2.json");
    std::remove("/tmp/idd_cli_alarms.csv");
}

TEST_CASE("monitoring an empty stream writes an empty alarm file and exits 0") {
    write_file("/tmp/idd_cli_cfg.json", kConfig1d);
    write_file("/tmp/idd_cli_empty.csv", "t,x1\n");
    REQUIRE(run_cli("calibrate --config /tmp/idd_cli_cfg.json --out /tmp/idd_cli_m.json") == 0);
    CHECK(run_cli("monitor --model /tmp/idd_cli_m.json --stream /tmp/idd_cli_empty.csv "
                  "--out /tmp/idd_cli_a.csv") == 0);
    CHECK(slurp("/tmp/idd_cli_a.csv") == "t,t2,spe,alarm,triggered_by\n");
    std::remove("/tmp/idd_cli_empty.csv");
    std::remove("/tmp/idd_cli_m.json");
    std::remove("/tmp/idd_cli_a.csv");
}

TEST_CASE("simulate is deterministic in the seed") {
    write_file("/tmp/idd_cli_cfg.json", kConfig1d);
    REQUIRE(run_cli("simulate --config /tmp/idd_cli_cfg.json --seed 99 --out /tmp/idd_cli_s1.csv") ==
            0);
    REQUIRE(run_cli("simulate --config /tmp/idd_cli_cfg.json --seed 99 --out /tmp/idd_cli_s2.csv") ==
            0);
    REQUIRE(run_cli("simulate --config /tmp/idd_cli_cfg.json --seed 98 --out /tmp/idd_cli_s3.csv") ==
            0);
    CHECK(slurp("/tmp/idd_cli_s1.csv") == slurp("/tmp/idd_cli_s2.csv"));
    CHECK(slurp("/tmp/idd_cli_s1.csv") != slurp("/tmp/idd_cli_s3.csv"));
    std::remove("/tmp/idd_cli_s1.csv");
    std::remove("/tmp/idd_cli_s2.csv");
    std::remove("/tmp/idd_cli_s3.csv");
    std::remove("/tmp/idd_cli_cfg.json");
}

TEST_CASE("verify and print-schema succeed") {
    CHECK(run_cli("verify") == 0);
    CHECK(run_cli("--print-schema") == 0);
}

TEST_CASE("benchmark writes report files and exits cleanly") {
    write_file("/tmp/idd_cli_bench.json", R"({
      "stream": {"kind": "gaussian_translation", "d": 1, "batch_size": 20,
                  "seed": 3, "gauss_sigma": 0.5, "gauss_delta": 1.5},
      "detector": {"alpha_t2": 0.05, "alpha_spe": 0.05, "m_atoms": 10,
                    "solver": "exact_1d", "k_override": 2},
      "benchmark": {"detectors": ["idd"], "target_arl0": [25], "replications": 3,
                     "null_replications": 20, "n0": 12, "kappa": 4, "monitor_horizon": 150}
    })");
    CHECK(run_cli("benchmark --config /tmp/idd_cli_bench.json --threads 2 "
                  "--out /tmp/idd_cli_report") == 0);
    CHECK(slurp("/tmp/idd_cli_report.json").find("schema_version") != std::string::npos);
    CHECK(slurp("/tmp/idd_cli_report.csv").rfind("detector,", 0) == 0);
    std::remove("/tmp/idd_cli_bench.json");
    std::remove("/tmp/idd_cli_report.json");
    std::remove("/tmp/idd_cli_report.csv");
}

}  // TEST_SUITE cli
