#include <CLI11.hpp>
#include <Eigen/Core>
#include <cstdint>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "idd/benchmark.hpp"
#include "idd/config.hpp"
#include "idd/detector.hpp"
#include "idd/io.hpp"
#include "idd/ot.hpp"
#include "idd/synthgen.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;
constexpr int kExitBenchmarkPoint = 4;

using idd::harness::FileConfig;

FileConfig load_config(const std::string& path) {
    if (path.empty()) return FileConfig{};
    return idd::harness::parse_config_file(path);
}

int cmd_calibrate(const std::string& config_path, const std::string& stream_path,
                  const std::string& out_path, std::uint64_t seed, bool seed_set) {
    FileConfig cfg = load_config(config_path);
    if (seed_set) cfg.stream.spec.seed = seed;

    std::vector<idd::EmpiricalMeasure> batches;
    if (!stream_path.empty()) {
        for (const auto& batch : idd::io::read_stream(stream_path))
            batches.push_back(idd::EmpiricalMeasure::uniform(batch.points));
    } else {
        auto rep = idd::harness::make_replication(cfg.stream, cfg.benchmark.n0, 1, 0,
                                                  cfg.stream.spec.seed);
        batches = std::move(rep.calibration);
    }
    idd::MonitorModel model = idd::calibrate(batches, cfg.detector);
    idd::io::save_model(out_path, model);
    std::cout << "calibrated on " << batches.size() << " batches; K = " << model.basis.truncation
              << ", rank = " << model.basis.rank() << ", h_t2 = " << model.h_t2
              << ", h_spe = " << model.h_spe << "\n";
    return kExitOk;
}

int cmd_monitor(const std::string& model_path, const std::string& stream_path,
                const std::string& out_path) {
    idd::MonitorModel model = idd::io::load_model(model_path);
    idd::io::StreamReader reader(stream_path);

    std::ofstream out(out_path);
    if (!out) throw idd::IoError("cannot open '" + out_path + "' for writing");
    out << "t,t2,spe,alarm,triggered_by\n";
    out.precision(17);

    int alarms = 0, steps = 0;
    while (auto batch = reader.next()) {
        idd::MonitorUpdate update =
            idd::step(model, idd::EmpiricalMeasure::uniform(batch->points), batch->t);
        out << update.t << ',' << update.stats.t2 << ',' << update.stats.spe << ','
            << (update.alarm ? 1 : 0) << ',' << idd::io::trigger_name(update.triggered_by) << "\n";
        alarms += update.alarm ? 1 : 0;
        ++steps;
    }
    if (!out) throw idd::IoError("failed writing alarms to '" + out_path + "'");
    std::cout << "monitored " << steps << " batches, " << alarms << " alarms\n";
    return kExitOk;
}

int cmd_simulate(const std::string& config_path, const std::string& out_path, std::uint64_t seed,
                 bool seed_set) {
    FileConfig cfg = load_config(config_path);
    if (seed_set) cfg.stream.spec.seed = seed;
    auto raw = idd::harness::make_raw_stream(cfg.stream, cfg.stream.spec.seed);
    idd::io::write_stream(out_path, raw);
    std::cout << "wrote " << raw.size() << " batches to " << out_path << "\n";
    return kExitOk;
}

int cmd_benchmark(const std::string& config_path, const std::string& out_prefix,
                  std::uint64_t seed, bool seed_set, int threads,
                  const std::vector<double>& target_override,
                  const std::vector<std::string>& detector_override) {
    FileConfig cfg = load_config(config_path);
    idd::harness::BenchmarkConfig bench = cfg.benchmark;
    if (seed_set) bench.seed = seed;
    if (threads > 0) bench.threads = threads;
    if (!target_override.empty()) bench.target_arl0 = target_override;
    if (!detector_override.empty()) {
        bench.detectors.clear();
        for (const auto& name : detector_override) {
            idd::harness::DetectorSpec spec;
            spec.name = name;
            spec.idd = cfg.detector;
            bench.detectors.push_back(std::move(spec));
        }
    }

    idd::harness::BenchmarkReport report = idd::harness::run_benchmark(bench);
    idd::harness::write_report_json(out_prefix + ".json", report);
    idd::harness::write_report_csv(out_prefix + ".csv", report);

    for (const auto& cell : report.cells)
        std::cout << cell.detector << " @ ARL0 target " << cell.target_arl0
                  << (cell.matched ? "" : " [UNMATCHED]") << ": ARL0 = " << cell.arl0 << " +- "
                  << cell.arl0_se << ", ARL1 = " << cell.arl1 << " +- " << cell.arl1_se
                  << ", detection rate = " << cell.detection_rate << "\n";
    if (!report.all_matched) {
        std::cerr << "warning: some cells missed their target ARL0; partial results written\n";
        return kExitBenchmarkPoint;
    }
    return kExitOk;
}

// Quick invariant audit over the core numerical routes.
int cmd_verify() {
    int failures = 0;
    auto check = [&failures](bool ok, const std::string& label) {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << label << "\n";
        failures += ok ? 0 : 1;
    };
    std::mt19937_64 gen(20240817);
    std::normal_distribution<double> dist(0.0, 1.0);
    auto cloud = [&](int n, int d) {
        Eigen::MatrixXd m(n, d);
        for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = dist(gen);
        return idd::EmpiricalMeasure::uniform(std::move(m));
    };

    {
        bool ok = true;
        for (int rep = 0; rep < 10 && ok; ++rep) {
            auto a = cloud(5, 2), b = cloud(6, 2);
            auto pi = idd::sinkhorn_plan(a, b, idd::default_epsilon(idd::cost_matrix(a, b)));
            ok = pi.marginal_violation() <= 1e-7;
        }
        check(ok, "sinkhorn plans satisfy marginal feasibility");
    }
    {
        bool ok = true;
        for (int rep = 0; rep < 10 && ok; ++rep) {
            auto a = cloud(5, 1), b = cloud(5, 1);
            auto c = idd::cost_matrix(a, b);
            double exact = idd::transport_cost(idd::exact_plan_1d(a, b), c);
            double brute = idd::transport_cost(idd::brute_force_plan(a, b), c);
            ok = std::abs(exact - brute) <= 1e-9 * std::max(1.0, brute);
        }
        check(ok, "1-D monotone coupling matches exhaustive search");
    }
    {
        bool ok = true;
        for (int rep = 0; rep < 10 && ok; ++rep) {
            auto a = cloud(4, 2), b = cloud(5, 2);
            auto c = idd::cost_matrix(a, b);
            auto pi = idd::sinkhorn_plan(a, b, idd::default_epsilon(c, 0.05));
            auto proj = idd::barycentric_projection(pi, b);
            auto field = idd::tangent_field(proj, a);
            double lhs = (field.vectors.rowwise().squaredNorm().array() *
                          field.ref_weights.array()).sum();
            double cost = idd::transport_cost(pi, c);
            double within = 0.0;
            for (Eigen::Index i = 0; i < pi.plan.rows(); ++i)
                for (Eigen::Index j = 0; j < pi.plan.cols(); ++j)
                    within += pi.plan(i, j) * (b.support().row(j) - proj.row(i)).squaredNorm();
            ok = std::abs(lhs - (cost - within)) <= 1e-10 && lhs <= cost + 1e-12;
        }
        check(ok, "barycentric projection variance decomposition");
    }
    {
        auto x = cloud(6, 3);
        Eigen::RowVector3d delta(0.8, -0.3, 0.5);
        auto y = idd::EmpiricalMeasure::uniform(x.support().rowwise() + delta);
        auto c = idd::cost_matrix(x, y);
        auto pi = idd::brute_force_plan(x, y);
        bool ok = std::abs(idd::w2(pi, c) - delta.norm()) <= 1e-9;
        check(ok, "translation identity W2 = |delta|");
    }
    {
        auto params = idd::synth::random_deformation(3, 3, 0.3, 5.0, 7);
        bool ok = idd::synth::monotonicity_check(params, 20000, 11).pass;
        const double ang = 3.0 * M_PI / 4.0;
        auto rotation = [&](const Eigen::VectorXd& v) {
            Eigen::VectorXd y(2);
            const double u = v[0] - 0.5, w = v[1] - 0.5;
            y << 0.5 + std::cos(ang) * u - std::sin(ang) * w,
                0.5 + std::sin(ang) * u + std::cos(ang) * w;
            return y;
        };
        ok = ok && !idd::synth::monotonicity_check(rotation, 2, 2000, 13).pass;
        check(ok, "deformations are monotone, rotations are rejected");
    }
    {
        bool ok = idd::order_statistic_index(0.05, 100) == 95 &&
                  idd::order_statistic_index(0.01, 200) == 198;
        ok = ok && std::abs(idd::arl_lower_bound(100, 0.01, 0.01) -
                            (101 + 1.0 / (0.02 + 2.0 / 101))) < 1e-9;
        check(ok, "order-statistic thresholds and the run-length bound");
    }
    std::cout << (failures == 0 ? "verify: all checks passed\n"
                                : "verify: " + std::to_string(failures) + " check(s) failed\n");
    return failures == 0 ? kExitOk : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distribution-valued online change-point detection"};
    app.require_subcommand(0, 1);

    bool print_schema = false;
    app.add_flag("--print-schema", print_schema, "print the config file schema and exit");

    std::string config_path, stream_path, model_path, out_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    std::vector<double> target_override;
    std::vector<std::string> detector_override;

    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "master seed override")->each([&](const std::string&) {
            seed_set = true;
        });
    };

    auto* calibrate = app.add_subcommand("calibrate", "fit a monitor model");
    calibrate->add_option("--config", config_path, "config file");
    calibrate->add_option("--stream", stream_path, "calibration stream CSV (otherwise synthetic)");
    calibrate->add_option("--out", out_path, "output model file")->required();
    add_seed(calibrate);

    auto* monitor = app.add_subcommand("monitor", "run a model over a stream file");
    monitor->add_option("--model", model_path, "model file")->required();
    monitor->add_option("--stream", stream_path, "stream CSV")->required();
    monitor->add_option("--out", out_path, "output alarm CSV")->required();

    auto* simulate = app.add_subcommand("simulate", "emit a stream file from the spec");
    simulate->add_option("--config", config_path, "config file");
    simulate->add_option("--out", out_path, "output stream CSV")->required();
    add_seed(simulate);

    auto* benchmark = app.add_subcommand("benchmark", "Monte-Carlo ARL0/ARL1 report");
    benchmark->add_option("--config", config_path, "config file");
    benchmark->add_option("--out", out_path, "output prefix (.json/.csv)")->required();
    benchmark->add_option("--threads", threads, "worker threads (0 = hardware)");
    benchmark->add_option("--target-arl0", target_override, "override target ARL0 list");
    benchmark->add_option("--detector", detector_override, "override detector list");
    add_seed(benchmark);

    auto* verify = app.add_subcommand("verify", "run the quick invariant audit");

    CLI11_PARSE(app, argc, argv);

    if (print_schema) {
        std::cout << idd::harness::config_schema();
        return kExitOk;
    }
    if (app.get_subcommands().empty()) {
        std::cout << app.help();
        return kExitOk;
    }

    try {
        if (calibrate->parsed())
            return cmd_calibrate(config_path, stream_path, out_path, seed, seed_set);
        if (monitor->parsed()) return cmd_monitor(model_path, stream_path, out_path);
        if (simulate->parsed()) return cmd_simulate(config_path, out_path, seed, seed_set);
        if (benchmark->parsed())
            return cmd_benchmark(config_path, out_path, seed, seed_set, threads, target_override,
                                 detector_override);
        if (verify->parsed()) return cmd_verify();
    } catch (const idd::ConvergenceError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const idd::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
