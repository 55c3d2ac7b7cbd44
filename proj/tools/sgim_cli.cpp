// Command-line front end: benchmark / teachset / run / sweep / hist / report.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sgim/harness.hpp"

namespace fs = std::filesystem;
using namespace sgim;

namespace {

struct CommonOpts {
    std::string config_file;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> strategy;
    std::optional<std::size_t> total_movements;
    bool large_space = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_file, "JSON experiment config file");
    cmd->add_option("--seed", opts.seed, "random seed (overrides config)");
    cmd->add_option("--strategy", opts.strategy, "random|sagg_riac|sgim_d|demo_only");
    cmd->add_option("--total-movements", opts.total_movements, "movement budget");
    cmd->add_flag("--large", opts.large_space, "use the x20 task space");
}

ExperimentConfig resolve_config(const CommonOpts& opts) {
    ExperimentConfig cfg;
    if (!opts.config_file.empty()) cfg = load_experiment_config(opts.config_file);
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.strategy) cfg.strategy = strategy_from_name(*opts.strategy);
    if (opts.total_movements) cfg.total_movements = *opts.total_movements;
    if (opts.large_space) cfg.large_space = true;
    return cfg;
}

int run_one(const ExperimentConfig& cfg, const std::string& benchmark_file,
            const std::string& teachset_file, const std::string& out_dir) {
    auto bench_in = open_in(benchmark_file);
    const auto benchmark = load_benchmark(bench_in);
    std::vector<TeachingItem> teaching_set;
    if (cfg.strategy == Strategy::sgim_d || cfg.strategy == Strategy::demo_only) {
        if (teachset_file.empty()) {
            std::cerr << "strategy " << strategy_name(cfg.strategy) << " needs --teachset\n";
            return 1;
        }
        auto in = open_in(teachset_file);
        teaching_set = load_teaching_set(in);
    }
    const RunResult res = run_experiment(cfg, benchmark, teaching_set);
    write_run_artifacts(out_dir, cfg, res);
    std::cout << out_dir << ": final mean_error "
              << fmt9(res.timeline.empty() ? NAN : res.timeline.back().mean_error) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Goal-babbling fishing experiment runner"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string out_path, reachmap_path, out_dir;
    std::string benchmark_file, teachset_file;
    std::vector<std::string> strategies;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> inputs;
    std::string hist_input;

    auto* bench = app.add_subcommand("benchmark", "generate and persist the benchmark set");
    add_common(bench, opts);
    bench->add_option("--out", out_path, "benchmark output file")->required();
    bench->add_option("--reachmap", reachmap_path, "reach map output file");

    auto* teach = app.add_subcommand("teachset", "build and persist the teaching set");
    add_common(teach, opts);
    teach->add_option("--out", out_path, "teaching set output file")->required();

    auto* run = app.add_subcommand("run", "run one experiment");
    add_common(run, opts);
    run->add_option("--benchmark", benchmark_file, "benchmark file")->required();
    run->add_option("--teachset", teachset_file, "teaching set file");
    run->add_option("--out-dir", out_dir, "run output directory")->required();

    auto* sweep = app.add_subcommand("sweep", "run strategies x seeds");
    add_common(sweep, opts);
    sweep->add_option("--benchmark", benchmark_file, "benchmark file")->required();
    sweep->add_option("--teachset", teachset_file, "teaching set file");
    sweep->add_option("--strategies", strategies, "strategies to run")->required();
    sweep->add_option("--seeds", seeds, "seeds to run")->required();
    sweep->add_option("--out-dir", out_dir, "root output directory")->required();

    auto* hist = app.add_subcommand("hist", "export a grid histogram from a memory or goals file");
    add_common(hist, opts);
    hist->add_option("--input", hist_input, "memory.csv or goals.csv")->required();
    hist->add_option("--out", out_path, "histogram output file")->required();

    auto* report = app.add_subcommand("report", "aggregate timelines into mean +/- std per tick");
    report->add_option("--inputs", inputs, "run directories")->required();
    report->add_option("--out", out_path, "report output file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (bench->parsed()) {
            const ExperimentConfig cfg = resolve_config(opts);
            std::mt19937_64 rng(mix_seed(cfg.seed, 3));
            const BenchmarkResult result = generate_benchmark(cfg, rng);
            auto out = open_out(out_path);
            save_benchmark(out, result.points);
            if (!reachmap_path.empty()) {
                auto rout = open_out(reachmap_path);
                result.map.save(rout);
            }
            std::cout << "benchmark: " << result.points.size() << " points, "
                      << result.map.occupied_count() << " occupied cells\n";
        } else if (teach->parsed()) {
            const ExperimentConfig cfg = resolve_config(opts);
            std::mt19937_64 rng(mix_seed(cfg.seed, 4));
            const auto items = build_teaching_set(cfg.environment, cfg.teacher, cfg.task_bounds, rng);
            auto out = open_out(out_path);
            save_teaching_set(out, items);
            std::cout << "teaching set: " << items.size() << " items\n";
        } else if (run->parsed()) {
            if (!opts.seed) {
                std::cerr << "run requires --seed\n";
                return 1;
            }
            return run_one(resolve_config(opts), benchmark_file, teachset_file, out_dir);
        } else if (sweep->parsed()) {
            for (const std::string& strat : strategies) {
                for (std::uint64_t seed : seeds) {
                    CommonOpts o = opts;
                    o.seed = seed;
                    o.strategy = strat;
                    ExperimentConfig cfg = resolve_config(o);
                    const std::string dir = out_dir + "/" + strat + "_seed" + std::to_string(seed);
                    const int rc = run_one(cfg, benchmark_file, teachset_file, dir);
                    if (rc != 0) return rc;
                }
            }
        } else if (hist->parsed()) {
            const ExperimentConfig cfg = resolve_config(opts);
            std::vector<TaskPoint> points;
            auto in = open_in(hist_input);
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                const auto cells = split_csv(line);
                if (cells.size() == 2) {
                    points.push_back({std::stod(cells[0]), std::stod(cells[1])});
                } else if (cells.size() == 2 + kActionDim + 2) {
                    points.push_back({std::stod(cells[2 + kActionDim]),
                                      std::stod(cells[3 + kActionDim])});
                } else {
                    throw std::runtime_error("unrecognized input line: " + line);
                }
            }
            const auto counts =
                export_histogram(points, cfg.effective_bounds(), cfg.grid_cols, cfg.grid_rows);
            auto out = open_out(out_path);
            write_histogram(out, counts, cfg.grid_cols, cfg.grid_rows);
            std::cout << "histogram: " << points.size() << " points\n";
        } else if (report->parsed()) {
            std::vector<std::size_t> ticks;
            std::vector<std::vector<double>> per_run;
            for (const std::string& dir : inputs) {
                auto in = open_in(dir + "/timeline.csv");
                std::string line;
                std::getline(in, line);  // header
                std::vector<double> errs;
                std::vector<std::size_t> t;
                while (std::getline(in, line)) {
                    if (line.empty()) continue;
                    const auto cells = split_csv(line);
                    t.push_back(std::stoul(cells[0]));
                    errs.push_back(std::stod(cells[1]));
                }
                if (ticks.empty())
                    ticks = t;
                else if (ticks != t)
                    throw std::runtime_error("timeline ticks differ across runs");
                per_run.push_back(std::move(errs));
            }
            auto out = open_out(out_path);
            out << "movement_count,mean,std\n";
            const double n = static_cast<double>(per_run.size());
            for (std::size_t i = 0; i < ticks.size(); ++i) {
                double mean = 0.0;
                for (const auto& errs : per_run) mean += errs[i];
                mean /= n;
                double var = 0.0;
                for (const auto& errs : per_run) var += (errs[i] - mean) * (errs[i] - mean);
                out << ticks[i] << ',' << fmt9(mean) << ',' << fmt9(std::sqrt(var / n)) << '\n';
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
