// lpp: batch front end for the last-passage laboratory.
//
// Subcommands: shape, simulate, sweep, verify, plot.  Exit codes: 0 ok,
// 2 config/usage error, 3 verification failure.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lpp/experiments.hpp"
#include "lpp/io.hpp"
#include "lpp/shapes.hpp"
#include "lpp/suites.hpp"

namespace {

using namespace lpp;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitVerify = 3;

double wall_now() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::uint64_t resolve_seed(std::uint64_t from_config, bool flag_set,
                           std::uint64_t flag_seed) {
    // environment variable wins, then the flag, then the config
    if (const char* env = std::getenv("LPPLAB_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    if (flag_set) return flag_seed;
    return from_config;
}

std::vector<double> parse_grid_spec(const std::string& spec) {
    // "from:to:step" inclusive within rounding
    std::vector<double> out;
    double from = 0, to = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(spec);
    if (!(is >> from >> c1 >> to >> c2 >> step) || c1 != ':' || c2 != ':' ||
        !(step > 0))
        throw std::invalid_argument("bad grid spec '" + spec + "' (want from:to:step)");
    for (double v = from; v <= to + 1e-12 * step; v += step) out.push_back(v);
    return out;
}

EnvironmentLaw load_law_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    nlohmann::json j;
    in >> j;
    if (j.contains("law")) return law_from_json(j["law"]);
    return law_from_json(j);
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

int cmd_shape(const std::string& law_path, const std::string& formula, double x,
              double y, const std::string& alpha_grid, const std::string& out_dir,
              const std::string& emit) {
    const EnvironmentLaw law = load_law_file(law_path);
    std::vector<double> alphas;
    if (!alpha_grid.empty()) alphas = parse_grid_spec(alpha_grid);

    std::vector<std::vector<std::string>> rows;
    auto push = [&](double a, const ShapeResult& r) {
        rows.push_back({format_double(a), format_double(r.value), r.branch,
                        r.root ? format_double(*r.root) : "",
                        format_double(r.residual)});
    };
    auto eval_at = [&](double xx, double yy) -> ShapeResult {
        if (formula == "strict-x") return psi_strict_x(law, xx, yy);
        if (formula == "strict-y") return psi_strict_y(law, xx, yy);
        if (formula == "exp-psi") return exp_psi(law, xx, yy);
        if (formula == "asym-alpha1") {
            const auto a = asymptotic_alpha1(moments(law), xx);
            return ShapeResult{a.value, a.branch, {}, 0.0};
        }
        if (formula == "asym-1alpha") {
            const auto a = asymptotic_1alpha(law, yy);
            return ShapeResult{a.value, a.branch, {}, 0.0};
        }
        throw std::invalid_argument("unknown formula '" + formula + "'");
    };

    if (alphas.empty()) {
        push(y, eval_at(x, y));
    } else {
        for (double a : alphas) {
            // alpha replaces whichever coordinate was not pinned by --x/--y
            const double xx = formula == "strict-y" || formula == "asym-alpha1"
                                  ? a
                                  : x;
            const double yy = xx == a ? y : a;
            push(a, eval_at(xx, yy));
        }
    }
    if (emit.find("csv") != std::string::npos) {
        const std::string path = join_path(out_dir, "shape_" + formula + ".csv");
        write_csv(path, {"alpha", "value", "branch", "root", "residual"}, rows);
        std::cout << "wrote " << path << "\n";
    } else {
        for (const auto& r : rows)
            std::cout << r[0] << "," << r[1] << "," << r[2] << "," << r[3] << ","
                      << r[4] << "\n";
    }
    return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, const std::string& emit) {
    const double t0 = wall_now();
    std::vector<std::string> outputs;
    std::vector<std::vector<std::string>> agg_rows;
    std::vector<std::vector<std::string>> rep_rows;
    for (const auto& pt : cfg.points) {
        const auto mc = mc_scaled_estimate(cfg.law, cfg.geometry, cfg.convention,
                                           pt.x, pt.y, pt.n, cfg.replicas, cfg.seed);
        const auto theory = theory_value(cfg.law, cfg.geometry, pt.x, pt.y);
        agg_rows.push_back(
            {format_double(pt.x), format_double(pt.y), std::to_string(pt.n),
             std::to_string(cfg.replicas), format_double(mc.estimate),
             format_double(mc.se), theory ? format_double(theory->value) : "",
             theory ? theory->branch : "",
             theory ? format_double(mc.estimate - theory->value) : "",
             format_double(mc.wall_seconds)});
        for (std::size_t r = 0; r < mc.replica_values.size(); ++r)
            rep_rows.push_back({format_double(pt.x), format_double(pt.y),
                                std::to_string(pt.n), std::to_string(r),
                                std::to_string(cfg.seed),
                                std::to_string(env_stream(r)),
                                std::to_string(weight_stream(r)),
                                format_double(mc.replica_values[r])});
    }
    if (emit.find("csv") != std::string::npos) {
        const std::string agg = join_path(cfg.out_dir, "simulate_aggregate.csv");
        write_csv(agg,
                  {"x", "y", "n", "replicas", "estimate", "se", "theory",
                   "branch", "residual", "wall_seconds"},
                  agg_rows);
        outputs.push_back(agg);
        const std::string rep = join_path(cfg.out_dir, "simulate_replicas.csv");
        write_csv(rep,
                  {"x", "y", "n", "replica", "seed", "env_stream",
                   "weight_stream", "value"},
                  rep_rows);
        outputs.push_back(rep);
    }
    const std::string man = join_path(cfg.out_dir, "simulate_manifest.json");
    write_json(man, make_manifest("simulate", cfg, wall_now() - t0, outputs));
    std::cout << "wrote " << man << "\n";
    for (const auto& o : outputs) std::cout << "wrote " << o << "\n";
    return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, const std::string& emit) {
    const double t0 = wall_now();
    if (cfg.alphas.empty())
        throw std::invalid_argument("config: sweep needs an alpha_sweep target");
    const auto rows = boundary_sweep(cfg.law, cfg.geometry, cfg.convention,
                                     cfg.axis, cfg.alphas, cfg.n, cfg.replicas,
                                     cfg.seed);
    std::vector<std::string> outputs;
    std::vector<std::vector<std::string>> agg, rep_rows;
    for (const auto& row : rows) {
        agg.push_back({format_double(row.alpha), format_double(row.mc.estimate),
                       format_double(row.mc.se),
                       row.theory ? format_double(row.theory->value) : "",
                       row.theory ? row.theory->branch : "",
                       row.asymptotic ? format_double(*row.asymptotic) : "",
                       row.upper_bound ? format_double(*row.upper_bound) : ""});
        for (std::size_t r = 0; r < row.mc.replica_values.size(); ++r)
            rep_rows.push_back({format_double(row.alpha), std::to_string(r),
                                std::to_string(cfg.seed),
                                std::to_string(env_stream(r)),
                                std::to_string(weight_stream(r)),
                                format_double(row.mc.replica_values[r])});
    }
    if (emit.find("csv") != std::string::npos) {
        const std::string path = join_path(cfg.out_dir, "sweep.csv");
        write_csv(path,
                  {"alpha", "estimate", "se", "theory", "branch", "asymptotic",
                   "upper_bound"},
                  agg);
        outputs.push_back(path);
        const std::string rep = join_path(cfg.out_dir, "sweep_replicas.csv");
        write_csv(rep,
                  {"alpha", "replica", "seed", "env_stream", "weight_stream",
                   "value"},
                  rep_rows);
        outputs.push_back(rep);
    }
    if (emit.find("svg") != std::string::npos) {
        PlotSeries sim{"simulation", "#1f77b4", true, {}};
        PlotSeries th{"theory", "#d62728", false, {}};
        for (const auto& row : rows) {
            sim.points.push_back({row.alpha, row.mc.estimate});
            if (row.theory) th.points.push_back({row.alpha, row.theory->value});
        }
        std::vector<PlotSeries> series{sim};
        if (!th.points.empty()) series.push_back(th);
        const std::string path = join_path(cfg.out_dir, "sweep.svg");
        write_svg_plot(path, "boundary sweep", "alpha", "value", series);
        outputs.push_back(path);
    }
    const std::string man = join_path(cfg.out_dir, "sweep_manifest.json");
    write_json(man, make_manifest("sweep", cfg, wall_now() - t0, outputs));
    std::cout << "wrote " << man << "\n";
    for (const auto& o : outputs) std::cout << "wrote " << o << "\n";
    return kExitOk;
}

int cmd_plot(const std::string& csv_path, const std::string& out_path,
             const std::string& x_col, const std::vector<std::string>& y_cols) {
    std::ifstream in(csv_path);
    if (!in) throw std::invalid_argument("config: cannot open '" + csv_path + "'");
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("config: empty CSV '" + csv_path + "'");
    std::vector<std::string> header;
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) header.push_back(cell);
    }
    auto col_index = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw std::invalid_argument("config: no column '" + name + "'");
    };
    const std::size_t xi = col_index(x_col);
    std::vector<std::size_t> yis;
    for (const auto& y : y_cols) yis.push_back(col_index(y));
    const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                             "#ff7f0e", "#8c564b"};
    std::vector<PlotSeries> series;
    for (std::size_t k = 0; k < yis.size(); ++k)
        series.push_back({y_cols[k], palette[k % 6], true, {}});
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() <= xi) continue;
        for (std::size_t k = 0; k < yis.size(); ++k) {
            if (cells.size() <= yis[k] || cells[yis[k]].empty()) continue;
            series[k].points.push_back(
                {std::stod(cells[xi]), std::stod(cells[yis[k]])});
        }
    }
    write_svg_plot(out_path, std::filesystem::path(csv_path).stem().string(),
                   x_col, "value", series);
    std::cout << "wrote " << out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"last-passage percolation laboratory"};
    app.require_subcommand(1);

    std::string law_path, formula = "strict-x", alpha_grid, out_dir = "out";
    std::string emit = "csv";
    double x = 1.0, y = 1.0;
    std::uint64_t seed_flag = 0;
    int replicas_flag = 0, threads = 0;
    std::int64_t n_flag = 0;
    std::string config_path, suite = "all";
    std::string csv_in, svg_out, x_col = "alpha";
    std::vector<std::string> y_cols{"estimate"};
    int trials = 200;

    auto* shape = app.add_subcommand("shape", "evaluate limit-shape formulas");
    shape->add_option("--law", law_path, "law JSON document")->required();
    shape->add_option("--formula", formula,
                      "strict-x|strict-y|exp-psi|asym-alpha1|asym-1alpha");
    shape->add_option("--x", x, "first coordinate");
    shape->add_option("--y", y, "second coordinate");
    shape->add_option("--alpha-grid", alpha_grid, "from:to:step");
    shape->add_option("--out-dir", out_dir);
    shape->add_option("--emit", emit, "csv or stdout");

    auto* simulate = app.add_subcommand("simulate", "single Monte Carlo run");
    simulate->add_option("--config", config_path)->required();

    auto* sweep = app.add_subcommand("sweep", "boundary sweep with theory overlay");
    sweep->add_option("--config", config_path)->required();

    for (auto* cmd : {simulate, sweep}) {
        cmd->add_option("--seed", seed_flag);
        cmd->add_option("--replicas", replicas_flag);
        cmd->add_option("--n", n_flag);
        cmd->add_option("--threads", threads);
        cmd->add_option("--out-dir", out_dir);
        cmd->add_option("--emit", emit, "comma list of csv,json,svg");
    }

    auto* verify = app.add_subcommand("verify", "run built-in verification suites");
    verify->add_option("--suite", suite, "oracle|solver|rng|all");
    verify->add_option("--trials", trials);
    verify->add_option("--threads", threads);

    auto* plot = app.add_subcommand("plot", "render a CSV to SVG");
    plot->add_option("--csv", csv_in)->required();
    plot->add_option("--out", svg_out)->required();
    plot->add_option("--x-col", x_col);
    plot->add_option("--y-col", y_cols, "y columns (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (threads > 0) lpp::set_max_worker_threads(threads);
        if (shape->parsed())
            return cmd_shape(law_path, formula, x, y, alpha_grid, out_dir, emit);
        if (simulate->parsed() || sweep->parsed()) {
            RunConfig cfg = load_config(config_path);
            cfg.seed = resolve_seed(cfg.seed, seed_flag != 0, seed_flag);
            if (replicas_flag > 0) cfg.replicas = replicas_flag;
            if (n_flag > 0) cfg.n = n_flag;
            if (out_dir != "out") cfg.out_dir = out_dir;
            if (cfg.threads > 0 && threads == 0)
                lpp::set_max_worker_threads(cfg.threads);
            if (simulate->parsed()) {
                if (cfg.points.empty() && !cfg.alphas.empty())
                    for (double a : cfg.alphas)
                        cfg.points.push_back({cfg.axis == AlphaAxis::XisAlpha ? a : 1.0,
                                              cfg.axis == AlphaAxis::XisAlpha ? 1.0 : a,
                                              cfg.n});
                if (cfg.points.empty())
                    throw std::invalid_argument("config: simulate needs targets");
                return cmd_simulate(cfg, emit);
            }
            return cmd_sweep(cfg, emit);
        }
        if (verify->parsed()) {
            const bool ok = lpp::suites::run_suite(suite, trials, std::cout);
            return ok ? kExitOk : kExitVerify;
        }
        if (plot->parsed()) return cmd_plot(csv_in, svg_out, x_col, y_cols);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitVerify;
    }
    return kExitConfig;
}
