// dmfbm command-line front end.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "dmfbm/error.hpp"
#include "dmfbm/estimator.hpp"
#include "dmfbm/fbm.hpp"
#include "dmfbm/fredholm.hpp"
#include "dmfbm/kernel.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dmfbm;

namespace {

struct RunConfig {
    double h1 = 0.6;
    double h2 = 0.7;
    std::vector<double> T{1.0};
    std::size_t N = 500;
    std::size_t n = 0;
    std::size_t M = 1000;
    double theta = 1.0;
    std::uint64_t seed = 1;
    std::string out;
    std::string formulation = "direct";
    std::size_t workers = 1;
    bool tables = true;
    bool relaxed = false;
    std::size_t R = 101;
    bool c_zero = false;
    std::string cache_dir;
};

json to_json(const RunConfig& c) {
    return {{"h1", c.h1},           {"h2", c.h2},           {"T", c.T},
            {"N", c.N},             {"n", c.n},             {"M", c.M},
            {"theta", c.theta},     {"seed", c.seed},       {"out", c.out},
            {"formulation", c.formulation}, {"workers", c.workers}, {"tables", c.tables},
            {"relaxed", c.relaxed}, {"R", c.R},             {"c_zero", c.c_zero},
            {"cache_dir", c.cache_dir}};
}

void merge_json(RunConfig& c, const json& j) {
    auto take = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    take("h1", c.h1);
    take("h2", c.h2);
    if (j.contains("T")) {
        c.T = j.at("T").is_array() ? j.at("T").get<std::vector<double>>() : std::vector<double>{j.at("T").get<double>()};
    }
    take("N", c.N);
    take("n", c.n);
    take("M", c.M);
    take("theta", c.theta);
    take("seed", c.seed);
    take("out", c.out);
    take("formulation", c.formulation);
    take("workers", c.workers);
    take("tables", c.tables);
    take("relaxed", c.relaxed);
    take("R", c.R);
    take("c_zero", c.c_zero);
    take("cache_dir", c.cache_dir);
}

// Flags registered on one subcommand; values land in `flags`, and only the
// ones actually given override the config file.
struct Bound {
    RunConfig flags;
    std::string config_file;
    std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> setters;
};

template <class T>
void bind_option(CLI::App* app, Bound& b, const std::string& name, T RunConfig::*field, const std::string& help) {
    CLI::Option* opt = app->add_option(name, b.flags.*field, help);
    b.setters.emplace_back(opt, [&b, field](RunConfig& c) { c.*field = b.flags.*field; });
}

void bind_flag(CLI::App* app, Bound& b, const std::string& name, bool RunConfig::*field, const std::string& help) {
    CLI::Option* opt = app->add_flag(name, b.flags.*field, help);
    b.setters.emplace_back(opt, [&b, field](RunConfig& c) { c.*field = b.flags.*field; });
}

void add_common(CLI::App* app, Bound& b) {
    bind_option(app, b, "--h1", &RunConfig::h1, "Hurst index H1 (1/2 < H1 < H2)");
    bind_option(app, b, "--h2", &RunConfig::h2, "Hurst index H2 (H1 < H2 < 1)");
    bind_option(app, b, "--T", &RunConfig::T, "Time horizon (montecarlo accepts several)");
    bind_option(app, b, "--N", &RunConfig::N, "Number of grid intervals");
    bind_option(app, b, "--n", &RunConfig::n, "Kernel truncation (default: N)");
    bind_option(app, b, "--M", &RunConfig::M, "Monte Carlo replications");
    bind_option(app, b, "--theta", &RunConfig::theta, "Drift parameter");
    bind_option(app, b, "--seed", &RunConfig::seed, "Base RNG seed");
    bind_option(app, b, "--out", &RunConfig::out, "Output CSV path (JSON sidecar alongside)");
    bind_option(app, b, "--formulation", &RunConfig::formulation, "direct or tilde");
    bind_option(app, b, "--workers", &RunConfig::workers, "Worker thread cap");
    bind_option(app, b, "--R", &RunConfig::R, "Surface resolution per axis");
    bind_option(app, b, "--cache-dir", &RunConfig::cache_dir, "Directory for cached h solutions");
    bind_flag(app, b, "--relaxed", &RunConfig::relaxed, "Allow H1 > 3/4");
    bind_flag(app, b, "--c-zero", &RunConfig::c_zero, "Force the kernel constant to zero (validate)");
    CLI::Option* no_tables = app->add_flag("--no-tables", "Evaluate 2F1 directly instead of through tables");
    b.setters.emplace_back(no_tables, [](RunConfig& c) { c.tables = false; });
    app->add_option("--config", b.config_file, "JSON config file (flags take precedence)");
}

RunConfig resolve(const Bound& b) {
    RunConfig c;
    if (!b.config_file.empty()) {
        std::ifstream is(b.config_file);
        if (!is) throw IoError("cannot open config file " + b.config_file);
        json j;
        try {
            is >> j;
        } catch (const json::exception& e) {
            throw IoError("malformed config file " + b.config_file + ": " + e.what());
        }
        merge_json(c, j);
    }
    for (const auto& [opt, set] : b.setters)
        if (opt->count() > 0) set(c);
    return c;
}

HurstPair validated_pair(const RunConfig& c) {
    return HurstPair(c.h1, c.h2, c.relaxed ? HurstMode::relaxed : HurstMode::strict);
}

double single_T(const RunConfig& c) {
    if (c.T.size() != 1) throw DomainError("this command takes exactly one --T value");
    if (!(c.T.front() > 0.0)) throw DomainError("--T must be positive");
    return c.T.front();
}

void validate_common(const RunConfig& c) {
    validated_pair(c);
    for (double t : c.T)
        if (!(t > 0.0)) throw DomainError("--T values must be positive");
    if (c.N < 2) throw DomainError("--N must be at least 2");
    if (c.n == 1) throw DomainError("--n must be at least 2");
    if (c.workers < 1) throw DomainError("--workers must be at least 1");
    parse_formulation(c.formulation);
}

KernelOptions kernel_options(const RunConfig& c) {
    KernelOptions o;
    o.use_tables = c.tables;
    return o;
}

std::ofstream open_out(const std::string& path) {
    const fs::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
    }
    std::ofstream os(p);
    if (!os) throw IoError("cannot open output file " + path);
    return os;
}

void write_sidecar(const std::string& csv_path, json meta, const RunConfig& c) {
    meta["config"] = to_json(c);
    fs::path p(csv_path);
    p.replace_extension(".json");
    auto os = open_out(p.string());
    os << meta.dump(2) << '\n';
}

std::string out_or(const RunConfig& c, const char* fallback) { return c.out.empty() ? fallback : c.out; }

int cmd_kernel_surface(const RunConfig& c) {
    const HurstPair hp = validated_pair(c);
    const double T = single_T(c);
    if (c.R < 2) throw DomainError("--R must be at least 2");
    const KernelModel model(hp, T, kernel_options(c));
    const std::string path = out_or(c, "kernel_surface.csv");
    auto os = open_out(path);
    os << "u,s,K,L\n" << std::setprecision(12);
    std::size_t rows = 0;
    for (std::size_t i = 0; i < c.R; ++i) {
        const double u = T * static_cast<double>(i + 1) / static_cast<double>(c.R + 1);
        for (std::size_t j = 0; j < c.R; ++j) {
            if (i == j) continue;
            const double s = T * static_cast<double>(j + 1) / static_cast<double>(c.R + 1);
            os << u << ',' << s << ',' << eval_K(model, u, s) << ',' << eval_L(model, u, s) << '\n';
            ++rows;
        }
    }
    write_sidecar(path, {{"command", "kernel-surface"}, {"rows", rows}, {"ell", model.consts().ell}}, c);
    std::cout << "wrote " << rows << " surface points to " << path << '\n';
    return 0;
}

SolverConfig solver_config(const RunConfig& c) {
    SolverConfig s;
    s.N = c.N;
    s.n = c.n;
    s.formulation = parse_formulation(c.formulation);
    s.workers = c.workers;
    s.allow_relaxed = c.relaxed;
    return s;
}

int cmd_solve(const RunConfig& c) {
    const HurstPair hp = validated_pair(c);
    const KernelModel model(hp, single_T(c), kernel_options(c));
    const DiscreteSolution sol = solve_mle_h(model, solver_config(c));
    const std::string path = out_or(c, "h.csv");
    auto os = open_out(path);
    write_solution_csv(os, sol);
    json meta = json::parse(solution_metadata_json(sol));
    meta["command"] = "solve";
    write_sidecar(path, meta, c);
    std::cout << std::setprecision(8) << "int h = " << sol.int_h << ", theoretical variance = " << 1.0 / sol.int_h
              << ", residual = " << sol.residual_norm << " -> " << path << '\n';
    return 0;
}

int cmd_validate(const RunConfig& c) {
    const HurstPair hp = validated_pair(c);
    const double T = single_T(c);
    const KernelModel model(hp, T, kernel_options(c));
    SolverConfig cfg = solver_config(c);
    cfg.formulation = Formulation::direct;
    const double kc = c.c_zero ? 0.0 : model.consts().c;
    auto h_exact = [](double u) { return u; };

    const auto t0 = std::chrono::steady_clock::now();
    const Grid grid = Grid::uniform(T, cfg.N);
    std::vector<double> g(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        g[i] = manufactured_rhs_at(model, h_exact, cfg.truncation(), grid.nodes[i], kc);
    }
    const double t_rhs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    LinearSystem sys;
    sys.A = assemble_matrix(model, cfg, kc);
    sys.G = Eigen::Map<const Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(g.size()));
    const DiscreteSolution sol = solve(model, cfg, sys);

    const std::string path = out_or(c, "validate.csv");
    auto os = open_out(path);
    os << "t,h_exact,h_numeric,abs_error,log_abs_error\n" << std::setprecision(12);
    double sum = 0.0;
    double max_all = 0.0;
    double max_interior = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid.nodes[i];
        const double err = std::abs(sol.values[i] - h_exact(t));
        sum += err;
        max_all = std::max(max_all, err);
        if (t >= 0.05 * T && t <= 0.95 * T) max_interior = std::max(max_interior, err);
        os << t << ',' << h_exact(t) << ',' << sol.values[i] << ',' << err << ','
           << (err > 0.0 ? std::log(err) : -std::numeric_limits<double>::infinity()) << '\n';
    }
    const double mean = sum / static_cast<double>(grid.size());
    json meta{{"command", "validate"},
              {"mean_abs_error", mean},
              {"max_abs_error", max_all},
              {"max_interior_abs_error", max_interior},
              {"residual_norm", sol.residual_norm},
              {"kernel_constant", kc},
              {"timings", {{"rhs_seconds", t_rhs}, {"solve_seconds", sol.solve_seconds}}}};
    write_sidecar(path, meta, c);
    std::cout << std::setprecision(4) << "mean |err| = " << mean << ", interior max = " << max_interior
              << ", max = " << max_all << " -> " << path << '\n';
    return 0;
}

int cmd_simulate(const RunConfig& c) {
    const HurstPair hp = validated_pair(c);
    const Grid grid = Grid::uniform(single_T(c), c.N);
    const MixedPath p = mixed_path(c.theta, hp, grid, {c.seed, 0});
    const std::string path = out_or(c, "path.csv");
    auto os = open_out(path);
    write_path_csv(os, p);
    json meta = json::parse(path_metadata_json(p));
    meta["command"] = "simulate";
    write_sidecar(path, meta, c);
    std::cout << "wrote path with " << p.values.size() << " points (" << to_string(p.method) << ") to " << path
              << '\n';
    return 0;
}

int cmd_montecarlo(const RunConfig& c, bool N_given) {
    const HurstPair hp = validated_pair(c);
    const std::string path = out_or(c, "montecarlo.csv");
    const fs::path cache_dir = c.cache_dir.empty() ? fs::path(path).parent_path() / "h_cache" : fs::path(c.cache_dir);
    HCache cache(cache_dir);
    auto os = open_out(path);
    write_summary_header(os);
    json rows = json::array();
    for (double T : c.T) {
        MonteCarloConfig mc;
        mc.T = T;
        mc.M = c.M;
        mc.N = N_given ? c.N : 0;
        mc.theta = c.theta;
        mc.base_seed = c.seed;
        mc.formulation = parse_formulation(c.formulation);
        mc.workers = c.workers;
        mc.allow_relaxed = c.relaxed;
        const MonteCarloSummary s = run_montecarlo(hp, mc, cache, kernel_options(c));
        write_summary_row(os, s);
        os.flush();
        rows.push_back({{"T", s.T},
                        {"mean", s.mean},
                        {"empirical_variance", s.empirical_variance},
                        {"theoretical_variance", s.theoretical_variance},
                        {"se_mean", s.se_mean},
                        {"N_solver", s.N_solver},
                        {"N_path", s.N_path},
                        {"base_seed", s.base_seed},
                        {"streams", {0, s.M - 1}},
                        {"solve_seconds", s.solve_seconds},
                        {"simulate_seconds", s.simulate_seconds}});
        std::cout << std::setprecision(6) << "T=" << T << ": mean " << s.mean << ", emp var "
                  << s.empirical_variance << ", theo var " << s.theoretical_variance << '\n';
    }
    write_sidecar(path, {{"command", "montecarlo"}, {"rows", rows}}, c);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Drift MLE for the double mixed fractional Brownian model"};
    app.require_subcommand(1);

    Bound b_surface, b_solve, b_validate, b_simulate, b_mc;
    auto* surface = app.add_subcommand("kernel-surface", "Tabulate K(u,s) and L(u,s) on an R x R mesh");
    auto* solve_cmd = app.add_subcommand("solve", "Solve the integral equation for h_T");
    auto* validate = app.add_subcommand("validate", "Manufactured-solution check with h(u) = u");
    auto* simulate = app.add_subcommand("simulate", "Simulate one path of the mixed model");
    auto* mc = app.add_subcommand("montecarlo", "Monte Carlo study of the drift estimator");
    add_common(surface, b_surface);
    add_common(solve_cmd, b_solve);
    add_common(validate, b_validate);
    add_common(simulate, b_simulate);
    add_common(mc, b_mc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*surface) {
            const RunConfig c = resolve(b_surface);
            validate_common(c);
            return cmd_kernel_surface(c);
        }
        if (*solve_cmd) {
            const RunConfig c = resolve(b_solve);
            validate_common(c);
            return cmd_solve(c);
        }
        if (*validate) {
            const RunConfig c = resolve(b_validate);
            validate_common(c);
            return cmd_validate(c);
        }
        if (*simulate) {
            const RunConfig c = resolve(b_simulate);
            validate_common(c);
            return cmd_simulate(c);
        }
        if (*mc) {
            const RunConfig c = resolve(b_mc);
            validate_common(c);
            bool N_given = false;
            for (const auto& [opt, set] : b_mc.setters)
                if (opt->get_name() == "--N" && opt->count() > 0) N_given = true;
            if (!b_mc.config_file.empty()) {
                std::ifstream is(b_mc.config_file);
                json j;
                is >> j;
                N_given = N_given || j.contains("N");
            }
            return cmd_montecarlo(c, N_given);
        }
    } catch (const Error& e) {
        std::cerr << "error (" << category_name(e.category()) << "): " << e.what() << '\n';
        return static_cast<int>(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
