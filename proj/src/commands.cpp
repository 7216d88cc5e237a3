#include "timelyfl/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "timelyfl/config.hpp"
#include "timelyfl/emit.hpp"
#include "timelyfl/errors.hpp"

namespace timelyfl {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct SystemFlags {
    std::optional<int> n, m, k;
    std::optional<double> lambda, mu_up, c;
    std::optional<std::string> mu_down;

    void add_to(CLI::App* app, bool with_mk = true) {
        app->add_option("--n", n, "number of clients");
        if (with_mk) {
            app->add_option("--m", m, "availability quorum");
            app->add_option("--k", k, "updates aggregated per iteration");
        }
        app->add_option("--lambda", lambda, "availability rate");
        app->add_option("--mu-up", mu_up, "uplink rate");
        app->add_option("--mu-down", mu_down, "downlink rate or 'instant'");
        app->add_option("--c", c, "compute duration");
    }

    void apply(SystemParams& p) const {
        if (n) p.n = *n;
        if (m) p.m = *m;
        if (k) p.k = *k;
        if (lambda) p.lambda = *lambda;
        if (mu_up) p.mu_up = *mu_up;
        if (c) p.c = *c;
        if (mu_down) {
            if (*mu_down == "instant") {
                p.mu_down = Downlink::instantaneous();
            } else {
                double r = 0.0;
                try {
                    r = std::stod(*mu_down);
                } catch (const std::exception&) {
                    throw DomainError("mu_down must be a positive rate or 'instant'");
                }
                p.mu_down = Downlink::exponential(r);
            }
        }
    }
};

struct Common {
    std::optional<std::string> config_path;
    std::optional<std::string> json_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;

    ExperimentConfig load() const { return config_path ? load_config(*config_path) : ExperimentConfig{}; }

    std::string output_dir() const {
        std::string dir = ".";
        if (out_dir) {
            dir = *out_dir;
        } else if (const char* env = std::getenv(kOutDirEnv); env && *env) {
            dir = env;
        }
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir);
        return dir;
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t require_seed(const ExperimentConfig& cfg, const char* command) {
    if (!cfg.run.seed) {
        throw DomainError(std::string(command) + " requires --seed (or seed in [run])");
    }
    return *cfg.run.seed;
}

int cmd_age_exact(const ExperimentConfig& cfg, const Common& common, std::ostream& out) {
    const auto t0 = Clock::now();
    const AgeBreakdown a = age_exact(cfg.system);
    out << "delta1 = " << format_double(a.delta1) << '\n'
        << "delta2 = " << format_double(a.delta2) << '\n'
        << "delta3 = " << format_double(a.delta3) << '\n'
        << "total = " << format_double(a.total) << '\n'
        << "mean_Y = " << format_double(a.mean_Y) << '\n'
        << "var_Y = " << format_double(a.var_Y) << '\n';
    if (common.json_path) {
        write_text_file(*common.json_path,
                        make_envelope("age-exact", to_config_text(cfg), std::nullopt, to_json(a), seconds_since(t0))
                            .dump(2));
    }
    return kExitOk;
}

int cmd_age_approx(const ApproxParams& ap, const SystemParams& sys, const Common& common, std::ostream& out) {
    const auto t0 = Clock::now();
    const double v = age_approx(ap, sys.lambda, sys.mu_up, sys.c);
    out << "age_approx = " << format_double(v) << '\n';
    if (common.json_path) {
        json payload = {{"alpha", ap.alpha}, {"beta", ap.beta}, {"lambda", sys.lambda},
                        {"mu_up", sys.mu_up}, {"c", sys.c},     {"age_approx", v}};
        write_text_file(*common.json_path,
                        make_envelope("age-approx", "", std::nullopt, payload, seconds_since(t0)).dump(2));
    }
    return kExitOk;
}

int cmd_simulate(ExperimentConfig cfg, const Common& common, const std::optional<std::string>& trace_path,
                 std::ostream& out) {
    const auto t0 = Clock::now();
    const std::uint64_t seed = require_seed(cfg, "simulate");
    if (!cfg.run.warmup) cfg.run.warmup = default_warmup(cfg.run.iterations);
    if (*cfg.run.warmup >= cfg.run.iterations) {
        throw DomainError("warmup must be smaller than iterations (got warmup=" + std::to_string(*cfg.run.warmup) +
                          ", iterations=" + std::to_string(cfg.run.iterations) + ")");
    }
    SimOptions opts;
    opts.random_k_wait = cfg.run.random_k_wait;

    json payload;
    std::string summary;
    if (!cfg.run.scheme) {
        if (trace_path) throw DomainError("--trace needs a single scheme");
        const auto cmp = compare_iteration_time(cfg.system, cfg.run.iterations, seed, opts);
        payload = to_json(cmp);
        std::ostringstream s;
        s << "scheme,mean_iteration_time\n";
        for (const auto& r : cmp.rows) s << to_string(r.scheme) << ',' << format_double(r.mean_iteration_time) << '\n';
        s << "improvement_over_random = " << format_double(cmp.improvement_over_random) << '\n';
        s << "improvement_over_first = " << format_double(cmp.improvement_over_first) << '\n';
        summary = s.str();
    } else {
        opts.record_trace = trace_path.has_value();
        const auto r = simulate(cfg.system, *cfg.run.scheme, cfg.run.iterations, *cfg.run.warmup, seed, opts);
        if (trace_path) write_text_file(*trace_path, trace_csv(r.trace));
        payload = to_json(r);
        summary = "mean_avg_age = " + format_double(r.mean_avg_age) + "\nmean_iteration_time = " +
                  format_double(r.mean_iteration_time) + "\n";
    }
    const json env = make_envelope("simulate", to_config_text(cfg), seed, std::move(payload), seconds_since(t0));
    if (common.json_path) {
        write_text_file(*common.json_path, env.dump(2));
        out << summary;
    } else {
        out << env.dump(2) << '\n';
    }
    return kExitOk;
}

int cmd_sweep(ExperimentConfig cfg, const Common& common, const std::optional<std::string>& csv_path,
              std::optional<std::int64_t> sim_iterations, std::ostream& out) {
    const auto t0 = Clock::now();
    if (sim_iterations) cfg.run.iterations = *sim_iterations;
    std::uint64_t seed = cfg.run.seed.value_or(0);
    if (cfg.sweep.objective == Objective::Simulated) seed = require_seed(cfg, "sweep with simulated objective");

    if (cfg.sweep.figure) {
        const auto fig = *cfg.sweep.figure;
        const auto curves = reproduce_figure(fig, cfg.system.n, seed, cfg.sweep.objective, cfg.run.iterations);
        const std::string dir = common.output_dir();
        json members = json::array();
        for (const auto& fc : curves) {
            const std::string file =
                (fs::path(dir) / (std::string(to_string(fig)) + "_" + fc.parameter + "_" + format_double(fc.value) + ".csv"))
                    .string();
            write_text_file(file, sweep_csv(fc.curve));
            out << fc.parameter << '=' << format_double(fc.value) << " m*=" << fc.search.argmin.m
                << " k*=" << fc.search.argmin.k << " age=" << format_double(fc.search.argmin.age) << " -> " << file
                << '\n';
            members.push_back({{"parameter", fc.parameter},
                               {"value", fc.value},
                               {"argmin", {{"m", fc.search.argmin.m}, {"k", fc.search.argmin.k}, {"age", fc.search.argmin.age}}},
                               {"curve", to_json(fc.curve)}});
        }
        const std::string json_file =
            common.json_path.value_or((fs::path(dir) / (std::string(to_string(fig)) + ".json")).string());
        const auto seed_meta = cfg.sweep.objective == Objective::Simulated ? std::optional(seed) : std::nullopt;
        write_text_file(json_file, make_envelope("sweep", to_config_text(cfg), seed_meta,
                                                 json{{"figure", to_string(fig)}, {"members", members}},
                                                 seconds_since(t0))
                                       .dump(2));
        return kExitOk;
    }

    SweepSpec spec;
    spec.fixed = cfg.system;
    spec.sweep_m = cfg.sweep.m;
    spec.sweep_k = cfg.sweep.k;
    spec.objective = cfg.sweep.objective;
    spec.sim_iterations = cfg.run.iterations;
    spec.seed = seed;
    const auto result = sweep(spec);
    const std::string csv = csv_path.value_or((fs::path(common.output_dir()) / "sweep.csv").string());
    write_text_file(csv, sweep_csv(result));
    out << "argmin m=" << result.argmin.m << " k=" << result.argmin.k << " age=" << format_double(result.argmin.age)
        << '\n';
    if (common.json_path) {
        const auto seed_meta = spec.objective == Objective::Simulated ? std::optional(seed) : std::nullopt;
        write_text_file(*common.json_path,
                        make_envelope("sweep", to_config_text(cfg), seed_meta, to_json(result), seconds_since(t0))
                            .dump(2));
    }
    return kExitOk;
}

int cmd_fl_train(const ExperimentConfig& cfg, const Common& common, bool with_time, std::ostream& out) {
    const auto t0 = Clock::now();
    const std::uint64_t seed = require_seed(cfg, "fl-train");
    const std::string dir = common.output_dir();
    json runs = json::array();
    std::uint64_t run_index = 0;
    for (auto scheme : cfg.fl.schemes) {
        for (int k : cfg.fl.ks) {
            FLConfig fc = cfg.fl.base;
            fc.scheme = scheme;
            fc.k = k;
            fc.seed = seed;
            fc.lambda = cfg.system.lambda;
            fc.mu_up = cfg.system.mu_up;
            fc.c = cfg.system.c;
            const auto result = train(fc);

            std::optional<std::vector<double>> times;
            if (with_time) {
                SystemParams timing = cfg.system;
                timing.n = fc.n_clients;
                timing.m = scheme == SchemeKind::EarliestKofM ? fc.m : fc.n_clients;
                timing.k = k;
                SimOptions opts;
                opts.record_trace = true;
                opts.random_k_wait = cfg.run.random_k_wait;
                const auto sim = simulate(timing, scheme, fc.iterations, 0, substream_seed(seed, 1'000'000 + run_index), opts);
                times = cumulative_iteration_times(sim.trace);
            }
            ++run_index;

            const std::string file =
                (fs::path(dir) / ("fl_" + std::string(to_string(scheme)) + "_k" + std::to_string(k) + ".csv")).string();
            write_text_file(file, loss_csv(result.loss_history, times ? &*times : nullptr));
            const auto& last = result.loss_history.back();
            out << to_string(scheme) << " k=" << k << " final_train=" << format_double(last.train_loss)
                << " final_test=" << format_double(last.test_loss) << " -> " << file << '\n';
            runs.push_back({{"scheme", to_string(scheme)}, {"k", k}, {"loss_history", to_json(result.loss_history)}});
        }
    }
    const std::string json_file = common.json_path.value_or((fs::path(dir) / "fl_train.json").string());
    write_text_file(json_file,
                    make_envelope("fl-train", to_config_text(cfg), seed, json{{"runs", runs}}, seconds_since(t0)).dump(2));
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Age of information toolkit for earliest-k-of-m federated learning", std::string(kToolName)};
    app.require_subcommand(1);

    SystemFlags sys_flags;
    Common common;
    auto add_common = [&](CLI::App* sub, bool with_seed) {
        sub->add_option("--config", common.config_path, "experiment config file");
        sub->add_option("--json", common.json_path, "write the JSON result envelope here");
        if (with_seed) sub->add_option("--seed", common.seed, "master random seed");
    };

    auto* age_exact_cmd = app.add_subcommand("age-exact", "closed-form average age");
    sys_flags.add_to(age_exact_cmd);
    add_common(age_exact_cmd, false);

    ApproxParams approx;
    auto* age_approx_cmd = app.add_subcommand("age-approx", "large-n approximation");
    age_approx_cmd->add_option("--alpha", approx.alpha, "m/n fraction")->required();
    age_approx_cmd->add_option("--beta", approx.beta, "k/m fraction")->required();
    sys_flags.add_to(age_approx_cmd, false);
    add_common(age_approx_cmd, false);

    std::optional<std::string> scheme_name;
    std::optional<std::int64_t> iterations;
    std::optional<std::int64_t> warmup;
    std::optional<std::string> random_k_wait;
    std::optional<std::string> trace_path;
    auto add_run_flags = [&](CLI::App* sub) {
        sub->add_option("--iterations", iterations, "iteration horizon");
        sub->add_option("--warmup", warmup, "iterations excluded from statistics");
        sub->add_option("--random-k-wait", random_k_wait, "shared|independent");
    };
    auto* simulate_cmd = app.add_subcommand("simulate", "Monte-Carlo protocol simulation");
    sys_flags.add_to(simulate_cmd);
    add_common(simulate_cmd, true);
    add_run_flags(simulate_cmd);
    simulate_cmd->add_option("--scheme", scheme_name, "earliest|random|first|all");
    simulate_cmd->add_option("--trace", trace_path, "per-iteration CSV trace (single scheme)");

    auto* compare_cmd = app.add_subcommand("compare", "iteration time of all three schemes");
    sys_flags.add_to(compare_cmd);
    add_common(compare_cmd, true);
    add_run_flags(compare_cmd);

    std::optional<std::string> figure, sweep_m, sweep_k, objective, csv_path;
    auto* sweep_cmd = app.add_subcommand("sweep", "(m, k) grid search");
    sys_flags.add_to(sweep_cmd, false);
    add_common(sweep_cmd, true);
    sweep_cmd->add_option("--figure", figure, "fig3|fig4|fig5|fig6");
    sweep_cmd->add_option("--m", sweep_m, "swept m: N or LO..HI");
    sweep_cmd->add_option("--sweep-k", sweep_k, "swept k: all, N or LO..HI");
    sweep_cmd->add_option("--objective", objective, "analytic|simulated");
    sweep_cmd->add_option("--iterations", iterations, "iterations per simulated grid point");
    sweep_cmd->add_option("--csv", csv_path, "CSV output path");
    sweep_cmd->add_option("--out-dir", common.out_dir, "output directory");

    std::optional<int> fl_d, fl_clients, fl_samples, fl_batch, fl_tau, fl_iters, fl_repeats, fl_m, fl_test;
    std::optional<double> fl_eta, fl_noise, fl_feature_std;
    std::optional<std::string> fl_ks, fl_scheme;
    bool with_time = false;
    auto* fl_cmd = app.add_subcommand("fl-train", "federated linear regression convergence");
    sys_flags.add_to(fl_cmd, false);
    add_common(fl_cmd, true);
    fl_cmd->add_option("--d", fl_d, "model dimension");
    fl_cmd->add_option("--clients", fl_clients, "number of clients");
    fl_cmd->add_option("--samples", fl_samples, "samples per client");
    fl_cmd->add_option("--batch", fl_batch, "mini-batch size");
    fl_cmd->add_option("--tau", fl_tau, "local SGD steps");
    fl_cmd->add_option("--eta", fl_eta, "learning rate");
    fl_cmd->add_option("--iterations", fl_iters, "global iterations");
    fl_cmd->add_option("--repeats", fl_repeats, "independent repeats");
    fl_cmd->add_option("--k", fl_ks, "comma-separated k values");
    fl_cmd->add_option("--m", fl_m, "availability quorum");
    fl_cmd->add_option("--scheme", fl_scheme, "earliest|random|all");
    fl_cmd->add_option("--noise", fl_noise, "label noise standard deviation");
    fl_cmd->add_option("--feature-std", fl_feature_std, "feature standard deviation");
    fl_cmd->add_option("--test-samples", fl_test, "held-out samples");
    fl_cmd->add_option("--out-dir", common.out_dir, "output directory");
    fl_cmd->add_flag("--with-time", with_time, "add a simulated protocol time column");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        ExperimentConfig cfg = common.load();
        sys_flags.apply(cfg.system);
        if (common.seed) cfg.run.seed = *common.seed;
        if (iterations) cfg.run.iterations = *iterations;
        if (warmup) cfg.run.warmup = *warmup;
        if (random_k_wait) {
            auto w = parse_random_k_wait(*random_k_wait);
            if (!w) throw DomainError("--random-k-wait must be shared or independent");
            cfg.run.random_k_wait = *w;
        }

        if (age_exact_cmd->parsed()) return cmd_age_exact(cfg, common, out);
        if (age_approx_cmd->parsed()) return cmd_age_approx(approx, cfg.system, common, out);
        if (simulate_cmd->parsed() || compare_cmd->parsed()) {
            if (compare_cmd->parsed()) {
                cfg.run.scheme.reset();
            } else if (scheme_name) {
                if (*scheme_name == "all") {
                    cfg.run.scheme.reset();
                } else {
                    auto s = parse_scheme(*scheme_name);
                    if (!s) throw DomainError("unknown scheme '" + *scheme_name + "'");
                    cfg.run.scheme = *s;
                }
            }
            if (cfg.run.iterations < 1) throw DomainError("iterations must be positive");
            return cmd_simulate(cfg, common, trace_path, out);
        }
        if (sweep_cmd->parsed()) {
            if (figure) {
                auto f = parse_figure(*figure);
                if (!f) throw DomainError("unknown figure '" + *figure + "'");
                cfg.sweep.figure = *f;
            }
            auto range_flag = [](const std::string& text, const char* what) -> std::optional<IntRange> {
                if (text == "all") return std::nullopt;
                auto r = parse_int_range(text);
                if (!r) throw DomainError(std::string(what) + " must be 'all', N or LO..HI");
                return r;
            };
            if (sweep_m) cfg.sweep.m = range_flag(*sweep_m, "--m");
            if (sweep_k) cfg.sweep.k = range_flag(*sweep_k, "--sweep-k");
            if (objective) {
                auto o = parse_objective(*objective);
                if (!o) throw DomainError("--objective must be analytic or simulated");
                cfg.sweep.objective = *o;
            }
            return cmd_sweep(cfg, common, csv_path, iterations, out);
        }
        if (fl_cmd->parsed()) {
            FLConfig& b = cfg.fl.base;
            if (fl_d) b.d = *fl_d;
            if (fl_clients) b.n_clients = *fl_clients;
            if (fl_samples) b.samples_per_client = *fl_samples;
            if (fl_batch) b.batch_size = *fl_batch;
            if (fl_tau) b.tau = *fl_tau;
            if (fl_eta) b.eta = *fl_eta;
            if (fl_iters) b.iterations = *fl_iters;
            if (fl_repeats) b.repeats = *fl_repeats;
            if (fl_m) b.m = *fl_m;
            if (fl_noise) b.noise_std = *fl_noise;
            if (fl_feature_std) b.feature_std = *fl_feature_std;
            if (fl_test) b.test_samples = *fl_test;
            if (fl_ks || fl_scheme) {
                // reuse the config grammar for list and scheme values
                std::string text = "[fl]\n";
                if (fl_ks) text += "k = " + *fl_ks + "\n";
                if (fl_scheme) text += "scheme = " + *fl_scheme + "\n";
                const auto parsed = parse_config(text);
                if (fl_ks) cfg.fl.ks = parsed.fl.ks;
                if (fl_scheme) cfg.fl.schemes = parsed.fl.schemes;
            }
            for (int k : cfg.fl.ks) {
                FLConfig probe = b;
                probe.k = k;
                for (auto s : cfg.fl.schemes) {
                    probe.scheme = s;
                    validate(probe);
                }
            }
            return cmd_fl_train(cfg, common, with_time, out);
        }
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const CapacityError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace timelyfl
