#include "timelyfl/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "timelyfl/errors.hpp"

namespace timelyfl {

std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

std::optional<IntRange> parse_int_range(std::string_view text) {
    auto parse_int = [](std::string_view s) -> std::optional<int> {
        int v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
        return v;
    };
    const auto dots = text.find("..");
    if (dots == std::string_view::npos) {
        auto v = parse_int(text);
        if (!v) return std::nullopt;
        return IntRange{*v, *v};
    }
    auto lo = parse_int(text.substr(0, dots));
    auto hi = parse_int(text.substr(dots + 2));
    if (!lo || !hi || *lo > *hi) return std::nullopt;
    return IntRange{*lo, *hi};
}

std::string format_int_range(const IntRange& range) {
    if (range.lo == range.hi) return std::to_string(range.lo);
    return std::to_string(range.lo) + ".." + std::to_string(range.hi);
}

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view value, int line, std::string_view key) {
    T v{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key), line);
    }
    return v;
}

struct Field {
    std::function<void(std::string_view, int)> set;
};

int positive_int(std::string_view v, int line, std::string_view key) {
    const int x = parse_number<int>(v, line, key);
    if (x < 1) throw ConfigError(std::string(key) + " must be a positive integer", line);
    return x;
}

double positive_real(std::string_view v, int line, std::string_view key) {
    const double x = parse_number<double>(v, line, key);
    if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(std::string(key) + " must be a finite real > 0", line);
    return x;
}

double nonneg_real(std::string_view v, int line, std::string_view key) {
    const double x = parse_number<double>(v, line, key);
    if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError(std::string(key) + " must be a finite real >= 0", line);
    return x;
}

std::map<std::string, std::map<std::string, Field>> field_table(ExperimentConfig& c) {
    std::map<std::string, std::map<std::string, Field>> t;
    auto& sys = t["system"];
    sys["n"] = {[&](auto v, int l) { c.system.n = positive_int(v, l, "n"); }};
    sys["m"] = {[&](auto v, int l) { c.system.m = positive_int(v, l, "m"); }};
    sys["k"] = {[&](auto v, int l) { c.system.k = positive_int(v, l, "k"); }};
    sys["lambda"] = {[&](auto v, int l) { c.system.lambda = positive_real(v, l, "lambda"); }};
    sys["mu_up"] = {[&](auto v, int l) { c.system.mu_up = positive_real(v, l, "mu_up"); }};
    sys["mu_down"] = {[&](auto v, int l) {
        c.system.mu_down = v == "instant" ? Downlink::instantaneous()
                                          : Downlink::exponential(positive_real(v, l, "mu_down"));
    }};
    sys["c"] = {[&](auto v, int l) { c.system.c = nonneg_real(v, l, "c"); }};

    auto& run = t["run"];
    run["scheme"] = {[&](auto v, int l) {
        if (v == "all") {
            c.run.scheme.reset();
            return;
        }
        auto s = parse_scheme(v);
        if (!s) throw ConfigError("unknown scheme '" + std::string(v) + "'", l);
        c.run.scheme = *s;
    }};
    run["iterations"] = {[&](auto v, int l) {
        c.run.iterations = parse_number<std::int64_t>(v, l, "iterations");
        if (c.run.iterations < 1) throw ConfigError("iterations must be a positive integer", l);
    }};
    run["warmup"] = {[&](auto v, int l) {
        c.run.warmup = parse_number<std::int64_t>(v, l, "warmup");
        if (*c.run.warmup < 0) throw ConfigError("warmup must be >= 0", l);
    }};
    run["seed"] = {[&](auto v, int l) { c.run.seed = parse_number<std::uint64_t>(v, l, "seed"); }};
    run["repeats"] = {[&](auto v, int l) { c.run.repeats = positive_int(v, l, "repeats"); }};
    run["random_k_wait"] = {[&](auto v, int l) {
        auto w = parse_random_k_wait(v);
        if (!w) throw ConfigError("random_k_wait must be shared or independent", l);
        c.run.random_k_wait = *w;
    }};

    auto& sw = t["sweep"];
    auto range_field = [](std::optional<IntRange>& dst, std::string_view key) {
        return Field{[&dst, key](std::string_view v, int l) {
            if (v == "all") {
                dst.reset();
                return;
            }
            auto r = parse_int_range(v);
            if (!r || r->lo < 1) throw ConfigError(std::string(key) + " must be 'all', N or LO..HI with 1 <= LO <= HI", l);
            dst = *r;
        }};
    };
    sw["m"] = range_field(c.sweep.m, "sweep m");
    sw["k"] = range_field(c.sweep.k, "sweep k");
    sw["objective"] = {[&](auto v, int l) {
        auto o = parse_objective(v);
        if (!o) throw ConfigError("objective must be analytic or simulated", l);
        c.sweep.objective = *o;
    }};
    sw["figure"] = {[&](auto v, int l) {
        if (v == "none") {
            c.sweep.figure.reset();
            return;
        }
        auto f = parse_figure(v);
        if (!f) throw ConfigError("unknown figure '" + std::string(v) + "'", l);
        c.sweep.figure = *f;
    }};

    auto& fl = t["fl"];
    FLConfig& b = c.fl.base;
    fl["d"] = {[&](auto v, int l) { b.d = positive_int(v, l, "d"); }};
    fl["clients"] = {[&](auto v, int l) { b.n_clients = positive_int(v, l, "clients"); }};
    fl["samples_per_client"] = {[&](auto v, int l) { b.samples_per_client = positive_int(v, l, "samples_per_client"); }};
    fl["batch_size"] = {[&](auto v, int l) { b.batch_size = positive_int(v, l, "batch_size"); }};
    fl["tau"] = {[&](auto v, int l) { b.tau = positive_int(v, l, "tau"); }};
    fl["eta"] = {[&](auto v, int l) { b.eta = positive_real(v, l, "eta"); }};
    fl["iterations"] = {[&](auto v, int l) { b.iterations = positive_int(v, l, "iterations"); }};
    fl["repeats"] = {[&](auto v, int l) { b.repeats = positive_int(v, l, "repeats"); }};
    fl["m"] = {[&](auto v, int l) { b.m = positive_int(v, l, "m"); }};
    fl["noise_std"] = {[&](auto v, int l) { b.noise_std = nonneg_real(v, l, "noise_std"); }};
    fl["feature_std"] = {[&](auto v, int l) { b.feature_std = positive_real(v, l, "feature_std"); }};
    fl["test_samples"] = {[&](auto v, int l) { b.test_samples = positive_int(v, l, "test_samples"); }};
    fl["k"] = {[&](auto v, int l) {
        c.fl.ks.clear();
        std::string_view rest = v;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            c.fl.ks.push_back(positive_int(trim(rest.substr(0, comma)), l, "k"));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        if (c.fl.ks.empty()) throw ConfigError("k list is empty", l);
    }};
    fl["scheme"] = {[&](auto v, int l) {
        if (v == "all") {
            c.fl.schemes = {SchemeKind::EarliestKofM, SchemeKind::RandomK};
            return;
        }
        auto s = parse_scheme(v);
        if (!s || *s == SchemeKind::FirstK) throw ConfigError("fl scheme must be earliest, random or all", l);
        c.fl.schemes = {*s};
    }};
    return t;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig cfg;
    auto table = field_table(cfg);
    std::string section;
    std::set<std::string> seen;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("malformed section header", line_no);
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!table.count(section)) throw ConfigError("unknown section [" + section + "]", line_no);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected key = value", line_no);
        if (section.empty()) throw ConfigError("key outside of any section", line_no);
        const std::string key(trim(line.substr(0, eq)));
        const auto value = trim(line.substr(eq + 1));
        auto& fields = table[section];
        auto it = fields.find(key);
        if (it == fields.end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]", line_no);
        if (!seen.insert(section + "." + key).second) {
            throw ConfigError("duplicate key '" + key + "' in [" + section + "]", line_no);
        }
        if (value.empty()) throw ConfigError("missing value for '" + key + "'", line_no);
        it->second.set(value, line_no);
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_config_text(const ExperimentConfig& c) {
    std::ostringstream o;
    o << "[system]\n"
      << "n = " << c.system.n << "\n"
      << "m = " << c.system.m << "\n"
      << "k = " << c.system.k << "\n"
      << "lambda = " << format_double(c.system.lambda) << "\n"
      << "mu_up = " << format_double(c.system.mu_up) << "\n"
      << "mu_down = "
      << (c.system.mu_down.is_instantaneous() ? std::string("instant") : format_double(c.system.mu_down.rate()))
      << "\n"
      << "c = " << format_double(c.system.c) << "\n";

    o << "\n[run]\n"
      << "scheme = " << (c.run.scheme ? std::string(to_string(*c.run.scheme)) : std::string("all")) << "\n"
      << "iterations = " << c.run.iterations << "\n";
    if (c.run.warmup) o << "warmup = " << *c.run.warmup << "\n";
    if (c.run.seed) o << "seed = " << *c.run.seed << "\n";
    o << "repeats = " << c.run.repeats << "\n"
      << "random_k_wait = " << to_string(c.run.random_k_wait) << "\n";

    o << "\n[sweep]\n"
      << "m = " << (c.sweep.m ? format_int_range(*c.sweep.m) : std::string("all")) << "\n"
      << "k = " << (c.sweep.k ? format_int_range(*c.sweep.k) : std::string("all")) << "\n"
      << "objective = " << to_string(c.sweep.objective) << "\n"
      << "figure = " << (c.sweep.figure ? std::string(to_string(*c.sweep.figure)) : std::string("none")) << "\n";

    const FLConfig& b = c.fl.base;
    o << "\n[fl]\n"
      << "d = " << b.d << "\n"
      << "clients = " << b.n_clients << "\n"
      << "samples_per_client = " << b.samples_per_client << "\n"
      << "batch_size = " << b.batch_size << "\n"
      << "tau = " << b.tau << "\n"
      << "eta = " << format_double(b.eta) << "\n"
      << "iterations = " << b.iterations << "\n"
      << "repeats = " << b.repeats << "\n"
      << "m = " << b.m << "\n"
      << "noise_std = " << format_double(b.noise_std) << "\n"
      << "feature_std = " << format_double(b.feature_std) << "\n"
      << "test_samples = " << b.test_samples << "\n"
      << "k = ";
    for (std::size_t i = 0; i < c.fl.ks.size(); ++i) o << (i ? "," : "") << c.fl.ks[i];
    o << "\n";
    const bool both = c.fl.schemes.size() == 2;
    o << "scheme = " << (both ? std::string("all") : std::string(to_string(c.fl.schemes.front()))) << "\n";
    return o.str();
}

}  // namespace timelyfl
