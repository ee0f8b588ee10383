#include "ham/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ham/errors.hpp"

namespace ham {

namespace {

using nlohmann::json;

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) return out;
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
}

BreakTarget target_suffix(std::string_view rest, std::string_view whole) {
    if (rest.empty() || rest == "both") return BreakTarget::both;
    if (rest == "bias") return BreakTarget::bias_only;
    if (rest == "trend") return BreakTarget::trend_only;
    if (rest == "mix" || rest == "mixed") return BreakTarget::mixed;
    throw InvalidConfig("unknown setup '" + std::string(whole) + "'");
}

BreakSpec parse_element(std::string_view e, double level) {
    if (e == "herding") return BreakSpec{BreakKind::herding};
    constexpr std::string_view ovc = "overconfidence";
    constexpr std::string_view sent = "sentiment";
    if (e.substr(0, ovc.size()) == ovc) {
        std::string_view rest = e.substr(ovc.size());
        if (!rest.empty()) {
            if (rest.front() != '+') throw InvalidConfig("unknown setup '" + std::string(e) + "'");
            rest.remove_prefix(1);
        }
        const BreakTarget t = target_suffix(rest, e);
        if (t == BreakTarget::mixed) throw InvalidConfig("overconfidence has no mixed variant");
        return BreakSpec::at_level(BreakKind::overconfidence, t, Sign::positive, level);
    }
    if (e.substr(0, sent.size()) == sent && e.size() > sent.size()) {
        const char s = e[sent.size()];
        if (s != '+' && s != '-') throw InvalidConfig("unknown setup '" + std::string(e) + "'");
        const BreakTarget t = target_suffix(e.substr(sent.size() + 1), e);
        return BreakSpec::at_level(BreakKind::sentiment, t, s == '+' ? Sign::positive : Sign::negative, level);
    }
    throw InvalidConfig("unknown setup '" + std::string(e) + "'");
}

// Strict accessors that report the JSON path of the offending value.
class Reader {
public:
    Reader(const json& obj, std::string path, std::set<std::string> allowed) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw InvalidConfig(where() + "expected an object");
        for (const auto& [key, _] : obj_.items())
            if (!allowed.count(key)) throw InvalidConfig(where() + "unknown key '" + key + "'");
    }

    void number(const char* key, double& out) const {
        if (const json* v = find(key)) {
            if (!v->is_number()) throw InvalidConfig(where(key) + "expected a number");
            out = v->get<double>();
        }
    }
    void integer(const char* key, int& out) const {
        if (const json* v = find(key)) {
            if (!v->is_number_integer()) throw InvalidConfig(where(key) + "expected an integer");
            out = v->get<int>();
        }
    }
    void unsigned_integer(const char* key, std::uint64_t& out) const {
        if (const json* v = find(key)) {
            if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
                throw InvalidConfig(where(key) + "expected a non-negative integer");
            out = v->get<std::uint64_t>();
        }
    }
    void boolean(const char* key, bool& out) const {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) throw InvalidConfig(where(key) + "expected true or false");
            out = v->get<bool>();
        }
    }
    void string(const char* key, std::string& out) const {
        if (const json* v = find(key)) {
            if (!v->is_string()) throw InvalidConfig(where(key) + "expected a string");
            out = v->get<std::string>();
        }
    }
    void numbers(const char* key, std::vector<double>& out) const {
        if (const json* v = find(key)) {
            if (!v->is_array() || v->empty()) throw InvalidConfig(where(key) + "expected a non-empty array");
            out.clear();
            for (const auto& x : *v) {
                if (!x.is_number()) throw InvalidConfig(where(key) + "expected numbers");
                out.push_back(x.get<double>());
            }
        }
    }
    [[nodiscard]] const json* find(const char* key) const {
        const auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }
    [[nodiscard]] std::string where(const char* key = nullptr) const {
        std::string p = path_;
        if (key != nullptr) p += p.empty() ? key : std::string(".") + key;
        return p.empty() ? std::string() : p + ": ";
    }

private:
    const json& obj_;
    std::string path_;
};

}  // namespace

Setup parse_setup(std::string_view name, double level) {
    Setup out;
    out.label = std::string(trim(name));
    if (out.label.empty()) throw InvalidConfig("empty setup name");
    for (std::string_view part : split(out.label, ',')) {
        part = trim(part);
        if (part == "none") continue;
        if (part.empty()) throw InvalidConfig("empty element in setup '" + out.label + "'");
        out.breaks.push_back(parse_element(part, level));
    }
    for (std::size_t i = 0; i < out.breaks.size(); ++i)
        for (std::size_t j = i + 1; j < out.breaks.size(); ++j)
            if (out.breaks[i].kind == out.breaks[j].kind)
                throw InvalidConfig("setup '" + out.label + "' repeats " + to_string(out.breaks[i].kind));
    return out;
}

std::vector<std::string> paper13_setup_names() {
    return {"none",           "herding",         "overconfidence+bias", "overconfidence+trend",
            "overconfidence", "sentiment+bias",  "sentiment+trend",     "sentiment+mix",
            "sentiment+",     "sentiment-bias",  "sentiment-trend",     "sentiment-mix",
            "sentiment-"};
}

void ExperimentConfig::validate() const {
    run.validate();
    if (setups.empty()) throw InvalidConfig("no setups given");
    if (!(level > 0.0 && level <= 1.0)) throw InvalidConfig("level must lie in (0, 1]");
    for (const auto& s : setups) {
        RunConfig probe = run;
        probe.breaks = parse_setup(s, level).breaks;
        probe.validate();
    }
    for (double b : betas)
        if (!(b >= 0.0) || !std::isfinite(b)) throw InvalidConfig("betas must be finite and >= 0");
    for (double l : levels)
        if (!(l > 0.0 && l <= 1.0)) throw InvalidConfig("levels must lie in (0, 1]");
    if (n_perm < 99) throw InvalidConfig("n_perm must be >= 99");
    if (run.threads < 1) throw InvalidConfig("threads must be >= 1");
}

ExperimentConfig parse_experiment_config(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InvalidConfig(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    const Reader top(doc, "",
                     {"seed", "perm_seed", "n_perm", "threads", "out_dir", "pooled_tests", "setups", "level",
                      "grid", "betas", "levels", "run", "market", "generator", "extensions", "events"});
    top.unsigned_integer("seed", cfg.run.seed);
    top.unsigned_integer("perm_seed", cfg.perm_seed);
    top.integer("n_perm", cfg.n_perm);
    top.integer("threads", cfg.run.threads);
    top.string("out_dir", cfg.out_dir);
    top.boolean("pooled_tests", cfg.pooled_tests);
    top.number("level", cfg.level);
    top.numbers("betas", cfg.betas);
    top.numbers("levels", cfg.levels);

    if (const json* s = top.find("setups")) {
        if (s->is_string() && s->get<std::string>() == "paper13") {
            cfg.setups = paper13_setup_names();
        } else if (s->is_array() && !s->empty()) {
            for (const auto& x : *s) {
                if (!x.is_string()) throw InvalidConfig("setups: expected setup names");
                cfg.setups.push_back(x.get<std::string>());
            }
        } else {
            throw InvalidConfig("setups: expected \"paper13\" or a non-empty array of names");
        }
    } else {
        cfg.setups = {"none"};
    }
    if (const json* g = top.find("grid")) {
        const std::string mode = g->is_string() ? g->get<std::string>() : "";
        if (mode == "single")
            cfg.grid = GridMode::single;
        else if (mode == "full")
            cfg.grid = GridMode::full;
        else
            throw InvalidConfig("grid: expected \"single\" or \"full\"");
    }
    if (const json* r = top.find("run")) {
        const Reader rd(*r, "run", {"T", "bpd", "burn_frac", "window", "n_runs"});
        rd.integer("T", cfg.run.T);
        rd.integer("bpd", cfg.run.bpd);
        rd.number("burn_frac", cfg.run.burn_frac);
        rd.integer("window", cfg.run.window);
        rd.integer("n_runs", cfg.run.n_runs);
    }
    if (const json* m = top.find("market")) {
        const Reader rd(*m, "market", {"R", "beta", "risk_term", "H", "noise_halfwidth", "ybar"});
        rd.number("R", cfg.run.market.R);
        rd.number("beta", cfg.run.market.beta);
        rd.number("risk_term", cfg.run.market.risk_term);
        rd.integer("H", cfg.run.market.H);
        rd.number("noise_halfwidth", cfg.run.market.noise_halfwidth);
        rd.number("ybar", cfg.run.market.ybar);
    }
    if (const json* g = top.find("generator")) {
        const Reader rd(*g, "generator", {"g_mean", "g_sd", "b_mean", "b_sd"});
        rd.number("g_mean", cfg.run.gen.g_mean);
        rd.number("g_sd", cfg.run.gen.g_sd);
        rd.number("b_mean", cfg.run.gen.b_mean);
        rd.number("b_sd", cfg.run.gen.b_sd);
    }
    if (const json* e = top.find("extensions")) {
        const Reader rd(*e, "extensions", {"fundamentalist_default", "stochastic_params", "memory"});
        rd.boolean("fundamentalist_default", cfg.run.extensions.fundamentalist_default);
        rd.boolean("stochastic_params", cfg.run.extensions.stochastic_params);
        rd.boolean("memory", cfg.run.extensions.memory);
    }
    if (const json* ev = top.find("events")) {
        try {
            cfg.events = empirical::parse_events(json{{"events", *ev}}.dump());
        } catch (const DataError& e) {
            throw InvalidConfig(std::string("events: ") + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_experiment_config(ss.str());
}

}  // namespace ham
