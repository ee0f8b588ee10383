#include "ham/empirical.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ham/errors.hpp"

namespace ham::empirical {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            return out;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

bool is_missing(std::string_view v) {
    const std::string l = lower(v);
    return l.empty() || l == "na" || l == "nan" || l == "null" || l == ".";
}

int parse_int(std::string_view s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw std::invalid_argument("bad date '" + std::string(s) + "'");
    return v;
}

const char* arrow(int dir) { return dir > 0 ? "↑" : "↓"; }

}  // namespace

Date parse_date(std::string_view text) {
    text = trim(text);
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw std::invalid_argument("bad date '" + std::string(text) + "', expected YYYY-MM-DD");
    const Date d{std::chrono::year{parse_int(text.substr(0, 4))},
                 std::chrono::month{static_cast<unsigned>(parse_int(text.substr(5, 2)))},
                 std::chrono::day{static_cast<unsigned>(parse_int(text.substr(8, 2)))}};
    if (!d.ok()) throw std::invalid_argument("invalid calendar date '" + std::string(text) + "'");
    return d;
}

std::string format_date(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

const PriceSeries* PriceData::find(std::string_view ticker) const {
    const auto it = std::lower_bound(series.begin(), series.end(), ticker,
                                     [](const PriceSeries& s, std::string_view t) { return s.ticker < t; });
    return it != series.end() && it->ticker == ticker ? &*it : nullptr;
}

PriceData parse_prices(std::istream& in) {
    struct Row {
        Date date;
        double close;
        long line;
    };
    std::map<std::string, std::vector<Row>> rows;
    PriceData out;
    std::string line;
    long lineno = 0;
    bool any_data = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view view = trim(line);
        if (view.empty()) continue;
        const auto fields = split_csv(view);
        if (lineno == 1 && fields.size() == 3 && lower(fields[0]) == "date") continue;
        if (fields.size() != 3)
            throw DataError("expected 3 fields (date,ticker,close), got " + std::to_string(fields.size()),
                            lineno);
        any_data = true;
        Date date;
        try {
            date = parse_date(fields[0]);
        } catch (const std::invalid_argument& e) {
            throw DataError(e.what(), lineno);
        }
        if (fields[1].empty()) throw DataError("empty ticker", lineno);
        if (is_missing(fields[2])) {
            ++out.dropped_missing;
            continue;
        }
        double close = 0.0;
        const auto [ptr, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), close);
        if (ec != std::errc{} || ptr != fields[2].data() + fields[2].size())
            throw DataError("bad close '" + std::string(fields[2]) + "'", lineno);
        if (!(close > 0.0) || !std::isfinite(close))
            throw DataError("close must be positive, got " + std::string(fields[2]), lineno);
        rows[std::string(fields[1])].push_back({date, close, lineno});
    }
    if (!any_data) throw DataError("price file holds no data rows");
    if (out.dropped_missing > 0)
        out.log.push_back("dropped " + std::to_string(out.dropped_missing) + " rows with missing close");

    for (auto& [ticker, rs] : rows) {
        const bool sorted = std::is_sorted(rs.begin(), rs.end(),
                                           [](const Row& a, const Row& b) { return a.date < b.date; });
        if (!sorted) {
            std::stable_sort(rs.begin(), rs.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
            out.log.push_back("warning: " + ticker + " dates out of order, sorted on load");
        }
        PriceSeries s;
        s.ticker = ticker;
        for (std::size_t i = 0; i < rs.size(); ++i) {
            if (i > 0 && rs[i].date == rs[i - 1].date) {
                throw DataError("duplicate row for (" + format_date(rs[i].date) + ", " + ticker +
                                    "), first seen on line " +
                                    std::to_string(std::min(rs[i].line, rs[i - 1].line)),
                                std::max(rs[i].line, rs[i - 1].line));
            }
            s.observations.push_back({rs[i].date, rs[i].close});
        }
        out.series.push_back(std::move(s));
    }
    return out;
}

PriceData load_prices(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open price file " + path.string());
    return parse_prices(in);
}

std::vector<DatedDifference> dated_differences(const PriceSeries& series) {
    if (series.observations.size() < 2)
        throw InsufficientSample("difference: " + series.ticker + " has fewer than 2 observations");
    std::vector<DatedDifference> out;
    out.reserve(series.observations.size() - 1);
    for (std::size_t i = 1; i < series.observations.size(); ++i) {
        out.push_back({series.observations[i].date,
                       series.observations[i].close - series.observations[i - 1].close});
    }
    return out;
}

std::vector<double> difference(const PriceSeries& series) {
    const auto dated = dated_differences(series);
    std::vector<double> out;
    out.reserve(dated.size());
    for (const auto& d : dated) out.push_back(d.value);
    return out;
}

std::vector<EventSpec> parse_events(std::string_view json_text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("event file: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("events") || !doc["events"].is_array())
        throw DataError("event file: expected an object with an \"events\" array");
    static const std::set<std::string> allowed{"name", "bpd", "window_days", "tickers", "exclusions",
                                               "description"};
    std::vector<EventSpec> out;
    for (const auto& e : doc["events"]) {
        const std::string where = "event #" + std::to_string(out.size() + 1);
        if (!e.is_object()) throw DataError(where + ": expected an object");
        for (const auto& [key, _] : e.items())
            if (!allowed.count(key)) throw DataError(where + ": unknown key '" + key + "'");
        try {
            EventSpec ev;
            ev.name = e.at("name").get<std::string>();
            ev.bpd = parse_date(e.at("bpd").get<std::string>());
            ev.window_days = e.value("window_days", 20);
            if (ev.window_days < 1) throw DataError(where + ": window_days must be >= 1");
            ev.tickers = e.at("tickers").get<std::vector<std::string>>();
            for (const auto& x : e.value("exclusions", json::array())) {
                ev.exclusions.push_back({x.at("ticker").get<std::string>(), x.value("reason", "")});
            }
            ev.description = e.value("description", "");
            out.push_back(std::move(ev));
        } catch (const json::exception& ex) {
            throw DataError(where + ": " + ex.what());
        } catch (const std::invalid_argument& ex) {
            throw DataError(where + ": " + ex.what());
        }
    }
    return out;
}

std::vector<EventSpec> load_events(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open event file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_events(ss.str());
}

WindowSplit window_split(const PriceData& data, const EventSpec& event) {
    WindowSplit out;
    const auto w = static_cast<std::size_t>(event.window_days);

    std::vector<const PriceSeries*> candidates;
    for (const auto& t : event.tickers) {
        const bool excluded = std::any_of(event.exclusions.begin(), event.exclusions.end(),
                                          [&](const Exclusion& x) { return x.ticker == t; });
        if (excluded) continue;
        const PriceSeries* s = data.find(t);
        if (s == nullptr) {
            out.log.push_back(event.name + ": " + t + " skipped, not in data");
            continue;
        }
        candidates.push_back(s);
    }
    for (const auto& x : event.exclusions)
        out.log.push_back(event.name + ": " + x.ticker + " excluded" + (x.reason.empty() ? "" : " (" + x.reason + ")"));

    std::set<Date> calendar_set;
    for (const auto* s : candidates)
        for (const auto& o : s->observations) calendar_set.insert(o.date);
    const std::vector<Date> calendar(calendar_set.begin(), calendar_set.end());

    // Last trading day on or before the break date.
    const auto upper = std::upper_bound(calendar.begin(), calendar.end(), event.bpd);
    const auto anchor = static_cast<std::ptrdiff_t>(upper - calendar.begin()) - 1;
    if (anchor < static_cast<std::ptrdiff_t>(w) ||
        static_cast<std::size_t>(anchor) + w >= calendar.size()) {
        out.log.push_back(event.name + ": trading calendar does not cover " + std::to_string(w) +
                          " days on both sides of " + format_date(event.bpd) + ", all tickers skipped");
        return out;
    }
    const auto a = static_cast<std::size_t>(anchor);
    if (calendar[a] != event.bpd) {
        out.log.push_back("warning: " + event.name + ": " + format_date(event.bpd) +
                          " is not a trading day; after window starts " + format_date(calendar[a + 1]));
    }
    out.before_dates.assign(calendar.begin() + static_cast<std::ptrdiff_t>(a + 1 - w),
                            calendar.begin() + static_cast<std::ptrdiff_t>(a + 1));
    out.after_dates.assign(calendar.begin() + static_cast<std::ptrdiff_t>(a + 1),
                           calendar.begin() + static_cast<std::ptrdiff_t>(a + 1 + w));
    const Date needs_from = calendar[a - w];
    const Date needs_to = out.after_dates.back();

    for (const auto* s : candidates) {
        const auto& obs = s->observations;
        if (obs.front().date > needs_from || obs.back().date < needs_to) {
            out.log.push_back(event.name + ": " + s->ticker + " skipped, insufficient history (data " +
                              format_date(obs.front().date) + " to " + format_date(obs.back().date) + ")");
            continue;
        }
        std::size_t n_before = 0;
        std::size_t n_after = 0;
        for (const auto& d : dated_differences(*s)) {
            if (d.date < out.before_dates.front() || d.date > needs_to) continue;
            if (d.date <= out.before_dates.back()) {
                out.before.push_back(d.value);
                ++n_before;
            } else {
                out.after.push_back(d.value);
                ++n_after;
            }
        }
        out.included.push_back(s->ticker);
        if (n_before != w || n_after != w) {
            out.log.push_back(event.name + ": " + s->ticker + " partial coverage, " + std::to_string(n_before) +
                              " before and " + std::to_string(n_after) + " after differences");
        }
    }
    return out;
}

int direction(double before, double after) noexcept {
    if (after > before) return 1;
    if (after < before) return -1;
    return 0;
}

std::string Tally::label() const {
    const std::string n = std::to_string(n_events);
    if (majority == 0) {
        if (up == 0 && down == 0) return "0/" + n;
        return std::to_string(up) + "↑ " + std::to_string(down) + "↓ of " + n;
    }
    return std::to_string(count()) + "/" + n + " " + arrow(majority) + std::string(static_cast<std::size_t>(stars), '*');
}

std::array<Tally, 4> tally(const std::vector<EventResult>& events) {
    std::array<Tally, 4> out{};
    for (std::size_t k = 0; k < 4; ++k) {
        Tally& t = out[k];
        t.n_events = static_cast<int>(events.size());
        for (const auto& e : events) {
            const int dir = k == 0 ? e.mean_dir : k == 1 ? e.var_dir : k == 2 ? e.skew_dir : e.kurt_dir;
            t.up += dir > 0 ? 1 : 0;
            t.down += dir < 0 ? 1 : 0;
        }
        t.majority = t.up > t.down ? 1 : t.down > t.up ? -1 : 0;
        if (t.majority != 0 && k < 2) {
            int stars = 3;
            for (const auto& e : events) {
                const int dir = k == 0 ? e.mean_dir : e.var_dir;
                if (dir == t.majority) stars = std::min(stars, k == 0 ? e.mean_stars : e.var_stars);
            }
            t.stars = stars;
        }
    }
    return out;
}

EmpiricalReport empirical_report(const std::vector<EventSpec>& events, const PriceData& data) {
    EmpiricalReport report;
    for (const auto& ev : events) {
        WindowSplit split = window_split(data, ev);
        report.log.insert(report.log.end(), split.log.begin(), split.log.end());
        try {
            EventResult r;
            r.name = ev.name;
            r.bpd = ev.bpd;
            r.before = stats::moments(split.before);
            r.after = stats::moments(split.after);
            r.mean_test = stats::mean_difference_test(split.after, split.before);
            r.variance_test = stats::variance_ratio_test(split.after, split.before);
            r.jb_before = stats::jarque_bera(split.before);
            r.jb_after = stats::jarque_bera(split.after);
            r.mean_dir = direction(r.before.mean, r.after.mean);
            r.var_dir = direction(r.before.variance, r.after.variance);
            r.skew_dir = direction(r.before.skewness, r.after.skewness);
            r.kurt_dir = direction(r.before.kurtosis, r.after.kurtosis);
            r.mean_stars = stats::significance_stars(r.mean_test.p_value);
            r.var_stars = stats::significance_stars(r.variance_test.p_value);
            r.var_delta_pct = 100.0 * (r.after.variance - r.before.variance) / std::abs(r.before.variance);
            r.kurt_delta_pct = 100.0 * (r.after.kurtosis - r.before.kurtosis) / std::abs(r.before.kurtosis);
            r.included = std::move(split.included);
            report.events.push_back(std::move(r));
        } catch (const std::exception& e) {
            report.log.push_back(ev.name + ": event skipped, " + e.what());
        }
    }
    report.summary = tally(report.events);
    return report;
}

}  // namespace ham::empirical
