/**
 * @file commands.hpp
 * @brief The analyses behind the `spectrum_scope` CLI, as functions from
 *        resolved options to output text plus a run manifest.
 *
 * Exit codes: 0 success, 1 invariant failure, 2 bad input, 3 resource cap,
 * 4 numerical non-convergence.
 */
#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <boost/crc.hpp>
#include <json.hpp>

#include "spectrum_scope/errors.hpp"
#include "spectrum_scope/ldp_analysis.hpp"
#include "spectrum_scope/rsk_sampler.hpp"
#include "spectrum_scope/sw_measure.hpp"
#include "spectrum_scope/verify.hpp"

namespace spectrum_scope::cli {

inline constexpr const char* tool_name = "spectrum_scope";
inline constexpr const char* tool_version = "1.0.0";

enum exit_code : int { ok = 0, invariant_failure = 1, bad_input = 2, resource_cap = 3, no_convergence = 4 };

/// Every user-facing parameter; unused ones keep their defaults.
struct Options {
    std::string command;
    int d = 0;
    int n = 0;
    std::string spectrum;  // comma-separated; empty means uniform
    std::string point;
    std::string epsilon = "0.1";
    std::string n_list;
    std::uint64_t samples = 10000;
    std::uint64_t seed = 0;
    int chains = 1;
    std::string format = "csv";
    std::string level = "quick";
    bool allow_unsorted = false;
    bool normalize = false;
    bool tamper_rate = false;
    int max_iterations = legendre_max_iterations;
};

inline void to_json(nlohmann::json& j, const Options& o) {
    j = nlohmann::json{{"command", o.command},   {"d", o.d},
                       {"n", o.n},               {"spectrum", o.spectrum},
                       {"point", o.point},       {"epsilon", o.epsilon},
                       {"n_list", o.n_list},     {"samples", o.samples},
                       {"seed", o.seed},         {"chains", o.chains},
                       {"format", o.format},     {"level", o.level},
                       {"allow_unsorted", o.allow_unsorted}, {"normalize", o.normalize},
                       {"tamper_rate", o.tamper_rate}, {"max_iterations", o.max_iterations}};
}

inline void from_json(const nlohmann::json& j, Options& o) {
    j.at("command").get_to(o.command);
    j.at("d").get_to(o.d);
    j.at("n").get_to(o.n);
    j.at("spectrum").get_to(o.spectrum);
    j.at("point").get_to(o.point);
    j.at("epsilon").get_to(o.epsilon);
    j.at("n_list").get_to(o.n_list);
    j.at("samples").get_to(o.samples);
    j.at("seed").get_to(o.seed);
    j.at("chains").get_to(o.chains);
    j.at("format").get_to(o.format);
    j.at("level").get_to(o.level);
    j.at("allow_unsorted").get_to(o.allow_unsorted);
    j.at("normalize").get_to(o.normalize);
    j.at("tamper_rate").get_to(o.tamper_rate);
    j.at("max_iterations").get_to(o.max_iterations);
}

struct Result {
    int exit = exit_code::ok;
    std::string output;
    std::string error;
    nlohmann::json manifest;
};

/// 17 significant digits (round-trip exact); inf / -inf / nan spelled out.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, end);
}

/// Worker count: SPECTRUM_SCOPE_THREADS when set, else the hardware default.
inline int thread_count() {
    if (const char* env = std::getenv("SPECTRUM_SCOPE_THREADS")) {
        int n = 0;
        auto [end, ec] = std::from_chars(env, env + std::string_view(env).size(), n);
        if (ec == std::errc{} && n >= 1) return n;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

inline std::vector<std::string> split_commas(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string_view::npos) end = text.size();
        std::string item(text.substr(start, end - start));
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
        start = end + 1;
    }
    return out;
}

inline double parse_real(const std::string& text) {
    double v = 0.0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size()) throw domain_error("not a number: '" + text + "'");
    return v;
}

inline std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (const auto& item : split_commas(text)) {
        int v = 0;
        auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc{} || end != item.data() + item.size()) throw domain_error("not an integer: '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw domain_error("empty integer list");
    return out;
}

/**
 * Parses a comma-separated probability vector. Unsorted input is rejected
 * unless allow_unsorted; a sum off by more than 1e-9 is rejected unless
 * normalize. Accepted input is rescaled to sum to one.
 */
inline Spectrum parse_spectrum(const std::string& text, int d, bool allow_unsorted, bool normalize) {
    if (text.empty()) {
        if (d < 1) throw domain_error("--d must be >= 1");
        return Spectrum::uniform(d);
    }
    std::vector<double> values;
    for (const auto& item : split_commas(text)) values.push_back(parse_real(item));
    if (d > 0 && static_cast<int>(values.size()) != d)
        throw domain_error("spectrum has " + std::to_string(values.size()) + " entries but --d is " + std::to_string(d));
    double sum = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (!std::isfinite(values[j]) || values[j] < 0.0) throw domain_error("spectrum entries must be finite and >= 0");
        if (j > 0 && values[j] > values[j - 1] && !allow_unsorted)
            throw domain_error("spectrum must be non-increasing (pass --allow-unsorted to sort it)");
        sum += values[j];
    }
    if (!(sum > 0.0)) throw domain_error("spectrum sums to zero");
    if (std::abs(sum - 1.0) > 1e-9 && !normalize)
        throw domain_error("spectrum sums to " + format_double(sum) + ", not 1 (pass --normalize to rescale)");
    // Input already on the simplex (to the Spectrum tolerance) is kept verbatim.
    if (std::abs(sum - 1.0) > spectrum_sum_tolerance)
        for (double& v : values) v /= sum;
    return Spectrum::canonical(std::move(values));
}

/// A CSV / JSON table: every cell is pre-formatted text, tagged with its JSON kind.
class Table {
public:
    enum class Cell { number, text, boolean };

    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add_row(std::vector<std::pair<std::string, Cell>> row) { rows_.push_back(std::move(row)); }

    static std::pair<std::string, Cell> num(double x) { return {format_double(x), Cell::number}; }
    static std::pair<std::string, Cell> num(std::int64_t x) { return {std::to_string(x), Cell::number}; }
    static std::pair<std::string, Cell> flag(bool b) { return {b ? "true" : "false", Cell::boolean}; }
    static std::pair<std::string, Cell> text(std::string s) { return {std::move(s), Cell::text}; }

    std::string render(const std::string& format) const {
        std::string out;
        if (format == "csv") {
            for (std::size_t c = 0; c < columns_.size(); ++c) out += (c ? "," : "") + columns_[c];
            out += '\n';
            for (const auto& row : rows_) {
                for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + csv_cell(row[c].first);
                out += '\n';
            }
            return out;
        }
        if (format != "json") throw domain_error("--format must be csv or json");
        out += "[\n";
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            out += "  {";
            for (std::size_t c = 0; c < columns_.size(); ++c) {
                out += (c ? ", " : "") + nlohmann::json(columns_[c]).dump() + ": ";
                const auto& [value, kind] = rows_[r][c];
                if (kind == Cell::text) out += nlohmann::json(value).dump();
                else if (kind == Cell::number && (value == "inf" || value == "-inf" || value == "nan")) out += "null";
                else out += value;
            }
            out += (r + 1 < rows_.size()) ? "},\n" : "}\n";
        }
        out += "]\n";
        return out;
    }

private:
    static std::string csv_cell(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) q += (ch == '"') ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    }

    std::vector<std::string> columns_;
    std::vector<std::vector<std::pair<std::string, Cell>>> rows_;
};

inline std::string checksum(const std::string& data) {
    boost::crc_32_type crc;
    crc.process_bytes(data.data(), data.size());
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08x", crc.checksum());
    return std::string("crc32:") + buf;
}

namespace detail {

inline std::vector<std::string> numbered(const std::string& stem, int d) {
    std::vector<std::string> out;
    for (int j = 1; j <= d; ++j) out.push_back(stem + std::to_string(j));
    return out;
}

inline nlohmann::json spectrum_json(const Spectrum& r) {
    auto out = nlohmann::json::array();
    for (double v : r.values()) out.push_back(format_double(v));
    return out;
}

inline void require_d(const Options& o) {
    if (o.d < 1) throw domain_error("--d must be >= 1");
}

inline Result dist(const Options& o) {
    require_d(o);
    Spectrum r = parse_spectrum(o.spectrum, o.d, o.allow_unsorted, o.normalize);
    auto dist = exact_distribution(o.d, o.n, r);
    std::vector<std::string> cols = numbered("Y", o.d);
    for (auto& c : numbered("est", o.d)) cols.push_back(c);
    cols.insert(cols.end(), {"prob", "log_prob"});
    Table table(std::move(cols));
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const YoungFrame& y = dist.frames()[i];
        std::vector<std::pair<std::string, Table::Cell>> row;
        for (int v : y.rows()) row.push_back(Table::num(std::int64_t{v}));
        for (int v : y.rows()) row.push_back(Table::num(static_cast<double>(v) / o.n));
        double lp = dist.log_probabilities()[i];
        row.push_back(Table::num(std::exp(lp)));
        row.push_back(Table::num(lp));
        table.add_row(std::move(row));
    }
    Result res;
    res.output = table.render(o.format);
    YoungFrame mode = distribution_mode(dist);
    res.manifest["schema"] = "dist/1";
    res.manifest["resolved_spectrum"] = spectrum_json(r);
    res.manifest["summary"] = {{"frames", dist.size()}, {"mode", mode.to_string()}};
    return res;
}

inline Result rate_scan(const Options& o) {
    require_d(o);
    Spectrum r = parse_spectrum(o.spectrum, o.d, o.allow_unsorted, o.normalize);
    double eps = parse_real(o.epsilon);
    std::vector<int> copies = parse_int_list(o.n_list);
    for (int N : copies)
        if (N < 1) throw domain_error("--n-list entries must be >= 1");
    Region region = Region::ball_complement(r, eps);
    RateProfile profile = spectrum_scope::rate_scan(o.d, r, region, copies);
    Table table({"N", "K_N", "a_N", "target", "a_N_infinite"});
    for (const auto& s : profile.samples)
        table.add_row({Table::num(std::int64_t{s.copies}), Table::num(s.probability), Table::num(s.decay),
                       Table::num(profile.target), Table::flag(s.infinite)});
    Result res;
    res.output = table.render(o.format);
    res.manifest["schema"] = "rate-scan/1";
    res.manifest["resolved_spectrum"] = spectrum_json(r);
    res.manifest["summary"] = {{"target", format_double(profile.target)},
                               {"minimizer", profile.minimizer ? spectrum_json(*profile.minimizer) : nlohmann::json()}};
    return res;
}

inline Result sample(const Options& o, int threads) {
    require_d(o);
    Spectrum r = parse_spectrum(o.spectrum, o.d, o.allow_unsorted, o.normalize);
    if (o.n < 1) throw domain_error("--n must be >= 1");
    if (o.samples < 1) throw domain_error("--samples must be >= 1");
    SamplerConfig cfg{o.d, o.n, r, o.seed, o.chains};
    auto emp = empirical_distribution(cfg, o.samples, threads);
    std::vector<std::string> cols = numbered("Y", o.d);
    for (auto& c : numbered("est", o.d)) cols.push_back(c);
    cols.insert(cols.end(), {"count", "frequency"});
    Table table(std::move(cols));
    std::vector<double> mean(static_cast<std::size_t>(o.d), 0.0), second(static_cast<std::size_t>(o.d), 0.0);
    const double total = static_cast<double>(o.samples);
    for (const auto& [y, count] : emp.counts) {
        std::vector<std::pair<std::string, Table::Cell>> row;
        for (int v : y.rows()) row.push_back(Table::num(std::int64_t{v}));
        for (std::size_t j = 0; j < y.rows().size(); ++j) {
            double est = static_cast<double>(y[j]) / o.n;
            row.push_back(Table::num(est));
            mean[j] += est * static_cast<double>(count) / total;
            second[j] += est * est * static_cast<double>(count) / total;
        }
        row.push_back(Table::num(static_cast<std::int64_t>(count)));
        row.push_back(Table::num(static_cast<double>(count) / total));
        table.add_row(std::move(row));
    }
    Result res;
    res.output = table.render(o.format);
    res.manifest["schema"] = "sample/1";
    res.manifest["resolved_spectrum"] = spectrum_json(r);
    nlohmann::json means = nlohmann::json::array(), variances = nlohmann::json::array();
    for (std::size_t j = 0; j < mean.size(); ++j) {
        means.push_back(format_double(mean[j]));
        variances.push_back(format_double(second[j] - mean[j] * mean[j]));
    }
    res.manifest["summary"] = {{"distinct_frames", emp.counts.size()}, {"mean_estimate", means}, {"variance_estimate", variances}};
    return res;
}

inline Result verify(const Options& o, int threads) {
    VerifyOptions opt;
    if (o.level == "quick") opt.level = VerifyLevel::quick;
    else if (o.level == "full") opt.level = VerifyLevel::full;
    else throw domain_error("--level must be quick or full");
    opt.threads = threads;
    if (o.tamper_rate)
        opt.rate_function = [](const Spectrum& s, const Spectrum& r) { return rate(s, r) + 1e-3; };
    auto checks = run_verification(opt);
    Table table({"check", "passed", "detail"});
    bool all = true;
    for (const auto& c : checks) {
        table.add_row({Table::text(c.name), Table::flag(c.passed), Table::text(c.detail)});
        all = all && c.passed;
    }
    Result res;
    res.output = table.render(o.format);
    res.manifest["schema"] = "verify/1";
    if (!all) {
        res.exit = exit_code::invariant_failure;
        for (const auto& c : checks)
            if (!c.passed) res.error += "invariant failed: " + c.name + " (" + c.detail + ")\n";
    }
    return res;
}

inline Result legendre(const Options& o) {
    Spectrum r = parse_spectrum(o.spectrum, o.d, o.allow_unsorted, o.normalize);
    if (o.point.empty()) throw domain_error("--point is required");
    Spectrum s = parse_spectrum(o.point, r.size(), o.allow_unsorted, o.normalize);
    double direct = spectrum_scope::rate(s, r);
    if (o.max_iterations < 0) throw domain_error("--max-iterations must be >= 0");
    LegendreResult dual = legendre_of_cgf(s, r, o.max_iterations);
    double diff = (std::isinf(direct) && std::isinf(dual.value)) ? 0.0 : dual.value - direct;
    std::vector<std::string> cols{"rate", "legendre", "difference", "iterations"};
    for (auto& c : numbered("eta", r.size())) cols.push_back(c);
    Table table(std::move(cols));
    std::vector<std::pair<std::string, Table::Cell>> row{Table::num(direct), Table::num(dual.value), Table::num(diff),
                                                         Table::num(std::int64_t{dual.iterations})};
    for (double e : dual.eta) row.push_back(Table::num(e));
    table.add_row(std::move(row));
    Result res;
    res.output = table.render(o.format);
    res.manifest["schema"] = "legendre/1";
    res.manifest["resolved_spectrum"] = spectrum_json(r);
    return res;
}

}  // namespace detail

/// Runs one command and fills in its manifest; exceptions become exit codes.
inline Result run(const Options& o, int threads) {
    Result res;
    try {
        if (o.format != "csv" && o.format != "json") throw domain_error("--format must be csv or json");
        if (o.command == "dist") res = detail::dist(o);
        else if (o.command == "rate-scan") res = detail::rate_scan(o);
        else if (o.command == "sample") res = detail::sample(o, threads);
        else if (o.command == "verify") res = detail::verify(o, threads);
        else if (o.command == "legendre") res = detail::legendre(o);
        else throw domain_error("unknown command '" + o.command + "'");
    } catch (const domain_error& e) {
        res = Result{exit_code::bad_input, "", e.what(), {}};
    } catch (const resource_error& e) {
        res = Result{exit_code::resource_cap, "", e.what(), {}};
    } catch (const convergence_error& e) {
        res = Result{exit_code::no_convergence, "", e.what(), {}};
    }
    if (res.exit == exit_code::ok || res.exit == exit_code::invariant_failure) {
        res.manifest["tool"] = tool_name;
        res.manifest["version"] = tool_version;
        res.manifest["command"] = o.command;
        res.manifest["parameters"] = o;
        res.manifest["seed"] = o.seed;
        res.manifest["output_checksum"] = checksum(res.output);
    }
    return res;
}

/// Re-runs the command a manifest describes; exit 0 iff the output checksum matches.
inline Result replay(const nlohmann::json& manifest, int threads) {
    Options o;
    try {
        o = manifest.at("parameters").get<Options>();
    } catch (const nlohmann::json::exception& e) {
        return Result{exit_code::bad_input, "", std::string("malformed manifest: ") + e.what(), {}};
    }
    Result rerun = run(o, threads);
    if (rerun.exit != exit_code::ok && rerun.exit != exit_code::invariant_failure) return rerun;
    std::string expected = manifest.value("output_checksum", "");
    std::string actual = rerun.manifest["output_checksum"].get<std::string>();
    Result res;
    res.output = "expected " + expected + "\nactual   " + actual + "\n";
    res.exit = (expected == actual) ? exit_code::ok : exit_code::invariant_failure;
    if (res.exit != exit_code::ok) res.error = "replay checksum mismatch";
    return res;
}

}  // namespace spectrum_scope::cli
