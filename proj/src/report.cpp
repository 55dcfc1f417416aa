#include "sere/report.hpp"

#include "sere/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

namespace sere {

namespace {

using nlohmann::json;

json number(double v) {
    // JSON has no NaN/Inf; keep them as strings so they round-trip.
    if (std::isfinite(v)) return v;
    return format_double(v);
}

double read_number(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
}

json number_map(const std::map<std::string, double>& m) {
    json out = json::object();
    for (const auto& [k, v] : m) out[k] = number(v);
    return out;
}

std::map<std::string, double> read_number_map(const json& j) {
    std::map<std::string, double> out;
    for (const auto& [k, v] : j.items()) out[k] = read_number(v);
    return out;
}

}  // namespace

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

bool VerificationReport::passed() const {
    for (const auto& c : criteria)
        if (!c.passed) return false;
    return true;
}

ReportFormat parse_report_format(const std::string& text) {
    if (text == "csv") return ReportFormat::Csv;
    if (text == "json") return ReportFormat::Json;
    throw Error(Errc::ConfigError, "unknown report format '" + text + "'");
}

std::string to_csv(const VerificationReport& report) {
    std::string out = "epsilon,n_replicas,mc_estimate,mc_std_err,theory_value,oracle_value,abs_error,ks_p_value,verdict\n";
    for (const auto& r : report.rows) {
        out += format_double(r.epsilon) + ',' + std::to_string(r.n_replicas) + ',' + format_double(r.mc_estimate) +
               ',' + format_double(r.mc_std_err) + ',' + format_double(r.theory_value) + ',' +
               format_double(r.oracle_value) + ',' + format_double(r.abs_error) + ',' +
               format_double(r.ks_p_value) + ',' + r.verdict + '\n';
    }
    return out;
}

json to_json(const VerificationReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"epsilon", number(r.epsilon)},
                        {"n_replicas", r.n_replicas},
                        {"mc_estimate", number(r.mc_estimate)},
                        {"mc_std_err", number(r.mc_std_err)},
                        {"theory_value", number(r.theory_value)},
                        {"oracle_value", number(r.oracle_value)},
                        {"abs_error", number(r.abs_error)},
                        {"ks_p_value", number(r.ks_p_value)},
                        {"verdict", r.verdict},
                        {"label", r.label},
                        {"extras", number_map(r.extras)}});
    }
    json criteria = json::array();
    for (const auto& c : report.criteria)
        criteria.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return {{"kind", report.kind},
            {"rows", rows},
            {"criteria", criteria},
            {"diagnostics", number_map(report.diagnostics)},
            {"passed", report.passed()}};
}

VerificationReport report_from_json(const json& j) {
    VerificationReport report;
    report.kind = j.at("kind").get<std::string>();
    for (const auto& r : j.at("rows")) {
        ReportRow row;
        row.epsilon = read_number(r.at("epsilon"));
        row.n_replicas = r.at("n_replicas").get<std::size_t>();
        row.mc_estimate = read_number(r.at("mc_estimate"));
        row.mc_std_err = read_number(r.at("mc_std_err"));
        row.theory_value = read_number(r.at("theory_value"));
        row.oracle_value = read_number(r.at("oracle_value"));
        row.abs_error = read_number(r.at("abs_error"));
        row.ks_p_value = read_number(r.at("ks_p_value"));
        row.verdict = r.at("verdict").get<std::string>();
        row.label = r.value("label", "");
        if (r.contains("extras")) row.extras = read_number_map(r.at("extras"));
        report.rows.push_back(std::move(row));
    }
    for (const auto& c : j.at("criteria"))
        report.criteria.push_back({c.at("name").get<std::string>(), c.at("passed").get<bool>(),
                                   c.value("detail", "")});
    if (j.contains("diagnostics")) report.diagnostics = read_number_map(j.at("diagnostics"));
    return report;
}

std::string render_report(const VerificationReport& report, ReportFormat format) {
    if (format == ReportFormat::Csv) return to_csv(report);
    return to_json(report).dump(2) + '\n';
}

void emit_report(const VerificationReport& report, ReportFormat format, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
    out << render_report(report, format);
    if (!out) throw Error(Errc::IoError, "failed writing " + path.string());
}

}  // namespace sere
