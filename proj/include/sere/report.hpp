#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace sere {

struct ReportRow {
    double epsilon = 0.0;
    std::size_t n_replicas = 0;
    double mc_estimate = 0.0;
    double mc_std_err = 0.0;
    double theory_value = 0.0;
    double oracle_value = 0.0;
    double abs_error = 0.0;
    double ks_p_value = 0.0;
    std::string verdict;
    std::string label;
    std::map<std::string, double> extras;

    friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct Criterion {
    std::string name;
    bool passed = false;
    std::string detail;

    friend bool operator==(const Criterion&, const Criterion&) = default;
};

struct VerificationReport {
    std::string kind;
    std::vector<ReportRow> rows;
    std::vector<Criterion> criteria;
    std::map<std::string, double> diagnostics;

    bool passed() const;
    friend bool operator==(const VerificationReport&, const VerificationReport&) = default;
};

enum class ReportFormat { Csv, Json };

ReportFormat parse_report_format(const std::string& text);

/// Columns: epsilon, n_replicas, mc_estimate, mc_std_err, theory_value,
/// oracle_value, abs_error, ks_p_value, verdict.
std::string to_csv(const VerificationReport& report);

nlohmann::json to_json(const VerificationReport& report);
VerificationReport report_from_json(const nlohmann::json& j);

std::string render_report(const VerificationReport& report, ReportFormat format);

/// Writes the rendered report; throws IoError when the file cannot be written.
void emit_report(const VerificationReport& report, ReportFormat format, const std::filesystem::path& path);

/// Shortest round-trip decimal text; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double value);

}  // namespace sere
