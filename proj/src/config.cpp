#include "sere/config.hpp"

#include "sere/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

namespace sere {

namespace {

using nlohmann::json;

constexpr std::pair<ExperimentKind, std::string_view> kKindNames[] = {
    {ExperimentKind::Lln, "lln"},
    {ExperimentKind::AveragingTraffic, "averaging_traffic"},
    {ExperimentKind::AveragingSummation, "averaging_summation"},
    {ExperimentKind::AveragingOperator, "averaging_operator"},
    {ExperimentKind::DiffusionSummation, "diffusion_summation"},
    {ExperimentKind::DiffusionTraffic, "diffusion_traffic"},
    {ExperimentKind::DiffusionOperator, "diffusion_operator"},
    {ExperimentKind::Ruin, "ruin"},
};

constexpr std::pair<PathType, std::string_view> kPathNames[] = {
    {PathType::Swish, "swish"},         {PathType::Compound, "compound"},
    {PathType::ImpulseTraffic, "impulse_traffic"}, {PathType::Risk, "risk"},
    {PathType::Geometric, "geometric"}, {PathType::SwitchedDiffusion, "switched_diffusion"},
};

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw Error(Errc::ConfigError, key.empty() ? what : "'" + key + "': " + what);
}

std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

int bracket_depth(const std::string& s) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_string = !in_string;
        if (in_string) continue;
        if (s[i] == '[') ++depth;
        if (s[i] == ']') --depth;
    }
    return depth;
}

std::map<std::string, json> parse_entries(std::string_view text) {
    std::map<std::string, json> entries;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("", "line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        while (bracket_depth(value) > 0 && std::getline(in, line)) {
            ++line_no;
            value += " " + trim(strip_comment(line));
        }
        if (key.empty() || !std::regex_match(key, std::regex("[A-Za-z_][A-Za-z0-9_]*")))
            fail(key, "line " + std::to_string(line_no) + ": invalid key");
        if (entries.count(key)) fail(key, "duplicate key");
        // TOML arrays may carry a trailing comma; JSON may not.
        value = std::regex_replace(value, std::regex(",\\s*\\]"), "]");
        try {
            entries[key] = json::parse(value);
        } catch (const json::parse_error&) {
            fail(key, "cannot parse value '" + value + "'");
        }
    }
    return entries;
}

double as_double(const std::string& key, const json& j) {
    if (!j.is_number()) fail(key, "expected a number");
    return j.get<double>();
}

std::uint64_t as_count(const std::string& key, const json& j) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
    if (j.is_number_float()) {
        const double d = j.get<double>();
        if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    fail(key, "expected a non-negative integer");
}

std::vector<double> as_list(const std::string& key, const json& j) {
    if (!j.is_array()) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : j) out.push_back(as_double(key, e));
    return out;
}

Vector as_vector(const std::string& key, const json& j) {
    const auto list = as_list(key, j);
    return Eigen::Map<const Vector>(list.data(), static_cast<Eigen::Index>(list.size()));
}

Matrix as_matrix(const std::string& key, const json& j) {
    if (!j.is_array() || j.empty()) fail(key, "expected a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    Matrix m;
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto row = as_list(key, j[static_cast<std::size_t>(r)]);
        if (r == 0) m.resize(rows, static_cast<Eigen::Index>(row.size()));
        if (static_cast<Eigen::Index>(row.size()) != m.cols()) fail(key, "ragged matrix rows");
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = row[static_cast<std::size_t>(c)];
    }
    return m;
}

std::vector<Matrix> as_matrices(const std::string& key, const json& j) {
    if (!j.is_array()) fail(key, "expected an array of matrices");
    std::vector<Matrix> out;
    for (const auto& e : j) out.push_back(as_matrix(key, e));
    return out;
}

std::string as_string(const std::string& key, const json& j) {
    if (!j.is_string()) fail(key, "expected a string");
    return j.get<std::string>();
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
    for (const auto& [k, name] : kKindNames)
        if (k == kind) return name;
    return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
    for (const auto& [k, name] : kKindNames)
        if (name == text) return k;
    fail("kind", "unknown experiment kind '" + std::string(text) + "'");
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig c;
    for (const auto& [key, value] : parse_entries(text)) {
        if (key == "kind") c.kind = parse_experiment_kind(as_string(key, value));
        else if (key == "lambda") c.lambda = as_double(key, value);
        else if (key == "alpha") c.alpha = as_double(key, value);
        else if (key == "beta") c.beta = as_double(key, value);
        else if (key == "transition") c.transition = as_matrix(key, value);
        else if (key == "x0") c.x0 = as_count(key, value);
        else if (key == "marks") c.marks = as_vector(key, value);
        else if (key == "rate_c0") c.rate_c0 = as_vector(key, value);
        else if (key == "rate_c1") c.rate_c1 = as_vector(key, value);
        else if (key == "vol") c.vol = as_vector(key, value);
        else if (key == "gamma") c.gamma = as_matrices(key, value);
        else if (key == "d1") c.d1 = as_matrices(key, value);
        else if (key == "d2") c.d2 = as_matrices(key, value);
        else if (key == "f") c.f = as_vector(key, value);
        else if (key == "epsilon_ladder") c.epsilon_ladder = as_list(key, value);
        else if (key == "horizons") c.horizons = as_list(key, value);
        else if (key == "t") c.t = as_double(key, value);
        else if (key == "dt") c.dt = as_double(key, value);
        else if (key == "z0") c.z0 = as_double(key, value);
        else if (key == "n_replicas") c.n_replicas = as_count(key, value);
        else if (key == "seed") c.seed = as_count(key, value);
        else if (key == "output_path") c.output_path = as_string(key, value);
        else if (key == "m") c.m = as_double(key, value);
        else if (key == "m2") c.m2 = as_double(key, value);
        else if (key == "moment_events") c.moment_events = as_count(key, value);
        else if (key == "capitals") c.capitals = as_list(key, value);
        else if (key == "premium") c.premium = as_double(key, value);
        else if (key == "horizon") c.horizon = as_double(key, value);
        else if (key == "ks_batches") c.ks_batches = as_count(key, value);
        else if (key == "max_events") c.max_events = as_count(key, value);
        else if (key == "s0") c.s0 = as_double(key, value);
        else if (key == "include_initial_mark") {
            if (!value.is_boolean()) fail(key, "expected true or false");
            c.include_initial_mark = value.get<bool>();
        } else if (key == "path_type") {
            const auto name = as_string(key, value);
            bool found = false;
            for (const auto& [p, n] : kPathNames)
                if (n == name) {
                    c.path_type = p;
                    found = true;
                }
            if (!found) fail(key, "unknown path type '" + name + "'");
        } else {
            fail(key, "unknown key");
        }
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::ConfigError, "cannot read config " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

void ExperimentConfig::validate() const {
    if (n_replicas < 100) fail("n_replicas", "must be at least 100");
    if (epsilon_ladder.empty()) fail("epsilon_ladder", "must not be empty");
    for (std::size_t i = 0; i < epsilon_ladder.size(); ++i) {
        const double e = epsilon_ladder[i];
        if (!(e > 0.0 && e <= 1.0)) fail("epsilon_ladder", "values must lie in (0, 1]");
        if (i > 0 && !(e < epsilon_ladder[i - 1])) fail("epsilon_ladder", "must be strictly decreasing");
    }
    for (std::size_t i = 0; i < horizons.size(); ++i)
        if (!(horizons[i] > 0.0) || (i > 0 && !(horizons[i] > horizons[i - 1])))
            fail("horizons", "must be positive and strictly increasing");
    if (!(t > 0.0)) fail("t", "must be positive");
    if (!(dt > 0.0)) fail("dt", "must be positive");
    if (!(horizon > 0.0)) fail("horizon", "must be positive");
    if (ks_batches == 0 || ks_batches > n_replicas) fail("ks_batches", "must be in [1, n_replicas]");
    if (static_cast<Eigen::Index>(x0) >= transition.rows()) fail("x0", "state out of range");
}

}  // namespace sere
