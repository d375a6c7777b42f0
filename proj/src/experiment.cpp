#include "innerlab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "preset_internal.hpp"

namespace innerlab {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

const std::set<std::string>& common_keys() {
    static const std::set<std::string> keys = {"preset", "seed", "threads", "out_dir"};
    return keys;
}

const detail::PresetInfo* find_preset(const std::string& name) {
    for (const auto& p : detail::preset_registry())
        if (p.name == name) return &p;
    return nullptr;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", 0, "cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str(), path);
}

ExperimentConfig ExperimentConfig::from_text(const std::string& text,
                                             const std::string& source) {
    ExperimentConfig cfg;
    cfg.source_ = source;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("", lineno,
                              source + ":" + std::to_string(lineno) +
                                  ": expected 'key = value', got '" + stripped + "'");
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw ConfigError("", lineno,
                              source + ":" + std::to_string(lineno) + ": empty key");
        if (cfg.values_.count(key))
            throw ConfigError(key, lineno,
                              source + ":" + std::to_string(lineno) + ": duplicate key '" +
                                  key + "'");
        cfg.values_[key] = value;
        cfg.lines_[key] = lineno;
    }

    auto it = cfg.values_.find("preset");
    if (it == cfg.values_.end())
        throw ConfigError("preset", 0, source + ": missing required key 'preset'");
    cfg.preset_ = it->second;

    const detail::PresetInfo* info = find_preset(cfg.preset_);
    if (info == nullptr)
        throw ConfigError("preset", cfg.line_of("preset"),
                          source + ": unknown preset '" + cfg.preset_ + "'");

    std::set<std::string> allowed(info->keys.begin(), info->keys.end());
    allowed.insert(common_keys().begin(), common_keys().end());
    for (const auto& [key, value] : cfg.values_) {
        if (!allowed.count(key))
            throw ConfigError(key, cfg.line_of(key),
                              source + ":" + std::to_string(cfg.line_of(key)) +
                                  ": unknown key '" + key + "' for preset '" +
                                  cfg.preset_ + "'");
    }
    return cfg;
}

int ExperimentConfig::line_of(const std::string& key) const {
    auto it = lines_.find(key);
    return it == lines_.end() ? 0 : it->second;
}

std::string ExperimentConfig::get_string(const std::string& key,
                                         const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double ExperimentConfig::get_real(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t pos = 0;
        double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, line_of(key),
                          source_ + ": key '" + key + "' is not a real number: '" +
                              it->second + "'");
    }
}

std::int64_t ExperimentConfig::get_int(const std::string& key, std::int64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t pos = 0;
        std::int64_t v = std::stoll(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, line_of(key),
                          source_ + ": key '" + key + "' is not an integer: '" +
                              it->second + "'");
    }
}

std::uint64_t ExperimentConfig::get_uint(const std::string& key,
                                         std::uint64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t pos = 0;
        std::uint64_t v = std::stoull(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, line_of(key),
                          source_ + ": key '" + key + "' is not an unsigned integer: '" +
                              it->second + "'");
    }
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError(key, line_of(key),
                      source_ + ": key '" + key + "' is not a boolean: '" + it->second +
                          "'");
}

void ExperimentConfig::override_value(const std::string& key, const std::string& value) {
    values_[key] = value;
}

namespace detail {

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_int(std::int64_t v) { return std::to_string(v); }

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& column_docs,
                     const std::vector<std::string>& columns)
    : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open output file: " + path);
    for (const auto& doc : column_docs) write("# " + doc + "\n");
    std::string header;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) header += ',';
        header += columns[i];
    }
    write(header + "\n");
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    write(line + "\n");
    ++rows_;
}

void CsvWriter::write(const std::string& s) {
    for (unsigned char c : s) {
        hash_ ^= c;
        hash_ *= 0x100000001b3ULL;
    }
    out_ << s;
}

void CsvWriter::close() { out_.close(); }

std::string RunContext::file_path(const std::string& name) const {
    return (std::filesystem::path(out_dir) / name).string();
}

void RunContext::record(CsvWriter& w) {
    w.close();
    files.push_back({std::filesystem::path(w.path()).filename().string(), w.hash(),
                     w.rows()});
}

void RunContext::criterion(const std::string& name, bool pass, double measured,
                           const std::string& detail) {
    criteria.push_back({name, pass, measured, detail});
}

void RunContext::note(const std::string& key, double value) {
    notes.emplace_back(key, format_real(value));
}

void RunContext::note(const std::string& key, const std::string& value) {
    notes.emplace_back(key, value);
}

RealSequenceFn family_from_config(const ExperimentConfig& cfg, const std::string& prefix) {
    std::string family = cfg.get_string(prefix + "_family", "default");
    double value = cfg.get_real(prefix + "_value", 0.5);
    double exponent = cfg.get_real(prefix + "_exponent", 0.1);
    if (family == "default") {
        return default_family_term;
    } else if (family == "const") {
        return [value](std::int64_t) { return value; };
    } else if (family == "log") {
        return [value](std::int64_t n) {
            return value / std::log(static_cast<double>(n) + 2.0);
        };
    } else if (family == "power") {
        return [value, exponent](std::int64_t n) {
            return std::min(value, std::pow(static_cast<double>(n), -exponent));
        };
    }
    throw ConfigError(prefix + "_family", 0,
                      cfg.source() + ": unknown family '" + family + "' (want default, "
                      "const, log or power)");
}

}  // namespace detail

RunOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    const detail::PresetInfo* info = find_preset(config.preset());
    if (info == nullptr)
        throw ConfigError("preset", 0, "unknown preset '" + config.preset() + "'");

    detail::RunContext ctx;
    ctx.config = &config;

    if (!options.out_dir.empty()) {
        ctx.out_dir = options.out_dir;
    } else {
        ctx.out_dir = config.get_string("out_dir", "");
        if (ctx.out_dir.empty()) {
            const char* env = std::getenv(kOutDirEnvVar);
            ctx.out_dir = (env != nullptr && *env) ? env : "innerlab-out";
        }
    }
    ctx.out_dir = (std::filesystem::path(ctx.out_dir) / config.preset()).string();
    std::filesystem::create_directories(ctx.out_dir);

    ctx.seed = options.override_seed ? options.seed : config.get_uint("seed", 1);
    ctx.threads = options.threads >= 0 ? options.threads
                                       : static_cast<int>(config.get_int("threads", 0));

    auto t0 = std::chrono::steady_clock::now();
    info->run(config, ctx);
    double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    bool all_pass = true;
    for (const auto& c : ctx.criteria) all_pass = all_pass && c.pass;

    nlohmann::json manifest;
    manifest["artifact"] = std::string("innerlab ") + kVersion;
    manifest["preset"] = config.preset();
    manifest["config_source"] = config.source();
    manifest["config"] = config.values();
    manifest["seed"] = ctx.seed;
    manifest["threads"] = ctx.threads;
    manifest["wall_clock_seconds"] = wall;
    manifest["started_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    manifest["files"] = nlohmann::json::array();
    for (const auto& f : ctx.files) {
        char hex[24];
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(f.hash));
        manifest["files"].push_back(
            {{"name", f.name}, {"fnv1a64", hex}, {"rows", f.rows}});
    }
    manifest["criteria"] = nlohmann::json::array();
    for (const auto& c : ctx.criteria)
        manifest["criteria"].push_back({{"name", c.name},
                                        {"pass", c.pass},
                                        {"measured", c.measured},
                                        {"detail", c.detail}});
    manifest["notes"] = nlohmann::json::object();
    for (const auto& [k, v] : ctx.notes) manifest["notes"][k] = v;
    manifest["all_pass"] = all_pass;

    std::string manifest_path =
        (std::filesystem::path(ctx.out_dir) / "manifest.json").string();
    std::ofstream mout(manifest_path, std::ios::binary);
    mout << manifest.dump(2) << "\n";
    mout.close();

    RunOutcome outcome;
    outcome.exit_code = all_pass ? 0 : 1;
    outcome.out_dir = ctx.out_dir;
    outcome.manifest_path = manifest_path;
    for (const auto& f : ctx.files) outcome.files.push_back(f.name);
    outcome.criteria = ctx.criteria;
    return outcome;
}

std::string list_presets() {
    std::string out;
    std::size_t width = 0;
    for (const auto& p : detail::preset_registry()) width = std::max(width, p.name.size());
    for (const auto& p : detail::preset_registry()) {
        out += p.name;
        out.append(width - p.name.size() + 2, ' ');
        out += p.claim;
        out += "\n";
    }
    return out;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& p : detail::preset_registry()) names.push_back(p.name);
    return names;
}

}  // namespace innerlab
