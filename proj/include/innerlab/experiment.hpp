#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "innerlab/common.hpp"

namespace innerlab {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutDirEnvVar = "INNERLAB_OUT";

/// Flat key = value configuration with a strict per-preset schema: unknown
/// keys are rejected with their line number, so typos cannot silently fall
/// back to defaults.
class ExperimentConfig {
  public:
    static ExperimentConfig from_file(const std::string& path);
    static ExperimentConfig from_text(const std::string& text,
                                      const std::string& source = "<inline>");

    const std::string& preset() const { return preset_; }
    const std::string& source() const { return source_; }
    const std::map<std::string, std::string>& values() const { return values_; }

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_real(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    void override_value(const std::string& key, const std::string& value);

  private:
    std::string preset_;
    std::string source_;
    std::map<std::string, std::string> values_;
    std::map<std::string, int> lines_;

    int line_of(const std::string& key) const;
};

struct RunOptions {
    std::string out_dir;  // overrides config / environment when non-empty
    int threads = -1;     // -1: take from config
    bool override_seed = false;
    std::uint64_t seed = 0;
};

struct CriterionOutcome {
    std::string name;
    bool pass;
    double measured;
    std::string detail;
};

struct RunOutcome {
    int exit_code;  // 0: all configured assertions pass, 1: some failed
    std::string out_dir;
    std::string manifest_path;
    std::vector<std::string> files;
    std::vector<CriterionOutcome> criteria;
};

RunOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Stable one-row-per-preset table: name, default claim checked, key knobs.
std::string list_presets();

std::vector<std::string> preset_names();

}  // namespace innerlab
