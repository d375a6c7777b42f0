#pragma once

#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "innerlab/experiment.hpp"
#include "innerlab/target.hpp"

namespace innerlab::detail {

std::string format_real(double v);
std::string format_int(std::int64_t v);

/// CSV writer: '.' decimals, ',' separators, LF endings, 17 significant
/// digits, '#' header comments documenting the columns. Accumulates an
/// FNV-1a 64 hash of every byte written.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& column_docs,
              const std::vector<std::string>& columns);
    void row(const std::vector<std::string>& cells);
    void close();

    const std::string& path() const { return path_; }
    std::uint64_t hash() const { return hash_; }
    std::int64_t rows() const { return rows_; }

  private:
    void write(const std::string& s);
    std::string path_;
    std::ofstream out_;
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
    std::int64_t rows_ = 0;
};

struct FileRecord {
    std::string name;
    std::uint64_t hash;
    std::int64_t rows;
};

struct RunContext {
    const ExperimentConfig* config;
    std::string out_dir;
    std::uint64_t seed;
    int threads;
    std::vector<FileRecord> files;
    std::vector<CriterionOutcome> criteria;
    std::vector<std::pair<std::string, std::string>> notes;

    std::string file_path(const std::string& name) const;
    void record(CsvWriter& w);
    void criterion(const std::string& name, bool pass, double measured,
                   const std::string& detail);
    void note(const std::string& key, double value);
    void note(const std::string& key, const std::string& value);
};

// Sequence families selected by config keys (<prefix>_family, <prefix>_value,
// <prefix>_exponent): "default" is min(1/2, 1/(sqrt(n) ln(n+1))), "const" is
// the constant value, "log" is value/ln(n+2), "power" is
// min(value, n^{-exponent}).
RealSequenceFn family_from_config(const ExperimentConfig& cfg, const std::string& prefix);

using PresetRunner = std::function<void(const ExperimentConfig&, RunContext&)>;

struct PresetInfo {
    std::string name;
    std::string claim;                  // what the default run checks
    std::vector<std::string> keys;      // allowed beyond the common ones
    PresetRunner run;
};

const std::vector<PresetInfo>& preset_registry();

void run_theorem_c(const ExperimentConfig&, RunContext&);
void run_theorem_d_blocks(const ExperimentConfig&, RunContext&);
void run_theorem_e_dw(const ExperimentConfig&, RunContext&);
void run_theorem_f_density(const ExperimentConfig&, RunContext&);
void run_ex_rotations(const ExperimentConfig&, RunContext&);
void run_ex_nested(const ExperimentConfig&, RunContext&);
void run_ex_lengths(const ExperimentConfig&, RunContext&);
void run_ex_conjugated(const ExperimentConfig&, RunContext&);
void run_ex_rescaled(const ExperimentConfig&, RunContext&);
void run_ex_parabolic(const ExperimentConfig&, RunContext&);
void run_custom(const ExperimentConfig&, RunContext&);

}  // namespace innerlab::detail
