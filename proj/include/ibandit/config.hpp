#pragma once

#include <map>
#include <string>
#include <vector>

#include "ibandit/engine.hpp"

namespace ibandit {

// Flat key = value configuration with CLI/env overrides. Unknown keys are
// rejected so typos surface early.
class Config {
  public:
    static Config from_file(const std::string& path);
    static Config from_text(const std::string& text);

    void apply_override(const std::string& key, const std::string& value);
    void apply_env_overrides();  // IBANDIT_SECTION_KEY=... -> section.key

    bool has(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<std::string> get_list(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

    // Resolves and validates the full experiment; throws ValidationError
    // listing every violated constraint.
    ExperimentSpec resolve() const;

    // Echo of the resolved configuration for the run manifest.
    std::map<std::string, std::string> resolved_echo() const;

  private:
    std::map<std::string, std::string> entries_;
};

struct SweepCell {
    std::string policy;
    std::size_t m = 0;
    std::string cost_spec;
};

// Cross product of sweep.policies x sweep.m x sweep costs from the config.
std::vector<SweepCell> sweep_cells(const Config& cfg);

// Applies one sweep cell on top of a base config.
Config config_for_cell(const Config& base, const SweepCell& cell);

std::string cost_spec_label(const CostModel& costs);

}  // namespace ibandit
