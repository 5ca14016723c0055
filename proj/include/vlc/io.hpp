#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vlc/model.hpp"

namespace vlc {

// Inclusive SNR sweep a:b:step in dB.
struct SnrGrid {
    double start = 10.0;
    double stop = 24.0;
    double step = 2.0;

    std::vector<double> values() const;
};

// Parses "a:b:step"; throws std::invalid_argument on malformed input.
SnrGrid parse_snr_grid(const std::string& text);

// Run directives around a DesignSpec. Loaded from a JSON document with the
// sections "design", "sweep", "simulate" and "export"; see README for keys.
struct ExperimentConfig {
    DesignSpec spec;
    std::vector<double> sweep_epsilon{0.0, 0.05, 0.1, 0.15, 0.2};
    std::vector<int> sweep_K{2, 3};
    std::vector<Vec3> sweep_s_avg;      // empty: the spec's s_avg only
    SnrGrid snr_grid{};
    std::uint64_t symbols = 200000;
    std::string joint_result;           // simulate/export/bound: reuse this file
    std::string decoupled_result;
    int display_samples = 200;          // per symbol, waveform export
    std::filesystem::path out_dir = "out";
};

// Named color ratio presets: balanced, unbalanced, very_unbalanced.
std::optional<Vec3> s_avg_preset(const std::string& name);
// Preset name matching s_avg within 1e-9, or "custom".
std::string scenario_name(const Vec3& s_avg);

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& json_text);

// Self-describing JSON documents with full-precision numbers.
std::string design_result_json(const DesignSpec& spec, const DesignResult& result);
std::string decoupled_result_json(const DesignSpec& spec, const std::array<DesignResult, 3>& results);

struct LoadedDesign {
    DesignSpec spec;
    DesignResult result;
};

LoadedDesign parse_design_result(const std::string& json_text);
std::array<LoadedDesign, 3> parse_decoupled_result(const std::string& json_text);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

// Minimal CSV writer: comma separated, '.' decimals, header first.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    CsvWriter& row(const std::vector<std::string>& cells);
    std::string str() const { return text_; }

    static std::string num(double v);

private:
    std::size_t columns_;
    std::string text_;
};

}  // namespace vlc
