#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "hlppl/backtest.hpp"
#include "hlppl/lppl.hpp"
#include "hlppl/residual.hpp"
#include "hlppl/score.hpp"
#include "hlppl/signals.hpp"

namespace hlppl::cli {

enum class HorizonMode { score, baseline, forecasts };

const char* to_string(HorizonMode mode) noexcept;
HorizonMode parse_horizon_mode(const std::string& text);

/// Everything a run needs. Loaded from a TOML-style file, then overridden by flags.
struct RunConfig {
    struct Inputs {
        std::string prices;
        std::string news;
        std::string features;
        std::string fit;
        std::string scores;
        std::string forecasts;
        std::string symbol = "SYM";
    } inputs;

    FitConfig fit;
    std::size_t rolling_window = 0;  // 0: single full-sample fit
    std::size_t rolling_step = 20;

    ScoreParams score;
    LabelConfig labels;
    NormalizationMode normalization = NormalizationMode::global;
    SentimentSource sentiment_source = SentimentSource::polarity;

    StrategyConfig strategy;
    HorizonMode horizon_mode = HorizonMode::score;
    bool strict_range = false;

    std::string output_dir = "out";
    std::uint64_t rng_seed = 42;

    /// Output directory for this run's symbol.
    std::filesystem::path symbol_dir() const { return std::filesystem::path(output_dir) / inputs.symbol; }

    /// Module-level invariants; throws Error(contract).
    void validate() const;
};

/// Parses `key = value` lines grouped under `[section]` headers. Values are
/// quoted strings, numbers or booleans; `#` starts a comment. Keys not set in
/// the text keep the values already in `base`.
RunConfig parse_config(const std::string& text, RunConfig base = {}, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Serializes every field, so the result re-loads to the same configuration.
std::string to_toml(const RunConfig& config);

}  // namespace hlppl::cli
