#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "magscatter/config.hpp"

namespace magscatter {

inline constexpr const char* kToolVersion = "magscatter 0.1.0";

enum class ExitCode : int { ok = 0, internal = 1, validation = 2, numerical = 3 };

struct RunRequest {
    std::string command;  // solve, amplitude, born, compare, sweep, invert, export
    std::string config_path;
    std::string out_dir;
    std::optional<QuadratureMode> quadrature;
    std::optional<std::uint64_t> seed;  // recorded only; the core paths are deterministic
    std::string export_kind;            // export: amplitude_vs_angle, field_slice, sweep_curve
};

/// Runs one command and writes its result bundle into out_dir:
///   config.json       byte-identical copy of the input configuration
///   diagnostics.json  per-solve residuals, norm estimates, remainder bound, condition report
///   *.csv, *.bin      command outputs (see docs/formats.md)
/// On failure writes error.json (status, message, quantity, value) and returns 2 or 3.
ExitCode run(const RunRequest& request);

/// Writes gnuplot-ready text derived from an existing bundle directory.
void export_plotdata(const std::string& bundle_dir, const std::string& kind);

}  // namespace magscatter
