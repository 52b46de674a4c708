#pragma once

#include <string>

#include "fput/gridfield.hpp"

namespace fput {

enum class SvgScale { Linear, Log };

struct SvgOptions {
    SvgScale scale = SvgScale::Linear;
    double log_floor = 1e-11;   // values below are clamped on the log scale
    int cell_px = 4;
    std::string background = "#202040";
};

/// Deterministic SVG 1.1 heatmap, one rect per cell; NaN cells take the
/// background color. Pure function of the field bytes and options.
std::string render_svg(const GridField& field, const SvgOptions& opts = {});

}  // namespace fput
