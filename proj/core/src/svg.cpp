#include "fput/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace fput {

namespace {

// compact viridis-like ramp, interpolated in sRGB
const int kRampN = 7;
const int kRamp[kRampN][3] = {{68, 1, 84},   {70, 50, 127},  {54, 92, 141}, {39, 127, 142},
                              {31, 161, 135}, {74, 194, 109}, {253, 231, 37}};

void color_of(double t, int rgb[3]) {
    t = std::clamp(t, 0.0, 1.0);
    double x = t * (kRampN - 1);
    int i = std::min(static_cast<int>(x), kRampN - 2);
    double f = x - i;
    for (int c = 0; c < 3; ++c)
        rgb[c] = static_cast<int>(std::lround(kRamp[i][c] + f * (kRamp[i + 1][c] - kRamp[i][c])));
}

}  // namespace

std::string render_svg(const GridField& field, const SvgOptions& opts) {
    const int W = field.nx * opts.cell_px;
    const int H = field.ny * opts.cell_px;

    double vmax = -1e308, vmin = 1e308;
    for (double v : field.v) {
        if (std::isnan(v)) continue;
        vmax = std::max(vmax, v);
        vmin = std::min(vmin, v);
    }
    bool empty = vmax < vmin;

    double lo = vmin, hi = vmax;
    if (opts.scale == SvgScale::Log && !empty) {
        hi = vmax > 0 ? std::log10(vmax) : 0.0;
        lo = std::log10(std::max(opts.log_floor * std::max(vmax, 0.0), 1e-300));
        if (!(hi > lo)) lo = hi - 1;
    }

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W
        << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"" << opts.background
        << "\"/>\n";
    char buf[128];
    for (int iy = 0; iy < field.ny; ++iy) {
        for (int ix = 0; ix < field.nx; ++ix) {
            double v = field.at(ix, iy);
            if (std::isnan(v)) continue;
            double t;
            if (empty) {
                t = 0;
            } else if (opts.scale == SvgScale::Log) {
                double lv = v > 0 ? std::log10(v) : lo;
                t = (std::clamp(lv, lo, hi) - lo) / std::max(hi - lo, 1e-300);
            } else {
                t = (v - vmin) / std::max(vmax - vmin, 1e-300);
            }
            int rgb[3];
            color_of(t, rgb);
            // SVG y axis points down; flip so the field's ymax sits on top
            int px = ix * opts.cell_px;
            int py = (field.ny - 1 - iy) * opts.cell_px;
            std::snprintf(buf, sizeof buf,
                          "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" "
                          "fill=\"#%02x%02x%02x\"/>\n",
                          px, py, opts.cell_px, opts.cell_px, rgb[0], rgb[1], rgb[2]);
            out << buf;
        }
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace fput
