#include "signglove/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace signglove {

namespace {

std::string rgb(double r, double g, double b) {
    auto clamp255 = [](double v) {
        return static_cast<int>(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5);
    };
    std::ostringstream os;
    os << "rgb(" << clamp255(r) << "," << clamp255(g) << "," << clamp255(b) << ")";
    return os.str();
}

// White -> blue ramp.
std::string heat_color(double t) { return rgb(1.0 - 0.75 * t, 1.0 - 0.55 * t, 1.0); }

struct Series {
    std::string name;
    std::string color;
    std::vector<double> y;
};

void draw_panel(std::ostringstream& svg, double x0, double y0, double width, double height,
                const std::string& title, const std::vector<Series>& series) {
    double lo = 1e300, hi = -1e300;
    std::size_t len = 0;
    for (const auto& s : series) {
        len = std::max(len, s.y.size());
        for (const double v : s.y) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (len < 1) return;
    if (hi - lo < 1e-12) {
        hi += 0.5;
        lo -= 0.5;
    }
    const double pad = 36.0;
    const double px0 = x0 + pad, py0 = y0 + 24.0;
    const double pw = width - pad - 12.0, ph = height - 24.0 - 28.0;

    svg << "<rect x='" << px0 << "' y='" << py0 << "' width='" << pw << "' height='" << ph
        << "' fill='white' stroke='#888'/>\n";
    svg << "<text x='" << x0 + width / 2 << "' y='" << y0 + 14
        << "' text-anchor='middle' font-size='13' font-family='sans-serif'>" << title
        << "</text>\n";

    // y-axis labels at min/mid/max
    for (int i = 0; i <= 2; ++i) {
        const double frac = i / 2.0;
        const double v = lo + (hi - lo) * frac;
        const double y = py0 + ph * (1.0 - frac);
        std::ostringstream lab;
        lab.precision(3);
        lab << v;
        svg << "<text x='" << px0 - 4 << "' y='" << y + 4
            << "' text-anchor='end' font-size='9' font-family='sans-serif'>" << lab.str()
            << "</text>\n";
        svg << "<line x1='" << px0 << "' y1='" << y << "' x2='" << px0 + pw << "' y2='" << y
            << "' stroke='#ddd'/>\n";
    }

    double legend_x = px0 + 6;
    for (const auto& s : series) {
        svg << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < s.y.size(); ++i) {
            const double x = px0 + pw * (len > 1 ? static_cast<double>(i) /
                                                       static_cast<double>(len - 1)
                                                 : 0.5);
            const double y = py0 + ph * (1.0 - (s.y[i] - lo) / (hi - lo));
            svg << x << "," << y << " ";
        }
        svg << "'/>\n";
        svg << "<text x='" << legend_x << "' y='" << py0 + ph + 18
            << "' font-size='10' font-family='sans-serif' fill='" << s.color << "'>"
            << s.name << "</text>\n";
        legend_x += 10.0 * static_cast<double>(s.name.size()) + 16.0;
    }
    svg << "<text x='" << px0 + pw / 2 << "' y='" << py0 + ph + 18
        << "' text-anchor='middle' font-size='10' font-family='sans-serif'>epoch</text>\n";
}

}  // namespace

void write_confusion_svg(const ConfusionMatrix& cm, const std::filesystem::path& path,
                         const std::string& title) {
    const std::size_t n = cm.n_classes();
    const double cell = 34.0;
    const double left = 60.0, top = 50.0;
    const double width = left + cell * static_cast<double>(n) + 24.0;
    const double height = top + cell * static_cast<double>(n) + 56.0;

    std::uint64_t max_count = 1;
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t p = 0; p < n; ++p) max_count = std::max(max_count, cm.at(t, p));

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
        << height << "'>\n";
    svg << "<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<text x='" << width / 2 << "' y='20' text-anchor='middle' font-size='14' "
           "font-family='sans-serif'>"
        << title << "</text>\n";

    auto symbol = [n](std::size_t i) {
        return (n == kNumClasses) ? std::string(1, kClassSymbols[i]) : std::to_string(i);
    };

    for (std::size_t t = 0; t < n; ++t) {
        svg << "<text x='" << left - 8 << "' y='" << top + cell * (t + 0.5) + 4
            << "' text-anchor='end' font-size='11' font-family='sans-serif'>" << symbol(t)
            << "</text>\n";
        svg << "<text x='" << left + cell * (t + 0.5) << "' y='" << top - 8
            << "' text-anchor='middle' font-size='11' font-family='sans-serif'>" << symbol(t)
            << "</text>\n";
        for (std::size_t p = 0; p < n; ++p) {
            const double frac =
                static_cast<double>(cm.at(t, p)) / static_cast<double>(max_count);
            svg << "<rect x='" << left + cell * p << "' y='" << top + cell * t
                << "' width='" << cell << "' height='" << cell << "' fill='"
                << heat_color(frac) << "' stroke='#aaa'/>\n";
            if (cm.at(t, p) > 0)
                svg << "<text x='" << left + cell * (p + 0.5) << "' y='"
                    << top + cell * (t + 0.5) + 4
                    << "' text-anchor='middle' font-size='10' font-family='sans-serif'>"
                    << cm.at(t, p) << "</text>\n";
        }
    }
    svg << "<text x='" << left + cell * static_cast<double>(n) / 2 << "' y='"
        << top + cell * static_cast<double>(n) + 28
        << "' text-anchor='middle' font-size='11' "
           "font-family='sans-serif'>predicted</text>\n";
    svg << "<text x='16' y='" << top + cell * static_cast<double>(n) / 2
        << "' font-size='11' font-family='sans-serif' transform='rotate(-90 16 "
        << top + cell * static_cast<double>(n) / 2 << ")' text-anchor='middle'>true</text>\n";
    svg << "</svg>\n";

    std::ofstream out(path);
    if (!out) throw BadFile("cannot write SVG: " + path.string());
    out << svg.str();
}

void write_training_curves_svg(const TrainHistory& history,
                               const std::filesystem::path& path,
                               const std::string& title) {
    if (history.empty()) throw EmptyMatrix("write_training_curves_svg: empty history");
    const double panel_w = 360.0, panel_h = 240.0;
    const double width = panel_w * 2 + 36.0, height = panel_h + 48.0;

    Series train_loss{"train", "#d62728", {}}, val_loss{"val", "#1f77b4", {}};
    Series train_acc{"train", "#d62728", {}}, val_acc{"val", "#1f77b4", {}};
    for (const auto& e : history) {
        train_loss.y.push_back(e.train_loss);
        val_loss.y.push_back(e.val_loss);
        train_acc.y.push_back(e.train_acc);
        val_acc.y.push_back(e.val_acc);
    }

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
        << height << "'>\n";
    svg << "<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<text x='" << width / 2 << "' y='18' text-anchor='middle' font-size='14' "
           "font-family='sans-serif'>"
        << title << "</text>\n";
    draw_panel(svg, 12.0, 28.0, panel_w, panel_h, "loss", {train_loss, val_loss});
    draw_panel(svg, 24.0 + panel_w, 28.0, panel_w, panel_h, "accuracy",
               {train_acc, val_acc});
    svg << "</svg>\n";

    std::ofstream out(path);
    if (!out) throw BadFile("cannot write SVG: " + path.string());
    out << svg.str();
}

}  // namespace signglove
