#include "poolcomp/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "poolcomp/version.hpp"

namespace poolcomp::svg {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    std::string s(buf);
    if (s == "-0.00") s = "0.00";
    return s;
}

std::string label_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

// Round-ish tick step covering [lo, hi] with about five ticks.
double tick_step(double lo, double hi) {
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) return m * mag;
    }
    return 10.0 * mag;
}

constexpr const char* kHigher = "#1f4e99";
constexpr const char* kLower = "#9cc3e6";
constexpr const char* kNeutral = "#ffffff";

}  // namespace

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

Document::Document(double width, double height) : width_(width), height_(height) {}

void Document::rect(double x, double y, double w, double h, const std::string& fill,
                    const std::string& extra) {
    body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" +
             num(h) + "\" fill=\"" + fill + "\"" + (extra.empty() ? "" : " " + extra) + "/>\n";
}

void Document::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                    double width, const std::string& extra) {
    body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
             num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\"" +
             (extra.empty() ? "" : " " + extra) + "/>\n";
}

void Document::circle(double cx, double cy, double r, const std::string& fill, const std::string& extra) {
    body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) + "\" fill=\"" +
             fill + "\"" + (extra.empty() ? "" : " " + extra) + "/>\n";
}

void Document::text(double x, double y, const std::string& content, double size,
                    const std::string& anchor, const std::string& extra) {
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"" +
             num(size) + "\" text-anchor=\"" + anchor + "\"" + (extra.empty() ? "" : " " + extra) + ">" +
             escape(content) + "</text>\n";
}

void Document::polyline(const std::vector<std::pair<double, double>>& points,
                        const std::string& stroke, double width) {
    body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) +
             "\" points=\"";
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i) body_ += ' ';
        body_ += num(points[i].first) + "," + num(points[i].second);
    }
    body_ += "\"/>\n";
}

void Document::open_group(const std::string& attrs) { body_ += "<g " + attrs + ">\n"; }

void Document::close_group() { body_ += "</g>\n"; }

std::string Document::str() const {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           "<!-- generator: poolcomp " + std::string(kVersion) + " -->\n"
           "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) + "\" height=\"" +
           num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " + num(height_) + "\">\n" +
           "<rect x=\"0\" y=\"0\" width=\"" + num(width_) + "\" height=\"" + num(height_) +
           "\" fill=\"#ffffff\"/>\n" + body_ + "</svg>\n";
}

std::string render_intervals(const std::vector<IntervalPanel>& panels, const std::string& axis_label) {
    const double width = 800.0;
    const double height = 600.0;
    Document doc(width, height);

    double lo = 0.0;
    double hi = 0.0;
    for (const auto& p : panels) {
        for (const auto& r : p.rows) {
            lo = std::min(lo, r.lower);
            hi = std::max(hi, r.upper);
        }
    }
    if (hi - lo <= 0.0) hi = lo + 1.0;
    const double step = tick_step(lo, hi);
    lo = std::floor(lo / step) * step;
    hi = std::ceil(hi / step) * step;

    const double top = 60.0;
    const double bottom = height - 70.0;
    const double left_margin = 70.0;
    const double panel_gap = 20.0;
    const double panel_w = (width - left_margin - 20.0 - panel_gap * static_cast<double>(panels.size() - 1)) /
                           static_cast<double>(panels.size());
    const auto ymap = [&](double v) { return bottom - (v - lo) / (hi - lo) * (bottom - top); };

    doc.text(20.0, (top + bottom) / 2.0, axis_label, 13.0, "middle",
             "transform=\"rotate(-90 20.00 " + num((top + bottom) / 2.0) + ")\"");
    for (double t = lo; t <= hi + 1e-9 * step; t += step) {
        doc.text(left_margin - 8.0, ymap(t) + 4.0, label_num(t), 11.0, "end");
    }

    for (std::size_t p = 0; p < panels.size(); ++p) {
        const auto& panel = panels[p];
        const double x0 = left_margin + static_cast<double>(p) * (panel_w + panel_gap);
        doc.open_group("class=\"panel\" data-title=\"" + escape(panel.title) + "\"");
        doc.rect(x0, top, panel_w, bottom - top, "none", "stroke=\"#444444\"");
        doc.text(x0 + panel_w / 2.0, top - 15.0, panel.title, 14.0);
        doc.line(x0, ymap(0.0), x0 + panel_w, ymap(0.0), "#000000", 1.0);
        if (panel.dashed_line) {
            doc.line(x0, ymap(*panel.dashed_line), x0 + panel_w, ymap(*panel.dashed_line), "#555555", 1.0,
                     "stroke-dasharray=\"6,4\" class=\"pooled\"");
        }
        const double n = static_cast<double>(panel.rows.size());
        for (std::size_t i = 0; i < panel.rows.size(); ++i) {
            const auto& r = panel.rows[i];
            const double x = x0 + panel_w * (static_cast<double>(i) + 0.5) / n;
            doc.open_group("class=\"group\" data-id=\"" + escape(r.label) + "\"");
            doc.line(x, ymap(r.lower), x, ymap(r.upper), "#1f4e99", 2.0);
            doc.circle(x, ymap(r.center), 4.0, "#1f4e99");
            doc.text(x, bottom + 18.0, r.label, 11.0);
            doc.close_group();
        }
        doc.close_group();
    }
    return doc.str();
}

std::string render_matrix(const ComparisonMatrix& m, const std::string& title) {
    const std::size_t J = m.size();
    const double label_space = 60.0;
    const double grid = 480.0;
    const double cell = grid / static_cast<double>(J);
    const double width = std::max(800.0, label_space + grid + 40.0);
    const double height = std::max(600.0, label_space + grid + 100.0);
    Document doc(width, height);
    doc.text(width / 2.0, 25.0, title, 15.0);

    const double x0 = label_space + 20.0;
    const double y0 = label_space;
    const double font = std::clamp(cell * 0.6, 5.0, 12.0);
    for (std::size_t j = 0; j < J; ++j) {
        const double c = (static_cast<double>(j) + 0.5) * cell;
        doc.text(x0 - 4.0, y0 + c + font / 3.0, m.group_ids[j], font, "end");
        doc.text(x0 + c, y0 - 6.0, m.group_ids[j], font, "start",
                 "transform=\"rotate(-90 " + num(x0 + c) + " " + num(y0 - 6.0) + ")\"");
    }
    for (std::size_t j = 0; j < J; ++j) {
        for (std::size_t k = 0; k < J; ++k) {
            const double x = x0 + static_cast<double>(k) * cell;
            const double y = y0 + static_cast<double>(j) * cell;
            if (j == k) {
                doc.rect(x, y, cell, cell, "#dddddd", "class=\"diagonal\"");
                continue;
            }
            const Claim c = m.claim(j, k);
            const char* fill = c == Claim::Higher ? kHigher : c == Claim::Lower ? kLower : kNeutral;
            doc.rect(x, y, cell, cell, fill,
                     std::string("class=\"cell\" stroke=\"#cccccc\" data-claim=\"") + claim_symbol(c) +
                         "\" data-row=\"" + escape(m.group_ids[j]) + "\" data-col=\"" +
                         escape(m.group_ids[k]) + "\"");
        }
    }
    const double ly = y0 + grid + 30.0;
    doc.rect(x0, ly, 14.0, 14.0, kHigher);
    doc.text(x0 + 20.0, ly + 11.0, "row higher than column", 12.0, "start");
    doc.rect(x0 + 200.0, ly, 14.0, 14.0, kLower);
    doc.text(x0 + 220.0, ly + 11.0, "row lower than column", 12.0, "start");
    doc.rect(x0 + 400.0, ly, 14.0, 14.0, kNeutral, "stroke=\"#999999\"");
    doc.text(x0 + 420.0, ly + 11.0, "not distinguishable", 12.0, "start");
    return doc.str();
}

std::string render_shrinkage(const std::vector<ShrinkagePoint>& table, double sigma_y) {
    const double width = 800.0;
    const double height = 600.0;
    Document doc(width, height);
    const double left = 80.0, right = width - 40.0, top = 60.0, bottom = height - 80.0;
    const double lmin = std::log10(table.front().variance_ratio);
    const double lmax = std::log10(table.back().variance_ratio);
    const auto xmap = [&](double ratio) { return left + (std::log10(ratio) - lmin) / (lmax - lmin) * (right - left); };
    const auto ymap = [&](double f) { return bottom - f * (bottom - top); };

    doc.text(width / 2.0, 30.0, "Shrinkage of a comparison z-score (sigma_y = " + label_num(sigma_y) + ")", 15.0);
    doc.rect(left, top, right - left, bottom - top, "none", "stroke=\"#444444\"");
    for (int e = static_cast<int>(std::ceil(lmin)); e <= static_cast<int>(std::floor(lmax)); ++e) {
        const double x = xmap(std::pow(10.0, e));
        doc.line(x, bottom, x, bottom + 5.0, "#444444");
        doc.text(x, bottom + 20.0, "1e" + std::to_string(e), 11.0);
    }
    for (int i = 0; i <= 4; ++i) {
        const double f = 0.25 * i;
        doc.line(left - 5.0, ymap(f), left, ymap(f), "#444444");
        doc.text(left - 8.0, ymap(f) + 4.0, label_num(f), 11.0, "end");
    }
    doc.line(left, ymap(1.0), right, ymap(1.0), "#888888", 1.0, "stroke-dasharray=\"4,4\"");
    doc.text(width / 2.0, height - 30.0, "variance ratio tau^2 / sigma_y^2", 13.0);
    doc.text(25.0, (top + bottom) / 2.0, "z-score correction factor", 13.0, "middle",
             "transform=\"rotate(-90 25.00 " + num((top + bottom) / 2.0) + ")\"");

    std::vector<std::pair<double, double>> pts;
    for (const auto& p : table) pts.emplace_back(xmap(p.variance_ratio), ymap(p.factor));
    doc.polyline(pts, "#1f4e99", 2.0);
    for (const auto& p : table) {
        doc.circle(xmap(p.variance_ratio), ymap(p.factor), 2.5, "#1f4e99", "class=\"point\"");
    }
    return doc.str();
}

}  // namespace poolcomp::svg
