#pragma once

#include <optional>
#include <string>
#include <vector>

#include "poolcomp/comparisons.hpp"
#include "poolcomp/io.hpp"

namespace poolcomp::svg {

/// Minimal SVG writer with fixed-precision coordinates so output is byte-stable.
class Document {
public:
    Document(double width, double height);

    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& extra = {});
    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double width = 1.0, const std::string& extra = {});
    void circle(double cx, double cy, double r, const std::string& fill, const std::string& extra = {});
    void text(double x, double y, const std::string& content, double size = 12.0,
              const std::string& anchor = "middle", const std::string& extra = {});
    void polyline(const std::vector<std::pair<double, double>>& points, const std::string& stroke,
                  double width = 1.5);
    void open_group(const std::string& attrs);
    void close_group();

    std::string str() const;

private:
    double width_;
    double height_;
    std::string body_;
};

std::string escape(const std::string& s);

struct IntervalRow {
    std::string label;
    double center = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

struct IntervalPanel {
    std::string title;
    std::vector<IntervalRow> rows;
    /// Dashed reference, e.g. the complete-pooling estimate.
    std::optional<double> dashed_line;
};

/// Side-by-side interval panels on a shared axis, solid line at zero.
std::string render_intervals(const std::vector<IntervalPanel>& panels, const std::string& axis_label);

/// Shaded claim grid: dark for higher, light for lower, white for indeterminate.
std::string render_matrix(const ComparisonMatrix& m, const std::string& title);

/// Correction factor against the variance ratio on a log axis.
std::string render_shrinkage(const std::vector<ShrinkagePoint>& table, double sigma_y);

}  // namespace poolcomp::svg
