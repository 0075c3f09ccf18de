#pragma once

// Mosaic plots of 2 x L contingency tables as standalone SVG, optionally
// shaded by Pearson residual.

#include <optional>
#include <string>
#include <vector>

#include "attrib/stats/contingency.hpp"

namespace attrib::mosaic {

struct Tile {
  std::string row_name;
  std::string col_name;
  std::size_t row = 0;
  std::size_t col = 0;
  // Unit-square coordinates, y pointing down.
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  long long count = 0;
};

struct MosaicLayout {
  std::vector<Tile> tiles;  // by column, then row
  double gap = 0.0;
  bool transposed = false;
  std::vector<std::string> row_names;
  std::vector<std::string> col_names;
};

struct LayoutOptions {
  // Spacing between neighbouring bands, as a fraction of the unit side.
  double gap = 0.01;
  // Split the x-axis by population instead of by label.
  bool transpose = false;
};

// Throws EmptyTable when the table total is zero.
MosaicLayout layout(const stats::ContingencyTable& table, const LayoutOptions& options = {});

struct ShadingScheme {
  double lower = 2.0;
  double upper = 4.0;
  std::string neutral = "#eeeeee";
  std::string positive_low = "#9ecae1";
  std::string positive_high = "#3182bd";
  std::string negative_low = "#fc9272";
  std::string negative_high = "#de2d26";
  std::string unshaded = "#d9d9d9";

  // -2, -1, 0, 1 or 2.
  int bin(double residual) const;
  std::string fill(double residual) const;
};

struct RenderOptions {
  std::string title;
  bool legend = true;
};

// residuals, when given, are [row][col] aligned with the table the layout
// came from. Throws DimensionMismatch.
std::string render_svg(const MosaicLayout& layout,
                       const std::optional<std::vector<std::vector<double>>>& residuals,
                       const ShadingScheme& scheme = {}, const RenderOptions& options = {});

}  // namespace attrib::mosaic
