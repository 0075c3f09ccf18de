#include "attrib/mosaic.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "attrib/errors.hpp"

namespace attrib::mosaic {

MosaicLayout layout(const stats::ContingencyTable& table, const LayoutOptions& options) {
  if (table.total() <= 0) throw EmptyTable("mosaic of a table with no observations");
  if (options.gap < 0.0) throw Error("negative mosaic gap");

  MosaicLayout out;
  out.gap = options.gap;
  out.transposed = options.transpose;
  out.row_names.assign(table.row_names().begin(), table.row_names().end());
  out.col_names = table.col_names();

  // Outer bands split x, inner bands split y.
  const std::size_t outer = options.transpose ? 2 : table.cols();
  const std::size_t inner = options.transpose ? table.cols() : 2;
  auto count = [&](std::size_t o, std::size_t i) {
    return options.transpose ? table.at(o, i) : table.at(i, o);
  };
  const double total = static_cast<double>(table.total());
  const double width_budget = 1.0 - options.gap * static_cast<double>(outer - 1);
  const double height_budget = 1.0 - options.gap * static_cast<double>(inner - 1);
  if (width_budget <= 0.0 || height_budget <= 0.0) throw Error("mosaic gap too large");

  double x = 0.0;
  for (std::size_t o = 0; o < outer; ++o) {
    double band = 0.0;
    for (std::size_t i = 0; i < inner; ++i) band += static_cast<double>(count(o, i));
    const double w = width_budget * band / total;
    double y = 0.0;
    for (std::size_t i = 0; i < inner; ++i) {
      const auto c = count(o, i);
      Tile t;
      t.row = options.transpose ? o : i;
      t.col = options.transpose ? i : o;
      t.row_name = out.row_names[t.row];
      t.col_name = out.col_names[t.col];
      t.count = c;
      t.x = x;
      t.y = y;
      t.w = w;
      t.h = band > 0.0 ? height_budget * static_cast<double>(c) / band : 0.0;
      y += t.h + options.gap;
      out.tiles.push_back(std::move(t));
    }
    x += w + options.gap;
  }
  return out;
}

int ShadingScheme::bin(double residual) const {
  const double a = std::fabs(residual);
  const int magnitude = a >= upper ? 2 : a >= lower ? 1 : 0;
  return residual < 0.0 ? -magnitude : magnitude;
}

std::string ShadingScheme::fill(double residual) const {
  switch (bin(residual)) {
    case 2:
      return positive_high;
    case 1:
      return positive_low;
    case -1:
      return negative_low;
    case -2:
      return negative_high;
    default:
      return neutral;
  }
}

namespace {

constexpr double kWidth = 1000.0;
constexpr double kHeight = 800.0;
constexpr double kPlotX = 160.0;
constexpr double kPlotY = 80.0;
constexpr double kPlotW = 620.0;
constexpr double kPlotH = 560.0;

std::string num(double v) {
  if (v == 0.0) v = 0.0;  // no "-0.000000"
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string edge(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

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

}  // namespace

std::string render_svg(const MosaicLayout& layout,
                       const std::optional<std::vector<std::vector<double>>>& residuals,
                       const ShadingScheme& scheme, const RenderOptions& options) {
  if (residuals) {
    if (residuals->size() != layout.row_names.size())
      throw DimensionMismatch("residuals have " + std::to_string(residuals->size()) +
                              " rows, layout has " + std::to_string(layout.row_names.size()));
    for (const auto& r : *residuals) {
      if (r.size() != layout.col_names.size())
        throw DimensionMismatch("residual row has " + std::to_string(r.size()) +
                                " cells, layout has " +
                                std::to_string(layout.col_names.size()) + " columns");
    }
  }

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(kWidth)
      << "\" height=\"" << num(kHeight) << "\" viewBox=\"0 0 1000 800\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"1000\" height=\"800\" fill=\"#ffffff\"/>\n";
  if (!options.title.empty()) {
    svg << "<text x=\"" << num(kWidth / 2) << "\" y=\"" << num(40.0)
        << "\" font-family=\"sans-serif\" font-size=\"20\" text-anchor=\"middle\">"
        << escape(options.title) << "</text>\n";
  }

  svg << "<g id=\"tiles\" stroke=\"#555555\" stroke-width=\"0.5\">\n";
  for (const auto& t : layout.tiles) {
    const std::string fill =
        residuals ? scheme.fill((*residuals)[t.row][t.col]) : scheme.unshaded;
    const double x = kPlotX + t.x * kPlotW;
    const double y = kPlotY + t.y * kPlotH;
    const double w = t.w * kPlotW;
    const double h = t.h * kPlotH;
    svg << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
        << "\" height=\"" << num(h) << "\" fill=\"" << fill << "\"><title>"
        << escape(t.row_name) << " / " << escape(t.col_name) << ": " << t.count
        << "</title></rect>\n";
    if (t.h == 0.0) {
      svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x + w)
          << "\" y2=\"" << num(y) << "\" stroke=\"#555555\" stroke-width=\"1\"/>\n";
    }
  }
  svg << "</g>\n";

  // Band labels: the outer split along the bottom, the inner split on the left.
  svg << "<g id=\"labels\" font-family=\"sans-serif\" font-size=\"12\">\n";
  std::map<std::size_t, std::pair<double, double>> outer;  // index -> (x, w)
  std::map<std::size_t, long long> inner_totals;
  long long total = 0;
  for (const auto& t : layout.tiles) {
    const std::size_t o = layout.transposed ? t.row : t.col;
    const std::size_t i = layout.transposed ? t.col : t.row;
    outer.try_emplace(o, t.x, t.w);
    inner_totals[i] += t.count;
    total += t.count;
  }
  const auto& outer_names = layout.transposed ? layout.row_names : layout.col_names;
  const auto& inner_names = layout.transposed ? layout.col_names : layout.row_names;
  const double label_y = kPlotY + kPlotH + 18.0;
  for (const auto& [o, xw] : outer) {
    const double cx = kPlotX + (xw.first + xw.second / 2.0) * kPlotW;
    if (xw.second < 0.08) {
      svg << "<text x=\"" << num(cx) << "\" y=\"" << num(label_y)
          << "\" text-anchor=\"start\" transform=\"rotate(45 " << num(cx) << " "
          << num(label_y) << ")\">" << escape(outer_names[o]) << "</text>\n";
    } else {
      svg << "<text x=\"" << num(cx) << "\" y=\"" << num(label_y)
          << "\" text-anchor=\"middle\">" << escape(outer_names[o]) << "</text>\n";
    }
  }
  // Inner labels sit at the centre of each band's marginal share.
  double cumulative = 0.0;
  for (const auto& [i, n] : inner_totals) {
    const double share = total > 0 ? static_cast<double>(n) / static_cast<double>(total) : 0.0;
    const double cy = kPlotY + (cumulative + share / 2.0) * kPlotH;
    cumulative += share;
    svg << "<text x=\"" << num(kPlotX - 8.0) << "\" y=\"" << num(cy)
        << "\" text-anchor=\"end\" dominant-baseline=\"middle\">" << escape(inner_names[i])
        << "</text>\n";
  }
  svg << "</g>\n";

  if (options.legend && residuals) {
    struct Entry {
      std::string fill;
      std::string label;
    };
    const std::vector<Entry> entries = {
        {scheme.positive_high, "r >= " + edge(scheme.upper)},
        {scheme.positive_low, edge(scheme.lower) + " <= r < " + edge(scheme.upper)},
        {scheme.neutral, "|r| < " + edge(scheme.lower)},
        {scheme.negative_low, "-" + edge(scheme.upper) + " < r <= -" + edge(scheme.lower)},
        {scheme.negative_high, "r <= -" + edge(scheme.upper)},
    };
    const double lx = kPlotX + kPlotW + 30.0;
    svg << "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n"
        << "<text x=\"" << num(lx) << "\" y=\"" << num(kPlotY)
        << "\">Pearson residual</text>\n";
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const double y = kPlotY + 12.0 + 24.0 * static_cast<double>(k);
      svg << "<rect x=\"" << num(lx) << "\" y=\"" << num(y)
          << "\" width=\"18.000000\" height=\"18.000000\" fill=\"" << entries[k].fill
          << "\" stroke=\"#555555\" stroke-width=\"0.5\"/>\n"
          << "<text x=\"" << num(lx + 24.0) << "\" y=\"" << num(y + 13.0) << "\">"
          << escape(entries[k].label) << "</text>\n";
    }
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace attrib::mosaic
