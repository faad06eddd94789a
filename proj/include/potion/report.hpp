#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "potion/category.hpp"
#include "potion/corpus.hpp"
#include "potion/error.hpp"
#include "potion/format.hpp"
#include "potion/model.hpp"
#include "potion/parallel.hpp"

namespace potion {

struct CategoryCounts {
  CategoryCountArray counts{};
  std::size_t total = 0;

  // Lowest id among the most frequent categories.
  CategoryId modal() const {
    return static_cast<CategoryId>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  }

  friend bool operator==(const CategoryCounts&, const CategoryCounts&) = default;
};

struct ProbHistogram {
  std::vector<double> bin_edges;  // bins + 1 entries
  std::vector<std::size_t> bin_counts;

  std::size_t total() const { return std::accumulate(bin_counts.begin(), bin_counts.end(), std::size_t{0}); }

  friend bool operator==(const ProbHistogram&, const ProbHistogram&) = default;
};

struct AmbiguityEntry {
  std::string recipe_id;
  std::vector<std::pair<CategoryId, double>> top;  // descending probability
  bool ambiguous = false;

  friend bool operator==(const AmbiguityEntry&, const AmbiguityEntry&) = default;
};

inline std::vector<Prediction> classify_batch(const ModelParams& model, const std::vector<Recipe>& recipes,
                                              std::size_t threads = 1) {
  model.weights.check_shapes();
  std::vector<Prediction> out(recipes.size());
  parallel_for(recipes.size(), threads, [&](std::size_t i) { out[i] = predict(model, recipes[i]); });
  return out;
}

inline CategoryCounts tally(const std::vector<Prediction>& predictions) {
  CategoryCounts c;
  for (const auto& p : predictions) ++c.counts.at(p.top_index);
  c.total = predictions.size();
  return c;
}

inline std::size_t histogram_bin(double p, std::size_t bins) {
  const double scaled = std::floor(p * static_cast<double>(bins));
  std::size_t idx = scaled <= 0.0 ? 0 : std::min(bins - 1, static_cast<std::size_t>(scaled));
  auto edge = [bins](std::size_t i) { return static_cast<double>(i) / static_cast<double>(bins); };
  while (idx > 0 && p < edge(idx)) --idx;
  while (idx + 1 < bins && p >= edge(idx + 1)) ++idx;
  return idx;
}

// Equal-width bins over [0, 1] of each prediction's top probability; bins
// are half-open except the last, which includes 1.
inline ProbHistogram histogram(const std::vector<Prediction>& predictions, std::size_t bins = 20) {
  if (bins == 0) throw InvalidConfig("histogram needs at least one bin");
  ProbHistogram h;
  for (std::size_t i = 0; i <= bins; ++i) h.bin_edges.push_back(static_cast<double>(i) / static_cast<double>(bins));
  h.bin_counts.assign(bins, 0);
  for (const auto& p : predictions) ++h.bin_counts[histogram_bin(p.top_prob, bins)];
  return h;
}

inline AmbiguityEntry ambiguity_entry(const Prediction& pred, std::string recipe_id, std::size_t k,
                                      double threshold) {
  std::array<CategoryId, kNumCategories> order{};
  std::iota(order.begin(), order.end(), CategoryId{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](CategoryId a, CategoryId b) { return pred.probs[a] > pred.probs[b]; });
  AmbiguityEntry e;
  e.recipe_id = std::move(recipe_id);
  for (std::size_t i = 0; i < std::min(k, kNumCategories); ++i) e.top.emplace_back(order[i], pred.probs[order[i]]);
  e.ambiguous = pred.probs[order[1]] >= threshold;
  return e;
}

// One entry per recipe; flagged when the runner-up probability reaches the
// threshold.
inline std::vector<AmbiguityEntry> ambiguity_report(const std::vector<Prediction>& predictions,
                                                    const std::vector<Recipe>& recipes, std::size_t k = 3,
                                                    double threshold = 0.10) {
  if (k < 1) throw InvalidConfig("ambiguity report needs k >= 1");
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidConfig("ambiguity threshold must lie in (0, 1)");
  if (predictions.size() != recipes.size()) throw ShapeMismatch("prediction and recipe counts differ");
  std::vector<AmbiguityEntry> out;
  out.reserve(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i)
    out.push_back(ambiguity_entry(predictions[i], recipes[i].id, k, threshold));
  return out;
}

inline std::string counts_csv(const CategoryCounts& c) {
  std::string out = "category,count\n";
  for (const auto& cat : kCategories) out += csv_field(cat.name) + "," + std::to_string(c.counts[cat.id]) + "\n";
  return out;
}

inline std::string histogram_csv(const ProbHistogram& h) {
  std::string out = "bin_low,bin_high,count\n";
  for (std::size_t i = 0; i < h.bin_counts.size(); ++i)
    out += format_fixed(h.bin_edges[i]) + "," + format_fixed(h.bin_edges[i + 1]) + "," +
           std::to_string(h.bin_counts[i]) + "\n";
  return out;
}

inline std::string ambiguity_csv(const std::vector<AmbiguityEntry>& entries, std::size_t k) {
  std::string out = "recipe_id,ambiguous";
  for (std::size_t r = 1; r <= k; ++r)
    out += ",category_" + std::to_string(r) + ",probability_" + std::to_string(r);
  out += "\n";
  for (const auto& e : entries) {
    out += csv_field(e.recipe_id) + (e.ambiguous ? ",true" : ",false");
    for (std::size_t r = 0; r < k; ++r) {
      if (r < e.top.size())
        out += "," + csv_field(category_name(e.top[r].first)) + "," + format_fixed(e.top[r].second);
      else
        out += ",,";
    }
    out += "\n";
  }
  return out;
}

namespace detail {

struct Bar {
  std::string label;
  std::size_t value;
};

inline void svg_bar_chart(std::ostringstream& svg, int x0, int y0, int width, int height, const std::string& title,
                          const std::vector<Bar>& bars) {
  const std::size_t peak = std::max<std::size_t>(
      1, std::max_element(bars.begin(), bars.end(), [](const Bar& a, const Bar& b) { return a.value < b.value; })
             ->value);
  const int plot_top = y0 + 30;
  const int plot_h = height - 130;
  const int base = plot_top + plot_h;
  const int slot = width / static_cast<int>(bars.size());
  svg << "<g>\n";
  svg << "<text x=\"" << x0 + width / 2 << "\" y=\"" << y0 + 18
      << "\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
  svg << "<line x1=\"" << x0 << "\" y1=\"" << base << "\" x2=\"" << x0 + width << "\" y2=\"" << base
      << "\" stroke=\"black\"/>\n";
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const int bar_h = static_cast<int>(static_cast<long long>(plot_h) * static_cast<long long>(bars[i].value) /
                                       static_cast<long long>(peak));
    const int x = x0 + static_cast<int>(i) * slot;
    svg << "<rect x=\"" << x + 2 << "\" y=\"" << base - bar_h << "\" width=\"" << slot - 4 << "\" height=\""
        << bar_h << "\" fill=\"#4a6fa5\"/>\n";
    svg << "<text x=\"" << x + slot / 2 << "\" y=\"" << base - bar_h - 3
        << "\" text-anchor=\"middle\" font-size=\"9\">" << bars[i].value << "</text>\n";
    svg << "<text transform=\"translate(" << x + slot / 2 << "," << base + 8
        << ") rotate(60)\" font-size=\"9\">" << xml_escape(bars[i].label) << "</text>\n";
  }
  svg << "</g>\n";
}

}  // namespace detail

// Two static bar charts: predicted category counts and the top-probability
// histogram.
inline std::string report_svg(const CategoryCounts& counts, const ProbHistogram& hist) {
  std::vector<detail::Bar> cat_bars;
  for (const auto& c : kCategories) cat_bars.push_back({std::string(c.name), counts.counts[c.id]});
  std::vector<detail::Bar> hist_bars;
  for (std::size_t i = 0; i < hist.bin_counts.size(); ++i)
    hist_bars.push_back({format_fixed(hist.bin_edges[i], 2) + "-" + format_fixed(hist.bin_edges[i + 1], 2),
                         hist.bin_counts[i]});

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"1200\" height=\"520\" "
         "viewBox=\"0 0 1200 520\">\n"
      << "<rect width=\"1200\" height=\"520\" fill=\"white\"/>\n"
      << "<g font-family=\"sans-serif\">\n";
  detail::svg_bar_chart(svg, 40, 10, 540, 500,
                        "Predicted categories (n=" + std::to_string(counts.total) + ")", cat_bars);
  detail::svg_bar_chart(svg, 630, 10, 540, 500, "Top predicted probability", hist_bars);
  svg << "</g>\n</svg>\n";
  return svg.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

// Writes counts.csv, histogram.csv, ambiguity.csv, report.svg and
// run_meta.json into out_dir.
inline void emit_reports(const CategoryCounts& counts, const ProbHistogram& hist,
                         const std::vector<AmbiguityEntry>& ambiguity, std::size_t k,
                         const nlohmann::ordered_json& run_meta, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());
  write_file(out_dir / "counts.csv", counts_csv(counts));
  write_file(out_dir / "histogram.csv", histogram_csv(hist));
  write_file(out_dir / "ambiguity.csv", ambiguity_csv(ambiguity, k));
  write_file(out_dir / "report.svg", report_svg(counts, hist));
  write_file(out_dir / "run_meta.json", run_meta.dump(2) + "\n");
}

}  // namespace potion
