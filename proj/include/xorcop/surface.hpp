#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "xorcop/datasets.hpp"
#include "xorcop/network.hpp"

namespace xorcop {

/// Zero-based address of one weight: weights()[layer](row, col).
struct WeightCoord {
  std::size_t layer = 0;
  std::size_t row = 0;
  std::size_t col = 0;

  /// Spreadsheet style, one-based: "w1_11". When a row or column index
  /// reaches 10 the two indices are separated: "w1_3_12".
  std::string to_string() const;

  /// Inverse of to_string; also accepts the separated form for small
  /// indices. Throws ParseError.
  static WeightCoord parse(const std::string& text);

  friend auto operator<=>(const WeightCoord&, const WeightCoord&) = default;
};

/// Throws LookupError when `c` does not address a weight of `topology`.
void check_coord(const Topology& topology, const WeightCoord& c);

/// Every weight coordinate, ordered by layer, row, col.
std::vector<WeightCoord> weight_coords(const Topology& topology);

/// All unordered pairs of distinct coordinates, lexicographic.
std::vector<std::pair<WeightCoord, WeightCoord>> enumerate_pairs(const Topology& topology);

struct AxisRange {
  double lo = -5.0;
  double hi = 5.0;

  double at(std::size_t i, std::size_t steps) const {
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
};

inline constexpr std::size_t kDefaultSurfaceSteps = 101;

/// SSE over a lattice of two weights with every other weight frozen.
/// values(i, j) is the error at (range_a.at(i), range_b.at(j)).
struct SurfaceGrid {
  WeightCoord coord_a;
  WeightCoord coord_b;
  AxisRange range_a;
  AxisRange range_b;
  std::size_t steps = 0;
  Matrix values;
  Network frozen_net;
};

/// Throws LookupError for an invalid coordinate, DomainError when a == b,
/// ShapeError when steps < 2. Cells may be evaluated on `threads` workers
/// (0 = hardware concurrency); the result does not depend on the count.
SurfaceGrid project(const Network& net, const Dataset& data, const WeightCoord& a,
                    const WeightCoord& b, AxisRange range_a = {}, AxisRange range_b = {},
                    std::size_t steps = kDefaultSurfaceSteps, std::size_t threads = 1);

/// Single-cell SSE with the two weights set; what project stores per cell.
double surface_cell(const Network& net, const Dataset& data, const WeightCoord& a, double va,
                    const WeightCoord& b, double vb);

struct LandscapeStats {
  double min_value = 0.0;
  double max_value = 0.0;
  std::size_t min_i = 0;
  std::size_t min_j = 0;
  double min_a = 0.0;
  double min_b = 0.0;
  /// Cells strictly below every 4-neighbour. Ties never count.
  std::size_t local_minima = 0;
  /// Fraction of cells within kPlateauTolerance of some 4-neighbour.
  double plateau_fraction = 0.0;
};

inline constexpr double kPlateauTolerance = 1e-12;

/// Throws ShapeError when steps < 3.
LandscapeStats landscape_stats(const SurfaceGrid& grid);
LandscapeStats landscape_stats(const Matrix& values);

/// Long format, header `wa,wb,err`, wa-major, 17 significant digits.
void write_grid_csv(const SurfaceGrid& grid, std::ostream& out);

/// Companion metadata: coordinates, ranges, steps, dataset, model
/// reference and the landscape statistics.
std::string grid_metadata_json(const SurfaceGrid& grid, const std::string& dataset_name,
                               const std::string& model_ref);

/// The small random 2-2-1 net used as the reference starting point:
/// W1 = [[0.1, -0.1, 0.2], [-0.2, 0.3, 0.1]], W2 = [[-0.4, -0.2, 0.3]].
Network anchor_network(Activation hidden, Activation output);

}  // namespace xorcop
