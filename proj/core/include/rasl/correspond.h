#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace rasl {

struct Correspondence {
  Eigen::Vector2d p_i = Eigen::Vector2d::Zero();  // pixel in frame i
  Eigen::Vector2d p_j = Eigen::Vector2d::Zero();  // pixel in frame j
  double confidence = 0.0;                        // matcher score in [0, 1]
};

// Matches between two frames. Pixels must lie in [0, width] x [0, height].
struct CorrespondenceSet {
  int frame_i = 0;
  int frame_j = 1;
  double image_width = 640.0;
  double image_height = 480.0;
  std::vector<Correspondence> matches;

  void Validate() const;
};

struct GridConfig {
  int rows = 8;
  int cols = 8;
  double image_width = 640.0;
  double image_height = 480.0;

  // rows, cols > 0, rows * cols >= 6, positive image size.
  void Validate() const;
  int num_cells() const { return rows * cols; }
};

struct GridCell {
  int row = 0;
  int col = 0;
  auto operator<=>(const GridCell&) const = default;
};

struct RegionScore {
  GridCell cell;
  int score = 0;
};

// Half-open cells: a point on an interior boundary goes to the higher-index
// cell; points on the far image border are clamped into the last cell.
GridCell CellOf(const Eigen::Vector2d& pixel, const GridConfig& cfg);

// Per-cell lists of match indices keyed by the frame-i pixel, laid out
// row-major (row * cols + col). Throws kEmptyInput for an empty set.
std::vector<std::vector<std::size_t>> GridPartition(
    const CorrespondenceSet& corrs, const GridConfig& cfg);

// Number of matches whose frame-i pixel lies in `cell` and whose frame-j pixel
// lies in the same (row, col) cell of frame j.
int CorrespondenceScore(GridCell cell, const CorrespondenceSet& corrs,
                        const GridConfig& cfg);

// Scores for every cell in row-major order.
std::vector<RegionScore> ScoreRegions(const CorrespondenceSet& corrs,
                                      const GridConfig& cfg);

// The k highest-scoring cells, ties broken by (row, col). Throws
// kInsufficientRegions when fewer than k cells have a nonzero score.
std::vector<GridCell> SelectTopRegions(std::span<const RegionScore> scores,
                                       int k = 6);

// For each cell, the index of the highest-confidence match among the matches
// counted by CorrespondenceScore for that cell (lowest index wins ties).
// Throws kInsufficientRegions if a cell has no such match.
std::vector<std::size_t> SelectSixPoints(std::span<const GridCell> cells,
                                         const CorrespondenceSet& corrs,
                                         const GridConfig& cfg);

// Full selection with degraded-input fallback: when fewer than k regions score
// above zero, every nonzero region contributes its best match and the rest
// are the globally highest-confidence unused matches. Throws
// kInsufficientRegions only if the set has fewer than k matches in total.
std::vector<std::size_t> SelectRepresentativePoints(
    const CorrespondenceSet& corrs, const GridConfig& cfg, int k = 6);

}  // namespace rasl
