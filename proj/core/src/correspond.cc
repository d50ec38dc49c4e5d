#include "rasl/correspond.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "rasl/error.h"

namespace rasl {
namespace {

int BinOf(double coord, double extent, int bins) {
  const int bin = static_cast<int>(std::floor(coord * bins / extent));
  return std::clamp(bin, 0, bins - 1);
}

bool SameCell(const Correspondence& m, GridCell cell, const GridConfig& cfg) {
  return CellOf(m.p_i, cfg) == cell && CellOf(m.p_j, cfg) == cell;
}

// Index of the best-confidence match in `candidates`, lowest index on ties.
std::size_t BestByConfidence(std::span<const std::size_t> candidates,
                             const CorrespondenceSet& corrs) {
  std::size_t best = candidates.front();
  for (std::size_t idx : candidates) {
    const double c = corrs.matches[idx].confidence;
    const double b = corrs.matches[best].confidence;
    if (c > b || (c == b && idx < best)) {
      best = idx;
    }
  }
  return best;
}

}  // namespace

void CorrespondenceSet::Validate() const {
  if (!(image_width > 0.0) || !(image_height > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "image size must be positive");
  }
  for (std::size_t n = 0; n < matches.size(); ++n) {
    const auto& m = matches[n];
    const bool inside =
        m.p_i.x() >= 0.0 && m.p_i.x() <= image_width && m.p_i.y() >= 0.0 &&
        m.p_i.y() <= image_height && m.p_j.x() >= 0.0 &&
        m.p_j.x() <= image_width && m.p_j.y() >= 0.0 &&
        m.p_j.y() <= image_height;
    if (!inside) {
      throw Error(ErrorCode::kInvalidArgument,
                  "match " + std::to_string(n) + " lies outside the image");
    }
    if (!(m.confidence >= 0.0 && m.confidence <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "match " + std::to_string(n) + " confidence not in [0,1]");
    }
  }
}

void GridConfig::Validate() const {
  if (rows <= 0 || cols <= 0 || rows * cols < 6) {
    throw Error(ErrorCode::kInvalidArgument,
                "grid needs rows, cols > 0 and at least 6 cells");
  }
  if (!(image_width > 0.0) || !(image_height > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "image size must be positive");
  }
}

GridCell CellOf(const Eigen::Vector2d& pixel, const GridConfig& cfg) {
  return {BinOf(pixel.y(), cfg.image_height, cfg.rows),
          BinOf(pixel.x(), cfg.image_width, cfg.cols)};
}

std::vector<std::vector<std::size_t>> GridPartition(
    const CorrespondenceSet& corrs, const GridConfig& cfg) {
  cfg.Validate();
  if (corrs.matches.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no correspondences to partition");
  }
  std::vector<std::vector<std::size_t>> cells(cfg.num_cells());
  for (std::size_t n = 0; n < corrs.matches.size(); ++n) {
    const GridCell c = CellOf(corrs.matches[n].p_i, cfg);
    cells[c.row * cfg.cols + c.col].push_back(n);
  }
  return cells;
}

int CorrespondenceScore(GridCell cell, const CorrespondenceSet& corrs,
                        const GridConfig& cfg) {
  if (cell.row < 0 || cell.row >= cfg.rows || cell.col < 0 ||
      cell.col >= cfg.cols) {
    throw Error(ErrorCode::kInvalidArgument, "cell outside the grid");
  }
  return static_cast<int>(
      std::count_if(corrs.matches.begin(), corrs.matches.end(),
                    [&](const Correspondence& m) {
                      return SameCell(m, cell, cfg);
                    }));
}

std::vector<RegionScore> ScoreRegions(const CorrespondenceSet& corrs,
                                      const GridConfig& cfg) {
  cfg.Validate();
  std::vector<RegionScore> scores(cfg.num_cells());
  for (int r = 0; r < cfg.rows; ++r) {
    for (int c = 0; c < cfg.cols; ++c) {
      scores[r * cfg.cols + c].cell = {r, c};
    }
  }
  // Single pass instead of one CorrespondenceScore call per cell.
  for (const auto& m : corrs.matches) {
    const GridCell ci = CellOf(m.p_i, cfg);
    if (ci == CellOf(m.p_j, cfg)) {
      ++scores[ci.row * cfg.cols + ci.col].score;
    }
  }
  return scores;
}

std::vector<GridCell> SelectTopRegions(std::span<const RegionScore> scores,
                                       int k) {
  std::vector<RegionScore> nonzero;
  for (const auto& s : scores) {
    if (s.score > 0) {
      nonzero.push_back(s);
    }
  }
  if (static_cast<int>(nonzero.size()) < k) {
    throw Error(ErrorCode::kInsufficientRegions,
                "only " + std::to_string(nonzero.size()) +
                    " regions with matches, need " + std::to_string(k));
  }
  std::sort(nonzero.begin(), nonzero.end(),
            [](const RegionScore& a, const RegionScore& b) {
              if (a.score != b.score) {
                return a.score > b.score;
              }
              return a.cell < b.cell;
            });
  std::vector<GridCell> cells;
  cells.reserve(k);
  for (int n = 0; n < k; ++n) {
    cells.push_back(nonzero[n].cell);
  }
  return cells;
}

std::vector<std::size_t> SelectSixPoints(std::span<const GridCell> cells,
                                         const CorrespondenceSet& corrs,
                                         const GridConfig& cfg) {
  std::vector<std::size_t> picked;
  picked.reserve(cells.size());
  std::vector<std::size_t> members;
  for (const GridCell& cell : cells) {
    members.clear();
    for (std::size_t n = 0; n < corrs.matches.size(); ++n) {
      if (SameCell(corrs.matches[n], cell, cfg)) {
        members.push_back(n);
      }
    }
    if (members.empty()) {
      throw Error(ErrorCode::kInsufficientRegions,
                  "selected region (" + std::to_string(cell.row) + "," +
                      std::to_string(cell.col) + ") has no matches");
    }
    picked.push_back(BestByConfidence(members, corrs));
  }
  return picked;
}

std::vector<std::size_t> SelectRepresentativePoints(
    const CorrespondenceSet& corrs, const GridConfig& cfg, int k) {
  cfg.Validate();
  if (static_cast<int>(corrs.matches.size()) < k) {
    throw Error(ErrorCode::kInsufficientRegions,
                "need at least " + std::to_string(k) + " correspondences, got " +
                    std::to_string(corrs.matches.size()));
  }
  const std::vector<RegionScore> scores = ScoreRegions(corrs, cfg);
  const int available = static_cast<int>(
      std::count_if(scores.begin(), scores.end(),
                    [](const RegionScore& s) { return s.score > 0; }));
  const std::vector<GridCell> cells =
      SelectTopRegions(scores, std::min(k, available));
  std::vector<std::size_t> picked = SelectSixPoints(cells, corrs, cfg);
  if (static_cast<int>(picked.size()) == k) {
    return picked;
  }

  std::vector<std::size_t> rest;
  for (std::size_t n = 0; n < corrs.matches.size(); ++n) {
    if (std::find(picked.begin(), picked.end(), n) == picked.end()) {
      rest.push_back(n);
    }
  }
  std::stable_sort(rest.begin(), rest.end(),
                   [&](std::size_t a, std::size_t b) {
                     return corrs.matches[a].confidence >
                            corrs.matches[b].confidence;
                   });
  for (std::size_t n = 0; static_cast<int>(picked.size()) < k; ++n) {
    picked.push_back(rest[n]);
  }
  return picked;
}

}  // namespace rasl
