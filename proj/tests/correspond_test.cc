#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "expect_error.h"
#include "rasl/correspond.h"

namespace rasl {
namespace {

GridConfig Grid(int rows, int cols) {
  GridConfig cfg;
  cfg.rows = rows;
  cfg.cols = cols;
  return cfg;
}

Correspondence Match(double xi, double yi, double xj, double yj,
                     double confidence = 0.5) {
  return {Eigen::Vector2d(xi, yi), Eigen::Vector2d(xj, yj), confidence};
}

// Centre of cell (row, col) of a 640x480 image, offset by (dx, dy).
Eigen::Vector2d CellPoint(const GridConfig& cfg, int row, int col,
                          double dx = 0.0, double dy = 0.0) {
  const double w = 640.0 / cfg.cols, h = 480.0 / cfg.rows;
  return {(col + 0.5) * w + dx, (row + 0.5) * h + dy};
}

TEST(CellOf, CornerAndBoundaries) {
  EXPECT_EQ(CellOf({0.0, 0.0}, Grid(2, 2)), (GridCell{0, 0}));
  const GridConfig cfg = Grid(2, 4);  // cells 160 x 240
  EXPECT_EQ(CellOf({160.0, 240.0}, cfg), (GridCell{1, 1}));
  EXPECT_EQ(CellOf({159.999, 239.999}, cfg), (GridCell{0, 0}));
  EXPECT_EQ(CellOf({640.0, 480.0}, cfg), (GridCell{1, 3}));
  for (int c = 1; c < 4; ++c) {
    EXPECT_EQ(CellOf({160.0 * c, 10.0}, cfg).col, c);
  }
}

TEST(GridPartition, CountsSumToTotal) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> x(0.0, 640.0), y(0.0, 480.0);
  CorrespondenceSet corrs;
  for (int k = 0; k < 500; ++k)
    corrs.matches.push_back(Match(x(rng), y(rng), x(rng), y(rng)));
  const GridConfig cfg = Grid(4, 5);
  const auto cells = GridPartition(corrs, cfg);
  ASSERT_EQ(cells.size(), 20u);
  std::size_t total = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    total += cells[c].size();
    for (std::size_t idx : cells[c]) {
      const GridCell cell = CellOf(corrs.matches[idx].p_i, cfg);
      EXPECT_EQ(static_cast<std::size_t>(cell.row * cfg.cols + cell.col), c);
    }
  }
  EXPECT_EQ(total, 500u);
  EXPECT_RASL_ERROR(GridPartition(CorrespondenceSet{}, cfg), ErrorCode::kEmptyInput);
}

TEST(CorrespondenceScore, CountsOnlyMatchesStayingInTheCell) {
  // Cell (1,1) holds eight features; six are matched inside (1,1).
  const GridConfig cfg = Grid(2, 3);
  CorrespondenceSet corrs;
  for (int k = 0; k < 6; ++k) {
    const auto p = CellPoint(cfg, 1, 1, 5.0 * k, 3.0 * k);
    const auto q = CellPoint(cfg, 1, 1, -4.0 * k, 2.0);
    corrs.matches.push_back({p, q, 0.5});
  }
  corrs.matches.push_back({CellPoint(cfg, 1, 1), CellPoint(cfg, 0, 1), 0.9});
  corrs.matches.push_back({CellPoint(cfg, 1, 1), CellPoint(cfg, 1, 2), 0.9});
  EXPECT_EQ(CorrespondenceScore({1, 1}, corrs, cfg), 6);

  CorrespondenceSet away;
  away.matches.push_back({CellPoint(cfg, 0, 0), CellPoint(cfg, 1, 2), 0.5});
  EXPECT_EQ(CorrespondenceScore({0, 0}, away, cfg), 0);
}

TEST(CorrespondenceScore, IdentityPairEqualsRawCount) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> x(0.0, 640.0), y(0.0, 480.0);
  CorrespondenceSet corrs;
  for (int k = 0; k < 300; ++k) {
    const Eigen::Vector2d p(x(rng), y(rng));
    corrs.matches.push_back({p, p, 0.5});
  }
  const GridConfig cfg = Grid(3, 4);
  const auto cells = GridPartition(corrs, cfg);
  for (const auto& s : ScoreRegions(corrs, cfg)) {
    EXPECT_EQ(s.score, static_cast<int>(cells[s.cell.row * cfg.cols + s.cell.col].size()));
    EXPECT_EQ(s.score, CorrespondenceScore(s.cell, corrs, cfg));
  }
}

TEST(SelectTopRegions, ExactlySixNonzero) {
  std::vector<RegionScore> scores;
  for (int c = 0; c < 9; ++c) scores.push_back({{c / 3, c % 3}, c < 6 ? 10 - c : 0});
  const auto top = SelectTopRegions(scores, 6);
  ASSERT_EQ(top.size(), 6u);
  for (int k = 0; k < 6; ++k) EXPECT_EQ(top[k], (GridCell{k / 3, k % 3}));
}

TEST(SelectTopRegions, TieGoesToSmallerCell) {
  std::vector<RegionScore> scores = {{{0, 1}, 5}, {{0, 0}, 5}, {{1, 0}, 3},
                                     {{1, 1}, 2}, {{2, 0}, 2}, {{2, 1}, 1},
                                     {{2, 2}, 1}};
  const auto top = SelectTopRegions(scores, 6);
  EXPECT_EQ(top[0], (GridCell{0, 0}));
  EXPECT_EQ(top[1], (GridCell{0, 1}));
  EXPECT_EQ(top[3], (GridCell{1, 1}));
  EXPECT_EQ(top[5], (GridCell{2, 1}));
}

TEST(SelectTopRegions, MatchesFullSortOracle) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> score(0, 4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<RegionScore> scores;
    for (int c = 0; c < 30; ++c) scores.push_back({{c / 6, c % 6}, score(rng) + 1});
    std::shuffle(scores.begin(), scores.end(), rng);
    auto sorted = scores;
    std::sort(sorted.begin(), sorted.end(), [](const RegionScore& a, const RegionScore& b) {
      return a.score != b.score ? a.score > b.score : a.cell < b.cell;
    });
    const auto top = SelectTopRegions(scores, 6);
    for (int k = 0; k < 6; ++k) EXPECT_EQ(top[k], sorted[k].cell);
  }
}

TEST(SelectTopRegions, TooFewNonzero) {
  std::vector<RegionScore> scores = {{{0, 0}, 1}, {{0, 1}, 0}};
  EXPECT_RASL_ERROR(SelectTopRegions(scores, 6), ErrorCode::kInsufficientRegions);
}

TEST(SelectSixPoints, OnePerCellAndTieBreak) {
  const GridConfig cfg = Grid(2, 3);
  CorrespondenceSet corrs;
  std::vector<GridCell> cells;
  for (int c = 0; c < 6; ++c) {
    cells.push_back({c / 3, c % 3});
    const auto p = CellPoint(cfg, c / 3, c % 3);
    corrs.matches.push_back({p, p, 0.5});
  }
  auto picked = SelectSixPoints(cells, corrs, cfg);
  for (std::size_t k = 0; k < 6; ++k) EXPECT_EQ(picked[k], k);

  // Cell (0,0) gains {0.9, 0.9, 0.3}: the first 0.9 wins.
  const auto p = CellPoint(cfg, 0, 0, 10.0);
  corrs.matches.push_back({p, p, 0.9});  // index 6
  corrs.matches.push_back({p, p, 0.9});  // index 7
  corrs.matches.push_back({p, p, 0.3});
  picked = SelectSixPoints(cells, corrs, cfg);
  EXPECT_EQ(picked[0], 6u);
}

TEST(SelectSixPoints, MatchesPerCellScanOracle) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> x(0.0, 640.0), y(0.0, 480.0), conf(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, 20.0);
  const GridConfig cfg = Grid(3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    CorrespondenceSet corrs;
    for (int k = 0; k < 400; ++k) {
      const Eigen::Vector2d p(x(rng), y(rng));
      Eigen::Vector2d q = p + Eigen::Vector2d(jitter(rng), jitter(rng));
      q = q.cwiseMax(Eigen::Vector2d::Zero()).cwiseMin(Eigen::Vector2d(640, 480));
      corrs.matches.push_back({p, q, conf(rng)});
    }
    const auto top = SelectTopRegions(ScoreRegions(corrs, cfg), 6);
    const auto picked = SelectSixPoints(top, corrs, cfg);
    for (std::size_t c = 0; c < top.size(); ++c) {
      std::size_t best = corrs.matches.size();
      for (std::size_t k = 0; k < corrs.matches.size(); ++k) {
        const auto& m = corrs.matches[k];
        if (CellOf(m.p_i, cfg) != top[c] || CellOf(m.p_j, cfg) != top[c]) continue;
        if (best == corrs.matches.size() || m.confidence > corrs.matches[best].confidence)
          best = k;
      }
      EXPECT_EQ(picked[c], best);
    }
  }
}

TEST(SelectRepresentativePoints, FallsBackToConfidence) {
  const GridConfig cfg = Grid(2, 3);
  CorrespondenceSet corrs;
  // Only cell (0,0) keeps its matches; the rest move across cells.
  corrs.matches.push_back({CellPoint(cfg, 0, 0), CellPoint(cfg, 0, 0), 0.2});
  for (int k = 0; k < 6; ++k)
    corrs.matches.push_back({CellPoint(cfg, 1, k % 3), CellPoint(cfg, 0, 2), 0.1 * (k + 1)});
  const auto picked = SelectRepresentativePoints(corrs, cfg, 6);
  ASSERT_EQ(picked.size(), 6u);
  EXPECT_EQ(picked[0], 0u);
  std::vector<std::size_t> sorted(picked.begin(), picked.end());
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(std::unique(sorted.begin(), sorted.end()), sorted.end());
  EXPECT_EQ(std::count(picked.begin(), picked.end(), 1u), 0);  // lowest confidence

  CorrespondenceSet few;
  few.matches.resize(5, corrs.matches[0]);
  EXPECT_RASL_ERROR(SelectRepresentativePoints(few, cfg, 6), ErrorCode::kInsufficientRegions);
}

TEST(CorrespondenceSet, ValidateRejectsOutsideAndBadConfidence) {
  CorrespondenceSet corrs;
  corrs.matches.push_back(Match(700, 10, 10, 10));
  EXPECT_RASL_ERROR(corrs.Validate(), ErrorCode::kInvalidArgument);
  corrs.matches[0] = Match(10, 10, 10, 10, 1.5);
  EXPECT_RASL_ERROR(corrs.Validate(), ErrorCode::kInvalidArgument);
  EXPECT_RASL_ERROR(Grid(2, 2).Validate(), ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace rasl
