#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "mici/errors.hpp"
#include "mici/topology.hpp"

using namespace mici;

namespace {

// Independent oracle: place hex centers geometrically (odd rows shifted by
// half a cell, unit spacing) and call two cells adjacent when their centers
// are one unit apart. Order by angle measured anticlockwise from west.
std::vector<int> geometric_neighbors(int rows, int cols, int r, int c) {
  const double rh = std::sqrt(3.0) / 2.0;
  const auto center = [&](int rr, int cc) {
    return std::pair{cc + ((rr & 1) ? 0.5 : 0.0), -rr * rh};
  };
  const auto [x0, y0] = center(r, c);
  std::vector<std::pair<double, int>> found;
  for (int rr = 0; rr < rows; ++rr) {
    for (int cc = 0; cc < cols; ++cc) {
      if (rr == r && cc == c) continue;
      const auto [x, y] = center(rr, cc);
      if (std::abs(std::hypot(x - x0, y - y0) - 1.0) < 1e-9) {
        double deg = std::atan2(y - y0, x - x0) * 180.0 / M_PI;
        const double from_west = std::fmod(deg - 180.0 + 720.0, 360.0);
        found.emplace_back(from_west, rr * cols + cc + 1);
      }
    }
  }
  std::sort(found.begin(), found.end());
  std::vector<int> ids;
  for (const auto& [angle, id] : found) ids.push_back(id);
  return ids;
}

std::vector<int> ids(std::span<const CellId> cells) {
  std::vector<int> out;
  for (CellId c : cells) out.push_back(c.value);
  return out;
}

}  // namespace

TEST_CASE("build_grid numbers the 5x5 grid row-major from 1") {
  const Topology t = build_grid(5, 5);
  CHECK(t.cell_count() == 25);
  CHECK(t.at(0, 0).value == 1);
  CHECK(t.at(0, 4).value == 5);
  CHECK(t.at(4, 0).value == 21);
  CHECK(t.at(4, 4).value == 25);
  CHECK(t.position(CellId{7}) == std::pair{1, 1});
}

TEST_CASE("corner cell 1 has neighbors 2 and 6") {
  const Topology t = build_grid(5, 5);
  const auto n = ids(t.neighbors(CellId{1}));
  CHECK(std::set<int>(n.begin(), n.end()) == std::set<int>{2, 6});
  CHECK(t.cell_type(CellId{1}) == 4);
}

TEST_CASE("neighbor lists match the geometric oracle, including anticlockwise order") {
  for (auto [rows, cols] : {std::pair{5, 5}, {1, 1}, {1, 4}, {4, 1}, {2, 2}, {3, 7}, {6, 4}}) {
    CAPTURE(rows);
    CAPTURE(cols);
    const Topology t = build_grid(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        CHECK(ids(t.neighbors(t.at(r, c))) == geometric_neighbors(rows, cols, r, c));
      }
    }
  }
}

TEST_CASE("directional lookup agrees with the ordered list") {
  const Topology t = build_grid(5, 5);
  for (int i = 1; i <= 25; ++i) {
    std::vector<int> via_dirs;
    for (int d = 0; d < kDirections; ++d) {
      if (auto n = t.neighbor(CellId{i}, static_cast<Direction>(d))) via_dirs.push_back(n->value);
    }
    CHECK(via_dirs == ids(t.neighbors(CellId{i})));
  }
  // interior even-row cell 13 = (2,2): W is 12, E is 14
  CHECK(t.neighbor(CellId{13}, Direction::kW)->value == 12);
  CHECK(t.neighbor(CellId{13}, Direction::kE)->value == 14);
  CHECK_FALSE(t.neighbor(CellId{1}, Direction::kNW).has_value());
}

TEST_CASE("adjacency invariants hold on assorted grids") {
  for (int rows = 1; rows <= 7; ++rows) {
    for (int cols = 1; cols <= 7; ++cols) {
      const Topology t = build_grid(rows, cols);
      for (int i = 1; i <= t.cell_count(); ++i) {
        const CellId cell{i};
        const auto n = t.neighbors(cell);
        std::set<CellId> unique(n.begin(), n.end());
        CHECK(unique.size() == n.size());
        CHECK_FALSE(unique.contains(cell));
        for (CellId other : n) {
          const auto back = t.neighbors(other);
          CHECK(std::find(back.begin(), back.end(), cell) != back.end());
        }
        if (rows >= 2 && cols >= 2) {
          CHECK(n.size() >= 2);
          CHECK(n.size() <= 6);
          CHECK(t.cell_type(cell) + static_cast<int>(n.size()) == 6);
        }
        CHECK(t.cell_type(cell) >= 0);
        CHECK(t.cell_type(cell) <= 4);
      }
    }
  }
}

TEST_CASE("cell_type examples") {
  const Topology t = build_grid(5, 5);
  CHECK(cell_type(t, CellId{13}) == 0);  // interior, 6 neighbors
  CHECK(cell_type(t, CellId{1}) == 4);   // corner, 2 neighbors
  CHECK(cell_type(t, CellId{3}) == 2);   // top row interior, 4 neighbors
  CHECK_THROWS_AS(cell_type(t, CellId{26}), LookupError);
  CHECK_THROWS_AS(cell_type(t, CellId{0}), LookupError);
}

TEST_CASE("degenerate grids") {
  const Topology one = build_grid(1, 1);
  CHECK(one.neighbors(CellId{1}).empty());
  CHECK(one.cell_type(CellId{1}) == 4);
  CHECK_THROWS_AS(build_grid(0, 5), ConfigError);
  CHECK_THROWS_AS(build_grid(5, 0), ConfigError);
}

TEST_CASE("reuse_factor") {
  CHECK(reuse_factor(4.45).reuse_n == 7);
  CHECK(reuse_factor(3.0).reuse_n == 3);
  CHECK(reuse_factor(std::sqrt(21.0)).reuse_n == 7);
  CHECK(reuse_factor(4.45).sigma == doctest::Approx(4.45));
  CHECK_THROWS_AS(reuse_factor(0.0), DomainError);
  CHECK_THROWS_AS(reuse_factor(-1.0), DomainError);

  // raw 5.5 is equidistant from 4 and 7; ties go upward
  CHECK(reuse_factor(std::sqrt(3 * 5.5)).reuse_n == 7);
}

TEST_CASE("reuse series membership and exact hits") {
  // i^2 + ij + j^2 enumerated independently
  std::set<int> series;
  for (int i = 0; i <= 30; ++i)
    for (int j = 0; j <= 30; ++j)
      if (int v = i * i + i * j + j * j; v >= 1 && v <= 400) series.insert(v);
  for (int n = 1; n <= 200; ++n) CHECK(is_reuse_series_member(n) == series.contains(n));
  CHECK(std::vector<int>(series.begin(), std::next(series.begin(), 6)) ==
        std::vector<int>{1, 3, 4, 7, 9, 12});

  for (int k : series) CHECK(reuse_factor(std::sqrt(3.0 * k)).reuse_n == k);
  for (double sigma = 0.05; sigma < 25.0; sigma += 0.173) {
    CHECK(series.contains(reuse_factor(sigma).reuse_n));
  }
}

TEST_CASE("channel groups never collide across an edge") {
  for (int rows = 1; rows <= 9; ++rows) {
    for (int cols = 1; cols <= 9; ++cols) {
      const Topology t = build_grid(rows, cols);
      const auto labels = assign_channel_groups(t, 7);
      for (int i = 1; i <= t.cell_count(); ++i) {
        CHECK(labels[i - 1] >= 0);
        CHECK(labels[i - 1] < 7);
        CHECK(t.channel_group(CellId{i}) == labels[i - 1]);
        for (CellId n : t.neighbors(CellId{i})) CHECK(labels[i - 1] != labels[n.index()]);
      }
    }
  }
}

TEST_CASE("5x5 uses all seven groups and every cell sees six distinct neighbors' groups") {
  const Topology t = build_grid(5, 5);
  const auto labels = assign_channel_groups(t, 7);
  CHECK(std::set<int>(labels.begin(), labels.end()).size() == 7);
  const auto n = t.neighbors(CellId{13});
  std::set<int> around{labels[12]};
  for (CellId c : n) around.insert(labels[c.index()]);
  CHECK(around.size() == 7);  // a full reuse cluster
}

TEST_CASE("channel group edge cases") {
  CHECK(assign_channel_groups(build_grid(1, 1), 1) == std::vector<int>{0});
  CHECK(assign_channel_groups(build_grid(1, 1), 9) == std::vector<int>{0});
  try {
    assign_channel_groups(build_grid(5, 5), 2);
    FAIL("expected LabelingError");
  } catch (const LabelingError& e) {
    CHECK(std::string(e.what()).find("adjacent") != std::string::npos);
  }
  CHECK_THROWS_AS(assign_channel_groups(build_grid(5, 5), 0), LabelingError);
}
