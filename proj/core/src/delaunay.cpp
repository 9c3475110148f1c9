#include "delaunay.hpp"

#include <algorithm>
#include <unordered_set>

namespace surgq::detail {

namespace {

__extension__ using i128 = __int128;

i128 orient(const LatticePoint& a, const LatticePoint& b, const LatticePoint& c) {
  return static_cast<i128>(b.x - a.x) * (c.y - a.y) - static_cast<i128>(b.y - a.y) * (c.x - a.x);
}

// > 0 iff d lies strictly inside the circumcircle of counter-clockwise (a, b, c).
bool in_circle(const LatticePoint& a, const LatticePoint& b, const LatticePoint& c, const LatticePoint& d) {
  const i128 adx = a.x - d.x, ady = a.y - d.y;
  const i128 bdx = b.x - d.x, bdy = b.y - d.y;
  const i128 cdx = c.x - d.x, cdy = c.y - d.y;
  const i128 det = (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) -
                   (bdx * bdx + bdy * bdy) * (adx * cdy - cdx * ady) +
                   (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
  return det > 0;
}

std::uint64_t edge_key(std::uint32_t from, std::uint32_t to) {
  return (static_cast<std::uint64_t>(from) << 32) | to;
}

}  // namespace

std::vector<Triangle> delaunay(std::span<const LatticePoint> input) {
  const auto n = static_cast<std::uint32_t>(input.size());
  if (n < 3) return {};

  std::vector<LatticePoint> pts(input.begin(), input.end());
  auto [min_x, max_x] = std::minmax_element(pts.begin(), pts.end(),
                                            [](auto& p, auto& q) { return p.x < q.x; });
  auto [min_y, max_y] = std::minmax_element(pts.begin(), pts.end(),
                                            [](auto& p, auto& q) { return p.y < q.y; });
  const std::int64_t span = std::max(max_x->x - min_x->x, max_y->y - min_y->y) + 1;
  const std::int64_t cx = (min_x->x + max_x->x) / 2;
  const std::int64_t cy = (min_y->y + max_y->y) / 2;
  const std::int64_t m = 64 * span;
  pts.push_back({cx - m, cy - m});
  pts.push_back({cx + m, cy - m});
  pts.push_back({cx, cy + m});

  std::vector<Triangle> tris{{n, n + 1, n + 2}};
  std::vector<Triangle> keep;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::unordered_set<std::uint64_t> directed;

  // Insertion order: lexicographic, which keeps the cavity local on lattice data.
  std::vector<std::uint32_t> order(n);
  for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto i, auto j) {
    return pts[i].x != pts[j].x ? pts[i].x < pts[j].x : pts[i].y < pts[j].y;
  });

  for (const auto p : order) {
    keep.clear();
    edges.clear();
    directed.clear();
    for (const auto& t : tris) {
      if (in_circle(pts[t.a], pts[t.b], pts[t.c], pts[p])) {
        edges.emplace_back(t.a, t.b);
        edges.emplace_back(t.b, t.c);
        edges.emplace_back(t.c, t.a);
        directed.insert(edge_key(t.a, t.b));
        directed.insert(edge_key(t.b, t.c));
        directed.insert(edge_key(t.c, t.a));
      } else {
        keep.push_back(t);
      }
    }
    for (auto [u, v] : edges) {
      if (directed.count(edge_key(v, u))) continue;  // shared by two cavity triangles
      if (orient(pts[u], pts[v], pts[p]) > 0) keep.push_back({u, v, p});
    }
    tris.swap(keep);
  }

  std::erase_if(tris, [n](const Triangle& t) { return t.a >= n || t.b >= n || t.c >= n; });
  return tris;
}

}  // namespace surgq::detail
