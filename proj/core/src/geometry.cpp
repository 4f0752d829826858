#include "spatialpu/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace spu::geom {
namespace {

// Drops an explicit closing point so rings are handled uniformly.
std::size_t ring_size(const Ring& r) {
  if (r.size() >= 2 && r.front().x == r.back().x && r.front().y == r.back().y) return r.size() - 1;
  return r.size();
}

double cross(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool segments_cross(Point p1, Point p2, Point q1, Point q2) {
  const double d1 = cross(q1, q2, p1);
  const double d2 = cross(q1, q2, p2);
  const double d3 = cross(p1, p2, q1);
  const double d4 = cross(p1, p2, q2);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

bool ring_self_crosses(const Ring& r) {
  const std::size_t n = ring_size(r);
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = r[i], b = r[(i + 1) % n];
    const double ax0 = std::min(a.x, b.x), ax1 = std::max(a.x, b.x);
    const double ay0 = std::min(a.y, b.y), ay1 = std::max(a.y, b.y);
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the closing edge
      const Point c = r[j], d = r[(j + 1) % n];
      if (std::max(c.x, d.x) < ax0 || std::min(c.x, d.x) > ax1 || std::max(c.y, d.y) < ay0 ||
          std::min(c.y, d.y) > ay1)
        continue;
      if (segments_cross(a, b, c, d)) return true;
    }
  }
  return false;
}

// Sutherland-Hodgman against one half-plane of the rectangle.
template <typename Inside, typename Intersect>
Ring clip_edge(const Ring& in, Inside inside, Intersect intersect) {
  Ring out;
  const std::size_t n = in.size();
  if (n == 0) return out;
  for (std::size_t i = 0; i < n; ++i) {
    const Point cur = in[i];
    const Point prev = in[(i + n - 1) % n];
    const bool cin = inside(cur), pin = inside(prev);
    if (cin) {
      if (!pin) out.push_back(intersect(prev, cur));
      out.push_back(cur);
    } else if (pin) {
      out.push_back(intersect(prev, cur));
    }
  }
  return out;
}

double ring_clipped_area(const Ring& ring, const BBox& rect) {
  Ring poly(ring.begin(), ring.begin() + static_cast<std::ptrdiff_t>(ring_size(ring)));
  auto lerp_x = [](Point p, Point q, double x) {
    const double t = (x - p.x) / (q.x - p.x);
    return Point{x, p.y + t * (q.y - p.y)};
  };
  auto lerp_y = [](Point p, Point q, double y) {
    const double t = (y - p.y) / (q.y - p.y);
    return Point{p.x + t * (q.x - p.x), y};
  };
  poly = clip_edge(poly, [&](Point p) { return p.x >= rect.min_x; },
                   [&](Point p, Point q) { return lerp_x(p, q, rect.min_x); });
  poly = clip_edge(poly, [&](Point p) { return p.x <= rect.max_x; },
                   [&](Point p, Point q) { return lerp_x(p, q, rect.max_x); });
  poly = clip_edge(poly, [&](Point p) { return p.y >= rect.min_y; },
                   [&](Point p, Point q) { return lerp_y(p, q, rect.min_y); });
  poly = clip_edge(poly, [&](Point p) { return p.y <= rect.max_y; },
                   [&](Point p, Point q) { return lerp_y(p, q, rect.max_y); });
  return std::abs(signed_area(poly));
}

bool ring_contains(const Ring& r, Point p) {
  const std::size_t n = ring_size(r);
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = r[i], b = r[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

void BBox::expand(const BBox& o) {
  min_x = std::min(min_x, o.min_x);
  min_y = std::min(min_y, o.min_y);
  max_x = std::max(max_x, o.max_x);
  max_y = std::max(max_y, o.max_y);
}

double signed_area(const Ring& ring) {
  const std::size_t n = ring_size(ring);
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = ring[i], b = ring[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

AreaCentroid area_centroid(const MultiPolygon& shape) {
  // Accumulate with coordinates relative to the first vertex to limit
  // cancellation on projected (large-offset) coordinates.
  Point origin{};
  if (!shape.empty() && !shape.front().outer.empty()) origin = shape.front().outer.front();
  double area = 0.0, cx = 0.0, cy = 0.0;
  auto add_ring = [&](const Ring& ring, double sign) {
    const std::size_t n = ring_size(ring);
    double a2 = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Point p{ring[i].x - origin.x, ring[i].y - origin.y};
      const Point q{ring[(i + 1) % n].x - origin.x, ring[(i + 1) % n].y - origin.y};
      const double c = p.x * q.y - q.x * p.y;
      a2 += c;
      sx += (p.x + q.x) * c;
      sy += (p.y + q.y) * c;
    }
    // Orientation-independent: outer rings add, holes subtract.
    const double orient = a2 < 0 ? -1.0 : 1.0;
    area += sign * orient * 0.5 * a2;
    cx += sign * orient * sx / 6.0;
    cy += sign * orient * sy / 6.0;
  };
  for (const auto& poly : shape) {
    add_ring(poly.outer, 1.0);
    for (const auto& hole : poly.holes) add_ring(hole, -1.0);
  }
  AreaCentroid out;
  out.area = area;
  if (area > 0.0) out.centroid = {origin.x + cx / area, origin.y + cy / area};
  return out;
}

BBox bbox(const MultiPolygon& shape) {
  BBox b{INFINITY, INFINITY, -INFINITY, -INFINITY};
  for (const auto& poly : shape) {
    for (const auto& p : poly.outer) {
      b.min_x = std::min(b.min_x, p.x);
      b.min_y = std::min(b.min_y, p.y);
      b.max_x = std::max(b.max_x, p.x);
      b.max_y = std::max(b.max_y, p.y);
    }
  }
  return b;
}

std::optional<std::string> validate(const MultiPolygon& shape) {
  if (shape.empty()) return "empty geometry";
  auto check_ring = [](const Ring& r, const char* what) -> std::optional<std::string> {
    for (const auto& p : r) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) return std::string("non-finite coordinate in ") + what;
    }
    if (ring_size(r) < 3) return std::string("degenerate ") + what + " (fewer than 3 vertices)";
    if (signed_area(r) == 0.0) return std::string("zero-area ") + what;
    if (ring_self_crosses(r)) return std::string("self-intersecting ") + what;
    return std::nullopt;
  };
  for (const auto& poly : shape) {
    if (auto err = check_ring(poly.outer, "outer ring")) return err;
    for (const auto& hole : poly.holes) {
      if (auto err = check_ring(hole, "hole")) return err;
    }
  }
  if (!(area_centroid(shape).area > 0.0)) return "non-positive area";
  return std::nullopt;
}

std::vector<Segment> boundary_segments(const MultiPolygon& shape) {
  std::vector<Segment> out;
  auto add = [&](const Ring& r) {
    const std::size_t n = ring_size(r);
    for (std::size_t i = 0; i < n; ++i) out.push_back({r[i], r[(i + 1) % n]});
  };
  for (const auto& poly : shape) {
    add(poly.outer);
    for (const auto& hole : poly.holes) add(hole);
  }
  return out;
}

double collinear_overlap(const Segment& s, const Segment& t, double tolerance) {
  const double dx = s.b.x - s.a.x, dy = s.b.y - s.a.y;
  const double len = std::hypot(dx, dy);
  if (len == 0.0) return 0.0;
  const double ux = dx / len, uy = dy / len;
  auto perp = [&](Point p) { return std::abs((p.x - s.a.x) * uy - (p.y - s.a.y) * ux); };
  if (perp(t.a) > tolerance || perp(t.b) > tolerance) return 0.0;
  const double t0 = (t.a.x - s.a.x) * ux + (t.a.y - s.a.y) * uy;
  const double t1 = (t.b.x - s.a.x) * ux + (t.b.y - s.a.y) * uy;
  const double lo = std::max(0.0, std::min(t0, t1));
  const double hi = std::min(len, std::max(t0, t1));
  return std::max(0.0, hi - lo);
}

double shared_boundary_length(const std::vector<Segment>& a, const std::vector<Segment>& b,
                              double tolerance) {
  double total = 0.0;
  for (const auto& s : a) {
    const double sx0 = std::min(s.a.x, s.b.x) - tolerance, sx1 = std::max(s.a.x, s.b.x) + tolerance;
    const double sy0 = std::min(s.a.y, s.b.y) - tolerance, sy1 = std::max(s.a.y, s.b.y) + tolerance;
    for (const auto& t : b) {
      if (std::max(t.a.x, t.b.x) < sx0 || std::min(t.a.x, t.b.x) > sx1 ||
          std::max(t.a.y, t.b.y) < sy0 || std::min(t.a.y, t.b.y) > sy1)
        continue;
      total += collinear_overlap(s, t, tolerance);
    }
  }
  return total;
}

bool contains(const MultiPolygon& shape, Point p) {
  for (const auto& poly : shape) {
    if (!ring_contains(poly.outer, p)) continue;
    bool in_hole = false;
    for (const auto& hole : poly.holes) {
      if (ring_contains(hole, p)) {
        in_hole = true;
        break;
      }
    }
    if (!in_hole) return true;
  }
  return false;
}

double clipped_area(const MultiPolygon& shape, const BBox& rect) {
  double area = 0.0;
  for (const auto& poly : shape) {
    area += ring_clipped_area(poly.outer, rect);
    for (const auto& hole : poly.holes) area -= ring_clipped_area(hole, rect);
  }
  return std::max(0.0, area);
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace spu::geom
