#pragma once

#include <optional>
#include <string>
#include <vector>

namespace spu::geom {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Closed ring: first point repeated at the end is tolerated but not required.
using Ring = std::vector<Point>;

struct Polygon {
  Ring outer;
  std::vector<Ring> holes;
};

// A node's geometry: one or more polygons (GeoJSON Polygon or MultiPolygon).
using MultiPolygon = std::vector<Polygon>;

struct BBox {
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;

  bool intersects(const BBox& o, double pad = 0.0) const {
    return min_x <= o.max_x + pad && o.min_x <= max_x + pad && min_y <= o.max_y + pad &&
           o.min_y <= max_y + pad;
  }
  void expand(const BBox& o);
};

struct Segment {
  Point a;
  Point b;
};

double signed_area(const Ring& ring);

// Area (holes subtracted) and area-weighted centroid.
struct AreaCentroid {
  double area = 0.0;
  Point centroid;
};
AreaCentroid area_centroid(const MultiPolygon& shape);

BBox bbox(const MultiPolygon& shape);

// Returns a human-readable reason when the geometry is empty, has
// non-finite coordinates, degenerate rings, zero area or a self-crossing
// ring; std::nullopt when valid.
std::optional<std::string> validate(const MultiPolygon& shape);

// Every boundary edge of every ring, closing segment included.
std::vector<Segment> boundary_segments(const MultiPolygon& shape);

// Length of the collinear overlap of two segments; 0 if they are not
// collinear within `tolerance` (perpendicular distance).
double collinear_overlap(const Segment& s, const Segment& t, double tolerance);

// Total shared boundary length between two shapes.
double shared_boundary_length(const std::vector<Segment>& a, const std::vector<Segment>& b,
                              double tolerance);

bool contains(const MultiPolygon& shape, Point p);

// Area of shape ∩ axis-aligned rectangle.
double clipped_area(const MultiPolygon& shape, const BBox& rect);

double distance(Point a, Point b);

}  // namespace spu::geom
