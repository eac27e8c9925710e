#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

namespace hopp::features {

struct Point {
  double x = 0.0;
  double y = 0.0;

  Point operator+(Point o) const { return {x + o.x, y + o.y}; }
  Point operator-(Point o) const { return {x - o.x, y - o.y}; }
  Point operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Point&) const = default;
};

double norm(Point p);
double cross(Point a, Point b);

// Closed nuclear boundary. Stored as the distinct points b_1..b_{N-1}; the
// closing point b_N = b_1 is implicit.
class Boundary {
 public:
  // `closed_points` must repeat its first point at the end. Requires at
  // least three distinct points and no self-intersection (InvalidBoundary).
  static Boundary from_closed(std::vector<Point> closed_points);
  // Distinct points only; the closing point is added.
  static Boundary from_ring(std::vector<Point> ring);

  std::span<const Point> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  const Point& operator[](std::size_t i) const { return points_[i % points_.size()]; }

  // Positive for counter-clockwise rings.
  double signed_area() const;

  Boundary reversed() const;
  Boundary translated(Point offset) const;
  Boundary scaled(double factor) const;
  Boundary rotated(double radians) const;
  // Starts the ring at point `shift` without changing the geometry.
  Boundary relabeled(std::size_t shift) const;

 private:
  explicit Boundary(std::vector<Point> ring) : points_(std::move(ring)) {}
  std::vector<Point> points_;
};

enum class PixelClass : std::uint8_t { Outside, Inside, Edge };

// Gray-scale image aligned to a boundary. Pixel (col, row) covers
// [origin.x + col*pitch, +pitch) x [origin.y + row*pitch, +pitch).
struct PixelGrid {
  Point origin;
  double pitch = 1.0;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> intensities;  // row-major
  std::vector<PixelClass> mask;     // from rasterize()

  std::size_t index(std::size_t col, std::size_t row) const { return row * width + col; }
};

// Fills `grid.mask`: pixels holding a boundary sample are Edge, pixels whose
// centre lies inside the ring are Inside.
void rasterize(const Boundary& b, PixelGrid& grid);

// Grid covering the boundary's bounding box with a one-pixel margin;
// intensity(x, y) is sampled at pixel centres.
PixelGrid make_grid(const Boundary& b, double pitch,
                    const std::function<double(double, double)>& intensity);

Point center(const Boundary& b);
double radius(const Boundary& b);
double perimeter(const Boundary& b);
double shoelace_area(const Boundary& b);
// Shoelace area plus half the perimeter (continuous analogue of counting
// half of the boundary pixels, at unit pixel pitch).
double area_analytic(const Boundary& b);
// Inside pixels plus half the edge pixels, in squared length units.
double area_pixels(const PixelGrid& grid);
// Population variance of the Inside pixel intensities.
double texture(const PixelGrid& grid);
double compactness(double perimeter_value, double area_value);
double smoothness(const Boundary& b);

std::size_t default_chord_span(const Boundary& b);
// Area enclosed between sliding chords (b_i, b_{i+span}) and the arc where
// the arc dips inside the chord; overlapping pockets are counted once.
double concavity_area(const Boundary& b, std::size_t chord_span);
// concavity_area normalized by the shoelace area.
double concavity(const Boundary& b, std::size_t chord_span);
// Fraction of boundary points lying strictly inside some chord pocket.
double concave_points(const Boundary& b, std::size_t chord_span);
double symmetry(const Boundary& b, std::size_t n_intervals = 16);

// Divider walk with step `ruler`; nullopt when the ruler exceeds the diameter.
std::optional<double> ruler_perimeter(const Boundary& b, double ruler);
std::vector<double> default_rulers(const Boundary& b);
// |slope| of log P(ruler) against log ruler.
double fractal_dimension(const Boundary& b, std::span<const double> rulers);

struct ExtractionParams {
  std::optional<std::size_t> chord_span;
  std::size_t symmetry_intervals = 16;
  std::vector<double> rulers;  // empty: default_rulers()
};

struct FeatureSet {
  double radius = 0.0;
  std::optional<double> texture;
  double perimeter = 0.0;
  double area = 0.0;
  bool pixel_area = false;
  double compactness = 0.0;
  double smoothness = 0.0;
  double concavity = 0.0;
  double concave_points = 0.0;
  double symmetry = 0.0;
  double fractal_dimension = 0.0;
};

FeatureSet extract_all(const Boundary& b, const PixelGrid* grid,
                       const ExtractionParams& params = {});

void to_json(nlohmann::json& j, const FeatureSet& f);

// Boundary document: {"points": [[x, y], ...], "grid": {...}} where the
// optional grid has origin, pitch, width, height and row-major intensities.
struct BoundaryDocument {
  Boundary boundary;
  std::optional<PixelGrid> grid;
};
BoundaryDocument boundary_from_json(const nlohmann::json& j);
nlohmann::json boundary_to_json(const Boundary& b, const PixelGrid* grid = nullptr);

// Synthetic shapes, counter-clockwise.
namespace fixtures {
Boundary circle(double r, std::size_t n, Point c = {});
Boundary ellipse(double a, double b, std::size_t n, Point c = {});
Boundary square(double side, std::size_t points_per_side);
// Square of side `points_per_side` (unit spacing) with a V notch cut into
// the top edge: `notch_points` consecutive points pushed down, apex at `depth`.
// Notch area is (notch_points + 1) * depth / 2.
Boundary notched_square(std::size_t points_per_side, std::size_t notch_points, double depth);
Boundary koch_snowflake(unsigned iterations, double side = 1.0);
// Quadrilateral with unequal half-widths across its long axis.
Boundary kite(std::size_t points_per_edge);
Boundary star(std::size_t spikes, double outer, double inner, std::size_t points_per_edge);
}  // namespace fixtures

}  // namespace hopp::features
