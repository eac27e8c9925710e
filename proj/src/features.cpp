#include "hopp/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hopp/error.hpp"

namespace hopp::features {

double norm(Point p) { return std::hypot(p.x, p.y); }
double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }

namespace {

double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }

int orientation(Point a, Point b, Point c) {
  const double v = cross(b - a, c - a);
  const double scale = std::max({norm(b - a), norm(c - a), 1e-300});
  if (std::abs(v) <= 1e-12 * scale * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(Point a, Point b, Point p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Point a, Point b, Point c, Point d) {
  const int o1 = orientation(a, b, c), o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a), o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

// Even-odd point-in-polygon on a ring.
bool contains(std::span<const Point> ring, Point p) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = ring[i], b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

// The ring in counter-clockwise order; all features are computed on it so
// orientation never changes a result.
std::vector<Point> ccw_ring(const Boundary& b) {
  std::vector<Point> ring(b.points().begin(), b.points().end());
  if (b.signed_area() < 0) std::reverse(ring.begin(), ring.end());
  return ring;
}

// Parameters t along the line p + t*dir where it crosses the ring's edges.
std::vector<double> line_crossings(std::span<const Point> ring, Point p, Point dir) {
  std::vector<double> ts;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = ring[i], e = ring[(i + 1) % n] - ring[i];
    const double den = cross(dir, e);
    if (std::abs(den) < 1e-15) continue;
    const Point ap = a - p;
    const double t = cross(ap, e) / den;
    const double s = cross(ap, dir) / den;
    // Half-open on the edge so a vertex hit is counted once.
    if (s >= 0.0 && s < 1.0) ts.push_back(t);
  }
  return ts;
}

}  // namespace

Boundary Boundary::from_closed(std::vector<Point> closed_points) {
  if (closed_points.size() < 4) {
    throw Error(ErrorKind::InvalidBoundary, "a closed boundary needs at least 4 points");
  }
  if (!(closed_points.front() == closed_points.back())) {
    throw Error(ErrorKind::InvalidBoundary, "first and last boundary points must coincide");
  }
  closed_points.pop_back();
  return from_ring(std::move(closed_points));
}

Boundary Boundary::from_ring(std::vector<Point> ring) {
  if (ring.size() < 3) throw Error(ErrorKind::InvalidBoundary, "need at least 3 distinct points");
  for (const auto& p : ring) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorKind::InvalidBoundary, "non-finite boundary coordinate");
    }
  }
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (ring[i] == ring[(i + 1) % n]) {
      throw Error(ErrorKind::InvalidBoundary, "repeated consecutive point " + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the closing edge
      if (segments_intersect(ring[i], ring[i + 1], ring[j], ring[(j + 1) % n])) {
        throw Error(ErrorKind::InvalidBoundary, "boundary self-intersects at edges " +
                                                    std::to_string(i) + " and " +
                                                    std::to_string(j));
      }
    }
  }
  Boundary b(std::move(ring));
  if (std::abs(b.signed_area()) <= 0.0) throw Error(ErrorKind::InvalidBoundary, "zero-area boundary");
  return b;
}

double Boundary::signed_area() const {
  double twice = 0.0;
  const std::size_t n = points_.size();
  for (std::size_t i = 0; i < n; ++i) twice += cross(points_[i], points_[(i + 1) % n]);
  return 0.5 * twice;
}

Boundary Boundary::reversed() const {
  std::vector<Point> ring(points_.rbegin(), points_.rend());
  return Boundary(std::move(ring));
}

Boundary Boundary::translated(Point offset) const {
  std::vector<Point> ring = points_;
  for (auto& p : ring) p = p + offset;
  return Boundary(std::move(ring));
}

Boundary Boundary::scaled(double factor) const {
  if (!(factor > 0.0)) throw Error(ErrorKind::InvalidInput, "scale factor must be positive");
  std::vector<Point> ring = points_;
  for (auto& p : ring) p = p * factor;
  return Boundary(std::move(ring));
}

Boundary Boundary::rotated(double radians) const {
  const double c = std::cos(radians), s = std::sin(radians);
  std::vector<Point> ring = points_;
  for (auto& p : ring) p = {c * p.x - s * p.y, s * p.x + c * p.y};
  return Boundary(std::move(ring));
}

Boundary Boundary::relabeled(std::size_t shift) const {
  std::vector<Point> ring = points_;
  std::rotate(ring.begin(), ring.begin() + static_cast<std::ptrdiff_t>(shift % ring.size()),
              ring.end());
  return Boundary(std::move(ring));
}

void rasterize(const Boundary& b, PixelGrid& grid) {
  if (!(grid.pitch > 0.0) || grid.width == 0 || grid.height == 0) {
    throw Error(ErrorKind::InvalidInput, "pixel grid must have positive pitch and size");
  }
  const auto ring = b.points();
  grid.mask.assign(grid.width * grid.height, PixelClass::Outside);
  auto cell = [&](Point p) -> std::optional<std::size_t> {
    const double cx = std::floor((p.x - grid.origin.x) / grid.pitch);
    const double cy = std::floor((p.y - grid.origin.y) / grid.pitch);
    if (cx < 0 || cy < 0 || cx >= static_cast<double>(grid.width) ||
        cy >= static_cast<double>(grid.height)) {
      return std::nullopt;
    }
    return grid.index(static_cast<std::size_t>(cx), static_cast<std::size_t>(cy));
  };
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Point a = ring[i], d = b[i + 1] - a;
    const auto steps = static_cast<std::size_t>(std::ceil(4.0 * norm(d) / grid.pitch)) + 1;
    for (std::size_t k = 0; k < steps; ++k) {
      if (auto c = cell(a + d * (static_cast<double>(k) / static_cast<double>(steps)))) {
        grid.mask[*c] = PixelClass::Edge;
      }
    }
  }
  for (std::size_t row = 0; row < grid.height; ++row) {
    for (std::size_t col = 0; col < grid.width; ++col) {
      auto& m = grid.mask[grid.index(col, row)];
      if (m == PixelClass::Edge) continue;
      const Point centre{grid.origin.x + (static_cast<double>(col) + 0.5) * grid.pitch,
                         grid.origin.y + (static_cast<double>(row) + 0.5) * grid.pitch};
      if (contains(ring, centre)) m = PixelClass::Inside;
    }
  }
}

PixelGrid make_grid(const Boundary& b, double pitch,
                    const std::function<double(double, double)>& intensity) {
  if (!(pitch > 0.0)) throw Error(ErrorKind::InvalidInput, "pitch must be positive");
  double lo_x = INFINITY, lo_y = INFINITY, hi_x = -INFINITY, hi_y = -INFINITY;
  for (const auto& p : b.points()) {
    lo_x = std::min(lo_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_x = std::max(hi_x, p.x);
    hi_y = std::max(hi_y, p.y);
  }
  PixelGrid grid;
  grid.pitch = pitch;
  grid.origin = {std::floor(lo_x / pitch) * pitch - pitch, std::floor(lo_y / pitch) * pitch - pitch};
  grid.width = static_cast<std::size_t>(std::ceil((hi_x - grid.origin.x) / pitch)) + 2;
  grid.height = static_cast<std::size_t>(std::ceil((hi_y - grid.origin.y) / pitch)) + 2;
  grid.intensities.resize(grid.width * grid.height);
  for (std::size_t row = 0; row < grid.height; ++row) {
    for (std::size_t col = 0; col < grid.width; ++col) {
      grid.intensities[grid.index(col, row)] =
          intensity ? intensity(grid.origin.x + (static_cast<double>(col) + 0.5) * pitch,
                                grid.origin.y + (static_cast<double>(row) + 0.5) * pitch)
                    : 0.0;
    }
  }
  rasterize(b, grid);
  return grid;
}

Point center(const Boundary& b) {
  Point sum;
  for (const auto& p : b.points()) sum = sum + p;
  return sum * (1.0 / static_cast<double>(b.size()));
}

double radius(const Boundary& b) {
  const Point c = center(b);
  double sum = 0.0;
  for (const auto& p : b.points()) sum += norm(p - c);
  return sum / static_cast<double>(b.size());
}

double perimeter(const Boundary& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) sum += norm(b[i + 1] - b[i]);
  return sum;
}

double shoelace_area(const Boundary& b) { return std::abs(b.signed_area()); }

double area_analytic(const Boundary& b) { return shoelace_area(b) + 0.5 * perimeter(b); }

double area_pixels(const PixelGrid& grid) {
  if (grid.mask.size() != grid.width * grid.height) {
    throw Error(ErrorKind::InvalidInput, "pixel grid has no boundary mask");
  }
  double count = 0.0;
  for (auto m : grid.mask) {
    if (m == PixelClass::Inside) count += 1.0;
    if (m == PixelClass::Edge) count += 0.5;
  }
  return count * grid.pitch * grid.pitch;
}

double texture(const PixelGrid& grid) {
  if (grid.intensities.size() != grid.mask.size()) {
    throw Error(ErrorKind::InvalidInput, "intensity grid and mask differ in size");
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < grid.mask.size(); ++i) {
    if (grid.mask[i] == PixelClass::Inside) {
      sum += grid.intensities[i];
      ++n;
    }
  }
  if (n == 0) throw Error(ErrorKind::InvalidInput, "no pixels inside the boundary");
  const double mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (std::size_t i = 0; i < grid.mask.size(); ++i) {
    if (grid.mask[i] == PixelClass::Inside) {
      sq += (grid.intensities[i] - mean) * (grid.intensities[i] - mean);
    }
  }
  return sq / static_cast<double>(n);
}

double compactness(double perimeter_value, double area_value) {
  if (!(area_value > 0.0)) throw Error(ErrorKind::InvalidInput, "compactness needs positive area");
  return perimeter_value * perimeter_value / area_value;
}

double smoothness(const Boundary& b) {
  const Point c = center(b);
  double sum = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double r = norm(b[i] - c);
    const double next = norm(b[i + 1] - c);
    sum += std::abs(r - (r + next) / 2.0);
  }
  return sum / perimeter(b);
}

std::size_t default_chord_span(const Boundary& b) {
  return std::max<std::size_t>(2, b.size() / 16);
}

namespace {

void check_span(const Boundary& b, std::size_t span) {
  if (span < 2) throw Error(ErrorKind::InvalidInput, "chord span must be at least 2");
  if (span >= b.size()) throw Error(ErrorKind::InvalidInput, "chord span exceeds boundary size");
}

// Tolerance for "strictly inside a chord", relative to the boundary's size.
double side_tolerance(std::span<const Point> ring) {
  double extent = 0.0;
  for (const auto& p : ring) extent = std::max({extent, std::abs(p.x), std::abs(p.y)});
  return 1e-9 * std::max(extent, 1e-300);
}

// Part of the arc/chord polygon on the interior side (left) of chord a->b.
std::vector<Point> clip_left(const std::vector<Point>& poly, Point a, Point b) {
  const Point d = b - a;
  auto side = [&](Point p) { return cross(d, p - a); };
  std::vector<Point> out;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point p = poly[i], q = poly[(i + 1) % poly.size()];
    const double sp = side(p), sq = side(q);
    if (sp >= 0) out.push_back(p);
    if ((sp >= 0) != (sq >= 0)) out.push_back(p + (q - p) * (sp / (sp - sq)));
  }
  return out;
}

struct Pocket {
  std::vector<Point> polygon;
  std::vector<std::size_t> inside_points;  // ring indices strictly inside
};

std::vector<Pocket> chord_pockets(const std::vector<Point>& ring, std::size_t span) {
  const std::size_t n = ring.size();
  const double tol = side_tolerance(ring);
  std::vector<Pocket> pockets;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = ring[i], b = ring[(i + span) % n];
    const Point d = b - a;
    const double len = norm(d);
    Pocket pocket;
    for (std::size_t k = 1; k < span; ++k) {
      const std::size_t j = (i + k) % n;
      if (cross(d, ring[j] - a) > tol * len) pocket.inside_points.push_back(j);
    }
    if (pocket.inside_points.empty()) continue;
    std::vector<Point> arc;
    for (std::size_t k = 0; k <= span; ++k) arc.push_back(ring[(i + k) % n]);
    pocket.polygon = clip_left(arc, a, b);
    pockets.push_back(std::move(pocket));
  }
  return pockets;
}

}  // namespace

double concavity_area(const Boundary& b, std::size_t chord_span) {
  check_span(b, chord_span);
  const auto ring = ccw_ring(b);
  const auto pockets = chord_pockets(ring, chord_span);
  if (pockets.empty()) return 0.0;

  // Union of pockets on a bitmap; pitch tied to the shape's linear size.
  double lo_x = INFINITY, lo_y = INFINITY, hi_x = -INFINITY, hi_y = -INFINITY;
  for (const auto& p : ring) {
    lo_x = std::min(lo_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_x = std::max(hi_x, p.x);
    hi_y = std::max(hi_y, p.y);
  }
  const double pitch = std::sqrt(shoelace_area(b)) / 256.0;
  const auto width = static_cast<std::size_t>(std::ceil((hi_x - lo_x) / pitch)) + 1;
  const auto height = static_cast<std::size_t>(std::ceil((hi_y - lo_y) / pitch)) + 1;
  std::vector<std::uint8_t> covered(width * height, 0);
  for (const auto& pocket : pockets) {
    double px0 = INFINITY, py0 = INFINITY, px1 = -INFINITY, py1 = -INFINITY;
    for (const auto& p : pocket.polygon) {
      px0 = std::min(px0, p.x);
      py0 = std::min(py0, p.y);
      px1 = std::max(px1, p.x);
      py1 = std::max(py1, p.y);
    }
    const auto c0 = static_cast<std::size_t>(std::max(0.0, std::floor((px0 - lo_x) / pitch)));
    const auto r0 = static_cast<std::size_t>(std::max(0.0, std::floor((py0 - lo_y) / pitch)));
    const auto c1 = std::min(width - 1, static_cast<std::size_t>(std::ceil((px1 - lo_x) / pitch)));
    const auto r1 = std::min(height - 1, static_cast<std::size_t>(std::ceil((py1 - lo_y) / pitch)));
    for (std::size_t r = r0; r <= r1; ++r) {
      for (std::size_t c = c0; c <= c1; ++c) {
        auto& cell = covered[r * width + c];
        if (cell) continue;
        const Point centre{lo_x + (static_cast<double>(c) + 0.5) * pitch,
                           lo_y + (static_cast<double>(r) + 0.5) * pitch};
        if (contains(pocket.polygon, centre)) cell = 1;
      }
    }
  }
  const auto cells = static_cast<double>(std::count(covered.begin(), covered.end(), 1));
  return cells * pitch * pitch;
}

double concavity(const Boundary& b, std::size_t chord_span) {
  return concavity_area(b, chord_span) / shoelace_area(b);
}

double concave_points(const Boundary& b, std::size_t chord_span) {
  check_span(b, chord_span);
  const auto ring = ccw_ring(b);
  std::vector<bool> hit(ring.size(), false);
  for (const auto& pocket : chord_pockets(ring, chord_span)) {
    for (auto j : pocket.inside_points) hit[j] = true;
  }
  return static_cast<double>(std::count(hit.begin(), hit.end(), true)) /
         static_cast<double>(ring.size());
}

double symmetry(const Boundary& b, std::size_t n_intervals) {
  if (n_intervals < 2) throw Error(ErrorKind::InvalidInput, "need at least 2 symmetry intervals");
  const auto ring = ccw_ring(b);
  const Point c = center(b);

  // Major axis: longest chord through the centre over boundary-point directions.
  Point axis{1.0, 0.0};
  double best = -1.0, t_lo = 0.0, t_hi = 0.0;
  for (const auto& p : ring) {
    const double len = norm(p - c);
    if (len == 0.0) continue;
    const Point dir = (p - c) * (1.0 / len);
    const auto ts = line_crossings(ring, c, dir);
    if (ts.empty()) continue;
    const auto [lo, hi] = std::minmax_element(ts.begin(), ts.end());
    if (*hi - *lo > best) {
      best = *hi - *lo;
      axis = dir;
      t_lo = *lo;
      t_hi = *hi;
    }
  }
  if (best <= 0.0) throw Error(ErrorKind::InvalidInput, "no chord through the centre");

  const Point normal{-axis.y, axis.x};
  double diff = 0.0, total = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < n_intervals; ++k) {
    const double t = t_lo + (static_cast<double>(k) + 0.5) * (t_hi - t_lo) /
                                static_cast<double>(n_intervals);
    const auto ts = line_crossings(ring, c + axis * t, normal);
    double side_a = 0.0, side_b = 0.0;
    bool has_a = false, has_b = false;
    for (double s : ts) {
      if (s > 0) {
        side_a = std::max(side_a, s);
        has_a = true;
      } else if (s < 0) {
        side_b = std::max(side_b, -s);
        has_b = true;
      }
    }
    if (!has_a || !has_b) continue;
    diff += std::abs(side_a - side_b);
    total += std::abs(side_a + side_b);
    ++used;
  }
  if (used == 0 || total == 0.0) {
    throw Error(ErrorKind::InvalidInput, "no perpendicular intersects the boundary");
  }
  return diff / total;
}

std::optional<double> ruler_perimeter(const Boundary& b, double ruler) {
  if (!(ruler > 0.0)) throw Error(ErrorKind::InvalidInput, "ruler must be positive");
  const auto ring = ccw_ring(b);
  const std::size_t n = ring.size();
  double diameter = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) diameter = std::max(diameter, norm(ring[i] - ring[j]));
  }
  if (ruler > diameter) return std::nullopt;

  const double r2 = ruler * ruler;
  Point pos = ring[0];
  std::size_t seg = 0;
  double t_start = 0.0;
  std::size_t steps = 0;
  while (true) {
    bool found = false;
    for (std::size_t s = seg; s < n && !found; ++s) {
      const Point a = ring[s], d = ring[(s + 1) % n] - a;
      const Point f = a - pos;
      // |f + t d|^2 = r^2
      const double qa = dot(d, d), qb = 2.0 * dot(f, d), qc = dot(f, f) - r2;
      const double disc = qb * qb - 4.0 * qa * qc;
      if (disc < 0.0) continue;
      const double sq = std::sqrt(disc);
      // Hits exactly on a vertex come out a rounding error either side of the
      // segment ends, so later segments accept a small negative t.
      constexpr double kTol = 1e-9;
      const double lo = s == seg ? t_start + kTol : -kTol;
      for (double t : {(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)}) {
        if (t > lo && t <= 1.0 + kTol) {
          t = std::clamp(t, 0.0, 1.0);
          pos = a + d * t;
          seg = s;
          t_start = t;
          found = true;
          break;
        }
      }
    }
    if (!found) break;
    ++steps;
  }
  return static_cast<double>(steps) * ruler + norm(ring[0] - pos);
}

std::vector<double> default_rulers(const Boundary& b) {
  const double spacing = perimeter(b) / static_cast<double>(b.size());
  const double lo = 2.0 * spacing;
  const double hi = std::max(radius(b) / 2.0, 4.0 * lo);
  std::vector<double> rulers;
  constexpr std::size_t kCount = 6;
  for (std::size_t k = 0; k < kCount; ++k) {
    rulers.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / (kCount - 1)));
  }
  return rulers;
}

double fractal_dimension(const Boundary& b, std::span<const double> rulers) {
  if (rulers.size() < 3) throw Error(ErrorKind::InvalidInput, "need at least 3 ruler sizes");
  std::vector<double> xs, ys;
  for (double r : rulers) {
    if (auto p = ruler_perimeter(b, r)) {
      xs.push_back(std::log(r));
      ys.push_back(std::log(*p));
    }
  }
  if (xs.size() < 3) throw Error(ErrorKind::InvalidInput, "fewer than 3 usable rulers");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ys[i] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return std::abs(sxy / sxx);
}

FeatureSet extract_all(const Boundary& b, const PixelGrid* grid, const ExtractionParams& params) {
  FeatureSet f;
  f.radius = radius(b);
  f.perimeter = perimeter(b);
  if (grid) {
    f.texture = texture(*grid);
    f.area = area_pixels(*grid);
    f.pixel_area = true;
  } else {
    f.area = area_analytic(b);
  }
  f.compactness = compactness(f.perimeter, f.area);
  f.smoothness = smoothness(b);
  const std::size_t span = params.chord_span.value_or(default_chord_span(b));
  f.concavity = concavity(b, span);
  f.concave_points = concave_points(b, span);
  f.symmetry = symmetry(b, params.symmetry_intervals);
  const auto rulers = params.rulers.empty() ? default_rulers(b) : params.rulers;
  f.fractal_dimension = fractal_dimension(b, rulers);
  return f;
}

void to_json(nlohmann::json& j, const FeatureSet& f) {
  j = {{"radius", f.radius},
       {"texture", f.texture ? nlohmann::json(*f.texture) : nlohmann::json(nullptr)},
       {"perimeter", f.perimeter},
       {"area", f.area},
       {"area_mode", f.pixel_area ? "pixels" : "analytic"},
       {"compactness", f.compactness},
       {"smoothness", f.smoothness},
       {"concavity", f.concavity},
       {"concave_points", f.concave_points},
       {"symmetry", f.symmetry},
       {"fractal_dimension", f.fractal_dimension}};
}

BoundaryDocument boundary_from_json(const nlohmann::json& j) {
  try {
    std::vector<Point> pts;
    for (const auto& p : j.at("points")) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    const bool closed = pts.size() > 1 && pts.front() == pts.back();
    BoundaryDocument doc{closed ? Boundary::from_closed(std::move(pts))
                                : Boundary::from_ring(std::move(pts)),
                         std::nullopt};
    if (j.contains("grid") && !j.at("grid").is_null()) {
      const auto& g = j.at("grid");
      PixelGrid grid;
      grid.origin = {g.at("origin").at(0).get<double>(), g.at("origin").at(1).get<double>()};
      grid.pitch = g.value("pitch", 1.0);
      grid.width = g.at("width").get<std::size_t>();
      grid.height = g.at("height").get<std::size_t>();
      grid.intensities = g.at("intensities").get<std::vector<double>>();
      if (grid.intensities.size() != grid.width * grid.height) {
        throw Error(ErrorKind::InvalidInput, "grid intensities must have width*height entries");
      }
      rasterize(doc.boundary, grid);
      doc.grid = std::move(grid);
    }
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("boundary document: ") + e.what());
  }
}

nlohmann::json boundary_to_json(const Boundary& b, const PixelGrid* grid) {
  nlohmann::json j;
  auto& pts = j["points"] = nlohmann::json::array();
  for (const auto& p : b.points()) pts.push_back({p.x, p.y});
  pts.push_back({b[0].x, b[0].y});
  if (grid) {
    j["grid"] = {{"origin", {grid->origin.x, grid->origin.y}},
                 {"pitch", grid->pitch},
                 {"width", grid->width},
                 {"height", grid->height},
                 {"intensities", grid->intensities}};
  }
  return j;
}

namespace fixtures {

namespace {
void append_edge(std::vector<Point>& ring, Point a, Point b, std::size_t pieces) {
  for (std::size_t k = 0; k < pieces; ++k) {
    ring.push_back(a + (b - a) * (static_cast<double>(k) / static_cast<double>(pieces)));
  }
}

Boundary polygon(const std::vector<Point>& corners, std::size_t points_per_edge) {
  std::vector<Point> ring;
  for (std::size_t i = 0; i < corners.size(); ++i) {
    append_edge(ring, corners[i], corners[(i + 1) % corners.size()], points_per_edge);
  }
  return Boundary::from_ring(std::move(ring));
}
}  // namespace

Boundary circle(double r, std::size_t n, Point c) { return ellipse(r, r, n, c); }

Boundary ellipse(double a, double b, std::size_t n, Point c) {
  std::vector<Point> ring;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    ring.push_back({c.x + a * std::cos(t), c.y + b * std::sin(t)});
  }
  return Boundary::from_ring(std::move(ring));
}

Boundary square(double side, std::size_t points_per_side) {
  return polygon({{0, 0}, {side, 0}, {side, side}, {0, side}}, points_per_side);
}

Boundary notched_square(std::size_t points_per_side, std::size_t notch_points, double depth) {
  if (notch_points + 2 > points_per_side) {
    throw Error(ErrorKind::InvalidInput, "notch wider than the square edge");
  }
  const auto side = static_cast<double>(points_per_side);
  std::vector<Point> ring;
  append_edge(ring, {0, 0}, {side, 0}, points_per_side);
  append_edge(ring, {side, 0}, {side, side}, points_per_side);
  // Top edge runs right to left; notch centred on it.
  const std::size_t first = (points_per_side - notch_points) / 2;
  const double half = static_cast<double>(notch_points + 1) / 2.0;
  for (std::size_t k = 0; k < points_per_side; ++k) {
    double y = side;
    if (k >= first && k < first + notch_points) {
      const double pos = static_cast<double>(k - first + 1);
      y -= depth * (1.0 - std::abs(pos - half) / half);
    }
    ring.push_back({side - static_cast<double>(k), y});
  }
  append_edge(ring, {0, side}, {0, 0}, points_per_side);
  return Boundary::from_ring(std::move(ring));
}

Boundary koch_snowflake(unsigned iterations, double side) {
  std::vector<Point> ring = {{0, 0}, {side, 0}, {side / 2, side * std::sqrt(3.0) / 2}};
  const double c = 0.5, s = -std::sqrt(3.0) / 2;  // rotate by -60 degrees: outward for CCW
  for (unsigned it = 0; it < iterations; ++it) {
    std::vector<Point> next;
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const Point a = ring[i], b = ring[(i + 1) % ring.size()];
      const Point d = (b - a) * (1.0 / 3.0);
      const Point p1 = a + d, p3 = a + d * 2.0;
      const Point peak = p1 + Point{c * d.x - s * d.y, s * d.x + c * d.y};
      next.insert(next.end(), {a, p1, peak, p3});
    }
    ring = std::move(next);
  }
  return Boundary::from_ring(std::move(ring));
}

Boundary kite(std::size_t points_per_edge) {
  return polygon({{-3, 0}, {0, -1}, {4, 0}, {0, 2}}, points_per_edge);
}

Boundary star(std::size_t spikes, double outer, double inner, std::size_t points_per_edge) {
  std::vector<Point> corners;
  for (std::size_t k = 0; k < 2 * spikes; ++k) {
    const double t = std::numbers::pi * static_cast<double>(k) / static_cast<double>(spikes);
    const double r = k % 2 == 0 ? outer : inner;
    corners.push_back({r * std::cos(t), r * std::sin(t)});
  }
  return polygon(corners, points_per_edge);
}

}  // namespace fixtures

}  // namespace hopp::features
