#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hopp/features.hpp"
#include "test_util.hpp"

using namespace hopp;
using namespace hopp::features;
namespace fx = hopp::features::fixtures;

namespace {

constexpr double kPi = std::numbers::pi;

Boundary unit_square() { return Boundary::from_ring({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

std::vector<Boundary> shapes() {
  return {fx::circle(3, 200),         fx::ellipse(5, 2, 300),    fx::notched_square(40, 7, 4),
          fx::kite(30),               fx::star(6, 5, 2, 12),      fx::koch_snowflake(3, 30)};
}

void check_same_features(const FeatureSet& a, const FeatureSet& b, double tol) {
  CHECK(a.radius == doctest::Approx(b.radius).epsilon(tol));
  CHECK(a.perimeter == doctest::Approx(b.perimeter).epsilon(tol));
  CHECK(a.area == doctest::Approx(b.area).epsilon(tol));
  CHECK(a.compactness == doctest::Approx(b.compactness).epsilon(tol));
  CHECK(std::abs(a.smoothness - b.smoothness) <= tol * std::max(1.0, b.smoothness));
  CHECK(std::abs(a.concavity - b.concavity) <= tol * std::max(1.0, b.concavity));
  CHECK(std::abs(a.concave_points - b.concave_points) <= tol);
  CHECK(std::abs(a.symmetry - b.symmetry) <= tol * std::max(1.0, b.symmetry));
  CHECK(std::abs(a.fractal_dimension - b.fractal_dimension) <= tol);
}

}  // namespace

TEST_CASE("boundary validation") {
  CHECK(kind_of([] { Boundary::from_closed({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }) ==
        ErrorKind::InvalidBoundary);
  CHECK_NOTHROW(Boundary::from_closed({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}}));
  CHECK(kind_of([] { Boundary::from_ring({{0, 0}, {1, 0}}); }) == ErrorKind::InvalidBoundary);
  CHECK(kind_of([] { Boundary::from_ring({{0, 0}, {1, 1}, {2, 2}}); }) ==
        ErrorKind::InvalidBoundary);
  CHECK(kind_of([] { Boundary::from_ring({{0, 0}, {1, 1}, {1, 0}, {0, 1}}); }) ==
        ErrorKind::InvalidBoundary);
  CHECK(kind_of([] { Boundary::from_ring({{0, 0}, {1, 0}, {1, 0}, {0, 1}}); }) ==
        ErrorKind::InvalidBoundary);
  CHECK(kind_of([] { Boundary::from_ring({{0, 0}, {NAN, 0}, {0, 1}}); }) ==
        ErrorKind::InvalidBoundary);
  const auto sliver = Boundary::from_ring({{0, 0}, {10, 0}, {5, 1e-6}});
  CHECK(shoelace_area(sliver) > 0);
}

TEST_CASE("center") {
  const auto c = center(unit_square());
  CHECK(c.x == 0.5);
  CHECK(c.y == 0.5);
  const auto poly = fx::circle(2, 17, {3, -4});
  CHECK(std::abs(center(poly).x - 3) < 1e-12);
  CHECK(std::abs(center(poly).y + 4) < 1e-12);
  const auto moved = center(poly.translated({1, 2}));
  CHECK(std::abs(moved.x - 4) < 1e-12);
  CHECK(std::abs(moved.y + 2) < 1e-12);
}

TEST_CASE("radius") {
  CHECK(std::abs(radius(fx::circle(2, 360)) - 2.0) < 1e-6);
  CHECK(radius(unit_square()) == doctest::Approx(std::sqrt(2.0) / 2));
  const auto k = fx::kite(10);
  CHECK(radius(k.scaled(3)) == doctest::Approx(3 * radius(k)).epsilon(1e-12));
}

TEST_CASE("perimeter") {
  CHECK(perimeter(unit_square()) == doctest::Approx(4.0));
  CHECK(std::abs(perimeter(fx::circle(1, 360)) - 2 * kPi) < 1e-3);
  const auto s = fx::star(5, 4, 1, 6);
  CHECK(perimeter(s.reversed()) == doctest::Approx(perimeter(s)).epsilon(1e-14));
}

TEST_CASE("area in both modes") {
  const auto square = fx::square(100, 100);
  CHECK(shoelace_area(square) == doctest::Approx(1e4));
  CHECK(area_analytic(square) == doctest::Approx(1e4 + 200));

  auto grid = make_grid(square, 0.5, [](double, double) { return 1.0; });
  rasterize(square, grid);
  CHECK(std::abs(area_pixels(grid) - 1e4) < 0.02 * 1e4);
  auto unit = make_grid(square, 1.0, [](double, double) { return 1.0; });
  rasterize(square, unit);
  CHECK(std::abs(area_pixels(unit) - area_analytic(square)) < 0.02 * area_analytic(square));
}

TEST_CASE("texture") {
  const auto c = fx::circle(20, 200);
  auto flat = make_grid(c, 1.0, [](double, double) { return 7.0; });
  rasterize(c, flat);
  CHECK(texture(flat) == 0.0);

  auto two = make_grid(c, 1.0, [](double x, double) { return std::floor(x) ? 0.0 : 0.0; });
  rasterize(c, two);
  std::size_t k = 0;
  for (std::size_t i = 0; i < two.mask.size(); ++i) {
    if (two.mask[i] == PixelClass::Inside) two.intensities[i] = (k++ % 2) ? 2.0 : 0.0;
  }
  REQUIRE(k % 2 == 0);
  CHECK(texture(two) == doctest::Approx(1.0));

  auto ramp = make_grid(c, 1.0, [](double x, double y) { return x * 0.3 + y * y * 0.01; });
  rasterize(c, ramp);
  auto shifted = ramp;
  for (double& v : shifted.intensities) v += 40.0;
  CHECK(texture(shifted) == doctest::Approx(texture(ramp)).epsilon(1e-9));

  PixelGrid empty;
  empty.width = 2;
  empty.height = 2;
  empty.intensities.assign(4, 1.0);
  empty.mask.assign(4, PixelClass::Outside);
  CHECK(kind_of([&] { texture(empty); }) == ErrorKind::InvalidInput);
}

TEST_CASE("compactness") {
  CHECK(compactness(4, 1) == 16.0);
  const auto sq = unit_square();
  CHECK(compactness(perimeter(sq), shoelace_area(sq)) == 16.0);
  const auto c = fx::circle(50, 2000);
  CHECK(std::abs(compactness(perimeter(c), shoelace_area(c)) / (4 * kPi) - 1) < 0.02);
  const auto star = fx::star(6, 5, 2, 1);
  const auto hull = fx::circle(5, 6);
  CHECK(compactness(perimeter(star), shoelace_area(star)) >
        compactness(perimeter(hull), shoelace_area(hull)));
  CHECK(kind_of([] { compactness(4, 0); }) == ErrorKind::InvalidInput);
}

TEST_CASE("smoothness") {
  CHECK(smoothness(fx::circle(4, 64)) < 1e-12);
  auto wavy = [](double delta) {
    std::vector<Point> ring;
    for (int i = 0; i < 400; ++i) {
      const double r = i % 2 ? 1.0 + delta : 1.0;
      const double t = 2 * kPi * i / 400;
      ring.push_back({r * std::cos(t), r * std::sin(t)});
    }
    return Boundary::from_ring(ring);
  };
  // Radii alternate about the origin, so sum |r_i - r_{i+1}| / 2 = 200 delta exactly.
  for (double delta : {0.001, 0.002, 0.004, 0.01}) {
    const auto b = wavy(delta);
    CHECK(smoothness(b) * perimeter(b) == doctest::Approx(200 * delta).epsilon(1e-9));
  }
  CHECK(smoothness(wavy(0.002)) > smoothness(wavy(0.001)));
  const auto s = fx::star(7, 3, 1.5, 5);
  for (std::size_t shift : {1, 5, 22}) {
    CHECK(smoothness(s.relabeled(shift)) == doctest::Approx(smoothness(s)).epsilon(1e-12));
  }
}

TEST_CASE("concavity on convex shapes is zero") {
  for (const auto& b : {fx::circle(10, 300), fx::square(8, 12), fx::ellipse(6, 2, 150)}) {
    CHECK(concavity(b, default_chord_span(b)) < 1e-9);
    CHECK(concave_points(b, default_chord_span(b)) == 0.0);
  }
}

TEST_CASE("a V notch of known area") {
  const auto b = fx::notched_square(40, 7, 4.0);
  const double notch_area = (7 + 1) * 4.0 / 2;
  CHECK(shoelace_area(b) == doctest::Approx(1600 - notch_area));
  const double measured = concavity_area(b, 12);
  CHECK(std::abs(measured - notch_area) < 0.1 * notch_area);
  CHECK(concavity(b, 12) == doctest::Approx(measured / shoelace_area(b)));

  double previous = 0;
  for (double depth : {1.0, 2.0, 3.0, 4.0, 5.0}) {
    const double v = concavity(fx::notched_square(40, 7, depth), 12);
    CHECK(v > previous);
    previous = v;
  }
}

TEST_CASE("concave points of one notch") {
  const auto b = fx::notched_square(40, 5, 3.0);
  const double x8 = concave_points(b, 10);
  CHECK(x8 == doctest::Approx(5.0 / static_cast<double>(b.size())));
  for (const auto& s : shapes()) {
    const auto span = default_chord_span(s);
    if (concavity(s, span) > 0) CHECK(concave_points(s, span) > 0);
  }
}

TEST_CASE("chord span validation") {
  CHECK(default_chord_span(fx::circle(1, 20)) == 2);
  CHECK(default_chord_span(fx::circle(1, 320)) == 20);
  CHECK(kind_of([] { concavity(fx::circle(1, 20), 1); }) == ErrorKind::InvalidInput);
}

TEST_CASE("symmetry") {
  CHECK(symmetry(fx::ellipse(5, 2, 400)) < 1e-6);
  CHECK(symmetry(fx::circle(3, 360)) < 1e-6);
  const auto kite = fx::kite(40);
  const double k = symmetry(kite);
  CHECK(k > 0.01);
  for (double angle : {0.3, 1.1, 2.9}) {
    CHECK(std::abs(symmetry(kite.rotated(angle)) - k) < 1e-6);
  }
  CHECK(kind_of([&] { symmetry(kite, 1); }) == ErrorKind::InvalidInput);
}

TEST_CASE("fractal dimension") {
  const auto c = fx::circle(10, 2000);
  CHECK(fractal_dimension(c, default_rulers(c)) < 0.05);
  const auto koch = fx::koch_snowflake(4, 1.0);
  const double d = fractal_dimension(koch, default_rulers(koch));
  CHECK(std::abs(d - (std::log(4.0) / std::log(3.0) - 1)) < 0.05);

  const auto rulers = default_rulers(koch);
  std::vector<double> scaled_rulers;
  for (double r : rulers) scaled_rulers.push_back(r * 7.5);
  CHECK(std::abs(fractal_dimension(koch.scaled(7.5), scaled_rulers) - d) < 1e-6);

  CHECK_FALSE(ruler_perimeter(c, 100.0).has_value());
  CHECK(ruler_perimeter(c, 0.5).has_value());
  CHECK(kind_of([&] { fractal_dimension(c, std::vector<double>{1.0, 2.0}); }) ==
        ErrorKind::InvalidInput);
}

TEST_CASE("feature invariances") {
  for (const auto& b : shapes()) {
    const auto base = extract_all(b, nullptr);
    check_same_features(extract_all(b.translated({123.5, -77.25}), nullptr), base, 1e-9);
    check_same_features(extract_all(b.reversed(), nullptr), base, 1e-9);

    const double s = 3.0;
    const auto big = b.scaled(s);
    ExtractionParams scaled_params;
    for (double r : default_rulers(b)) scaled_params.rulers.push_back(r * s);
    const auto f = extract_all(big, nullptr, scaled_params);
    CHECK(f.radius == doctest::Approx(s * base.radius).epsilon(1e-12));
    CHECK(f.perimeter == doctest::Approx(s * base.perimeter).epsilon(1e-12));
    CHECK(f.area - f.perimeter / 2 ==
          doctest::Approx(s * s * (base.area - base.perimeter / 2)).epsilon(1e-10));
    CHECK(shoelace_area(big) / (f.perimeter * f.perimeter) ==
          doctest::Approx(shoelace_area(b) / (base.perimeter * base.perimeter)).epsilon(1e-10));
    CHECK(std::abs(f.smoothness - base.smoothness) < 1e-9);
    CHECK(std::abs(f.concavity - base.concavity) < 1e-3);
    CHECK(std::abs(f.concave_points - base.concave_points) < 1e-9);
    CHECK(std::abs(f.symmetry - base.symmetry) < 1e-9);
    CHECK(std::abs(f.fractal_dimension - base.fractal_dimension) < 1e-6);
  }
}

TEST_CASE("isoperimetric bound on fine polygons") {
  for (const auto& b : shapes()) {
    CHECK(compactness(perimeter(b), shoelace_area(b)) >= 4 * kPi * 0.98);
  }
}

TEST_CASE("extract_all on a fine circle") {
  const auto c = fx::circle(20, 2000);
  const auto f = extract_all(c, nullptr);
  CHECK_FALSE(f.texture.has_value());
  CHECK_FALSE(f.pixel_area);
  CHECK(f.smoothness < 1e-9);
  CHECK(f.concavity == 0.0);
  CHECK(f.symmetry < 1e-6);

  auto grid = make_grid(c, 0.25, [](double x, double) { return x; });
  const auto g = extract_all(c, &grid);
  CHECK(g.texture.has_value());
  CHECK(g.pixel_area);
  CHECK(std::abs(g.area - kPi * 400) < 0.02 * kPi * 400);
}

TEST_CASE("boundary documents round-trip") {
  const auto b = fx::kite(5);
  auto grid = make_grid(b, 0.5, [](double x, double y) { return x + y; });
  const auto doc = boundary_from_json(boundary_to_json(b, &grid));
  REQUIRE(doc.grid.has_value());
  CHECK(doc.boundary.size() == b.size());
  CHECK(doc.grid->width == grid.width);
  CHECK(doc.grid->intensities == grid.intensities);
  CHECK(doc.boundary.points()[3] == b.points()[3]);

  CHECK(kind_of([] { boundary_from_json(nlohmann::json::parse(R"({"points": [[0, 0], [1]]})")); }) ==
        ErrorKind::Parse);
}
