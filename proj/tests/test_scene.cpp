#include <doctest.h>

#include <cmath>
#include <set>

#include "riscim/rng.hpp"
#include "riscim/scene.hpp"

using namespace riscim;

TEST_CASE("default scene matches the reference configuration") {
  const Scene scene = Scene::build(SceneConfig{});
  CHECK(scene.panel_count(Side::Tx) == 6);
  CHECK(scene.panel_count(Side::Rx) == 6);
  CHECK(scene.element_count(Side::Tx) == 2400);
  CHECK(scene.element_count(Side::Rx) == 2400);
  CHECK(scene.panels().size() == 12);
  CHECK(scene.frequencies().size() == 5);
  CHECK(scene.frequencies().front() == doctest::Approx(5.9e9));
  CHECK(scene.frequencies().back() == doctest::Approx(6.1e9));
  CHECK(scene.antenna(Side::Tx).isApprox(Vec3(0, -3, 3)));

  // 20 elements at 2 cm pitch -> 0.4 m panel on each side
  const RisPanel& p = scene.panels().front();
  CHECK(p.width() == doctest::Approx(0.4));
  CHECK(p.height() == doctest::Approx(0.4));

  // whole array centered on the origin, panels in the z = 0 plane
  Vec3 mean = Vec3::Zero();
  for (const RisPanel& q : scene.panels()) {
    mean += q.center;
    CHECK(q.center.z() == 0.0);
  }
  mean /= static_cast<double>(scene.panels().size());
  CHECK(mean.norm() < 1e-12);

  // gaps are zero: neighbour panel centers inside a block are one panel
  // extent apart
  const auto tx = scene.side_panels(Side::Tx);
  std::set<double> xs, ys;
  for (const RisPanel* q : tx) {
    xs.insert(q->center.x());
    ys.insert(q->center.y());
  }
  REQUIRE(xs.size() == 2);
  REQUIRE(ys.size() == 3);
  CHECK(*std::next(xs.begin()) - *xs.begin() == doctest::Approx(0.4));
  CHECK(*std::next(ys.begin()) - *ys.begin() == doctest::Approx(0.4));
  CHECK(scene.block_center(Side::Tx).x() == doctest::Approx(-0.4));
  CHECK(scene.block_center(Side::Rx).x() == doctest::Approx(0.4));
}

TEST_CASE("single 1x1 panel puts its element at the panel center") {
  SceneConfig cfg;
  cfg.panel_rows = 1;
  cfg.panel_cols = 1;
  cfg.tx_grid_rows = 1;
  cfg.tx_grid_cols = 1;
  cfg.rx_grid_rows = 1;
  cfg.rx_grid_cols = 1;
  const Scene scene = Scene::build(cfg);
  REQUIRE(scene.element_count(Side::Tx) == 1);
  CHECK(scene.elements(Side::Tx)[0].isApprox(scene.panels()[0].center));
}

TEST_CASE("2x2 panel pairwise element distances are s and s*sqrt(2)") {
  RisPanel p;
  p.rows = 2;
  p.cols = 2;
  p.spacing = 0.02;
  std::vector<Vec3> e;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) e.push_back(p.element_position(r, c));
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t j = i + 1; j < e.size(); ++j) {
      const double d = (e[i] - e[j]).norm();
      const bool ok = std::abs(d - 0.02) < 1e-15 ||
                      std::abs(d - 0.02 * std::sqrt(2.0)) < 1e-15;
      CHECK(ok);
    }
  }
}

TEST_CASE("scene construction is reproducible bit for bit") {
  const Scene a = Scene::build(SceneConfig{});
  const Scene b = Scene::build(SceneConfig{});
  REQUIRE(a.elements(Side::Tx).size() == b.elements(Side::Tx).size());
  for (std::size_t i = 0; i < a.elements(Side::Tx).size(); ++i)
    CHECK(a.elements(Side::Tx)[i] == b.elements(Side::Tx)[i]);
}

TEST_CASE("scene config validation") {
  SceneConfig cfg;
  SUBCASE("empty frequency list") {
    cfg.frequencies.clear();
    CHECK_THROWS_AS(Scene::build(cfg), ConfigError);
  }
  SUBCASE("non-increasing frequencies") {
    cfg.frequencies = {6.0e9, 5.9e9};
    CHECK_THROWS_AS(Scene::build(cfg), ConfigError);
  }
  SUBCASE("zero frequency") {
    cfg.frequencies = {0.0, 6e9};
    CHECK_THROWS_AS(Scene::build(cfg), ConfigError);
  }
  SUBCASE("ROI intersecting the aperture plane") {
    cfg.roi.center = Vec3(0, 1.9, 0.0);
    CHECK_THROWS_AS(Scene::build(cfg), ConfigError);
  }
  SUBCASE("3-D ROI straddling the aperture plane") {
    cfg.roi.center = Vec3(0, 1.9, 0.5);
    cfg.roi.extent_z = 2.0;
    CHECK_THROWS_AS(Scene::build(cfg), ConfigError);
  }
  SUBCASE("non-positive spacing") {
    cfg.element_spacing = 0.0;
    CHECK_THROWS_AS(Scene::build(cfg), ConfigError);
  }
}

TEST_CASE("paper target: nine unit scatterers on the 0.5 m grid at z = 8 m") {
  const TargetMap t = paper_target();
  REQUIRE(t.scatterers.size() == 9);
  bool has_center = false;
  double max_dx = 0.0;
  for (const Scatterer& s : t.scatterers) {
    CHECK(s.reflectivity == Complex(1.0, 0.0));
    CHECK(s.position.z() == 8.0);
    if (s.position.isApprox(Vec3(0, 1.9, 8))) has_center = true;
    for (const Scatterer& u : t.scatterers)
      max_dx = std::max(max_dx, std::abs(s.position.x() - u.position.x()));
  }
  CHECK(has_center);
  CHECK(max_dx == doctest::Approx(1.0));
}

TEST_CASE("clutter bookkeeping is invertible") {
  const TargetMap t = paper_target();
  const TargetMap c = add_clutter(t, 5.0);
  REQUIRE(c.scatterers.size() == 10);
  CHECK(c.scatterers.back().position.isApprox(Vec3(0, 5, 8)));
  const TargetMap back = remove_clutter(c);
  REQUIRE(back.scatterers.size() == t.scatterers.size());
  for (std::size_t i = 0; i < t.scatterers.size(); ++i)
    CHECK(back.scatterers[i].position == t.scatterers[i].position);
}

TEST_CASE("steering_to_point basics") {
  const SteerAngles on_axis = steering_to_point(Vec3(0, 0, 0), Vec3(0, 0, 5));
  CHECK(on_axis.theta == doctest::Approx(0.0));
  CHECK_THROWS_AS(steering_to_point(Vec3(0, 0, 0), Vec3(1, 1, 0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(steering_to_point(Vec3(0, 0, 0), Vec3(1, 1, -2)),
                  std::invalid_argument);
}

namespace {

// Independent oracle: brute-force angle extremes over a dense ROI sample.
struct BruteBounds {
  double tmin = 1e300, tmax = -1e300, pmin = 1e300, pmax = -1e300;
};

BruteBounds brute_force_bounds(const Vec3& ref, const RoiBox& roi, int n) {
  BruteBounds b;
  const double base_phi = steering_to_point(ref, roi.center).phi;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = roi.x_min() + roi.extent_x * i / (n - 1);
      const double y = roi.y_min() + roi.extent_y * j / (n - 1);
      const SteerAngles a = steering_to_point(ref, Vec3(x, y, roi.center.z()));
      const double phi = base_phi + wrap_phase(a.phi - base_phi);
      b.tmin = std::min(b.tmin, a.theta);
      b.tmax = std::max(b.tmax, a.theta);
      b.pmin = std::min(b.pmin, phi);
      b.pmax = std::max(b.pmax, phi);
    }
  }
  return b;
}

}  // namespace

TEST_CASE("angle_bounds matches a brute-force oracle on the default scene") {
  const Scene scene = Scene::build(SceneConfig{});
  // the reference case: 2 m x 2 m ROI at z = 8 m centered on (0, 1.9)
  RoiBox roi;
  roi.center = Vec3(0, 1.9, 8);
  roi.extent_x = 2.0;
  roi.extent_y = 2.0;
  for (const RisPanel& p : scene.panels()) {
    const AngleBounds b = angle_bounds(p, roi);
    const BruteBounds bf = brute_force_bounds(p.center, roi, 100);  // 10^4 pts
    const double slack_t = 0.02 * b.theta_span() + 1e-9;
    const double slack_p = 0.02 * b.phi_span() + 1e-9;
    // sampled extremes lie inside the closed-form interval and reach it
    CHECK(bf.tmin >= b.theta_min - 1e-12);
    CHECK(bf.tmax <= b.theta_max + 1e-12);
    CHECK(bf.pmin >= b.phi_min - 1e-12);
    CHECK(bf.pmax <= b.phi_max + 1e-12);
    CHECK(bf.tmin <= b.theta_min + slack_t);
    CHECK(bf.tmax >= b.theta_max - slack_t);
    CHECK(bf.pmin <= b.phi_min + slack_p);
    CHECK(bf.pmax >= b.phi_max - slack_p);
  }
}

TEST_CASE("angle_bounds containment and monotonicity properties") {
  const Scene scene = Scene::build(SceneConfig{});
  const RisPanel& panel = scene.panels()[0];
  Rng rng(42);
  RoiBox roi = scene.roi();
  for (int trial = 0; trial < 20; ++trial) {
    const AngleBounds b = angle_bounds(panel, roi);
    // every sampled ROI point's angles stay inside the bounds
    for (int s = 0; s < 200; ++s) {
      const double x = rng.uniform(roi.x_min(), roi.x_max());
      const double y = rng.uniform(roi.y_min(), roi.y_max());
      const SteerAngles a =
          steering_to_point(panel.center, Vec3(x, y, roi.center.z()));
      CHECK(b.contains(a, 1e-9));
    }
    // enlarging the ROI never shrinks any interval
    RoiBox bigger = roi;
    bigger.extent_x += rng.uniform(0.0, 1.0);
    bigger.extent_y += rng.uniform(0.0, 1.0);
    const AngleBounds b2 = angle_bounds(panel, bigger);
    CHECK(b2.theta_min <= b.theta_min + 1e-12);
    CHECK(b2.theta_max >= b.theta_max - 1e-12);
    CHECK(b2.phi_min <= b.phi_min + 1e-12);
    CHECK(b2.phi_max >= b.phi_max - 1e-12);
    roi = bigger;
  }
}

TEST_CASE("angle_bounds limit and degenerate cases") {
  const Scene scene = Scene::build(SceneConfig{});
  const RisPanel& panel = scene.panels()[0];

  SUBCASE("point-like ROI collapses the intervals") {
    RoiBox tiny;
    tiny.center = Vec3(0.3, 1.7, 8);
    tiny.extent_x = 1e-9;
    tiny.extent_y = 1e-9;
    const AngleBounds b = angle_bounds(panel, tiny);
    CHECK(b.theta_span() < 1e-8);
    CHECK(b.phi_span() < 1e-8);
    CHECK(b.base_theta == doctest::Approx(b.theta_min).epsilon(1e-9));
  }
  SUBCASE("phi interval symmetric for an x-symmetric ROI") {
    RoiBox roi;
    roi.center = Vec3(panel.center.x(), 1.9, 8);
    roi.extent_x = 2;
    roi.extent_y = 2;
    const AngleBounds b = angle_bounds(panel, roi);
    // the ROI center sits at azimuth -pi/2 as seen from this panel
    CHECK((b.phi_min + b.phi_max) / 2 == doctest::Approx(-kPi / 2).epsilon(1e-9));
  }
  SUBCASE("boresight axis through the ROI is rejected") {
    RoiBox above;
    above.center = Vec3(panel.center.x(), panel.center.y(), 8);
    above.extent_x = 1;
    above.extent_y = 1;
    CHECK_THROWS_AS(angle_bounds(panel, above), std::invalid_argument);
  }
  SUBCASE("ROI in the panel plane is rejected") {
    RoiBox flat;
    flat.center = Vec3(0, 5, 0);
    CHECK_THROWS_AS(angle_bounds(panel, flat), std::invalid_argument);
  }
  SUBCASE("3-D ROI bounds contain both face bounds") {
    RoiBox box;
    box.center = Vec3(0.5, 1.9, 8);
    box.extent_x = 2;
    box.extent_y = 2;
    box.extent_z = 1;
    const AngleBounds b3 = angle_bounds(panel, box);
    for (double z : {7.5, 8.5}) {
      RoiBox face = box;
      face.center.z() = z;
      face.extent_z = 0;
      const AngleBounds bf = angle_bounds(panel, face);
      CHECK(b3.theta_min <= bf.theta_min + 1e-12);
      CHECK(b3.theta_max >= bf.theta_max - 1e-12);
    }
  }
}
