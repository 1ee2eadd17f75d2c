#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dimlab/catalog.hpp"
#include "dimlab/percolation.hpp"
#include "dimlab/sections.hpp"
#include "../oracles.hpp"

using namespace dimlab;


TEST_CASE("directions") {
  const Direction d = Direction::from_angle(std::numbers::pi + 0.25);
  CHECK(d.angle() == doctest::Approx(0.25));
  CHECK(Direction::from_vector(Vec{0.0, 2.0}, 2).angle() == doctest::Approx(std::numbers::pi / 2));
  CHECK_THROWS_AS(Direction::from_vector(Vec{}, 2), Error);
  CHECK_THROWS_AS(Direction::from_angle(NAN), Error);
  CHECK(direction_grid(4).size() == 4);
}

TEST_CASE("carpet slice counts match the column product") {
  const Ifs carpet = catalog::sierpinski_carpet();
  const Direction v = Direction::from_angle(0.0);
  for (int n = 2; n <= 5; ++n) {
    const double rho = std::pow(3.0, -n);
    for (double x : {0.1, 0.25, 1.0 / 3.0, 0.5, 0.61, 0.95}) {
      CAPTURE(n);
      CAPTURE(x);
      CHECK(count_slice(carpet, v, x, rho).count == oracle::carpet_column_count(x, n));
    }
  }
}

TEST_CASE("multi-scale counts agree with single-scale counts") {
  const Ifs tri = catalog::sierpinski_triangle();
  const Direction d = Direction::from_angle(0.7);
  const auto scales = scale_ladder(2, -2, -7);
  for (double x : {0.2, 0.45, 0.8}) {
    const auto multi = count_slice_multi(tri, d, x, scales);
    for (std::size_t j = 0; j < scales.size(); ++j) {
      CHECK(multi[j] == count_slice(tri, d, x, scales[j]).count);
      CHECK(multi[j] == slice_words(tri, d, x, scales[j]).size());
    }
  }
}

TEST_CASE("counts on a tree never exceed the deterministic counts") {
  const Ifs carpet = catalog::sierpinski_carpet();
  const auto law = OffspringLaw::standard(carpet, 0.3);
  const auto tree = sample_tree(law, 8, 6, 3).tree;
  const Direction v = Direction::from_angle(0.0);
  const auto scales = scale_ladder(3, -2, -5);
  for (double x : {0.3, 0.5, 0.77}) {
    const auto a = count_slice_multi(carpet, v, x, scales, &tree);
    const auto b = count_slice_multi(carpet, v, x, scales);
    for (std::size_t j = 0; j < a.size(); ++j) CHECK(a[j] <= b[j]);
  }
  const SymbolTree shallow = SymbolTree::full(8, 3);
  CHECK_THROWS_AS(count_slice(carpet, v, 0.5, std::pow(3.0, -6), &shallow), Error);
}

TEST_CASE("union length") {
  CHECK(union_length({}) == 0.0);
  CHECK(union_length({{0, 1}, {0.5, 2}, {3, 4}}) == doctest::Approx(3.0));
  CHECK(union_length({{3, 4}, {0, 1}, {1, 1.5}}) == doctest::Approx(2.5));
}

TEST_CASE("projections of the unit square") {
  const Ifs sq = catalog::unit_square();
  // full attractor, cover by disks: the measure is at least the width of the
  // square's shadow and at most the shadow of the enclosing ball
  for (double b : {0.0, 0.4, 1.2}) {
    const Direction d = Direction::from_angle(b);
    const double shadow = std::fabs(std::cos(b)) + std::fabs(std::sin(b));
    const double m = projection_measure(sq, d, 0.01);
    CHECK(m >= shadow - 1e-12);
    CHECK(m <= 2 * sq.ball().radius + 1e-12);
    const std::vector<Direction> one{d};
    CHECK(projection_measures(sq, one, 0.01).front() == m);
  }
}

TEST_CASE("mixed radii use the general union") {
  const Ifs mixed({Similarity(0.5, 0.0, Vec{0.0}), Similarity(0.25, 0.0, Vec{0.75})}, 1);
  const Direction d = Direction::from_vector(Vec{1.0}, 1);
  const double m = projection_measure(mixed, d, 0.01);
  const auto set = stopping_set(mixed, 0.01);
  std::vector<std::pair<double, double>> iv;
  for (const auto& w : set.words) {
    const auto c = cylinder(mixed, w);
    iv.emplace_back(c.disk.center[0] - c.disk.radius, c.disk.center[0] + c.disk.radius);
  }
  CHECK(m == doctest::Approx(union_length(iv)).epsilon(1e-12));
}

TEST_CASE("conservation profile on the carpet") {
  const Ifs carpet = catalog::sierpinski_carpet();
  const Direction v = Direction::from_angle(0.0);
  const auto scales = scale_ladder(3, -2, -6);
  const auto grid = default_x_grid(carpet, v, scales, 128);
  CHECK(grid.size() == 128);
  CHECK(std::is_sorted(grid.begin(), grid.end()));
  const auto prof = conservation_profile(carpet, v, 0.15, grid, scales);
  CHECK(prof.threshold == doctest::Approx(std::log(8.0) / std::log(3.0) - 1.15));
  CHECK(prof.qualifying_fraction >= 0.0);
  CHECK(prof.qualifying_fraction <= 1.0);
  std::size_t q = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (prof.qualifies[i]) {
      ++q;
      CHECK(prof.valid[i]);
      CHECK(prof.slopes[i].slope >= prof.threshold);
    }
  }
  CHECK(prof.qualifying_fraction == doctest::Approx(static_cast<double>(q) / grid.size()));
  CHECK_THROWS_AS(conservation_profile(carpet, v, -1.0, grid, scales), Error);
}

TEST_CASE("probe is reproducible") {
  const Ifs carpet = catalog::sierpinski_carpet();
  const Direction v = Direction::from_angle(0.0);
  const std::vector<double> xs{0.2, 0.5, 0.8};
  const double alpha = std::log(8.0) / std::log(3.0) - 1.1;
  const auto a = probe_sections(carpet, alpha, v, xs, 5, 20, 9);
  const auto b = probe_sections(carpet, alpha, v, xs, 5, 20, 9);
  CHECK(a.hit_frequency == b.hit_frequency);
  CHECK(a.hits.size() == 20);
  CHECK_THROWS_AS(probe_sections(carpet, 5.0, v, xs, 5, 20, 9), Error);
}
