#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dimlab/ifs.hpp"
#include "dimlab/regression.hpp"
#include "dimlab/symbol_tree.hpp"

namespace dimlab {

// A line V through the origin, given by a unit vector. L_x is the affine
// hyperplane {y : <y, w> = x} perpendicular to V.
class Direction {
 public:
  // Planar direction at angle beta to the first axis.
  static Direction from_angle(double beta);
  static Direction from_vector(const Vec& v, int ambient_dim);

  double angle() const { return angle_; }
  const Vec& unit() const { return unit_; }
  double project(const Vec& y) const { return dot(y, unit_); }

 private:
  Direction(double angle, Vec unit) : angle_(angle), unit_(unit) {}

  double angle_;
  Vec unit_;
};

// k evenly spaced planar directions j*pi/k.
std::vector<Direction> direction_grid(int k);

struct SliceCount {
  double x = 0.0;
  double rho = 0.0;
  std::uint64_t count = 0;
};

// N(x, rho): stopping-set cylinders whose disk meets L_x. With a tree, only
// cylinders of the tree are counted (N^omega); a tree too shallow for rho
// throws DepthMismatch.
SliceCount count_slice(const Ifs& ifs, const Direction& dir, double x, double rho,
                       const SymbolTree* tree = nullptr);

// N(x, rho) for every rho in `scales` from one descent.
std::vector<std::uint64_t> count_slice_multi(const Ifs& ifs, const Direction& dir, double x,
                                             std::span<const double> scales,
                                             const SymbolTree* tree = nullptr);

// Words of the stopping set whose disk meets L_x, lexicographic.
std::vector<Word> slice_words(const Ifs& ifs, const Direction& dir, double x, double rho,
                              const SymbolTree* tree = nullptr);

DimEstimate section_dim(const Ifs& ifs, const Direction& dir, double x,
                        std::span<const double> scales, const SymbolTree* tree = nullptr);

// Length of the union of projected stopping-set disks at scale rho.
double projection_measure(const Ifs& ifs, const Direction& dir, double rho,
                          const SymbolTree* tree = nullptr);

// projection_measure for several directions, sharing one cylinder walk.
std::vector<double> projection_measures(const Ifs& ifs, std::span<const Direction> dirs,
                                        double rho, const SymbolTree* tree = nullptr);

// Length of a union of closed intervals.
double union_length(std::vector<std::pair<double, double>> intervals);

// `base^from, ..., base^to` for from > to, e.g. (3, -2, -7).
std::vector<double> scale_ladder(double base, int from_exp, int to_exp);

// Cell-centred uniform grid across the projection of the enclosing ball,
// trimmed by 2 * (finest scale) at both ends.
std::vector<double> default_x_grid(const Ifs& ifs, const Direction& dir,
                                   std::span<const double> scales, std::size_t size = 512);

struct ConservationProfile {
  Direction direction;
  double epsilon = 0.0;
  double threshold = 0.0;  // reference dimension - 1 - epsilon
  std::vector<double> x_grid;
  std::vector<std::vector<std::uint64_t>> counts;  // [x][scale]
  std::vector<DimEstimate> slopes;                 // empty scales => slope NaN
  std::vector<bool> valid;                         // >= 3 nonzero scales
  std::vector<bool> qualifies;
  double qualifying_fraction = 0.0;
  double qualifying_length = 0.0;
};

struct ProfileOptions {
  // Defaults to the Moran dimension of the IFS.
  std::optional<double> reference_dimension;
  const SymbolTree* tree = nullptr;
};

ConservationProfile conservation_profile(const Ifs& ifs, const Direction& dir, double epsilon,
                                         std::span<const double> x_grid,
                                         std::span<const double> scales,
                                         const ProfileOptions& options = {});

struct ProbeResult {
  std::vector<double> x_grid;
  std::vector<double> hit_frequency;
  std::vector<std::vector<std::uint8_t>> hits;  // [trial][x]
  std::vector<bool> survived;                   // [trial]
};

// Standard(alpha) percolation to `depth` per trial; reports how often some
// surviving depth-`depth` cylinder disk meets L_x.
ProbeResult probe_sections(const Ifs& ifs, double alpha, const Direction& dir,
                           std::span<const double> x_grid, int depth, int trials,
                           std::uint64_t seed);

}  // namespace dimlab
