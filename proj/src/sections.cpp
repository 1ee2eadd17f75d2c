#include "dimlab/sections.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dimlab/parallel.hpp"
#include "dimlab/percolation.hpp"
#include "dimlab/rng.hpp"

namespace dimlab {
namespace {

constexpr double kPi = std::numbers::pi;

double normalize_half_turn(double a) {
  double r = std::fmod(a, kPi);
  if (r < 0.0) r += kPi;
  if (r >= kPi) r = 0.0;
  return r;
}

// Scale limits c1 * rho, validated against the IFS diameter.
std::vector<double> scale_limits(const Ifs& ifs, std::span<const double> scales) {
  std::vector<double> limits;
  for (double rho : scales) {
    if (!(rho > 0.0) || !(rho < ifs.diameter())) {
      throw Error(ErrorCode::OutOfRange, "scale " + std::to_string(rho) + " outside (0, " +
                                             std::to_string(ifs.diameter()) + ")");
    }
    limits.push_back(ifs.c1() * rho);
  }
  return limits;
}

void check_tree(const Ifs& ifs, const SymbolTree* tree) {
  if (tree != nullptr && tree->arity() != ifs.size()) {
    throw Error(ErrorCode::InvalidArgument, "tree arity does not match the number of maps");
  }
}

[[noreturn]] void too_shallow(const SymbolTree* tree) {
  throw Error(ErrorCode::DepthMismatch, "tree depth " + std::to_string(tree->depth()) +
                                            " is too shallow for the requested scale");
}

// Disks of the stopping set at one scale, as (projection centre, radius)
// pairs per direction.
struct DiskList {
  std::vector<Vec> centers;
  std::vector<double> radii;
};

DiskList stopping_disks(const Ifs& ifs, double rho, const SymbolTree* tree) {
  check_tree(ifs, tree);
  const double limit = scale_limits(ifs, std::span<const double>(&rho, 1)).front();
  DiskList out;
  walk_cylinders(ifs, tree, [&](const CylinderView& v) {
    if (2.0 * v.radius < limit) {
      out.centers.push_back(v.center);
      out.radii.push_back(v.radius);
      return false;
    }
    if (v.bottom) too_shallow(tree);
    return true;
  });
  return out;
}

}  // namespace

Direction Direction::from_angle(double beta) {
  if (!std::isfinite(beta)) throw Error(ErrorCode::InvalidArgument, "angle must be finite");
  const double b = normalize_half_turn(beta);
  return Direction(b, Vec{std::cos(b), std::sin(b)});
}

Direction Direction::from_vector(const Vec& v, int ambient_dim) {
  for (int i = ambient_dim; i < kMaxDim; ++i) {
    if (v[i] != 0.0) throw Error(ErrorCode::InvalidArgument, "direction exceeds the dimension");
  }
  const double n = norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::InvalidArgument, "direction vector must be nonzero");
  }
  const Vec u = (1.0 / n) * v;
  return Direction(normalize_half_turn(std::atan2(u[1], u[0])), u);
}

std::vector<Direction> direction_grid(int k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "direction grid needs k >= 1");
  std::vector<Direction> out;
  for (int j = 0; j < k; ++j) out.push_back(Direction::from_angle(j * kPi / k));
  return out;
}

std::vector<std::uint64_t> count_slice_multi(const Ifs& ifs, const Direction& dir, double x,
                                             std::span<const double> scales,
                                             const SymbolTree* tree) {
  check_tree(ifs, tree);
  const auto limits = scale_limits(ifs, scales);
  std::vector<std::uint64_t> counts(scales.size(), 0);
  if (scales.empty()) return counts;
  const double finest = *std::min_element(limits.begin(), limits.end());
  walk_cylinders(ifs, tree, [&](const CylinderView& v) {
    // Disks are nested, so a disk missing L_x rules out its whole subtree.
    if (std::fabs(dir.project(v.center) - x) > v.radius) return false;
    const double diam = 2.0 * v.radius;
    const double parent = v.depth == 0 ? std::numeric_limits<double>::infinity()
                                       : diam / ifs.map(v.symbol).ratio();
    for (std::size_t j = 0; j < limits.size(); ++j) {
      if (diam < limits[j] && parent >= limits[j]) ++counts[j];
    }
    if (diam < finest) return false;
    if (v.bottom) too_shallow(tree);
    return true;
  });
  return counts;
}

SliceCount count_slice(const Ifs& ifs, const Direction& dir, double x, double rho,
                       const SymbolTree* tree) {
  const auto c = count_slice_multi(ifs, dir, x, std::span<const double>(&rho, 1), tree);
  return SliceCount{x, rho, c.front()};
}

std::vector<Word> slice_words(const Ifs& ifs, const Direction& dir, double x, double rho,
                              const SymbolTree* tree) {
  check_tree(ifs, tree);
  const StoppingSet set = stopping_set(ifs, rho);
  std::vector<Word> out;
  for (const auto& w : set.words) {
    if (tree != nullptr) {
      if (static_cast<int>(w.size()) > tree->depth()) too_shallow(tree);
      if (!tree->contains(w)) continue;
    }
    const CylinderGeometry g = cylinder(ifs, w);
    if (std::fabs(dir.project(g.disk.center) - x) <= g.disk.radius) out.push_back(w);
  }
  return out;
}

DimEstimate section_dim(const Ifs& ifs, const Direction& dir, double x,
                        std::span<const double> scales, const SymbolTree* tree) {
  const auto counts = count_slice_multi(ifs, dir, x, scales, tree);
  std::vector<double> c(counts.begin(), counts.end());
  return fit_log_log_nonzero(scales, c);
}

double union_length(std::vector<std::pair<double, double>> intervals) {
  if (intervals.empty()) return 0.0;
  std::sort(intervals.begin(), intervals.end());
  double total = 0.0;
  double lo = intervals.front().first, hi = intervals.front().second;
  for (const auto& [a, b] : intervals) {
    if (a > hi) {
      total += hi - lo;
      lo = a;
      hi = b;
    } else {
      hi = std::max(hi, b);
    }
  }
  return total + (hi - lo);
}

std::vector<double> projection_measures(const Ifs& ifs, std::span<const Direction> dirs,
                                        double rho, const SymbolTree* tree) {
  const DiskList disks = stopping_disks(ifs, rho, tree);
  std::vector<double> out(dirs.size(), 0.0);
  const bool equal_radii =
      !disks.radii.empty() &&
      std::all_of(disks.radii.begin(), disks.radii.end(),
                  [&](double r) { return r == disks.radii.front(); });
  parallel_for(dirs.size(), [&](std::size_t j) {
    if (equal_radii) {
      // sorting centres alone is enough when every interval has the same width
      const double r = disks.radii.front();
      std::vector<double> c(disks.centers.size());
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = dirs[j].project(disks.centers[i]);
      std::sort(c.begin(), c.end());
      double total = 0.0, lo = c.front() - r, hi = c.front() + r;
      for (double x : c) {
        if (x - r > hi) {
          total += hi - lo;
          lo = x - r;
        }
        hi = x + r;
      }
      out[j] = total + (hi - lo);
      return;
    }
    std::vector<std::pair<double, double>> iv;
    iv.reserve(disks.centers.size());
    for (std::size_t i = 0; i < disks.centers.size(); ++i) {
      const double p = dirs[j].project(disks.centers[i]);
      iv.emplace_back(p - disks.radii[i], p + disks.radii[i]);
    }
    out[j] = union_length(std::move(iv));
  });
  return out;
}

double projection_measure(const Ifs& ifs, const Direction& dir, double rho,
                          const SymbolTree* tree) {
  return projection_measures(ifs, std::span<const Direction>(&dir, 1), rho, tree).front();
}

std::vector<double> scale_ladder(double base, int from_exp, int to_exp) {
  if (!(base > 0.0) || base == 1.0) throw Error(ErrorCode::InvalidArgument, "bad ladder base");
  std::vector<double> out;
  const int step = from_exp <= to_exp ? 1 : -1;
  for (int e = from_exp;; e += step) {
    out.push_back(std::pow(base, e));
    if (e == to_exp) break;
  }
  if (out.size() > 1 && out.front() < out.back()) std::reverse(out.begin(), out.end());
  return out;
}

std::vector<double> default_x_grid(const Ifs& ifs, const Direction& dir,
                                   std::span<const double> scales, std::size_t size) {
  if (scales.empty() || size == 0) {
    throw Error(ErrorCode::InvalidArgument, "grid needs scales and a positive size");
  }
  const double fine = *std::min_element(scales.begin(), scales.end());
  const double mid = dir.project(ifs.ball().center);
  const double lo = mid - ifs.ball().radius + 2.0 * fine;
  const double hi = mid + ifs.ball().radius - 2.0 * fine;
  if (!(hi > lo)) throw Error(ErrorCode::InvalidArgument, "projection too short for the scales");
  std::vector<double> grid(size);
  const double h = (hi - lo) / static_cast<double>(size);
  for (std::size_t j = 0; j < size; ++j) grid[j] = lo + (static_cast<double>(j) + 0.5) * h;
  return grid;
}

ConservationProfile conservation_profile(const Ifs& ifs, const Direction& dir, double epsilon,
                                         std::span<const double> x_grid,
                                         std::span<const double> scales,
                                         const ProfileOptions& options) {
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be >= 0");
  if (x_grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty x grid");
  scale_limits(ifs, scales);
  const double reference = options.reference_dimension.value_or(moran_dimension(ifs));

  ConservationProfile prof{dir, epsilon, reference - 1.0 - epsilon, {}, {}, {}, {}, {}, 0, 0};
  const std::size_t n = x_grid.size();
  prof.x_grid.assign(x_grid.begin(), x_grid.end());
  prof.counts.resize(n);
  prof.slopes.resize(n);
  std::vector<char> valid(n, 0), qualifies(n, 0);
  parallel_for(n, [&](std::size_t i) {
    prof.counts[i] = count_slice_multi(ifs, dir, x_grid[i], scales, options.tree);
    std::size_t nonzero = 0;
    for (auto c : prof.counts[i]) nonzero += c > 0 ? 1 : 0;
    if (nonzero < 3) {
      prof.slopes[i].slope = std::numeric_limits<double>::quiet_NaN();
      prof.slopes[i].r2 = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    std::vector<double> c(prof.counts[i].begin(), prof.counts[i].end());
    prof.slopes[i] = fit_log_log_nonzero(scales, c);
    valid[i] = 1;
    qualifies[i] = prof.slopes[i].slope > prof.threshold ? 1 : 0;
  });
  std::size_t q = 0;
  for (std::size_t i = 0; i < n; ++i) {
    prof.valid.push_back(valid[i] != 0);
    prof.qualifies.push_back(qualifies[i] != 0);
    q += qualifies[i] ? 1 : 0;
  }
  prof.qualifying_fraction = static_cast<double>(q) / static_cast<double>(n);
  // Cell-centred uniform grids: each point stands for one grid cell.
  const double cell = n > 1 ? (x_grid.back() - x_grid.front()) / static_cast<double>(n - 1) : 0.0;
  prof.qualifying_length = std::fabs(cell) * static_cast<double>(q);
  return prof;
}

ProbeResult probe_sections(const Ifs& ifs, double alpha, const Direction& dir,
                           std::span<const double> x_grid, int depth, int trials,
                           std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  if (depth < 0) throw Error(ErrorCode::InvalidArgument, "depth must be >= 0");
  const OffspringLaw law = OffspringLaw::standard(ifs, alpha);
  percolation_dimension(law, ifs);  // rejects subcritical alpha

  ProbeResult res;
  res.x_grid.assign(x_grid.begin(), x_grid.end());
  res.hits.assign(static_cast<std::size_t>(trials), std::vector<std::uint8_t>(x_grid.size(), 0));
  std::vector<char> survived(static_cast<std::size_t>(trials), 0);
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    const PercolationSample s = sample_tree(law, ifs.size(), depth, derive_seed(seed, t));
    if (!s.survived()) return;
    survived[t] = 1;
    std::vector<std::pair<double, double>> iv;
    walk_cylinders(ifs, &s.tree, [&](const CylinderView& v) {
      if (!v.bottom) return true;
      const double p = dir.project(v.center);
      iv.emplace_back(p - v.radius, p + v.radius);
      return false;
    });
    std::sort(iv.begin(), iv.end());
    // Merge, then locate each x by binary search.
    std::vector<std::pair<double, double>> merged;
    for (const auto& seg : iv) {
      if (!merged.empty() && seg.first <= merged.back().second) {
        merged.back().second = std::max(merged.back().second, seg.second);
      } else {
        merged.push_back(seg);
      }
    }
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
      auto it = std::upper_bound(merged.begin(), merged.end(), x_grid[i],
                                 [](double x, const auto& seg) { return x < seg.first; });
      if (it != merged.begin() && x_grid[i] <= std::prev(it)->second) res.hits[t][i] = 1;
    }
  });
  res.hit_frequency.assign(x_grid.size(), 0.0);
  for (int t = 0; t < trials; ++t) {
    res.survived.push_back(survived[static_cast<std::size_t>(t)] != 0);
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
      res.hit_frequency[i] += res.hits[static_cast<std::size_t>(t)][i];
    }
  }
  for (auto& f : res.hit_frequency) f /= trials;
  return res;
}

}  // namespace dimlab
