#include "dimlab/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "dimlab/percolation.hpp"

namespace dimlab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double normalize_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

}  // namespace

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidWord: return "InvalidWord";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::UndefinedDimension: return "UndefinedDimension";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::DepthMismatch: return "DepthMismatch";
    case ErrorCode::ParameterError: return "ParameterError";
    case ErrorCode::UnsupportedLaw: return "UnsupportedLaw";
    case ErrorCode::Validation: return "Validation";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

Similarity::Similarity(double ratio, double angle, Vec translation)
    : ratio_(ratio), angle_(normalize_angle(angle)), translation_(translation) {
  if (!(ratio > 0.0) || !(ratio <= 1.0) || !std::isfinite(angle)) {
    throw Error(ErrorCode::InvalidArgument, "similarity ratio must lie in (0, 1]");
  }
  cos_ = std::cos(angle_);
  sin_ = std::sin(angle_);
}

Similarity Similarity::identity() { return Similarity(); }

Vec Similarity::apply_linear(const Vec& x) const {
  Vec y = x;
  if (angle_ != 0.0) {
    y[0] = cos_ * x[0] - sin_ * x[1];
    y[1] = sin_ * x[0] + cos_ * x[1];
  }
  return ratio_ * y;
}

Vec Similarity::apply(const Vec& x) const { return apply_linear(x) + translation_; }

Vec Similarity::fixed_point(int ambient_dim) const {
  // (I - r R) p = a
  if (ambient_dim == 2 && angle_ != 0.0) {
    const double a11 = 1.0 - ratio_ * cos_, a12 = ratio_ * sin_;
    const double a21 = -ratio_ * sin_, a22 = 1.0 - ratio_ * cos_;
    const double det = a11 * a22 - a12 * a21;
    return Vec{(a22 * translation_[0] - a12 * translation_[1]) / det,
               (-a21 * translation_[0] + a11 * translation_[1]) / det};
  }
  return (1.0 / (1.0 - ratio_)) * translation_;
}

Similarity compose(const Similarity& outer, const Similarity& inner) {
  if (inner.is_identity()) return outer;
  if (outer.is_identity()) return inner;
  return Similarity(outer.ratio() * inner.ratio(), outer.angle() + inner.angle(),
                    outer.apply(inner.translation()));
}

bool Word::is_prefix_of(const Word& other) const {
  return symbols_.size() <= other.symbols_.size() &&
         std::equal(symbols_.begin(), symbols_.end(), other.symbols_.begin());
}

std::string Word::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < symbols_.size(); ++i) os << (i ? "." : "") << symbols_[i];
  return os.str();
}

const char* to_string(Separation s) {
  switch (s) {
    case Separation::SscVerified: return "ssc-verified";
    case Separation::OscAssumed: return "osc-assumed";
    case Separation::Unverified: return "unverified";
  }
  return "unverified";
}

Separation separation_from_string(const std::string& s) {
  if (s == "ssc-verified") return Separation::SscVerified;
  if (s == "osc-assumed") return Separation::OscAssumed;
  if (s == "unverified") return Separation::Unverified;
  throw Error(ErrorCode::InvalidArgument, "unknown separation tag '" + s + "'");
}

Ball enclosing_ball(const std::vector<Similarity>& maps, int ambient_dim) {
  Ball ball;
  for (const auto& f : maps) ball.center = ball.center + f.fixed_point(ambient_dim);
  ball.center = (1.0 / static_cast<double>(maps.size())) * ball.center;
  double radius = 0.0;
  for (const auto& f : maps) {
    radius = std::max(radius, norm(f.apply(ball.center) - ball.center) / (1.0 - f.ratio()));
  }
  ball.radius = std::max(radius * (1.0 + 1e-9), 1e-12);
  return ball;
}

Ifs::Ifs(std::vector<Similarity> maps, int ambient_dim, Separation separation, std::string name)
    : maps_(std::move(maps)),
      ambient_dim_(ambient_dim),
      separation_(separation),
      name_(std::move(name)) {
  if (maps_.size() < 2) throw Error(ErrorCode::InvalidArgument, "an IFS needs at least 2 maps");
  if (ambient_dim_ < 1 || ambient_dim_ > kMaxDim) {
    throw Error(ErrorCode::InvalidArgument, "ambient dimension must be 1, 2 or 3");
  }
  for (const auto& f : maps_) {
    if (!(f.ratio() < 1.0)) throw Error(ErrorCode::InvalidArgument, "map ratio must be < 1");
    if (ambient_dim_ != 2 && f.angle() != 0.0) {
      throw Error(ErrorCode::InvalidArgument, "rotations are only supported in the plane");
    }
    for (int i = ambient_dim_; i < kMaxDim; ++i) {
      if (f.translation()[i] != 0.0) {
        throw Error(ErrorCode::InvalidArgument, "translation exceeds the ambient dimension");
      }
    }
  }
  ball_ = enclosing_ball(maps_, ambient_dim_);
}

double Ifs::min_ratio() const {
  double r = 1.0;
  for (const auto& f : maps_) r = std::min(r, f.ratio());
  return r;
}

std::optional<std::pair<double, double>> Ifs::common_ratio_angle(double tol) const {
  const double r = maps_.front().ratio(), a = maps_.front().angle();
  for (const auto& f : maps_) {
    double da = std::fabs(f.angle() - a);
    da = std::min(da, kTwoPi - da);
    if (std::fabs(f.ratio() - r) > tol * r || da > tol) return std::nullopt;
  }
  return std::make_pair(r, a);
}

void Ifs::validate_word(const Word& w) const {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] >= maps_.size()) {
      throw Error(ErrorCode::InvalidWord, "symbol " + std::to_string(w[i]) + " at position " +
                                              std::to_string(i) + " is out of range for " +
                                              std::to_string(maps_.size()) + " maps");
    }
  }
}

Similarity compose(const Ifs& ifs, const Word& word) {
  ifs.validate_word(word);
  Similarity s = Similarity::identity();
  for (std::size_t i = 0; i < word.size(); ++i) s = compose(s, ifs.map(word[i]));
  return s;
}

CylinderGeometry cylinder(const Ifs& ifs, const Word& word) {
  Similarity s = compose(ifs, word);
  Ball disk{s.apply(ifs.ball().center), ifs.ball().radius * s.ratio()};
  return CylinderGeometry{word, s, 2.0 * disk.radius, disk};
}

double moran_dimension(const std::vector<double>& ratios, double upper) {
  auto excess = [&](double s) {
    double sum = 0.0;
    for (double r : ratios) sum += std::pow(r, s);
    return sum - 1.0;
  };
  double lo = 0.0, hi = upper;
  if (excess(lo) < 0.0) throw Error(ErrorCode::UndefinedDimension, "sum of ratios^0 below 1");
  while (excess(hi) > 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double moran_dimension(const Ifs& ifs) {
  std::vector<double> ratios;
  for (const auto& f : ifs.maps()) ratios.push_back(f.ratio());
  return moran_dimension(ratios, ifs.ambient_dim() + 1.0);
}

namespace {

void check_rho(const Ifs& ifs, double rho) {
  if (!(rho > 0.0) || !(rho < ifs.diameter())) {
    throw Error(ErrorCode::OutOfRange, "rho must lie in (0, " + std::to_string(ifs.diameter()) +
                                           "), got " + std::to_string(rho));
  }
}

}  // namespace

std::uint64_t stopping_set_size(const Ifs& ifs, double rho) {
  check_rho(ifs, rho);
  const double limit = ifs.c1() * rho;
  const double d0 = ifs.diameter();
  std::map<double, std::uint64_t> memo;
  auto count = [&](auto&& self, double ratio) -> std::uint64_t {
    if (d0 * ratio < limit) return 1;
    if (auto it = memo.find(ratio); it != memo.end()) return it->second;
    std::uint64_t total = 0;
    for (const auto& f : ifs.maps()) {
      const std::uint64_t c = self(self, ratio * f.ratio());
      total = (total > UINT64_MAX - c) ? UINT64_MAX : total + c;
    }
    memo.emplace(ratio, total);
    return total;
  };
  return count(count, 1.0);
}

StoppingSet stopping_set(const Ifs& ifs, double rho, std::uint64_t budget) {
  check_rho(ifs, rho);
  const std::uint64_t required = stopping_set_size(ifs, rho);
  if (required > budget) throw BudgetExceeded(required, budget);

  StoppingSet set{rho, ifs.c1(), {}};
  set.words.reserve(required);
  const double limit = set.c1 * rho;
  const double d0 = ifs.diameter();
  Word word;
  auto expand = [&](auto&& self, double ratio) -> void {
    if (d0 * ratio < limit) {
      set.words.push_back(word);
      return;
    }
    for (std::uint32_t i = 0; i < ifs.size(); ++i) {
      word.push_back(i);
      self(self, ratio * ifs.map(i).ratio());
      word.pop_back();
    }
  };
  expand(expand, 1.0);
  return set;
}

std::size_t overlap_count(const Ifs& ifs, const StoppingSet& stopping, const Vec& point) {
  std::size_t n = 0;
  for (const auto& w : stopping.words) {
    const CylinderGeometry g = cylinder(ifs, w);
    if (norm(point - g.disk.center) <= g.disk.radius) ++n;
  }
  return n;
}

bool check_strong_separation(const Ifs& ifs, int depth) {
  const Vec c = ifs.ball().center;
  const double R = ifs.ball().radius;
  struct Piece {
    Similarity map;
    int depth;
  };
  auto disjoint = [&](const Piece& a, const Piece& b) {
    return norm(a.map.apply(c) - b.map.apply(c)) > R * (a.map.ratio() + b.map.ratio());
  };
  // Pairs of cylinders that might touch, refined until depth is reached.
  auto separated = [&](auto&& self, const Piece& a, const Piece& b) -> bool {
    if (disjoint(a, b)) return true;
    if (a.depth >= depth) return false;
    for (const auto& fi : ifs.maps()) {
      for (const auto& fj : ifs.maps()) {
        if (!self(self, Piece{compose(a.map, fi), a.depth + 1},
                  Piece{compose(b.map, fj), b.depth + 1})) {
          return false;
        }
      }
    }
    return true;
  };
  for (std::size_t i = 0; i < ifs.size(); ++i) {
    for (std::size_t j = i + 1; j < ifs.size(); ++j) {
      if (!separated(separated, Piece{ifs.map(i), 1}, Piece{ifs.map(j), 1})) return false;
    }
  }
  return true;
}

Ifs power_system(const Ifs& ifs, int q, std::uint64_t budget) {
  if (q < 1) throw Error(ErrorCode::InvalidArgument, "power must be >= 1");
  const double count = std::pow(static_cast<double>(ifs.size()), q);
  if (count > static_cast<double>(budget)) {
    throw BudgetExceeded(static_cast<std::uint64_t>(std::min(count, 1.8e19)), budget);
  }
  std::vector<Similarity> maps;
  maps.reserve(static_cast<std::size_t>(count));
  auto expand = [&](auto&& self, const Similarity& s, int level) -> void {
    if (level == q) {
      maps.push_back(s);
      return;
    }
    for (const auto& f : ifs.maps()) self(self, compose(s, f), level + 1);
  };
  expand(expand, Similarity::identity(), 0);
  Ifs out(std::move(maps), ifs.ambient_dim(), ifs.separation(),
          ifs.name() + "^" + std::to_string(q));
  out.projection_hull_condition = ifs.projection_hull_condition;
  out.dense_rotations = ifs.dense_rotations;
  return out;
}

SubsystemResult multinomial_subsystem(const Ifs& ifs, const std::vector<int>& counts,
                                         std::uint64_t budget) {
  if (ifs.ambient_dim() != 2) {
    throw Error(ErrorCode::InvalidArgument, "equal-rotation subsystems are planar");
  }
  if (counts.size() != ifs.size()) {
    throw Error(ErrorCode::InvalidArgument, "need one occurrence count per map");
  }
  std::vector<std::uint32_t> multiset;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 0) throw Error(ErrorCode::InvalidArgument, "negative occurrence count");
    multiset.insert(multiset.end(), static_cast<std::size_t>(counts[i]),
                    static_cast<std::uint32_t>(i));
  }
  if (multiset.empty()) throw Error(ErrorCode::InvalidArgument, "occurrence counts sum to 0");

  // Multinomial coefficient via log-gamma, exact enough for a budget check.
  double log_count = std::lgamma(static_cast<double>(multiset.size()) + 1.0);
  for (int c : counts) log_count -= std::lgamma(c + 1.0);
  const double count = std::round(std::exp(log_count));
  if (count > static_cast<double>(budget)) {
    throw BudgetExceeded(static_cast<std::uint64_t>(std::min(count, 1.8e19)), budget);
  }

  std::vector<Similarity> maps;
  std::vector<Word> words;
  do {
    Word w{std::vector<std::uint32_t>(multiset)};
    maps.push_back(compose(ifs, w));
    words.push_back(std::move(w));
  } while (std::next_permutation(multiset.begin(), multiset.end()));

  if (maps.size() == 1) {
    throw Error(ErrorCode::InvalidArgument,
                "occurrence counts admit a single ordering; an IFS needs at least 2 maps");
  }
  Ifs sub(std::move(maps), 2, Separation::Unverified, ifs.name() + "-equal-rotation");
  const double dim = percolation_dimension(OffspringLaw::deterministic(sub.size()), sub);
  return SubsystemResult{std::move(sub), dim, std::move(words)};
}

std::vector<Vec> attractor_points(const Ifs& ifs, int depth, std::uint64_t budget) {
  if (depth < 0) throw Error(ErrorCode::InvalidArgument, "depth must be >= 0");
  const double count = std::pow(static_cast<double>(ifs.size()), depth);
  if (count > static_cast<double>(budget)) {
    throw BudgetExceeded(static_cast<std::uint64_t>(std::min(count, 1.8e19)), budget);
  }
  std::vector<Vec> points;
  points.reserve(static_cast<std::size_t>(count));
  const Vec c = ifs.ball().center;
  auto expand = [&](auto&& self, const Similarity& s, int level) -> void {
    if (level == depth) {
      points.push_back(s.apply(c));
      return;
    }
    for (const auto& f : ifs.maps()) self(self, compose(s, f), level + 1);
  };
  expand(expand, Similarity::identity(), 0);
  return points;
}

bool ball_is_invariant(const Ifs& ifs, double rel_tol) {
  const Ball& b = ifs.ball();
  for (const auto& f : ifs.maps()) {
    if (norm(f.apply(b.center) - b.center) + f.ratio() * b.radius > b.radius * (1.0 + rel_tol)) {
      return false;
    }
  }
  return true;
}

}  // namespace dimlab
