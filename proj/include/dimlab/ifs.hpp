#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "dimlab/error.hpp"

namespace dimlab {

inline constexpr int kMaxDim = 3;

// Point in R^d for d <= kMaxDim; unused coordinates stay zero.
struct Vec {
  std::array<double, kMaxDim> c{};

  Vec() = default;
  Vec(double x, double y = 0.0, double z = 0.0) : c{x, y, z} {}

  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  friend Vec operator+(Vec a, const Vec& b) {
    for (int i = 0; i < kMaxDim; ++i) a[i] += b[i];
    return a;
  }
  friend Vec operator-(Vec a, const Vec& b) {
    for (int i = 0; i < kMaxDim; ++i) a[i] -= b[i];
    return a;
  }
  friend Vec operator*(double s, Vec a) {
    for (auto& x : a.c) x *= s;
    return a;
  }
  friend bool operator==(const Vec&, const Vec&) = default;
};

double dot(const Vec& a, const Vec& b);
double norm(const Vec& a);

// x -> ratio * R(angle) * x + translation. The rotation acts on the first two
// coordinates and must be zero outside the plane. A ratio of exactly 1 is
// reserved for the identity produced by composing the empty word.
class Similarity {
 public:
  Similarity(double ratio, double angle, Vec translation);

  static Similarity identity();

  double ratio() const { return ratio_; }
  double angle() const { return angle_; }
  const Vec& translation() const { return translation_; }
  bool is_identity() const { return ratio_ == 1.0 && angle_ == 0.0 && translation_ == Vec{}; }

  Vec apply(const Vec& x) const;
  Vec apply_linear(const Vec& x) const;

  // Fixed point in the given ambient dimension.
  Vec fixed_point(int ambient_dim) const;

 private:
  Similarity() = default;

  double ratio_ = 1.0;
  double angle_ = 0.0;
  double cos_ = 1.0;
  double sin_ = 0.0;
  Vec translation_{};
};

// outer ∘ inner
Similarity compose(const Similarity& outer, const Similarity& inner);

// Finite word over {0, ..., m-1}. Symbols are zero-based throughout the API.
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<std::uint32_t> symbols) : symbols_(symbols) {}
  explicit Word(std::vector<std::uint32_t> symbols) : symbols_(std::move(symbols)) {}

  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  std::uint32_t operator[](std::size_t i) const { return symbols_[i]; }
  const std::vector<std::uint32_t>& symbols() const { return symbols_; }

  void push_back(std::uint32_t s) { symbols_.push_back(s); }
  void pop_back() { symbols_.pop_back(); }
  bool is_prefix_of(const Word& other) const;

  std::string str() const;

  auto operator<=>(const Word&) const = default;

 private:
  std::vector<std::uint32_t> symbols_;
};

enum class Separation { SscVerified, OscAssumed, Unverified };

const char* to_string(Separation s);
Separation separation_from_string(const std::string& s);

struct Ball {
  Vec center;
  double radius = 0.0;
};

// Center = mean of the maps' fixed points; radius = max_i |f_i(c) - c| /
// (1 - r_i), inflated by 1e-9 relative (floored at 1e-12). Then f_i(D) ⊆ D.
Ball enclosing_ball(const std::vector<Similarity>& maps, int ambient_dim);

class Ifs {
 public:
  Ifs(std::vector<Similarity> maps, int ambient_dim,
      Separation separation = Separation::Unverified, std::string name = {});

  const std::vector<Similarity>& maps() const { return maps_; }
  const Similarity& map(std::size_t i) const { return maps_[i]; }
  std::size_t size() const { return maps_.size(); }
  int ambient_dim() const { return ambient_dim_; }
  const Ball& ball() const { return ball_; }
  Separation separation() const { return separation_; }
  const std::string& name() const { return name_; }

  // Catalog metadata: does the projection of every cylinder onto every line
  // equal that of its convex hull (e.g. connected attractors)?
  std::optional<bool> projection_hull_condition;
  // Catalog metadata: do the rotations generate a dense subgroup?
  std::optional<bool> dense_rotations;
  std::vector<std::string> labels;

  double min_ratio() const;
  // Upper ratio of the stopping-set window [rho, c1 * rho).
  double c1() const { return 1.0 / min_ratio(); }
  // Diameter proxy of the attractor: 2 * R0.
  double diameter() const { return 2.0 * ball_.radius; }

  // Common (ratio, angle) if all maps share them within tol.
  std::optional<std::pair<double, double>> common_ratio_angle(double tol = 1e-12) const;

  void validate_word(const Word& w) const;

 private:
  std::vector<Similarity> maps_;
  int ambient_dim_;
  Ball ball_;
  Separation separation_;
  std::string name_;
};

// Composition f_{w1} ∘ ... ∘ f_{wk}; the empty word yields Similarity::identity().
Similarity compose(const Ifs& ifs, const Word& word);

struct CylinderGeometry {
  Word word;
  Similarity composed;
  double diameter;
  Ball disk;
};

CylinderGeometry cylinder(const Ifs& ifs, const Word& word);

// Solves sum_i r_i^s = 1 by bisection on [0, d + 1].
double moran_dimension(const std::vector<double>& ratios, double upper = 4.0);
double moran_dimension(const Ifs& ifs);

struct StoppingSet {
  double rho = 0.0;
  double c1 = 0.0;
  std::vector<Word> words;  // lexicographic order
};

// Words with rho <= diameter < c1 * rho, found by depth-first expansion.
StoppingSet stopping_set(const Ifs& ifs, double rho,
                         std::uint64_t budget = kDefaultWordBudget);

// Number of words in the stopping set for rho, without materialising it.
std::uint64_t stopping_set_size(const Ifs& ifs, double rho);

std::size_t overlap_count(const Ifs& ifs, const StoppingSet& stopping, const Vec& point);

// SSC check: the first-level pieces are pairwise separated by depth-`depth`
// cylinder disks.
bool check_strong_separation(const Ifs& ifs, int depth);

// IFS of all m^q compositions f_{i1} ∘ ... ∘ f_{iq}, lexicographic.
Ifs power_system(const Ifs& ifs, int q, std::uint64_t budget = kDefaultWordBudget);

struct SubsystemResult {
  Ifs ifs;
  double moran_dimension;
  std::vector<Word> words;  // the composition word of each map
};

// All distinct orderings of the multiset with counts[i] copies of f_i.
SubsystemResult multinomial_subsystem(const Ifs& ifs, const std::vector<int>& counts,
                                         std::uint64_t budget = kDefaultWordBudget);

// Images of the ball center under every depth-`depth` composed map.
std::vector<Vec> attractor_points(const Ifs& ifs, int depth,
                                  std::uint64_t budget = kDefaultWordBudget);

// Checks f_i(D) ⊆ D for the stored ball.
bool ball_is_invariant(const Ifs& ifs, double rel_tol = 1e-9);

}  // namespace dimlab
