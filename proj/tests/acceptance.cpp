// Acceptance run: one PASS/FAIL line per criterion. Optional arguments pick
// criteria by number, e.g. `dimlab_acceptance 1 8 13`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "dimlab/catalog.hpp"
#include "dimlab/exceptional.hpp"
#include "dimlab/parallel.hpp"
#include "dimlab/percolation.hpp"
#include "dimlab/random_measures.hpp"
#include "dimlab/report.hpp"
#include "dimlab/rng.hpp"
#include "dimlab/scenarios.hpp"
#include "dimlab/sections.hpp"
#include "oracles.hpp"

using namespace dimlab;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(double v) { return format_number(v); }

struct Moments {
  double n = 0, mean = 0, var = 0, m4 = 0;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  m.n = static_cast<double>(xs.size());
  for (double x : xs) m.mean += x;
  m.mean /= m.n;
  for (double x : xs) {
    const double d = x - m.mean;
    m.var += d * d;
    m.m4 += d * d * d * d;
  }
  m.var /= m.n - 1;
  m.m4 /= m.n;
  return m;
}

Report run_default(const std::string& name, const json& params = json::object()) {
  json cfg = {{"scenario", name}, {"seed", 1}};
  if (!params.empty()) cfg["params"] = params;
  return run(parse_scenario(cfg));
}

double summary_number(const Report& r, const std::string& key) {
  return r.summary.at(key).get<double>();
}

Outcome ac1() {
  Outcome o;
  const double a = moran_dimension({0.5, 0.25, 0.25});
  const double b = moran_dimension({0.5, 0.5, 0.5});
  o.require(std::fabs(a - 1.0) <= 1e-10, "s(1/2,1/4,1/4) = " + fmt(a));
  o.require(std::fabs(b - std::log(3.0) / std::log(2.0)) <= 1e-9, "s(3 x 1/2) = " + fmt(b));
  return o;
}

Outcome ac2() {
  Outcome o;
  double worst = 0.0;
  for (const Ifs& ifs : {catalog::sierpinski_carpet(), catalog::sierpinski_triangle(),
                         catalog::unit_square()}) {
    const double s = moran_dimension(ifs);
    for (double a : {0.05, 0.3, 0.7}) {
      if (a >= s) continue;
      const double d = percolation_dimension(OffspringLaw::standard(ifs, a), ifs);
      worst = std::max(worst, std::fabs(d - (s - a)));
    }
  }
  o.require(worst <= 1e-9, "standard: max |dim - (s - alpha)| = " + fmt(worst));
  double worst_m = 0.0;
  for (int M : {2, 3, 4}) {
    for (double p : {0.6, 0.7, 0.85, 0.95}) {
      const auto cfg = mandelbrot_config(M, 2, p);
      worst_m = std::max(worst_m, std::fabs(percolation_dimension(cfg.law, cfg.ifs) -
                                            (2 + std::log(p) / std::log(M))));
    }
  }
  o.require(worst_m <= 1e-12, "mandelbrot: max error " + fmt(worst_m));
  return o;
}

Outcome ac3() {
  Outcome o;
  const auto law = OffspringLaw::bernoulli_uniform(4, 0.3);
  const double q = survival_probability(law).extinction_prob;
  // independent: bisection on (0.7 + 0.3 z)^4 - z
  double lo = 0.0, hi = 0.999;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::pow(0.7 + 0.3 * mid, 4) - mid > 0 ? lo : hi) = mid;
  }
  o.require(std::fabs(q - lo) < 1e-9, "fixed point " + fmt(q) + " vs bisection " + fmt(lo));
  const std::size_t trees = 100000;
  std::vector<std::uint8_t> dead(trees);
  for (std::size_t i = 0; i < trees; ++i) {
    dead[i] = !sample_tree(law, 4, 30, derive_seed(303, i)).survived();
  }
  double died = 0;
  for (auto d : dead) died += d;
  const double freq = died / static_cast<double>(trees);
  o.require(std::fabs(freq - q) <= 0.02, "Monte Carlo extinction " + fmt(freq));
  return o;
}

Outcome ac4() {
  Outcome o;
  const Ifs carpet = catalog::sierpinski_carpet();
  const double alpha = 0.5;
  const auto law = OffspringLaw::standard(carpet, alpha);
  const std::size_t trials = 100000;
  for (int n : {2, 4, 6}) {
    Word w;
    for (int i = 0; i < n; ++i) w.push_back(static_cast<std::uint32_t>((3 * i + 1) % 8));
    double exact = 1.0;
    for (auto s : w.symbols()) exact *= law.marginals()[s];
    const double target = std::pow(std::pow(1.0 / 3.0, n), alpha);
    o.require(std::fabs(exact - target) <= 1e-12 * target,
              "n=" + std::to_string(n) + " exact " + fmt(exact));
    double hits = 0;
    for (std::size_t t = 0; t < trials; ++t) hits += word_survives(law, w, derive_seed(404, t));
    const double f = hits / static_cast<double>(trials);
    const double se = std::sqrt(target * (1 - target) / static_cast<double>(trials));
    o.require(std::fabs(f - target) <= 3 * se,
              "n=" + std::to_string(n) + " freq " + fmt(f) + " (" +
                  fmt(std::fabs(f - target) / se) + " SE)");
  }
  return o;
}

Outcome ac5() {
  Outcome o;
  const auto a = OffspringLaw::bernoulli_uniform(4, 0.8);
  const auto b = OffspringLaw::bernoulli_uniform(4, 0.9);
  const auto c = OffspringLaw::bernoulli_uniform(4, 0.72);
  const std::size_t pairs = 10000;
  std::vector<double> inter(pairs), direct(pairs);
  for (std::size_t i = 0; i < pairs; ++i) {
    const auto ta = sample_tree(a, 4, 3, derive_seed(505, 2 * i)).tree;
    const auto tb = sample_tree(b, 4, 3, derive_seed(505, 2 * i + 1)).tree;
    inter[i] = static_cast<double>(intersect(ta, tb).count_at(3));
    direct[i] = static_cast<double>(sample_tree(c, 4, 3, derive_seed(506, i)).tree.count_at(3));
  }
  const Moments x = moments(inter), y = moments(direct);
  const double se_mean = std::sqrt(x.var / x.n + y.var / y.n);
  const double se_var =
      std::sqrt((x.m4 - x.var * x.var) / x.n + (y.m4 - y.var * y.var) / y.n);
  o.require(std::fabs(x.mean - y.mean) <= 4 * se_mean,
            "mean " + fmt(x.mean) + " vs " + fmt(y.mean) + " (" +
                fmt(std::fabs(x.mean - y.mean) / se_mean) + " SE)");
  o.require(std::fabs(x.var - y.var) <= 4 * se_var,
            "variance " + fmt(x.var) + " vs " + fmt(y.var) + " (" +
                fmt(std::fabs(x.var - y.var) / se_var) + " SE)");
  return o;
}

// AC6 and AC7 share one pass over the surviving samples.
struct MandelbrotBatch {
  bool done = false;
  std::vector<DimEstimate> fits;
  std::vector<double> min_projection;
  double expected = 0.0;
  double seconds = 0.0;
};

MandelbrotBatch& mandelbrot_batch() {
  static MandelbrotBatch batch;
  if (batch.done) return batch;
  const auto start = std::chrono::steady_clock::now();
  const auto cfg = mandelbrot_config(3, 2, 0.7);
  const int depth = 8;
  const std::size_t samples = 64;
  const auto scales = level_scales(cfg.ifs, 1, depth);
  const auto dirs = direction_grid(36);
  const double rho = level_scale(cfg.ifs, 7);
  batch.expected = cfg.dimension();
  batch.fits.resize(samples);
  batch.min_projection.resize(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const SymbolTree tree =
        sample_surviving(cfg.law, cfg.ifs.size(), depth, derive_seed(606, i)).sample.tree.pruned();
    batch.fits[i] = sample_box_dimension(cfg.ifs, tree, scales);
    const auto m = projection_measures(cfg.ifs, dirs, rho, &tree);
    batch.min_projection[i] = *std::min_element(m.begin(), m.end());
  }
  batch.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  batch.done = true;
  return batch;
}

Outcome ac6() {
  Outcome o;
  const auto& b = mandelbrot_batch();
  double worst = 0.0, min_r2 = 1.0, mean = 0.0;
  for (const auto& f : b.fits) {
    worst = std::max(worst, std::fabs(f.slope - b.expected));
    min_r2 = std::min(min_r2, f.r2);
    mean += f.slope / static_cast<double>(b.fits.size());
  }
  o.require(b.fits.size() == 64, "64 surviving samples");
  o.require(worst <= 0.15, "mean slope " + fmt(mean) + ", worst |slope - " + fmt(b.expected) +
                               "| = " + fmt(worst));
  o.require(min_r2 >= 0.98, "min r2 " + fmt(min_r2));
  o.require(b.seconds < 300, "batch took " + fmt(std::round(b.seconds)) + " s");
  return o;
}

Outcome ac7() {
  Outcome o;
  const auto& b = mandelbrot_batch();
  const double lowest = *std::min_element(b.min_projection.begin(), b.min_projection.end());
  o.require(lowest > 0.05, "min projection over 64 samples x 36 directions " + fmt(lowest));
  return o;
}

Outcome ac8() {
  Outcome o;
  const Report r = run_default("sections-conservation");
  o.require(summary_number(r, "qualifying_fraction") >= 0.5,
            "qualifying fraction " + fmt(summary_number(r, "qualifying_fraction")));
  const Ifs carpet = catalog::sierpinski_carpet();
  const Direction v = Direction::from_angle(0.0);
  int agree = 0;
  for (int i = 0; i < 20; ++i) {
    const double x = (12.0 * i + 5.0) / 243.0;  // ternary rationals in (0, 1)
    bool ok = true;
    for (int n = 2; n <= 7; ++n) {
      ok = ok && count_slice(carpet, v, x, std::pow(3.0, -n)).count ==
                     oracle::carpet_column_count(x, n);
    }
    agree += ok;
  }
  o.require(agree == 20, std::to_string(agree) + "/20 x agree with the column product at 3^-2..3^-7");
  return o;
}

Outcome ac9() {
  Outcome o;
  const Report r = run_default("mandelbrot-slices");
  for (const auto& c : r.checks) o.require(c.pass && c.value >= 0.3, c.name + " " + fmt(c.value));
  return o;
}

Outcome ac10() {
  Outcome o;
  const Report r = run_default("probe");
  o.require(summary_number(r, "trial_fraction") >= 0.9,
            "qualifying beats non-qualifying in " + fmt(summary_number(r, "trial_fraction")) +
                " of trials");
  return o;
}

Outcome ac11() {
  Outcome o;
  const Ifs rot = catalog::rotational();
  const double eps = 0.3;
  const int q = select_q(rot, eps);
  const FourierModel model(power_system(rot, q), 1);
  const int factors = 24;
  const auto sample = sample_measure(sq_law(rot, eps, q), factors, 1111);
  o.require(fourier_mu(sample, model, Vec{0.0, 0.0}, factors).value ==
                std::complex<double>(1.0, 0.0),
            "mu_hat(0) = 1");
  CounterStream rng(1111, 0, StreamTag::MonteCarlo);
  double max_mod = 0.0, split_err = 0.0, tail_excess = -1.0;
  const auto split = convolution_split(factors, 3);
  for (int i = 0; i < 50; ++i) {
    const double rad = 10.0 * rng.next_double(), ang = 6.283185307179586 * rng.next_double();
    const Vec xi{rad * std::cos(ang), rad * std::sin(ang)};
    for (int n = 0; n < factors; ++n) max_mod = std::max(max_mod, std::abs(model.psi(sample, n, xi)));
    const auto whole = fourier_mu(sample, model, xi, factors).value;
    const auto parts = partial_product(sample, model, split.mu_factors, xi) *
                       partial_product(sample, model, split.eta_factors, xi);
    split_err = std::max(split_err, std::abs(whole - parts));
    for (int N = 1; N < factors; ++N) {
      const auto part = fourier_mu(sample, model, xi, N);
      tail_excess = std::max(tail_excess, std::abs(part.value - whole) - part.tail_bound);
    }
  }
  o.require(max_mod <= 1 + 1e-12, "max factor modulus " + fmt(max_mod));
  o.require(split_err <= 1e-12, "split error " + fmt(split_err));
  o.require(tail_excess <= 1e-12, "max (|truncated - full| - tail bound) " + fmt(tail_excess));
  return o;
}

Outcome ac12() {
  Outcome o;
  const Ifs rot = catalog::rotational();
  const double eps = 0.3, s = moran_dimension(rot);
  const int q = select_q(rot, eps);
  const auto law = sq_law(rot, eps, q);
  const double target = std::pow(0.5, q * (s - 1 - eps));
  const std::size_t draws = 100000;
  std::vector<double> kept_frac(draws);
  double first = 0;
  std::size_t smallest = law.arity();
  for (std::size_t t = 0; t < draws; ++t) {
    const auto sub = law.draw_subset(1212, t);
    smallest = std::min(smallest, sub.size());
    first += std::find(sub.begin(), sub.end(), 0u) != sub.end();
    kept_frac[t] = static_cast<double>(sub.size()) / static_cast<double>(law.arity());
  }
  const double f0 = first / static_cast<double>(draws);
  const double se0 = std::sqrt(target * (1 - target) / static_cast<double>(draws));
  o.require(std::fabs(f0 - target) <= 3 * se0, "q=" + std::to_string(q) + " symbol 0 retention " +
                                                   fmt(f0) + " vs " + fmt(target));
  const Moments m = moments(kept_frac);
  o.require(std::fabs(m.mean - target) <= 3 * std::sqrt(m.var / m.n),
            "pooled retention " + fmt(m.mean));
  o.require(smallest >= 2, "min #S_q = " + std::to_string(smallest));
  const double proxy =
      expected_log_subset_size(law.arity() - 2, law.retain()) / (q * std::log(2.0));
  const auto mc = measure_dimension(law, 0.5, q, 20000, 1213);
  o.require(proxy >= 1 + eps / 2, "proxy " + fmt(proxy) + " (Monte Carlo " + fmt(mc.value) + ")");
  return o;
}

Outcome ac13() {
  Outcome o;
  const Report r = run_default("exceptional-scan");
  for (const auto& c : r.checks) o.require(c.pass, c.name + " " + fmt(c.value));
  const Ifs rot = catalog::rotational();
  double worst = 0.0;
  for (int N : {20, 50}) {
    auto p = params_from_ifs(rot, 1, 0, 2, 2, 1.0 / 3.0, N);
    p.tau_grid_size = 256;
    const auto taus = tau_grid(p);
    const auto betas = beta_grid(16);
    for (double beta : betas) {
      const double fast = membership_fraction(p, beta).max_fraction;
      const double slow = oracle::naive_membership(p, canonical_beta(beta), taus).max_fraction;
      worst = std::max(worst, std::fabs(fast - slow));
    }
  }
  o.require(worst <= 1e-12, "brute-force max |difference| " + fmt(worst));
  return o;
}

Outcome ac14() {
  Outcome o;
  const Report r = run_default("fourier-decay");
  o.require(!r.summary.at("exceptional_member").get<bool>(), "beta outside the exceptional sets");
  o.require(summary_number(r, "min_slope") > 0, "min decay slope " + fmt(summary_number(r, "min_slope")));
  o.require(summary_number(r, "max_degenerate_slope") <= 0.02,
            "degenerate slope " + fmt(summary_number(r, "max_degenerate_slope")));
  return o;
}

Outcome ac15() {
  Outcome o;
  // Sample counts are cut for the three Mandelbrot scenarios so the double
  // run stays short; the code paths are the full ones.
  const json small = {{"samples", 6}};
  int same = 0, total = 0;
  for (const auto& name : scenario_names()) {
    json params = json::object();
    if (name == "percolate-dim" || name == "projection-positivity" || name == "mandelbrot-slices") {
      params = small;
    }
    std::string text[2];
    const int threads[2] = {1, 8};
    for (int k = 0; k < 2; ++k) {
      ScopedThreadCount tc(threads[k]);
      json j = render_json(run_default(name, params));
      j.erase("timing");
      text[k] = j.dump(2);
    }
    ++total;
    if (text[0] == text[1]) {
      ++same;
    } else {
      o.require(false, name + " differs between 1 and 8 threads");
    }
  }
  o.require(same == total, std::to_string(same) + "/" + std::to_string(total) +
                               " scenarios byte-identical at 1 and 8 threads");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria = {
      ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8, ac9, ac10, ac11, ac12, ac13, ac14, ac15};
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!pick.empty() && !pick.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i]();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("error: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("AC%-2d %s  %s  [%.1fs]\n", id, out.pass ? "PASS" : "FAIL", out.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !out.pass;
  }
  return failed == 0 ? 0 : 1;
}
