#include "dimlab/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>

#include "dimlab/catalog.hpp"
#include "dimlab/exceptional.hpp"
#include "dimlab/parallel.hpp"
#include "dimlab/percolation.hpp"
#include "dimlab/random_measures.hpp"
#include "dimlab/rng.hpp"
#include "dimlab/sections.hpp"

namespace dimlab {
namespace {

using nlohmann::json;

struct NameEntry {
  ScenarioName name;
  const char* text;
};

constexpr NameEntry kNames[] = {
    {ScenarioName::Moran, "moran"},
    {ScenarioName::PercolateDim, "percolate-dim"},
    {ScenarioName::ProjectionPositivity, "projection-positivity"},
    {ScenarioName::SectionsConservation, "sections-conservation"},
    {ScenarioName::MandelbrotSlices, "mandelbrot-slices"},
    {ScenarioName::Probe, "probe"},
    {ScenarioName::ExceptionalScan, "exceptional-scan"},
    {ScenarioName::FourierDecay, "fourier-decay"},
};

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::Validation, path + ": " + what);
}

// Comparator used when a threshold is checked; also decides which direction
// counts as loosening.
const std::map<std::string, std::string>& comparators() {
  static const std::map<std::string, std::string> table = {
      {"max_abs_error", "<="},        {"max_slope_error", "<="},
      {"min_r2", ">="},               {"min_projection", ">"},
      {"min_qualifying_fraction", ">="}, {"min_trial_fraction", ">="},
      {"max_increase_cells", "<="},   {"max_subset_violations", "<="},
      {"min_slope", ">"},             {"max_degenerate_slope", "<="},
  };
  return table;
}

bool same_kind(const json& def, const json& v) {
  if (def.is_number_integer()) return v.is_number_integer();
  if (def.is_number_float()) return v.is_number();
  if (def.is_boolean()) return v.is_boolean();
  if (def.is_string()) return v.is_string();
  if (def.is_array()) return v.is_array();
  if (def.is_object()) return v.is_object();
  return false;
}

int geti(const json& p, const char* key) { return p.at(key).get<int>(); }
double getd(const json& p, const char* key) { return p.at(key).get<double>(); }
std::string gets(const json& p, const char* key) { return p.at(key).get<std::string>(); }

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) invalid("params." + key, what);
}

void require_positive_int(const json& p, const char* key, int lo = 1) {
  require(geti(p, key) >= lo, key, "must be >= " + std::to_string(lo));
}

void require_ifs(const json& p, const char* key) {
  try {
    load_ifs(gets(p, key));
  } catch (const Error& e) {
    invalid(std::string("params.") + key, e.what());
  }
}

void validate_mandelbrot(const json& p) {
  require(geti(p, "M") >= 2, "M", "must be >= 2");
  require(geti(p, "d") >= 1 && geti(p, "d") <= 3, "d", "must be 1, 2 or 3");
  const double pr = getd(p, "p");
  require(pr > 0.0 && pr <= 1.0, "p", "must lie in (0, 1]");
  require_positive_int(p, "depth", 2);
  require_positive_int(p, "samples");
  require_positive_int(p, "max_attempts");
}

void validate_params(ScenarioName name, const json& p) {
  switch (name) {
    case ScenarioName::Moran: {
      const auto& cases = p.at("cases");
      require(!cases.empty(), "cases", "needs at least one case");
      for (std::size_t i = 0; i < cases.size(); ++i) {
        const std::string path = "cases[" + std::to_string(i) + "]";
        const auto& c = cases[i];
        require(c.is_object() && c.contains("ratios") && c["ratios"].is_array() &&
                    c["ratios"].size() >= 2,
                path + ".ratios", "expected a list of at least 2 ratios");
        for (const auto& r : c["ratios"]) {
          require(r.is_number() && r.get<double>() > 0.0 && r.get<double>() < 1.0,
                  path + ".ratios", "ratios must lie in (0, 1)");
        }
        if (c.contains("expected")) {
          require(c["expected"].is_number(), path + ".expected", "expected a number");
        }
      }
      break;
    }
    case ScenarioName::PercolateDim:
      validate_mandelbrot(p);
      require(geti(p, "fit_from_level") >= 0 && geti(p, "depth") - geti(p, "fit_from_level") >= 2,
              "fit_from_level", "needs at least 3 fitted levels");
      break;
    case ScenarioName::ProjectionPositivity:
      validate_mandelbrot(p);
      require(geti(p, "level") >= 0 && geti(p, "level") <= geti(p, "depth"), "level",
              "must lie in [0, depth]");
      require_positive_int(p, "directions");
      break;
    case ScenarioName::SectionsConservation:
      require_ifs(p, "ifs");
      require(getd(p, "epsilon") >= 0.0, "epsilon", "must be >= 0");
      require(getd(p, "scale_base") > 1.0, "scale_base", "must be > 1");
      require(std::abs(geti(p, "scale_from") - geti(p, "scale_to")) >= 2, "scale_to",
              "needs at least 3 scales");
      require_positive_int(p, "grid");
      break;
    case ScenarioName::MandelbrotSlices:
      validate_mandelbrot(p);
      require(getd(p, "epsilon") >= 0.0, "epsilon", "must be >= 0");
      require(p.at("betas").is_array() && !p.at("betas").empty(), "betas", "needs directions");
      for (const auto& b : p.at("betas")) require(b.is_number(), "betas", "expected numbers");
      require(geti(p, "scale_from_level") >= 0 &&
                  geti(p, "depth") - geti(p, "scale_from_level") >= 2,
              "scale_from_level", "needs at least 3 scales");
      require_positive_int(p, "grid");
      break;
    case ScenarioName::Probe:
      require_ifs(p, "ifs");
      require(getd(p, "alpha_offset") > 0.0, "alpha_offset", "must be > 0");
      require(getd(p, "epsilon") >= 0.0, "epsilon", "must be >= 0");
      require_positive_int(p, "depth");
      require_positive_int(p, "trials");
      require_positive_int(p, "grid");
      require(getd(p, "scale_base") > 1.0, "scale_base", "must be > 1");
      require(std::abs(geti(p, "scale_from") - geti(p, "scale_to")) >= 2, "scale_to",
              "needs at least 3 scales");
      break;
    case ScenarioName::ExceptionalScan: {
      ExceptionalParams ep;
      ep.r = getd(p, "r");
      ep.gamma = getd(p, "gamma");
      ep.b = getd(p, "b");
      ep.theta = getd(p, "theta");
      ep.q = geti(p, "q");
      ep.k = geti(p, "k");
      ep.delta = getd(p, "delta");
      ep.tau_grid_size = geti(p, "tau_grid");
      require(p.at("Ns").is_array() && p.at("Ns").size() >= 2, "Ns", "needs at least two N");
      for (const auto& n : p.at("Ns")) {
        require(n.is_number_integer() && n.get<int>() >= 2, "Ns", "entries must be >= 2");
      }
      const double ds = getd(p, "delta_small");
      require(ds > 0.0 && ds <= ep.delta, "delta_small", "must lie in (0, delta]");
      require_positive_int(p, "beta_grid");
      try {
        ep.N = 2;
        ep.validate();
      } catch (const Error& e) {
        invalid("params", e.what());
      }
      break;
    }
    case ScenarioName::FourierDecay:
      require_ifs(p, "ifs");
      require_ifs(p, "degenerate_ifs");
      require(getd(p, "epsilon") > 0.0, "epsilon", "must be > 0");
      require(geti(p, "q") >= 0, "q", "must be >= 0 (0 selects automatically)");
      require(geti(p, "k") >= 2, "k", "must be >= 2");
      require(geti(p, "n_lo") >= 0 && geti(p, "n_hi") > geti(p, "n_lo"), "n_hi",
              "must exceed n_lo");
      require_positive_int(p, "taus");
      require_positive_int(p, "samples");
      require_positive_int(p, "exceptional_N", 2);
      break;
  }
}

json merge_section(const json& defaults, const json& user, const std::string& section) {
  json out = defaults;
  if (user.is_null()) return out;
  if (!user.is_object()) invalid(section, "expected an object");
  for (const auto& [key, value] : user.items()) {
    if (!defaults.contains(key)) invalid(section + "." + key, "unknown key");
    if (!same_kind(defaults[key], value)) {
      invalid(section + "." + key, "expected " + std::string(defaults[key].type_name()) +
                                       ", got " + value.type_name());
    }
    out[key] = value;
  }
  return out;
}

// ---- runners ----------------------------------------------------------

void run_moran(const json& p, const json& t, Report& rep) {
  rep.columns = {"label", "maps", "dimension", "expected", "abs_error"};
  double worst = 0.0;
  for (const auto& c : p.at("cases")) {
    const auto ratios = c.at("ratios").get<std::vector<double>>();
    const double s = moran_dimension(ratios, 4.0);
    const std::string label = c.value("label", std::string());
    if (c.contains("expected")) {
      const double err = std::fabs(s - c["expected"].get<double>());
      worst = std::max(worst, err);
      rep.rows.push_back({label, static_cast<std::int64_t>(ratios.size()), s,
                          c["expected"].get<double>(), err});
    } else {
      rep.rows.push_back({label, static_cast<std::int64_t>(ratios.size()), s,
                          std::numeric_limits<double>::quiet_NaN(),
                          std::numeric_limits<double>::quiet_NaN()});
    }
  }
  rep.summary["max_abs_error"] = worst;
  rep.add_check("max_abs_error", worst, "<=", getd(t, "max_abs_error"));
}

struct SampleInfo {
  std::uint64_t seed = 0;
  std::size_t resamples = 0;
  std::size_t count_at_depth = 0;
};

// Draws the configured number of surviving Mandelbrot samples and hands each
// pruned tree to visit(i, info, tree). Trees are dropped after the visit, so
// memory stays bounded by the worker count.
template <class Visit>
std::vector<SampleInfo> for_each_surviving(const MandelbrotConfig& cfg, const json& p,
                                           std::uint64_t seed, Visit&& visit) {
  const auto n = static_cast<std::size_t>(geti(p, "samples"));
  const int depth = geti(p, "depth");
  const auto attempts = static_cast<std::size_t>(geti(p, "max_attempts"));
  std::vector<SampleInfo> info(n);
  parallel_for(n, [&](std::size_t i) {
    SymbolTree pruned;
    {
      const ConditionedSample cs =
          sample_surviving(cfg.law, cfg.ifs.size(), depth, derive_seed(seed, i), attempts);
      info[i] = SampleInfo{cs.sample.seed, cs.resamples, cs.sample.tree.count_at(depth)};
      pruned = cs.sample.tree.pruned();
    }
    visit(i, info[i], pruned);
  });
  return info;
}

MandelbrotConfig mandelbrot_from(const json& p) {
  return mandelbrot_config(geti(p, "M"), geti(p, "d"), getd(p, "p"));
}

void run_percolate_dim(const json& p, const json& t, std::uint64_t seed, Report& rep) {
  const MandelbrotConfig cfg = mandelbrot_from(p);
  const auto scales = level_scales(cfg.ifs, geti(p, "fit_from_level"), geti(p, "depth"));
  std::vector<DimEstimate> est(static_cast<std::size_t>(geti(p, "samples")));
  const auto info = for_each_surviving(cfg, p, seed, [&](std::size_t i, const SampleInfo&,
                                                         const SymbolTree& tree) {
    est[i] = sample_box_dimension(cfg.ifs, tree, scales);
  });
  rep.columns = {"sample", "seed", "resamples", "count_at_depth", "slope", "r2"};
  double mean = 0.0, min_r2 = 1.0;
  for (std::size_t i = 0; i < info.size(); ++i) {
    rep.rows.push_back({static_cast<std::int64_t>(i), std::to_string(info[i].seed),
                        static_cast<std::int64_t>(info[i].resamples),
                        static_cast<std::int64_t>(info[i].count_at_depth), est[i].slope,
                        est[i].r2});
    mean += est[i].slope;
    min_r2 = std::min(min_r2, est[i].r2);
  }
  mean /= static_cast<double>(info.size());
  const double expected = cfg.dimension();
  rep.summary["expected_dimension"] = expected;
  rep.summary["percolation_dimension"] = percolation_dimension(cfg.law, cfg.ifs);
  rep.summary["mean_slope"] = mean;
  rep.summary["min_r2"] = min_r2;
  rep.add_check("slope_error", std::fabs(mean - expected), "<=", getd(t, "max_slope_error"));
  rep.add_check("min_r2", min_r2, ">=", getd(t, "min_r2"));
}

void run_projection_positivity(const json& p, const json& t, std::uint64_t seed, Report& rep) {
  const MandelbrotConfig cfg = mandelbrot_from(p);
  const auto dirs = direction_grid(geti(p, "directions"));
  const double rho = level_scale(cfg.ifs, geti(p, "level"));
  std::vector<std::vector<double>> measures(static_cast<std::size_t>(geti(p, "samples")));
  for_each_surviving(cfg, p, seed, [&](std::size_t i, const SampleInfo&, const SymbolTree& tree) {
    measures[i] = projection_measures(cfg.ifs, dirs, rho, &tree);
  });
  rep.columns = {"sample", "beta", "measure"};
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < measures.size(); ++i) {
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      rep.rows.push_back({static_cast<std::int64_t>(i), dirs[j].angle(), measures[i][j]});
      lowest = std::min(lowest, measures[i][j]);
    }
  }
  rep.summary["rho"] = rho;
  rep.summary["min_measure"] = lowest;
  rep.add_check("min_projection", lowest, ">", getd(t, "min_projection"));
}

void run_sections_conservation(const json& p, const json& t, Report& rep) {
  const Ifs ifs = load_ifs(gets(p, "ifs"));
  const Direction dir = Direction::from_angle(getd(p, "beta"));
  const auto scales = scale_ladder(getd(p, "scale_base"), geti(p, "scale_from"),
                                   geti(p, "scale_to"));
  const auto grid = default_x_grid(ifs, dir, scales, static_cast<std::size_t>(geti(p, "grid")));
  const auto prof = conservation_profile(ifs, dir, getd(p, "epsilon"), grid, scales);
  rep.columns = {"x", "slope", "r2", "valid", "qualifies"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    rep.rows.push_back({grid[i], prof.slopes[i].slope, prof.slopes[i].r2,
                        static_cast<bool>(prof.valid[i]), static_cast<bool>(prof.qualifies[i])});
  }
  rep.summary["reference_dimension"] = moran_dimension(ifs);
  rep.summary["threshold"] = prof.threshold;
  rep.summary["qualifying_fraction"] = prof.qualifying_fraction;
  rep.summary["qualifying_length"] = prof.qualifying_length;
  rep.add_check("qualifying_fraction", prof.qualifying_fraction, ">=",
                getd(t, "min_qualifying_fraction"));
}

void run_mandelbrot_slices(const json& p, const json& t, std::uint64_t seed, Report& rep) {
  const MandelbrotConfig cfg = mandelbrot_from(p);
  const auto scales = level_scales(cfg.ifs, geti(p, "scale_from_level"), geti(p, "depth"));
  const auto betas = p.at("betas").get<std::vector<double>>();
  const double eps = getd(p, "epsilon");
  const auto grid_size = static_cast<std::size_t>(geti(p, "grid"));
  std::vector<std::vector<double>> grids;
  for (double b : betas) {
    grids.push_back(default_x_grid(cfg.ifs, Direction::from_angle(b), scales, grid_size));
  }
  const auto n = static_cast<std::size_t>(geti(p, "samples"));
  std::vector<std::vector<std::pair<double, double>>> res(n);
  for_each_surviving(cfg, p, seed, [&](std::size_t i, const SampleInfo&, const SymbolTree& tree) {
    ProfileOptions opt;
    opt.reference_dimension = cfg.dimension();
    opt.tree = &tree;
    for (std::size_t b = 0; b < betas.size(); ++b) {
      const auto prof = conservation_profile(cfg.ifs, Direction::from_angle(betas[b]), eps,
                                             grids[b], scales, opt);
      res[i].emplace_back(prof.qualifying_fraction, prof.qualifying_length);
    }
  });
  rep.columns = {"sample", "beta", "qualifying_fraction", "qualifying_length"};
  std::vector<double> mean(betas.size(), 0.0);
  for (std::size_t b = 0; b < betas.size(); ++b) {
    for (std::size_t i = 0; i < n; ++i) {
      rep.rows.push_back({static_cast<std::int64_t>(i), betas[b], res[i][b].first,
                          res[i][b].second});
      mean[b] += res[i][b].first;
    }
    mean[b] /= static_cast<double>(n);
  }
  rep.summary["reference_dimension"] = cfg.dimension();
  rep.summary["threshold"] = cfg.dimension() - 1.0 - eps;
  for (std::size_t b = 0; b < betas.size(); ++b) {
    const std::string key = "mean_qualifying_fraction[beta=" + format_number(betas[b]) + "]";
    rep.summary[key] = mean[b];
    rep.add_check(key, mean[b], ">=", getd(t, "min_qualifying_fraction"));
  }
}

void run_probe(const json& p, const json& t, std::uint64_t seed, Report& rep) {
  const Ifs ifs = load_ifs(gets(p, "ifs"));
  const double s = moran_dimension(ifs);
  const double alpha = s - 1.0 - getd(p, "alpha_offset");
  if (!(alpha > 0.0)) invalid("params.alpha_offset", "gives alpha <= 0");
  const Direction dir = Direction::from_angle(getd(p, "beta"));
  const auto scales = scale_ladder(getd(p, "scale_base"), geti(p, "scale_from"),
                                   geti(p, "scale_to"));
  const auto grid = default_x_grid(ifs, dir, scales, static_cast<std::size_t>(geti(p, "grid")));
  const auto prof = conservation_profile(ifs, dir, getd(p, "epsilon"), grid, scales);
  const auto probe = probe_sections(ifs, alpha, dir, grid, geti(p, "depth"), geti(p, "trials"),
                                    seed);
  std::size_t nq = 0;
  for (bool q : prof.qualifies) nq += q ? 1 : 0;
  if (nq == 0 || nq == grid.size()) {
    invalid("params.epsilon", "every grid point falls on one side of the threshold");
  }
  // Per trial: mean hit over qualifying x against non-qualifying x, once over
  // the whole grid and once over x whose section is nonempty at >= 3 scales.
  std::size_t n_inner = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) n_inner += prof.valid[i] && !prof.qualifies[i];
  std::size_t wins = 0, inner_wins = 0;
  for (const auto& hits : probe.hits) {
    double hq = 0.0, hn = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      (prof.qualifies[i] ? hq : hn) += hits[i];
      if (prof.valid[i] && !prof.qualifies[i]) hi += hits[i];
    }
    hq /= static_cast<double>(nq);
    if (hq > hn / static_cast<double>(grid.size() - nq)) ++wins;
    if (n_inner > 0 && hq > hi / static_cast<double>(n_inner)) ++inner_wins;
  }
  rep.columns = {"x", "qualifies", "slope", "hit_frequency"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    rep.rows.push_back({grid[i], static_cast<bool>(prof.qualifies[i]), prof.slopes[i].slope,
                        probe.hit_frequency[i]});
  }
  std::size_t survived = 0;
  for (bool b : probe.survived) survived += b ? 1 : 0;
  const double fraction = static_cast<double>(wins) / static_cast<double>(probe.hits.size());
  rep.summary["alpha"] = alpha;
  rep.summary["qualifying_fraction"] = prof.qualifying_fraction;
  rep.summary["surviving_trials"] = survived;
  rep.summary["trial_fraction"] = fraction;
  rep.summary["interior_trial_fraction"] =
      static_cast<double>(inner_wins) / static_cast<double>(probe.hits.size());
  rep.add_check("trial_fraction", fraction, ">=", getd(t, "min_trial_fraction"));
}

void run_exceptional_scan(const json& p, const json& t, Report& rep) {
  ExceptionalParams ep;
  ep.r = getd(p, "r");
  ep.gamma = getd(p, "gamma");
  ep.b = getd(p, "b");
  ep.theta = getd(p, "theta");
  ep.q = geti(p, "q");
  ep.k = geti(p, "k");
  ep.delta = getd(p, "delta");
  ep.tau_grid_size = geti(p, "tau_grid");
  const auto betas = beta_grid(static_cast<std::size_t>(geti(p, "beta_grid")));
  const auto Ns = p.at("Ns").get<std::vector<int>>();
  rep.columns = {"N", "delta", "members", "member_fraction"};
  std::vector<std::size_t> counts;
  double worst_increase = -std::numeric_limits<double>::infinity();
  ScanResult first;
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    ep.N = Ns[i];
    ScanResult scan = grid_scan(ep, betas);
    rep.rows.push_back({static_cast<std::int64_t>(ep.N), ep.delta,
                        static_cast<std::int64_t>(scan.members.size()), scan.member_fraction});
    counts.push_back(scan.members.size());
    if (i > 0) {
      worst_increase = std::max(worst_increase, static_cast<double>(counts[i]) -
                                                    static_cast<double>(counts[i - 1]));
    }
    if (i == 0) first = std::move(scan);
  }
  // Smaller delta: members must form a subset, decided from the same maxima.
  const double ds = getd(p, "delta_small");
  std::size_t small_members = 0, violations = 0;
  for (const auto& r : first.results) {
    const bool member_small = r.max_fraction > 1.0 - ds;
    if (member_small) {
      ++small_members;
      if (!r.is_member) ++violations;
    }
  }
  rep.rows.push_back({static_cast<std::int64_t>(Ns.front()), ds,
                      static_cast<std::int64_t>(small_members),
                      static_cast<double>(small_members) / static_cast<double>(betas.size())});
  rep.summary["threshold"] = ep.threshold();
  rep.summary["ell"] = ep.ell();
  rep.summary["worst_increase"] = worst_increase;
  rep.add_check("increase_cells", worst_increase, "<=", getd(t, "max_increase_cells"));
  rep.add_check("subset_violations", static_cast<double>(violations), "<=",
                getd(t, "max_subset_violations"));
}

// Factors needed so the phase tail at the largest t is below 1e-12.
int decay_depth(const FourierModel& model, int k, int n_hi) {
  const double t_max = std::pow(model.block_ratio(), -k * (n_hi + 1.0));
  int n = 0;
  while (model.tail_bound(Vec{t_max, 0.0}, n) > 1e-12 && n < 10000) ++n;
  return std::max(n, k * (n_hi + 1) + 1);
}

void run_fourier_decay(const json& p, const json& t, std::uint64_t seed, Report& rep) {
  const Ifs ifs = load_ifs(gets(p, "ifs"));
  const Ifs degenerate = load_ifs(gets(p, "degenerate_ifs"));
  const double eps = getd(p, "epsilon");
  int q = geti(p, "q");
  if (q == 0) q = select_q(ifs, eps);
  const int k = geti(p, "k");
  const int n_lo = geti(p, "n_lo"), n_hi = geti(p, "n_hi");
  const Direction dir = Direction::from_angle(getd(p, "beta"));
  const auto law = sq_law(ifs, eps, q);

  const FourierModel model(power_system(ifs, q), 1);
  const FourierModel flat(power_system(degenerate, q), 1);
  const int depth = decay_depth(model, k, n_hi);
  const auto n = static_cast<std::size_t>(geti(p, "samples"));
  std::vector<DecayEstimate> live(n), dead(n);
  for (std::size_t i = 0; i < n; ++i) {
    const MeasureSample sample = sample_measure(law, depth, derive_seed(seed, i));
    live[i] = fourier_decay(sample, model, k, dir, n_lo, n_hi, geti(p, "taus"));
    dead[i] = fourier_decay(sample, flat, k, dir, n_lo, n_hi, geti(p, "taus"));
  }
  rep.columns = {"sample", "system", "t", "modulus", "tail_bound"};
  double min_slope = std::numeric_limits<double>::infinity();
  double max_dead = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < live[i].t.size(); ++j) {
      rep.rows.push_back({static_cast<std::int64_t>(i), std::string("live"), live[i].t[j],
                          live[i].modulus[j], live[i].tail_bound[j]});
    }
    for (std::size_t j = 0; j < dead[i].t.size(); ++j) {
      rep.rows.push_back({static_cast<std::int64_t>(i), std::string("degenerate"), dead[i].t[j],
                          dead[i].modulus[j], dead[i].tail_bound[j]});
    }
    min_slope = std::min(min_slope, live[i].exact_zero ? std::numeric_limits<double>::infinity()
                                                       : live[i].fit.slope);
    max_dead = std::max(max_dead, dead[i].fit.slope);
  }

  // Is beta in the finite exceptional sets of any translation pair?
  bool member = false;
  for (std::size_t a = 0; a < ifs.size(); ++a) {
    for (std::size_t b = a + 1; b < ifs.size(); ++b) {
      ExceptionalParams ep = params_from_ifs(ifs, a, b, q, k, 1.0 / 3.0, geti(p, "exceptional_N"));
      ep.tau_grid_size = 1024;
      if (ep.b == 0.0) continue;
      member = member || membership_fraction(ep, dir.angle()).is_member;
    }
  }
  rep.summary["q"] = q;
  rep.summary["retain_probability"] = law.retain();
  rep.summary["sample_depth"] = depth;
  rep.summary["exceptional_member"] = member;
  rep.summary["min_slope"] = min_slope;
  rep.summary["max_degenerate_slope"] = max_dead;
  rep.add_check("min_slope", min_slope, ">", getd(t, "min_slope"));
  rep.add_check("max_degenerate_slope", max_dead, "<=", getd(t, "max_degenerate_slope"));
}

}  // namespace

std::optional<ScenarioName> scenario_from_string(const std::string& s) {
  for (const auto& e : kNames) {
    if (s == e.text) return e.name;
  }
  return std::nullopt;
}

const char* to_string(ScenarioName name) {
  for (const auto& e : kNames) {
    if (e.name == name) return e.text;
  }
  return "unknown";
}

std::vector<std::string> scenario_names() {
  std::vector<std::string> out;
  for (const auto& e : kNames) out.emplace_back(e.text);
  return out;
}

json default_params(ScenarioName name) {
  switch (name) {
    case ScenarioName::Moran:
      return {{"cases",
               {{{"label", "halves-and-quarters"}, {"ratios", {0.5, 0.25, 0.25}}, {"expected", 1.0}},
                {{"label", "three-halves"},
                 {"ratios", {0.5, 0.5, 0.5}},
                 {"expected", std::log(3.0) / std::log(2.0)}}}}};
    case ScenarioName::PercolateDim:
      return {{"M", 3}, {"d", 2}, {"p", 0.7}, {"depth", 8}, {"samples", 64},
              {"fit_from_level", 1}, {"max_attempts", 100000}};
    case ScenarioName::ProjectionPositivity:
      return {{"M", 3}, {"d", 2}, {"p", 0.7}, {"depth", 8}, {"samples", 64},
              {"level", 7}, {"directions", 36}, {"max_attempts", 100000}};
    case ScenarioName::SectionsConservation:
      return {{"ifs", "catalog:sierpinski-carpet"}, {"beta", 0.0}, {"epsilon", 0.15},
              {"scale_base", 3.0}, {"scale_from", -2}, {"scale_to", -7}, {"grid", 512}};
    case ScenarioName::MandelbrotSlices:
      return {{"M", 3}, {"d", 2}, {"p", 0.85}, {"depth", 7}, {"samples", 16},
              {"epsilon", 0.25}, {"betas", {0.0, 0.5, 1.0}}, {"scale_from_level", 2},
              {"grid", 256}, {"max_attempts", 100000}};
    case ScenarioName::Probe:
      return {{"ifs", "catalog:sierpinski-carpet"}, {"alpha_offset", 0.1}, {"beta", 0.0},
              {"epsilon", 0.1}, {"depth", 8}, {"trials", 200}, {"grid", 256},
              {"scale_base", 3.0}, {"scale_from", -2}, {"scale_to", -7}};
    case ScenarioName::ExceptionalScan:
      return {{"r", 0.5}, {"gamma", 0.0}, {"b", 1.0}, {"theta", 1.0}, {"q", 2}, {"k", 2},
              {"delta", 1.0 / 3.0}, {"delta_small", 0.2}, {"Ns", {50, 100, 200}},
              {"beta_grid", 2048}, {"tau_grid", 4096}};
    case ScenarioName::FourierDecay:
      return {{"ifs", "catalog:rotational"}, {"degenerate_ifs", "catalog:degenerate-rotational"},
              {"epsilon", 0.3}, {"q", 0}, {"k", 3}, {"beta", 0.7}, {"n_lo", 2}, {"n_hi", 6},
              {"taus", 4}, {"samples", 8}, {"exceptional_N", 100}};
  }
  return json::object();
}

json default_thresholds(ScenarioName name) {
  switch (name) {
    case ScenarioName::Moran: return {{"max_abs_error", 1e-10}};
    case ScenarioName::PercolateDim: return {{"max_slope_error", 0.15}, {"min_r2", 0.98}};
    case ScenarioName::ProjectionPositivity: return {{"min_projection", 0.05}};
    case ScenarioName::SectionsConservation: return {{"min_qualifying_fraction", 0.5}};
    case ScenarioName::MandelbrotSlices: return {{"min_qualifying_fraction", 0.3}};
    case ScenarioName::Probe: return {{"min_trial_fraction", 0.9}};
    case ScenarioName::ExceptionalScan:
      return {{"max_increase_cells", 1.0}, {"max_subset_violations", 0.0}};
    case ScenarioName::FourierDecay: return {{"min_slope", 0.0}, {"max_degenerate_slope", 0.02}};
  }
  return json::object();
}

Scenario parse_scenario(const json& config, std::optional<std::string> name_hint,
                        std::optional<std::uint64_t> seed_override) {
  if (!config.is_object()) invalid("config", "expected an object");
  for (const auto& [key, value] : config.items()) {
    if (key != "scenario" && key != "seed" && key != "params" && key != "thresholds" &&
        key != "override") {
      invalid(key, "unknown key");
    }
  }
  std::string name_text;
  if (config.contains("scenario")) {
    if (!config["scenario"].is_string()) invalid("scenario", "expected a string");
    name_text = config["scenario"].get<std::string>();
    if (name_hint && *name_hint != name_text) {
      invalid("scenario", "config names '" + name_text + "' but '" + *name_hint + "' was requested");
    }
  } else if (name_hint) {
    name_text = *name_hint;
  } else {
    invalid("scenario", "required");
  }
  const auto name = scenario_from_string(name_text);
  if (!name) invalid("scenario", "unknown scenario '" + name_text + "'");

  Scenario sc;
  sc.name = *name;
  if (seed_override) {
    sc.seed = *seed_override;
  } else {
    if (!config.contains("seed")) invalid("seed", "required");
    const auto& s = config["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      invalid("seed", "expected a non-negative integer");
    }
    sc.seed = s.get<std::uint64_t>();
  }
  if (config.contains("override")) {
    if (!config["override"].is_boolean()) invalid("override", "expected a boolean");
    sc.override_thresholds = config["override"].get<bool>();
  }
  sc.params = merge_section(default_params(sc.name), config.value("params", json()), "params");
  validate_params(sc.name, sc.params);

  const json defaults = default_thresholds(sc.name);
  sc.thresholds = merge_section(defaults, config.value("thresholds", json()), "thresholds");
  for (const auto& [key, value] : sc.thresholds.items()) {
    const std::string& op = comparators().at(key);
    const double v = value.get<double>(), d = defaults[key].get<double>();
    const bool looser = (op[0] == '>') ? v < d : v > d;
    if (looser && !sc.override_thresholds) {
      invalid("thresholds." + key, "loosens the default " + format_number(d) +
                                       "; set \"override\": true to allow this");
    }
  }
  return sc;
}

Report run(const Scenario& scenario) {
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  rep.scenario = to_string(scenario.name);
  rep.seed = scenario.seed;
  rep.config = {{"scenario", rep.scenario},
                {"seed", scenario.seed},
                {"params", scenario.params},
                {"thresholds", scenario.thresholds},
                {"override", scenario.override_thresholds}};
  const json& p = scenario.params;
  const json& t = scenario.thresholds;
  switch (scenario.name) {
    case ScenarioName::Moran: run_moran(p, t, rep); break;
    case ScenarioName::PercolateDim: run_percolate_dim(p, t, scenario.seed, rep); break;
    case ScenarioName::ProjectionPositivity:
      run_projection_positivity(p, t, scenario.seed, rep);
      break;
    case ScenarioName::SectionsConservation: run_sections_conservation(p, t, rep); break;
    case ScenarioName::MandelbrotSlices: run_mandelbrot_slices(p, t, scenario.seed, rep); break;
    case ScenarioName::Probe: run_probe(p, t, scenario.seed, rep); break;
    case ScenarioName::ExceptionalScan: run_exceptional_scan(p, t, rep); break;
    case ScenarioName::FourierDecay: run_fourier_decay(p, t, scenario.seed, rep); break;
  }
  rep.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace dimlab
