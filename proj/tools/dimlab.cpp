// dimlab command-line front end.
//
//   dimlab <scenario> --config <file> [--seed N] [--out path] [--format csv|json]
//   dimlab percolate|mandelbrot|sections|probe|fourier|measure-dim|exceptional|catalog|moran ...
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or validation error.

#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dimlab/catalog.hpp"
#include "dimlab/exceptional.hpp"
#include "dimlab/parallel.hpp"
#include "dimlab/percolation.hpp"
#include "dimlab/random_measures.hpp"
#include "dimlab/report.hpp"
#include "dimlab/rng.hpp"
#include "dimlab/scenarios.hpp"
#include "dimlab/sections.hpp"

using namespace dimlab;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

// Writes to a file, or stdout for "" and "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

// "base:from:to", e.g. "3:-2:-7".
std::vector<double> parse_ladder(const std::string& spec) {
  double base = 0;
  int from = 0, to = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(spec);
  if (!(in >> base >> c1 >> from >> c2 >> to) || c1 != ':' || c2 != ':') {
    throw Error(ErrorCode::Validation, "scales: expected base:from:to, got '" + spec + "'");
  }
  return scale_ladder(base, from, to);
}

std::pair<int, int> parse_range(const std::string& spec) {
  int lo = 0, hi = 0;
  char c = 0;
  std::istringstream in(spec);
  if (!(in >> lo >> c >> hi) || c != ':') {
    throw Error(ErrorCode::Validation, "ladder: expected lo:hi, got '" + spec + "'");
  }
  return {lo, hi};
}

OffspringLaw parse_law(const std::string& spec, const Ifs& ifs) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "deterministic") return OffspringLaw::deterministic(ifs.size());
  if (kind == "standard") return OffspringLaw::standard(ifs, std::stod(arg));
  if (kind == "uniform") return OffspringLaw::bernoulli_uniform(ifs.size(), std::stod(arg));
  if (kind == "table") {
    std::ifstream in(arg);
    if (!in) throw Error(ErrorCode::Io, "cannot read law table '" + arg + "'");
    const auto j = nlohmann::json::parse(in);
    std::vector<OffspringLaw::TableEntry> entries;
    for (const auto& e : j.at("entries")) {
      entries.push_back({e.at("mask").get<std::uint64_t>(), e.at("probability").get<double>()});
    }
    return OffspringLaw::table(ifs.size(), std::move(entries));
  }
  throw Error(ErrorCode::Validation, "law: expected standard:<a>, uniform:<p>, deterministic "
                                     "or table:<file>, got '" + spec + "'");
}

void write_percolation(const OffspringLaw& law, const Ifs& ifs, int depth, int seeds,
                       std::uint64_t seed, std::ostream& out) {
  std::vector<PercolationSample> samples(static_cast<std::size_t>(seeds),
                                         PercolationSample{law, 0, {}});
  parallel_for(samples.size(), [&](std::size_t i) {
    samples[i] = sample_tree(law, ifs.size(), depth, derive_seed(seed, i));
  });
  out << "seed,survived,count_at_depth,generation_counts\n";
  for (const auto& s : samples) {
    out << s.seed << ',' << (s.survived() ? "true" : "false") << ','
        << s.tree.count_at(depth) << ',';
    const auto g = s.tree.generation_counts();
    for (std::size_t k = 0; k < g.size(); ++k) out << (k ? ";" : "") << g[k];
    out << '\n';
  }
}

int run_scenario_mode(int argc, char** argv) {
  CLI::App app{"dimlab scenario runner"};
  std::string name, config_path, out_path, format = "json";
  std::optional<std::uint64_t> seed;
  int threads = 0;
  app.add_option("scenario", name, "Scenario name")->required();
  app.add_option("--config", config_path, "Scenario config (JSON)")->required();
  app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--out", out_path, "Report path (default stdout)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", threads, "Worker threads (default DIMLAB_THREADS)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : kExitUsage;
  }
  if (threads > 0) set_thread_count(threads);

  std::ifstream in(config_path);
  if (!in) throw Error(ErrorCode::Validation, "config: cannot read '" + config_path + "'");
  nlohmann::json config;
  try {
    in >> config;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Validation, "config: " + std::string(e.what()));
  }
  const Scenario sc = parse_scenario(config, name, seed);
  const Report rep = run(sc);
  emit_report(rep, report_format_from_string(format), out_path);
  for (const auto& c : rep.checks) {
    std::cerr << (c.pass ? "pass " : "FAIL ") << c.name << ' ' << format_number(c.value) << ' '
              << c.comparator << ' ' << format_number(c.threshold) << '\n';
  }
  return rep.passed() ? 0 : kExitFail;
}

int run_tool_mode(int argc, char** argv) {
  CLI::App app{"dimlab: dimension experiments for self-similar sets and their sections"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default DIMLAB_THREADS)");

  std::string ifs_src = "catalog:sierpinski-carpet", out_path;
  std::uint64_t seed = 1;

  // percolate
  auto* perc = app.add_subcommand("percolate", "Sample percolation trees");
  std::string law_spec = "standard:0.3";
  int depth = 8, seeds = 100;
  perc->add_option("--ifs", ifs_src, "IFS file or catalog:<name>");
  perc->add_option("--law", law_spec, "standard:<a> | uniform:<p> | deterministic | table:<file>");
  perc->add_option("--depth", depth);
  perc->add_option("--seeds", seeds, "Number of samples");
  perc->add_option("--seed", seed, "Base seed");
  perc->add_option("--out", out_path);

  // mandelbrot
  auto* mand = app.add_subcommand("mandelbrot", "Mandelbrot percolation samples");
  int M = 3, d = 2;
  double p = 0.7;
  mand->add_option("--M", M);
  mand->add_option("--d", d);
  mand->add_option("--p", p);
  mand->add_option("--depth", depth);
  mand->add_option("--seeds", seeds);
  mand->add_option("--seed", seed);
  mand->add_option("--out", out_path);

  // sections
  auto* sect = app.add_subcommand("sections", "Section counts and conservation profile");
  double beta = 0.0, eps = 0.1;
  std::string scales_spec = "3:-2:-7";
  int grid = 512;
  sect->add_option("--ifs", ifs_src);
  sect->add_option("--beta", beta);
  sect->add_option("--eps", eps);
  sect->add_option("--scales", scales_spec, "base:from:to");
  sect->add_option("--grid", grid);
  sect->add_option("--out", out_path);

  // probe
  auto* probe = app.add_subcommand("probe", "Percolation probing of sections");
  double alpha = 0.5;
  int trials = 200;
  probe->add_option("--ifs", ifs_src);
  probe->add_option("--alpha", alpha);
  probe->add_option("--beta", beta);
  probe->add_option("--trials", trials);
  probe->add_option("--depth", depth);
  probe->add_option("--grid", grid);
  probe->add_option("--scales", scales_spec, "Scale ladder used to place the x grid");
  probe->add_option("--seed", seed);
  probe->add_option("--out", out_path);

  // fourier
  auto* four = app.add_subcommand("fourier", "Fourier decay of the eta factor");
  int q = 0, k = 3, taus = 4;
  std::string ladder = "2:6";
  double fe = 0.3;
  four->add_option("--ifs", ifs_src);
  four->add_option("--q", q, "Power of the system (0 selects automatically)");
  four->add_option("--k", k);
  four->add_option("--beta", beta);
  four->add_option("--ladder", ladder, "lo:hi range of N");
  four->add_option("--taus", taus);
  four->add_option("--eps", fe);
  four->add_option("--seed", seed);
  four->add_option("--out", out_path);

  // measure-dim
  auto* mdim = app.add_subcommand("measure-dim", "Dimension of the random subset measure");
  std::size_t mtrials = 100000;
  mdim->add_option("--ifs", ifs_src);
  mdim->add_option("--eps", fe);
  mdim->add_option("--q", q, "0 selects automatically");
  mdim->add_option("--trials", mtrials);
  mdim->add_option("--seed", seed);
  mdim->add_option("--out", out_path);

  // exceptional
  auto* exc = app.add_subcommand("exceptional", "Scan directions for exceptional-set membership");
  ExceptionalParams ep;
  std::size_t bgrid = 2048;
  exc->add_option("--r", ep.r);
  exc->add_option("--gamma", ep.gamma);
  exc->add_option("--b", ep.b);
  exc->add_option("--theta", ep.theta);
  exc->add_option("--q", ep.q);
  exc->add_option("--k", ep.k);
  exc->add_option("--delta", ep.delta);
  exc->add_option("--N", ep.N);
  exc->add_option("--tau-grid", ep.tau_grid_size);
  exc->add_option("--beta-grid", bgrid);
  exc->add_flag("--diagnostic", ep.diagnostic, "Allow b = 0 and delta outside (0, 1/2)");
  exc->add_option("--out", out_path);

  // catalog
  auto* cat = app.add_subcommand("catalog", "List or export the built-in IFS examples");
  std::string cat_name;
  cat->add_option("--name", cat_name, "Entry to export (lists names when omitted)");
  cat->add_option("--out", out_path);

  // moran
  auto* mor = app.add_subcommand("moran", "Similarity dimension of an IFS");
  mor->add_option("--ifs", ifs_src);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : kExitUsage;
  }
  if (threads > 0) set_thread_count(threads);
  Output out(out_path);
  std::ostream& os = out.stream();

  if (*perc) {
    const Ifs ifs = load_ifs(ifs_src);
    write_percolation(parse_law(law_spec, ifs), ifs, depth, seeds, seed, os);
  } else if (*mand) {
    const auto cfg = mandelbrot_config(M, d, p);
    write_percolation(cfg.law, cfg.ifs, depth, seeds, seed, os);
  } else if (*sect) {
    const Ifs ifs = load_ifs(ifs_src);
    const Direction dir = Direction::from_angle(beta);
    const auto scales = parse_ladder(scales_spec);
    const auto xs = default_x_grid(ifs, dir, scales, static_cast<std::size_t>(grid));
    const auto prof = conservation_profile(ifs, dir, eps, xs, scales);
    os << "x,scale,count,slope,r2,qualifies\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (std::size_t j = 0; j < scales.size(); ++j) {
        os << format_number(xs[i]) << ',' << format_number(scales[j]) << ','
           << prof.counts[i][j] << ',' << format_number(prof.slopes[i].slope) << ','
           << format_number(prof.slopes[i].r2) << ',' << (prof.qualifies[i] ? "true" : "false")
           << '\n';
      }
    }
  } else if (*probe) {
    const Ifs ifs = load_ifs(ifs_src);
    const Direction dir = Direction::from_angle(beta);
    const auto xs = default_x_grid(ifs, dir, parse_ladder(scales_spec),
                                   static_cast<std::size_t>(grid));
    const auto res = probe_sections(ifs, alpha, dir, xs, depth, trials, seed);
    os << "x,hit_frequency\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      os << format_number(xs[i]) << ',' << format_number(res.hit_frequency[i]) << '\n';
    }
  } else if (*four) {
    const Ifs ifs = load_ifs(ifs_src);
    if (q == 0) q = select_q(ifs, fe);
    const auto [lo, hi] = parse_range(ladder);
    const FourierModel model(power_system(ifs, q), 1);
    const double t_max = std::pow(model.block_ratio(), -k * (hi + 1.0));
    int need = k * (hi + 1) + 1;
    while (model.tail_bound(Vec{t_max, 0.0}, need) > 1e-12 && need < 10000) ++need;
    const auto sample = sample_measure(sq_law(ifs, fe, q), need, seed);
    const auto est = fourier_decay(sample, model, k, Direction::from_angle(beta), lo, hi, taus);
    os << "t,re,im,modulus,tail_bound\n";
    for (std::size_t i = 0; i < est.t.size(); ++i) {
      os << format_number(est.t[i]) << ',' << format_number(est.value[i].real()) << ','
         << format_number(est.value[i].imag()) << ',' << format_number(est.modulus[i]) << ','
         << format_number(est.tail_bound[i]) << '\n';
    }
    std::cerr << "q=" << q << " slope=" << format_number(est.fit.slope) << '\n';
  } else if (*mdim) {
    const Ifs ifs = load_ifs(ifs_src);
    if (q == 0) q = select_q(ifs, fe);
    const auto law = sq_law(ifs, fe, q);
    const auto est = measure_dimension(law, ifs.map(0).ratio(), q, mtrials, seed);
    os << "q,estimate,standard_error\n"
       << q << ',' << format_number(est.value) << ',' << format_number(est.standard_error) << '\n';
  } else if (*exc) {
    const auto betas = beta_grid(bgrid);
    const auto scan = grid_scan(ep, betas);
    os << "beta,max_fraction,witness_tau,member\n";
    for (const auto& r : scan.results) {
      os << format_number(r.beta) << ',' << format_number(r.max_fraction) << ','
         << format_number(r.witness_tau) << ',' << (r.is_member ? "true" : "false") << '\n';
    }
    std::cerr << "member_fraction=" << format_number(scan.member_fraction) << '\n';
  } else if (*cat) {
    if (cat_name.empty()) {
      for (const auto& n : catalog::names()) os << n << '\n';
    } else {
      os << ifs_to_json(catalog::by_name(cat_name)).dump(2) << '\n';
    }
  } else if (*mor) {
    const Ifs ifs = load_ifs(ifs_src);
    os << format_number(moran_dimension(ifs)) << '\n';
  }
  return 0;
}

bool has_config_flag(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--config") == 0 || std::strncmp(argv[i], "--config=", 9) == 0) {
      return true;
    }
  }
  return false;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return has_config_flag(argc, argv) ? run_scenario_mode(argc, argv)
                                       : run_tool_mode(argc, argv);
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
