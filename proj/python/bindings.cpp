#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dimlab/catalog.hpp"
#include "dimlab/error.hpp"
#include "dimlab/exceptional.hpp"
#include "dimlab/parallel.hpp"
#include "dimlab/percolation.hpp"
#include "dimlab/random_measures.hpp"
#include "dimlab/report.hpp"
#include "dimlab/scenarios.hpp"
#include "dimlab/sections.hpp"

namespace py = pybind11;
using namespace dimlab;

namespace {

Vec to_vec(const std::vector<double>& v) {
  if (v.size() > static_cast<std::size_t>(kMaxDim)) throw py::value_error("at most 3 coordinates");
  Vec out;
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<int>(i)] = v[i];
  return out;
}

std::vector<double> from_vec(const Vec& v, int dim) { return {v.c.begin(), v.c.begin() + dim}; }

OffspringLaw parse_law(const Ifs& ifs, const std::string& kind, double value) {
  if (kind == "standard") return OffspringLaw::standard(ifs, value);
  if (kind == "uniform") return OffspringLaw::bernoulli_uniform(ifs.size(), value);
  if (kind == "deterministic") return OffspringLaw::deterministic(ifs.size());
  throw Error(ErrorCode::UnsupportedLaw, "unknown law '" + kind + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dimension of slices and projections of random fractals";

  py::register_exception<Error>(m, "DimlabError", PyExc_RuntimeError);

  m.attr("__version__") = library_version();
  m.def("set_threads", &set_thread_count, py::arg("n"));
  m.def("threads", &thread_count);

  py::class_<Ifs>(m, "Ifs")
      .def(py::init([](const std::vector<std::tuple<double, double, std::vector<double>>>& maps,
                       int dim, const std::string& separation, const std::string& name) {
             std::vector<Similarity> sims;
             for (const auto& [r, a, t] : maps) sims.emplace_back(r, a, to_vec(t));
             return Ifs(std::move(sims), dim, separation_from_string(separation), name);
           }),
           py::arg("maps"), py::arg("ambient_dim"), py::arg("separation") = "unverified",
           py::arg("name") = "")
      .def_property_readonly("name", &Ifs::name)
      .def_property_readonly("ambient_dim", &Ifs::ambient_dim)
      .def_property_readonly("separation", [](const Ifs& f) { return to_string(f.separation()); })
      .def("__len__", &Ifs::size)
      .def("ratios",
           [](const Ifs& f) {
             std::vector<double> r;
             for (const auto& s : f.maps()) r.push_back(s.ratio());
             return r;
           })
      .def("ball",
           [](const Ifs& f) {
             return py::make_tuple(from_vec(f.ball().center, f.ambient_dim()), f.ball().radius);
           })
      .def("moran_dimension", [](const Ifs& f) { return moran_dimension(f); })
      .def("stopping_set_size", [](const Ifs& f, double rho) { return stopping_set_size(f, rho); },
           py::arg("rho"))
      .def("stopping_set",
           [](const Ifs& f, double rho) {
             std::vector<std::vector<std::uint32_t>> out;
             for (const auto& w : stopping_set(f, rho).words) out.push_back(w.symbols());
             return out;
           },
           py::arg("rho"))
      .def("to_json", [](const Ifs& f) { return ifs_to_json(f).dump(); })
      .def("__repr__", [](const Ifs& f) {
        return "<Ifs '" + f.name() + "' maps=" + std::to_string(f.size()) + ">";
      });

  m.def("catalog_names", &catalog::names);
  m.def("catalog", &catalog::by_name, py::arg("name"));
  m.def("load_ifs", &load_ifs, py::arg("source"));
  m.def("ifs_from_json", [](const std::string& s) { return ifs_from_json(nlohmann::json::parse(s)); });
  m.def("moran_dimension", py::overload_cast<const std::vector<double>&, double>(&moran_dimension),
        py::arg("ratios"), py::arg("upper") = 4.0);

  m.def("percolation_dimension",
        [](const Ifs& ifs, const std::string& law, double value) {
          return percolation_dimension(parse_law(ifs, law, value), ifs);
        },
        py::arg("ifs"), py::arg("law"), py::arg("value") = 0.0);
  m.def("survival_probability",
        [](const Ifs& ifs, const std::string& law, double value) {
          const auto s = survival_probability(parse_law(ifs, law, value));
          return py::dict(py::arg("mean_offspring") = s.mean_offspring,
                          py::arg("extinction_prob") = s.extinction_prob,
                          py::arg("survival_prob") = s.survival_prob);
        },
        py::arg("ifs"), py::arg("law"), py::arg("value") = 0.0);
  m.def("generation_counts",
        [](const Ifs& ifs, const std::string& law, double value, int depth, std::uint64_t seed) {
          return sample_tree(parse_law(ifs, law, value), ifs.size(), depth, seed)
              .tree.generation_counts();
        },
        py::arg("ifs"), py::arg("law"), py::arg("value"), py::arg("depth"), py::arg("seed"));
  m.def("mandelbrot_dimension",
        [](int M, int d, double p) { return mandelbrot_config(M, d, p).dimension(); },
        py::arg("M"), py::arg("d"), py::arg("p"));

  m.def("count_slice",
        [](const Ifs& ifs, double beta, double x, double rho) {
          return count_slice(ifs, Direction::from_angle(beta), x, rho).count;
        },
        py::arg("ifs"), py::arg("beta"), py::arg("x"), py::arg("rho"));
  m.def("projection_measure",
        [](const Ifs& ifs, double beta, double rho) {
          return projection_measure(ifs, Direction::from_angle(beta), rho);
        },
        py::arg("ifs"), py::arg("beta"), py::arg("rho"));
  m.def("scale_ladder", &scale_ladder, py::arg("base"), py::arg("from_exp"), py::arg("to_exp"));
  m.def("conservation_profile",
        [](const Ifs& ifs, double beta, double epsilon, const std::vector<double>& scales,
           std::size_t grid) {
          const Direction dir = Direction::from_angle(beta);
          const auto xs = default_x_grid(ifs, dir, scales, grid);
          const auto prof = conservation_profile(ifs, dir, epsilon, xs, scales);
          std::vector<double> slopes;
          for (const auto& s : prof.slopes) slopes.push_back(s.slope);
          return py::dict(py::arg("x") = prof.x_grid, py::arg("slope") = slopes,
                          py::arg("qualifies") = prof.qualifies,
                          py::arg("qualifying_fraction") = prof.qualifying_fraction,
                          py::arg("threshold") = prof.threshold);
        },
        py::arg("ifs"), py::arg("beta"), py::arg("epsilon"), py::arg("scales"),
        py::arg("grid") = 512);

  m.def("sq_retain_probability", &sq_retain_probability, py::arg("m"), py::arg("r"),
        py::arg("epsilon"), py::arg("q"));
  m.def("select_q", &select_q, py::arg("ifs"), py::arg("epsilon"), py::arg("max_q") = 12);
  m.def("fourier_mu",
        [](const Ifs& ifs, double epsilon, int q, int depth, std::uint64_t seed,
           const std::vector<double>& xi, int truncation) {
          const Ifs power = power_system(ifs, q);
          const auto sample = sample_measure(sq_law(ifs, epsilon, q), depth, seed);
          return fourier_mu(sample, FourierModel(power, 1), to_vec(xi), truncation).value;
        },
        py::arg("ifs"), py::arg("epsilon"), py::arg("q"), py::arg("depth"), py::arg("seed"),
        py::arg("xi"), py::arg("truncation"));

  py::class_<ExceptionalParams>(m, "ExceptionalParams")
      .def(py::init<>())
      .def_readwrite("r", &ExceptionalParams::r)
      .def_readwrite("gamma", &ExceptionalParams::gamma)
      .def_readwrite("b", &ExceptionalParams::b)
      .def_readwrite("theta", &ExceptionalParams::theta)
      .def_readwrite("q", &ExceptionalParams::q)
      .def_readwrite("k", &ExceptionalParams::k)
      .def_readwrite("N", &ExceptionalParams::N)
      .def_readwrite("delta", &ExceptionalParams::delta)
      .def_readwrite("tau_grid_size", &ExceptionalParams::tau_grid_size)
      .def_readwrite("diagnostic", &ExceptionalParams::diagnostic)
      .def("threshold", &ExceptionalParams::threshold)
      .def("ell", &ExceptionalParams::ell);
  m.def("membership_fraction",
        [](const ExceptionalParams& p, double beta) {
          const auto r = membership_fraction(p, beta);
          return py::dict(py::arg("max_fraction") = r.max_fraction,
                          py::arg("witness_tau") = r.witness_tau,
                          py::arg("is_member") = r.is_member);
        },
        py::arg("params"), py::arg("beta"));
  m.def("member_fraction",
        [](const ExceptionalParams& p, std::size_t grid) {
          const auto betas = beta_grid(grid);
          return grid_scan(p, betas).member_fraction;
        },
        py::arg("params"), py::arg("grid"));
  m.def("canonical_beta", &canonical_beta, py::arg("beta"));

  m.def("scenario_names", &scenario_names);
  m.def("run_scenario",
        [](const std::string& config) {
          const Report rep = run(parse_scenario(nlohmann::json::parse(config)));
          return render_json(rep).dump();
        },
        py::arg("config"), "Runs a scenario config (JSON text); returns the JSON report.");
}
