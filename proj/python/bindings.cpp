#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "phreg/errors.hpp"
#include "phreg/harness.hpp"
#include "phreg/id_estimation.hpp"
#include "phreg/regularizers.hpp"
#include "phreg/tda.hpp"

namespace py = pybind11;
using phreg::Matrix;

namespace {

phreg::PointCloud cloud(const Matrix& m) { return phreg::PointCloud(m); }

phreg::BatchPair make_batch(const Matrix& z, const Matrix& y, std::vector<std::size_t> sizes,
                            std::vector<std::vector<std::size_t>> subsets) {
  return phreg::BatchPair(cloud(z), cloud(y), phreg::SubsetSchedule(std::move(sizes)), std::move(subsets));
}

py::tuple as_tuple(const phreg::RegularizerOutput& out) { return py::make_tuple(out.value, out.grad_z); }

}  // namespace

PYBIND11_MODULE(_phreg, m) {
  m.doc() = "Persistent-homology regression regularizers: PH0, ID estimation, losses and training harness.";

  py::register_exception<phreg::InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<phreg::DegenerateInput>(m, "DegenerateInput", PyExc_ArithmeticError);
  py::register_exception<phreg::IngestionError>(m, "IngestionError", PyExc_IOError);

  m.def("pairwise_distances", [](const Matrix& x) { return phreg::pairwise_distances(cloud(x)).values(); },
        py::arg("points"));

  m.def(
      "mst",
      [](const Matrix& x) {
        const auto r = phreg::mst(phreg::pairwise_distances(cloud(x)));
        std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
        for (const auto& e : r.edges) edges.emplace_back(e.i, e.j, e.length);
        return py::make_tuple(edges, r.total_length);
      },
      py::arg("points"), "Minimum spanning tree edges (i, j, length) and total length.");

  m.def(
      "ph0",
      [](const Matrix& x) {
        std::vector<std::pair<double, double>> out;
        for (const auto& iv : phreg::ph0(cloud(x))) out.emplace_back(iv.birth, iv.death);
        return out;
      },
      py::arg("points"));

  m.def("total_persistence", [](const Matrix& x) { return phreg::total_persistence(cloud(x)); }, py::arg("points"));

  m.def("ls_slope", &phreg::ls_slope, py::arg("xs"), py::arg("ys"));

  m.def(
      "ph_dim_birdal",
      [](const Matrix& x, std::uint64_t seed, std::size_t reps, std::optional<std::vector<std::size_t>> sizes) {
        const auto c = cloud(x);
        const auto sched = sizes ? phreg::SubsetSchedule(*sizes) : phreg::SubsetSchedule::for_estimation(c.n());
        phreg::Rng rng(seed);
        const auto est = phreg::ph_dim_birdal(c, sched, reps, rng);
        return py::make_tuple(est.slope, est.dimension);
      },
      py::arg("points"), py::arg("seed") = 0, py::arg("reps") = 5, py::arg("sizes") = py::none(),
      "Returns (slope, dimension).");

  m.def(
      "twonn", [](const Matrix& x, double truncation) { return phreg::twonn(cloud(x), truncation).dimension; },
      py::arg("points"), py::arg("truncation") = 0.1);

  m.def(
      "loss_ld_prime",
      [](const Matrix& z, const Matrix& y, std::vector<std::size_t> sizes, std::vector<std::vector<std::size_t>> subsets) {
        return as_tuple(phreg::loss_ld_prime(make_batch(z, y, std::move(sizes), std::move(subsets))));
      },
      py::arg("z"), py::arg("y"), py::arg("sizes"), py::arg("subsets"));
  m.def(
      "loss_ld",
      [](const Matrix& z, const Matrix& y, std::vector<std::size_t> sizes, std::vector<std::vector<std::size_t>> subsets) {
        return as_tuple(phreg::loss_ld(make_batch(z, y, std::move(sizes), std::move(subsets))));
      },
      py::arg("z"), py::arg("y"), py::arg("sizes"), py::arg("subsets"));
  m.def(
      "loss_lt",
      [](const Matrix& z, const Matrix& y) {
        const std::size_t n = static_cast<std::size_t>(z.rows());
        std::vector<std::size_t> all(n);
        for (std::size_t k = 0; k < n; ++k) all[k] = k;
        std::vector<std::vector<std::size_t>> subsets{{0, 1}, all};
        return as_tuple(phreg::loss_lt(make_batch(z, y, {2, n}, subsets)));
      },
      py::arg("z"), py::arg("y"));

  m.def(
      "generate",
      [](const std::string& shape, std::uint64_t seed) {
        phreg::SyntheticSpec spec;
        spec.shape = phreg::parse_shape(shape);
        spec.seed = seed;
        phreg::Rng rng = phreg::Rng::derive(seed, 1);
        const auto targets = phreg::sample_shape(spec, rng);
        auto ds = phreg::encode(targets, rng);
        return py::make_tuple(ds.x, ds.y.data());
      },
      py::arg("shape"), py::arg("seed") = 0, "Returns (inputs n x 100, targets n x 3).");

  m.def(
      "run_experiment",
      [](const std::string& dataset, const std::string& variant, std::size_t epochs, std::vector<std::uint64_t> seeds,
         std::optional<double> lambda_d, std::optional<double> lambda_t, std::optional<std::size_t> n_m) {
        auto cfg = phreg::ExperimentConfig::preset(phreg::parse_shape(dataset));
        cfg.variant = phreg::parse_variant(variant);
        cfg.epochs = epochs;
        cfg.seeds = std::move(seeds);
        if (lambda_d) cfg.lambda_d = *lambda_d;
        if (lambda_t) cfg.lambda_t = *lambda_t;
        cfg.n_m = n_m;
        py::gil_scoped_release release;
        const auto report = phreg::run_experiment(cfg);
        return phreg::report_to_json(report, true).dump();
      },
      py::arg("dataset"), py::arg("variant"), py::arg("epochs"), py::arg("seeds") = std::vector<std::uint64_t>{0},
      py::arg("lambda_d") = py::none(), py::arg("lambda_t") = py::none(), py::arg("n_m") = py::none(),
      "Runs the training harness and returns the report as a JSON string.");
}
