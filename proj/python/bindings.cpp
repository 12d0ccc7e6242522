#include <optional>
#include <string>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mlcs/coherence.hpp"
#include "mlcs/experiments.hpp"
#include "mlcs/image_io.hpp"
#include "mlcs/phantom.hpp"
#include "mlcs/random_operators.hpp"
#include "mlcs/sampling.hpp"
#include "mlcs/sensing.hpp"
#include "mlcs/solver.hpp"
#include "mlcs/sparsity.hpp"
#include "mlcs/transforms.hpp"
#include "mlcs/wavelet.hpp"

namespace py = pybind11;
using namespace mlcs;

namespace {

// JSON crosses the boundary as text; the Python side wraps it with json.loads.
py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_py(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

WaveletKind wavelet_kind(const std::string& family, int levels) {
  return {wavelet_family_from_string(family), levels};
}

SolverConfig solver_config(const py::dict& kw) {
  SolverConfig cfg;
  if (!kw.empty()) {
    nlohmann::json j = cfg.to_json();
    j.update(from_py(kw));
    cfg = SolverConfig::from_json(j);
  }
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_mlcs, m) {
  m.doc() = "Multilevel compressed sensing: transforms, sampling schemes, recovery and diagnostics";

  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<SchemeError>(m, "SchemeError", PyExc_ValueError);
  py::register_exception<SizeError>(m, "SizeError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_RuntimeError);

  py::class_<LevelPartition>(m, "LevelPartition")
      .def(py::init<std::vector<Index>>(), py::arg("ends"))
      .def_static("single", &LevelPartition::single)
      .def_property_readonly("levels", &LevelPartition::levels)
      .def_property_readonly("total", &LevelPartition::total)
      .def_property_readonly("ends", &LevelPartition::ends)
      .def("sizes", &LevelPartition::sizes)
      .def("begin", &LevelPartition::begin)
      .def("end", &LevelPartition::end)
      .def("level_of", &LevelPartition::level_of)
      .def("__eq__", [](const LevelPartition& a, const LevelPartition& b) { return a == b; })
      .def("__repr__", [](const LevelPartition& p) { return "LevelPartition(" + py::repr(py::cast(p.ends())).cast<std::string>() + ")"; });

  py::class_<SparsityPattern>(m, "SparsityPattern")
      .def(py::init<LevelPartition, std::vector<Index>>(), py::arg("partition"), py::arg("k"))
      .def_readonly("partition", &SparsityPattern::partition)
      .def_readonly("k", &SparsityPattern::k)
      .def("total", &SparsityPattern::total);

  m.def("mix_seed", py::overload_cast<std::uint64_t, std::string_view>(&mix_seed), py::arg("seed"), py::arg("tag"));

  // operators
  m.def("dft", [](const Signal& x, bool adjoint) { return dft_apply(x, adjoint ? Direction::Adjoint : Direction::Forward); },
        py::arg("x"), py::arg("adjoint") = false, "Unitary DFT of a power-of-two length vector.");
  m.def("dft2",
        [](const Signal& x, Index height, Index width, bool adjoint) {
          return dft2_apply(x, height, width, adjoint ? Direction::Adjoint : Direction::Forward);
        },
        py::arg("x"), py::arg("height"), py::arg("width"), py::arg("adjoint") = false);
  m.def("wht", &wht_apply, py::arg("x"), "Sequency-ordered orthonormal Walsh-Hadamard transform.");
  m.def("wht2", &wht2_apply, py::arg("x"), py::arg("height"), py::arg("width"));
  m.def("dwt",
        [](const Signal& x, const std::string& family, int levels) { return dwt_forward(x, wavelet_kind(family, levels)); },
        py::arg("x"), py::arg("wavelet") = "haar", py::arg("levels") = 1);
  m.def("idwt",
        [](const Signal& c, const std::string& family, int levels) { return dwt_inverse(c, wavelet_kind(family, levels)); },
        py::arg("c"), py::arg("wavelet") = "haar", py::arg("levels") = 1);
  m.def("dwt2",
        [](const RowMajorImage& img, const std::string& family, int levels) {
          return dwt2_forward(Image2D(img), wavelet_kind(family, levels));
        },
        py::arg("image"), py::arg("wavelet") = "db4", py::arg("levels") = 1);
  m.def("idwt2",
        [](const Signal& c, Index side, const std::string& family, int levels) {
          return dwt2_inverse(c, wavelet_kind(family, levels), side).pixels;
        },
        py::arg("c"), py::arg("side"), py::arg("wavelet") = "db4", py::arg("levels") = 1);
  m.def("wavelet_partition", &wavelet_partition, py::arg("n"), py::arg("levels"));
  m.def("wavelet_partition_2d", &wavelet_partition_2d, py::arg("side"), py::arg("levels"));
  m.def("subband_partition_2d", &subband_partition_2d, py::arg("side"), py::arg("levels"));

  // sampling
  m.def("dyadic_bands", [](int r) { return dyadic_bands(r).partition; }, py::arg("r"));
  m.def("dyadic_band_frequencies", [](int r) { return dyadic_bands(r).frequency; }, py::arg("r"));
  m.def("radial_bands_2d", [](Index side, int levels) { return radial_bands_2d(side, levels).partition; },
        py::arg("side"), py::arg("levels"));

  py::class_<Allocation>(m, "Allocation")
      .def_readonly("m", &Allocation::m)
      .def_readonly("demand", &Allocation::demand)
      .def_readonly("clipped", &Allocation::clipped);
  m.def("allocate_measurements",
        [](const SparsityPattern& k, double scale, std::optional<LevelPartition> bands) {
          return bands ? allocate_measurements(k, scale, *bands) : allocate_measurements(k, scale);
        },
        py::arg("k"), py::arg("scale"), py::arg("bands") = py::none());

  py::class_<SamplingScheme>(m, "SamplingScheme")
      .def_property_readonly("n", &SamplingScheme::n)
      .def_property_readonly("partition", &SamplingScheme::partition)
      .def_property_readonly("seed", &SamplingScheme::seed)
      .def("counts", &SamplingScheme::counts)
      .def("level", &SamplingScheme::level)
      .def("omega", &SamplingScheme::omega)
      .def("rows", &SamplingScheme::rows)
      .def("mask", &SamplingScheme::mask_2d)
      .def("to_json", [](const SamplingScheme& s) { return to_py(s.to_json()); })
      .def_static("from_json", [](const py::object& o) { return SamplingScheme::from_json(from_py(o)); })
      .def("__len__", &SamplingScheme::size);
  m.def("multilevel_sample",
        [](const LevelPartition& p, const std::vector<Index>& counts, std::uint64_t seed, const std::string& map,
           Index side, int levels) {
          return multilevel_sample(p, counts, seed, IndexMap{index_map_kind_from_string(map), side, levels});
        },
        py::arg("partition"), py::arg("m"), py::arg("seed") = 0, py::arg("map") = "identity", py::arg("side") = 0,
        py::arg("levels") = 0,
        "Uniform random m_j-subsets of every level. `map` names how positions become transform rows.");
  m.def("uniform_sample", &uniform_sample, py::arg("n"), py::arg("m"), py::arg("seed") = 0);
  m.def("power_law_pattern_2d", &power_law_pattern_2d, py::arg("side"), py::arg("m"), py::arg("alpha") = 2.0,
        py::arg("seed") = 0, py::arg("center_fraction") = 0.05);

  // sensing
  py::class_<SensingOperator>(m, "SensingOperator")
      .def(py::init([](const std::string& transform, Index side, bool two_d, std::optional<std::string> wavelet,
                       int levels, std::optional<SamplingScheme> scheme, Index rows, std::uint64_t seed) {
             std::optional<WaveletKind> w;
             if (wavelet) w = wavelet_kind(*wavelet, levels);
             return SensingOperator({transform_tag_from_string(transform), rows, seed}, {side, two_d}, w,
                                    std::move(scheme));
           }),
           py::arg("transform"), py::arg("side"), py::arg("two_d") = false, py::arg("wavelet") = py::none(),
           py::arg("levels") = 1, py::arg("scheme") = py::none(), py::arg("rows") = 0, py::arg("seed") = 0)
      .def_property_readonly("shape", [](const SensingOperator& op) { return py::make_tuple(op.rows(), op.cols()); })
      .def("apply", &SensingOperator::apply, py::arg("c"))
      .def("adjoint", &SensingOperator::adjoint, py::arg("y"))
      .def("coefficient_partition", &SensingOperator::coefficient_partition);

  // solver
  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("coefficients", &SolveResult::coefficients)
      .def_readonly("iterations", &SolveResult::iterations)
      .def_readonly("objective", &SolveResult::objective)
      .def_readonly("converged", &SolveResult::converged)
      .def_readonly("final_feasibility_gap", &SolveResult::final_feasibility_gap)
      .def_readonly("step", &SolveResult::step)
      .def("diagnostics", [](const SolveResult& r) { return to_py(r.diagnostics()); })
      .def("trace_csv", &SolveResult::trace_csv);
  m.def("bpdn_solve",
        [](const SensingOperator& op, const Signal& y, const py::kwargs& kw) {
          const SolverConfig cfg = solver_config(kw);
          py::gil_scoped_release release;
          if (auto g = op.gram()) return bpdn_solve(op, y, cfg, *g);
          return bpdn_solve(op, y, cfg);
        },
        py::arg("op"), py::arg("y"),
        "min ||z||_1 subject to ||y - A z||_2 <= eta. Keyword arguments override SolverConfig fields.");
  m.def("bpdn_solve_dense",
        [](const DenseMatrix& a, const Signal& y, const py::kwargs& kw) {
          const SolverConfig cfg = solver_config(kw);
          py::gil_scoped_release release;
          const MatrixOperator op(a);
          return bpdn_solve(op, y, cfg, a * a.adjoint());
        },
        py::arg("a"), py::arg("y"));
  m.def("relative_error", py::overload_cast<const Signal&, const Signal&>(&relative_error), py::arg("x"),
        py::arg("xhat"), "100 ||x - xhat|| / ||x||.");

  // sparsity
  m.def("effective_sparsity", [](const Signal& block, double eps) { return effective_sparsity({block.data(), static_cast<std::size_t>(block.size())}, eps); },
        py::arg("block"), py::arg("epsilon"));
  m.def("level_sparsities", &level_sparsities, py::arg("c"), py::arg("partition"), py::arg("epsilon"));
  m.def("flip", &flip, py::arg("c"));
  m.def("flip_in_levels", &flip_in_levels, py::arg("c"), py::arg("partition"));
  m.def("sparsity_curves_csv",
        [](const Signal& c, const LevelPartition& p) { return sparsity_curves(c, p).to_csv(); }, py::arg("c"),
        py::arg("partition"));

  // coherence
  m.def("structured_matrix", &structured_matrix, py::arg("transform"), py::arg("wavelet"), py::arg("n"));
  m.def("mutual_coherence", &mutual_coherence, py::arg("u"));
  m.def("coherence_block_matrix",
        [](const DenseMatrix& u, const LevelPartition& rows, const LevelPartition& cols) {
          return coherence_block_matrix(u, rows, cols).mu;
        },
        py::arg("u"), py::arg("rows"), py::arg("cols"));
  m.def("rip_level_constant",
        [](const DenseMatrix& a, const SparsityPattern& k, const std::string& mode, Index trials, std::uint64_t seed) {
          SearchOptions opts;
          opts.mode = mode == "exhaustive" ? SearchMode::Exhaustive : SearchMode::MonteCarlo;
          opts.trials = trials;
          opts.seed = seed;
          py::gil_scoped_release release;
          return rip_level_constant(a, k, opts).delta;
        },
        py::arg("a"), py::arg("pattern"), py::arg("mode") = "exhaustive", py::arg("trials") = 10000,
        py::arg("seed") = 0);
  m.def("ratio_constant", &ratio_constant, py::arg("pattern"));
  m.def("ripl_threshold", &ripl_threshold, py::arg("r"), py::arg("lam"));

  // images and experiments
  m.def("phantom", [](const std::string& kind, Index side) { return make_phantom(phantom_kind_from_string(kind), side).pixels; },
        py::arg("kind") = "glpu", py::arg("side") = 256);
  m.def("load_pgm", [](const std::string& path) { return load_pgm(path).pixels; }, py::arg("path"));
  m.def("save_pgm", [](const RowMajorImage& img, const std::string& path) { save_pgm(Image2D(img), path); },
        py::arg("image"), py::arg("path"));
  m.def("run_experiment",
        [](const py::object& config) {
          const ExperimentConfig cfg = ExperimentConfig::from_json(from_py(config));
          cfg.validate();
          RunReport report;
          {
            py::gil_scoped_release release;
            report = run_experiment(cfg);
          }
          return to_py(report.to_json());
        },
        py::arg("config"), "Runs one experiment from a config dict and returns its report.");
}
