#include "mlcs/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "mlcs/image_io.hpp"
#include "mlcs/phantom.hpp"
#include "mlcs/transforms.hpp"

namespace mlcs {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const std::set<std::string> kExperiments{"flip-test", "flip-test-levels", "compare",  "sparsity-curves",
                                         "coherence-map", "recover",        "allocate", "riplevels"};
const std::set<std::string> kSchemeKinds{"multilevel", "uniform", "power_law", "full"};

bool is_dense_name(const std::string& t) { return t == "gaussian" || t == "bernoulli"; }

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
}

Index sample_count(Index n, double fraction) {
  return std::clamp<Index>(static_cast<Index>(std::llround(fraction * static_cast<double>(n))), 1, n);
}

std::string case_tag(Index resolution, const std::string& transform, int trial) {
  return "r" + std::to_string(resolution) + "_" + transform + "_t" + std::to_string(trial);
}

// Run-level context shared by the image experiments.
struct ImageCase {
  Index side = 0;
  WaveletKind wavelet;
  Signal x;  // row-major samples
  Signal c;  // level-ordered wavelet coefficients
};

ImageCase prepare_image(const ExperimentConfig& cfg, Index side) {
  ImageCase ic;
  ic.side = side;
  ic.wavelet = WaveletKind{cfg.wavelet, cfg.levels_for(side)};
  ic.x = load_image_source(cfg.image, side).flatten();
  ic.c = Wavelet2D(side, ic.wavelet).forward(ic.x);
  return ic;
}

// Seeded Gaussian noise with ||e||_2 = eta, real for real operators.
Signal measurement_noise(const SensingOperator& op, double eta, std::uint64_t seed) {
  Signal e = Signal::Zero(op.rows());
  if (eta <= 0.0) return e;
  std::mt19937_64 rng(mix_seed(seed, "noise"));
  std::normal_distribution<double> gauss;
  const bool real = op.is_real();
  for (Index i = 0; i < e.size(); ++i) e(i) = Complex(gauss(rng), real ? 0.0 : gauss(rng));
  return e * (eta / e.norm());
}

// Solves from clean measurements y; eta > 0 adds noise of that norm first.
SolveResult solve_case(const SensingOperator& op, const Signal& clean, SolverConfig scfg, std::uint64_t seed) {
  const Signal y = clean + measurement_noise(op, scfg.eta, seed);
  scfg.seed = mix_seed(seed, "solver");
  if (auto g = op.gram()) return bpdn_solve(op, y, scfg, *g);
  return bpdn_solve(op, y, scfg);
}

// Saves the reconstruction and fills the artifact map of `cr`.
void save_reconstruction(const ExperimentConfig& cfg, const fs::path& dir, const std::string& stem,
                         const Signal& xr, const SolveResult& res, Index side, CaseResult& cr) {
  if (!cfg.save_artifacts) return;
  const auto npy = dir / (stem + ".npy");
  const auto pgm = dir / (stem + ".pgm");
  const auto trace = dir / (stem + "_trace.csv");
  save_npy(npy.string(), xr, {side, side}, true);
  save_pgm(Image2D::from_signal(xr, side, side), pgm.string());
  cr.artifacts["reconstruction"] = npy.string();
  cr.artifacts["image"] = pgm.string();
  if (!res.trace.empty()) {
    write_text(trace, res.trace_csv());
    cr.artifacts["trace"] = trace.string();
  }
}

void save_original(const ExperimentConfig& cfg, const fs::path& dir, const std::string& stem, const Signal& x,
                   Index side, std::map<std::string, std::string>& artifacts) {
  if (!cfg.save_artifacts) return;
  const auto npy = dir / (stem + ".npy");
  const auto pgm = dir / (stem + ".pgm");
  save_npy(npy.string(), x, {side, side}, false);
  save_pgm(Image2D::from_signal(x, side, side), pgm.string());
  artifacts[stem] = npy.string();
  artifacts[stem + "_image"] = pgm.string();
}

void save_scheme(const ExperimentConfig& cfg, const fs::path& dir, const std::string& stem,
                 const SensingOperator& op, std::map<std::string, std::string>& artifacts) {
  if (!cfg.save_artifacts || !op.scheme()) return;
  const auto js = dir / (stem + ".json");
  write_text(js, op.scheme()->to_json().dump() + "\n");
  artifacts[stem] = js.string();
  if (op.scheme()->index_map().two_dimensional()) {
    const auto pgm = dir / (stem + ".pgm");
    save_mask_pgm(*op.scheme(), pgm.string());
    artifacts[stem + "_mask"] = pgm.string();
  }
}

RunReport start_report(const ExperimentConfig& cfg, const std::string& experiment) {
  cfg.validate();
  RunReport r;
  r.experiment = experiment;
  r.config = cfg.to_json();
  r.config["experiment"] = experiment;
  r.digest = config_digest(r.config);
  r.root_seed = cfg.seed;
  fs::create_directories(cfg.out_dir);
  return r;
}

std::vector<double> case_errors(const std::vector<CaseResult>& cases, const std::string& suffix) {
  std::vector<double> out;
  for (const auto& c : cases) {
    if (c.name.size() >= suffix.size() && c.name.compare(c.name.size() - suffix.size(), suffix.size(), suffix) == 0)
      out.push_back(c.error_percent);
  }
  return out;
}

enum class Permutation { Full, Levels, Identity };

RunReport run_permutation_test(const ExperimentConfig& cfg, const std::string& experiment, Permutation perm,
                               const LevelPartition& levels_partition) {
  const auto t0 = Clock::now();
  RunReport report = start_report(cfg, experiment);
  const fs::path dir = cfg.out_dir;
  const ImageCase ic = prepare_image(cfg, cfg.resolution);
  const LevelPartition part =
      levels_partition.levels() > 0 ? levels_partition : Wavelet2D(ic.side, ic.wavelet).partition();
  auto permute = [&](const Signal& v) -> Signal {
    switch (perm) {
      case Permutation::Full: return flip(v);
      case Permutation::Levels: return flip_in_levels(v, part);
      case Permutation::Identity: return v;
    }
    return v;
  };
  save_original(cfg, dir, "original", ic.x, ic.side, report.artifacts);

  const auto trials = static_cast<std::size_t>(cfg.trials);
  std::vector<std::uint64_t> seeds(trials);
  std::vector<std::optional<SensingOperator>> ops(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    seeds[t] = mix_seed(cfg.seed, "trial/" + std::to_string(t));
    ops[t].emplace(build_case_operator(cfg, cfg.transform, ic.side, ic.c, seeds[t]));
    save_scheme(cfg, dir, "scheme_t" + std::to_string(t), *ops[t], report.artifacts);
  }

  std::vector<CaseResult> cases(2 * trials);
  parallel_for(static_cast<Index>(cases.size()), cfg.threads, [&](Index i) {
    const auto t = static_cast<std::size_t>(i / 2);
    const bool permuted = i % 2 == 1;
    const auto c0 = Clock::now();
    const SensingOperator& op = *ops[t];
    const Signal coeffs = permuted ? permute(ic.c) : ic.c;
    const SolveResult res = solve_case(op, op.apply(coeffs), cfg.solver, seeds[t]);
    const Signal chat = permuted ? permute(res.coefficients) : res.coefficients;
    const Signal xr = Wavelet2D(ic.side, ic.wavelet).inverse(chat);

    CaseResult& cr = cases[static_cast<std::size_t>(i)];
    cr.name = case_tag(ic.side, cfg.transform, static_cast<int>(t)) + (permuted ? "_flipped" : "_unflipped");
    cr.transform = cfg.transform;
    cr.resolution = ic.side;
    cr.trial = static_cast<int>(t);
    cr.seed = seeds[t];
    cr.error_percent = relative_error(ic.x, xr);
    cr.iterations = res.iterations;
    cr.converged = res.converged;
    cr.measurements = op.rows();
    save_reconstruction(cfg, dir, cr.name, xr, res, ic.side, cr);
    cr.seconds = seconds_since(c0);
  });
  report.cases = std::move(cases);

  const double e_hat = median(case_errors(report.cases, "_unflipped"));
  const double e_check = median(case_errors(report.cases, "_flipped"));
  report.summary = {{"median_error_unflipped", e_hat},
                    {"median_error_flipped", e_check},
                    {"ratio", e_check / e_hat},
                    {"relative_difference", std::abs(e_check - e_hat) / e_hat},
                    {"measurements", report.cases.front().measurements}};
  report.seconds = seconds_since(t0);
  report.save(cfg.out_dir);
  return report;
}

std::vector<std::string> json_strings(const json& j, const std::string& key) {
  try {
    return j.at(key).get<std::vector<std::string>>();
  } catch (const json::exception&) {
    throw ConfigError("'" + key + "' must be a list of strings");
  }
}

}  // namespace

// ---------------------------------------------------------------- config

json SchemeSpec::to_json() const {
  return {{"kind", kind},   {"fraction", fraction},           {"epsilon", epsilon},
          {"alpha", alpha}, {"center_fraction", center_fraction}};
}

SchemeSpec SchemeSpec::from_json(const json& j) {
  check_keys(j, {"kind", "fraction", "epsilon", "alpha", "center_fraction"}, "scheme");
  SchemeSpec s;
  s.kind = j.value("kind", s.kind);
  s.fraction = j.value("fraction", s.fraction);
  s.epsilon = j.value("epsilon", s.epsilon);
  s.alpha = j.value("alpha", s.alpha);
  s.center_fraction = j.value("center_fraction", s.center_fraction);
  return s;
}

json AllocationSpec::to_json() const {
  return {{"k", k}, {"boundaries", boundaries}, {"scale", scale}, {"sample", sample}};
}

AllocationSpec AllocationSpec::from_json(const json& j) {
  check_keys(j, {"k", "boundaries", "scale", "sample"}, "allocation");
  AllocationSpec a;
  a.k = j.value("k", a.k);
  a.boundaries = j.value("boundaries", a.boundaries);
  a.scale = j.value("scale", a.scale);
  a.sample = j.value("sample", a.sample);
  return a;
}

json RipSpec::to_json() const {
  return {{"n", n},        {"m", m},       {"ensemble", ensemble}, {"boundaries", boundaries},
          {"k", k},        {"mode", mode}, {"trials", trials}};
}

RipSpec RipSpec::from_json(const json& j) {
  check_keys(j, {"n", "m", "ensemble", "boundaries", "k", "mode", "trials"}, "rip");
  RipSpec r;
  r.n = j.value("n", r.n);
  r.m = j.value("m", r.m);
  r.ensemble = j.value("ensemble", r.ensemble);
  r.boundaries = j.value("boundaries", r.boundaries);
  r.k = j.value("k", r.k);
  r.mode = j.value("mode", r.mode);
  r.trials = j.value("trials", r.trials);
  return r;
}

int ExperimentConfig::levels_for(Index side) const {
  if (levels > 0) return levels;
  return std::max(1, log2_exact(side) - 3);
}

void ExperimentConfig::validate() const {
  if (!kExperiments.count(experiment)) throw ConfigError("unknown experiment '" + experiment + "'");
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (levels < 0) throw ConfigError("levels must be nonnegative");
  try {
    solver.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  }

  if (experiment == "allocate") {
    if (allocation.k.empty()) throw ConfigError("allocation.k must not be empty");
    if (allocation.scale <= 0.0) throw ConfigError("allocation.scale must be positive");
    if (!allocation.boundaries.empty() && allocation.boundaries.size() != allocation.k.size() + 1)
      throw ConfigError("allocation.boundaries needs one more entry than allocation.k");
    return;
  }
  if (experiment == "riplevels") {
    if (rip.ensemble != "gaussian" && rip.ensemble != "bernoulli")
      throw ConfigError("rip.ensemble must be gaussian or bernoulli");
    if (rip.mode != "exhaustive" && rip.mode != "montecarlo")
      throw ConfigError("rip.mode must be exhaustive or montecarlo");
    if (rip.n < 1 || rip.m < 1 || rip.m > rip.n) throw ConfigError("rip needs 1 <= m <= n");
    if (rip.boundaries.size() != rip.k.size() + 1 || rip.boundaries.front() != 0 || rip.boundaries.back() != rip.n)
      throw ConfigError("rip.boundaries must run from 0 to n with one more entry than rip.k");
    if (rip.trials < 1) throw ConfigError("rip.trials must be at least 1");
    return;
  }
  if (experiment == "coherence-map") {
    if (!is_power_of_two(coherence_n)) throw ConfigError("coherence_n must be a power of two");
    for (const auto& t : coherence_transforms)
      if (t != "dft" && t != "wht" && t != "identity") throw ConfigError("unknown coherence transform '" + t + "'");
    for (const auto& w : coherence_wavelets)
      if (w != "haar" && w != "db4" && w != "none") throw ConfigError("unknown coherence wavelet '" + w + "'");
    return;
  }

  if (image.rfind("phantom:", 0) == 0) {
    try {
      phantom_kind_from_string(image.substr(8));
    } catch (const std::exception&) {
      throw ConfigError("unknown phantom '" + image + "'");
    }
  } else if (!fs::exists(image)) {
    throw ConfigError("image file '" + image + "' does not exist");
  }

  const std::vector<Index> sides = experiment == "compare" ? resolutions : std::vector<Index>{resolution};
  if (sides.empty()) throw ConfigError("resolutions must not be empty");
  const std::vector<std::string> kinds = experiment == "compare" ? transforms : std::vector<std::string>{transform};
  if (kinds.empty()) throw ConfigError("transforms must not be empty");
  if (experiment == "flip-test-levels" && flip_partition != "wavelet" && flip_partition != "subbands" &&
      flip_partition != "single" && flip_partition != "identity")
    throw ConfigError("flip_partition must be wavelet, subbands, single or identity");

  if (!kSchemeKinds.count(scheme.kind)) throw ConfigError("unknown scheme kind '" + scheme.kind + "'");
  if (!(scheme.fraction > 0.0 && scheme.fraction <= 1.0)) throw ConfigError("scheme.fraction must lie in (0, 1]");
  if (!(scheme.epsilon > 0.0 && scheme.epsilon <= 1.0)) throw ConfigError("scheme.epsilon must lie in (0, 1]");
  if (!(scheme.alpha > 0.0)) throw ConfigError("scheme.alpha must be positive");
  if (!(scheme.center_fraction >= 0.0 && scheme.center_fraction < 1.0))
    throw ConfigError("scheme.center_fraction must lie in [0, 1)");

  for (Index side : sides) {
    if (!is_power_of_two(side) || side < 4) throw ConfigError("resolution must be a power of two >= 4");
    if (levels_for(side) > log2_exact(side)) throw ConfigError("too many wavelet levels for the resolution");
    const Index n = side * side;
    const Index m = sample_count(n, scheme.fraction);
    if (scheme.kind == "multilevel" && m < levels_for(side))
      throw ConfigError("multilevel scheme needs at least one sample per level");
    for (const auto& t : kinds) {
      TransformTag tag;
      try {
        tag = transform_tag_from_string(t);
      } catch (const std::exception&) {
        throw ConfigError("unknown transform '" + t + "'");
      }
      if (scheme.kind == "power_law" && tag != TransformTag::DFT)
        throw ConfigError("power_law schemes are defined on the DFT grid only");
      if (is_dense_name(t) && static_cast<double>(m) * static_cast<double>(n) > static_cast<double>(dense_limit))
        throw ConfigError("dense " + t + " operator at resolution " + std::to_string(side) +
                          " exceeds dense_limit; use bernoulli_fast");
    }
  }
}

json ExperimentConfig::to_json() const {
  return {{"experiment", experiment},
          {"image", image},
          {"resolution", resolution},
          {"resolutions", resolutions},
          {"wavelet", to_string(wavelet)},
          {"levels", levels},
          {"transform", transform},
          {"transforms", transforms},
          {"scheme", scheme.to_json()},
          {"solver", solver.to_json()},
          {"seed", seed},
          {"trials", trials},
          {"flip_partition", flip_partition},
          {"coherence_n", coherence_n},
          {"coherence_transforms", coherence_transforms},
          {"coherence_wavelets", coherence_wavelets},
          {"allocation", allocation.to_json()},
          {"rip", rip.to_json()},
          {"dense_limit", dense_limit},
          {"out_dir", out_dir},
          {"threads", threads},
          {"save_artifacts", save_artifacts}};
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  check_keys(j,
             {"experiment", "image", "resolution", "resolutions", "wavelet", "levels", "transform", "transforms",
              "scheme", "solver", "seed", "trials", "flip_partition", "coherence_n", "coherence_transforms",
              "coherence_wavelets", "allocation", "rip", "dense_limit", "out_dir", "threads", "save_artifacts"},
             "config");
  ExperimentConfig c;
  try {
    c.experiment = j.value("experiment", c.experiment);
    c.image = j.value("image", c.image);
    c.resolution = j.value("resolution", c.resolution);
    c.resolutions = j.value("resolutions", c.resolutions);
    if (j.contains("wavelet")) c.wavelet = wavelet_family_from_string(j.at("wavelet").get<std::string>());
    c.levels = j.value("levels", c.levels);
    c.transform = j.value("transform", c.transform);
    if (j.contains("transforms")) c.transforms = json_strings(j, "transforms");
    if (j.contains("scheme")) c.scheme = SchemeSpec::from_json(j.at("scheme"));
    if (j.contains("solver")) {
      check_keys(j.at("solver"),
                 {"eta", "max_iters", "tol_feasibility", "tol_objective", "step", "step_scale", "relaxation", "seed", "trace_every"},
                 "solver");
      json merged = c.solver.to_json();
      merged.update(j.at("solver"));
      c.solver = SolverConfig::from_json(merged);
    }
    c.seed = j.value("seed", c.seed);
    c.trials = j.value("trials", c.trials);
    c.flip_partition = j.value("flip_partition", c.flip_partition);
    c.coherence_n = j.value("coherence_n", c.coherence_n);
    if (j.contains("coherence_transforms")) c.coherence_transforms = json_strings(j, "coherence_transforms");
    if (j.contains("coherence_wavelets")) c.coherence_wavelets = json_strings(j, "coherence_wavelets");
    if (j.contains("allocation")) c.allocation = AllocationSpec::from_json(j.at("allocation"));
    if (j.contains("rip")) c.rip = RipSpec::from_json(j.at("rip"));
    c.dense_limit = j.value("dense_limit", c.dense_limit);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.threads = j.value("threads", c.threads);
    c.save_artifacts = j.value("save_artifacts", c.save_artifacts);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return from_json(j);
}

std::string config_digest(const json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

// ---------------------------------------------------------------- report

json CaseResult::to_json() const {
  return {{"name", name},
          {"transform", transform},
          {"resolution", resolution},
          {"trial", trial},
          {"seed", seed},
          {"error_percent", error_percent},
          {"seconds", seconds},
          {"iterations", iterations},
          {"converged", converged},
          {"measurements", measurements},
          {"artifacts", artifacts}};
}

bool RunReport::all_converged() const {
  return std::all_of(cases.begin(), cases.end(), [](const CaseResult& c) { return c.converged; });
}

json RunReport::to_json() const {
  json cs = json::array();
  for (const auto& c : cases) cs.push_back(c.to_json());
  return {{"experiment", experiment}, {"config_digest", digest}, {"config", config},
          {"root_seed", root_seed},   {"cases", cs},             {"summary", summary},
          {"artifacts", artifacts},   {"seconds", seconds}};
}

std::string RunReport::save(const std::string& out_dir) const {
  fs::create_directories(out_dir);
  const auto path = fs::path(out_dir) / "report.json";
  write_text(path, to_json().dump(2) + "\n");
  return path.string();
}

// ---------------------------------------------------------------- operators

SamplingScheme canonical_multilevel_scheme_2d(const Signal& coeffs, Index side, int levels, Index m,
                                              double epsilon, std::uint64_t seed, bool sequency) {
  const LevelPartition scales = wavelet_partition_2d(side, levels);
  auto k = level_sparsities(coeffs, scales, epsilon);
  for (auto& v : k) v = std::max<Index>(v, 1);
  const SparsityPattern pattern(scales, k);
  const RadialBands bands = radial_bands_2d(side, levels, sequency);
  if (m > bands.partition.total()) throw SchemeError("more samples requested than rows");

  auto total_at = [&](double s) {
    const auto a = allocate_measurements(pattern, s, bands.partition);
    Index t = 0;
    for (Index v : a.m) t += v;
    return t;
  };
  // Largest scale whose allocation fits, then top up from the finest band.
  double lo = 1e-9, hi = 1e9;
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);
    (total_at(mid) <= m ? lo : hi) = mid;
  }
  auto counts = allocate_measurements(pattern, lo, bands.partition).m;
  Index deficit = m - total_at(lo);
  for (int j = levels - 1; j >= 0 && deficit > 0; --j) {
    const Index add = std::min(deficit, bands.partition.size(j) - counts[static_cast<std::size_t>(j)]);
    counts[static_cast<std::size_t>(j)] += add;
    deficit -= add;
  }
  const IndexMap map{sequency ? IndexMap::Kind::RadialSequency2D : IndexMap::Kind::RadialFourier2D, side, levels};
  return multilevel_sample(bands.partition, counts, seed, map);
}

SensingOperator build_case_operator(const ExperimentConfig& cfg, const std::string& transform, Index side,
                                    const Signal& coeffs, std::uint64_t seed) {
  const TransformTag tag = transform_tag_from_string(transform);
  const Index n = side * side;
  const Index m = sample_count(n, cfg.scheme.fraction);
  const WaveletKind w{cfg.wavelet, cfg.levels_for(side)};
  const Geometry g{side, true};
  const std::uint64_t scheme_seed = mix_seed(seed, "scheme");
  if (tag != TransformTag::DFT && tag != TransformTag::WHT) {
    return SensingOperator(TransformKind{tag, m, mix_seed(seed, "operator")}, g, w, std::nullopt);
  }
  const bool sequency = tag == TransformTag::WHT;
  const IndexMap flat{sequency ? IndexMap::Kind::Sequency2D : IndexMap::Kind::Fourier2D, side, 1};
  std::optional<SamplingScheme> scheme;
  if (cfg.scheme.kind == "multilevel") {
    scheme = canonical_multilevel_scheme_2d(coeffs, side, w.levels, m, cfg.scheme.epsilon, scheme_seed, sequency);
  } else if (cfg.scheme.kind == "uniform") {
    scheme = multilevel_sample(LevelPartition::single(n), {m}, scheme_seed, flat);
  } else if (cfg.scheme.kind == "power_law") {
    scheme = power_law_pattern_2d(side, m, cfg.scheme.alpha, scheme_seed, cfg.scheme.center_fraction);
  } else {
    scheme = multilevel_sample(LevelPartition::single(n), {n}, scheme_seed, flat);
  }
  return SensingOperator(TransformKind{tag, 0, 0}, g, w, std::move(scheme));
}

DenseMatrix structured_matrix(const std::string& transform, const std::string& wavelet, Index n) {
  const int r = log2_exact(n);
  if (n > kDenseCap) throw SizeError("structured matrix above the dense cap");
  DenseMatrix u(n, n);
  std::optional<WaveletKind> w;
  if (wavelet != "none") w = WaveletKind{wavelet_family_from_string(wavelet), r};
  for (Index i = 0; i < n; ++i) {
    Signal e = Signal::Zero(n);
    e(i) = 1.0;
    const Signal col = w ? dwt_inverse(e, *w) : e;
    if (transform == "dft") {
      u.col(i) = dft_apply(col);
    } else if (transform == "wht") {
      u.col(i) = wht_apply(col);
    } else if (transform == "identity") {
      u.col(i) = col;
    } else {
      throw ParameterError("unknown structured transform '" + transform + "'");
    }
  }
  if (transform == "dft") {
    const auto rows = dyadic_bands(r).row;
    DenseMatrix banded(n, n);
    for (Index p = 0; p < n; ++p) banded.row(p) = u.row(rows[static_cast<std::size_t>(p)]);
    return banded;
  }
  return u;
}

// ---------------------------------------------------------------- runners

RunReport run_flip_test(const ExperimentConfig& cfg) {
  return run_permutation_test(cfg, "flip-test", Permutation::Full, LevelPartition{});
}

RunReport run_flip_test_in_levels(const ExperimentConfig& cfg) {
  if (cfg.flip_partition == "identity")
    return run_permutation_test(cfg, "flip-test-levels", Permutation::Identity, LevelPartition{});
  if (cfg.flip_partition == "single") {
    return run_permutation_test(cfg, "flip-test-levels", Permutation::Levels,
                                LevelPartition::single(cfg.resolution * cfg.resolution));
  }
  if (cfg.flip_partition == "subbands") {
    return run_permutation_test(cfg, "flip-test-levels", Permutation::Levels,
                                subband_partition_2d(cfg.resolution, cfg.levels_for(cfg.resolution)));
  }
  return run_permutation_test(cfg, "flip-test-levels", Permutation::Levels, LevelPartition{});
}

RunReport run_comparison(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  RunReport report = start_report(cfg, "compare");
  const fs::path dir = cfg.out_dir;

  std::vector<ImageCase> images;
  for (Index side : cfg.resolutions) {
    images.push_back(prepare_image(cfg, side));
    save_original(cfg, dir, "original_r" + std::to_string(side), images.back().x, side, report.artifacts);
  }

  struct Job {
    std::size_t image;
    std::string transform;
    int trial;
  };
  std::vector<Job> jobs;
  for (std::size_t r = 0; r < images.size(); ++r)
    for (const auto& t : cfg.transforms)
      for (int k = 0; k < cfg.trials; ++k) jobs.push_back({r, t, k});

  std::vector<CaseResult> cases(jobs.size());
  std::mutex artifacts_mutex;
  parallel_for(static_cast<Index>(jobs.size()), cfg.threads, [&](Index i) {
    const Job& job = jobs[static_cast<std::size_t>(i)];
    const ImageCase& ic = images[job.image];
    const auto c0 = Clock::now();
    const std::uint64_t seed =
        mix_seed(cfg.seed, "res/" + std::to_string(ic.side) + "/trial/" + std::to_string(job.trial));
    const SensingOperator op = build_case_operator(cfg, job.transform, ic.side, ic.c, seed);
    const SolveResult res = solve_case(op, op.apply(ic.c), cfg.solver, seed);
    const Signal xr = Wavelet2D(ic.side, ic.wavelet).inverse(res.coefficients);

    CaseResult& cr = cases[static_cast<std::size_t>(i)];
    cr.name = case_tag(ic.side, job.transform, job.trial);
    cr.transform = job.transform;
    cr.resolution = ic.side;
    cr.trial = job.trial;
    cr.seed = seed;
    cr.error_percent = relative_error(ic.x, xr);
    cr.iterations = res.iterations;
    cr.converged = res.converged;
    cr.measurements = op.rows();
    save_reconstruction(cfg, dir, cr.name, xr, res, ic.side, cr);
    std::map<std::string, std::string> scheme_files;
    save_scheme(cfg, dir, "scheme_" + cr.name, op, scheme_files);
    cr.artifacts.insert(scheme_files.begin(), scheme_files.end());
    cr.seconds = seconds_since(c0);
  });
  report.cases = std::move(cases);

  json table = json::array();
  std::ostringstream csv;
  csv << "resolution";
  for (const auto& t : cfg.transforms) csv << "," << t;
  csv << "\n";
  std::vector<double> ratios;
  for (Index side : cfg.resolutions) {
    json row = {{"resolution", side}};
    std::vector<double> med;
    csv << side;
    for (const auto& t : cfg.transforms) {
      std::vector<double> errs;
      for (const auto& c : report.cases)
        if (c.resolution == side && c.transform == t) errs.push_back(c.error_percent);
      med.push_back(median(errs));
      row["errors"][t] = med.back();
      csv << "," << med.back();
    }
    csv << "\n";
    if (med.size() == 2) {
      ratios.push_back(med[0] / med[1]);
      row["ratio"] = ratios.back();
    }
    table.push_back(row);
  }
  report.summary["table"] = table;
  if (!ratios.empty()) {
    bool nondecreasing = true, below = true;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
      below = below && ratios[i] > 1.0;
      if (i > 0) nondecreasing = nondecreasing && ratios[i] >= ratios[i - 1];
    }
    report.summary["ratios"] = ratios;
    report.summary["ratio_nondecreasing"] = nondecreasing;
    report.summary["second_below_first"] = below;
  }
  const auto csv_path = dir / "comparison.csv";
  write_text(csv_path, csv.str());
  report.artifacts["comparison"] = csv_path.string();
  report.seconds = seconds_since(t0);
  report.save(cfg.out_dir);
  return report;
}

RunReport run_sparsity_curves(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  RunReport report = start_report(cfg, "sparsity-curves");
  const ImageCase ic = prepare_image(cfg, cfg.resolution);
  const LevelPartition part = Wavelet2D(ic.side, ic.wavelet).partition();
  const SparsityCurve curve = sparsity_curves(ic.c, part);
  const auto csv_path = fs::path(cfg.out_dir) / "sparsity_curves.csv";
  write_text(csv_path, curve.to_csv());
  report.artifacts["curves"] = csv_path.string();

  constexpr double kEpsilon = 0.99;
  const auto k = level_sparsities(ic.c, part, kEpsilon);
  std::vector<double> rel;
  for (int l = 0; l < part.levels(); ++l)
    rel.push_back(static_cast<double>(k[static_cast<std::size_t>(l)]) / static_cast<double>(part.size(l)));
  bool finest_three = rel.size() >= 3;
  for (std::size_t l = rel.size() >= 3 ? rel.size() - 2 : rel.size(); l < rel.size(); ++l)
    finest_three = finest_three && rel[l] < rel[l - 1];
  report.summary = {{"epsilon", kEpsilon},
                    {"k", k},
                    {"relative_sparsity", rel},
                    {"fine_decay", rel.back() < rel.front()},
                    {"finest_three_strictly_decreasing", finest_three}};
  report.seconds = seconds_since(t0);
  report.save(cfg.out_dir);
  return report;
}

RunReport run_coherence_map(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  if (cfg.coherence_n > kDenseCap)
    throw SizeError("coherence_n " + std::to_string(cfg.coherence_n) + " above the dense cap");
  RunReport report = start_report(cfg, "coherence-map");
  const Index n = cfg.coherence_n;
  const LevelPartition part = dyadic_bands(log2_exact(n)).partition;
  for (const auto& t : cfg.coherence_transforms) {
    for (const auto& w : cfg.coherence_wavelets) {
      const std::string stem = "coherence_" + t + "_" + w;
      const DenseMatrix u = structured_matrix(t, w, n);
      const CoherenceMatrix cm = coherence_block_matrix(u, part, part);
      const auto csv_path = fs::path(cfg.out_dir) / (stem + ".csv");
      const auto pgm_path = fs::path(cfg.out_dir) / (stem + ".pgm");
      write_text(csv_path, cm.to_csv());
      const RealMatrix mag = u.cwiseAbs();
      Image2D heat(RowMajorImage(mag / mag.maxCoeff()));
      save_pgm(heat, pgm_path.string());
      report.artifacts[stem] = csv_path.string();
      report.artifacts[stem + "_map"] = pgm_path.string();
      json rows = json::array();
      for (Index j = 0; j < cm.mu.rows(); ++j) {
        std::vector<double> row(static_cast<std::size_t>(cm.mu.cols()));
        for (Index l = 0; l < cm.mu.cols(); ++l) row[static_cast<std::size_t>(l)] = cm.mu(j, l);
        rows.push_back(row);
      }
      report.summary[t + "_" + w] = {{"mutual_coherence", mutual_coherence(u)}, {"block_mu", rows}};
    }
  }
  report.seconds = seconds_since(t0);
  report.save(cfg.out_dir);
  return report;
}

RunReport run_recover(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  RunReport report = start_report(cfg, "recover");
  const fs::path dir = cfg.out_dir;
  const ImageCase ic = prepare_image(cfg, cfg.resolution);
  save_original(cfg, dir, "original", ic.x, ic.side, report.artifacts);
  const std::uint64_t seed = mix_seed(cfg.seed, "trial/0");
  const SensingOperator op = build_case_operator(cfg, cfg.transform, ic.side, ic.c, seed);
  save_scheme(cfg, dir, "scheme", op, report.artifacts);
  const SolveResult res = solve_case(op, op.apply(ic.c), cfg.solver, seed);
  const Signal xr = Wavelet2D(ic.side, ic.wavelet).inverse(res.coefficients);

  CaseResult cr;
  cr.name = case_tag(ic.side, cfg.transform, 0);
  cr.transform = cfg.transform;
  cr.resolution = ic.side;
  cr.seed = seed;
  cr.error_percent = relative_error(ic.x, xr);
  cr.iterations = res.iterations;
  cr.converged = res.converged;
  cr.measurements = op.rows();
  save_reconstruction(cfg, dir, cr.name, xr, res, ic.side, cr);
  const auto solve_path = dir / "solve.json";
  write_text(solve_path, res.diagnostics().dump(2) + "\n");
  cr.artifacts["solve"] = solve_path.string();
  cr.seconds = seconds_since(t0);
  report.cases.push_back(cr);
  report.summary = {{"error_percent", cr.error_percent}, {"measurements", cr.measurements}};
  report.seconds = seconds_since(t0);
  report.save(cfg.out_dir);
  return report;
}

RunReport run_allocate(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  RunReport report = start_report(cfg, "allocate");
  const auto& a = cfg.allocation;
  LevelPartition bands;
  IndexMap map;
  if (a.boundaries.empty()) {
    const auto b = dyadic_bands(static_cast<int>(a.k.size()));
    bands = b.partition;
    map = IndexMap{IndexMap::Kind::DyadicFourier, bands.total(), 0};
  } else {
    if (a.boundaries.front() != 0) throw ConfigError("allocation.boundaries must start at 0");
    try {
      bands = LevelPartition(std::vector<Index>(a.boundaries.begin() + 1, a.boundaries.end()));
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("allocation.boundaries: ") + e.what());
    }
  }
  SparsityPattern pattern;
  try {
    pattern = SparsityPattern(bands, a.k);
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("allocation.k: ") + e.what());
  }
  const Allocation alloc = allocate_measurements(pattern, a.scale, bands);
  Index total = 0;
  for (Index v : alloc.m) total += v;
  report.summary = {{"m", alloc.m}, {"demand", alloc.demand}, {"clipped", alloc.clipped}, {"total", total}};
  const auto alloc_path = fs::path(cfg.out_dir) / "allocation.json";
  write_text(alloc_path, report.summary.dump(2) + "\n");
  report.artifacts["allocation"] = alloc_path.string();
  if (a.sample) {
    const SamplingScheme scheme = multilevel_sample(bands, alloc.m, mix_seed(cfg.seed, "scheme"), map);
    const auto path = fs::path(cfg.out_dir) / "scheme.json";
    write_text(path, scheme.to_json().dump() + "\n");
    report.artifacts["scheme"] = path.string();
  }
  report.seconds = seconds_since(t0);
  report.save(cfg.out_dir);
  return report;
}

RunReport run_riplevels(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  RunReport report = start_report(cfg, "riplevels");
  const auto& r = cfg.rip;
  const DenseEnsemble kind = r.ensemble == "gaussian" ? DenseEnsemble::Gaussian : DenseEnsemble::Bernoulli;
  const DenseRandomOperator a(kind, r.m, r.n, mix_seed(cfg.seed, "operator"));
  SparsityPattern pattern;
  try {
    pattern = SparsityPattern(LevelPartition(std::vector<Index>(r.boundaries.begin() + 1, r.boundaries.end())), r.k);
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("rip pattern: ") + e.what());
  }
  SearchOptions opts;
  opts.mode = r.mode == "exhaustive" ? SearchMode::Exhaustive : SearchMode::MonteCarlo;
  opts.trials = r.trials;
  opts.seed = mix_seed(cfg.seed, "search");
  opts.threads = cfg.threads;
  const RipEstimate est = rip_level_constant(a.matrix().cast<Complex>(), pattern, opts);
  const auto path = fs::path(cfg.out_dir) / "rip.json";
  write_text(path, est.to_json().dump(2) + "\n");
  report.artifacts["rip"] = path.string();
  report.summary = est.to_json();
  bool positive = std::all_of(r.k.begin(), r.k.end(), [](Index v) { return v > 0; });
  if (positive) {
    const double lambda = ratio_constant(pattern);
    const double threshold = ripl_threshold(pattern.partition.levels(), lambda);
    report.summary["ratio_constant"] = lambda;
    report.summary["threshold"] = threshold;
    report.summary["below_threshold"] = est.delta < threshold;
  }
  report.seconds = seconds_since(t0);
  report.save(cfg.out_dir);
  return report;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
  const std::string& e = cfg.experiment;
  if (e == "flip-test") return run_flip_test(cfg);
  if (e == "flip-test-levels") return run_flip_test_in_levels(cfg);
  if (e == "compare") return run_comparison(cfg);
  if (e == "sparsity-curves") return run_sparsity_curves(cfg);
  if (e == "coherence-map") return run_coherence_map(cfg);
  if (e == "recover") return run_recover(cfg);
  if (e == "allocate") return run_allocate(cfg);
  if (e == "riplevels") return run_riplevels(cfg);
  throw ConfigError("unknown experiment '" + e + "'");
}

// ---------------------------------------------------------------- utilities

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

void parallel_for(Index count, int threads, const std::function<void(Index)>& fn) {
  const int workers = static_cast<int>(std::min<Index>(std::max(threads, 1), count));
  if (workers <= 1) {
    for (Index i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (Index i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace mlcs
