#include "drro/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "drro/finite_horizon.hpp"
#include "drro/model_io.hpp"
#include "drro/ratapprox.hpp"
#include "drro/realize.hpp"
#include "drro/simulate.hpp"
#include "drro/solver.hpp"

namespace drro {
namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Throw(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Throw(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
}

void WriteJson(const fs::path& path, const Json& j) { WriteFile(path, j.dump(2) + "\n"); }

Json ReadJson(const fs::path& path) {
  try {
    return Json::parse(ReadFile(path));
  } catch (const nlohmann::json::exception& e) {
    Throw(ErrorCode::kIo, path.string() + ": " + e.what());
  }
}

std::vector<double> ToStd(const Vector& v) { return {v.data(), v.data() + v.size()}; }

// Everything a stage needs about the plant.
struct Plant {
  StateSpaceModel model;
  RiccatiData ricc;
};

Plant LoadPlant(const RunConfig& config) {
  Plant p{LoadModel(config.model), {}};
  p.ricc = SolveDare(p.model);
  return p;
}

SolverConfig MakeSolverConfig(const RunConfig& config) {
  SolverConfig s;
  s.grid_size = config.grid;
  s.tol = config.tol;
  s.max_iterations = config.max_iterations;
  return s;
}

GammaParameter LoadParameter(const fs::path& dir) {
  const Json j = ReadJson(dir / "synthesis.json");
  const auto re = j.at("Gamma_re").get<std::vector<double>>();
  const auto im = j.at("Gamma_im").get<std::vector<double>>();
  GammaParameter param;
  param.Gamma = CVector(static_cast<Eigen::Index>(re.size()));
  for (size_t i = 0; i < re.size(); ++i) param.Gamma(static_cast<Eigen::Index>(i)) = {re[i], im[i]};
  param.gamma = j.at("gamma").is_null() ? kInfiniteGamma : j.at("gamma").get<double>();
  return param;
}

FactorSamples LoadOptimalFactor(const fs::path& dir) {
  std::ifstream in(dir / "spectrum.csv");
  if (!in) Throw(ErrorCode::kIo, "cannot read " + (dir / "spectrum.csv").string());
  return SpectralFactorDft(ReadSpectrumCsv(in));
}

double RegretOf(const Plant& p, const RealizedController& ctrl, const FrequencyGrid& grid, double r) {
  const Vector R = ControllerRegretDensity(
      p.model, p.ricc, [&](Complex z) { return ctrl.Evaluate(z); }, grid);
  return WorstCaseForDensity(R, r).value;
}

void SynthesizeRadius(const RunConfig& config, const Plant& p, double r, const fs::path& dir) {
  fs::create_directories(dir);
  const SynthesisResult res = Synthesize(p.model, p.ricc, r, MakeSolverConfig(config));

  Json j;
  j["radius"] = r;
  j["grid"] = config.grid;
  j["gamma"] = res.param.degenerate() ? Json(nullptr) : Json(res.param.gamma);
  j["Gamma_re"] = ToStd(res.param.Gamma.real());
  j["Gamma_im"] = ToStd(res.param.Gamma.imag());
  j["regret"] = res.regret;
  j["iterations"] = res.iterations;
  j["converged"] = res.converged;
  j["change"] = res.change;
  j["fixed_point_residual"] = res.residual;
  j["bw_error"] = res.bw_error;
  j["riccati_residual"] = p.ricc.residual;
  j["nyquist_tail"] = res.L.NyquistTail();
  j["aliasing"] = res.L.Aliasing();
  WriteJson(dir / "synthesis.json", j);

  std::ofstream trace(dir / "trace.csv");
  WriteTraceCsv(trace, res.trace);
  std::ofstream spectrum(dir / "spectrum.csv");
  WriteSpectrumCsv(spectrum, res.M);
  std::ofstream nstar(dir / "nstar.csv");
  WriteSpectrumCsv(nstar, SampleNstar(res.param, p.ricc, res.M.grid));

  if (!res.converged && !config.allow_nonconverged) {
    Throw(ErrorCode::kNonConvergent, "Frank-Wolfe stopped at " + std::to_string(res.iterations) +
                                         " iterations with relative change " +
                                         std::to_string(res.change));
  }
}

void ApproximateRadius(const RunConfig& config, const Plant& p, const fs::path& dir) {
  const GammaParameter param = LoadParameter(dir);
  const FrequencyGrid fine(config.grid * config.verification_factor);
  const SpectrumSamples N = SampleNstar(param, p.ricc, fine);
  RationalFitOptions options;
  if (config.delta) options.delta = *config.delta;

  RationalSpectrum spec;
  if (config.target_epsilon) {
    auto fit = LowestDegree(N, *config.target_epsilon, config.max_degree, options);
    if (!fit) {
      Throw(ErrorCode::kNonConvergent, "no degree up to " + std::to_string(config.max_degree) +
                                           " reaches the target precision");
    }
    spec = *fit;
  } else {
    spec = BestEpsilon(N, config.degree, options);
  }
  WriteFile(dir / "rational.json", RationalSpectrumToJson(spec));
}

void RealizeRadius(const Plant& p, const fs::path& dir) {
  const RationalSpectrum spec = RationalSpectrumFromJson(ReadFile(dir / "rational.json"));
  const auto [num, den] = RationalFactor(spec);
  const FactorRealization fac = RealizeFactor(num, den);
  const Matrix U = SolveLyapunovU(p.model, p.ricc, fac);
  const RealizedController ctrl = AssembleController(p.model, p.ricc, fac, U);
  SaveController(dir / "controller.txt", ctrl);

  // Transfer equivalence against the frequency-domain formula.
  const CVector gamma = FactorGamma(p.ricc, fac, U);
  const FrequencyGrid grid(1024);
  double err = 0.0, scale = 0.0;
  for (int n = 0; n < grid.size(); ++n) {
    const Complex z = grid.point(n);
    const CMatrix ref = EvalRationalController(p.model, p.ricc, fac, gamma, z);
    err = std::max(err, (ctrl.Evaluate(z) - ref).cwiseAbs().maxCoeff());
    scale = std::max(scale, ref.cwiseAbs().maxCoeff());
  }
  const ClosedLoopReport cl = ClosedLoopCheck(p.model, ctrl);
  Json j;
  j["factor_order"] = fac.order();
  j["controller_order"] = ctrl.order();
  j["closed_loop_radius"] = cl.spectral_radius;
  j["stable"] = cl.stable;
  j["transfer_error"] = err / std::max(scale, 1e-300);
  WriteJson(dir / "closed_loop.json", j);
  if (!(err <= 1e-6 * std::max(1.0, scale))) {
    Throw(ErrorCode::kIllConditioned, "realized transfer deviates from the frequency formula");
  }
}

RealizedController EnsureRoProxy(const RunConfig& config, const Plant& p) {
  const fs::path dir = RadiusDirectory(config, config.ro_proxy_radius);
  if (!fs::exists(dir / "controller.txt")) {
    RunConfig relaxed = config;
    relaxed.allow_nonconverged = true;
    SynthesizeRadius(relaxed, p, config.ro_proxy_radius, dir);
    ApproximateRadius(config, p, dir);
    RealizeRadius(p, dir);
  }
  return LoadController(dir / "controller.txt");
}

Json EvaluateRadius(const RunConfig& config, const Plant& p, double r, const fs::path& dir) {
  const Json synthesis = ReadJson(dir / "synthesis.json");
  const RealizedController ctrl = LoadController(dir / "controller.txt");
  const FrequencyGrid grid(config.grid);

  Json j;
  j["radius"] = r;
  j["drro_regret"] = synthesis.at("regret");
  j["rational_regret"] = RegretOf(p, ctrl, grid, r);
  j["h2_regret"] = RegretOf(p, RealizeH2(p.model, p.ricc), grid, r);
  if (config.ro_proxy_radius > 0.0) j["ro_proxy_regret"] = RegretOf(p, EnsureRoProxy(config, p), grid, r);
  j["closed_loop_radius"] = ClosedLoopCheck(p.model, ctrl).spectral_radius;
  if (config.finite_horizon > 0) {
    const FiniteHorizonOperators ops = BuildFiniteOperators(p.model, config.finite_horizon);
    const FiniteRegret fr = FiniteDualRegret(ops, ToeplitzFromController(ctrl, ops.T), r);
    j["finite_horizon"] = ops.T;
    j["finite_regret_per_step"] = fr.regret / ops.T;
  }
  WriteJson(dir / "evaluation.json", j);
  return j;
}

Json SimulateRadius(const RunConfig& config, const Plant& p, double r, const fs::path& dir) {
  const SimulationConfig& sim = config.simulation;
  const RealizedController ctrl = LoadController(dir / "controller.txt");
  std::vector<NamedController> controllers{{"drro", ctrl}, {"h2", RealizeH2(p.model, p.ricc)}};
  std::optional<FiniteHorizonOperators> ops;
  if (sim.replay_block > 0) {
    ops = BuildFiniteOperators(p.model, sim.replay_block);
    const FiniteOracleResult oracle = FiniteFwOracle(*ops, r);
    controllers.push_back({"drro_finite", MakeBlockReplay(p.model, *ops, oracle.K)});
  }
  if (config.ro_proxy_radius > 0.0) controllers.push_back({"ro_proxy", EnsureRoProxy(config, p)});

  Json j;
  for (const auto& name : sim.disturbances) {
    DisturbanceSpec dist;
    dist.kind = ParseDisturbanceKind(name);
    if (dist.kind == DisturbanceKind::kWorstCaseInfinite) {
      dist = WorstCaseInfiniteDisturbance(LoadOptimalFactor(dir), r, sim.fir_taps);
    } else if (dist.kind == DisturbanceKind::kWorstCaseFinite) {
      const int block = ops ? ops->T : 30;
      const FiniteHorizonOperators& fo = ops ? *ops : BuildFiniteOperators(p.model, block);
      const FiniteRegret fr = FiniteDualRegret(fo, ToeplitzFromController(ctrl, block), r);
      dist = WorstCaseFiniteDisturbance(fr.worst_covariance, r);
    }
    dist.amplitude = sim.amplitude;
    dist.frequency = sim.frequency;
    dist.phase = sim.phase;
    const RegretReport report = Simulate(p.model, controllers, dist, sim.horizon, sim.trials, sim.seed);
    std::ofstream csv(dir / ("report_" + name + ".csv"));
    WriteRegretReportCsv(csv, report);
    Json entry;
    for (const auto& c : report.controllers) {
      entry[c.name] = {{"mean_cost", c.mean}, {"standard_error", c.standard_error}};
    }
    j[name] = entry;
  }
  WriteJson(dir / "simulation.json", j);
  return j;
}

template <typename Fn>
void ForEachRadius(const RunConfig& config, Fn fn) {
  for (double r : config.radii) fn(r, RadiusDirectory(config, r));
}

}  // namespace

void RunConfig::Validate() const {
  Require(!model.empty(), "config: model path is required");
  Require(fs::exists(model), "config: model file not found: " + model.string());
  Require(!radii.empty(), "config: at least one radius is required");
  for (double r : radii) Require(r > 0.0 && std::isfinite(r), "config: radii must be positive");
  Require(grid >= 2 && (grid & (grid - 1)) == 0, "config: grid must be a power of two");
  Require(tol > 0.0, "config: tol must be positive");
  Require(max_iterations > 0, "config: max_iterations must be positive");
  Require(degree >= 0 && degree <= 12, "config: degree must lie in [0, 12]");
  Require(!target_epsilon || *target_epsilon > 0.0, "config: target_epsilon must be positive");
  Require(max_degree >= 0 && max_degree <= 12, "config: max_degree must lie in [0, 12]");
  Require(verification_factor >= 1 && (verification_factor & (verification_factor - 1)) == 0,
          "config: verification_factor must be a power of two");
  Require(!delta || (*delta >= 0.0 && *delta < 1.0), "config: delta must lie in [0, 1)");
  Require(finite_horizon == 0 || finite_horizon >= 2, "config: finite_horizon must be 0 or >= 2");
  Require(ro_proxy_radius >= 0.0, "config: ro_proxy_radius must be nonnegative");
  Require(simulation.horizon > 0 && simulation.trials > 0, "config: simulation sizes must be positive");
  Require(simulation.replay_block == 0 || simulation.replay_block >= 2,
          "config: replay_block must be 0 or >= 2");
  Require(simulation.fir_taps >= 1 && simulation.fir_taps <= grid,
          "config: fir_taps must lie in [1, grid]");
  Require(simulation.amplitude > 0.0, "config: amplitude must be positive");
  for (const auto& d : simulation.disturbances) ParseDisturbanceKind(d);
  Require(!out.empty(), "config: output directory is required");
}

RunConfig ParseRunConfig(const std::string& text, const fs::path& base_dir) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    Throw(ErrorCode::kInvalidArgument, std::string("config: ") + e.what());
  }
  Require(j.is_object(), "config: top level must be an object");
  static const std::set<std::string> known{
      "model", "radius", "radii", "grid", "tol", "max_iterations", "degree", "target_epsilon",
      "max_degree", "verification_factor", "delta", "finite_horizon", "ro_proxy_radius",
      "allow_nonconverged", "simulation", "out"};
  static const std::set<std::string> known_sim{"horizon", "trials", "seed", "disturbances",
                                               "replay_block", "fir_taps", "amplitude",
                                               "frequency", "phase"};
  for (const auto& [key, _] : j.items()) {
    Require(known.count(key) == 1, "config: unknown key '" + key + "'");
  }

  Require(!(j.contains("radius") && j.contains("radii")), "config: give either radius or radii");
  RunConfig c;
  c.source_text = text;
  try {
    auto resolve = [&](const std::string& p) {
      const fs::path path(p);
      return path.is_absolute() ? path : base_dir / path;
    };
    if (j.contains("model")) c.model = resolve(j["model"].get<std::string>());
    if (j.contains("radius")) c.radii = {j["radius"].get<double>()};
    if (j.contains("radii")) c.radii = j["radii"].get<std::vector<double>>();
    if (j.contains("grid")) c.grid = j["grid"].get<int>();
    if (j.contains("tol")) c.tol = j["tol"].get<double>();
    if (j.contains("max_iterations")) c.max_iterations = j["max_iterations"].get<int>();
    if (j.contains("degree")) c.degree = j["degree"].get<int>();
    if (j.contains("target_epsilon")) c.target_epsilon = j["target_epsilon"].get<double>();
    if (j.contains("max_degree")) c.max_degree = j["max_degree"].get<int>();
    if (j.contains("verification_factor")) c.verification_factor = j["verification_factor"].get<int>();
    if (j.contains("delta")) c.delta = j["delta"].get<double>();
    if (j.contains("finite_horizon")) c.finite_horizon = j["finite_horizon"].get<int>();
    if (j.contains("ro_proxy_radius")) c.ro_proxy_radius = j["ro_proxy_radius"].get<double>();
    if (j.contains("allow_nonconverged")) c.allow_nonconverged = j["allow_nonconverged"].get<bool>();
    if (j.contains("out")) c.out = resolve(j["out"].get<std::string>());
    if (j.contains("simulation")) {
      const Json& s = j["simulation"];
      Require(s.is_object(), "config: simulation must be an object");
      for (const auto& [key, _] : s.items()) {
        Require(known_sim.count(key) == 1, "config: unknown simulation key '" + key + "'");
      }
      SimulationConfig& sim = c.simulation;
      if (s.contains("horizon")) sim.horizon = s["horizon"].get<int>();
      if (s.contains("trials")) sim.trials = s["trials"].get<int>();
      if (s.contains("seed")) sim.seed = s["seed"].get<std::uint64_t>();
      if (s.contains("disturbances")) sim.disturbances = s["disturbances"].get<std::vector<std::string>>();
      if (s.contains("replay_block")) sim.replay_block = s["replay_block"].get<int>();
      if (s.contains("fir_taps")) sim.fir_taps = s["fir_taps"].get<int>();
      if (s.contains("amplitude")) sim.amplitude = s["amplitude"].get<double>();
      if (s.contains("frequency")) sim.frequency = s["frequency"].get<double>();
      if (s.contains("phase")) sim.phase = s["phase"].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    Throw(ErrorCode::kInvalidArgument, std::string("config: ") + e.what());
  }
  return c;
}

RunConfig LoadRunConfig(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Throw(ErrorCode::kInvalidArgument, "config file not found: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseRunConfig(ss.str(), path.parent_path());
}

std::string RunConfigToJson(const RunConfig& c) {
  Json j;
  j["model"] = c.model.string();
  j["radii"] = c.radii;
  j["grid"] = c.grid;
  j["tol"] = c.tol;
  j["max_iterations"] = c.max_iterations;
  j["degree"] = c.degree;
  j["target_epsilon"] = c.target_epsilon ? Json(*c.target_epsilon) : Json(nullptr);
  j["max_degree"] = c.max_degree;
  j["verification_factor"] = c.verification_factor;
  j["delta"] = c.delta ? Json(*c.delta) : Json(nullptr);
  j["finite_horizon"] = c.finite_horizon;
  j["ro_proxy_radius"] = c.ro_proxy_radius;
  j["allow_nonconverged"] = c.allow_nonconverged;
  j["simulation"] = {{"horizon", c.simulation.horizon},
                     {"trials", c.simulation.trials},
                     {"seed", c.simulation.seed},
                     {"disturbances", c.simulation.disturbances},
                     {"replay_block", c.simulation.replay_block},
                     {"fir_taps", c.simulation.fir_taps},
                     {"amplitude", c.simulation.amplitude},
                     {"frequency", c.simulation.frequency},
                     {"phase", c.simulation.phase}};
  j["out"] = c.out.string();
  return j.dump(2) + "\n";
}

ExitStatus ExitStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kModelRejected:
    case ErrorCode::kIo:
      return ExitStatus::kConfigError;
    case ErrorCode::kNonConvergent:
    case ErrorCode::kSolverStall:
      return ExitStatus::kNonConvergence;
    default:
      return ExitStatus::kNumericalFailure;
  }
}

fs::path RadiusDirectory(const RunConfig& config, double r) {
  char name[64];
  std::snprintf(name, sizeof(name), "r_%g", r);
  return config.out / name;
}

void CmdSynthesize(const RunConfig& config) {
  const Plant p = LoadPlant(config);
  ForEachRadius(config, [&](double r, const fs::path& dir) { SynthesizeRadius(config, p, r, dir); });
}

void CmdApproximate(const RunConfig& config) {
  const Plant p = LoadPlant(config);
  ForEachRadius(config, [&](double, const fs::path& dir) { ApproximateRadius(config, p, dir); });
}

void CmdRealize(const RunConfig& config) {
  const Plant p = LoadPlant(config);
  ForEachRadius(config, [&](double, const fs::path& dir) { RealizeRadius(p, dir); });
}

void CmdEvaluate(const RunConfig& config) {
  const Plant p = LoadPlant(config);
  ForEachRadius(config, [&](double r, const fs::path& dir) { EvaluateRadius(config, p, r, dir); });
}

void CmdSimulate(const RunConfig& config) {
  const Plant p = LoadPlant(config);
  ForEachRadius(config, [&](double r, const fs::path& dir) { SimulateRadius(config, p, r, dir); });
}

void CmdPipeline(const RunConfig& config) {
  const Plant p = LoadPlant(config);
  Json rows = Json::array();
  for (double r : config.radii) {
    const fs::path dir = RadiusDirectory(config, r);
    SynthesizeRadius(config, p, r, dir);
    ApproximateRadius(config, p, dir);
    RealizeRadius(p, dir);
    Json row = EvaluateRadius(config, p, r, dir);
    const Json synthesis = ReadJson(dir / "synthesis.json");
    const Json rational = ReadJson(dir / "rational.json");
    row["degree"] = rational.at("degree");
    row["epsilon"] = rational.at("epsilon");
    row["iterations"] = synthesis.at("iterations");
    row["converged"] = synthesis.at("converged");
    row["fixed_point_residual"] = synthesis.at("fixed_point_residual");
    row["simulation"] = SimulateRadius(config, p, r, dir);
    rows.push_back(row);
  }
  Json summary;
  summary["model"] = config.model.filename().string();
  summary["grid"] = config.grid;
  summary["rows"] = rows;
  WriteJson(config.out / "summary.json", summary);
}

int RunCommand(const std::string& command, const RunConfig& config) {
  std::string stage = command;
  try {
    config.Validate();
    fs::create_directories(config.out);
    WriteFile(config.out / "config.json", config.source_text);
    WriteFile(config.out / "resolved_config.json", RunConfigToJson(config));
    if (command == "synthesize") {
      CmdSynthesize(config);
    } else if (command == "approximate") {
      CmdApproximate(config);
    } else if (command == "realize") {
      CmdRealize(config);
    } else if (command == "evaluate") {
      CmdEvaluate(config);
    } else if (command == "simulate") {
      CmdSimulate(config);
    } else if (command == "pipeline") {
      CmdPipeline(config);
    } else {
      Throw(ErrorCode::kInvalidArgument, "unknown command '" + command + "'");
    }
    return static_cast<int>(ExitStatus::kSuccess);
  } catch (const Error& e) {
    const ExitStatus status = ExitStatusFor(e.code());
    Json j;
    j["status"] = static_cast<int>(status);
    j["error"] = ToString(e.code());
    j["stage"] = stage;
    j["message"] = e.what();
    std::error_code ec;
    fs::create_directories(config.out, ec);
    if (!ec) {
      std::ofstream out(config.out / "error.json");
      out << j.dump(2) << "\n";
    }
    return static_cast<int>(status);
  } catch (const fs::filesystem_error& e) {
    return static_cast<int>(ExitStatus::kConfigError);
  }
}

}  // namespace drro
