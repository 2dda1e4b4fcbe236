#include "drro/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <type_traits>

#include <Eigen/Cholesky>
#include <unsupported/Eigen/FFT>

namespace drro {

const char* ToString(DisturbanceKind kind) {
  switch (kind) {
    case DisturbanceKind::kWhite: return "white";
    case DisturbanceKind::kUniform: return "uniform";
    case DisturbanceKind::kSinusoid: return "sinusoid";
    case DisturbanceKind::kWorstCaseInfinite: return "worst_case_infinite";
    case DisturbanceKind::kWorstCaseFinite: return "worst_case_finite";
  }
  return "unknown";
}

DisturbanceKind ParseDisturbanceKind(const std::string& name) {
  for (auto kind : {DisturbanceKind::kWhite, DisturbanceKind::kUniform, DisturbanceKind::kSinusoid,
                    DisturbanceKind::kWorstCaseInfinite, DisturbanceKind::kWorstCaseFinite}) {
    if (name == ToString(kind)) return kind;
  }
  Throw(ErrorCode::kInvalidArgument, "unknown disturbance kind '" + name + "'");
}

void DisturbanceSpec::Validate() const {
  Require(amplitude > 0.0, "disturbance amplitude must be positive");
  if (kind == DisturbanceKind::kSinusoid) {
    Require(frequency > 0.0 && frequency <= std::numbers::pi, "frequency must lie in (0, pi]");
  }
  if (kind == DisturbanceKind::kWorstCaseInfinite) {
    Require(fir.size() > 0, "worst_case_infinite needs a coloring filter");
  }
  if (kind == DisturbanceKind::kWorstCaseFinite) {
    Require(covariance_root.rows() > 0 && covariance_root.rows() == covariance_root.cols(),
            "worst_case_finite needs a square covariance root");
  }
}

ColoringFilter FirFromFactor(const FactorSamples& factor, int taps) {
  const int N = factor.grid.size();
  Require(taps >= 1 && taps <= N, "tap count must lie in [1, grid size]");
  Eigen::FFT<double> fft;
  std::vector<Complex> values(factor.values.data(), factor.values.data() + N);
  std::vector<Complex> impulse;
  fft.inv(impulse, values);
  ColoringFilter out;
  out.taps = Vector(taps);
  double total = 0.0, kept = 0.0;
  for (int k = 0; k < N; ++k) {
    const double h = impulse[static_cast<size_t>(k)].real();
    total += h * h;
    if (k < taps) {
      out.taps(k) = h;
      kept += h * h;
    }
  }
  out.truncation_energy = total > 0.0 ? (total - kept) / total : 0.0;
  return out;
}

DisturbanceSpec WorstCaseInfiniteDisturbance(const FactorSamples& factor, double radius, int taps) {
  DisturbanceSpec spec;
  spec.kind = DisturbanceKind::kWorstCaseInfinite;
  spec.radius = radius;
  spec.fir = FirFromFactor(factor, taps).taps;
  return spec;
}

DisturbanceSpec WorstCaseFiniteDisturbance(const Matrix& covariance, double radius) {
  Eigen::LLT<Matrix> llt(covariance);
  if (llt.info() != Eigen::Success) {
    Throw(ErrorCode::kNonPositiveSpectrum, "worst-case covariance is not positive definite");
  }
  DisturbanceSpec spec;
  spec.kind = DisturbanceKind::kWorstCaseFinite;
  spec.radius = radius;
  spec.covariance_root = llt.matrixL();
  return spec;
}

BlockReplayController MakeBlockReplay(const StateSpaceModel& model,
                                      const FiniteHorizonOperators& ops, const Matrix& K) {
  Require(K.rows() == ops.T * ops.nu && K.cols() == ops.T, "controller must be (T nu) x T");
  const Matrix O = ObservabilityStack(model, ops.T);
  // (Delta' Delta)^{-1} F'O through two triangular solves.
  const Matrix half = ops.Delta.transpose().triangularView<Eigen::Upper>().solve(ops.F.transpose() * O);
  return BlockReplayController{K, -ops.Delta.triangularView<Eigen::Lower>().solve(half), ops.T};
}

Vector SampleDisturbance(const DisturbanceSpec& dist, int horizon, std::uint64_t seed, int trial) {
  dist.Validate();
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector w(horizon);
  switch (dist.kind) {
    case DisturbanceKind::kWhite:
      for (int t = 0; t < horizon; ++t) w(t) = dist.amplitude * normal(rng);
      break;
    case DisturbanceKind::kUniform: {
      std::uniform_real_distribution<double> uni(-std::sqrt(3.0), std::sqrt(3.0));
      for (int t = 0; t < horizon; ++t) w(t) = dist.amplitude * uni(rng);
      break;
    }
    case DisturbanceKind::kSinusoid:
      for (int t = 0; t < horizon; ++t) {
        w(t) = dist.amplitude * std::sin(dist.frequency * t + dist.phase);
      }
      break;
    case DisturbanceKind::kWorstCaseInfinite: {
      const Eigen::Index taps = dist.fir.size();
      Vector e(horizon + taps - 1);
      for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = normal(rng);
      for (int t = 0; t < horizon; ++t) {
        // w_t = sum_k h_k e_{t-k}, with e shifted by the filter pre-roll.
        w(t) = dist.amplitude * dist.fir.dot(e.segment(t, taps).reverse());
      }
      break;
    }
    case DisturbanceKind::kWorstCaseFinite: {
      const Eigen::Index block = dist.covariance_root.rows();
      for (Eigen::Index start = 0; start < horizon; start += block) {
        Vector e(block);
        for (Eigen::Index i = 0; i < block; ++i) e(i) = normal(rng);
        const Vector wb = dist.amplitude * dist.covariance_root * e;
        const Eigen::Index len = std::min<Eigen::Index>(block, horizon - start);
        w.segment(start, len) = wb.head(len);
      }
      break;
    }
  }
  return w;
}

namespace {

// Per-step costs ||C x_t||^2 + ||u_t||^2 of one closed-loop run.
Vector RunRealized(const StateSpaceModel& model, const RealizedController& c, const Vector& w) {
  const int nx = model.nx();
  const int p = c.plant_states;
  const int q = c.order() - p;
  const Matrix Hf = c.H.leftCols(q);
  const Matrix Hp = p > 0 ? Matrix(c.H.rightCols(p)) : Matrix::Zero(c.H.rows(), nx);
  const Matrix Fff = c.F.topLeftCorner(q, q);
  const Matrix Ffp = p > 0 ? Matrix(c.F.topRightCorner(q, p)) : Matrix::Zero(q, nx);
  const Vector Gf = c.G.topRows(q).col(0);
  const Vector J = c.J.col(0);

  Vector x = Vector::Zero(nx), xi = Vector::Zero(q);
  Vector cost(w.size());
  for (Eigen::Index t = 0; t < w.size(); ++t) {
    const Vector u = Hf * xi + Hp * x + J * w(t);
    cost(t) = (model.C * x).squaredNorm() + u.squaredNorm();
    const Vector xi_next = Fff * xi + Ffp * x + Gf * w(t);
    x = model.A * x + model.Bu * u + model.Bw.col(0) * w(t);
    xi = xi_next;
  }
  return cost;
}

Vector RunBlockReplay(const StateSpaceModel& model, const BlockReplayController& c, const Vector& w) {
  const int nx = model.nx(), nu = model.nu();
  const int s = c.block;
  Vector x = Vector::Zero(nx), xb = x;
  Vector cost(w.size());
  for (Eigen::Index t = 0; t < w.size(); ++t) {
    const int j = static_cast<int>(t % s);
    const Eigen::Index start = t - j;
    if (j == 0) xb = x;
    const Eigen::Index len = std::min<Eigen::Index>(s, w.size() - start);
    Vector wb = Vector::Zero(s);
    wb.head(len) = w.segment(start, len);
    const Vector u = c.K.middleRows(j * nu, nu) * wb + c.correction.middleRows(j * nu, nu) * xb;
    cost(t) = (model.C * x).squaredNorm() + u.squaredNorm();
    x = model.A * x + model.Bu * u + model.Bw.col(0) * w(t);
  }
  return cost;
}

}  // namespace

RegretReport Simulate(const StateSpaceModel& model, const std::vector<NamedController>& controllers,
                      const DisturbanceSpec& dist, int horizon, int trials, std::uint64_t seed) {
  Require(horizon >= 1, "horizon must be positive");
  Require(trials >= 1, "trial count must be positive");
  dist.Validate();

  RegretReport report;
  report.horizon = horizon;
  report.trials = trials;
  report.seed = seed;
  report.kind = dist.kind;
  const size_t nc = controllers.size();
  std::vector<Matrix> running(nc, Matrix(trials, horizon));

  for (int i = 0; i < trials; ++i) {
    const Vector w = SampleDisturbance(dist, horizon, seed, i);
    for (size_t c = 0; c < nc; ++c) {
      const Vector cost = std::visit(
          [&](const auto& k) -> Vector {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, RealizedController>) {
              return RunRealized(model, k, w);
            } else {
              return RunBlockReplay(model, k, w);
            }
          },
          controllers[c].controller);
      double acc = 0.0;
      for (int t = 0; t < horizon; ++t) {
        acc += cost(t);
        running[c](i, t) = acc / (t + 1.0);
      }
    }
  }

  const double n = trials;
  for (size_t c = 0; c < nc; ++c) {
    ControllerStats stats;
    stats.name = controllers[c].name;
    stats.running_mean = running[c].colwise().mean().transpose();
    Vector var = (running[c].rowwise() - stats.running_mean.transpose()).colwise().squaredNorm().transpose();
    var /= std::max(1.0, n - 1.0);
    stats.running_halfwidth = 1.96 * (var / n).cwiseSqrt();
    stats.trial_average = running[c].col(horizon - 1);
    stats.mean = stats.running_mean(horizon - 1);
    stats.standard_error = std::sqrt(var(horizon - 1) / n);
    report.controllers.push_back(std::move(stats));
  }
  return report;
}

void WriteRegretReportCsv(std::ostream& out, const RegretReport& report) {
  out << "time,controller,mean_cost,ci_halfwidth\n";
  out.precision(12);
  for (const auto& c : report.controllers) {
    for (int t = 0; t < report.horizon; ++t) {
      out << t << ',' << c.name << ',' << c.running_mean(t) << ',' << c.running_halfwidth(t) << '\n';
    }
  }
}

}  // namespace drro
