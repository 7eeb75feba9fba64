// SPDX-License-Identifier: Apache-2.0
#include "gpursm/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "gpursm/error.hpp"

namespace gpursm {
namespace {

// Relative size below which a new column is considered to lie in the span
// of the current support.
constexpr double kRankTolerance = 1e-10;

struct Candidate {
  double score;
  std::size_t index;
};

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::mt19937_64 draw_stream(std::uint64_t seed, std::size_t draw) {
  const auto d = static_cast<std::uint64_t>(draw);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(d >> 32)};
  return std::mt19937_64(seq);
}

void check_shapes(const Eigen::MatrixXd& d, const Eigen::VectorXd& t) {
  if (d.rows() != t.size())
    throw Error(Errc::DimensionMismatch, "dictionary has " + std::to_string(d.rows()) +
                                             " rows, target has " + std::to_string(t.size()));
  if (d.cols() == 0) throw Error(Errc::DimensionMismatch, "dictionary has no columns");
}

// Greedy pursuit with an incrementally built QR factorization of the selected
// columns. With tau == 1 (or no rng) the most correlated column is taken;
// otherwise one of the top-tau columns is drawn with probability proportional
// to its correlation score.
SparseSolution pursue(const Eigen::MatrixXd& d, const Eigen::VectorXd& t, std::size_t k_max,
                      std::size_t tau, double fidelity_epsilon, Polarity polarity,
                      std::mt19937_64* rng) {
  const Eigen::Index n = d.rows();
  const auto c = static_cast<std::size_t>(d.cols());
  const double threshold = fidelity_epsilon * t.norm();

  SparseSolution sol;
  Eigen::VectorXd residual = t;
  Eigen::MatrixXd q(n, static_cast<Eigen::Index>(k_max));
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k_max),
                                            static_cast<Eigen::Index>(k_max));
  Eigen::VectorXd qt(static_cast<Eigen::Index>(k_max));
  std::vector<bool> selected(c, false);
  std::vector<Candidate> candidates;
  candidates.reserve(c);

  double rnorm = residual.norm();
  sol.residual_history.push_back(rnorm);

  while (sol.support.size() < k_max && rnorm > threshold) {
    const Eigen::VectorXd corr = d.transpose() * residual;
    candidates.clear();
    for (std::size_t i = 0; i < c; ++i) {
      if (selected[i]) continue;
      const double v = corr(static_cast<Eigen::Index>(i));
      const double score = polarity == Polarity::Absolute ? std::abs(v) : v;
      if (score > 0.0) candidates.push_back({score, i});
    }
    if (candidates.empty()) break;

    const auto better = [](const Candidate& a, const Candidate& b) {
      return a.score > b.score || (a.score == b.score && a.index < b.index);
    };
    const std::size_t pool = std::min(tau, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(pool),
                      candidates.end(), better);

    std::size_t pick = 0;
    if (pool > 1 && rng != nullptr) {
      double total = 0.0;
      for (std::size_t k = 0; k < pool; ++k) total += candidates[k].score;
      double u = uniform01(*rng) * total;
      pick = pool - 1;
      for (std::size_t k = 0; k < pool; ++k) {
        if (u < candidates[k].score) {
          pick = k;
          break;
        }
        u -= candidates[k].score;
      }
    }
    const std::size_t j = candidates[pick].index;

    // Modified Gram-Schmidt, applied twice for orthogonality to working precision.
    const auto m = static_cast<Eigen::Index>(sol.support.size());
    Eigen::VectorXd v = d.col(static_cast<Eigen::Index>(j));
    const double original = v.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < m; ++k) {
        const double h = q.col(k).dot(v);
        r(k, m) += h;
        v -= h * q.col(k);
      }
    }
    const double nu = v.norm();
    if (!(nu > kRankTolerance * original)) {
      // Rank deficient: drop the newest column and stop.
      for (Eigen::Index k = 0; k < m; ++k) r(k, m) = 0.0;
      break;
    }
    q.col(m) = v / nu;
    r(m, m) = nu;
    qt(m) = q.col(m).dot(residual);
    residual -= qt(m) * q.col(m);
    selected[j] = true;
    sol.support.push_back(j);
    rnorm = residual.norm();
    sol.residual_history.push_back(rnorm);
  }

  const auto m = static_cast<Eigen::Index>(sol.support.size());
  if (m > 0) {
    const Eigen::VectorXd a =
        r.topLeftCorner(m, m).triangularView<Eigen::Upper>().solve(qt.head(m));
    sol.coefficients.assign(a.data(), a.data() + m);
  }
  sol.residual_norm = rnorm;
  sol.iterations = sol.support.size();
  return sol;
}

}  // namespace

Eigen::VectorXd SparseSolution::dense(Eigen::Index columns) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(columns);
  for (std::size_t k = 0; k < support.size(); ++k)
    out(static_cast<Eigen::Index>(support[k])) = coefficients[k];
  return out;
}

SparseSolution omp(const Eigen::MatrixXd& d, const Eigen::VectorXd& t, const OmpOptions& options) {
  check_shapes(d, t);
  if (options.k_max < 1 || options.k_max > static_cast<std::size_t>(d.cols()))
    throw Error(Errc::InvalidParameter, "k_max must lie in [1, columns]");
  return pursue(d, t, options.k_max, 1, options.fidelity_epsilon, options.polarity, nullptr);
}

std::size_t sparsity_budget(double kappa, std::size_t columns) {
  if (!(kappa > 0.0 && kappa <= 1.0))
    throw Error(Errc::InvalidKappa, "kappa must lie in (0, 1], got " + std::to_string(kappa));
  const auto k = static_cast<std::size_t>(std::floor(kappa * static_cast<double>(columns) + 1e-9));
  return std::max<std::size_t>(1, k);
}

SparseSolution ensemble_draw(const Eigen::MatrixXd& d, const Eigen::VectorXd& t, std::size_t k_max,
                             const EnsembleParams& params, std::size_t draw) {
  auto rng = draw_stream(params.seed, draw);
  return pursue(d, t, k_max, params.tau, params.fidelity_epsilon, params.polarity, &rng);
}

EnsembleResult ensemble_omp(const Eigen::MatrixXd& d, const Eigen::VectorXd& t,
                            const EnsembleParams& params) {
  check_shapes(d, t);
  const auto c = static_cast<std::size_t>(d.cols());
  const std::size_t k_max = sparsity_budget(params.kappa, c);
  if (params.tau < 1) throw Error(Errc::InvalidParameter, "tau must be at least 1");
  if (params.draws < 1) throw Error(Errc::InvalidParameter, "draws must be at least 1");

  std::vector<SparseSolution> solutions(params.draws);
  unsigned workers = params.threads ? params.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, params.draws));
  {
    std::vector<std::jthread> pool;
    const std::size_t block = (params.draws + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = w * block;
      const std::size_t end = std::min(params.draws, begin + block);
      pool.emplace_back([&, begin, end] {
        for (std::size_t i = begin; i < end; ++i) solutions[i] = ensemble_draw(d, t, k_max, params, i);
      });
    }
  }

  // Running mean in draw order: independent of how draws were scheduled, and
  // exact when every draw returns the same vector.
  EnsembleResult out;
  out.avg_coefficients = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c));
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c));
  Eigen::VectorXd draw_vec(static_cast<Eigen::Index>(c));
  for (std::size_t i = 0; i < params.draws; ++i) {
    draw_vec.setZero();
    for (std::size_t k = 0; k < solutions[i].support.size(); ++k) {
      const auto j = static_cast<Eigen::Index>(solutions[i].support[k]);
      draw_vec(j) = solutions[i].coefficients[k];
      counts(j) += 1.0;
    }
    out.avg_coefficients += (draw_vec - out.avg_coefficients) / static_cast<double>(i + 1);
  }
  out.selection_frequency = counts / static_cast<double>(params.draws);
  out.draws = params.draws;
  out.seed = params.seed;
  out.sparsity_kappa = params.kappa;
  out.tau = params.tau;
  out.k_max = k_max;
  return out;
}

BeliefVector beliefs(const Eigen::MatrixXd& d, const std::vector<std::string>& labels,
                     const Eigen::VectorXd& t, const EnsembleResult& ens, double gamma,
                     const std::vector<std::string>& constant_labels) {
  check_shapes(d, t);
  if (static_cast<Eigen::Index>(labels.size()) != d.cols() || ens.avg_coefficients.size() != d.cols())
    throw Error(Errc::DimensionMismatch, "labels/coefficients do not match dictionary columns");
  if (!(gamma > 0.0)) throw Error(Errc::InvalidParameter, "gamma must be positive");

  const auto c = d.cols();
  const auto total = c + static_cast<Eigen::Index>(constant_labels.size());
  BeliefVector b;
  b.gamma = gamma;
  b.labels = labels;
  b.labels.insert(b.labels.end(), constant_labels.begin(), constant_labels.end());
  b.errors.resize(total);
  b.beliefs.resize(total);
  for (Eigen::Index i = 0; i < c; ++i) {
    b.errors(i) = (t - d.col(i) * ens.avg_coefficients(i)).squaredNorm();
    b.beliefs(i) = std::exp(-gamma * b.errors(i));
  }
  for (Eigen::Index i = c; i < total; ++i) {
    b.errors(i) = t.squaredNorm();
    b.beliefs(i) = 0.0;
  }
  return b;
}

RsmReport resource_rsm(std::span<const BeliefVector> per_workload, const GroupMembers& partition,
                       const std::vector<std::string>& workload_labels) {
  if (partition.empty())
    throw Error(Errc::EmptyGroupPartition, "no resource group has analyzed columns");
  if (per_workload.empty())
    throw Error(Errc::EmptyGroupPartition, "no workload beliefs to aggregate");
  if (!workload_labels.empty() && workload_labels.size() != per_workload.size())
    throw Error(Errc::DimensionMismatch, "workload labels do not match belief vectors");

  RsmReport report;
  const double w_count = static_cast<double>(per_workload.size());
  for (std::size_t w = 0; w < per_workload.size(); ++w) {
    const auto& bv = per_workload[w];
    std::map<std::string, double> lookup;
    for (std::size_t i = 0; i < bv.labels.size(); ++i)
      lookup[bv.labels[i]] = bv.beliefs(static_cast<Eigen::Index>(i));

    std::map<std::string, double> rsm_w;
    for (const auto& [group, members] : partition) {
      double deficiency = 1.0;
      for (const auto& e : members) {
        auto it = lookup.find(e);
        if (it != lookup.end()) deficiency *= 1.0 - it->second;
      }
      rsm_w[group] = 1.0 - deficiency;
      report.per_resource[group] += rsm_w[group] / w_count;
    }
    for (const auto& [event, belief] : lookup) report.per_event[event] += belief / w_count;
    if (per_workload.size() > 1) {
      const auto label = workload_labels.empty() ? std::to_string(w) : workload_labels[w];
      report.workload_breakdown[label] = std::move(rsm_w);
    }
  }
  return report;
}

RsmReport normalize_rsm(const RsmReport& report) {
  double sum = 0.0;
  for (const auto& [group, v] : report.per_resource) sum += v;
  if (!(sum > 0.0)) throw Error(Errc::AllZeroRsm, "every resource has zero significance");
  RsmReport out = report;
  for (auto& [group, v] : out.per_resource) v /= sum;
  out.normalized = true;
  return out;
}

}  // namespace gpursm
