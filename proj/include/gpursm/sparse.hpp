// SPDX-License-Identifier: Apache-2.0
//
// Sparse selection of counters that reconstruct a target:
//
//   min_a ||t - D a||^2  subject to  ||a||_0 <= k
//
// solved greedily by Orthogonal Matching Pursuit, and a randomized ensemble
// of OMP runs whose averaged solution feeds per-event beliefs and the
// per-resource significance measure (RSM).
#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gpursm {

/// Which columns may be picked at a step.
///  Absolute: rank by |<d_i, r>| (classic OMP).
///  Positive: only columns with <d_i, r> > 0, ranked by that value.
enum class Polarity { Absolute, Positive };

struct SparseSolution {
  std::vector<std::size_t> support;
  /// Least-squares refit on `support`, same order.
  std::vector<double> coefficients;
  double residual_norm = 0.0;
  std::size_t iterations = 0;
  /// ||r|| before the first pick and after every accepted pick.
  std::vector<double> residual_history;

  /// Length-C coefficient vector with zeros off the support.
  Eigen::VectorXd dense(Eigen::Index columns) const;
};

struct OmpOptions {
  std::size_t k_max = 1;
  /// Stop once ||r|| <= fidelity_epsilon * ||t||.
  double fidelity_epsilon = 1e-6;
  Polarity polarity = Polarity::Absolute;
};

/// `d` must have unit-norm columns.
SparseSolution omp(const Eigen::MatrixXd& d, const Eigen::VectorXd& t, const OmpOptions& options);

struct EnsembleParams {
  double kappa = 0.5;
  std::size_t tau = 5;
  std::size_t draws = 50000;
  std::uint64_t seed = 0;
  double fidelity_epsilon = 1e-6;
  Polarity polarity = Polarity::Absolute;
  /// Worker threads for the draws; 0 picks the hardware concurrency. Never
  /// affects the result.
  unsigned threads = 0;
};

/// max(1, floor(kappa * C)); throws InvalidKappa outside (0, 1].
std::size_t sparsity_budget(double kappa, std::size_t columns);

struct EnsembleResult {
  Eigen::VectorXd avg_coefficients;
  Eigen::VectorXd selection_frequency;
  std::size_t draws = 0;
  std::uint64_t seed = 0;
  double sparsity_kappa = 0.0;
  std::size_t tau = 0;
  std::size_t k_max = 0;
};

EnsembleResult ensemble_omp(const Eigen::MatrixXd& d, const Eigen::VectorXd& t,
                            const EnsembleParams& params);

/// One randomized pursuit as run inside ensemble_omp; exposed for testing.
SparseSolution ensemble_draw(const Eigen::MatrixXd& d, const Eigen::VectorXd& t,
                             std::size_t k_max, const EnsembleParams& params, std::size_t draw);

struct BeliefVector {
  std::vector<std::string> labels;
  Eigen::VectorXd errors;
  Eigen::VectorXd beliefs;
  double gamma = 1.0;
};

/// e_i = ||t - d_i a_i||^2 and belief_i = exp(-gamma e_i) for every column of
/// `d`, with a_i the ensemble-averaged coefficient. `constant_labels` are
/// appended with belief 0 and error ||t||^2.
BeliefVector beliefs(const Eigen::MatrixXd& d, const std::vector<std::string>& labels,
                     const Eigen::VectorXd& t, const EnsembleResult& ens, double gamma,
                     const std::vector<std::string>& constant_labels = {});

/// Resource group -> member event names.
using GroupMembers = std::vector<std::pair<std::string, std::vector<std::string>>>;

struct RsmReport {
  std::map<std::string, double> per_resource;
  /// Mean belief over workloads.
  std::map<std::string, double> per_event;
  /// Present when more than one workload subset was analyzed.
  std::map<std::string, std::map<std::string, double>> workload_breakdown;
  bool normalized = false;
};

/// Noisy-OR of member beliefs per workload, averaged over workloads.
/// `per_workload` holds one BeliefVector per workload subset; `workload_labels`
/// names them (may be empty when there is a single subset).
RsmReport resource_rsm(std::span<const BeliefVector> per_workload, const GroupMembers& partition,
                       const std::vector<std::string>& workload_labels = {});

/// Divides per_resource values by their sum. Throws AllZeroRsm.
RsmReport normalize_rsm(const RsmReport& report);

}  // namespace gpursm
