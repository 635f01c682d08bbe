#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "clickstat/intensity_distribution.hpp"
#include "clickstat/table_io.hpp"

namespace clickstat::sweep {

/// "1..10", "1,3,5" or a mix such as "1..4,8,10".  Each depth must be >= 1.
std::vector<int> parse_depths(std::string_view text);

/// Comma-separated numbers.
std::vector<double> parse_numbers(std::string_view text);

struct QuantumSweepSpec {
  std::vector<double> alphas;
  std::vector<int> depths;
};

/// Columns: alpha,m,N,C,Q_B,CP,Q_B_inf,CP_inf.  C is inf where the odds
/// overflow; Q_B and CP stay finite there.
Table run_quantum_sweep(const QuantumSweepSpec& spec);

/// Either a list of fixed intensities (delta sources) or one source law.
struct ClassicalSweepSpec {
  std::vector<double> intensities;
  std::optional<IntensityDistribution> source;
  std::vector<double> betas;
  std::vector<int> depths;
};

/// Columns: I_over_Ith (or source),beta,m,N,p_click,C,Q_B,CP.
Table run_classical_sweep(const ClassicalSweepSpec& spec);

struct MonteCarloSweepSpec {
  std::vector<double> alphas;
  std::vector<double> intensities;
  std::optional<IntensityDistribution> source;
  std::vector<double> betas;
  std::vector<int> depths;
  std::int64_t trials = 100000;
  std::uint64_t seed = 1;
  int threads = 0;
};

/// Columns: model,alpha,source,beta,m,N,accepted,qb_est,qb_se,cp_est,cp_se,
/// qb_closed,cp_closed,sigma_distance.  Quantum cells come first, then
/// classical cells in (intensity/source, beta, m) order.
Table run_montecarlo(const MonteCarloSweepSpec& spec);

struct AppendixSpec {
  std::optional<IntensityDistribution> source;
  double beta = 0.5;
  std::vector<int> depths;
};

/// Columns: source,m,N,Pr_on,N_Pr_on,CP.
Table run_appendix_a(const AppendixSpec& spec);

}  // namespace clickstat::sweep
