#include "clickstat/sweep.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include <fmt/format.h>

#include "clickstat/classical_model.hpp"
#include "clickstat/error.hpp"
#include "clickstat/montecarlo.hpp"
#include "clickstat/quantum_model.hpp"

namespace clickstat::sweep {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

template <class T>
T parse_value(std::string_view text, const char* what) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ValidationError(fmt::format("cannot parse '{}' as {}", text, what));
  }
  return value;
}

template <class F>
void for_each_item(std::string_view text, F&& visit) {
  while (true) {
    const auto comma = text.find(',');
    visit(trim(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
}

void require_depths(const std::vector<int>& depths) {
  if (depths.empty()) throw ValidationError("depth list is empty; pass e.g. --depths 1..10");
  for (int m : depths) {
    if (m < 1 || m > MultiplexerConfig::kMaxDepth) {
      throw ValidationError(fmt::format("depth {} outside [1, {}]", m, MultiplexerConfig::kMaxDepth));
    }
  }
}

void require_betas(const std::vector<double>& betas) {
  if (betas.empty()) throw ValidationError("no ionization factor given; pass e.g. --beta 0.5");
  for (double b : betas) {
    if (!(b >= 0.0 && b < 1.0)) throw ValidationError(fmt::format("ionization factor {} outside [0, 1)", b));
  }
}

void require_intensities(const std::vector<double>& intensities) {
  for (double i : intensities) {
    if (!(i >= 0.0) || !std::isfinite(i)) {
      throw ValidationError(fmt::format("intensity {} must be finite and >= 0 (units of I_th)", i));
    }
  }
}

}  // namespace

std::vector<int> parse_depths(std::string_view text) {
  std::vector<int> depths;
  for_each_item(text, [&](std::string_view item) {
    if (const auto dots = item.find(".."); dots != std::string_view::npos) {
      const int lo = parse_value<int>(item.substr(0, dots), "a depth");
      const int hi = parse_value<int>(item.substr(dots + 2), "a depth");
      if (hi < lo) throw ValidationError(fmt::format("empty depth range '{}'", item));
      for (int m = lo; m <= hi; ++m) depths.push_back(m);
    } else {
      depths.push_back(parse_value<int>(item, "a depth"));
    }
  });
  require_depths(depths);
  return depths;
}

std::vector<double> parse_numbers(std::string_view text) {
  std::vector<double> values;
  for_each_item(text, [&](std::string_view item) { values.push_back(parse_value<double>(item, "a number")); });
  return values;
}

Table run_quantum_sweep(const QuantumSweepSpec& spec) {
  if (spec.alphas.empty()) throw ValidationError("no amplitudes given; pass e.g. --alphas 1,1.5,2");
  require_depths(spec.depths);
  Table table;
  table.columns = {"alpha", "m", "N", "C", "Q_B", "CP", "Q_B_inf", "CP_inf"};
  for (double a : spec.alphas) {
    const CoherentAmplitude alpha(a);
    const QuantumAsymptotics limit = asymptotics(alpha);
    for (int m : spec.depths) {
      const MultiplexerConfig config(m);
      double odds = kInf;
      try {
        odds = branch_odds(alpha, config);
      } catch (const Overflow& e) {
        table.notes.push_back(fmt::format("alpha={} m={}: {}", a, m, e.what()));
      }
      table.rows.push_back({a, std::int64_t{m}, config.degree(), odds, qb_closed_form(alpha, config),
                            cp_closed_form(alpha, config), limit.qb_inf, limit.cp_inf});
    }
  }
  return table;
}

Table run_classical_sweep(const ClassicalSweepSpec& spec) {
  require_depths(spec.depths);
  require_betas(spec.betas);
  require_intensities(spec.intensities);
  if (spec.intensities.empty() && !spec.source) {
    throw ValidationError("no classical input given; pass --intensities or --source");
  }
  if (!spec.intensities.empty() && spec.source) {
    throw ValidationError("pass either --intensities or --source, not both");
  }
  Table table;
  const bool fixed = !spec.intensities.empty();
  table.columns = {fixed ? "I_over_Ith" : "source", "beta", "m", "N", "p_click", "C", "Q_B", "CP"};
  const auto emit = [&](Cell label, const IntensityDistribution& src, double beta, int m) {
    const DetectorModel det(beta);
    const MultiplexerConfig config(m);
    double p = 0.0;
    double odds = kNaN;
    double qb = kNaN;
    double cp = kNaN;
    try {
      if (const auto* d = std::get_if<IntensityDistribution::Delta>(&src.kind())) {
        p = click_probability(det, d->intensity / static_cast<double>(config.degree()));
        qb = classical_qb(det, d->intensity, config);
        cp = classical_cp(det, src, config);
        try {
          odds = branch_odds_classical(det, d->intensity, config);
        } catch (const OddsDiverged& e) {
          odds = kInf;
          table.notes.push_back(fmt::format("{} beta={} m={}: {}", src.id(), beta, m, e.what()));
        }
      } else {
        p = averaged_click_probability(det, src, config);
        const double off = 1.0 - p;
        const auto b = static_cast<double>(config.branch_size());
        odds = off > 0.0 ? b * p / off : kInf;
        const BranchShare share = BranchShare::from_detector(config.branch_size(), p, off);
        qb = product_form::sub_binomiality(share, config);
        cp = classical_cp(det, src, config);
      }
    } catch (const QuadratureFailure& e) {
      p = kNaN;
      table.notes.push_back(fmt::format("{} beta={} m={}: {}", src.id(), beta, m, e.what()));
    }
    table.rows.push_back({std::move(label), beta, std::int64_t{m}, config.degree(), p, odds, qb, cp});
  };
  for (double beta : spec.betas) {
    if (fixed) {
      for (double intensity : spec.intensities) {
        const auto src = IntensityDistribution::delta(intensity);
        for (int m : spec.depths) emit(intensity, src, beta, m);
      }
    } else {
      for (int m : spec.depths) emit(spec.source->id(), *spec.source, beta, m);
    }
  }
  return table;
}

Table run_montecarlo(const MonteCarloSweepSpec& spec) {
  require_depths(spec.depths);
  require_intensities(spec.intensities);
  if (spec.trials < 1) throw ValidationError(fmt::format("--trials must be >= 1, got {}", spec.trials));
  const bool classical = !spec.intensities.empty() || spec.source.has_value();
  if (spec.alphas.empty() && !classical) {
    throw ValidationError("no model given; pass --alphas and/or --intensities / --source");
  }
  if (classical) require_betas(spec.betas);

  Table table;
  table.columns = {"model",  "alpha",  "source", "beta",  "m",         "N",         "accepted",
                   "qb_est", "qb_se",  "cp_est", "cp_se", "qb_closed", "cp_closed", "sigma_distance"};
  const auto run_cell = [&](const mc::ModelSpec& model, const std::string& label, Cell alpha, Cell source,
                            Cell beta, int m) {
    const MultiplexerConfig config(m);
    const mc::TrialConfig trial{model, config, spec.trials, spec.seed};
    const std::string where = fmt::format("{} m={}", label, m);
    double qb_closed = kNaN;
    double cp_closed = kNaN;
    std::optional<mc::ClosedForm> closed;
    try {
      closed = mc::closed_form(model, config);
      qb_closed = closed->qb;
      cp_closed = closed->cp;
    } catch (const NumericalError& e) {
      table.notes.push_back(fmt::format("{}: closed form unavailable: {}", where, e.what()));
    }
    std::int64_t accepted = 0;
    double qb_est = kNaN, qb_se = kNaN, cp_est = kNaN, cp_se = kNaN, distance = kNaN;
    try {
      const mc::EstimateReport report = mc::estimate(trial, spec.threads);
      accepted = report.accepted_trials;
      cp_est = report.cp_estimate.value;
      cp_se = report.cp_estimate.std_error;
      if (report.qb_estimate) {
        qb_est = report.qb_estimate->value;
        qb_se = report.qb_estimate->std_error;
      }
      if (closed) distance = mc::compare(report, *closed).worst();
    } catch (const ZeroAcceptance& e) {
      table.notes.push_back(fmt::format("{}: {}", where, e.what()));
    }
    const std::string kind = std::holds_alternative<mc::QuantumSource>(model) ? "quantum" : "classical";
    table.rows.push_back({kind, std::move(alpha), std::move(source), std::move(beta), std::int64_t{m},
                          config.degree(), accepted, qb_est, qb_se, cp_est, cp_se, qb_closed, cp_closed,
                          distance});
  };

  for (double a : spec.alphas) {
    for (int m : spec.depths) {
      run_cell(mc::QuantumSource{CoherentAmplitude(a)}, fmt::format("alpha={}", a), a, std::string{}, std::string{},
               m);
    }
  }
  std::vector<IntensityDistribution> sources;
  for (double i : spec.intensities) sources.push_back(IntensityDistribution::delta(i));
  if (spec.source) sources.push_back(*spec.source);
  for (const auto& src : sources) {
    for (double beta : spec.betas) {
      for (int m : spec.depths) {
        run_cell(mc::ClassicalSource{DetectorModel(beta), src}, fmt::format("{} beta={}", src.id(), beta),
                 std::string{}, src.id(), beta, m);
      }
    }
  }
  return table;
}

Table run_appendix_a(const AppendixSpec& spec) {
  require_depths(spec.depths);
  require_betas({spec.beta});
  if (!spec.source) throw ValidationError("appendix-a needs --source");
  const DetectorModel det(spec.beta);
  Table table;
  table.columns = {"source", "m", "N", "Pr_on", "N_Pr_on", "CP"};
  for (int m : spec.depths) {
    const std::int64_t degree = MultiplexerConfig(m).degree();
    try {
      const AppendixRow row = appendix_a_limit(det, *spec.source, std::span(&degree, 1)).front();
      table.rows.push_back({spec.source->id(), std::int64_t{m}, degree, row.pr_on, row.n_pr_on, row.cp});
    } catch (const QuadratureFailure& e) {
      table.notes.push_back(fmt::format("m={}: {}", m, e.what()));
      table.rows.push_back({spec.source->id(), std::int64_t{m}, degree, kNaN, kNaN, kNaN});
    }
  }
  return table;
}

}  // namespace clickstat::sweep
