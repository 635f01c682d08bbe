#include "clickstat/intensity_distribution.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "clickstat/error.hpp"

namespace clickstat {
namespace {

constexpr double kRenormalizeWindow = 1e-6;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view text, std::string_view context) {
  text = trim(text);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ValidationError(fmt::format("{}: cannot parse '{}' as a number", context, text));
  }
  return value;
}

void require_finite_nonneg(double v, std::string_view what) {
  if (!std::isfinite(v) || v < 0.0) {
    throw ValidationError(fmt::format("{} must be finite and >= 0, got {}", what, v));
  }
}

// CDF of a linear density on [x0, x0 + h] evaluated at offset t.
double segment_mass(double f0, double f1, double h, double t) {
  return f0 * t + (f1 - f0) * t * t / (2.0 * h);
}

}  // namespace

IntensityDistribution IntensityDistribution::delta(double intensity) {
  require_finite_nonneg(intensity, "delta intensity");
  return IntensityDistribution(Delta{intensity});
}

IntensityDistribution IntensityDistribution::uniform(double lower, double upper) {
  require_finite_nonneg(lower, "uniform lower bound");
  require_finite_nonneg(upper, "uniform upper bound");
  if (!(upper > lower)) {
    throw ValidationError(fmt::format("uniform source needs upper > lower, got [{}, {}]", lower, upper));
  }
  return IntensityDistribution(Uniform{lower, upper});
}

IntensityDistribution IntensityDistribution::exponential(double mean) {
  if (!std::isfinite(mean) || !(mean > 0.0)) {
    throw ValidationError(fmt::format("exponential mean must be finite and > 0, got {}", mean));
  }
  return IntensityDistribution(Exponential{mean});
}

IntensityDistribution IntensityDistribution::tabulated(std::vector<std::pair<double, double>> nodes,
                                                       std::string origin) {
  if (nodes.size() < 2) throw ValidationError("tabulated source needs at least two nodes");
  Tabulated tab;
  tab.origin = std::move(origin);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto [x, f] = nodes[i];
    require_finite_nonneg(x, "tabulated intensity");
    require_finite_nonneg(f, "tabulated density");
    if (i > 0 && !(x > nodes[i - 1].first)) {
      throw ValidationError(fmt::format("tabulated intensities must be strictly increasing (node {})", i));
    }
    tab.intensity.push_back(x);
    tab.density.push_back(f);
  }
  tab.cumulative.assign(nodes.size(), 0.0);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double h = tab.intensity[i] - tab.intensity[i - 1];
    tab.cumulative[i] = tab.cumulative[i - 1] + 0.5 * h * (tab.density[i - 1] + tab.density[i]);
  }
  const double total = tab.cumulative.back();
  if (std::abs(total - 1.0) >= kRenormalizeWindow) {
    throw ValidationError(fmt::format("tabulated density integrates to {:.10g}, expected 1", total));
  }
  for (double& f : tab.density) f /= total;
  for (double& c : tab.cumulative) c /= total;
  tab.cumulative.back() = 1.0;
  return IntensityDistribution(std::move(tab));
}

IntensityDistribution IntensityDistribution::load_tabulated(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open tabulated source '{}'", path.string()));
  std::vector<std::pair<double, double>> nodes;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    std::string cleaned(view);
    std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
    std::istringstream fields(cleaned);
    std::string a, b, extra;
    if (!(fields >> a >> b) || (fields >> extra)) {
      throw ValidationError(fmt::format("{}:{}: expected two columns", path.string(), line_no));
    }
    const std::string where = fmt::format("{}:{}", path.string(), line_no);
    nodes.emplace_back(parse_number(a, where), parse_number(b, where));
  }
  if (in.bad()) throw IoError(fmt::format("error reading '{}'", path.string()));
  return tabulated(std::move(nodes), path.string());
}

IntensityDistribution IntensityDistribution::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw ValidationError(fmt::format("source '{}' must look like kind:params", spec));
  }
  const std::string_view kind = trim(spec.substr(0, colon));
  const std::string_view args = spec.substr(colon + 1);
  const std::string context = fmt::format("source '{}'", spec);
  if (kind == "delta") return delta(parse_number(args, context));
  if (kind == "exp") return exponential(parse_number(args, context));
  if (kind == "uniform") {
    const auto comma = args.find(',');
    if (comma == std::string_view::npos) throw ValidationError(context + ": expected uniform:<a>,<b>");
    return uniform(parse_number(args.substr(0, comma), context),
                   parse_number(args.substr(comma + 1), context));
  }
  if (kind == "file") return load_tabulated(std::filesystem::path(std::string(trim(args))));
  throw ValidationError(fmt::format("unknown source kind '{}' (delta, uniform, exp, file)", kind));
}

std::string IntensityDistribution::id() const {
  return std::visit(
      [](const auto& k) -> std::string {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Delta>) {
          return fmt::format("delta:{}", k.intensity);
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return fmt::format("uniform:{},{}", k.lower, k.upper);
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return fmt::format("exp:{}", k.mean);
        } else {
          return fmt::format("file:{}", k.origin);
        }
      },
      kind_);
}

double IntensityDistribution::mean() const {
  return std::visit(
      [](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Delta>) {
          return k.intensity;
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return 0.5 * (k.lower + k.upper);
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return k.mean;
        } else {
          // Exact first moment of each linear segment.
          double m = 0.0;
          for (std::size_t i = 1; i < k.intensity.size(); ++i) {
            const double x0 = k.intensity[i - 1];
            const double h = k.intensity[i] - x0;
            const double f0 = k.density[i - 1];
            const double f1 = k.density[i];
            m += h * (f0 * (x0 + h / 3.0) + f1 * (x0 + 2.0 * h / 3.0)) / 2.0;
          }
          return m;
        }
      },
      kind_);
}

double IntensityDistribution::cdf(double x) const {
  return std::visit(
      [x](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Delta>) {
          return x >= k.intensity ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return std::clamp((x - k.lower) / (k.upper - k.lower), 0.0, 1.0);
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return x <= 0.0 ? 0.0 : -std::expm1(-x / k.mean);
        } else {
          if (x <= k.intensity.front()) return 0.0;
          if (x >= k.intensity.back()) return 1.0;
          const auto it = std::upper_bound(k.intensity.begin(), k.intensity.end(), x);
          const auto i = static_cast<std::size_t>(it - k.intensity.begin()) - 1;
          const double h = k.intensity[i + 1] - k.intensity[i];
          return k.cumulative[i] + segment_mass(k.density[i], k.density[i + 1], h, x - k.intensity[i]);
        }
      },
      kind_);
}

double IntensityDistribution::quantile(double u) const {
  return std::visit(
      [u](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Delta>) {
          return k.intensity;
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return k.lower + (k.upper - k.lower) * u;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return -k.mean * std::log1p(-u);
        } else {
          const auto it = std::upper_bound(k.cumulative.begin(), k.cumulative.end(), u);
          if (it == k.cumulative.end()) return k.intensity.back();
          const auto i = static_cast<std::size_t>(it - k.cumulative.begin()) - 1;
          const double x0 = k.intensity[i];
          const double h = k.intensity[i + 1] - x0;
          const double f0 = k.density[i];
          const double slope = (k.density[i + 1] - f0) / h;
          const double need = u - k.cumulative[i];
          // Root of f0 t + slope t^2 / 2 = need, in the cancellation-free form.
          const double disc = std::max(0.0, f0 * f0 + 2.0 * slope * need);
          const double denom = f0 + std::sqrt(disc);
          const double t = denom > 0.0 ? 2.0 * need / denom : 0.0;
          return x0 + std::clamp(t, 0.0, h);
        }
      },
      kind_);
}

double IntensityDistribution::support_upper() const {
  return std::visit(
      [](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Delta>) {
          return k.intensity;
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return k.upper;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return std::numeric_limits<double>::infinity();
        } else {
          return k.intensity.back();
        }
      },
      kind_);
}

}  // namespace clickstat
