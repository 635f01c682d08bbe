// clickstat: parameter sweeps over multiplexed on/off-detector statistics.
//
//   clickstat quantum-sweep   --alphas 1,1.5,2 --depths 1..10
//   clickstat classical-sweep --intensities 25,50,100 --beta 0.5 --depths 1..10
//   clickstat montecarlo      --alphas 1 --depths 4 --trials 100000 --seed 7
//   clickstat appendix-a      --source exp:50 --beta 0.5 --depths 1..14
//
// Output goes to --out, else $CLICKSTAT_OUTPUT_DIR/<subcommand>.<format>,
// else stdout.  Exit codes: 0 ok, 1 validation, 2 numerical, 3 I/O.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "clickstat/error.hpp"
#include "clickstat/sweep.hpp"
#include "clickstat/table_io.hpp"
#include "json.hpp"

namespace {

using namespace clickstat;

enum ExitCode { kOk = 0, kValidation = 1, kNumerical = 2, kIo = 3 };

struct Options {
  std::string alphas;
  std::string intensities;
  std::string beta;
  std::string depths;
  std::string source;
  std::int64_t trials = 100000;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out;
  std::string format = "csv";
  std::string config;
};

std::string json_as_list(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  if (v.is_array()) {
    std::string joined;
    for (const auto& item : v) {
      if (!joined.empty()) joined += ',';
      joined += item.is_string() ? item.get<std::string>() : item.dump();
    }
    return joined;
  }
  throw ValidationError("config values must be strings, numbers or arrays");
}

// Values from the JSON config fill every option the command line left unset.
void apply_config_file(Options& opt, const CLI::App& cmd) {
  if (opt.config.empty()) return;
  std::ifstream in(opt.config);
  if (!in) throw IoError("cannot open config file '" + opt.config + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config file: ") + e.what());
  }
  const auto unset = [&](const char* flag) {
    const CLI::Option* o = cmd.get_option_no_throw(std::string("--") + flag);
    return o == nullptr || o->count() == 0;
  };
  const auto text = [&](const char* key, std::string& dst) {
    if (doc.contains(key) && unset(key)) dst = json_as_list(doc[key]);
  };
  text("alphas", opt.alphas);
  text("intensities", opt.intensities);
  text("beta", opt.beta);
  text("depths", opt.depths);
  text("source", opt.source);
  text("out", opt.out);
  text("format", opt.format);
  if (doc.contains("trials") && unset("trials")) opt.trials = doc["trials"].get<std::int64_t>();
  if (doc.contains("seed") && unset("seed")) opt.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("threads") && unset("threads")) opt.threads = doc["threads"].get<int>();
}

std::vector<double> numbers_or_empty(const std::string& text) {
  return text.empty() ? std::vector<double>{} : sweep::parse_numbers(text);
}

std::optional<IntensityDistribution> source_or_empty(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return IntensityDistribution::parse(text);
}

Table run(const std::string& name, const Options& opt) {
  const std::vector<int> depths = opt.depths.empty() ? std::vector<int>{} : sweep::parse_depths(opt.depths);
  if (name == "quantum-sweep") {
    return sweep::run_quantum_sweep({numbers_or_empty(opt.alphas), depths});
  }
  if (name == "classical-sweep") {
    return sweep::run_classical_sweep(
        {numbers_or_empty(opt.intensities), source_or_empty(opt.source), numbers_or_empty(opt.beta), depths});
  }
  if (name == "montecarlo") {
    sweep::MonteCarloSweepSpec spec;
    spec.alphas = numbers_or_empty(opt.alphas);
    spec.intensities = numbers_or_empty(opt.intensities);
    spec.source = source_or_empty(opt.source);
    spec.betas = numbers_or_empty(opt.beta);
    spec.depths = depths;
    spec.trials = opt.trials;
    spec.seed = opt.seed;
    spec.threads = opt.threads;
    return sweep::run_montecarlo(spec);
  }
  const std::vector<double> betas = numbers_or_empty(opt.beta);
  if (betas.size() > 1) throw ValidationError("appendix-a takes a single --beta");
  return sweep::run_appendix_a({source_or_empty(opt.source), betas.empty() ? 0.5 : betas.front(), depths});
}

void emit(const Table& table, const std::string& name, const Options& opt) {
  if (opt.format != "csv" && opt.format != "json") {
    throw ValidationError("--format must be csv or json");
  }
  for (const auto& note : table.notes) std::cerr << "clickstat: " << name << ": " << note << '\n';
  std::filesystem::path path = opt.out;
  if (path.empty()) {
    if (const char* dir = std::getenv("CLICKSTAT_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
      path = std::filesystem::path(dir) / (name + "." + opt.format);
    }
  }
  const auto write = [&](std::ostream& os) {
    if (opt.format == "csv") {
      write_csv(table, os);
    } else {
      write_json(table, os);
    }
  };
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream file(path);
  if (!file) throw IoError("cannot open '" + path.string() + "' for writing");
  write(file);
  file.close();
  if (!file) throw IoError("error writing '" + path.string() + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiplexed on/off-detector statistics: closed forms, Monte Carlo and sweeps"};
  app.require_subcommand(1);
  Options opt;

  const auto common = [&](CLI::App* cmd) {
    cmd->add_option("--depths", opt.depths, "Multiplexer depths m, e.g. 1..10 or 1,3,5");
    cmd->add_option("--out", opt.out, "Output file ('-' for stdout)");
    cmd->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--config", opt.config, "JSON file with default values for these flags");
  };

  auto* quantum = app.add_subcommand("quantum-sweep", "Closed-form Q_B and CP for coherent inputs");
  quantum->add_option("--alphas", opt.alphas, "Coherent amplitudes |alpha|, comma separated");
  common(quantum);

  auto* classical = app.add_subcommand("classical-sweep", "Closed-form Q_B and CP for the threshold detector");
  classical->add_option("--intensities", opt.intensities, "Input intensities in units of I_th");
  classical->add_option("--source", opt.source, "delta:<v> | uniform:<a>,<b> | exp:<mu> | file:<path>");
  classical->add_option("--beta", opt.beta, "Ionization factors, comma separated");
  common(classical);

  auto* montecarlo = app.add_subcommand("montecarlo", "Trial simulation checked against the closed forms");
  montecarlo->add_option("--alphas", opt.alphas, "Coherent amplitudes for quantum cells");
  montecarlo->add_option("--intensities", opt.intensities, "Delta-source intensities for classical cells");
  montecarlo->add_option("--source", opt.source, "Source law for classical cells");
  montecarlo->add_option("--beta", opt.beta, "Ionization factors for classical cells");
  montecarlo->add_option("--trials", opt.trials, "Raw trials per cell");
  montecarlo->add_option("--seed", opt.seed, "Reproducibility seed");
  montecarlo->add_option("--threads", opt.threads, "Worker threads (0 = OpenMP default)");
  common(montecarlo);

  auto* appendix = app.add_subcommand("appendix-a", "N Pr(on|N) and CP as the multiplexer grows");
  appendix->add_option("--source", opt.source, "Source law p(I)");
  appendix->add_option("--beta", opt.beta, "Ionization factor (default 0.5)");
  common(appendix);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  CLI::App* chosen = app.get_subcommands().front();
  try {
    apply_config_file(opt, *chosen);
    const Table table = run(chosen->get_name(), opt);
    emit(table, chosen->get_name(), opt);
  } catch (const ValidationError& e) {
    std::cerr << "clickstat: invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const IoError& e) {
    std::cerr << "clickstat: I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const NumericalError& e) {
    std::cerr << "clickstat: numerical error: " << e.what() << '\n';
    return kNumerical;
  }
  return kOk;
}
