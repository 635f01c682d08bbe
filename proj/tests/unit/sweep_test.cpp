#include "clickstat/sweep.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "clickstat/classical_model.hpp"
#include "clickstat/error.hpp"
#include "clickstat/quantum_model.hpp"
#include "json.hpp"

namespace clickstat::sweep {
namespace {

const std::string kData = CLICKSTAT_TEST_DATA_DIR;

double num(const Table& t, std::size_t row, const std::string& col) {
  const Cell& c = t.rows[row][t.column(col)];
  if (const auto* d = std::get_if<double>(&c)) return *d;
  return static_cast<double>(std::get<std::int64_t>(c));
}

CsvDocument round_trip(const Table& t) {
  std::stringstream ss;
  write_csv(t, ss);
  return read_csv(ss);
}

TEST(ParseDepths, RangesAndLists) {
  EXPECT_EQ(parse_depths("1..4"), (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(parse_depths("1..3,8, 10"), (std::vector<int>{1, 2, 3, 8, 10}));
  EXPECT_THROW(parse_depths("0..3"), ValidationError);
  EXPECT_THROW(parse_depths("5..3"), ValidationError);
  EXPECT_THROW(parse_depths("a"), ValidationError);
  EXPECT_THROW(parse_depths(""), ValidationError);
  EXPECT_THROW(parse_numbers("1,,2"), ValidationError);
}

TEST(FormatDouble, RoundTripsExactly) {
  for (double v : {0.1, 1.0 / 3.0, -0.22119921692859513, 7.0167359120976317e20, 2.4720043956274959e-141}) {
    EXPECT_EQ(parse_double_field(format_double(v)), v);
  }
  EXPECT_EQ(format_double(INFINITY), "inf");
  EXPECT_EQ(format_double(-INFINITY), "-inf");
  EXPECT_EQ(format_double(NAN), "nan");
  EXPECT_TRUE(std::isinf(parse_double_field("inf")));
  EXPECT_TRUE(std::isnan(parse_double_field("nan")));
  EXPECT_THROW(parse_double_field("1.0x"), ValidationError);
}

TEST(QuantumSweep, ThirtyRowsAndVanishingFirstDepth) {
  const Table t = run_quantum_sweep({{1.0, 1.5, 2.0}, parse_depths("1..10")});
  EXPECT_EQ(t.columns, (std::vector<std::string>{"alpha", "m", "N", "C", "Q_B", "CP", "Q_B_inf", "CP_inf"}));
  ASSERT_EQ(t.rows.size(), 30u);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (num(t, r, "m") == 1) EXPECT_EQ(num(t, r, "Q_B"), 0.0);
    EXPECT_EQ(num(t, r, "N"), std::exp2(num(t, r, "m")));
  }
}

TEST(QuantumSweep, StrongFieldNearMinusOne) {
  const Table t = run_quantum_sweep({{50.0}, parse_depths("1..10")});
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (num(t, r, "m") >= 4) EXPECT_NEAR(num(t, r, "Q_B"), -1.0, 2e-3);
  }
  // exp(2500/2) overflows at m = 1 and 2; C is reported as inf with a note.
  EXPECT_TRUE(std::isinf(num(t, 0, "C")));
  EXPECT_FALSE(t.notes.empty());
}

TEST(QuantumSweep, CsvRoundTripIsBitExact) {
  const std::vector<double> alphas{0.5, 1.0, 1.5, 2.0, 5.0};
  const Table t = run_quantum_sweep({alphas, parse_depths("1..20")});
  const CsvDocument doc = round_trip(t);
  EXPECT_EQ(doc.header, t.columns);
  ASSERT_EQ(doc.rows.size(), t.rows.size());
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    const CoherentAmplitude alpha(parse_double_field(doc.rows[r][0]));
    const MultiplexerConfig config(std::stoi(doc.rows[r][1]));
    EXPECT_EQ(parse_double_field(doc.rows[r][3]), branch_odds(alpha, config));
    EXPECT_EQ(parse_double_field(doc.rows[r][4]), qb_closed_form(alpha, config));
    EXPECT_EQ(parse_double_field(doc.rows[r][5]), cp_closed_form(alpha, config));
    EXPECT_EQ(parse_double_field(doc.rows[r][6]), asymptotics(alpha).qb_inf);
    EXPECT_EQ(parse_double_field(doc.rows[r][7]), asymptotics(alpha).cp_inf);
  }
}

TEST(QuantumSweep, Validation) {
  EXPECT_THROW(run_quantum_sweep({{}, {1, 2}}), ValidationError);
  EXPECT_THROW(run_quantum_sweep({{1.0}, {}}), ValidationError);
  EXPECT_THROW(run_quantum_sweep({{-1.0}, {1}}), ValidationError);
}

TEST(ClassicalSweep, CliffRowsAreExactZero) {
  const Table t = run_classical_sweep({{25.0, 50.0, 100.0}, std::nullopt, {0.5}, parse_depths("1..10")});
  ASSERT_EQ(t.rows.size(), 30u);
  EXPECT_EQ(t.columns.front(), "I_over_Ith");
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double intensity = num(t, r, "I_over_Ith");
    const double n = num(t, r, "N");
    if (n >= intensity) {
      EXPECT_EQ(num(t, r, "CP"), 0.0);
      EXPECT_EQ(num(t, r, "Q_B"), 0.0);
      EXPECT_EQ(num(t, r, "C"), 0.0);
      EXPECT_EQ(num(t, r, "p_click"), 0.0);
    } else {
      EXPECT_GT(num(t, r, "CP"), 0.0);
    }
  }
}

TEST(ClassicalSweep, ClickProbabilityOrderedByBeta) {
  const Table t = run_classical_sweep({{25.0}, std::nullopt, {0.3, 0.4, 0.7}, parse_depths("1..4")});
  ASSERT_EQ(t.rows.size(), 12u);
  for (std::size_t r = 0; r < 4; ++r) {
    EXPECT_LT(num(t, r, "p_click"), num(t, r + 4, "p_click"));
    EXPECT_LT(num(t, r + 4, "p_click"), num(t, r + 8, "p_click"));
  }
}

TEST(ClassicalSweep, RoundTripMatchesLibrary) {
  const Table t = run_classical_sweep({{25.0, 100.0}, std::nullopt, {0.3, 0.7}, parse_depths("1..10")});
  const CsvDocument doc = round_trip(t);
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    const double intensity = parse_double_field(doc.rows[r][0]);
    const DetectorModel det(parse_double_field(doc.rows[r][1]));
    const MultiplexerConfig config(std::stoi(doc.rows[r][2]));
    const double n = static_cast<double>(config.degree());
    EXPECT_EQ(parse_double_field(doc.rows[r][4]), click_probability(det, intensity / n));
    EXPECT_EQ(parse_double_field(doc.rows[r][5]), branch_odds_classical(det, intensity, config));
    EXPECT_EQ(parse_double_field(doc.rows[r][6]), classical_qb(det, intensity, config));
    EXPECT_EQ(parse_double_field(doc.rows[r][7]), classical_cp(det, IntensityDistribution::delta(intensity), config));
  }
}

TEST(ClassicalSweep, DivergedOddsReportedPerRow) {
  const Table t = run_classical_sweep({{1e6}, std::nullopt, {0.5}, {1, 2}});
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_TRUE(std::isinf(num(t, 0, "C")));
  EXPECT_EQ(num(t, 0, "CP"), 1.0);
  EXPECT_FALSE(t.notes.empty());
}

TEST(ClassicalSweep, SourceColumn) {
  const Table t = run_classical_sweep({{}, IntensityDistribution::exponential(50.0), {0.5}, {1, 2, 3}});
  EXPECT_EQ(t.columns.front(), "source");
  EXPECT_EQ(std::get<std::string>(t.rows[0][0]), "exp:50");
  EXPECT_NEAR(num(t, 0, "p_click"), 0.93476929985571361, 1e-12);
}

TEST(ClassicalSweep, Validation) {
  EXPECT_THROW(run_classical_sweep({{-1.0}, std::nullopt, {0.5}, {1}}), ValidationError);
  EXPECT_THROW(run_classical_sweep({{}, std::nullopt, {0.5}, {1}}), ValidationError);
  EXPECT_THROW(run_classical_sweep({{10.0}, std::nullopt, {1.0}, {1}}), ValidationError);
  EXPECT_THROW(run_classical_sweep({{10.0}, std::nullopt, {}, {1}}), ValidationError);
  EXPECT_THROW(
      run_classical_sweep({{10.0}, IntensityDistribution::exponential(5.0), {0.5}, {1}}), ValidationError);
}

TEST(MonteCarloSweep, DeterministicRows) {
  MonteCarloSweepSpec spec;
  spec.alphas = {1.0};
  spec.depths = {4};
  spec.trials = 100000;
  spec.seed = 7;
  spec.threads = 1;
  const Table a = run_montecarlo(spec);
  spec.threads = 8;
  const Table b = run_montecarlo(spec);
  std::stringstream sa, sb;
  write_csv(a, sa);
  write_csv(b, sb);
  EXPECT_EQ(sa.str(), sb.str());
  ASSERT_EQ(a.rows.size(), 1u);
  EXPECT_LT(num(a, 0, "sigma_distance"), 3.0);
  EXPECT_EQ(a.columns.size(), 14u);
}

TEST(MonteCarloSweep, ZeroAcceptanceRecordedPerRow) {
  MonteCarloSweepSpec spec;
  spec.alphas = {50.0};
  spec.depths = {1, 2};
  spec.trials = 1000;
  const Table t = run_montecarlo(spec);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(num(t, 1, "accepted"), 0.0);
  EXPECT_TRUE(std::isnan(num(t, 1, "cp_est")));
  EXPECT_FALSE(t.notes.empty());
}

TEST(MonteCarloSweep, Validation) {
  MonteCarloSweepSpec spec;
  spec.alphas = {1.0};
  spec.depths = {2};
  spec.trials = 0;
  EXPECT_THROW(run_montecarlo(spec), ValidationError);
  spec.trials = 10;
  spec.intensities = {25.0};
  EXPECT_THROW(run_montecarlo(spec), ValidationError);  // no beta for the classical cells
}

TEST(AppendixA, ExponentialDecays) {
  const Table t = run_appendix_a({IntensityDistribution::exponential(50.0), 0.5, parse_depths("1..14")});
  ASSERT_EQ(t.rows.size(), 14u);
  EXPECT_LT(num(t, 13, "N_Pr_on"), 1e-6);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"source", "m", "N", "Pr_on", "N_Pr_on", "CP"}));
}

TEST(AppendixA, DeltaZeroFromN128) {
  const Table t = run_appendix_a({IntensityDistribution::delta(100.0), 0.5, parse_depths("1..12")});
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (num(t, r, "N") >= 128) EXPECT_EQ(num(t, r, "N_Pr_on"), 0.0);
  }
}

TEST(AppendixA, BadTabulatedSourceFailsToLoad) {
  EXPECT_THROW(run_appendix_a({IntensityDistribution::parse("file:" + kData + "/bad_norm.txt"), 0.5, {1}}),
               ValidationError);
  EXPECT_THROW(run_appendix_a({std::nullopt, 0.5, {1}}), ValidationError);
}

TEST(WriteJson, MirrorsCsv) {
  const Table t = run_quantum_sweep({{50.0}, {1, 4}});
  std::stringstream ss;
  write_json(t, ss);
  const auto doc = nlohmann::json::parse(ss.str());
  EXPECT_EQ(doc["columns"].size(), 8u);
  ASSERT_EQ(doc["rows"].size(), 2u);
  EXPECT_TRUE(doc["rows"][0]["C"].is_null());
  EXPECT_EQ(doc["rows"][1]["Q_B"].get<double>(), num(t, 1, "Q_B"));
}

TEST(WriteCsv, QuotesSeparators) {
  Table t;
  t.columns = {"source", "x"};
  t.rows = {{std::string("uniform:0,200"), 1.5}, {std::string("a\"b"), std::int64_t{3}}};
  const CsvDocument doc = round_trip(t);
  ASSERT_EQ(doc.rows.size(), 2u);
  EXPECT_EQ(doc.rows[0][0], "uniform:0,200");
  EXPECT_EQ(doc.rows[1][0], "a\"b");
  EXPECT_EQ(doc.rows[1][1], "3");
}

}  // namespace
}  // namespace clickstat::sweep
