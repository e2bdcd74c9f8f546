#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "locus/report.hpp"
#include "test_helpers.hpp"

namespace locus::io {
namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("locus-io-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "-" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

TEST(LoadMatrix, BundledFixture) {
  const auto m = testing::med10();
  EXPECT_EQ(m.alternative_count(), 10u);
  EXPECT_EQ(m.criterion_count(), 10u);
  EXPECT_EQ(m.value(m.alternative_index("Algeria"), m.criterion_index("C_Infra1")), 1086.3);
  EXPECT_EQ(m.alternatives().front().id, "Algeria");
  EXPECT_EQ(m.alternatives().back().id, "Turkey");
}

TEST(LoadMatrix, FixtureConfigDirections) {
  const auto m = testing::med10();
  for (const char* id : {"C_Econ1", "C_Soc1", "C_Admi1", "C_Admi2"})
    EXPECT_EQ(m.criteria()[m.criterion_index(id)].direction, Direction::Minimize) << id;
  for (const char* id : {"C_Infra1", "C_Infra2", "C_Econ2", "C_Econ3", "C_Soc2", "C_Poli"})
    EXPECT_EQ(m.criteria()[m.criterion_index(id)].direction, Direction::Maximize) << id;
}

TEST(LoadMatrix, HeaderOnlyHasNoAlternatives) {
  const auto cfg = testing::med10_config();
  try {
    parse_matrix("country,C_Infra1,C_Infra2,C_Econ1,C_Econ2,C_Econ3,C_Soc1,C_Soc2,C_Admi1,C_Admi2,C_Poli\n", "m.csv",
                 cfg);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_TRUE(contains(e.what(), "no alternatives")) << e.what();
  }
}

TEST(LoadMatrix, NonNumericCellNamesRowAndColumn) {
  const auto cfg = parse_criteria_config(R"({"criteria":[{"id":"x","direction":"max"},{"id":"y","direction":"min"}]})",
                                         "c.json");
  try {
    parse_matrix("name,x,y\nfirst,1,2\nsecond,abc,3\n", "m.csv", cfg);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_TRUE(contains(msg, "m.csv:3")) << msg;
    EXPECT_TRUE(contains(msg, "second")) << msg;
    EXPECT_TRUE(contains(msg, "'x'")) << msg;
    EXPECT_TRUE(contains(msg, "abc")) << msg;
  }
}

TEST(LoadMatrix, MissingColumnAndDuplicateRow) {
  const auto cfg = parse_criteria_config(R"([{"id":"x","direction":"max"},{"id":"y","direction":"max"}])", "c.json");
  EXPECT_THROW(parse_matrix("name,x\na,1\n", "m.csv", cfg), ParseError);
  EXPECT_THROW(parse_matrix("name,x,y\na,1,2\na,3,4\n", "m.csv", cfg), ParseError);
}

TEST(LoadMatrix, ColumnsAreMatchedByName) {
  const auto cfg = parse_criteria_config(R"([{"id":"x","direction":"max"},{"id":"y","direction":"max"}])", "c.json");
  const auto a = parse_matrix("name,x,y\na,1,2\nb,3,4\n", "m.csv", cfg);
  const auto b = parse_matrix("name,y,x\na,2,1\nb,4,3\n", "m.csv", cfg);
  EXPECT_EQ(a, b);
}

TEST(LoadMatrix, QuotedFields) {
  const auto cfg = parse_criteria_config(R"([{"id":"x","direction":"max"}])", "c.json");
  const auto m = parse_matrix("name,x\n\"Saint, \"\"Vincent\"\"\",1.5\nb,2\n", "m.csv", cfg);
  EXPECT_EQ(m.alternatives()[0].id, "Saint, \"Vincent\"");
}

TEST(CriteriaConfig, Rejections) {
  EXPECT_THROW(parse_criteria_config("{", "c.json"), ParseError);
  EXPECT_THROW(parse_criteria_config(R"([{"id":"x","direction":"up"}])", "c.json"), ParseError);
  EXPECT_THROW(parse_criteria_config(R"([{"id":"x","direction":"max"},{"id":"x","direction":"min"}])", "c.json"),
               ParseError);
  EXPECT_THROW(parse_criteria_config(R"([{"id":"x","direction":"max","preference":{"kind":"v_shape"}}])", "c.json"),
               ParseError);
}

TEST(CriteriaConfig, DefaultsAndConditions) {
  const auto cfg = testing::med10_config();
  ASSERT_EQ(cfg.criteria.size(), 10u);
  for (const auto& c : cfg.criteria) EXPECT_EQ(c.weight, 1.0);
  ASSERT_NE(cfg.conditions.find("C_Poli"), nullptr);
  EXPECT_EQ(*cfg.conditions.find("C_Poli"), screening::Condition::interval(-2.5, 2.5));
  EXPECT_EQ(*cfg.conditions.find("C_Econ1"), screening::Condition::at_least(4));
  EXPECT_EQ(cfg.conditions.find("C_Infra1"), nullptr);
}

TEST(LoadPiMatrix, BundledFixture) {
  const auto pi = load_pi_matrix(testing::data_path("med10_pi.csv"));
  ASSERT_EQ(pi.size(), 10u);
  EXPECT_EQ(pi.ids()[0], "Algeria");
  EXPECT_EQ(pi.at(0, 3), 0.7);  // Algeria over France
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(pi.at(i, i), 0.0);
}

TEST(LoadPiMatrix, RangeAndShapeErrors) {
  EXPECT_THROW(parse_pi_matrix("Pi,a,b\na,-,1.3\nb,0.2,-\n", "p.csv"), ParseError);
  EXPECT_THROW(parse_pi_matrix("Pi,a,b\na,-,0.3\n", "p.csv"), ParseError);
  EXPECT_THROW(parse_pi_matrix("Pi,a,b\na,-,0.3\n,0.2,-\n", "p.csv"), ParseError);
  EXPECT_THROW(parse_pi_matrix("Pi,a,b\na,-,0.3\nc,0.2,-\n", "p.csv"), ParseError);
  const auto ok = parse_pi_matrix("Pi,a,b\na,,0.3\nb,0.2,-\n", "p.csv");
  EXPECT_EQ(ok.at(1, 0), 0.2);
}

TEST(LoadFlowTable, PrintedTableLoadsAsIs) {
  const auto t = load_flow_table(testing::data_path("med10_table4.csv"));
  ASSERT_EQ(t.rows.size(), 10u);
  EXPECT_EQ(t.row("Libya").phi_net, -0.300008);
  EXPECT_FALSE(promethee::check_flow_table(t).empty());
}

promethee::PreferenceIndexMatrix algeria_only() {
  const std::vector<double> out{0.5, 0.6, 0.7, 0.6, 0.5, 0.6, 0.5, 0.5, 0.5};
  const std::vector<double> in{0.5, 0.4, 0.3, 0.4, 0.5, 0.4, 0.5, 0.5, 0.5};
  std::vector<std::string> ids{"Algeria"};
  for (int i = 1; i < 10; ++i) ids.push_back("x" + std::to_string(i));
  std::vector<double> v(100, 0.0);
  for (int i = 1; i < 10; ++i) {
    v[i] = out[i - 1];
    v[i * 10] = in[i - 1];
  }
  return promethee::PreferenceIndexMatrix(ids, v);
}

TEST(WriteReport, FlowTableRowAtPrintedPrecision) {
  const auto text = write_report(promethee::flows(algeria_only()), Format::Table);
  std::istringstream lines(text);
  std::string line, algeria;
  while (std::getline(lines, line))
    if (line.starts_with("Algeria")) algeria = line;
  EXPECT_TRUE(contains(algeria, "0.555556")) << algeria;
  EXPECT_TRUE(contains(algeria, "0.444444")) << algeria;
  EXPECT_TRUE(contains(algeria, "0.111111")) << algeria;
  const auto csv = write_report(promethee::flows(algeria_only()), Format::Csv);
  EXPECT_TRUE(contains(csv, "Algeria,0.555556,0.444444,0.111111\n")) << csv;
}

TEST(WriteReport, EmptyGaHistoryIsHeaderOnly) {
  ga::GAReport r;
  const auto text = write_report(r, Format::Table);
  EXPECT_TRUE(contains(text, "generation  best  mean\n----------------------\n\n")) << text;
}

TEST(WriteReport, NegativeZeroPrintsAsZero) {
  EXPECT_EQ(format_fixed(-0.0), "0.000000");
  EXPECT_EQ(format_fixed(-1e-9), "0.000000");
  EXPECT_EQ(format_fixed(-0.25), "-0.250000");
}

TEST(WriteReport, Deterministic) {
  const auto m = testing::med10();
  const auto t = promethee::flows(m);
  const auto o = promethee::rank_promethee_ii(t);
  for (auto f : {Format::Table, Format::Csv, Format::Json}) {
    EXPECT_EQ(write_report(t, o, f), write_report(t, o, f));
    EXPECT_EQ(write_report(screening::screen(m, testing::med10_config().conditions), f),
              write_report(screening::screen(m, testing::med10_config().conditions), f));
  }
}

TEST(WriteReport, RankingCsvRoundTripsThroughFlowLoader) {
  const auto pi = load_pi_matrix(testing::data_path("med10_pi.csv"));
  const auto t = promethee::flows(pi);
  const auto text = write_report(t, promethee::rank_promethee_ii(t), Format::Csv);
  const auto back = parse_flow_table(text, "report.csv");
  for (const auto& r : back.rows) {
    EXPECT_NEAR(r.phi_plus, t.row(r.id).phi_plus, 5e-7);
    EXPECT_NEAR(r.phi_net, t.row(r.id).phi_net, 5e-7);
  }
}

TEST(RoundTrip, LoadWriteLoadGivesEqualMatrix) {
  TempDir dir;
  const auto cfg = testing::med10_config();
  const auto m = testing::med10();
  const auto path = dir.path / "copy.csv";
  write_file_atomic(path, format_matrix_csv(m));
  EXPECT_EQ(load_matrix(path, cfg), m);
}

TEST(RoundTrip, AtomicWriteLeavesNoTemporary) {
  TempDir dir;
  const auto path = dir.path / "out.txt";
  write_file_atomic(path, "first\n");
  write_file_atomic(path, "second\n");
  EXPECT_EQ(read_file(path), "second\n");
  EXPECT_FALSE(fs::exists(dir.path / "out.txt.tmp"));
}

TEST(RoundTrip, LoadersDoNotModifyFiles) {
  const auto path = testing::data_path("med10.csv");
  const auto before = read_file(path);
  const auto time = fs::last_write_time(path);
  (void)testing::med10();
  EXPECT_EQ(read_file(path), before);
  EXPECT_EQ(fs::last_write_time(path), time);
}

TEST(LoadPortfolio, ParsesAndValidates) {
  const auto p = parse_portfolio(R"({"mu":[0.1,0.2],"cov":[[0.04,0],[0,0.09]],"target_return":0.15})", "p.json");
  EXPECT_EQ(p.size(), 2u);
  EXPECT_EQ(*p.target_return(), 0.15);
  EXPECT_THROW(parse_portfolio(R"({"mu":[0.1,0.2],"cov":[[0.04,1],[0,0.09]]})", "p.json"), ParseError);
  EXPECT_THROW(parse_portfolio(R"({"mu":[0.1]})", "p.json"), ParseError);
}

}  // namespace
}  // namespace locus::io
