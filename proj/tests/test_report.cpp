#include "hspace/commands.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace hspace;

namespace {

std::vector<ReportRow> sample_rows() {
  return {
      {"1-4", 12, 2, "exact", "-", "330", 0.25},
      {"1-4", 12, 2, "bound", "-", "512/3", 1e-7},
      {"1-3-3", 21, 3, "exact", "-", "1046325206", 0.1 + 0.2},
      {"1-2-2", 12, 2, "numeric:relu", "tol=1e-04", "147", 3.0},
      {"1-2-2", 12, 2, "symbolic", "combined-dropped", "1033", std::numeric_limits<double>::denorm_min()},
  };
}

std::string without_seconds(const std::vector<ReportRow>& rows) { return to_csv(rows, false); }

}  // namespace

TEST(Report, CsvHeaderAndShape) {
  const auto csv = to_csv(sample_rows());
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "arch,P,V,method,policy,count,seconds");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
  EXPECT_EQ(to_csv({}), "arch,P,V,method,policy,count,seconds\n");
}

TEST(Report, CsvRoundTripIsExact) {
  const auto rows = sample_rows();
  EXPECT_EQ(parse_csv(to_csv(rows)), rows);
  EXPECT_TRUE(parse_csv(to_csv({})).empty());
}

TEST(Report, JsonRoundTripIsExact) {
  const auto rows = sample_rows();
  EXPECT_EQ(parse_json(to_json(rows)), rows);
  EXPECT_EQ(parse_json(to_json({})).size(), 0u);
}

TEST(Report, RejectsMalformedCsv) {
  EXPECT_THROW(parse_csv("arch,P\n"), std::invalid_argument);
  EXPECT_THROW(parse_csv("arch,P,V,method,policy,count,seconds\n1-4,12,2,exact,-,330\n"), std::invalid_argument);
  EXPECT_THROW(parse_csv("arch,P,V,method,policy,count,seconds\n1-4,x,2,exact,-,330,1\n"), std::invalid_argument);
}

TEST(Report, LargeCountsStayExact) {
  const auto rows = cmd_sweep({"1-3-3"}, {3}, {"exact", "bound"}, {});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].count, burnside_exact(parse_architecture("1-3-3"), 3).str());
  EXPECT_EQ(rows[1].count, to_string(theorem1_bound(parse_architecture("1-3-3"), 3)));
  EXPECT_EQ(parse_csv(to_csv(rows)), rows);
}

TEST(Report, DeterministicApartFromSeconds) {
  RunConfig cfg;
  const auto a = cmd_sweep({"1-2", "1-2-2"}, {2, 3}, {"exact", "bound"}, cfg);
  const auto b = cmd_sweep({"1-2", "1-2-2"}, {2, 3}, {"exact", "bound"}, cfg);
  EXPECT_EQ(without_seconds(a), without_seconds(b));
  cfg.method = "symbolic";
  cfg.arch = "1-3";
  cfg.policy = "all";
  EXPECT_EQ(without_seconds(cmd_count(cfg)), without_seconds(cmd_count(cfg)));
}

TEST(Report, SvgIsWellFormedWithOnePanelPerV) {
  const auto rows = cmd_sweep({"1-2", "1-3", "1-4", "1-2-2", "1-3-2"}, {2, 3}, {"exact", "bound"}, {});
  const auto svg = render_svg(rows);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find(">V=2<"), std::string::npos);
  EXPECT_NE(svg.find(">V=3<"), std::string::npos);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
  // 2 panels x 2 depths x 2 methods
  std::size_t lines = 0;
  for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++lines;
  EXPECT_EQ(lines, 8u);
  // every opened element is self-closed or closed
  EXPECT_EQ(std::count(svg.begin(), svg.end(), '<'), std::count(svg.begin(), svg.end(), '>'));
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  EXPECT_EQ(svg.find("inf"), std::string::npos);
}

TEST(Report, CountAsDouble) {
  EXPECT_EQ(count_as_double("330"), 330.0);
  EXPECT_DOUBLE_EQ(count_as_double("512/3"), 512.0 / 3.0);
}

TEST(Commands, CountRowsPerMethod) {
  RunConfig cfg;
  cfg.arch = "1-4";
  EXPECT_EQ(cmd_count(cfg).front().count, "330");
  cfg.method = "bound";
  EXPECT_EQ(cmd_count(cfg).front().count, "512/3");
  cfg.arch = "1-1";
  EXPECT_EQ(cmd_count(cfg).front().count, "8");
  cfg.method = "symbolic";
  cfg.arch = "1-2";
  cfg.policy = "all";
  const auto sym = cmd_count(cfg);
  ASSERT_EQ(sym.size(), 3u);
  EXPECT_EQ(sym[0].policy, "sorted");
  EXPECT_EQ(sym[0].count, "36");
  cfg.method = "numeric";
  cfg.activation = "all";
  const auto num = cmd_count(cfg);
  ASSERT_EQ(num.size(), 6u);
  EXPECT_EQ(num[0].method, "numeric:relu");
  EXPECT_EQ(num[0].policy, "tol=1e-04");
  EXPECT_EQ(num[1].policy, "tol=0");
  for (const auto& r : num) EXPECT_EQ(r.params, 6u);
  cfg.method = "nonsense";
  EXPECT_THROW(cmd_count(cfg), std::invalid_argument);
}

TEST(Commands, SweepRowsAndGuard) {
  EXPECT_EQ(cmd_sweep({"1-2"}, {2}, {"exact"}, {}).front().count, "36");
  EXPECT_TRUE(cmd_sweep({}, {2, 3}, {"exact"}, {}).empty());
  RunConfig cfg;
  cfg.max_states = 1000;
  std::vector<ReportRow> flushed;
  EXPECT_THROW(cmd_sweep({"1-2", "1-4"}, {2}, {"exact", "symbolic"}, cfg, [&](const ReportRow& r) { flushed.push_back(r); }),
               GuardExceeded);
  // 1-2 exact, 1-2 symbolic and 1-4 exact completed before the guard tripped
  EXPECT_EQ(flushed.size(), 3u);
  EXPECT_THROW(cmd_sweep({"1-2"}, {2}, {"magic"}, {}), std::invalid_argument);
}

TEST(Commands, OutputFiles) {
  const auto dir = ::testing::TempDir();
  RunConfig cfg;
  cfg.arch = "1-2";
  cfg.method = "symbolic";
  cfg.forms_path = dir + "forms.txt";
  cmd_count(cfg);
  std::ifstream forms(cfg.forms_path);
  std::size_t lines = 0;
  for (std::string line; std::getline(forms, line);) ++lines;
  EXPECT_EQ(lines, 36u);

  cfg.method = "numeric";
  cfg.leaders_path = dir + "leaders.csv";
  cfg.grid_size = 11;
  const auto rows = cmd_count(cfg);
  std::ifstream leaders(cfg.leaders_path);
  std::string header;
  std::getline(leaders, header);
  EXPECT_EQ(header.rfind("p0,p1,", 0), 0u);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), 6 + 10);
  lines = 0;
  for (std::string line; std::getline(leaders, line);) ++lines;
  EXPECT_EQ(std::to_string(lines), rows.front().count);
}

TEST(Commands, TaggedPaths) {
  EXPECT_EQ(detail::tagged_path("out/f.txt", "relu", true), "out/f.relu.txt");
  EXPECT_EQ(detail::tagged_path("out.d/f", "relu", true), "out.d/f.relu");
  EXPECT_EQ(detail::tagged_path("f.txt", "relu", false), "f.txt");
}

TEST(Commands, OracleReports) {
  RunConfig cfg;
  cfg.arch = "1-2-2";
  const auto ok = cmd_oracle(cfg);
  EXPECT_TRUE(ok.passed());
  EXPECT_EQ(ok.burnside_count, "1168");
  EXPECT_EQ(ok.orbit_count, "1168");
  cfg.arch = "1-2";
  cfg.values = "-1,0,1";
  const auto ok3 = cmd_oracle(cfg);
  EXPECT_TRUE(ok3.passed());
  EXPECT_EQ(ok3.burnside_count, "378");
  EXPECT_EQ(ok3.orbit_count, "378");
  cfg.arch = "1-2-2";
  cfg.values = "-1,1";
  const auto bad = cmd_oracle(cfg, true);
  EXPECT_FALSE(bad.passed());
  EXPECT_NE(format_oracle(cfg, bad).find("FAIL"), std::string::npos);
}
