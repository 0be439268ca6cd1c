#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bimult/cli.hpp"
#include "bimult/records.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = bimult::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("bimult_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<fs::path> with_extension(const fs::path& dir, const std::string& ext) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ext) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Cli, DecomposeSingleEntry) {
  const auto dir = fresh_dir("decompose");
  std::ofstream(dir / "matrix.json") << "[[0, 0, 1, 0]]";
  const auto r = run({"decompose", "--in", (dir / "matrix.json").string(), "--out", (dir / "part.json").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto part = nlohmann::json::parse(slurp(dir / "part.json"));
  EXPECT_EQ(part.at("partition"), nlohmann::json::parse(R"([[0, 0, "S1"]])"));
  EXPECT_EQ(part.at("tool_version"), bimult::kToolVersion);
  EXPECT_EQ(part.at("config_hash").get<std::string>().size(), 16u);
  EXPECT_EQ(run({"decompose", "--in", (dir / "matrix.json").string(), "--out", (dir / "part.json").string()}).code, 1);
}

TEST(Cli, CountingCsv) {
  const auto dir = fresh_dir("counting");
  const auto r = run({"experiment", "counting", "--M", "2,3,32", "--out-dir", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto csvs = with_extension(dir, ".csv");
  ASSERT_EQ(csvs.size(), 1u);
  std::istringstream csv(slurp(csvs[0]));
  std::string header, line;
  std::getline(csv, header);
  std::vector<std::string> rows;
  while (std::getline(csv, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].rfind("2,true,6,true,", 0), 0u);
  EXPECT_EQ(rows[1].rfind("3,true,19,true,", 0), 0u);
  EXPECT_EQ(rows[2].rfind("32,true,21856,true,", 0), 0u);
  EXPECT_NE(header.find("config_hash"), std::string::npos);
  EXPECT_NE(rows[0].find(bimult::kToolVersion), std::string::npos);
}

TEST(Cli, GrowthBDeterministic) {
  const auto a = fresh_dir("growth_a"), b = fresh_dir("growth_b");
  const std::vector<std::string> base{"experiment", "growth-B", "--mode", "desk", "--N", "1,2,3", "--seed", "7",
                                      "--pool", "32"};
  auto args = base;
  args.insert(args.end(), {"--out-dir", a.string(), "--threads", "1"});
  EXPECT_EQ(run(args).code, 0);
  args = base;
  args.insert(args.end(), {"--out-dir", b.string(), "--threads", "4"});
  EXPECT_EQ(run(args).code, 0);
  const auto fa = with_extension(a, ".jsonl"), fb = with_extension(b, ".jsonl");
  ASSERT_EQ(fa.size(), 1u);
  ASSERT_EQ(fb.size(), 1u);
  EXPECT_EQ(fa[0].filename(), fb[0].filename());
  EXPECT_EQ(slurp(fa[0]), slurp(fb[0]));
  EXPECT_EQ(fa[0].filename().string().rfind("growth-B-", 0), 0u);
  EXPECT_EQ(fa[0].filename().string().substr(fa[0].filename().string().size() - 8), "-7.jsonl");

  const auto rec = bimult::read_jsonl(fa[0]).at(0);
  const auto& t = rec.trials;
  EXPECT_LT(t[0].at("measured").get<double>(), t[1].at("measured").get<double>());
  EXPECT_LT(t[1].at("measured").get<double>(), t[2].at("measured").get<double>());

  // One growth-B record: N-vs-ratio plot data.
  const auto rep = fresh_dir("growth_report");
  EXPECT_EQ(run({"report", fa[0].string(), "--out-dir", rep.string()}).code, 0);
  const auto dats = with_extension(rep, ".dat");
  ASSERT_EQ(dats.size(), 1u);
  std::istringstream dat(slurp(dats[0]));
  std::string line;
  std::vector<std::pair<double, double>> pts;
  while (std::getline(dat, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double x, y;
    ls >> x >> y;
    EXPECT_TRUE(ls.eof() || (ls >> std::ws).eof());
    pts.emplace_back(x, y);
  }
  ASSERT_EQ(pts.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(pts[static_cast<std::size_t>(i)].first, i + 1);
    EXPECT_EQ(pts[static_cast<std::size_t>(i)].second, t[static_cast<std::size_t>(i)].at("measured").get<double>());
  }
}

TEST(Cli, ReportEmptyGlob) {
  const auto dir = fresh_dir("empty");
  const auto r = run({"report", (dir / "nothing-*.jsonl").string(), "--out-dir", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir / "summary.csv"),
            "experiment,config_hash,tool_version,records,seeds,max_measured,median_measured,all_pass\n");
}

TEST(Cli, ReportAggregatesSeeds) {
  const auto dir = fresh_dir("aggregate");
  std::vector<double> measured;
  for (const char* seed : {"1", "2", "3", "4"}) {
    ASSERT_EQ(run({"experiment", "decomposition", "--trials", "12", "--seed", seed, "--out-dir", dir.string()}).code,
              0);
  }
  for (const auto& f : with_extension(dir, ".jsonl"))
    measured.push_back(bimult::read_jsonl(f).at(0).summary.at("measured").get<double>());
  std::sort(measured.begin(), measured.end());
  const double median = 0.5 * (measured[1] + measured[2]);
  EXPECT_EQ(run({"report", (dir / "*.jsonl").string(), "--out-dir", dir.string()}).code, 0);
  std::istringstream csv(slurp(dir / "summary.csv"));
  std::string header, row, extra;
  std::getline(csv, header);
  std::getline(csv, row);
  EXPECT_FALSE(std::getline(csv, extra));
  std::vector<std::string> cols;
  std::istringstream rs(row);
  for (std::string c; std::getline(rs, c, ',');) cols.push_back(c);
  ASSERT_EQ(cols.size(), 8u);
  EXPECT_EQ(cols[0], "decomposition");
  EXPECT_EQ(cols[3], "4");
  EXPECT_EQ(cols[4], "1;2;3;4");
  EXPECT_EQ(std::stod(cols[5]), measured.back());
  EXPECT_EQ(std::stod(cols[6]), median);
  EXPECT_EQ(cols[7], "true");
}

TEST(Cli, ExitCodes) {
  const auto dir = fresh_dir("codes");
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"experiment", "nope"}).code, 1);
  EXPECT_EQ(run({"experiment", "growth-B", "--out-dir", dir.string()}).code, 1);  // no seed
  EXPECT_EQ(run({"experiment", "counting", "--pool", "3", "--out-dir", dir.string()}).code, 1);
  std::ofstream(dir / "bad.json") << "{not json";
  EXPECT_EQ(run({"experiment", "counting", "--config", (dir / "bad.json").string(), "--out-dir", dir.string()}).code,
            1);
  std::ofstream(dir / "strict.json") << R"({"factor": 1e-6, "trials": 2})";
  const auto r = run({"experiment", "corpus", "--config", (dir / "strict.json").string(), "--seed", "3", "--out-dir",
                      dir.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"--version"}).out, std::string(bimult::kToolVersion) + "\n");
}

TEST(Cli, SeedFromEnvironment) {
  const auto dir = fresh_dir("env");
  ::setenv("BIMULT_SEED", "21", 1);
  const auto r = run({"experiment", "decomposition", "--trials", "10", "--out-dir", dir.string()});
  ::unsetenv("BIMULT_SEED");
  EXPECT_EQ(r.code, 0) << r.err;
  const auto files = with_extension(dir, ".jsonl");
  ASSERT_EQ(files.size(), 1u);
  EXPECT_EQ(bimult::read_jsonl(files[0]).at(0).master_seed, 21u);
}

TEST(Cli, GenSymbolAndApply) {
  const auto dir = fresh_dir("symbol");
  std::ofstream(dir / "b.json") << R"({"construction": "B", "mode": "desk", "N": [1]})";
  auto r = run({"gen-symbol", "--config", (dir / "b.json").string(), "--N", "1", "--seed", "4", "--out",
                (dir / "m.bin").string(), "--test-function", (dir / "f.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto side = nlohmann::json::parse(slurp(dir / "m.json"));
  EXPECT_EQ(side.at("tool_version"), bimult::kToolVersion);
  EXPECT_EQ(side.at("provenance").at("block"), 1);

  r = run({"apply", "--symbol", (dir / "m.bin").string(), "--f", (dir / "f.json").string(), "--out",
           (dir / "out.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto out = nlohmann::json::parse(slurp(dir / "out.json"));
  EXPECT_GT(out.at("ratio").get<double>(), 0.5);
  EXPECT_LT(out.at("ratio").get<double>(), 2.0);

  r = run({"apply", "--symbol", (dir / "m.bin").string(), "--f", (dir / "f.json").string(), "--eval", "direct",
           "--out", (dir / "direct.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(nlohmann::json::parse(slurp(dir / "direct.json")).at("ratio").get<double>(),
              out.at("ratio").get<double>(), 1e-9);

  std::ofstream(dir / "c.json") << "[[0, 0, 1, 0], [1, -1, -0.5, 0]]";
  r = run({"gen-symbol", "--construction", "lattice", "--coeffs", (dir / "c.json").string(), "--out",
           (dir / "lat.bin").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(run({"gen-symbol", "--construction", "A", "--out", (dir / "a.bin").string()}).code, 1);
}
