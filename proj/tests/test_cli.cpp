#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "trace_formulary/cli.hpp"

namespace tf = trace_formulary;
namespace cli = trace_formulary::cli;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("tf_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  static std::string read(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  // Zeta zeros up to 50 written by the scanner.
  std::string zeta_file() const {
    const auto c = cli::resolve_config("zeros scan", {{"label", "zeta"}, {"T", "50"}, {"output", path("zeta.txt")}});
    EXPECT_EQ(cli::run(c), cli::kPass);
    return path("zeta.txt");
  }

  int binary(const std::string& args) const {
    const std::string cmd = std::string(TF_CLI_BINARY) + " " + args + " >" + path("stdout.txt") + " 2>" + path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, Sha256KnownDigest) {
  write("abc.txt", "abc");
  EXPECT_EQ(cli::sha256_file(path("abc.txt")), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(CliFormat, SeventeenSignificantDigits) {
  EXPECT_EQ(cli::format_number17(0.1), "0.10000000000000001");
  EXPECT_EQ(cli::format_number17(50), "50");
  EXPECT_EQ(cli::format_number17(std::nan("")), "null");
  EXPECT_EQ(std::stod(cli::format_number17(1.0 / 3)), 1.0 / 3);
}

TEST(CliFormat, ReportKeysSortedAndStable) {
  cli::Json j;
  j["zeta"] = 1.5;
  j["alpha"] = {{"b", 2}, {"a", "x"}};
  j["list"] = {1, 2.25};
  const auto text = cli::dump_report(j);
  EXPECT_EQ(text, "{\n  \"alpha\": {\n    \"a\": \"x\",\n    \"b\": 2\n  },\n  \"list\": [\n    1,\n    2.25\n  ],\n  \"zeta\": 1.5\n}\n");
  EXPECT_EQ(cli::Json::parse(text), j);
}

TEST_F(CliTest, AtomicWriteLeavesNoTempFile) {
  cli::write_atomic(path("out.txt"), "first");
  cli::write_atomic(path("out.txt"), "second");
  EXPECT_EQ(read(path("out.txt")), "second");
  EXPECT_FALSE(fs::exists(path("out.txt.tmp")));
}

TEST_F(CliTest, ConfigFileOverridesFlagsOverridesDefaults) {
  write("run.cfg", "[solenoid]\nrange = 5\noutput = report.json\n");
  const auto c = cli::resolve_config("solenoid", {{"range", "3"}, {"matrix", "2"}, {"l", "0.5"}}, path("run.cfg"));
  EXPECT_EQ(c.get("range"), "5");
  EXPECT_EQ(c.get("matrix"), "2");
  EXPECT_EQ(c.get("l"), "0.5");
  EXPECT_EQ(c.get("tol"), "1e-10");
  EXPECT_EQ(c.get("output"), path("report.json"));
}

TEST_F(CliTest, ConfigRejectsUnknownKeysAndBadValues) {
  write("bad.cfg", "[folcoh]\ncolour = blue\n");
  EXPECT_THROW(cli::resolve_config("folcoh", {}, path("bad.cfg")), tf::Error);
  EXPECT_THROW(cli::resolve_config("folcoh", {{"colour", "blue"}}), tf::Error);
  EXPECT_THROW(cli::resolve_config("solenoid", {{"tol", "-1"}}), tf::Error);
  EXPECT_THROW(cli::resolve_config("folcoh", {{"format", "xml"}}), tf::Error);
  EXPECT_THROW(cli::resolve_config("nope", {}), tf::Error);
}

TEST_F(CliTest, MissingZeroFileNamesPath) {
  try {
    cli::resolve_config("explicit", {{"zeros", path("absent.txt")}});
    FAIL();
  } catch (const tf::Error& e) {
    EXPECT_NE(std::string(e.what()).find(path("absent.txt")), std::string::npos);
  }
}

TEST_F(CliTest, ExplicitPassesAndReportIsReproducible) {
  const auto zeros = zeta_file();
  const auto c = cli::resolve_config("explicit", {{"zeros", zeros}, {"output", path("a.json")}});
  ASSERT_EQ(cli::run(c), cli::kPass);
  auto c2 = c;
  c2.values["output"] = path("b.json");
  ASSERT_EQ(cli::run(c2), cli::kPass);
  const auto a = cli::Json::parse(read(path("a.json")));
  const auto b = cli::Json::parse(read(path("b.json")));
  // only the output path differs
  auto a2 = a, b2 = b;
  a2["config"].erase("output");
  b2["config"].erase("output");
  EXPECT_EQ(cli::dump_report(a2), cli::dump_report(b2));
  EXPECT_TRUE(a["pass"].get<bool>());
  EXPECT_EQ(a["inputs"][0]["sha256"], cli::sha256_file(zeros));
  EXPECT_EQ(a["config"]["phi"], "bump:2,1");
  EXPECT_LE(a["result"]["residual"].get<double>(), a["result"]["budget"].get<double>());
}

TEST_F(CliTest, ExplicitIdentityFailureExitsOne) {
  // height claims 50 but only the first zero is listed
  write("short.txt", "label zeta height 50\n14.134725141734694\n");
  const auto c = cli::resolve_config("explicit", {{"zeros", path("short.txt")}, {"output", path("r.json")}});
  EXPECT_EQ(cli::run(c), cli::kIdentityFail);
  const auto r = cli::Json::parse(read(path("r.json")));
  EXPECT_FALSE(r["pass"].get<bool>());
  EXPECT_EQ(r["exit_code"], 1);
}

TEST_F(CliTest, ExplicitSupportAtZeroIsUsageError) {
  const auto zeros = zeta_file();
  std::ostringstream diag;
  const auto c = cli::resolve_config("explicit", {{"zeros", zeros}, {"phi", "bump:0,1"}, {"output", path("r.json")}});
  EXPECT_EQ(cli::run(c, diag), cli::kUsage);
  EXPECT_NE(diag.str().find("SupportContainsZero"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("r.json")));
}

TEST_F(CliTest, ExplicitEllipticCurve) {
  const auto c = cli::resolve_config("explicit", {{"curve", "5,1,0"}, {"output", path("e.json")}});
  ASSERT_EQ(cli::run(c), cli::kPass);
  const auto r = cli::Json::parse(read(path("e.json")));
  EXPECT_EQ(r["result"]["curve"]["a_p"], 2);
}

TEST_F(CliTest, SolenoidCombReport) {
  const auto c = cli::resolve_config("solenoid", {{"matrix", "2"}, {"range", "12"}, {"output", path("s.json")}});
  ASSERT_EQ(cli::run(c), cli::kPass);
  const auto r = cli::Json::parse(read(path("s.json")));
  const auto& rhs = r["result"]["rhs"]["coefficients_over_l"];
  EXPECT_EQ(rhs["0"], "0");
  EXPECT_EQ(rhs["3"], "-7");  // 1 - 2^3
  EXPECT_EQ(rhs["-3"], "7/8");
  EXPECT_EQ(r["result"]["lhs"], r["result"]["rhs"]);
}

TEST_F(CliTest, SolenoidCmPairing) {
  const auto c = cli::resolve_config("solenoid", {{"curve", "5,1,0"}, {"pair", "bump:2,1"}, {"output", path("c.json")}});
  ASSERT_EQ(cli::run(c), cli::kPass);
  const auto r = cli::Json::parse(read(path("c.json")))["result"];
  EXPECT_TRUE(r["pairing"]["elliptic_pass"].get<bool>());
  EXPECT_LE(r["pairing"]["elliptic_difference"].get<double>(), 1e-10);
  EXPECT_TRUE(r["theta_spectrum"]["pass"].get<bool>());
  EXPECT_EQ(r["theta_spectrum"]["degrees"][1]["real_part"], "1/2");
}

TEST_F(CliTest, SolenoidIdentityMatrixIsDegenerate) {
  std::ostringstream diag;
  EXPECT_EQ(cli::run(cli::resolve_config("solenoid", {{"matrix", "1,0;0,1"}}), diag), cli::kUsage);
  EXPECT_NE(diag.str().find("DegenerateAtK"), std::string::npos);
}

TEST_F(CliTest, ZerosScanAndValidate) {
  const auto zeros = zeta_file();
  const auto z = tf::read_zero_file(zeros);
  EXPECT_GE(z.size(), 10u);
  ASSERT_EQ(cli::run(cli::resolve_config("zeros validate", {{"file", zeros}, {"output", path("v.json")}})), cli::kPass);
  write("off.txt", "label zeta height 20\n14.2\n");
  ASSERT_EQ(cli::run(cli::resolve_config("zeros validate", {{"file", path("off.txt")}, {"output", path("w.json")}})), cli::kIdentityFail);
  const auto w = cli::Json::parse(read(path("w.json")));
  EXPECT_DOUBLE_EQ(w["result"]["failed_ordinate"].get<double>(), 14.2);
}

TEST_F(CliTest, FolcohProfileCsvNonIncreasing) {
  ASSERT_EQ(cli::run(cli::resolve_config("folcoh", {{"alpha", "golden"}, {"N", "1000"}, {"output", path("p.csv")}})), cli::kPass);
  std::istringstream in(read(path("p.csv")));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "q,min_distance");
  double prev = 1;
  int rows = 0;
  while (std::getline(in, line)) {
    const double d = std::stod(line.substr(line.find(',') + 1));
    EXPECT_LE(d, prev);
    prev = d;
    ++rows;
  }
  EXPECT_EQ(rows, 15);  // Fibonacci numbers 1..987
}

TEST_F(CliTest, BinaryExitCodes) {
  EXPECT_EQ(binary("--help"), 0);
  EXPECT_EQ(binary(""), 2);
  EXPECT_EQ(binary("frobnicate"), 2);
  EXPECT_EQ(binary("solenoid --range x --matrix 2"), 2);
  EXPECT_EQ(binary("solenoid --matrix '1,0;0,1'"), 2);
  EXPECT_NE(read(path("stderr.txt")).find("DegenerateAtK"), std::string::npos);
  EXPECT_EQ(binary("explicit --zeros " + path("absent.txt")), 2);
  EXPECT_NE(read(path("stderr.txt")).find(path("absent.txt")), std::string::npos);
  EXPECT_EQ(binary("solenoid --matrix '2,1;1,1' --l 'log 3' --range 6"), 0);
  write("off.txt", "label zeta height 20\n14.2\n");
  EXPECT_EQ(binary("zeros validate --file " + path("off.txt")), 1);
}

TEST_F(CliTest, BinaryReportsByteIdentical) {
  const auto zeros = zeta_file();
  write("run.cfg", "[explicit]\nfield = Q\nphi = bump:2,1\nzeros = zeta.txt\n");
  ASSERT_EQ(binary("explicit --config " + path("run.cfg") + " --output " + path("one.json")), 0);
  ASSERT_EQ(binary("explicit --config " + path("run.cfg") + " --output " + path("two.json")), 0);
  auto one = read(path("one.json")), two = read(path("two.json"));
  ASSERT_FALSE(one.empty());
  // the config embeds the output path; compare with it masked
  const auto mask = [](std::string s, const std::string& what) {
    const auto pos = s.find(what);
    if (pos != std::string::npos) s.replace(pos, what.size(), "OUT");
    return s;
  };
  EXPECT_EQ(mask(one, path("one.json")), mask(two, path("two.json")));
  // printing to stdout twice gives the same bytes outright
  ASSERT_EQ(binary("explicit --config " + path("run.cfg")), 0);
  one = read(path("stdout.txt"));
  ASSERT_EQ(binary("explicit --config " + path("run.cfg")), 0);
  EXPECT_EQ(one, read(path("stdout.txt")));
  EXPECT_NE(one.find(cli::sha256_file(path("run.cfg"))), std::string::npos);
  EXPECT_NE(one.find(cli::sha256_file(zeros)), std::string::npos);
}
