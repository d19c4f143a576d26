#include <json.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;
const std::string kCorpus = CFV_CORPUS_DIR;

struct Run {
  int code = -1;
  std::string out;
};

Run cfv(const std::string& args) {
  auto capture = fs::temp_directory_path() / "cfv_cli_test.out";
  int status = std::system((std::string(CFV_CLI) + " " + args + " > " + capture.string() + " 2>&1").c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(capture);
  std::ostringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  fs::remove(capture);
  return r;
}

std::string report_path(const std::string& name) { return (fs::temp_directory_path() / name).string(); }

TEST(Cli, AnalyzeExitCodes) {
  const std::string mv = kCorpus + "/minivec";
  auto out = report_path("cfv_cli_same.json");
  EXPECT_EQ(cfv("analyze -q --old " + mv + "/old --new " + mv + "/old --tests " + mv + "/tests --out " + out).code, 0);
  EXPECT_EQ(cfv("analyze -q --old " + mv + "/old --new " + mv + "/new --tests " + mv + "/tests --out " + out).code, 1);
  EXPECT_EQ(cfv("analyze -q --budget 0.001 --old " + mv + "/old --new " + mv + "/new --tests " + mv + "/tests --out " +
                out)
                .code,
            2);
  auto j = nlohmann::json::parse(std::ifstream(out));
  EXPECT_TRUE(j["budget_exceeded"].get<bool>());
  fs::remove(out);
}

TEST(Cli, ErrorsExitThree) {
  const std::string mv = kCorpus + "/minivec";
  auto out = report_path("cfv_cli_err.json");
  EXPECT_EQ(cfv("analyze --old " + mv + "/old --new /nonexistent --tests " + mv + "/tests --out " + out).code, 3);
  EXPECT_EQ(cfv("analyze --old " + mv + "/old --new " + mv + "/new --tests " + mv + "/tests --width 12 --out " + out)
                .code,
            3);
  EXPECT_EQ(cfv("analyze --old " + mv + "/old").code, 3);
  EXPECT_EQ(cfv("frobnicate").code, 3);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, PatchProducesTheNewVersion) {
  const std::string mv = kCorpus + "/minivec";
  auto diff = report_path("cfv_cli.diff");
  std::ofstream(diff) << "--- a/vec.c\n+++ b/vec.c\n@@ -81,1 +81,1 @@\n-  data[pos] = v;\n+  data[pos + 1] = v;\n";
  auto out = report_path("cfv_cli_patch.json");
  auto r = cfv("analyze --old " + mv + "/old --patch " + diff + " --tests " + mv + "/tests --out " + out);
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_NE(r.out.find("vec_insert: not_equivalent"), std::string::npos) << r.out;
  fs::remove(diff);
  fs::remove(out);
}

TEST(Cli, Diff) {
  auto r = cfv("diff " + kCorpus + "/minivec/old " + kCorpus + "/minivec/new");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("rename vec_full -> vec_at_capacity"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("modified vec_insert"), std::string::npos);
  EXPECT_NE(r.out.find("unchanged vec_get"), std::string::npos);
}

TEST(Cli, Equiv) {
  const std::string dir = kCorpus + "/scenarios/negindex";
  auto smt = report_path("cfv_cli.smt2");
  auto r = cfv("equiv --width 8 --emit-smt " + smt + " " + dir + "/old/buf.c " + dir + "/new/buf.c buf_at");
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_NE(r.out.find("not_equivalent"), std::string::npos);
  std::ifstream in(smt);
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first, "(set-logic QF_BV)");
  fs::remove(smt);
  EXPECT_EQ(cfv("equiv " + dir + "/old/buf.c " + dir + "/new/buf.c buf_put").code, 0);
  EXPECT_EQ(cfv("equiv " + dir + "/old/buf.c " + dir + "/new/buf.c missing").code, 3);
}

TEST(Cli, Complexity) {
  auto r = cfv("complexity " + kCorpus + "/minivec/new");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("vec_insert 6\n"), std::string::npos) << r.out;
}

TEST(Cli, Verify) {
  const std::string mv = kCorpus + "/minivec";
  auto r = cfv("verify --tests " + mv + "/tests --src " + mv + "/new");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("test_roundtrip_any: pass"), std::string::npos) << r.out;
}

} // namespace
