// Black-box tests of the command-line tool: output bytes and exit codes.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = CHRONOFORM_CLI;
const std::string kFixtures = CHRONOFORM_FIXTURES;

struct Outcome {
  int code = -1;
  std::string out;
};

// Runs the tool with `args`; stderr is discarded unless `stderr_too`.
Outcome run(const std::string& args, bool stderr_too = false) {
  const std::string cmd = kCli + " " + args + (stderr_too ? " 2>&1" : " 2>/dev/null");
  Outcome r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string fixture(const std::string& name) { return kFixtures + "/" + name; }

struct TempDir {
  fs::path path;
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path = fs::temp_directory_path() / ("chronoform-cli-" + std::to_string(rng()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name, std::ios::binary) << text;
    return (path / name).string();
  }
};

}  // namespace

TEST(Cli, AnalyzeFigureOne) {
  const Outcome r = run("analyze " + fixture("fig1_delayed_climax.notes"));
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_GT(j["climax"]["normalized_position"].get<double>(), 0.5);
  EXPECT_GT(j["climax"]["asymmetry_index"].get<double>(), 0.0);
  EXPECT_EQ(j["piece"]["source"], "fig1_delayed_climax.notes");
  EXPECT_FALSE(j.contains("recurrence"));
}

TEST(Cli, AnalyzeChoraleRecurrences) {
  const Outcome r = run("analyze " + fixture("passion_chorales.notes") + " --query " +
                    fixture("chorale_query.notes"));
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["recurrence"]["matches"].size(), 5u);
  EXPECT_EQ(j["recurrence"]["outlier_index"], 4);
}

TEST(Cli, AnalyzeFormSteps) {
  const Outcome r = run("analyze " + fixture("fig1_delayed_climax.notes") + " --form AAB --seed AB");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["form"]["minimal_steps"], 1);
  EXPECT_EQ(j["form"]["steps"], nlohmann::json::array({"/"}));
}

TEST(Cli, AnalyzeIsByteIdentical) {
  const std::string args = "analyze " + fixture("passion_chorales.notes") + " --query " +
                           fixture("chorale_query.notes") + " --form AAB";
  const Outcome a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, ConfigEchoReparses) {
  TempDir dir;
  const std::string cfg = dir.write("run.cfg", "window=3/2\nweights=0.2,0.3,0.5\n");
  const Outcome r = run("analyze " + fixture("fig1_delayed_climax.notes") + " --config " + cfg +
                    " --window 2");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["config"]["window"], "2");  // flag wins
  EXPECT_EQ(j["config"]["weights"], "0.2,0.3,0.5");
  std::string text;
  for (const auto& [k, v] : j["config"].items()) text += k + "=" + v.get<std::string>() + "\n";
  const std::string echo = dir.write("echo.cfg", text);
  const Outcome again = run("analyze " + fixture("fig1_delayed_climax.notes") + " --config " + echo);
  EXPECT_EQ(again.out, r.out);
}

TEST(Cli, FormGenerate) {
  const Outcome r = run("form generate --seed AB --steps 2");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "AB AAB AAAB\n");
  const Outcome j = run("form generate --seed AB --steps 1 --json");
  EXPECT_EQ(j.out, "[\n  \"AB\",\n  \"AAB\"\n]\n");
  const Outcome trees = run("form generate --seed \"((A B) C)\" --steps 1 --trees");
  EXPECT_EQ(trees.code, 0);
  EXPECT_NE(trees.out.find("((A A B) C)\n"), std::string::npos);
}

TEST(Cli, FormRecognize) {
  Outcome r = run("form recognize ABB --seed AB");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "not derivable\n");
  r = run("form recognize AABA --seed ABA");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "1\n");
  r = run("form recognize AAAAB --seed AB --json");
  EXPECT_EQ(nlohmann::json::parse(r.out)["minimal_steps"], 3);
}

TEST(Cli, FormErrorsExitTwo) {
  EXPECT_EQ(run("form recognize aab --seed AB").code, 2);
  EXPECT_EQ(run("form recognize AAB --seed \"(A B\"").code, 2);
  EXPECT_EQ(run("form generate --seed AB").code, 2);  // missing --steps
}

TEST(Cli, CorpusTable) {
  const Outcome r = run("corpus " + fixture("corpus"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')),
            "file,beats_total,normalized_position,asymmetry_index,pre_mass_fraction");
  EXPECT_NE(r.out.find("\nmean,,0.500000,,\n"), std::string::npos);
  EXPECT_EQ(run("corpus " + fixture("corpus")).out, r.out);
}

TEST(Cli, CorpusSkipsCorruptFile) {
  TempDir dir;
  dir.write("a.notes", "0 2 60\n2 2 72\n4 2 60\n");
  dir.write("b.notes", "0 2 62\n2 2 74\n4 2 62\n");
  dir.write("c.notes", "0 two 60\n");
  const Outcome out = run("corpus " + dir.path.string());
  ASSERT_EQ(out.code, 0);
  EXPECT_EQ(std::count(out.out.begin(), out.out.end(), '\n'), 1 + 2 + 2);
  const Outcome all = run("corpus " + dir.path.string(), true);
  std::size_t warnings = 0;
  for (std::size_t p = all.out.find("warning:"); p != std::string::npos;
       p = all.out.find("warning:", p + 1)) {
    ++warnings;
  }
  EXPECT_EQ(warnings, 1u);
}

TEST(Cli, CorpusEmptyDirectoryExitsTwo) {
  TempDir dir;
  EXPECT_EQ(run("corpus " + dir.path.string()).code, 2);
}

TEST(Cli, ClimaxCsvAndJson) {
  Outcome r = run("climax " + fixture("fig1_delayed_climax.notes"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("time,salience\n0.000000,", 0), 0u);
  EXPECT_EQ(r.out.find('\r'), std::string::npos);
  r = run("climax " + fixture("fig1_delayed_climax.notes") + " --json");
  EXPECT_GT(nlohmann::json::parse(r.out)["normalized_position"].get<double>(), 0.5);
}

TEST(Cli, RecurOutput) {
  const Outcome r = run("recur " + fixture("planted_recurrences.notes") + " --query " +
                    fixture("planted_query.notes"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["matches"].size(), 5u);
}

TEST(Cli, OutFlagWritesFile) {
  TempDir dir;
  const std::string out = (dir.path / "report.json").string();
  const Outcome r = run("analyze " + fixture("fig1_delayed_climax.notes") + " --out " + out);
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(out);
  EXPECT_TRUE(nlohmann::json::accept(in));
}

TEST(Cli, MidiInput) {
  const Outcome r = run("analyze " + fixture("midi/two_voices.mid"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["piece"]["parts"], 2);
  const Outcome warned = run("analyze " + fixture("midi/unmatched.mid"), true);
  EXPECT_NE(warned.out.find("warning:"), std::string::npos);
}

TEST(Cli, InputErrorsExitTwo) {
  TempDir dir;
  const std::string bad = dir.write("bad.notes", "0 1 60\n1 0 62\n");
  const Outcome r = run("analyze " + bad, true);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("line 2"), std::string::npos);
  EXPECT_EQ(run("analyze " + dir.path.string() + "/missing.notes").code, 2);
  EXPECT_EQ(run("analyze " + dir.write("score.xml", "<score/>")).code, 2);
  EXPECT_EQ(run("analyze " + dir.write("junk.mid", "MThd")).code, 2);
  EXPECT_EQ(run("analyze " + fixture("fig1_delayed_climax.notes") + " --weights 1,2").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("").code, 2);
}

TEST(Cli, PreconditionErrorsExitThree) {
  TempDir dir;
  const std::string empty = dir.write("empty.notes", "# nothing here\n");
  EXPECT_EQ(run("analyze " + empty).code, 3);
  EXPECT_EQ(run("analyze " + fixture("fig1_delayed_climax.notes") + " --weights 0.5,0.5,0.5").code, 3);
  EXPECT_EQ(run("analyze " + fixture("fig1_delayed_climax.notes") + " --window 0").code, 3);
  EXPECT_EQ(run("recur " + fixture("planted_recurrences.notes") + " --query " + empty).code, 3);
}
