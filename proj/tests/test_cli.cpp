/*
 * Copyright (c) 2026, The mallterm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/
#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mallterm/surface.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
};

Outcome run(const std::string& args) {
    std::string cmd = std::string(MALLTERM_CLI) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    std::string out;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
    int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string sample(const std::string& name) { return std::string(MALLTERM_SAMPLES) + "/" + name; }

class Cli : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("mallterm_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& body) {
        fs::path p = dir_ / name;
        std::ofstream(p) << body;
        return p.string();
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, CheckVending) {
    EXPECT_EQ(run("check " + sample("vending.cp") + " --sig " + sample("vending.sig")).code, 0);
    EXPECT_EQ(run("check " + sample("vending.cp")).code, 1);
}

TEST_F(Cli, ParseCrossPrints) {
    Outcome r = run("parse " + sample("distribution.cp") + " --to term");
    ASSERT_EQ(r.code, 0);
    auto a = mallterm::parse_paired(r.out);
    std::ifstream in(sample("distribution.ct"));
    std::stringstream ss;
    ss << in.rdbuf();
    auto b = mallterm::parse_paired(ss.str());
    EXPECT_EQ(a.syntax, mallterm::Syntax::Term);
    EXPECT_EQ(a.term, b.term);
    EXPECT_EQ(a.sequent, b.sequent);
}

TEST_F(Cli, Measure) {
    Outcome r = run("measure " + sample("bag.ct"));
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "height=6 bag={6,5}\n");
}

TEST_F(Cli, EquivExitCodes) {
    std::string t = sample("distribution.ct");
    EXPECT_EQ(run("equiv " + t + " " + t).code, 0);
    std::string x = write("x.ct", "a:A |- b:{x:A, y:A}\n---\nb[x]. a == b\n");
    std::string y = write("y.ct", "a:A |- b:{x:A, y:A}\n---\nb[y]. a == b\n");
    EXPECT_EQ(run("equiv " + x + " " + y).code, 1);
    std::string f1 = write("f1.ct", "a:{x:A, z:A} |- b:[y:A]\n---\na{ x => b{ y => a == b } | z => b{ y => a == b } }\n");
    std::string f2 = write("f2.ct", "a:{x:A, z:A} |- b:[y:A]\n---\nb{ y => a{ x => a == b | z => a == b } }\n");
    EXPECT_EQ(run("equiv " + f1 + " " + f2).code, 0);
    EXPECT_EQ(run("equiv " + f1 + " " + f2 + " --budget 0").code, 2);
    std::string other = write("o.ct", "a:A |- b:A\n---\na == b\n");
    EXPECT_EQ(run("equiv " + x + " " + other).code, 1);
}

TEST_F(Cli, NormalizeThenEquiv) {
    std::string src = write("c.ct", "x:A |- y:A\n---\ncut g (g[a]. x == g, g{ a => g == y | b => g == y })\n");
    Outcome r = run("normalize " + src + " --trace");
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("(11)"), std::string::npos);
    Outcome plain = run("normalize " + src);
    std::string nf = write("nf.ct", plain.out);
    EXPECT_EQ(run("equiv " + nf + " " + src).code, 0);
    std::string nv = write("nv.cp", run("normalize " + sample("vending.cp") + " --sig " + sample("vending.sig")).out);
    EXPECT_EQ(run("equiv " + nv + " " + sample("vending.cp") + " --sig " + sample("vending.sig")).code, 0);
}

TEST_F(Cli, Errors) {
    EXPECT_EQ(run("check " + (dir_ / "nope.ct").string()).code, 66);
    EXPECT_EQ(run("parse " + write("bad.ct", "a:A |- b:A\n---\na == \n")).code, 65);
    EXPECT_EQ(run("frobnicate").code, 64);
    EXPECT_EQ(run("").code, 64);
    EXPECT_EQ(run("equiv " + sample("bag.ct")).code, 64);
    EXPECT_EQ(run("check " + write("ill.ct", "a:A |- b:B\n---\na == b\n")).code, 1);
}

TEST_F(Cli, Json) {
    Outcome r = run("--json measure " + sample("bag.ct"));
    ASSERT_EQ(r.code, 0);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["command"], "measure");
    EXPECT_EQ(j["verdict"], "ok");
    EXPECT_EQ(j["data"]["height"], 6);
    Outcome e = run("--json equiv " + sample("distribution.ct") + " " + sample("distribution.cp"));
    EXPECT_EQ(e.code, 0);
    EXPECT_EQ(nlohmann::json::parse(e.out)["verdict"], "equivalent");
}

TEST_F(Cli, Sweeps) {
    EXPECT_EQ(run("laws --count 5 --seed 3").code, 0);
    Outcome p = run("pairs --max-size 4");
    EXPECT_EQ(p.code, 0);
    EXPECT_NE(p.out.find("divergences="), std::string::npos);
}
