// Copyright 2026 The qwire Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>

#include "qwire/core.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string &args) {
    std::string cmd = std::string("\"") + QWIRE_BIN + "\" " + args + " 2>/dev/null";
    Run r;
    FILE *p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof(buf), p)) > 0) r.out.append(buf, n);
    int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
  protected:
    void SetUp() override {
        dir = fs::temp_directory_path() / ("qwire_cli_" + std::to_string(getpid()) + "_" +
                                           ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    std::string path(const std::string &f) const { return (dir / f).string(); }
    fs::path dir;
};

int count(const std::string &s, const std::string &needle) {
    int c = 0;
    for (size_t k = s.find(needle); k != std::string::npos; k = s.find(needle, k + 1)) c++;
    return c;
}

}  // namespace

TEST_F(Cli, CompileMirrorHasEightSteps) {
    auto r = run("compile mirror --sites 7 -o " + path("m.sched"));
    ASSERT_EQ(r.code, 0);
    auto s = qwire::parse_schedule(slurp(path("m.sched")));
    int hbar = 0;
    for (auto &l : s.layers) hbar += l.kind == qwire::LayerKind::HBar;
    EXPECT_EQ(hbar, 8);
    EXPECT_NE(slurp(path("m.sched.manifest")).find("full_steps 8\n"), std::string::npos);
}

TEST_F(Cli, CompileQftManifest) {
    auto r = run("compile qft --qubits 4 -o " + path("q.sched") + " --manifest " + path("q.man"));
    ASSERT_EQ(r.code, 0);
    auto man = slurp(path("q.man"));
    EXPECT_NE(man.find("cycle_count 3\n"), std::string::npos) << man;
    std::ofstream(path("qft.prog")) << "qubits 4\nqft\n";
    auto sim = run("simulate " + path("q.sched") + " --expect program --program " + path("qft.prog") +
              " --layout alternating --manifest " + path("q.man"));
    EXPECT_EQ(sim.code, 0) << sim.out;
    EXPECT_NE(sim.out.find("result equivalent"), std::string::npos);
}

TEST_F(Cli, CompileTransportMinimal) {
    auto r = run("compile transport --sites 2");
    ASSERT_EQ(r.code, 0);
    auto s = qwire::parse_schedule(r.out);
    EXPECT_EQ(s.sites, 2);
    std::ofstream(path("t.sched")) << r.out;
    auto sim = run("simulate " + path("t.sched") + " --expect transport --seed 5");
    EXPECT_EQ(sim.code, 0) << sim.out;
}

TEST_F(Cli, CompileGatesFromProgram) {
    std::ofstream(path("p.prog")) << "qubits 3\nlocalu 0 0.1 0.2 0.3\nmulti 1 0:0.5 2:-0.25\ncphase 2 0 1.5\n";
    auto r = run("compile gates --program " + path("p.prog") + " -o " + path("p.sched") + " --decoupling pulsed");
    ASSERT_EQ(r.code, 0);
    auto sim = run("simulate " + path("p.sched") + " --expect program --program " + path("p.prog") +
                   " --manifest " + path("p.sched.manifest"));
    EXPECT_EQ(sim.code, 0) << sim.out;
}

TEST_F(Cli, CompileRejectsBadOptions) {
    EXPECT_EQ(run("compile mirror --sites 1").code, 2);
    EXPECT_EQ(run("compile warp").code, 2);
    EXPECT_EQ(run("compile gates --qubits 2 --layout spiral").code, 2);
    EXPECT_EQ(run("compile gates --qubits 2 --control 0 --target 0").code, 2);
    EXPECT_EQ(run("compile mirror --decoupling maybe").code, 2);
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, SimulateMirrorAndEmpty) {
    ASSERT_EQ(run("compile mirror --sites 6 -o " + path("m.sched")).code, 0);
    auto a = run("simulate " + path("m.sched") + " --expect mirror --seed 42");
    EXPECT_EQ(a.code, 0) << a.out;
    EXPECT_NE(a.out.find("result pass"), std::string::npos);
    auto b = run("simulate " + path("m.sched") + " --expect mirror --seed 42");
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(run("simulate " + path("m.sched") + " --expect identity --seed 42").code, 1);

    std::ofstream(path("e.sched")) << "qwire-schedule 1\nsites 3\nlayers 0\nend\n";
    auto e = run("simulate " + path("e.sched") + " --expect identity --state-out " + path("out.state"));
    EXPECT_EQ(e.code, 0);
    EXPECT_NE(e.out.find("result pass"), std::string::npos) << e.out;
    EXPECT_EQ(slurp(path("out.state")).rfind("qwire-state 1\n", 0), 0u);
    auto again = run("simulate " + path("e.sched") + " --expect identity --state-in " + path("out.state"));
    EXPECT_EQ(again.code, 0);
}

TEST_F(Cli, SimulateRejectsCorruptOrLargeSchedules) {
    std::ofstream(path("bad.sched")) << "qwire-schedule 1\nsites 3\nlayers 1\nlayer 0 kind=LocalRz site=2 angle=1\nend\n";
    EXPECT_EQ(run("simulate " + path("bad.sched")).code, 2);
    std::ofstream(path("junk.sched")) << "not a schedule\n";
    EXPECT_EQ(run("simulate " + path("junk.sched")).code, 2);
    std::ofstream(path("big.sched")) << "qwire-schedule 1\nsites 40\nlayers 0\nend\n";
    EXPECT_EQ(run("simulate " + path("big.sched")).code, 2);
    EXPECT_EQ(run("simulate " + path("missing.sched")).code, 2);
}

TEST_F(Cli, DiagramAsciiAndSvg) {
    auto r = run("diagram X@5 --sites 7 --steps 8");
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("   8 ..X....\n"), std::string::npos) << r.out;
    EXPECT_EQ(count(r.out, "\n"), 9);
    auto z = run("diagram Z@1 --sites 2");
    EXPECT_EQ(z.code, 0);
    EXPECT_EQ(z.out.rfind("   0 Z.\n", 0), 0u);
    auto svg = run("diagram X@5 --sites 7 --steps 8 --format svg");
    EXPECT_EQ(svg.code, 0);
    EXPECT_EQ(svg.out.rfind("<?xml", 0), 0u);
    EXPECT_NE(svg.out.find("</svg>"), std::string::npos);
    EXPECT_EQ(run("diagram Q@5 --sites 7").code, 2);
    EXPECT_EQ(run("diagram X@9 --sites 7").code, 2);
    EXPECT_EQ(run("diagram X@2 --format png").code, 2);
}

TEST_F(Cli, Verify) {
    auto r = run("verify mirror-theorem");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("mirror-theorem"), std::string::npos);
    EXPECT_NE(r.out.find("PASS"), std::string::npos);
    EXPECT_EQ(run("verify no-such-claim").code, 2);
}
