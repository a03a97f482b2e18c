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

#include <random>

#include <gtest/gtest.h>

#include "dense.hpp"
#include "qwire/oracle.hpp"

using namespace qwire;

namespace {

// Logical qubit q is site q+1 in the dense helpers.
dense::Mat dense_program(const GateProgram &p) {
    int n = p.n_logical;
    dense::Mat u = dense::Mat::Identity(Eigen::Index{1} << n, Eigen::Index{1} << n);
    auto cp = [&](int c, int t, double th) {
        dense::Mat m = dense::Mat::Identity(u.rows(), u.cols());
        for (Eigen::Index i = 0; i < m.rows(); i++)
            if (((i >> c) & 1) && ((i >> t) & 1)) m(i, i) = std::polar(1.0, th);
        return m;
    };
    for (auto &op : p.ops) {
        if (auto *l = std::get_if<LocalU>(&op)) {
            dense::Mat one = dense::rot(dense::Z(), l->alpha) * dense::rot(dense::Y(), l->beta) *
                       dense::rot(dense::Z(), l->gamma);
            u = dense::at(one, l->qubit + 1, n) * u;
        } else if (auto *c = std::get_if<CPhase>(&op)) {
            u = cp(c->control, c->target, c->theta) * u;
        } else if (auto *m = std::get_if<MultiCPhase>(&op)) {
            for (auto &[t, th] : m->targets) u = cp(m->control, t, th) * u;
        } else {
            Eigen::Index d = u.rows();
            dense::Mat f(d, d);
            for (Eigen::Index j = 0; j < d; j++)
                for (Eigen::Index k = 0; k < d; k++)
                    f(k, j) = std::polar(1 / std::sqrt(double(d)), 2 * dense::pi * double(j * k) / double(d));
            u = f * u;
        }
    }
    return u;
}

}  // namespace

TEST(Logical, KernelsMatchKroneckerReference) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    for (int n = 1; n <= 4; n++) {
        for (int trial = 0; trial < 10; trial++) {
            GateProgram p;
            p.n_logical = n;
            for (int q = 0; q < n; q++) p.ops.push_back(LocalU{q, ang(rng), ang(rng), ang(rng)});
            if (n > 1) {
                p.ops.push_back(CPhase{0, n - 1, ang(rng)});
                MultiCPhase m{n - 1, {}};
                for (int t = 0; t + 1 < n; t++) m.targets.push_back({t, ang(rng)});
                p.ops.push_back(m);
            }
            p.ops.push_back(QFT{});
            auto u = logical_unitary(p);
            EXPECT_LT((u - dense_program(p)).norm(), 1e-10) << serialize_program(p);
            EXPECT_LT(unitarity_defect(u), 1e-10);
        }
    }
}

TEST(Logical, DftOnBasisStates) {
    // |1> on two qubits -> (|0> + i|1> - |2> - i|3>) / 2
    std::vector<cd> v(4, 0);
    v[1] = 1;
    logical::apply_dft(v);
    EXPECT_NEAR(std::abs(v[0] - cd(0.5, 0)), 0, 1e-15);
    EXPECT_NEAR(std::abs(v[1] - cd(0, 0.5)), 0, 1e-15);
    EXPECT_NEAR(std::abs(v[2] - cd(-0.5, 0)), 0, 1e-15);
    EXPECT_NEAR(std::abs(v[3] - cd(0, -0.5)), 0, 1e-15);
}

TEST(Embed, IdentityOnPadsAndPlacement) {
    std::mt19937_64 rng(13);
    GateProgram p{2, {LocalU{0, 0.3, 1.1, -0.4}, CPhase{0, 1, 0.7}}};
    auto u = logical_unitary(p);
    auto cfg = ChainConfig::padded(2);
    auto big = embed(u, cfg);
    EXPECT_LT(unitarity_defect(big), 1e-12);
    // Sites 1, 3 carry the logical qubits; the pad at 2 is untouched.
    dense::Mat want = dense::Mat::Zero(8, 8);
    for (int i = 0; i < 8; i++)
        for (int j = 0; j < 8; j++) {
            if (((i >> 1) & 1) != ((j >> 1) & 1)) continue;
            int li = (i & 1) | ((i >> 2) << 1), lj = (j & 1) | ((j >> 2) << 1);
            want(i, j) = u(li, lj);
        }
    EXPECT_LT((big - want).norm(), 1e-12);

    // Swapped output layout.
    auto swapped = embed(u, cfg, {3, 1});
    EXPECT_LT(unitarity_defect(swapped), 1e-12);
    EXPECT_GT((swapped - big).norm(), 0.1);
}

TEST(Embed, RejectsMismatches) {
    auto u = logical_unitary(GateProgram{2, {}});
    auto cfg = ChainConfig::padded(2);
    EXPECT_THROW(embed(u, cfg, {1, 2}), std::invalid_argument);
    EXPECT_THROW(embed(u, cfg, {1}), std::invalid_argument);
    EXPECT_THROW(embed(logical_unitary(GateProgram{3, {}}), cfg), std::invalid_argument);
    EXPECT_THROW(embed(logical_unitary(GateProgram{6, {}}), ChainConfig::padded(6)), std::invalid_argument);
}

TEST(Equivalence, CorruptedScheduleIsCaught) {
    auto cfg = ChainConfig::padded(2);
    SchedulerOptions o;
    o.residual = Residual::Clean;
    GateProgram p{2, {CPhase{0, 1, 1.1}}};
    auto c = schedule_cphase(0, 1, 1.1, cfg, o);
    ASSERT_TRUE(equivalence_check(c, p, cfg).pass());

    int corrupted = 0;
    for (size_t k = 0; k < c.schedule.layers.size(); k += 3) {
        auto bad = c;
        auto &l = bad.schedule.layers[k];
        if (kind_has_angle(l.kind))
            l.angle += 0.05;
        else
            bad.schedule.layers.erase(bad.schedule.layers.begin() + static_cast<long>(k));
        auto r = equivalence_check(bad, p, cfg, 4, 16);
        EXPECT_FALSE(r.pass()) << "layer " << k;
        EXPECT_EQ(r.counterexample.size(), 2u);
        EXPECT_NE(r.str().find("result mismatch"), std::string::npos);
        corrupted++;
    }
    EXPECT_GT(corrupted, 3);

    auto dropped = c;
    dropped.schedule.ledger.pending_z.clear();
    dropped.schedule.ledger.pending_z.push_back({3, 0.2});
    EXPECT_FALSE(equivalence_check(dropped, p, cfg).pass());
}

TEST(Equivalence, ReportIsReproducible) {
    auto cfg = ChainConfig::alternating(3);
    auto c = compile_qft(3, cfg);
    GateProgram p{3, {QFT{}}};
    auto a = equivalence_check(c, p, cfg, 99, 5);
    auto b = equivalence_check(c, p, cfg, 99, 5);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(a.trials, 5);
    EXPECT_NE(a.str().find("result equivalent"), std::string::npos);
}

TEST(Equivalence, SizeChecks) {
    auto cfg = ChainConfig::padded(2);
    PulseSchedule s(4);
    EXPECT_THROW(equivalence_check(s, {1, 3}, GateProgram{2, {}}, cfg), std::invalid_argument);
    PulseSchedule t(3);
    EXPECT_THROW(equivalence_check(t, {1}, GateProgram{2, {}}, cfg), std::invalid_argument);
    auto ok = equivalence_check(t, {1, 3}, GateProgram{2, {}}, cfg, 1, 4, CompareMode::Full);
    EXPECT_TRUE(ok.pass());
}
