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
#include <string>

#include <gtest/gtest.h>

#include "dense.hpp"
#include "qwire/compiler.hpp"
#include "qwire/pauli.hpp"
#include "qwire/statevector.hpp"

using namespace qwire;

namespace {

const Letter kLetters[] = {Letter::I, Letter::X, Letter::Z, Letter::Y};

PauliString random_pauli(std::mt19937_64 &rng, int n) {
    std::uniform_int_distribution<int> l(0, 3);
    PauliString p(n);
    for (auto &s : p.sites) s = kLetters[l(rng)];
    p.phase = l(rng);
    return p;
}

// Step images built letter by letter: X_s -> X_{s-1} Z_s X_{s+1}, Z_s -> X_s.
PauliString naive_step(const PauliString &p) {
    int n = static_cast<int>(p.size());
    auto img_x = [&](int s) {
        PauliString q(n);
        q.sites[s] = Letter::Z;
        if (s > 0) q.sites[s - 1] = Letter::X;
        if (s + 1 < n) q.sites[s + 1] = Letter::X;
        return q;
    };
    auto img_z = [&](int s) { return PauliString::single(n, s, Letter::X); };
    PauliString out(n);
    out.phase = p.phase;
    for (int s = 0; s < n; s++) {
        switch (p.sites[s]) {
            case Letter::X: out = out * img_x(s); break;
            case Letter::Z: out = out * img_z(s); break;
            case Letter::Y: {
                // Y = iXZ
                auto t = img_x(s) * img_z(s);
                t.phase = (t.phase + 1) & 3;
                out = out * t;
                break;
            }
            default: break;
        }
    }
    return out;
}

dense::Mat step_matrix(int n) { return dense::on_all(dense::H(), n) * dense::cz_chain(n); }

// Crude well-formedness: every tag closes, in order.
bool balanced_xml(const std::string &s) {
    std::vector<std::string> stack;
    size_t k = 0;
    while ((k = s.find('<', k)) != std::string::npos) {
        size_t e = s.find('>', k);
        if (e == std::string::npos) return false;
        std::string tag = s.substr(k + 1, e - k - 1);
        k = e + 1;
        if (tag.empty() || tag[0] == '?' || tag[0] == '!') continue;
        if (tag.back() == '/') continue;
        if (tag[0] == '/') {
            if (stack.empty() || stack.back() != tag.substr(1)) return false;
            stack.pop_back();
        } else {
            stack.push_back(tag.substr(0, tag.find(' ')));
        }
    }
    return stack.empty();
}

}  // namespace

TEST(Tracker, StepMatchesMatrixConjugation) {
    std::mt19937_64 rng(5);
    for (int n = 2; n <= 6; n++) {
        auto u = step_matrix(n);
        for (int trial = 0; trial < 30; trial++) {
            auto p = random_pauli(rng, n);
            auto q = PackedPauli::from(p);
            q.step();
            dense::Mat want = u * dense::pauli_string(p) * u.adjoint();
            EXPECT_LT((dense::pauli_string(q.to_string()) - want).norm(), 1e-9) << p.str();
        }
    }
}

TEST(Tracker, StepMatchesLetterRulesAcrossWords) {
    std::mt19937_64 rng(9);
    for (int n : {63, 64, 65, 130, 200}) {
        for (int trial = 0; trial < 20; trial++) {
            auto p = random_pauli(rng, n);
            auto q = PackedPauli::from(p);
            q.step();
            EXPECT_EQ(q.to_string(), naive_step(p)) << "n=" << n;
            q.step_inverse();
            EXPECT_EQ(q.to_string(), p);
        }
    }
}

TEST(Tracker, CliffordLayersMatchMatrices) {
    std::mt19937_64 rng(21);
    int n = 4;
    std::vector<PulseLayer> layers{
        PulseLayer::hbar(),
        PulseLayer::hbar(kDecLeft),
        PulseLayer::czbar(kDecRight),
        PulseLayer::hybar(),
        PulseLayer::ising(kPi / 4),
        PulseLayer::ising(3 * kPi / 4, kDecLeft | kDecRight),
        PulseLayer::local_rz(1, kPi / 4),
        PulseLayer::local_rx(4, -kPi / 2),
        PulseLayer::global_rz(kPi / 2),
        PulseLayer::global_ry(kPi / 4),
        PulseLayer::edge_rz(Edge::Right, kPi / 4),
    };
    for (auto &l : layers) {
        auto m = dense::layer(l, n);
        for (int trial = 0; trial < 10; trial++) {
            auto p = random_pauli(rng, n);
            auto fwd = PackedPauli::from(p), back = PackedPauli::from(p);
            fwd.conjugate(l);
            back.conjugate(l, true);
            auto pm = dense::pauli_string(p);
            EXPECT_LT((dense::pauli_string(fwd.to_string()) - m * pm * m.adjoint()).norm(), 1e-9)
                << serialize_layer(l, n) << " " << p.str();
            EXPECT_LT((dense::pauli_string(back.to_string()) - m.adjoint() * pm * m).norm(), 1e-9)
                << serialize_layer(l, n) << " " << p.str();
        }
    }
}

TEST(Tracker, NonCliffordLayerRejected) {
    auto p = PackedPauli::single(3, 0, Letter::X);
    EXPECT_THROW(p.conjugate(PulseLayer::local_rz(1, 0.3)), NonCliffordLayer);
    EXPECT_THROW(p.conjugate(PulseLayer::ising(0.1)), NonCliffordLayer);
}

TEST(Tracker, WorkedExampleTwoSteps) {
    auto p = PackedPauli::from(PauliString::parse("IIIIXII"));
    p.step();
    p.step();
    EXPECT_EQ(p.to_string().str(), "+IIXZXZX");
}

TEST(Mirror, SingleSiteImagesUpTo64) {
    for (int n = 2; n <= 64; n++) {
        auto m = mirror_map(n);
        EXPECT_TRUE(m.ok()) << "n=" << n << " failed at " << m.failed_site;
        EXPECT_TRUE(m.all_signs_positive()) << "n=" << n;
        EXPECT_EQ(m.entries.size(), static_cast<size_t>(2 * n));
    }
}

TEST(Mirror, DenseCycleIsReversal) {
    for (int n = 2; n <= 6; n++) {
        auto u = step_matrix(n);
        dense::Mat s = dense::Mat::Identity(u.rows(), u.cols());
        for (int k = 0; k <= n; k++) s = u * s;
        EXPECT_LT(dense::phase_distance(s, dense::reversal(n)), 1e-9) << "n=" << n;
    }
}

TEST(Mirror, OneStepShortIsNotReversal) {
    for (int n = 3; n <= 5; n++) {
        auto u = step_matrix(n);
        dense::Mat s = dense::Mat::Identity(u.rows(), u.cols());
        for (int k = 0; k < n; k++) s = u * s;
        EXPECT_GT(dense::phase_distance(s, dense::reversal(n)), 0.1);
    }
}

TEST(Spacetime, XAtFiveOnSeven) {
    auto sp = spacetime_pattern(PauliString::single(7, 4, Letter::X), 8);
    ASSERT_EQ(sp.grid.size(), 9u);
    auto &last = sp.grid.back();
    for (int s = 0; s < 7; s++) EXPECT_EQ(last[s], s == 2 ? Letter::X : Letter::I) << s;
    EXPECT_EQ(sp.phases.back(), 0);
    auto text = render_ascii(sp);
    EXPECT_NE(text.find("   8 ..X....\n"), std::string::npos) << text;
    EXPECT_NE(text.find("   0 ....X..\n"), std::string::npos) << text;
}

TEST(Spacetime, TrivialAndSvg) {
    auto sp = spacetime_pattern(PauliString::single(2, 0, Letter::Z), 3);
    EXPECT_EQ(sp.grid.size(), 4u);
    EXPECT_EQ(render_ascii(sp).substr(0, 8), "   0 Z.\n");
    auto svg = render_svg(spacetime_pattern(PauliString::single(7, 4, Letter::X), 8));
    EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
    EXPECT_TRUE(balanced_xml(svg));
    EXPECT_THROW(spacetime_pattern(PauliString::single(3, 0, Letter::X), -1), std::invalid_argument);
}

TEST(Padding, ReductionRules) {
    PadPattern pad{Letter::I, Letter::X, Letter::I, Letter::Z};
    auto r = reduce_mod_padding(PackedPauli::from(PauliString::parse("-ZXIZ")), pad);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->site0, 0);
    EXPECT_EQ(r->letter, Letter::Z);
    EXPECT_EQ(r->sign, -1);
    // Wrong letter on a pad, or support on two data sites.
    EXPECT_FALSE(reduce_mod_padding(PackedPauli::from(PauliString::parse("ZZII")), pad));
    EXPECT_FALSE(reduce_mod_padding(PackedPauli::from(PauliString::parse("ZIXI")), pad));
    // Non-Hermitian phase.
    EXPECT_FALSE(reduce_mod_padding(PackedPauli::from(PauliString::parse("+iZIII")), pad));
}

// Each impact point, checked on states: the edge pulse inside the cycle acts
// as the promised rotation of the data qubit before the cycle.
TEST(ImpactPoints, EachPointActsOnItsQubit) {
    std::mt19937_64 rng(17);
    for (int n = 3; n <= 7; n++) {
        for (int a = 1; a <= n; a++) {
            auto pad = complementary_padding(a, n);
            auto pts = find_impact_points(a, n, pad);
            EXPECT_FALSE(pts.empty()) << "n=" << n << " a=" << a;
            for (auto &p : pts) {
                double phi = 0.37;
                std::vector<Qubit> q(n);
                for (int s = 1; s <= n; s++) q[s - 1] = pad[s - 1] == Letter::X ? ket_plus() : haar_qubit(rng);
                auto lhs = product_state(q), rhs = product_state(q);
                PulseSchedule with(n);
                with.append(cycle_layers(n, {{p.step, p.edge, p.pulse, phi}}));
                run_schedule(lhs, with);
                apply_1q(rhs, a - 1, gates::rz(p.sign * phi));
                run_schedule(rhs, compile_mirror(n));
                EXPECT_GT(fidelity(lhs, rhs), 1 - 1e-9) << "n=" << n << " a=" << a << " t=" << p.step;
            }
        }
    }
}

TEST(ImpactPoints, RejectsBadArguments) {
    EXPECT_THROW(find_impact_points(0, 5), std::invalid_argument);
    EXPECT_THROW(find_impact_points(6, 5), std::invalid_argument);
    EXPECT_THROW(find_impact_points(1, 1), std::invalid_argument);
}
