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
#include "qwire/statevector.hpp"

using namespace qwire;

namespace {

PulseLayer random_layer(std::mt19937_64 &rng, int n) {
    std::uniform_real_distribution<double> ang(-4, 4);
    std::uniform_int_distribution<int> kind(0, 8), bit(0, 3);
    PulseLayer l;
    l.kind = static_cast<LayerKind>(kind(rng));
    if (kind_has_site(l.kind)) l.site = bit(rng) & 1 ? 1 : n;
    if (kind_has_edge(l.kind)) l.edge = bit(rng) & 1 ? Edge::Left : Edge::Right;
    if (kind_has_angle(l.kind)) l.angle = ang(rng);
    if (kind_decouplable(l.kind)) l.decoupled = static_cast<uint8_t>(bit(rng));
    return l;
}

dense::Vec as_vec(const ChainState &s) {
    dense::Vec v(s.amp.size());
    for (size_t i = 0; i < s.amp.size(); i++) v[i] = s.amp[i];
    return v;
}

ChainState random_state(std::mt19937_64 &rng, int n) {
    std::vector<Qubit> q(n);
    for (auto &x : q) x = haar_qubit(rng);
    return product_state(q);
}

}  // namespace

TEST(Kernels, EveryLayerMatchesKroneckerReference) {
    std::mt19937_64 rng(1);
    for (int n = 2; n <= 5; n++) {
        for (int trial = 0; trial < 80; trial++) {
            auto l = random_layer(rng, n);
            auto s = random_state(rng, n);
            dense::Vec want = dense::layer(l, n) * as_vec(s);
            apply_layer(s, l);
            EXPECT_LT((as_vec(s) - want).norm(), 1e-12) << serialize_layer(l, n);
        }
    }
}

TEST(Kernels, NormPreservedOverLongSchedules) {
    std::mt19937_64 rng(2);
    for (int n : {3, 8, 12}) {
        PulseSchedule sched(n);
        for (int k = 0; k < 300; k++) sched.add(random_layer(rng, n));
        auto s = random_state(rng, n);
        run_schedule(s, sched);
        EXPECT_NEAR(s.norm(), 1.0, 1e-10) << "n=" << n;
    }
}

TEST(Kernels, ScheduleUnitaryMatchesReference) {
    std::mt19937_64 rng(3);
    PulseSchedule sched(4);
    for (int k = 0; k < 40; k++) sched.add(random_layer(rng, 4));
    auto u = schedule_unitary(sched);
    EXPECT_LT((u - dense::schedule(sched)).norm(), 1e-10);
    EXPECT_LT(unitarity_defect(u), 1e-10);
}

TEST(Kernels, PhaseAlignedDistanceIgnoresGlobalPhase) {
    auto a = dense::cz_chain(3);
    dense::Mat b = std::polar(1.0, 0.7) * a;
    EXPECT_LT(phase_aligned_distance(a, b), 1e-12);
    EXPECT_GT(phase_aligned_distance(a, dense::on_all(dense::H(), 3)), 0.5);
}

TEST(States, ProductAndFidelity) {
    auto s = product_state({ket0(), ket1(), ket_plus()});
    // |0>|1>|+> -> indices with bit1 set: 2 and 6
    EXPECT_NEAR(std::abs(s.amp[2]), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(std::abs(s.amp[6]), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(fidelity(s, s), 1.0, 1e-15);
    auto t = product_state({ket1(), ket1(), ket_plus()});
    EXPECT_NEAR(fidelity(s, t), 0.0, 1e-15);
}

TEST(States, ReducedDensityOfProduct) {
    std::mt19937_64 rng(4);
    std::vector<Qubit> q(4);
    for (auto &x : q) x = haar_qubit(rng);
    auto s = product_state(q);
    auto rho = reduced_density(s, {3, 1});
    ASSERT_EQ(rho.rows(), 4);
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
    dense::Vec psi = dense::product({dense::Vec::Map(q[2].data(), 2), dense::Vec::Map(q[0].data(), 2)});
    EXPECT_NEAR(std::real(psi.dot(rho * psi)), 1.0, 1e-12);
}

TEST(States, ExportImportRoundTrip) {
    std::mt19937_64 rng(5);
    auto s = random_state(rng, 5);
    auto back = import_state(export_state(s));
    ASSERT_EQ(back.n, 5);
    for (size_t i = 0; i < s.amp.size(); i++) EXPECT_EQ(back.amp[i], s.amp[i]);
    EXPECT_THROW(import_state("junk"), std::invalid_argument);
    EXPECT_THROW(import_state("qwire-state 1\nsites 2\n9 1 0\nend\n"), std::invalid_argument);
    EXPECT_THROW(import_state("qwire-state 1\nsites 2\n0 1 0\n"), std::invalid_argument);
}

TEST(States, CapEnforced) {
    EXPECT_THROW(ChainState(g_state_cap + 1), std::invalid_argument);
    EXPECT_THROW(ChainState(0), std::invalid_argument);
    EXPECT_NO_THROW(ChainState(g_state_cap));
}

TEST(States, InitPlacesDataAndPads) {
    auto cfg = ChainConfig::alternating(3);
    auto s = init_state(cfg, {ket1(), ket1(), ket1()}, JunkMode::Config);
    auto want = product_state({ket1(), ket_plus(), ket1(), ket0(), ket1()});
    EXPECT_NEAR(fidelity(s, want), 1.0, 1e-15);
    EXPECT_THROW(init_state(cfg, {ket1()}, JunkMode::Config), std::invalid_argument);
    EXPECT_THROW(init_state(cfg, {ket1(), ket1(), ket1()}, JunkMode::Random), std::invalid_argument);
}

TEST(Ledger, MaterializeAppliesZThenFrame) {
    std::mt19937_64 rng(6);
    auto s = random_state(rng, 3);
    FrameLedger led;
    led.pending_z = {{2, 0.4}};
    led.pauli_frame = PauliString::parse("XIY");
    dense::Vec want = dense::pauli_string(led.pauli_frame) * dense::at(dense::rot(dense::Z(), 0.4), 2, 3) * as_vec(s);
    materialize_ledger(s, led);
    EXPECT_LT(dense::phase_distance(as_vec(s), want), 1e-12);
}

TEST(Kernels, RejectsBadLayers) {
    ChainState s(3);
    EXPECT_THROW(apply_layer(s, PulseLayer::local_rz(4, 0.1)), std::invalid_argument);
    EXPECT_THROW(apply_layer(s, PulseLayer::global_rz(std::nan(""))), std::invalid_argument);
    PulseSchedule wrong(4);
    EXPECT_THROW(run_schedule(s, wrong), std::invalid_argument);
}
