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

#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qwire/core.hpp"
#include "qwire/scheduler.hpp"
#include "qwire/statevector.hpp"

namespace qwire {

// Textbook logical semantics, written without the chain machinery.
// Qubit q is bit q of the index. R_z(t) = exp(-i t Z), CP[theta] = diag(1,1,1,e^{i theta}).
namespace logical {

inline void apply_1q(std::vector<cd> &v, int q, const std::array<cd, 4> &m) {
    size_t bit = size_t{1} << q;
    for (size_t i = 0; i < v.size(); i++) {
        if (i & bit) continue;
        cd a = v[i], b = v[i | bit];
        v[i] = m[0] * a + m[1] * b;
        v[i | bit] = m[2] * a + m[3] * b;
    }
}

inline void apply_cp(std::vector<cd> &v, int c, int t, double theta) {
    cd ph = std::polar(1.0, theta);
    size_t mask = (size_t{1} << c) | (size_t{1} << t);
    for (size_t i = 0; i < v.size(); i++)
        if ((i & mask) == mask) v[i] *= ph;
}

inline std::array<cd, 4> rz(double t) { return {std::polar(1.0, -t), 0, 0, std::polar(1.0, t)}; }
inline std::array<cd, 4> ry(double t) { return {std::cos(t), -std::sin(t), std::sin(t), std::cos(t)}; }

// Exact DFT: |j> -> 2^{-n/2} sum_k e^{2 pi i jk / 2^n} |k>.
inline void apply_dft(std::vector<cd> &v) {
    size_t d = v.size();
    std::vector<cd> out(d, 0);
    double s = 1 / std::sqrt(static_cast<double>(d));
    for (size_t k = 0; k < d; k++)
        for (size_t j = 0; j < d; j++) out[k] += std::polar(s, 2 * kPi * double((j * k) % d) / double(d)) * v[j];
    v = std::move(out);
}

inline void apply_program(std::vector<cd> &v, const GateProgram &p) {
    for (auto &op : p.ops) {
        if (auto *u = std::get_if<LocalU>(&op)) {
            apply_1q(v, u->qubit, rz(u->gamma));
            apply_1q(v, u->qubit, ry(u->beta));
            apply_1q(v, u->qubit, rz(u->alpha));
        } else if (auto *c = std::get_if<CPhase>(&op)) {
            apply_cp(v, c->control, c->target, c->theta);
        } else if (auto *m = std::get_if<MultiCPhase>(&op)) {
            for (auto &[t, th] : m->targets) apply_cp(v, m->control, t, th);
        } else {
            apply_dft(v);
        }
    }
}

}  // namespace logical

inline UnitaryMatrix logical_unitary(const GateProgram &p) {
    size_t d = size_t{1} << p.n_logical;
    UnitaryMatrix u(d, d);
    for (size_t j = 0; j < d; j++) {
        std::vector<cd> v(d, 0);
        v[j] = 1;
        logical::apply_program(v, p);
        for (size_t i = 0; i < d; i++) u(i, j) = v[i];
    }
    return u;
}

// u on the data sites, identity on the pads. Data qubit q is read at
// cfg.layout[q] and written at out_layout[q]; pads follow the reversal parity.
inline UnitaryMatrix embed(const UnitaryMatrix &u, const ChainConfig &cfg, std::vector<int> out_layout = {},
                           int reflections = 0) {
    int n = cfg.n_logical, sites = cfg.sites;
    if (out_layout.empty()) out_layout = cfg.layout;
    if (u.rows() != (Eigen::Index{1} << n) || u.cols() != u.rows()) throw std::invalid_argument("unitary size differs from layout");
    if (static_cast<int>(out_layout.size()) != n) throw std::invalid_argument("output layout size differs");
    if (sites > 10) throw std::invalid_argument("embed size cap exceeded");
    auto odd = reflections % 2 != 0;
    uint64_t in_data = 0, out_data = 0;
    for (int s : cfg.layout) in_data |= uint64_t{1} << (s - 1);
    for (int s : out_layout) out_data |= uint64_t{1} << (s - 1);
    for (int s = 1; s <= sites; s++) {
        int src = odd ? sites + 1 - s : s;
        bool pad_out = !((out_data >> (s - 1)) & 1), pad_in = !((in_data >> (src - 1)) & 1);
        if (pad_out != pad_in) throw std::invalid_argument("layout mismatch: pads do not line up");
    }
    size_t d = size_t{1} << sites;
    UnitaryMatrix out = UnitaryMatrix::Zero(d, d);
    for (size_t j = 0; j < d; j++) {
        size_t lj = 0, pads = 0;
        for (int q = 0; q < n; q++) lj |= ((j >> (cfg.layout[q] - 1)) & 1) << q;
        for (int s = 1; s <= sites; s++) {
            if ((out_data >> (s - 1)) & 1) continue;
            int src = odd ? sites + 1 - s : s;
            pads |= ((j >> (src - 1)) & 1) << (s - 1);
        }
        for (size_t li = 0; li < u.rows(); li++) {
            if (u(li, lj) == cd(0)) continue;
            size_t i = pads;
            for (int q = 0; q < n; q++) i |= ((li >> q) & 1) << (out_layout[q] - 1);
            out(i, j) = u(li, lj);
        }
    }
    return out;
}

enum class CompareMode {
    Data,  // fidelity of the data-site reduced state with the ideal output
    Full,  // whole chain, pads expected back in their prepared states
};

struct EquivalenceReport {
    std::string schedule_hash, program_hash;
    uint64_t seed = 0;
    int trials = 0;
    double min_fidelity = 1, mean_fidelity = 1;
    int worst_trial = -1;
    std::vector<Qubit> counterexample;
    double tolerance = 1e-9;

    bool pass() const { return min_fidelity >= 1 - tolerance; }

    std::string str() const {
        std::string out = "qwire-oracle 1\n";
        out += "schedule_hash " + schedule_hash + "\n";
        out += "program_hash " + program_hash + "\n";
        out += "seed " + std::to_string(seed) + "\n";
        out += "trials " + std::to_string(trials) + "\n";
        out += "min_fidelity " + format_angle(min_fidelity) + "\n";
        out += "mean_fidelity " + format_angle(mean_fidelity) + "\n";
        out += std::string("result ") + (pass() ? "equivalent" : "mismatch") + "\n";
        if (!pass()) {
            out += "counterexample_trial " + std::to_string(worst_trial) + "\n";
            for (size_t q = 0; q < counterexample.size(); q++)
                out += "counterexample_qubit " + std::to_string(q) + " " + format_angle(counterexample[q][0].real()) +
                       " " + format_angle(counterexample[q][0].imag()) + " " +
                       format_angle(counterexample[q][1].real()) + " " + format_angle(counterexample[q][1].imag()) +
                       "\n";
        }
        out += "end\n";
        return out;
    }
};

// Runs the schedule on Haar-random product inputs (padding from cfg), applies
// the ledger, and compares with the logical program placed at `final_layout`.
inline EquivalenceReport equivalence_check(const PulseSchedule &sched, const std::vector<int> &final_layout,
                                           const GateProgram &prog, const ChainConfig &cfg, uint64_t seed = 1,
                                           int trials = 16, CompareMode mode = CompareMode::Data,
                                           int reflections = 0) {
    if (cfg.sites != sched.sites) throw std::invalid_argument("config and schedule sizes differ");
    if (static_cast<int>(final_layout.size()) != prog.n_logical || cfg.n_logical != prog.n_logical)
        throw std::invalid_argument("layout size differs from program");
    EquivalenceReport r;
    r.schedule_hash = hex64(fnv1a(serialize_schedule(sched)));
    r.program_hash = hex64(fnv1a(serialize_program(prog)));
    r.seed = seed;
    r.trials = trials;
    std::mt19937_64 rng(seed);
    double sum = 0;
    int n = prog.n_logical;
    uint64_t data_mask = 0;
    for (int s : final_layout) data_mask |= uint64_t{1} << (s - 1);
    for (int trial = 0; trial < trials; trial++) {
        std::vector<Qubit> data(n);
        for (auto &q : data) q = haar_qubit(rng);
        auto st = init_state(cfg, data, JunkMode::Config);
        run_schedule(st, sched);
        materialize_ledger(st, sched.ledger);

        std::vector<cd> ideal(size_t{1} << n);
        for (size_t i = 0; i < ideal.size(); i++) {
            cd a = 1;
            for (int q = 0; q < n; q++) a *= data[q][(i >> q) & 1];
            ideal[i] = a;
        }
        logical::apply_program(ideal, prog);

        double f;
        if (mode == CompareMode::Data) {
            auto rho = reduced_density(st, final_layout);
            Eigen::Map<Eigen::VectorXcd> psi(ideal.data(), ideal.size());
            f = std::real(psi.dot(rho * psi));
        } else {
            // Pads are expected back in their prepared states, carried along by the reversals.
            auto out_pads = reflections % 2 ? reflect_pads(cfg) : cfg;
            ChainState want(cfg.sites);
            for (size_t i = 0; i < want.amp.size(); i++) {
                size_t li = 0;
                cd pad = 1;
                for (int q = 0; q < n; q++) li |= ((i >> (final_layout[q] - 1)) & 1) << q;
                for (int s = 1; s <= cfg.sites; s++)
                    if (!((data_mask >> (s - 1)) & 1)) pad *= pad_qubit(out_pads.pad_state(s))[(i >> (s - 1)) & 1];
                want.amp[i] = ideal[li] * pad;
            }
            f = fidelity(want, st);
        }
        f = std::min(1.0, f);
        sum += f;
        if (f < r.min_fidelity || r.worst_trial < 0) {
            r.min_fidelity = f;
            r.worst_trial = trial;
            r.counterexample = data;
        }
    }
    r.mean_fidelity = trials ? sum / trials : 1.0;
    return r;
}

inline EquivalenceReport equivalence_check(const Compiled &c, const GateProgram &prog, const ChainConfig &cfg,
                                           uint64_t seed = 1, int trials = 16, CompareMode mode = CompareMode::Data) {
    return equivalence_check(c.schedule, c.manifest.final_layout, prog, cfg, seed, trials, mode,
                             c.manifest.reflections);
}

}  // namespace qwire
