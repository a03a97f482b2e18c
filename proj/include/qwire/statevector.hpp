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

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qwire/core.hpp"

namespace qwire {

using cd = std::complex<double>;
using Qubit = std::array<cd, 2>;
using UnitaryMatrix = Eigen::MatrixXcd;

inline int g_state_cap = 14;

// Site s (1-based) is bit s-1 of the basis index.
struct ChainState {
    int n = 0;
    std::vector<cd> amp;

    ChainState() = default;
    explicit ChainState(int sites) : n(sites) {
        if (sites < 1) throw std::invalid_argument("chain size must be positive");
        if (sites > g_state_cap) throw std::invalid_argument("chain size exceeds statevector cap");
        amp.assign(size_t{1} << sites, 0);
        amp[0] = 1;
    }

    double norm() const {
        double s = 0;
        for (auto &a : amp) s += std::norm(a);
        return std::sqrt(s);
    }
};

namespace gates {

using M2 = std::array<cd, 4>;  // row-major

inline M2 h() {
    double r = 1 / std::sqrt(2.0);
    return {r, r, r, -r};
}
inline M2 rx(double t) { return {std::cos(t), cd(0, -std::sin(t)), cd(0, -std::sin(t)), std::cos(t)}; }
inline M2 ry(double t) { return {std::cos(t), -std::sin(t), std::sin(t), std::cos(t)}; }
inline M2 rz(double t) { return {std::polar(1.0, -t), 0, 0, std::polar(1.0, t)}; }
inline M2 pauli(Letter l) {
    switch (l) {
        case Letter::X: return {0, 1, 1, 0};
        case Letter::Y: return {0, cd(0, -1), cd(0, 1), 0};
        case Letter::Z: return {1, 0, 0, -1};
        default: return {1, 0, 0, 1};
    }
}

}  // namespace gates

inline void apply_1q(ChainState &s, int site0, const gates::M2 &m) {
    size_t bit = size_t{1} << site0;
    size_t dim = s.amp.size();
    for (size_t i = 0; i < dim; i++) {
        if (i & bit) continue;
        cd a0 = s.amp[i], a1 = s.amp[i | bit];
        s.amp[i] = m[0] * a0 + m[1] * a1;
        s.amp[i | bit] = m[2] * a0 + m[3] * a1;
    }
}

namespace detail {

inline bool site_decoupled(int site1, int n, uint8_t dec) {
    return (site1 == 1 && (dec & kDecLeft)) || (site1 == n && (dec & kDecRight));
}

// Bit a set when bond (a+1, a+2) (1-based) is active.
inline uint64_t active_bonds(int n, uint8_t dec) {
    uint64_t m = 0;
    for (int a = 1; a < n; a++) {
        if (detail::site_decoupled(a, n, dec) || detail::site_decoupled(a + 1, n, dec)) continue;
        m |= uint64_t{1} << (a - 1);
    }
    return m;
}

}  // namespace detail

inline void apply_ising(ChainState &s, double phi, uint8_t dec) {
    uint64_t bonds = detail::active_bonds(s.n, dec);
    int nb = std::popcount(bonds);
    // sum' z_a z_b = nb - 2 * (#active bonds with differing bits)
    std::vector<cd> table(nb + 1);
    for (int d = 0; d <= nb; d++) table[d] = std::polar(1.0, -phi * (nb - 2 * d));
    for (size_t i = 0; i < s.amp.size(); i++) {
        uint64_t diff = (i ^ (i >> 1)) & bonds;
        s.amp[i] *= table[std::popcount(diff)];
    }
}

inline void apply_cz_chain(ChainState &s, uint8_t dec) {
    uint64_t bonds = detail::active_bonds(s.n, dec);
    for (size_t i = 0; i < s.amp.size(); i++) {
        uint64_t both = (i & (i >> 1)) & bonds;
        if (std::popcount(both) & 1) s.amp[i] = -s.amp[i];
    }
}

inline void apply_global_rz(ChainState &s, double t) {
    std::vector<cd> table(s.n + 1);
    for (int k = 0; k <= s.n; k++) table[k] = std::polar(1.0, -t * (s.n - 2 * k));
    for (size_t i = 0; i < s.amp.size(); i++) s.amp[i] *= table[std::popcount(static_cast<uint64_t>(i))];
}

inline void check_layer(const PulseLayer &l, int n) {
    if (kind_has_site(l.kind) && (l.site < 1 || l.site > n)) throw std::invalid_argument("site out of range");
    if (kind_has_angle(l.kind) && !std::isfinite(l.angle)) throw std::invalid_argument("angle not finite");
}

inline void apply_layer(ChainState &s, const PulseLayer &l) {
    check_layer(l, s.n);
    switch (l.kind) {
        case LayerKind::HBar:
            for (int k = 1; k <= s.n; k++)
                if (!detail::site_decoupled(k, s.n, l.decoupled)) apply_1q(s, k - 1, gates::h());
            break;
        case LayerKind::CZBar: apply_cz_chain(s, l.decoupled); break;
        case LayerKind::HyBar:
            for (int k = 1; k <= s.n; k++)
                if (!detail::site_decoupled(k, s.n, l.decoupled)) apply_1q(s, k - 1, gates::rx(kPi / 4));
            break;
        case LayerKind::IsingEvolve: apply_ising(s, l.angle, l.decoupled); break;
        case LayerKind::LocalRz: apply_1q(s, l.site - 1, gates::rz(l.angle)); break;
        case LayerKind::LocalRx: apply_1q(s, l.site - 1, gates::rx(l.angle)); break;
        case LayerKind::GlobalRz: apply_global_rz(s, l.angle); break;
        case LayerKind::GlobalRy:
            for (int k = 0; k < s.n; k++) apply_1q(s, k, gates::ry(l.angle));
            break;
        case LayerKind::EdgeRz: apply_1q(s, edge_site(l.edge, s.n) - 1, gates::rz(l.angle)); break;
    }
}

inline void run_schedule(ChainState &s, const PulseSchedule &sched) {
    if (sched.sites != s.n) throw std::invalid_argument("schedule size differs from state size");
    for (auto &l : sched.layers) apply_layer(s, l);
}

// Applies the deferred corrections: pending z-rotations, then the Pauli frame.
inline void materialize_ledger(ChainState &s, const FrameLedger &led) {
    for (auto &[site, a] : led.pending_z) apply_1q(s, site - 1, gates::rz(a));
    auto &pf = led.pauli_frame;
    if (pf.sites.empty()) return;
    if (static_cast<int>(pf.size()) != s.n) throw std::invalid_argument("pauli frame size mismatch");
    for (int k = 0; k < s.n; k++)
        if (pf.sites[k] != Letter::I) apply_1q(s, k, gates::pauli(pf.sites[k]));
}

inline cd inner(const ChainState &a, const ChainState &b) {
    if (a.n != b.n) throw std::invalid_argument("state size mismatch");
    cd s = 0;
    for (size_t i = 0; i < a.amp.size(); i++) s += std::conj(a.amp[i]) * b.amp[i];
    return s;
}

inline double fidelity(const ChainState &a, const ChainState &b) {
    double f = std::norm(inner(a, b));
    return std::min(1.0, f);
}

inline ChainState product_state(const std::vector<Qubit> &q) {
    int n = static_cast<int>(q.size());
    ChainState s(n);
    for (size_t i = 0; i < s.amp.size(); i++) {
        cd v = 1;
        for (int k = 0; k < n; k++) v *= q[k][(i >> k) & 1];
        s.amp[i] = v;
    }
    return s;
}

inline Qubit ket0() { return {1, 0}; }
inline Qubit ket1() { return {0, 1}; }
inline Qubit ket_plus() {
    double r = 1 / std::sqrt(2.0);
    return {r, r};
}

inline Qubit haar_qubit(std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    cd a(g(rng), g(rng)), b(g(rng), g(rng));
    double nrm = std::sqrt(std::norm(a) + std::norm(b));
    return {a / nrm, b / nrm};
}

inline Qubit pad_qubit(PadState p) { return p == PadState::Plus ? ket_plus() : ket0(); }

enum class JunkMode { Config, Plus, Zero, Random };

// Product state: data[k] at cfg.layout[k], junk elsewhere.
inline ChainState init_state(const ChainConfig &cfg, const std::vector<Qubit> &data, JunkMode junk,
                             std::mt19937_64 *rng = nullptr) {
    auto v = cfg.violations();
    if (!v.empty()) throw std::invalid_argument("bad chain config: " + v.front());
    if (data.size() != cfg.layout.size()) throw std::invalid_argument("data count differs from layout");
    std::vector<Qubit> q(cfg.sites);
    for (int s = 1; s <= cfg.sites; s++) {
        switch (junk) {
            case JunkMode::Config: q[s - 1] = pad_qubit(cfg.pad_state(s)); break;
            case JunkMode::Plus: q[s - 1] = ket_plus(); break;
            case JunkMode::Zero: q[s - 1] = ket0(); break;
            case JunkMode::Random:
                if (!rng) throw std::invalid_argument("random junk needs a generator");
                q[s - 1] = haar_qubit(*rng);
                break;
        }
    }
    for (size_t k = 0; k < data.size(); k++) q[cfg.layout[k] - 1] = data[k];
    return product_state(q);
}

// Reduced density matrix on the listed 1-based sites; index bit j <-> sites[j].
inline Eigen::MatrixXcd reduced_density(const ChainState &s, const std::vector<int> &sites) {
    int k = static_cast<int>(sites.size());
    size_t dk = size_t{1} << k;
    uint64_t keep = 0;
    for (int st : sites) keep |= uint64_t{1} << (st - 1);
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dk, dk);
    auto sub = [&](size_t i) {
        size_t r = 0;
        for (int j = 0; j < k; j++) r |= ((i >> (sites[j] - 1)) & 1) << j;
        return r;
    };
    // Group amplitudes by the traced-out configuration.
    size_t dim = s.amp.size();
    std::vector<size_t> rest_of(dim);
    for (size_t i = 0; i < dim; i++) rest_of[i] = i & ~keep;
    for (size_t i = 0; i < dim; i++) {
        if (s.amp[i] == cd(0)) continue;
        for (size_t sel = 0; sel < dk; sel++) {
            size_t j = rest_of[i];
            for (int b = 0; b < k; b++)
                if ((sel >> b) & 1) j |= size_t{1} << (sites[b] - 1);
            rho(sub(i), sel) += s.amp[i] * std::conj(s.amp[j]);
        }
    }
    return rho;
}

inline UnitaryMatrix schedule_unitary(const PulseSchedule &sched, int cap = 10) {
    if (sched.sites > cap) throw std::invalid_argument("schedule_unitary size cap exceeded");
    size_t dim = size_t{1} << sched.sites;
    UnitaryMatrix u(dim, dim);
    for (size_t j = 0; j < dim; j++) {
        ChainState s(sched.sites);
        s.amp[0] = 0;
        s.amp[j] = 1;
        run_schedule(s, sched);
        for (size_t i = 0; i < dim; i++) u(i, j) = s.amp[i];
    }
    return u;
}

// min over phi of ||a - e^{i phi} b||_F.
inline double phase_aligned_distance(const UnitaryMatrix &a, const UnitaryMatrix &b) {
    cd t = (b.adjoint() * a).trace();
    cd ph = std::abs(t) > 0 ? t / std::abs(t) : cd(1);
    return (a - ph * b).norm();
}

inline double unitarity_defect(const UnitaryMatrix &u) {
    return (u.adjoint() * u - UnitaryMatrix::Identity(u.rows(), u.cols())).norm();
}

// Text form: header, then one "index re im" record per nonzero amplitude.
inline std::string export_state(const ChainState &s) {
    std::string out = "qwire-state 1\nsites " + std::to_string(s.n) + "\n";
    for (size_t i = 0; i < s.amp.size(); i++) {
        if (s.amp[i] == cd(0)) continue;
        out += std::to_string(i) + " " + format_angle(s.amp[i].real()) + " " + format_angle(s.amp[i].imag()) + "\n";
    }
    out += "end\n";
    return out;
}

inline ChainState import_state(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "qwire-state 1") throw std::invalid_argument("missing state header");
    std::string word;
    int n = 0;
    if (!(in >> word >> n) || word != "sites") throw std::invalid_argument("missing sites record");
    ChainState s(n);
    s.amp[0] = 0;
    while (in >> word) {
        if (word == "end") return s;
        std::string re, im;
        in >> re >> im;
        auto idx = std::stoull(word);
        auto r = parse_angle(re), i = parse_angle(im);
        if (!r || !i || idx >= s.amp.size()) throw std::invalid_argument("bad amplitude record");
        s.amp[idx] = cd(*r, *i);
    }
    throw std::invalid_argument("missing end record");
}

}  // namespace qwire
