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

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwire/core.hpp"
#include "qwire/pauli.hpp"

namespace qwire {

struct CompileOptions {
    // Emit deferred z-rotations as pulses instead of ledger entries.
    bool physical_z = false;
    // Lower each H.CZ step with the bang-bang composite.
    bool bangbang = false;
    Decoupling decoupling = Decoupling::Ideal;
};

inline void require_chain(int n, int min = 2) {
    if (n < min) throw std::invalid_argument("chain size must be at least " + std::to_string(min));
}

inline Edge other_edge(Edge e) { return e == Edge::Left ? Edge::Right : Edge::Left; }

// CZ on every bond from U_Ising plus homogeneous and end z-rotations.
inline std::vector<PulseLayer> czbar_layers(int n, const std::string &tag = "czbar") {
    return {
        PulseLayer::ising(kPi / 4, 0, tag),
        PulseLayer::global_rz(-kPi / 2, tag),
        PulseLayer::local_rz(1, kPi / 4, tag),
        PulseLayer::local_rz(n, kPi / 4, tag),
    };
}

// H.CZ as Ising evolution then homogeneous R_y and end-only R_x.
inline std::vector<PulseLayer> bangbang_layers(int n, const std::string &tag = "bangbang") {
    return {
        PulseLayer::ising(kPi / 4, 0, tag),
        PulseLayer::global_ry(kPi / 4, tag),
        PulseLayer::local_rx(1, kPi / 4, tag),
        PulseLayer::local_rx(n, kPi / 4, tag),
    };
}

// The x-phases of the bang-bang composite: exp(i chi X) per site.
struct BangBangPhases {
    double chi_end;
    double chi_interior;
};

inline BangBangPhases bangbang_phases() { return {-kPi / 4, 0.0}; }

inline std::vector<PulseLayer> step_layers(int n, const CompileOptions &o = {}) {
    if (o.bangbang) return bangbang_layers(n, "step");
    auto ls = czbar_layers(n, "step");
    ls.push_back(PulseLayer::hbar(0, "step"));
    return ls;
}

// Inverse of one step, up to global phase: HBar then CZBar.
inline std::vector<PulseLayer> step_inverse_layers(int n) {
    std::vector<PulseLayer> ls{PulseLayer::hbar(0, "unstep")};
    for (auto &l : czbar_layers(n, "unstep")) ls.push_back(l);
    return ls;
}

inline PulseSchedule compile_czbar(int n) {
    require_chain(n);
    PulseSchedule s(n);
    s.append(czbar_layers(n));
    return s;
}

inline PulseSchedule compile_step_bangbang(int n) {
    require_chain(n);
    PulseSchedule s(n);
    s.append(bangbang_layers(n));
    return s;
}

inline PulseSchedule compile_step(int n, const CompileOptions &o = {}) {
    require_chain(n);
    PulseSchedule s(n);
    s.append(step_layers(n, o));
    return s;
}

// C-bar-Z . (H-bar . C-bar-Z)^{N-1}; the last C-bar-Z's z-rotations are
// deferred to the ledger unless physical_z is set.
inline PulseSchedule compile_transport(int n, const CompileOptions &o = {}) {
    require_chain(n);
    PulseSchedule s(n);
    for (int k = 0; k < n - 1; k++) {
        s.append(czbar_layers(n));
        s.add(PulseLayer::hbar(0, "hbar"));
    }
    if (o.physical_z) {
        s.append(czbar_layers(n));
        return s;
    }
    s.add(PulseLayer::ising(kPi / 4, 0, "czbar"));
    for (int site = 1; site <= n; site++) {
        double a = -kPi / 2;
        if (site == 1 || site == n) a += kPi / 4;
        s.ledger.pending_z.push_back({site, a});
    }
    return s;
}

inline PulseSchedule compile_mirror(int n, const CompileOptions &o = {}) {
    require_chain(n);
    PulseSchedule s(n);
    for (int k = 0; k <= n; k++) s.append(step_layers(n, o));
    return s;
}

// An edge pulse that realises a rotation at an impact point.
struct Insertion {
    int step;
    Edge edge;
    Letter pulse;
    double angle;
    std::string tag = "edge";
};

inline PulseLayer insertion_layer(const Insertion &in, int n) {
    if (in.pulse == Letter::Z) return PulseLayer::edge_rz(in.edge, in.angle, in.tag);
    if (in.pulse == Letter::X) return PulseLayer::local_rx(edge_site(in.edge, n), in.angle, in.tag);
    throw std::invalid_argument("edge insertions are Z or X pulses");
}

// One mirror cycle with edge insertions at the given step boundaries.
inline std::vector<PulseLayer> cycle_layers(int n, std::vector<Insertion> ins, const CompileOptions &o = {}) {
    std::stable_sort(ins.begin(), ins.end(), [](const Insertion &a, const Insertion &b) { return a.step < b.step; });
    std::vector<PulseLayer> out;
    size_t next = 0;
    for (int t = 0; t <= n + 1; t++) {
        while (next < ins.size() && ins[next].step == t) out.push_back(insertion_layer(ins[next++], n));
        if (t <= n) {
            auto st = step_layers(n, o);
            out.insert(out.end(), st.begin(), st.end());
        }
    }
    if (next != ins.size()) throw std::invalid_argument("insertion step outside the cycle");
    return out;
}

// Prefer a Z pulse; fall back to an X pulse with the same effect.
inline std::optional<ImpactPoint> first_z_impact(int a, int n, const PadPattern &padding) {
    auto pts = find_impact_points(a, n, padding);
    for (auto &p : pts)
        if (p.pulse == Letter::Z) return p;
    if (!pts.empty()) return pts.front();
    return std::nullopt;
}

// |+0+0...> to |++...>. The |0> sites take R_y(pi/4) through an H_y-framed
// mirror cycle with edge z-rotations at their impact points; the |+> sites
// are untouched up to H_y^2 = -iX, which fixes |+>.
inline PulseSchedule compile_plus_prep(int n, const CompileOptions &o = {}) {
    require_chain(n);
    PadPattern pad(n, Letter::I);
    for (int s = 1; s <= n; s += 2) pad[s - 1] = Letter::X;
    std::vector<Insertion> ins;
    for (int s = 2; s <= n; s += 2) {
        auto p = first_z_impact(s, n, pad);
        if (!p) throw std::runtime_error("no impact point for site " + std::to_string(s));
        ins.push_back({p->step, p->edge, p->pulse, p->sign * kPi / 4, "prep"});
    }
    PulseSchedule sch(n);
    sch.add(PulseLayer::hybar(0, "hy"));
    sch.append(cycle_layers(n, ins, o));
    sch.add(PulseLayer::hybar(0, "hy"));
    return sch;
}

// C-bar-Z with the end `e` frozen. The shortened wire picks up an extra
// R_z(-pi/4) on the site next to e, since that site is not addressable.
inline std::vector<PulseLayer> czd_layers(int n, Edge e, bool prime) {
    require_chain(n, 3);
    int es = edge_site(e, n), far = edge_site(other_edge(e), n);
    uint8_t d = dec_mask(e);
    if (!prime) {
        return {
            PulseLayer::ising(kPi / 4, d, "czd"),
            PulseLayer::global_rz(-kPi / 2, "czd"),
            PulseLayer::local_rz(far, kPi / 4, "czd"),
            PulseLayer::local_rz(es, kPi / 2, "czd"),
        };
    }
    return {
        PulseLayer::ising(3 * kPi / 4, d, "czd_inv"),
        PulseLayer::global_rz(kPi / 2, "czd_inv"),
        PulseLayer::local_rz(far, -kPi / 4, "czd_inv"),
        PulseLayer::local_rz(es, -kPi / 2, "czd_inv"),
    };
}

inline PulseSchedule compile_czd(int n, bool prime, Edge e = Edge::Right) {
    PulseSchedule s(n);
    s.append(czd_layers(n, e, prime));
    return s;
}

// Site and angle of the unwanted rotation left by czd_layers.
inline std::pair<int, double> czd_residual(int n, Edge e = Edge::Right) {
    return {e == Edge::Right ? n - 1 : 2, -kPi / 4};
}

// Rewrites ideal decoupling into explicit end-spin pulses: an R_x(pi/2)
// flip mid-way through the Ising evolution, and end-only pulses that undo
// homogeneous single-site layers on the frozen site.
inline PulseSchedule lower_pulsed(const PulseSchedule &in) {
    int n = in.sites;
    PulseSchedule out(n);
    out.ledger = in.ledger;
    auto ends = [&](uint8_t d) {
        std::vector<int> v;
        if (d & kDecLeft) v.push_back(1);
        if (d & kDecRight) v.push_back(n);
        return v;
    };
    std::vector<PulseLayer> raw;
    for (auto &l : in.layers) {
        if (!l.decoupled) {
            raw.push_back(l);
            continue;
        }
        auto es = ends(l.decoupled);
        switch (l.kind) {
            case LayerKind::IsingEvolve: {
                if (n == 2 && es.size() == 2) throw std::invalid_argument("cannot echo a bond between two frozen ends");
                raw.push_back(PulseLayer::ising(l.angle / 2, 0, l.tag));
                for (int s : es) raw.push_back(PulseLayer::local_rx(s, kPi / 2, "echo"));
                raw.push_back(PulseLayer::ising(l.angle / 2, 0, l.tag));
                for (int s : es) raw.push_back(PulseLayer::local_rx(s, kPi / 2, "echo"));
                break;
            }
            case LayerKind::HBar:
                raw.push_back(PulseLayer::hbar(0, l.tag));
                for (int s : es) {
                    raw.push_back(PulseLayer::local_rz(s, kPi / 4, "unh"));
                    raw.push_back(PulseLayer::local_rx(s, kPi / 4, "unh"));
                    raw.push_back(PulseLayer::local_rz(s, kPi / 4, "unh"));
                }
                break;
            case LayerKind::HyBar:
                raw.push_back(PulseLayer::hybar(0, l.tag));
                for (int s : es) raw.push_back(PulseLayer::local_rx(s, -kPi / 4, "unhy"));
                break;
            default:
                throw std::invalid_argument(std::string("no pulsed form for decoupled ") + kind_name(l.kind));
        }
    }
    // Adjacent full Ising layers merge into one timed evolution.
    for (auto &l : raw) {
        if (l.kind == LayerKind::IsingEvolve && !l.decoupled && !out.layers.empty()) {
            auto &b = out.layers.back();
            if (b.kind == LayerKind::IsingEvolve && !b.decoupled) {
                b.angle += l.angle;
                continue;
            }
        }
        out.layers.push_back(l);
    }
    return out;
}

inline PulseSchedule apply_decoupling_mode(PulseSchedule s, Decoupling d) {
    return d == Decoupling::Pulsed ? lower_pulsed(s) : s;
}

}  // namespace qwire
