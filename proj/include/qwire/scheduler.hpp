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
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qwire/compiler.hpp"
#include "qwire/core.hpp"
#include "qwire/pauli.hpp"

namespace qwire {

// ---------------------------------------------------------------------------
// Logical programs.

struct LocalU {
    int qubit;
    double alpha, beta, gamma;  // R_z(alpha) R_y(beta) R_z(gamma)
};
struct CPhase {
    int control, target;
    double theta;
};
struct MultiCPhase {
    int control;
    std::vector<std::pair<int, double>> targets;
};
struct QFT {};

using GateOp = std::variant<LocalU, CPhase, MultiCPhase, QFT>;

struct GateProgram {
    int n_logical = 0;
    std::vector<GateOp> ops;

    std::vector<std::string> violations() const {
        std::vector<std::string> v;
        auto q_ok = [&](int q) { return q >= 0 && q < n_logical; };
        for (size_t k = 0; k < ops.size(); k++) {
            std::string at = "op " + std::to_string(k) + ": ";
            if (auto *u = std::get_if<LocalU>(&ops[k])) {
                if (!q_ok(u->qubit)) v.push_back(at + "qubit out of range");
                if (!std::isfinite(u->alpha) || !std::isfinite(u->beta) || !std::isfinite(u->gamma))
                    v.push_back(at + "angle not finite");
            } else if (auto *c = std::get_if<CPhase>(&ops[k])) {
                if (!q_ok(c->control) || !q_ok(c->target)) v.push_back(at + "qubit out of range");
                if (c->control == c->target) v.push_back(at + "control equals target");
                if (!std::isfinite(c->theta)) v.push_back(at + "theta not finite");
            } else if (auto *m = std::get_if<MultiCPhase>(&ops[k])) {
                if (!q_ok(m->control)) v.push_back(at + "qubit out of range");
                std::set<int> seen;
                for (auto &[t, th] : m->targets) {
                    if (!q_ok(t)) v.push_back(at + "qubit out of range");
                    if (t == m->control) v.push_back(at + "target equals control");
                    if (!seen.insert(t).second) v.push_back(at + "duplicate target");
                    if (!std::isfinite(th)) v.push_back(at + "theta not finite");
                }
                if (m->targets.empty()) v.push_back(at + "no targets");
            }
        }
        if (n_logical < 1) v.push_back("n_logical must be positive");
        return v;
    }
};

// Text form: "qubits N" then one op per line:
//   localu q alpha beta gamma | cphase c t theta | multi c t:theta ... | qft
inline std::string serialize_program(const GateProgram &p) {
    std::string out = "qubits " + std::to_string(p.n_logical) + "\n";
    for (auto &op : p.ops) {
        if (auto *u = std::get_if<LocalU>(&op)) {
            out += "localu " + std::to_string(u->qubit) + " " + format_angle(u->alpha) + " " + format_angle(u->beta) +
                   " " + format_angle(u->gamma) + "\n";
        } else if (auto *c = std::get_if<CPhase>(&op)) {
            out += "cphase " + std::to_string(c->control) + " " + std::to_string(c->target) + " " +
                   format_angle(c->theta) + "\n";
        } else if (auto *m = std::get_if<MultiCPhase>(&op)) {
            out += "multi " + std::to_string(m->control);
            for (auto &[t, th] : m->targets) out += " " + std::to_string(t) + ":" + format_angle(th);
            out += "\n";
        } else {
            out += "qft\n";
        }
    }
    return out;
}

inline GateProgram parse_program(const std::string &text) {
    GateProgram p;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool have_header = false;
    auto fail = [&](const std::string &m) {
        throw std::invalid_argument("program line " + std::to_string(lineno) + ": " + m);
    };
    auto num = [&](const std::string &s) {
        auto v = parse_angle(s);
        if (!v) fail("bad number '" + s + "'");
        return *v;
    };
    auto integer = [&](const std::string &s) {
        auto v = detail::parse_int(s);
        if (!v) fail("bad integer '" + s + "'");
        return *v;
    };
    while (std::getline(in, line)) {
        lineno++;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::vector<std::string> t;
        for (std::string w; ls >> w;) t.push_back(w);
        if (t.empty()) continue;
        if (!have_header) {
            if (t.size() != 2 || t[0] != "qubits") fail("expected 'qubits N'");
            p.n_logical = integer(t[1]);
            have_header = true;
            continue;
        }
        if (t[0] == "localu" && t.size() == 5) {
            p.ops.push_back(LocalU{integer(t[1]), num(t[2]), num(t[3]), num(t[4])});
        } else if (t[0] == "cphase" && t.size() == 4) {
            p.ops.push_back(CPhase{integer(t[1]), integer(t[2]), num(t[3])});
        } else if (t[0] == "multi" && t.size() >= 3) {
            MultiCPhase m{integer(t[1]), {}};
            for (size_t k = 2; k < t.size(); k++) {
                auto c = t[k].find(':');
                if (c == std::string::npos) fail("expected target:theta");
                m.targets.push_back({integer(t[k].substr(0, c)), num(t[k].substr(c + 1))});
            }
            p.ops.push_back(m);
        } else if (t[0] == "qft" && t.size() == 1) {
            p.ops.push_back(QFT{});
        } else {
            fail("unknown op '" + t[0] + "'");
        }
    }
    if (!have_header) throw std::invalid_argument("program: missing 'qubits N'");
    auto v = p.violations();
    if (!v.empty()) throw std::invalid_argument("program: " + v.front());
    return p;
}

// ---------------------------------------------------------------------------
// Compiled output.

struct Manifest {
    int sites = 0;
    // final_layout[k] = 1-based site holding logical qubit k afterwards.
    std::vector<int> initial_layout, final_layout;
    int cycle_count = 0;    // complete forward mirror cycles
    int full_steps = 0;     // forward H.CZ composites
    int reverse_steps = 0;  // inverse H.CZ composites
    int trapped_steps = 0;  // decoupled-end composites, forward and reverse
    int reflections = 0;    // net site reversals s -> N+1-s applied to the chain
    int cphase_formula = -1;
    int cphase_structural = -1;
    std::vector<std::string> notes;

    int step_equivalents() const { return full_steps + reverse_steps + trapped_steps; }

    std::string str(const FrameLedger &led) const {
        auto list = [](const std::vector<int> &v) {
            std::string s;
            for (size_t k = 0; k < v.size(); k++) s += (k ? "," : "") + std::to_string(v[k]);
            return s;
        };
        std::string out = "qwire-manifest 1\n";
        out += "sites " + std::to_string(sites) + "\n";
        out += "initial_layout " + list(initial_layout) + "\n";
        out += "final_layout " + list(final_layout) + "\n";
        out += "cycle_count " + std::to_string(cycle_count) + "\n";
        out += "full_steps " + std::to_string(full_steps) + "\n";
        out += "reverse_steps " + std::to_string(reverse_steps) + "\n";
        out += "trapped_steps " + std::to_string(trapped_steps) + "\n";
        out += "step_equivalents " + std::to_string(step_equivalents()) + "\n";
        out += "reflections " + std::to_string(reflections) + "\n";
        if (cphase_formula >= 0) out += "cphase_count_formula " + std::to_string(cphase_formula) + "\n";
        if (cphase_structural >= 0) out += "cphase_count_structural " + std::to_string(cphase_structural) + "\n";
        if (!(led.pauli_frame.is_identity_letters() && led.pauli_frame.phase == 0))
            out += "ledger_pauli_frame " + led.pauli_frame.str() + "\n";
        for (auto &[s, a] : led.pending_z) out += "ledger_pending_z " + std::to_string(s) + " " + format_angle(a) + "\n";
        for (auto &n : notes) out += "note " + n + "\n";
        out += "end\n";
        return out;
    }
};

struct Compiled {
    PulseSchedule schedule;
    Manifest manifest;
    // Per logical target: z-rotation left beyond CZ[theta] before any ledger entry.
    std::map<int, double> target_excess;
};

// What the ledger should turn the executed unitary into for a trapped CZ[theta].
enum class Residual {
    Net,  // R_z^t((pi - theta)/4) CZ[theta]
    Clean,     // CZ[theta]
    Raw,       // nothing ledgered
};

struct SchedulerOptions {
    CompileOptions compile;
    Residual residual = Residual::Net;
    // Append a fourth mirror cycle so three-cycle rotations end in place.
    bool restore_order = false;
    // Cancel the H_y Pauli frame with two more H_y layers instead of ledgering it.
    bool physical_frame = false;
};

// ---------------------------------------------------------------------------
// Trap protocol.

struct TrapWindow {
    int target_site0;
    int m;  // trapped steps before the interaction
    Edge side;
    int sign_c, sign_t;
    double theta;
    double excess;  // z-rotation left on the target beyond CZ[theta]
};

// mask holds kDecLeft and/or kDecRight; with both ends frozen the control
// sits at either end and each window uses the nearer side.
struct TrapPlan {
    uint8_t trap_mask = kDecLeft;
    int engage_step = 0;  // full steps before the trap engages
    int control_site0 = 0;
    std::vector<TrapWindow> windows;

    int m_max() const {
        int m = 0;
        for (auto &w : windows) m = std::max(m, w.m);
        return m;
    }
    int interact_step() const {
        int m = 1 << 30;
        for (auto &w : windows) m = std::min(m, w.m);
        return m;
    }
    int sandwich_cost() const { return 2 * (engage_step + m_max()); }
    bool both() const { return trap_mask == (kDecLeft | kDecRight); }
    std::string edges() const {
        if (both()) return "left+right";
        return trap_mask == kDecLeft ? "left" : "right";
    }
};

inline int neighbour_site(Edge e, int n) { return e == Edge::Left ? 2 : n - 1; }

inline std::vector<Edge> trap_edges(uint8_t mask) {
    std::vector<Edge> v;
    if (mask & kDecLeft) v.push_back(Edge::Left);
    if (mask & kDecRight) v.push_back(Edge::Right);
    return v;
}

// C-bar-Z with the masked ends frozen. With both frozen, neither end of the
// shortened wire is addressable, so both keep an extra R_z(-pi/4).
inline std::vector<PulseLayer> trap_czd_layers(int n, uint8_t mask, bool prime) {
    auto es = trap_edges(mask);
    if (es.size() == 1) return czd_layers(n, es[0], prime);
    require_chain(n, 4);
    double s = prime ? -1 : 1;
    std::string tag = prime ? "czd_inv" : "czd";
    return {
        PulseLayer::ising(prime ? 3 * kPi / 4 : kPi / 4, mask, tag),
        PulseLayer::global_rz(-s * kPi / 2, tag),
        PulseLayer::local_rz(1, s * kPi / 2, tag),
        PulseLayer::local_rz(n, s * kPi / 2, tag),
    };
}

// One step of the shortened wire: C-bar-Z with the trap frozen, then H on every other site.
// `fix` adds the homogeneous R_z(pi/4) that precedes an interaction.
inline std::vector<PulseLayer> trapped_step_layers(int n, uint8_t mask, bool fix) {
    auto ls = trap_czd_layers(n, mask, false);
    if (fix) {
        ls.push_back(PulseLayer::global_rz(kPi / 4, "fix"));
        for (Edge e : trap_edges(mask)) ls.push_back(PulseLayer::local_rz(edge_site(e, n), -kPi / 4, "fix"));
    }
    ls.push_back(PulseLayer::hbar(mask, "hd"));
    return ls;
}

inline std::vector<PulseLayer> trapped_unstep_layers(int n, uint8_t mask) {
    std::vector<PulseLayer> ls{PulseLayer::hbar(mask, "hd")};
    for (auto &l : trap_czd_layers(n, mask, true)) ls.push_back(l);
    return ls;
}

inline std::vector<PulseLayer> unfix_layers(int n, uint8_t mask) {
    std::vector<PulseLayer> ls{PulseLayer::hbar(mask, "hd"), PulseLayer::global_rz(-kPi / 4, "unfix")};
    for (Edge e : trap_edges(mask)) ls.push_back(PulseLayer::local_rz(edge_site(e, n), kPi / 4, "unfix"));
    ls.push_back(PulseLayer::hbar(mask, "hd"));
    return ls;
}

// Ising evolution only runs forward; exp(-i pi ZZ) is a global sign.
inline double ising_time(double a) {
    a = std::fmod(a, kPi);
    return a < 0 ? a + kPi : a;
}

// Window angles: the end-bond lift phi and the control's own z-rotation.
inline std::pair<double, double> window_angles(const TrapWindow &w) {
    double phi = -w.theta * w.sign_c * w.sign_t / 4;
    double ctrl = w.sign_c * w.theta / 4;
    return {phi, ctrl};
}

// Each window lifts its end bond for phi while the shortened wire runs to a
// fixed total: pi/2 with one trapped end (the free end's Z is cancelled
// locally and the other end's Z lands on the target), pi with two.
inline std::vector<PulseLayer> window_layers(int n, uint8_t mask, const std::vector<const TrapWindow *> &ws) {
    bool both = mask == (kDecLeft | kDecRight);
    double total = both ? kPi : kPi / 2, used = 0;
    std::vector<PulseLayer> ls;
    for (auto *w : ws) {
        double phi = window_angles(*w).first;
        ls.push_back(PulseLayer::ising(ising_time(phi), mask & ~dec_mask(w->side), "window"));
        used += phi;
    }
    ls.push_back(PulseLayer::ising(ising_time(total - used), mask, "window"));
    if (!both) ls.push_back(PulseLayer::local_rz(edge_site(other_edge(trap_edges(mask)[0]), n), kPi / 2, "window"));
    for (auto *w : ws) ls.push_back(PulseLayer::local_rz(edge_site(w->side, n), window_angles(*w).second, "window"));
    return ls;
}

inline void conjugate_back(PackedPauli &p, const std::vector<PulseLayer> &ls) {
    for (auto it = ls.rbegin(); it != ls.rend(); ++it) p.conjugate(*it, true);
}

// The pattern at the site next to `side` after m trapped steps, pulled back
// to the start of the pass.
inline PackedPauli trapped_pullback(int n, uint8_t mask, Edge side, int k, int m) {
    auto p = PackedPauli::single(n, neighbour_site(side, n) - 1, Letter::Z);
    conjugate_back(p, trapped_step_layers(n, mask, true));
    auto plain = trapped_step_layers(n, mask, false);
    for (int i = 1; i < m; i++) conjugate_back(p, plain);
    for (int i = 0; i < k; i++) p.step_inverse();
    return p;
}

// What a window leaves on the target beyond CZ[theta].
inline double window_target_excess(double theta, bool both_ends = false) {
    return both_ends ? -theta / 4 : kPi / 2 - theta / 4;
}

// Every feasible trap for `control_site0` reaching all targets, cheapest first.
inline std::vector<TrapPlan> find_trap_plans(int n, const PadPattern &padding, int control_site0,
                                             const std::vector<std::pair<int, double>> &targets, int k_min = 0,
                                             int k_max = -1) {
    require_chain(n, 3);
    if (k_max < 0) k_max = n + 1;
    int m_limit = 2 * (n + 1);
    std::vector<uint8_t> masks{kDecLeft, kDecRight};
    if (n >= 4) masks.push_back(kDecLeft | kDecRight);
    std::vector<TrapPlan> out;
    for (int k = k_min; k <= k_max; k++) {
        for (uint8_t mask : masks) {
            std::map<Edge, int> sign;
            for (Edge e : trap_edges(mask)) {
                auto r = reduce_mod_padding(pull_back_edge(n, k, e, Letter::Z), padding);
                if (!r || r->site0 != control_site0 || r->letter != Letter::Z) break;
                sign[e] = r->sign;
            }
            if (sign.size() != trap_edges(mask).size()) continue;
            bool both = sign.size() == 2;
            TrapPlan plan{mask, k, control_site0, {}};
            bool ok = true;
            for (auto &[t, th] : targets) {
                bool found = false;
                for (int m = 1; m <= m_limit && !found; m++) {
                    for (auto &[e, sc] : sign) {
                        auto q = reduce_mod_padding(trapped_pullback(n, mask, e, k, m), padding);
                        if (q && q->site0 == t && q->letter == Letter::Z) {
                            plan.windows.push_back({t, m, e, sc, q->sign, th, window_target_excess(th, both)});
                            found = true;
                            break;
                        }
                    }
                }
                if (!found) {
                    ok = false;
                    break;
                }
            }
            if (ok) out.push_back(plan);
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const TrapPlan &a, const TrapPlan &b) {
        if (a.sandwich_cost() != b.sandwich_cost()) return a.sandwich_cost() < b.sandwich_cost();
        return a.m_max() < b.m_max();
    });
    return out;
}

// Trapped excursion: walk the shortened wire, interact at each window, walk back.
inline std::vector<PulseLayer> excursion_layers(int n, const TrapPlan &plan, bool with_windows = true) {
    uint8_t mask = plan.trap_mask;
    std::vector<PulseLayer> out;
    int mm = plan.m_max();
    for (int i = 1; i <= mm; i++) {
        std::vector<const TrapWindow *> ws;
        for (auto &x : plan.windows)
            if (x.m == i) ws.push_back(&x);
        auto st = trapped_step_layers(n, mask, !ws.empty());
        out.insert(out.end(), st.begin(), st.end());
        if (!ws.empty()) {
            if (with_windows) {
                auto wl = window_layers(n, mask, ws);
                out.insert(out.end(), wl.begin(), wl.end());
            }
            auto uf = unfix_layers(n, mask);
            out.insert(out.end(), uf.begin(), uf.end());
        }
    }
    for (int i = mm; i >= 1; i--) {
        auto us = trapped_unstep_layers(n, mask);
        out.insert(out.end(), us.begin(), us.end());
    }
    return out;
}

namespace detail {

inline PadPattern mirrored(const PadPattern &m) { return {m.rbegin(), m.rend()}; }

inline int site0_of(const ChainConfig &cfg, int q) { return cfg.layout.at(q) - 1; }

inline void finish(Compiled &c, const ChainConfig &cfg) {
    if (cfg.decoupling == Decoupling::Pulsed) {
        auto s = lower_pulsed(c.schedule);
        c.schedule = std::move(s);
    }
}

inline void add_residual_ledger(FrameLedger &led, int site, double theta, double excess, Residual mode) {
    if (mode == Residual::Raw) return;
    // executed = CZ . R_z^t(excess)
    double want = mode == Residual::Net ? (kPi - theta) / 4 : 0.0;
    led.pending_z.push_back({site, want - excess});
}

}  // namespace detail

// Forward full steps, trapped excursion, then the full steps undone.
inline std::vector<PulseLayer> sandwich_layers(int n, const TrapPlan &plan, bool with_windows = true) {
    std::vector<PulseLayer> out;
    for (int i = 0; i < plan.engage_step; i++) {
        auto st = step_layers(n);
        out.insert(out.end(), st.begin(), st.end());
    }
    auto ex = excursion_layers(n, plan, with_windows);
    out.insert(out.end(), ex.begin(), ex.end());
    for (int i = 0; i < plan.engage_step; i++) {
        auto st = step_inverse_layers(n);
        out.insert(out.end(), st.begin(), st.end());
    }
    return out;
}

inline Compiled schedule_multi_target(int control, const std::vector<std::pair<int, double>> &targets,
                                      const ChainConfig &cfg, const SchedulerOptions &opt = {}) {
    auto cv = cfg.violations();
    if (!cv.empty()) throw std::invalid_argument("bad chain config: " + cv.front());
    int n = cfg.sites;
    require_chain(n, 3);
    std::set<int> seen;
    std::vector<std::pair<int, double>> tsites;
    for (auto &[t, th] : targets) {
        if (t == control) throw std::invalid_argument("target equals control");
        if (!seen.insert(t).second) throw std::invalid_argument("duplicate target");
        if (!std::isfinite(th)) throw std::invalid_argument("theta not finite");
        tsites.push_back({detail::site0_of(cfg, t), th});
    }
    auto plans = find_trap_plans(n, cfg.pad_letters(), detail::site0_of(cfg, control), tsites);
    if (plans.empty()) throw std::runtime_error("no trap engagement reaches every target within one cycle");
    auto &plan = plans.front();
    Compiled c;
    c.schedule = PulseSchedule(n);
    c.schedule.append(sandwich_layers(n, plan));
    for (auto &[t, th] : targets) {
        double ex = 0;
        for (auto &w : plan.windows)
            if (w.target_site0 == detail::site0_of(cfg, t)) ex = w.excess;
        c.target_excess[t] = ex;
        detail::add_residual_ledger(c.schedule.ledger, cfg.layout[t], th, ex, opt.residual);
    }
    auto &m = c.manifest;
    m.sites = n;
    m.initial_layout = m.final_layout = cfg.layout;
    m.full_steps = m.reverse_steps = plan.engage_step;
    m.trapped_steps = 2 * plan.m_max();
    m.notes.push_back("trap edge=" + plan.edges() +
                      " engage_step=" + std::to_string(plan.engage_step) +
                      " m_max=" + std::to_string(plan.m_max()));
    detail::finish(c, cfg);
    return c;
}

inline Compiled schedule_cphase(int control, int target, double theta, const ChainConfig &cfg,
                                const SchedulerOptions &opt = {}) {
    return schedule_multi_target(control, {{target, theta}}, cfg, opt);
}

// ---------------------------------------------------------------------------
// Single-qubit rotations over three mirror cycles.

inline Compiled schedule_local_rotations(const std::vector<std::array<double, 3>> &assign, const ChainConfig &cfg,
                                         const SchedulerOptions &opt = {}) {
    auto cv = cfg.violations();
    if (!cv.empty()) throw std::invalid_argument("bad chain config: " + cv.front());
    if (static_cast<int>(assign.size()) != cfg.n_logical) throw std::invalid_argument("one (alpha, beta, gamma) per qubit");
    int n = cfg.sites;
    auto pad = cfg.pad_letters();
    std::vector<int> pos = cfg.layout;
    Compiled c;
    c.schedule = PulseSchedule(n);
    // Cycle angles: gamma, beta, then -alpha; the H_y frame flips the last one.
    for (int cyc = 0; cyc < 3; cyc++) {
        std::vector<Insertion> ins;
        for (int q = 0; q < cfg.n_logical; q++) {
            double a = cyc == 0 ? assign[q][2] : cyc == 1 ? assign[q][1] : -assign[q][0];
            if (a == 0) continue;
            auto p = first_z_impact(pos[q], n, pad);
            if (!p) throw std::runtime_error("no impact point for logical qubit " + std::to_string(q));
            ins.push_back({p->step, p->edge, p->pulse, p->sign * a, "rot"});
        }
        c.schedule.append(cycle_layers(n, ins, opt.compile));
        for (auto &s : pos) s = n + 1 - s;
        pad = detail::mirrored(pad);
        if (cyc < 2) c.schedule.add(PulseLayer::hybar(0, "hy"));
    }
    int cycles = 3;
    if (opt.restore_order) {
        c.schedule.append(cycle_layers(n, {}, opt.compile));
        for (auto &s : pos) s = n + 1 - s;
        cycles = 4;
    }
    if (opt.physical_frame) {
        c.schedule.add(PulseLayer::hybar(0, "frame"));
        c.schedule.add(PulseLayer::hybar(0, "frame"));
    } else {
        c.schedule.ledger.pauli_frame = PauliString(n);
        for (auto &l : c.schedule.ledger.pauli_frame.sites) l = Letter::X;
    }
    auto &m = c.manifest;
    m.sites = n;
    m.initial_layout = cfg.layout;
    m.final_layout = pos;
    m.cycle_count = cycles;
    m.reflections = cycles;
    m.full_steps = cycles * (n + 1);
    detail::finish(c, cfg);
    return c;
}

// ---------------------------------------------------------------------------
// Quantum Fourier transform.

struct PointAt {
    int step;
    Edge edge;
    Letter pulse, effect;
    int sign;
};

// Every edge pulse (Z or X) at steps [t0, t1] that acts as a single-axis
// rotation of the qubit sitting at `site` when the cycle starts.
inline std::vector<PointAt> all_points(int site, int n, const PadPattern &pad, int t0, int t1) {
    std::vector<PointAt> out;
    for (auto &p : find_impact_points(site, n, pad, {Letter::Z, Letter::X}, {Letter::Z, Letter::X}))
        if (p.step >= t0 && p.step <= t1) out.push_back({p.step, p.edge, p.pulse, p.effect, p.sign});
    std::stable_sort(out.begin(), out.end(), [](const PointAt &a, const PointAt &b) { return a.step < b.step; });
    return out;
}

// H ~ R_z(pi/4) R_x(pi/4) R_z(pi/4) as three time-ordered impact insertions;
// `pre_z` is folded into the first z-rotation.
inline std::optional<std::vector<Insertion>> hadamard_insertions(int site, int n, const PadPattern &pad,
                                                                 int t0, int t1, double pre_z) {
    auto pts = all_points(site, n, pad, t0, t1);
    const Letter want[3] = {Letter::Z, Letter::X, Letter::Z};
    std::optional<std::array<size_t, 3>> best;
    for (size_t a = 0; a < pts.size(); a++) {
        if (pts[a].effect != want[0]) continue;
        for (size_t b = 0; b < pts.size(); b++) {
            if (b == a || pts[b].effect != want[1] || pts[b].step < pts[a].step) continue;
            for (size_t c = 0; c < pts.size(); c++) {
                if (pts[c].effect != want[2] || pts[c].step < pts[b].step) continue;
                if (!best || pts[c].step < pts[(*best)[2]].step) best = std::array<size_t, 3>{a, b, c};
            }
        }
    }
    if (!best) return std::nullopt;
    double ang[3] = {kPi / 4 + pre_z, kPi / 4, kPi / 4};
    std::vector<Insertion> out;
    for (int j = 0; j < 3; j++) {
        auto &p = pts[(*best)[j]];
        out.push_back({p.step, p.edge, p.pulse, p.sign * ang[j], "had"});
    }
    return out;
}

// One mirror cycle whose boundary `k` hosts a trapped excursion.
inline std::vector<PulseLayer> cycle_with_excursion(int n, const std::vector<Insertion> &pre, int k,
                                                    const std::vector<PulseLayer> &excursion,
                                                    const std::vector<Insertion> &post, const CompileOptions &o) {
    std::vector<PulseLayer> out;
    for (int t = 0; t <= n + 1; t++) {
        for (auto &in : pre)
            if (in.step == t) out.push_back(insertion_layer(in, n));
        if (t == k) out.insert(out.end(), excursion.begin(), excursion.end());
        for (auto &in : post)
            if (in.step == t) out.push_back(insertion_layer(in, n));
        if (t <= n) {
            auto st = step_layers(n, o);
            out.insert(out.end(), st.begin(), st.end());
        }
    }
    return out;
}

// `pending` holds per-logical-qubit z-rotations still owed before the qubit's
// Hadamard (target = R_z(pending) . executed); it is consumed.
inline Compiled compile_qft(int n_logical, const ChainConfig &cfg, const SchedulerOptions &opt = {},
                            std::vector<double> pending = {}) {
    if (n_logical < 2) throw std::invalid_argument("QFT needs at least two qubits");
    if (cfg.n_logical != n_logical) throw std::invalid_argument("config size differs from n_logical");
    auto cv = cfg.violations();
    if (!cv.empty()) throw std::invalid_argument("bad chain config: " + cv.front());
    int n = cfg.sites;
    require_chain(n, 3);
    if (pending.empty()) pending.assign(n_logical, 0.0);
    // Network qubit x carries input bit weight 2^{n-1-x}, i.e. logical qubit n-1-x.
    std::vector<int> pos(n_logical);
    std::vector<double> owed(n_logical);
    for (int x = 0; x < n_logical; x++) {
        pos[x] = cfg.layout[n_logical - 1 - x] - 1;
        owed[x] = pending[n_logical - 1 - x];
    }
    auto pad = cfg.pad_letters();
    Compiled c;
    c.schedule = PulseSchedule(n);
    auto &man = c.manifest;
    for (int x = 0; x + 1 < n_logical; x++) {
        std::vector<std::pair<int, double>> tg;
        for (int y = x + 1; y < n_logical; y++) tg.push_back({pos[y], kPi / std::pow(2.0, y - x)});
        auto plans = find_trap_plans(n, pad, pos[x], tg);
        std::stable_sort(plans.begin(), plans.end(), [](const TrapPlan &a, const TrapPlan &b) {
            return a.m_max() < b.m_max() || (a.m_max() == b.m_max() && a.engage_step < b.engage_step);
        });
        bool placed = false;
        for (auto &plan : plans) {
            int k = plan.engage_step;
            std::vector<Insertion> pre;
            if (x == 0) {
                auto h0 = hadamard_insertions(pos[0] + 1, n, pad, 0, k, owed[0]);
                if (!h0) continue;
                pre = *h0;
            }
            double excess_next = owed[x + 1];
            for (auto &w : plan.windows)
                if (w.target_site0 == pos[x + 1]) excess_next -= w.excess;
            auto h1 = hadamard_insertions(pos[x + 1] + 1, n, pad, k, n + 1, excess_next);
            if (!h1) continue;
            c.schedule.append(cycle_with_excursion(n, pre, k, excursion_layers(n, plan), *h1, opt.compile));
            for (auto &w : plan.windows)
                for (int y = x + 2; y < n_logical; y++)
                    if (w.target_site0 == pos[y]) owed[y] -= w.excess;
            owed[x + 1] = 0;
            man.trapped_steps += 2 * plan.m_max();
            man.notes.push_back("pass " + std::to_string(x) + ": trap edge=" + plan.edges() +
                                " engage_step=" + std::to_string(k) + " m_max=" + std::to_string(plan.m_max()));
            placed = true;
            break;
        }
        if (!placed) throw std::runtime_error("no trap and Hadamard placement for QFT pass " + std::to_string(x));
        for (auto &p : pos) p = n - 1 - p;
        pad = detail::mirrored(pad);
    }
    man.sites = n;
    man.initial_layout = cfg.layout;
    // Output bit of weight 2^L ends on network qubit L.
    man.final_layout.resize(n_logical);
    for (int l = 0; l < n_logical; l++) man.final_layout[l] = pos[l] + 1;
    man.cycle_count = n_logical - 1;
    man.reflections = n_logical - 1;
    man.full_steps = (n_logical - 1) * (n + 1);
    man.cphase_formula = (n_logical - 2) * (n_logical - 1) / 2;
    man.cphase_structural = n_logical * (n_logical - 1) / 2;
    if (man.cphase_formula != man.cphase_structural)
        man.notes.push_back("cphase count: printed formula gives " + std::to_string(man.cphase_formula) +
                            ", pass structure gives " + std::to_string(man.cphase_structural));
    detail::finish(c, cfg);
    return c;
}

// Padding after an odd number of reversals; the layout is left alone.
inline ChainConfig reflect_pads(ChainConfig c) {
    for (auto &[s, p] : c.pad_overrides) s = c.sites + 1 - s;
    return c;
}

// ---------------------------------------------------------------------------
// Whole programs: ops lowered in order, layout and owed z-rotations carried along.

inline Compiled compile_program(const GateProgram &prog, const ChainConfig &cfg, const SchedulerOptions &opt = {}) {
    auto v = prog.violations();
    if (!v.empty()) throw std::invalid_argument("program: " + v.front());
    if (cfg.n_logical != prog.n_logical) throw std::invalid_argument("config size differs from program");
    int n = cfg.sites;
    ChainConfig cur = cfg;
    cur.decoupling = Decoupling::Ideal;
    std::vector<double> owed(prog.n_logical, 0.0);
    Compiled out;
    out.schedule = PulseSchedule(n);
    auto &man = out.manifest;
    man.sites = n;
    man.initial_layout = cfg.layout;
    auto absorb = [&](const Compiled &c) {
        out.schedule.append(c.schedule.layers);
        man.cycle_count += c.manifest.cycle_count;
        man.full_steps += c.manifest.full_steps;
        man.reverse_steps += c.manifest.reverse_steps;
        man.trapped_steps += c.manifest.trapped_steps;
        man.reflections += c.manifest.reflections;
        cur.layout = c.manifest.final_layout;
        if (c.manifest.reflections % 2) cur = reflect_pads(cur);
    };
    SchedulerOptions inner = opt;
    inner.physical_frame = true;
    inner.restore_order = false;
    inner.residual = Residual::Raw;
    size_t k = 0;
    while (k < prog.ops.size()) {
        if (std::holds_alternative<LocalU>(prog.ops[k])) {
            // Batch consecutive rotations on distinct qubits into one block.
            std::vector<std::array<double, 3>> a(prog.n_logical, {0, 0, 0});
            std::vector<bool> used(prog.n_logical, false);
            while (k < prog.ops.size() && std::holds_alternative<LocalU>(prog.ops[k])) {
                auto &u = std::get<LocalU>(prog.ops[k]);
                if (used[u.qubit]) break;
                used[u.qubit] = true;
                a[u.qubit] = {u.alpha, u.beta, u.gamma + owed[u.qubit]};
                owed[u.qubit] = 0;
                k++;
            }
            absorb(schedule_local_rotations(a, cur, inner));
            continue;
        }
        if (auto *cp = std::get_if<CPhase>(&prog.ops[k])) {
            auto c = schedule_multi_target(cp->control, {{cp->target, cp->theta}}, cur, inner);
            for (auto &[t, ex] : c.target_excess) owed[t] -= ex;
            absorb(c);
        } else if (auto *mc = std::get_if<MultiCPhase>(&prog.ops[k])) {
            auto c = schedule_multi_target(mc->control, mc->targets, cur, inner);
            for (auto &[t, ex] : c.target_excess) owed[t] -= ex;
            absorb(c);
        } else {
            auto q = compile_qft(prog.n_logical, cur, inner, owed);
            // The QFT consumes every owed rotation before its Hadamards.
            std::fill(owed.begin(), owed.end(), 0.0);
            absorb(q);
        }
        k++;
    }
    for (int q = 0; q < prog.n_logical; q++)
        if (owed[q] != 0) out.schedule.ledger.pending_z.push_back({cur.layout[q], owed[q]});
    man.final_layout = cur.layout;
    detail::finish(out, cfg);
    return out;
}

}  // namespace qwire
