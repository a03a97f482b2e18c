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

// qwire: compile, simulate, render and verify globally driven chain schedules.
// Exit codes: 0 success, 1 verification failure, 2 usage or input error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qwire/compiler.hpp"
#include "qwire/core.hpp"
#include "qwire/oracle.hpp"
#include "qwire/pauli.hpp"
#include "qwire/scheduler.hpp"
#include "qwire/statevector.hpp"
#include "qwire/verify.hpp"

using namespace qwire;

namespace {

constexpr int kOk = 0, kFail = 1, kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string &path) {
    if (path == "-") {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string &path, const std::string &text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path);
    out << text;
}

Decoupling parse_decoupling(const std::string &s) {
    if (s == "ideal") return Decoupling::Ideal;
    if (s == "pulsed") return Decoupling::Pulsed;
    throw UsageError("--decoupling must be ideal or pulsed");
}

ChainConfig make_config(const std::string &layout, int qubits, Decoupling d) {
    if (qubits < 1) throw UsageError("--qubits must be positive");
    ChainConfig c;
    if (layout == "padded")
        c = ChainConfig::padded(qubits);
    else if (layout == "alternating")
        c = ChainConfig::alternating(qubits);
    else if (layout == "dense")
        c = ChainConfig::dense(qubits);
    else
        throw UsageError("--layout must be padded, alternating or dense");
    c.decoupling = d;
    return c;
}

// "X@5" or "X@3,Z@4" on a chain of n sites.
PauliString parse_op_spec(const std::string &spec, int n) {
    PauliString p = PauliString::single(n, 0, Letter::I);
    std::stringstream ss(spec);
    std::string item;
    bool any = false;
    while (std::getline(ss, item, ',')) {
        auto at = item.find('@');
        if (at != 1) throw UsageError("op spec wants LETTER@SITE, got '" + item + "'");
        auto l = letter_from_char(item[0]);
        auto site = detail::parse_int(std::string_view(item).substr(2));
        if (!l || *l == Letter::I) throw UsageError("op letter must be X, Y or Z");
        if (!site || *site < 1 || *site > n) throw UsageError("op site out of range in '" + item + "'");
        p = p * PauliString::single(n, *site - 1, *l);
        any = true;
    }
    if (!any) throw UsageError("empty op spec");
    return p;
}

std::vector<int> parse_list(const std::string &s) {
    std::vector<int> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto x = detail::parse_int(item);
        if (!x) throw UsageError("bad integer list '" + s + "'");
        v.push_back(*x);
    }
    return v;
}

// Pulls final_layout and reflections out of a manifest file.
void read_manifest(const std::string &text, std::vector<int> &final_layout, int &reflections) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "qwire-manifest 1") throw UsageError("missing manifest header");
    while (std::getline(in, line)) {
        auto f = detail::split_ws(line);
        if (f.size() == 2 && f[0] == "final_layout") final_layout = parse_list(std::string(f[1]));
        if (f.size() == 2 && f[0] == "reflections") {
            auto r = detail::parse_int(f[1]);
            if (!r) throw UsageError("bad reflections record");
            reflections = *r;
        }
    }
}

PulseSchedule load_schedule(const std::string &path) {
    PulseSchedule s;
    try {
        s = parse_schedule(read_file(path));
    } catch (const ParseError &e) {
        throw UsageError(std::string("malformed schedule: ") + e.what());
    }
    auto errs = validate_schedule(s);
    if (!errs.empty()) throw UsageError("invalid schedule: " + errs.front());
    return s;
}

// ---------------------------------------------------------------------------

struct CompileArgs {
    std::string what;
    int sites = 7, qubits = 2;
    double theta = kPi;
    int control = 0, target = 1;
    std::string program, layout, decoupling = "ideal", out = "-", manifest;
    bool physical_z = false, bangbang = false;
};

int cmd_compile(const CompileArgs &a) {
    auto dec = parse_decoupling(a.decoupling);
    CompileOptions co;
    co.physical_z = a.physical_z;
    co.bangbang = a.bangbang;
    co.decoupling = dec;
    Compiled c;
    if (a.what == "transport" || a.what == "mirror") {
        if (a.sites < 2) throw UsageError("--sites must be at least 2");
        if (a.what == "transport") {
            c.schedule = compile_transport(a.sites, co);
            c.manifest.full_steps = a.sites - 1;
            c.manifest.initial_layout = {1};
            c.manifest.final_layout = {a.sites};
            c.manifest.notes.push_back("input |q +0+0...>, output at the far end");
        } else {
            c.schedule = compile_mirror(a.sites, co);
            c.manifest.full_steps = a.sites + 1;
            c.manifest.cycle_count = 1;
            c.manifest.reflections = 1;
        }
        c.manifest.sites = a.sites;
    } else {
        std::string layout = a.layout.empty() ? (a.what == "qft" ? "alternating" : "padded") : a.layout;
        GateProgram prog;
        if (a.what == "qft") {
            prog.n_logical = a.qubits;
            prog.ops.push_back(QFT{});
        } else if (!a.program.empty()) {
            try {
                prog = parse_program(read_file(a.program));
            } catch (const std::invalid_argument &e) {
                throw UsageError(std::string("bad program: ") + e.what());
            }
        } else {
            prog.n_logical = a.qubits;
            prog.ops.push_back(CPhase{a.control, a.target, a.theta});
        }
        auto pv = prog.violations();
        if (!pv.empty()) throw UsageError("bad program: " + pv.front());
        auto cfg = make_config(layout, prog.n_logical, dec);
        SchedulerOptions so;
        so.compile = co;
        try {
            c = compile_program(prog, cfg, so);
        } catch (const std::invalid_argument &e) {
            throw UsageError(e.what());
        }
    }
    if (dec == Decoupling::Pulsed && (a.what == "transport" || a.what == "mirror"))
        c.schedule = apply_decoupling_mode(c.schedule, dec);
    write_file(a.out, serialize_schedule(c.schedule));
    std::string mpath = a.manifest;
    if (mpath.empty() && a.out != "-") mpath = a.out + ".manifest";
    if (!mpath.empty()) write_file(mpath, c.manifest.str(c.schedule.ledger));
    return kOk;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string schedule, expect = "identity", program, manifest, layout = "padded", decoupling = "ideal";
    std::string state_in, state_out, report = "-";
    uint64_t seed = 1;
    int trials = 16;
};

std::vector<Qubit> random_product(int n, std::mt19937_64 &rng) {
    std::vector<Qubit> q(n);
    for (auto &x : q) x = haar_qubit(rng);
    return q;
}

ChainState reversed(const ChainState &s) {
    ChainState r(s.n);
    for (size_t i = 0; i < s.amp.size(); i++) {
        size_t j = 0;
        for (int b = 0; b < s.n; b++) j |= ((i >> b) & 1) << (s.n - 1 - b);
        r.amp[j] = s.amp[i];
    }
    return r;
}

int cmd_simulate(const SimulateArgs &a) {
    auto sched = load_schedule(a.schedule);
    int n = sched.sites;
    if (n > g_state_cap) throw UsageError("chain of " + std::to_string(n) + " sites exceeds statevector cap " +
                                          std::to_string(g_state_cap));
    std::string rep;
    bool pass = true;
    if (a.expect == "program") {
        if (a.program.empty()) throw UsageError("--expect program needs --program");
        GateProgram prog;
        try {
            prog = parse_program(read_file(a.program));
        } catch (const std::invalid_argument &e) {
            throw UsageError(std::string("bad program: ") + e.what());
        }
        auto cfg = make_config(a.layout, prog.n_logical, parse_decoupling(a.decoupling));
        if (cfg.sites != n) throw UsageError("layout size differs from schedule");
        std::vector<int> fl = cfg.layout;
        int refl = 0;
        if (!a.manifest.empty()) read_manifest(read_file(a.manifest), fl, refl);
        auto r = equivalence_check(sched, fl, prog, cfg, a.seed, a.trials, CompareMode::Data, refl);
        rep = r.str();
        pass = r.pass();
    } else {
        std::mt19937_64 rng(a.seed);
        ChainState in;
        std::vector<Qubit> q;
        if (!a.state_in.empty()) {
            in = import_state(read_file(a.state_in));
            if (in.n != n) throw UsageError("state size differs from schedule");
        } else if (a.expect == "transport") {
            q = random_product(1, rng);
            std::vector<Qubit> all(n);
            for (int s = 1; s <= n; s++) all[s - 1] = s == 1 ? q[0] : s % 2 == 0 ? ket_plus() : ket0();
            in = product_state(all);
        } else {
            in = product_state(random_product(n, rng));
        }
        ChainState st = in;
        run_schedule(st, sched);
        materialize_ledger(st, sched.ledger);
        double f;
        if (a.expect == "identity") {
            f = fidelity(in, st);
        } else if (a.expect == "mirror") {
            f = fidelity(reversed(in), st);
        } else if (a.expect == "transport") {
            if (q.empty()) throw UsageError("--expect transport builds its own input; drop --state-in");
            auto rho = reduced_density(st, {n});
            Eigen::Vector2cd psi(q[0][0], q[0][1]);
            f = std::real(psi.dot(rho * psi));
        } else {
            throw UsageError("--expect must be identity, mirror, transport or program");
        }
        pass = f >= 1 - 1e-9;
        rep = "qwire-simulate 1\n";
        rep += "schedule_hash " + hex64(fnv1a(serialize_schedule(sched))) + "\n";
        rep += "sites " + std::to_string(n) + "\n";
        rep += "seed " + std::to_string(a.seed) + "\n";
        rep += "expect " + a.expect + "\n";
        rep += "fidelity " + format_angle(std::min(1.0, f)) + "\n";
        rep += std::string("result ") + (pass ? "pass" : "fail") + "\n";
        rep += "end\n";
        if (!a.state_out.empty()) write_file(a.state_out, export_state(st));
    }
    write_file(a.report, rep);
    return pass ? kOk : kFail;
}

// ---------------------------------------------------------------------------

int cmd_diagram(const std::string &spec, int sites, int steps, const std::string &format, const std::string &out) {
    if (sites < 2) throw UsageError("--sites must be at least 2");
    if (steps < 0) steps = sites + 1;
    auto sp = spacetime_pattern(parse_op_spec(spec, sites), steps);
    if (format == "ascii")
        write_file(out, render_ascii(sp));
    else if (format == "svg")
        write_file(out, render_svg(sp));
    else
        throw UsageError("--format must be ascii or svg");
    return kOk;
}

int cmd_verify(const std::string &id, uint64_t seed, const std::string &self) {
    verify::Options o;
    o.seed = seed;
    o.self_path = self;
    std::vector<verify::ClaimResult> rs;
    if (id == "all") {
        rs = verify::run_all(o);
    } else {
        if (!verify::known_claim(id)) {
            std::string ids;
            for (auto &c : verify::claim_ids()) ids += " " + c;
            throw UsageError("unknown claim '" + id + "'; known:" + ids + " all");
        }
        rs.push_back(verify::run_claim(id, o));
    }
    std::cout << verify::format_table(rs);
    for (auto &r : rs)
        if (!r.pass) return kFail;
    return kOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"qwire: schedules for a globally driven Ising chain"};
    app.require_subcommand(1);

    CompileArgs ca;
    auto *compile = app.add_subcommand("compile", "Compile a schedule and its manifest");
    compile->add_option("what", ca.what, "transport | mirror | gates | qft")
        ->required()
        ->check(CLI::IsMember({"transport", "mirror", "gates", "qft"}));
    compile->add_option("--sites", ca.sites, "Chain length for transport and mirror")->capture_default_str();
    compile->add_option("--qubits", ca.qubits, "Logical qubits for gates and qft")->capture_default_str();
    compile->add_option("--program", ca.program, "Gate program file for gates");
    compile->add_option("--theta", ca.theta, "CZ[theta] angle when gates has no program")->capture_default_str();
    compile->add_option("--control", ca.control, "Control qubit when gates has no program")->capture_default_str();
    compile->add_option("--target", ca.target, "Target qubit when gates has no program")->capture_default_str();
    compile->add_option("--layout", ca.layout,
                        "padded | alternating | dense (default padded, alternating for qft)");
    compile->add_option("--decoupling", ca.decoupling, "ideal | pulsed")->capture_default_str();
    compile->add_flag("--physical-z", ca.physical_z, "Emit deferred z-rotations as pulses");
    compile->add_flag("--bangbang", ca.bangbang, "Use the bang-bang step composite");
    compile->add_option("-o,--output", ca.out, "Schedule file, - for stdout")->capture_default_str();
    compile->add_option("--manifest", ca.manifest, "Manifest file (default OUTPUT.manifest)");

    SimulateArgs sa;
    auto *simulate = app.add_subcommand("simulate", "Run a schedule on the statevector and report fidelity");
    simulate->add_option("schedule", sa.schedule, "Schedule file, - for stdin")->required();
    simulate->add_option("--expect", sa.expect, "identity | mirror | transport | program")->capture_default_str();
    simulate->add_option("--program", sa.program, "Gate program for --expect program");
    simulate->add_option("--manifest", sa.manifest, "Manifest giving final layout and reflections");
    simulate->add_option("--layout", sa.layout, "padded | alternating | dense")->capture_default_str();
    simulate->add_option("--decoupling", sa.decoupling, "ideal | pulsed")->capture_default_str();
    simulate->add_option("--seed", sa.seed, "Seed for random inputs")->capture_default_str();
    simulate->add_option("--trials", sa.trials, "Random inputs for --expect program")->capture_default_str();
    simulate->add_option("--state-in", sa.state_in, "Initial state file");
    simulate->add_option("--state-out", sa.state_out, "Write the final state here");
    simulate->add_option("--report", sa.report, "Report file, - for stdout")->capture_default_str();

    std::string spec, dformat = "ascii", dout = "-";
    int dsites = 7, dsteps = -1;
    auto *diagram = app.add_subcommand("diagram", "Render the space-time pattern of a Pauli operator");
    diagram->add_option("op", spec, "Operator, e.g. X@5 or X@3,Z@4")->required();
    diagram->add_option("--sites", dsites, "Chain length")->capture_default_str();
    diagram->add_option("--steps", dsteps, "Steps to render (default sites+1)");
    diagram->add_option("--format", dformat, "ascii | svg")->capture_default_str();
    diagram->add_option("-o,--output", dout, "Output file, - for stdout")->capture_default_str();

    std::string claim;
    uint64_t vseed = 20260101;
    auto *verify_cmd = app.add_subcommand("verify", "Run one claim check or all of them");
    verify_cmd->add_option("claim", claim, "Claim id or all")->required();
    verify_cmd->add_option("--seed", vseed, "Seed for the randomized checks")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*compile) return cmd_compile(ca);
        if (*simulate) return cmd_simulate(sa);
        if (*diagram) return cmd_diagram(spec, dsites, dsteps, dformat, dout);
        if (*verify_cmd) return cmd_verify(claim, vseed, argv[0]);
    } catch (const UsageError &e) {
        std::cerr << "qwire: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument &e) {
        std::cerr << "qwire: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception &e) {
        std::cerr << "qwire: " << e.what() << "\n";
        return kFail;
    }
    return kUsage;
}
