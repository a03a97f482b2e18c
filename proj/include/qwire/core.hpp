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

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qwire {

inline constexpr double kPi = std::numbers::pi;

// Rotation convention used everywhere: R_P(theta) = exp(-i theta P).

// Letter encoding is the symplectic pair: bit 0 = x, bit 1 = z.
enum class Letter : uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

inline char letter_char(Letter l) { return "IXZY"[static_cast<int>(l)]; }

inline std::optional<Letter> letter_from_char(char c) {
    switch (c) {
        case 'I': case '.': case '_': return Letter::I;
        case 'X': return Letter::X;
        case 'Y': return Letter::Y;
        case 'Z': return Letter::Z;
        default: return std::nullopt;
    }
}

// phase counts powers of i: 0 -> +1, 1 -> +i, 2 -> -1, 3 -> -i.
struct PauliString {
    std::vector<Letter> sites;
    int phase = 0;

    PauliString() = default;
    explicit PauliString(size_t n) : sites(n, Letter::I) {}

    static PauliString single(size_t n, size_t site0, Letter l) {
        PauliString p(n);
        p.sites.at(site0) = l;
        return p;
    }

    // Accepts "+XIZ", "-iYY", "XZ".
    static PauliString parse(std::string_view s) {
        PauliString p;
        size_t k = 0;
        int ph = 0;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) {
            ph = s[k] == '-' ? 2 : 0;
            k++;
            if (k < s.size() && s[k] == 'i') {
                ph += 1;
                k++;
            }
        }
        for (; k < s.size(); k++) {
            auto l = letter_from_char(s[k]);
            if (!l) throw std::invalid_argument("bad pauli letter '" + std::string(1, s[k]) + "'");
            p.sites.push_back(*l);
        }
        p.phase = ph & 3;
        return p;
    }

    size_t size() const { return sites.size(); }

    size_t weight() const {
        size_t w = 0;
        for (auto l : sites) w += l != Letter::I;
        return w;
    }

    bool is_identity_letters() const { return weight() == 0; }

    std::string str() const {
        static const char *ph[] = {"+", "+i", "-", "-i"};
        std::string out = ph[phase & 3];
        for (auto l : sites) out += letter_char(l);
        return out;
    }

    bool operator==(const PauliString &o) const { return phase == o.phase && sites == o.sites; }
};

// Letter product a*b = i^k c, returns (c, k).
inline std::pair<Letter, int> letter_mul(Letter a, Letter b) {
    if (a == Letter::I) return {b, 0};
    if (b == Letter::I) return {a, 0};
    if (a == b) return {Letter::I, 0};
    // XY = iZ, YZ = iX, ZX = iY; reversed order gives -i.
    auto idx = [](Letter l) { return l == Letter::X ? 0 : l == Letter::Y ? 1 : 2; };
    int ia = idx(a), ib = idx(b);
    static const Letter order[] = {Letter::X, Letter::Y, Letter::Z};
    Letter c = order[3 - ia - ib];
    return {c, ((ib - ia + 3) % 3 == 1) ? 1 : 3};
}

inline PauliString operator*(const PauliString &a, const PauliString &b) {
    if (a.size() != b.size()) throw std::invalid_argument("pauli length mismatch");
    PauliString out(a.size());
    int ph = a.phase + b.phase;
    for (size_t k = 0; k < a.size(); k++) {
        auto [c, d] = letter_mul(a.sites[k], b.sites[k]);
        out.sites[k] = c;
        ph += d;
    }
    out.phase = ph & 3;
    return out;
}

enum class Edge : uint8_t { Left, Right };

inline const char *edge_name(Edge e) { return e == Edge::Left ? "left" : "right"; }

inline int edge_site(Edge e, int n) { return e == Edge::Left ? 1 : n; }

enum class LayerKind : uint8_t {
    HBar,
    CZBar,
    HyBar,
    IsingEvolve,
    LocalRz,
    LocalRx,
    GlobalRz,
    GlobalRy,
    EdgeRz,
};

inline const char *kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::HBar: return "HBar";
        case LayerKind::CZBar: return "CZBar";
        case LayerKind::HyBar: return "HyBar";
        case LayerKind::IsingEvolve: return "IsingEvolve";
        case LayerKind::LocalRz: return "LocalRz";
        case LayerKind::LocalRx: return "LocalRx";
        case LayerKind::GlobalRz: return "GlobalRz";
        case LayerKind::GlobalRy: return "GlobalRy";
        case LayerKind::EdgeRz: return "EdgeRz";
    }
    return "?";
}

inline std::optional<LayerKind> kind_from_name(std::string_view s) {
    for (int k = 0; k <= static_cast<int>(LayerKind::EdgeRz); k++) {
        auto kk = static_cast<LayerKind>(k);
        if (s == kind_name(kk)) return kk;
    }
    return std::nullopt;
}

inline bool kind_has_site(LayerKind k) { return k == LayerKind::LocalRz || k == LayerKind::LocalRx; }
inline bool kind_has_edge(LayerKind k) { return k == LayerKind::EdgeRz; }
inline bool kind_has_angle(LayerKind k) {
    return k != LayerKind::HBar && k != LayerKind::CZBar && k != LayerKind::HyBar;
}
inline bool kind_decouplable(LayerKind k) {
    return k == LayerKind::HBar || k == LayerKind::CZBar || k == LayerKind::HyBar || k == LayerKind::IsingEvolve;
}

// Decoupled end sites as a two-bit mask.
inline constexpr uint8_t kDecLeft = 1;
inline constexpr uint8_t kDecRight = 2;

inline uint8_t dec_mask(Edge e) { return e == Edge::Left ? kDecLeft : kDecRight; }

struct PulseLayer {
    LayerKind kind = LayerKind::HBar;
    int site = 0;
    Edge edge = Edge::Left;
    double angle = 0;
    uint8_t decoupled = 0;
    // Free-form label of the composite this layer belongs to; not physical.
    std::string tag;

    static PulseLayer hbar(uint8_t dec = 0, std::string tag = {}) {
        return {LayerKind::HBar, 0, Edge::Left, 0, dec, std::move(tag)};
    }
    static PulseLayer czbar(uint8_t dec = 0, std::string tag = {}) {
        return {LayerKind::CZBar, 0, Edge::Left, 0, dec, std::move(tag)};
    }
    static PulseLayer hybar(uint8_t dec = 0, std::string tag = {}) {
        return {LayerKind::HyBar, 0, Edge::Left, 0, dec, std::move(tag)};
    }
    static PulseLayer ising(double a, uint8_t dec = 0, std::string tag = {}) {
        return {LayerKind::IsingEvolve, 0, Edge::Left, a, dec, std::move(tag)};
    }
    static PulseLayer local_rz(int site, double a, std::string tag = {}) {
        return {LayerKind::LocalRz, site, Edge::Left, a, 0, std::move(tag)};
    }
    static PulseLayer local_rx(int site, double a, std::string tag = {}) {
        return {LayerKind::LocalRx, site, Edge::Left, a, 0, std::move(tag)};
    }
    static PulseLayer global_rz(double a, std::string tag = {}) {
        return {LayerKind::GlobalRz, 0, Edge::Left, a, 0, std::move(tag)};
    }
    static PulseLayer global_ry(double a, std::string tag = {}) {
        return {LayerKind::GlobalRy, 0, Edge::Left, a, 0, std::move(tag)};
    }
    static PulseLayer edge_rz(Edge e, double a, std::string tag = {}) {
        return {LayerKind::EdgeRz, 0, e, a, 0, std::move(tag)};
    }

    bool operator==(const PulseLayer &o) const {
        // Bit-exact angle comparison; -0.0 and 0.0 print differently so compare bits.
        return kind == o.kind && site == o.site && edge == o.edge && std::signbit(angle) == std::signbit(o.angle) &&
               (angle == o.angle || (std::isnan(angle) && std::isnan(o.angle))) && decoupled == o.decoupled &&
               tag == o.tag;
    }
};

struct FrameLedger {
    // Empty means identity.
    PauliString pauli_frame;
    std::vector<std::pair<int, double>> pending_z;

    bool empty() const { return pauli_frame.is_identity_letters() && pauli_frame.phase == 0 && pending_z.empty(); }

    bool operator==(const FrameLedger &o) const {
        if (pending_z.size() != o.pending_z.size()) return false;
        for (size_t k = 0; k < pending_z.size(); k++) {
            if (pending_z[k].first != o.pending_z[k].first) return false;
            if (std::signbit(pending_z[k].second) != std::signbit(o.pending_z[k].second)) return false;
            if (pending_z[k].second != o.pending_z[k].second) return false;
        }
        auto norm = [](const PauliString &p) { return p.is_identity_letters() && p.phase == 0; };
        if (norm(pauli_frame) && norm(o.pauli_frame)) return true;
        return pauli_frame == o.pauli_frame;
    }
};

struct PulseSchedule {
    int sites = 0;
    std::vector<PulseLayer> layers;
    FrameLedger ledger;

    PulseSchedule() = default;
    explicit PulseSchedule(int n) : sites(n) {}

    void add(PulseLayer l) { layers.push_back(std::move(l)); }
    void append(const std::vector<PulseLayer> &ls) { layers.insert(layers.end(), ls.begin(), ls.end()); }

    bool operator==(const PulseSchedule &o) const {
        return sites == o.sites && layers == o.layers && ledger == o.ledger;
    }
};

enum class PadState : uint8_t { Plus, Zero };
enum class Decoupling : uint8_t { Ideal, Pulsed };

struct ChainConfig {
    int n_logical = 0;
    int sites = 0;
    // layout[k] = 1-based physical site of logical qubit k.
    std::vector<int> layout;
    PadState padding = PadState::Plus;
    // Per-site overrides for non-data sites, e.g. the alternating transport pattern.
    std::vector<std::pair<int, PadState>> pad_overrides;
    Decoupling decoupling = Decoupling::Ideal;

    static ChainConfig padded(int n_logical) {
        ChainConfig c;
        c.n_logical = n_logical;
        c.sites = 2 * n_logical - 1;
        for (int k = 1; k <= n_logical; k++) c.layout.push_back(2 * k - 1);
        return c;
    }

    // Buffered layout with pads alternating |+>, |0>, |+>, ... from the left.
    static ChainConfig alternating(int n_logical) {
        auto c = padded(n_logical);
        for (int s = 4; s < c.sites; s += 4) c.pad_overrides.push_back({s, PadState::Zero});
        return c;
    }

    static ChainConfig dense(int n_logical) {
        ChainConfig c;
        c.n_logical = n_logical;
        c.sites = n_logical;
        for (int k = 1; k <= n_logical; k++) c.layout.push_back(k);
        return c;
    }

    bool is_data(int site) const {
        for (int s : layout)
            if (s == site) return true;
        return false;
    }

    PadState pad_state(int site) const {
        for (auto &[s, p] : pad_overrides)
            if (s == site) return p;
        return padding;
    }

    // 0-based mask of padding sites.
    std::vector<bool> padding_mask() const {
        std::vector<bool> m(sites, true);
        for (int s : layout) m.at(s - 1) = false;
        return m;
    }

    // Stabilizer letter per site: I on data, X on |+> pads, Z on |0> pads.
    std::vector<Letter> pad_letters() const {
        std::vector<Letter> m(sites, Letter::I);
        for (int s = 1; s <= sites; s++)
            if (!is_data(s)) m[s - 1] = pad_state(s) == PadState::Plus ? Letter::X : Letter::Z;
        return m;
    }

    // Buffer condition: data sites are pairwise non-adjacent.
    bool buffered() const {
        for (int a : layout)
            for (int b : layout)
                if (a != b && std::abs(a - b) < 2) return false;
        return true;
    }

    std::vector<std::string> violations() const {
        std::vector<std::string> v;
        if (sites < 2) v.push_back("chain size below 2");
        if (static_cast<int>(layout.size()) != n_logical) v.push_back("layout size differs from n_logical");
        for (size_t a = 0; a < layout.size(); a++) {
            if (layout[a] < 1 || layout[a] > sites) v.push_back("layout site out of range");
            for (size_t b = a + 1; b < layout.size(); b++)
                if (layout[a] == layout[b]) v.push_back("layout collision at site " + std::to_string(layout[a]));
        }
        return v;
    }
};

// ---------------------------------------------------------------------------
// Canonical text form.

inline std::string format_angle(double a) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof(buf), a);
    return std::string(buf, r.ptr);
}

inline std::optional<double> parse_angle(std::string_view s) {
    double v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

struct ParseError : std::runtime_error {
    int layer;
    ParseError(int layer_index, const std::string &what)
        : std::runtime_error(layer_index >= 0 ? "layer " + std::to_string(layer_index) + ": " + what : what),
          layer(layer_index) {}
};

inline std::string decoupled_text(uint8_t mask, int n) {
    std::string out;
    if (mask & kDecLeft) out += "1";
    if (mask & kDecRight) {
        if (!out.empty()) out += ",";
        out += std::to_string(n);
    }
    return out;
}

inline std::string serialize_layer(const PulseLayer &l, int n) {
    std::string out = "kind=";
    out += kind_name(l.kind);
    if (kind_has_site(l.kind)) out += " site=" + std::to_string(l.site);
    if (kind_has_edge(l.kind)) out += std::string(" edge=") + edge_name(l.edge);
    if (kind_has_angle(l.kind)) out += " angle=" + format_angle(l.angle);
    if (l.decoupled) out += " decoupled=" + decoupled_text(l.decoupled, n);
    if (!l.tag.empty()) out += " tag=" + l.tag;
    return out;
}

inline std::string serialize_schedule(const PulseSchedule &s) {
    std::string out = "qwire-schedule 1\n";
    out += "sites " + std::to_string(s.sites) + "\n";
    out += "layers " + std::to_string(s.layers.size()) + "\n";
    for (size_t k = 0; k < s.layers.size(); k++)
        out += "layer " + std::to_string(k) + " " + serialize_layer(s.layers[k], s.sites) + "\n";
    if (!(s.ledger.pauli_frame.is_identity_letters() && s.ledger.pauli_frame.phase == 0))
        out += "pauli_frame " + s.ledger.pauli_frame.str() + "\n";
    for (auto &[site, a] : s.ledger.pending_z)
        out += "pending_z " + std::to_string(site) + " " + format_angle(a) + "\n";
    out += "end\n";
    return out;
}

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    size_t k = 0;
    while (k < s.size()) {
        while (k < s.size() && (s[k] == ' ' || s[k] == '\t' || s[k] == '\r')) k++;
        size_t b = k;
        while (k < s.size() && s[k] != ' ' && s[k] != '\t' && s[k] != '\r') k++;
        if (k > b) out.push_back(s.substr(b, k - b));
    }
    return out;
}

inline std::optional<int> parse_int(std::string_view s) {
    int v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace detail

inline PulseLayer parse_layer(std::string_view text, int n, int index) {
    auto toks = detail::split_ws(text);
    PulseLayer l;
    bool have_kind = false, have_site = false, have_edge = false, have_angle = false;
    // Fields must appear in canonical order.
    static const char *order[] = {"kind", "site", "edge", "angle", "decoupled", "tag"};
    int last = -1;
    for (auto t : toks) {
        auto eq = t.find('=');
        if (eq == std::string_view::npos) throw ParseError(index, "malformed field '" + std::string(t) + "'");
        auto key = t.substr(0, eq), val = t.substr(eq + 1);
        int pos = -1;
        for (int k = 0; k < 6; k++)
            if (key == order[k]) pos = k;
        if (pos < 0) throw ParseError(index, "unknown field '" + std::string(key) + "'");
        if (pos <= last) throw ParseError(index, "field '" + std::string(key) + "' out of order");
        last = pos;
        if (key == "kind") {
            auto k = kind_from_name(val);
            if (!k) throw ParseError(index, "unknown kind '" + std::string(val) + "'");
            l.kind = *k;
            have_kind = true;
        } else if (key == "site") {
            auto v = detail::parse_int(val);
            if (!v) throw ParseError(index, "bad site");
            if (*v < 1 || *v > n) throw ParseError(index, "site out of range");
            l.site = *v;
            have_site = true;
        } else if (key == "edge") {
            if (val == "left") l.edge = Edge::Left;
            else if (val == "right") l.edge = Edge::Right;
            else throw ParseError(index, "bad edge '" + std::string(val) + "'");
            have_edge = true;
        } else if (key == "angle") {
            auto v = parse_angle(val);
            if (!v) throw ParseError(index, "bad angle '" + std::string(val) + "'");
            if (!std::isfinite(*v)) throw ParseError(index, "angle not finite");
            l.angle = *v;
            have_angle = true;
        } else if (key == "decoupled") {
            size_t b = 0;
            while (b <= val.size()) {
                size_t e = val.find(',', b);
                if (e == std::string_view::npos) e = val.size();
                auto v = detail::parse_int(val.substr(b, e - b));
                if (!v) throw ParseError(index, "bad decoupled site list");
                if (*v < 1 || *v > n) throw ParseError(index, "site out of range");
                if (*v == 1) l.decoupled |= kDecLeft;
                else if (*v == n) l.decoupled |= kDecRight;
                else throw ParseError(index, "only end sites decouplable");
                b = e + 1;
            }
        } else {
            l.tag = std::string(val);
        }
    }
    if (!have_kind) throw ParseError(index, "missing kind");
    if (kind_has_site(l.kind) != have_site) throw ParseError(index, "site field mismatch for kind");
    if (kind_has_edge(l.kind) != have_edge) throw ParseError(index, "edge field mismatch for kind");
    if (kind_has_angle(l.kind) != have_angle) throw ParseError(index, "angle field mismatch for kind");
    if (l.decoupled && !kind_decouplable(l.kind)) throw ParseError(index, "kind does not take decoupled sites");
    return l;
}

inline PulseSchedule parse_schedule(std::string_view b) {
    PulseSchedule s;
    std::vector<std::string_view> lines;
    size_t k = 0;
    while (k < b.size()) {
        size_t e = b.find('\n', k);
        if (e == std::string_view::npos) e = b.size();
        auto line = b.substr(k, e - k);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty() && line[0] != '#') lines.push_back(line);
        k = e + 1;
    }
    if (lines.size() < 4 || lines[0] != "qwire-schedule 1") throw ParseError(-1, "missing header");
    auto t1 = detail::split_ws(lines[1]);
    if (t1.size() != 2 || t1[0] != "sites") throw ParseError(-1, "missing sites record");
    auto n = detail::parse_int(t1[1]);
    if (!n || *n < 2) throw ParseError(-1, "chain size must be at least 2");
    s.sites = *n;
    auto t2 = detail::split_ws(lines[2]);
    if (t2.size() != 2 || t2[0] != "layers") throw ParseError(-1, "missing layers record");
    auto count = detail::parse_int(t2[1]);
    if (!count || *count < 0) throw ParseError(-1, "bad layer count");
    size_t li = 3;
    for (int idx = 0; idx < *count; idx++, li++) {
        if (li >= lines.size()) throw ParseError(idx, "missing layer record");
        auto line = lines[li];
        auto toks = detail::split_ws(line);
        if (toks.size() < 2 || toks[0] != "layer" || detail::parse_int(toks[1]) != idx)
            throw ParseError(idx, "expected 'layer " + std::to_string(idx) + "'");
        auto rest = line.substr(line.find(toks[1]) + toks[1].size());
        s.layers.push_back(parse_layer(rest, s.sites, idx));
    }
    bool ended = false;
    for (; li < lines.size(); li++) {
        auto toks = detail::split_ws(lines[li]);
        if (toks.empty()) continue;
        if (toks[0] == "end") {
            ended = true;
            break;
        }
        if (toks[0] == "pauli_frame" && toks.size() == 2) {
            try {
                s.ledger.pauli_frame = PauliString::parse(toks[1]);
            } catch (const std::exception &e) {
                throw ParseError(-1, std::string("bad pauli_frame: ") + e.what());
            }
            if (static_cast<int>(s.ledger.pauli_frame.size()) != s.sites)
                throw ParseError(-1, "pauli_frame length differs from sites");
        } else if (toks[0] == "pending_z" && toks.size() == 3) {
            auto site = detail::parse_int(toks[1]);
            auto a = parse_angle(toks[2]);
            if (!site || !a) throw ParseError(-1, "bad pending_z record");
            if (*site < 1 || *site > s.sites) throw ParseError(-1, "pending_z site out of range");
            s.ledger.pending_z.push_back({*site, *a});
        } else {
            throw ParseError(-1, "unexpected record '" + std::string(lines[li]) + "'");
        }
    }
    if (!ended) throw ParseError(-1, "missing end record");
    return s;
}

inline std::vector<std::string> validate_schedule(const PulseSchedule &s) {
    std::vector<std::string> v;
    int n = s.sites;
    if (n < 2) v.push_back("degenerate chain: sites=" + std::to_string(n) + " (need at least 2)");
    for (size_t k = 0; k < s.layers.size(); k++) {
        auto &l = s.layers[k];
        std::string at = "layer " + std::to_string(k) + ": ";
        if (kind_has_site(l.kind)) {
            if (l.site < 1 || l.site > n) v.push_back(at + "site out of range");
            else if (l.site != 1 && l.site != n)
                v.push_back(at + "selective pulse on interior site " + std::to_string(l.site));
        }
        if (kind_has_angle(l.kind) && !std::isfinite(l.angle)) v.push_back(at + "angle not finite");
        if (l.decoupled) {
            if (!kind_decouplable(l.kind)) v.push_back(at + "kind does not take decoupled sites");
            if (l.decoupled & ~(kDecLeft | kDecRight)) v.push_back(at + "only end sites decouplable");
        }
    }
    auto &pf = s.ledger.pauli_frame;
    if (!pf.sites.empty() && static_cast<int>(pf.size()) != n) v.push_back("ledger: pauli_frame length differs");
    for (auto &[site, a] : s.ledger.pending_z) {
        if (site < 1 || site > n) v.push_back("ledger: pending_z site out of range");
        if (!std::isfinite(a)) v.push_back("ledger: pending_z angle not finite");
    }
    return v;
}

// 64-bit FNV-1a, used as a stable content hash in reports.
inline uint64_t fnv1a(std::string_view s) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace qwire
