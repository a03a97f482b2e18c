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

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwire/core.hpp"

namespace qwire {

struct NonCliffordLayer : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Returns k when angle = k*pi/4 (mod 2pi) within tolerance.
inline std::optional<int> quarter_turns(double angle) {
    double q = angle / (kPi / 4);
    double r = std::round(q);
    if (std::abs(q - r) > 1e-9) return std::nullopt;
    long long k = static_cast<long long>(r) % 8;
    if (k < 0) k += 8;
    return static_cast<int>(k);
}

// Bit-packed Pauli operator i^r * prod_k X_k^{x_k} Z_k^{z_k}.
// Conjugation methods map P to U P U^dagger.
class PackedPauli {
  public:
    explicit PackedPauli(size_t n = 0) : n_(n), xs_(words(n), 0), zs_(words(n), 0) {}

    static PackedPauli from(const PauliString &p) {
        PackedPauli out(p.size());
        int ys = 0;
        for (size_t k = 0; k < p.size(); k++) {
            auto v = static_cast<uint8_t>(p.sites[k]);
            if (v & 1) out.xs_[k >> 6] |= uint64_t{1} << (k & 63);
            if (v & 2) out.zs_[k >> 6] |= uint64_t{1} << (k & 63);
            ys += p.sites[k] == Letter::Y;
        }
        out.r_ = (p.phase + ys) & 3;
        return out;
    }

    static PackedPauli single(size_t n, size_t site0, Letter l) { return from(PauliString::single(n, site0, l)); }

    PauliString to_string() const {
        PauliString p(n_);
        for (size_t k = 0; k < n_; k++) p.sites[k] = letter(k);
        p.phase = (r_ - static_cast<int>(count_y())) & 3;
        return p;
    }

    size_t size() const { return n_; }

    Letter letter(size_t k) const {
        uint64_t b = uint64_t{1} << (k & 63);
        int v = ((xs_[k >> 6] & b) ? 1 : 0) | ((zs_[k >> 6] & b) ? 2 : 0);
        return static_cast<Letter>(v);
    }

    bool x(size_t k) const { return (xs_[k >> 6] >> (k & 63)) & 1; }
    bool z(size_t k) const { return (zs_[k >> 6] >> (k & 63)) & 1; }

    size_t weight() const {
        size_t w = 0;
        for (size_t i = 0; i < xs_.size(); i++) w += std::popcount(xs_[i] | zs_[i]);
        return w;
    }

    size_t count_y() const {
        size_t w = 0;
        for (size_t i = 0; i < xs_.size(); i++) w += std::popcount(xs_[i] & zs_[i]);
        return w;
    }

    // Phase in the letter representation (Y as a letter).
    int phase() const { return (r_ - static_cast<int>(count_y())) & 3; }

    bool operator==(const PackedPauli &o) const {
        return n_ == o.n_ && xs_ == o.xs_ && zs_ == o.zs_ && ((r_ - o.r_) & 3) == 0;
    }

    // ---- single-site gates ----
    void h(size_t k) {
        bool xb = x(k), zb = z(k);
        if (xb && zb) r_ += 2;
        set(xs_, k, zb);
        set(zs_, k, xb);
        r_ &= 3;
    }

    // S^t with S = diag(1, i) = R_z(pi/4) up to phase.
    void s(size_t k, int t) {
        t &= 3;
        for (int i = 0; i < t; i++) {
            if (x(k)) {
                r_ += 1;
                flip(zs_, k);
            }
        }
        r_ &= 3;
    }

    void cz(size_t a, size_t b) {
        bool xa = x(a), xb = x(b);
        if (xa && xb) r_ += 2;
        if (xb) flip(zs_, a);
        if (xa) flip(zs_, b);
        r_ &= 3;
    }

    // R_x(t*pi/4) = H S^t H.
    void rx(size_t k, int t) {
        h(k);
        s(k, t);
        h(k);
    }

    // R_y(t*pi/4) = S R_x S^dagger.
    void ry(size_t k, int t) {
        s(k, 3);
        rx(k, t);
        s(k, 1);
    }

    // ---- homogeneous layers, end sites optionally skipped ----
    void h_all(uint8_t dec = 0) {
        auto m = site_mask(dec);
        for (size_t i = 0; i < xs_.size(); i++) {
            uint64_t xw = xs_[i] & m[i], zw = zs_[i] & m[i];
            r_ += 2 * std::popcount(xw & zw);
            xs_[i] = (xs_[i] & ~m[i]) | zw;
            zs_[i] = (zs_[i] & ~m[i]) | xw;
        }
        r_ &= 3;
    }

    void s_masked(const std::vector<uint64_t> &m, int t) {
        t &= 3;
        for (int j = 0; j < t; j++) {
            for (size_t i = 0; i < xs_.size(); i++) {
                uint64_t xw = xs_[i] & m[i];
                r_ += std::popcount(xw);
                zs_[i] ^= xw;
            }
        }
        r_ &= 3;
    }

    void s_all(int t, uint8_t dec = 0) { s_masked(site_mask(dec), t); }

    void rx_all(int t, uint8_t dec = 0) {
        h_all(dec);
        s_all(t, dec);
        h_all(dec);
    }

    void ry_all(int t, uint8_t dec = 0) {
        s_all(3, dec);
        rx_all(t, dec);
        s_all(1, dec);
    }

    // CZ on every bond (a, a+1) not touching a decoupled end.
    void cz_chain(uint8_t dec = 0) {
        auto bm = bond_mask(dec);
        auto up = shift_down(xs_);  // bit a holds x_{a+1}
        auto dn = shift_up(xs_);    // bit a holds x_{a-1}
        auto bm_up = shift_up(bm);
        for (size_t i = 0; i < xs_.size(); i++) {
            r_ += 2 * std::popcount(xs_[i] & up[i] & bm[i]);
            zs_[i] ^= (up[i] & bm[i]) ^ (dn[i] & bm_up[i]);
        }
        r_ &= 3;
    }

    // exp(-i t*pi/4 sum' ZZ) = prod' (S_a S_b CZ_ab)^t up to phase.
    void ising(int t, uint8_t dec = 0) {
        t &= 3;
        auto bm = bond_mask(dec);
        auto bm_up = shift_up(bm);
        for (int j = 0; j < t; j++) {
            cz_chain(dec);
            s_masked(bm, 1);
            s_masked(bm_up, 1);
        }
    }

    // step = HBar . CZBar: CZBar acts first.
    void step() {
        cz_chain();
        h_all();
    }

    void step_inverse() {
        h_all();
        cz_chain();
    }

    // Conjugation by one pulse layer; inverse=true maps P to U^dagger P U.
    void conjugate(const PulseLayer &l, bool inverse = false) {
        int sgn = inverse ? -1 : 1;
        auto turns = [&](double a) {
            auto k = quarter_turns(sgn * a);
            if (!k) throw NonCliffordLayer(std::string(kind_name(l.kind)) + " angle " + format_angle(a) +
                                           " is not a multiple of pi/4");
            return *k;
        };
        switch (l.kind) {
            case LayerKind::HBar: h_all(l.decoupled); break;
            case LayerKind::CZBar: cz_chain(l.decoupled); break;
            case LayerKind::HyBar: rx_all(inverse ? 3 : 1, l.decoupled); break;
            case LayerKind::IsingEvolve: ising(turns(l.angle), l.decoupled); break;
            case LayerKind::LocalRz: s(l.site - 1, turns(l.angle)); break;
            case LayerKind::LocalRx: rx(l.site - 1, turns(l.angle)); break;
            case LayerKind::GlobalRz: s_all(turns(l.angle)); break;
            case LayerKind::GlobalRy: ry_all(turns(l.angle)); break;
            case LayerKind::EdgeRz: s(edge_site(l.edge, static_cast<int>(n_)) - 1, turns(l.angle)); break;
        }
    }

    // Operator product this * o.
    PackedPauli operator*(const PackedPauli &o) const {
        if (n_ != o.n_) throw std::invalid_argument("pauli length mismatch");
        PackedPauli out(n_);
        int r = r_ + o.r_;
        for (size_t i = 0; i < xs_.size(); i++) {
            r += 2 * std::popcount(zs_[i] & o.xs_[i]);
            out.xs_[i] = xs_[i] ^ o.xs_[i];
            out.zs_[i] = zs_[i] ^ o.zs_[i];
        }
        out.r_ = r & 3;
        return out;
    }

  private:
    static size_t words(size_t n) { return (n + 63) / 64; }

    static void set(std::vector<uint64_t> &v, size_t k, bool b) {
        uint64_t m = uint64_t{1} << (k & 63);
        if (b) v[k >> 6] |= m;
        else v[k >> 6] &= ~m;
    }
    static void flip(std::vector<uint64_t> &v, size_t k) { v[k >> 6] ^= uint64_t{1} << (k & 63); }

    std::vector<uint64_t> site_mask(uint8_t dec) const {
        std::vector<uint64_t> m(xs_.size(), ~uint64_t{0});
        if (n_ & 63) m.back() = (uint64_t{1} << (n_ & 63)) - 1;
        if (n_ && (dec & kDecLeft)) m[0] &= ~uint64_t{1};
        if (n_ && (dec & kDecRight)) m[(n_ - 1) >> 6] &= ~(uint64_t{1} << ((n_ - 1) & 63));
        return m;
    }

    // Bit a set when bond (a, a+1) is active.
    std::vector<uint64_t> bond_mask(uint8_t dec) const {
        std::vector<uint64_t> m(xs_.size(), 0);
        if (n_ < 2) return m;
        for (auto &w : m) w = ~uint64_t{0};
        size_t nb = n_ - 1;
        if (nb & 63) m[(nb - 1) >> 6] = (uint64_t{1} << (nb & 63)) - 1;
        for (size_t i = ((nb - 1) >> 6) + 1; i < m.size(); i++) m[i] = 0;
        if (dec & kDecLeft) m[0] &= ~uint64_t{1};
        if (dec & kDecRight) m[(nb - 1) >> 6] &= ~(uint64_t{1} << ((nb - 1) & 63));
        return m;
    }

    // Result bit a = input bit a+1.
    static std::vector<uint64_t> shift_down(const std::vector<uint64_t> &v) {
        std::vector<uint64_t> out(v.size());
        for (size_t i = 0; i < v.size(); i++) {
            out[i] = v[i] >> 1;
            if (i + 1 < v.size()) out[i] |= v[i + 1] << 63;
        }
        return out;
    }

    // Result bit a = input bit a-1.
    std::vector<uint64_t> shift_up(const std::vector<uint64_t> &v) const {
        std::vector<uint64_t> out(v.size());
        for (size_t i = 0; i < v.size(); i++) {
            out[i] = v[i] << 1;
            if (i > 0) out[i] |= v[i - 1] >> 63;
        }
        if (n_ & 63) out.back() &= (uint64_t{1} << (n_ & 63)) - 1;
        return out;
    }

    size_t n_;
    std::vector<uint64_t> xs_, zs_;
    int r_ = 0;
};

// ---------------------------------------------------------------------------
// Public operations on PauliString values.

inline PauliString conjugate_layer(const PauliString &p, const PulseLayer &layer, int n) {
    if (static_cast<int>(p.size()) != n) throw std::invalid_argument("pauli length differs from chain size");
    auto q = PackedPauli::from(p);
    q.conjugate(layer);
    return q.to_string();
}

inline PauliString step(const PauliString &p) {
    auto q = PackedPauli::from(p);
    q.step();
    return q.to_string();
}

inline PauliString step_pow(const PauliString &p, int k) {
    auto q = PackedPauli::from(p);
    for (int i = 0; i < k; i++) q.step();
    return q.to_string();
}

struct MirrorEntry {
    int site;  // 1-based input site
    Letter letter;
    int image_site = 0;  // 0 when the image is not single-site
    Letter image_letter = Letter::I;
    int sign = 0;  // +1 / -1, 0 when not single-site or not Hermitian
    bool ok = false;
};

struct MirrorMap {
    int n = 0;
    std::vector<MirrorEntry> entries;
    // First offending site, 0 when the theorem held everywhere.
    int failed_site = 0;

    bool ok() const { return failed_site == 0; }
    bool all_signs_positive() const {
        for (auto &e : entries)
            if (e.sign != 1) return false;
        return true;
    }
};

inline MirrorMap mirror_map(int n) {
    if (n < 2) throw std::invalid_argument("chain size must be at least 2");
    MirrorMap out;
    out.n = n;
    for (int a = 1; a <= n; a++) {
        for (Letter l : {Letter::X, Letter::Z}) {
            auto p = PackedPauli::single(n, a - 1, l);
            for (int k = 0; k <= n; k++) p.step();
            MirrorEntry e{a, l};
            if (p.weight() == 1) {
                for (int s = 0; s < n; s++)
                    if (p.letter(s) != Letter::I) {
                        e.image_site = s + 1;
                        e.image_letter = p.letter(s);
                    }
                int ph = p.phase();
                e.sign = ph == 0 ? 1 : ph == 2 ? -1 : 0;
            }
            e.ok = e.image_site == n - a + 1 && e.image_letter == l && e.sign != 0;
            if (!e.ok && out.failed_site == 0) out.failed_site = a;
            out.entries.push_back(e);
        }
    }
    return out;
}

struct SpacetimePattern {
    int n = 0;
    // grid[t][site0]
    std::vector<std::vector<Letter>> grid;
    std::vector<int> phases;
};

inline SpacetimePattern spacetime_pattern(const PauliString &initial, int steps) {
    if (steps < 0) throw std::invalid_argument("steps must be non-negative");
    SpacetimePattern sp;
    sp.n = static_cast<int>(initial.size());
    auto p = PackedPauli::from(initial);
    for (int t = 0; t <= steps; t++) {
        if (t > 0) p.step();
        std::vector<Letter> row(sp.n);
        for (int s = 0; s < sp.n; s++) row[s] = p.letter(s);
        sp.grid.push_back(std::move(row));
        sp.phases.push_back(p.phase());
    }
    return sp;
}

inline std::string render_ascii(const SpacetimePattern &sp) {
    std::string out;
    for (size_t t = 0; t < sp.grid.size(); t++) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%4zu ", t);
        out += buf;
        for (auto l : sp.grid[t]) out += l == Letter::I ? '.' : letter_char(l);
        out += '\n';
    }
    return out;
}

inline std::string render_svg(const SpacetimePattern &sp, int cell = 18) {
    int rows = static_cast<int>(sp.grid.size());
    int w = sp.n * cell, h = rows * cell;
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) + "\" height=\"" +
           std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " + std::to_string(h) + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(w) + "\" height=\"" + std::to_string(h) +
           "\" fill=\"white\"/>\n";
    for (int t = 0; t < rows; t++) {
        for (int s = 0; s < sp.n; s++) {
            Letter l = sp.grid[t][s];
            if (l == Letter::I) continue;
            const char *fill = l == Letter::X ? "#d62728" : l == Letter::Z ? "#1f77b4" : "#9467bd";
            int x = s * cell, y = t * cell;
            out += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
                   std::to_string(cell) + "\" height=\"" + std::to_string(cell) + "\" fill=\"" + fill + "\"/>\n";
            out += "<text x=\"" + std::to_string(x + cell / 2) + "\" y=\"" + std::to_string(y + cell * 3 / 4) +
                   "\" font-size=\"" + std::to_string(cell * 2 / 3) +
                   "\" text-anchor=\"middle\" fill=\"white\">" + letter_char(l) + "</text>\n";
        }
    }
    out += "</svg>\n";
    return out;
}

// Per-site padding: I marks a data site, X a pad held in |+>, Z a pad in |0>.
using PadPattern = std::vector<Letter>;

inline PadPattern pad_pattern(const std::vector<bool> &plus_pads) {
    PadPattern p(plus_pads.size(), Letter::I);
    for (size_t s = 0; s < p.size(); s++)
        if (plus_pads[s]) p[s] = Letter::X;
    return p;
}

// A Pauli that acts as sign * letter on one data site, given the padding:
// each pad may carry only its own stabilizer letter.
struct Reduced {
    int site0;
    Letter letter;
    int sign;
};

inline std::optional<Reduced> reduce_mod_padding(const PackedPauli &p, const PadPattern &padding) {
    std::optional<int> hit;
    for (size_t s = 0; s < p.size(); s++) {
        Letter l = p.letter(s);
        if (l == Letter::I) continue;
        Letter pad = padding.empty() ? Letter::I : padding[s];
        if (pad != Letter::I) {
            if (l != pad) return std::nullopt;
            continue;
        }
        if (hit) return std::nullopt;
        hit = static_cast<int>(s);
    }
    if (!hit) return std::nullopt;
    int ph = p.phase();
    if (ph & 1) return std::nullopt;
    return Reduced{*hit, p.letter(*hit), ph == 0 ? 1 : -1};
}

struct ImpactPoint {
    int step;  // insertion boundary: after `step` applications of HBar.CZBar
    Edge edge;
    int sign;
    Letter pulse = Letter::Z;   // rotation axis applied at the edge
    Letter effect = Letter::Z;  // axis it acts along on the logical qubit

    bool operator==(const ImpactPoint &o) const {
        return step == o.step && edge == o.edge && sign == o.sign && pulse == o.pulse && effect == o.effect;
    }
};

// Pull an edge pulse back to the start of the cycle.
inline PackedPauli pull_back_edge(int n, int t, Edge e, Letter pulse) {
    auto p = PackedPauli::single(n, edge_site(e, n) - 1, pulse);
    for (int k = 0; k < t; k++) p.step_inverse();
    return p;
}

// Default padding for a site: every site of the opposite parity.
inline PadPattern complementary_padding(int a, int n) {
    PadPattern m(n, Letter::I);
    for (int s = 1; s <= n; s++)
        if ((s % 2) != (a % 2)) m[s - 1] = Letter::X;
    return m;
}

// All insertion points in one mirror cycle at which an edge rotation equals
// a rotation of the qubit that sits at site a when the cycle starts.
inline std::vector<ImpactPoint> find_impact_points(int a, int n, const PadPattern &padding,
                                                   std::vector<Letter> pulses = {Letter::Z, Letter::X},
                                                   std::vector<Letter> effects = {Letter::Z}) {
    if (n < 2) throw std::invalid_argument("chain size must be at least 2");
    if (a < 1 || a > n) throw std::invalid_argument("site out of range");
    std::vector<ImpactPoint> out;
    for (int t = 0; t <= n + 1; t++) {
        for (Edge e : {Edge::Left, Edge::Right}) {
            for (Letter pl : pulses) {
                auto r = reduce_mod_padding(pull_back_edge(n, t, e, pl), padding);
                if (!r || r->site0 != a - 1) continue;
                for (Letter ef : effects)
                    if (r->letter == ef) out.push_back({t, e, r->sign, pl, ef});
            }
        }
    }
    return out;
}

inline std::vector<ImpactPoint> find_impact_points(int a, int n) {
    return find_impact_points(a, n, complementary_padding(a, n));
}

}  // namespace qwire
