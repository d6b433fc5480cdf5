#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace stagsix {

/// Exact rational on int64, normalized with positive denominator.
struct Rational {
    std::int64_t num = 0, den = 1;

    Rational() = default;
    Rational(std::int64_t n) : num(n), den(1) {}
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw std::domain_error("Rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool is_integer() const { return den == 1; }

    friend Rational operator+(Rational a, Rational b) {
        return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
    }
    friend Rational operator-(Rational a, Rational b) {
        return Rational(a.num * b.den - b.num * a.den, a.den * b.den);
    }
    friend Rational operator*(Rational a, Rational b) { return Rational(a.num * b.num, a.den * b.den); }
    friend Rational operator/(Rational a, Rational b) { return Rational(a.num * b.den, a.den * b.num); }
    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator<(const Rational& a, const Rational& b) {
        return a.num * b.den < b.num * a.den;
    }
    std::string str() const {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }
};

/// Truncated q-series with exact integer coefficients on the grid
/// q^{leading + j*step}, j = 0..order.
struct QSeries {
    Rational leading;        // leading exponent (h - c/24 style offset)
    Rational step{1, 1};     // grid spacing
    std::vector<std::int64_t> coeffs;

    int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

/// Two-colour partition generating function: prod_{n>=1} (1-q^n)^{-2}.
inline std::vector<std::int64_t> eta_m2_coeffs(int order) {
    std::vector<std::int64_t> c(order + 1, 0);
    c[0] = 1;
    for (int n = 1; n <= order; ++n) {
        std::vector<std::int64_t> nc(order + 1, 0);
        for (int i = 0; i <= order; ++i) {
            if (c[i] == 0) continue;
            for (int j = 0; i + n * j <= order; ++j) nc[i + n * j] += c[i] * (j + 1);
        }
        c = std::move(nc);
    }
    return c;
}

/// Z_m series: q^{h_m - c/24} eta^{-2} (1 + 2 sum_{j>=1} q^{2j^2+j(2m+1)}
///                                        - 2 sum_{j>=0} q^{2(j+1/2)^2+(j+1/2)(2m+1)}).
/// Leading exponent m(m+1)/k - (2-6/k)/24 - 1/12 (the eta prefactor).
inline QSeries z_m_series(int k_int, int m, int order) {
    if (k_int < 3) throw std::domain_error("z_m_series: k >= 3 required");
    if (m < 0 || order < 0 || order > 64) throw std::domain_error("z_m_series: bad arguments");
    std::vector<std::int64_t> br(order + 1, 0);
    br[0] = 1;
    for (int j = 1;; ++j) {
        long e = 2L * j * j + static_cast<long>(j) * (2 * m + 1);
        if (e > order) break;
        br[e] += 2;
    }
    for (int j = 0;; ++j) {
        // 2(j+1/2)^2 + (j+1/2)(2m+1) = 2j^2 + (2m+3) j + (m+1)
        long e = 2L * j * j + static_cast<long>(2 * m + 3) * j + (m + 1);
        if (e > order) break;
        br[e] -= 2;
    }
    auto eta = eta_m2_coeffs(order);
    QSeries z;
    z.coeffs.assign(order + 1, 0);
    for (int i = 0; i <= order; ++i) {
        if (eta[i] == 0) continue;
        for (int j = 0; i + j <= order; ++j) z.coeffs[i + j] += eta[i] * br[j];
    }
    z.leading = Rational(static_cast<std::int64_t>(m) * (m + 1), k_int) -
                Rational(2 * k_int - 6, 24 * k_int) - Rational(1, 12);
    return z;
}

/// Weighted trace over sectors: vertex weighting (2m+1), loop weighting 1.
enum class TraceWeighting { Vertex, Loop };

inline QSeries full_trace_series(int k_int, int order, TraceWeighting w) {
    // common grid: exponent offsets h_m - h_0 = m(m+1)/k; step 1/k
    QSeries out;
    out.step = Rational(1, k_int);
    QSeries z0 = z_m_series(k_int, 0, order);
    out.leading = z0.leading;
    int grid_order = order * k_int;
    out.coeffs.assign(grid_order + 1, 0);
    for (int m = 0;; ++m) {
        Rational off = Rational(static_cast<std::int64_t>(m) * (m + 1), k_int);
        Rational pos = off / out.step;
        if (!pos.is_integer()) throw std::domain_error("full_trace_series: grid mismatch");
        if (pos.num > grid_order) break;
        QSeries zm = z_m_series(k_int, m, order);
        std::int64_t mult = (w == TraceWeighting::Vertex) ? (2 * m + 1) : 1;
        for (int j = 0; j <= zm.order(); ++j) {
            long idx = pos.num + static_cast<long>(j) * k_int;
            if (idx > grid_order) break;
            out.coeffs[idx] += mult * zm.coeffs[j];
        }
    }
    return out;
}

/// String function c^l_m of the level k-2 parafermions:
///   eta^{-2} sum_{n1,n2} (-1)^{2n1} sign(n1) q^{(l+1+2n1 k)^2/(4k) - (m+2n2(k-2))^2/(4(k-2))}
/// over n1,n2 in Z/2 with n1-n2 in Z and (n1 >= |n2|) or (-n1 > |n2|); the
/// (0,0) term carries weight +1.
inline QSeries string_function(int k_int, int l, int m, int order, int cutoff = 0) {
    if (k_int < 3) throw std::domain_error("string_function: k >= 3 required");
    if (l < 0 || l > k_int - 2) throw std::domain_error("string_function: 0 <= l <= k-2 required");
    if (((l - m) % 2 + 2) % 2 != 0)
        throw std::domain_error("string_function: empty parity sector (l and m must have equal parity)");
    const int k = k_int;
    // exponents relative to the (n1,n2)=(0,0) term, on the integer grid
    std::map<long, std::int64_t> terms;
    int B = cutoff > 0 ? cutoff : 2 * static_cast<int>(std::sqrt(order + 16.0)) + 8;
    for (int t1 = -2 * B; t1 <= 2 * B; ++t1) {      // t1 = 2 n1
        for (int t2 = -2 * B; t2 <= 2 * B; ++t2) {  // t2 = 2 n2
            if (((t1 - t2) % 2 + 2) % 2 != 0) continue;
            // region test on half-integers
            bool first = t1 >= std::abs(t2);
            bool second = -t1 > std::abs(t2);
            if (!first && !second) continue;
            std::int64_t w = (((t1 % 2) + 2) % 2 == 0) ? 1 : -1;  // (-1)^{2 n1}
            std::int64_t s = (t1 > 0 || (t1 == 0 && first)) ? 1 : (t1 < 0 ? -1 : 1);
            // exponent difference from the base term, times 16 k (k-2) stays integral:
            // (l+1+ n1*2k)^2/(4k) - (m + n2*2(k-2))^2/(4(k-2)) with n = t/2
            // = [(2(l+1)+2 t1 k)^2 (k-2) - (2m+2 t2 (k-2))^2 k] / (16 k (k-2))
            long long A = 2LL * (l + 1) + 2LL * t1 * k;
            long long Bq = 2LL * m + 2LL * t2 * (k - 2);
            long long base_A = 2LL * (l + 1), base_B = 2LL * m;
            long long num =
                (A * A - base_A * base_A) * (k - 2) - (Bq * Bq - base_B * base_B) * k;
            long long den = 16LL * k * (k - 2);
            if (num % den != 0) continue;  // off the integer grid relative to the base
            long long rel = num / den;
            if (rel < 0 || rel > order) continue;
            terms[rel] += w * s;
        }
    }
    auto eta = eta_m2_coeffs(order);
    QSeries out;
    out.coeffs.assign(order + 1, 0);
    for (auto [e, coef] : terms) {
        if (coef == 0) continue;
        for (int i = 0; e + i <= order; ++i) out.coeffs[e + i] += coef * eta[i];
    }
    out.leading = Rational(static_cast<std::int64_t>(l + 1) * (l + 1), 4 * k) -
                  Rational(static_cast<std::int64_t>(m) * m, 4 * (k - 2)) - Rational(1, 12);
    return out;
}

// ---------------------------------------------------------------------------
// level-count comparison
// ---------------------------------------------------------------------------

struct LevelCompareEntry {
    double lattice_gap;     // scaled gap from the fits
    double series_offset;   // nearest series exponent offset
    std::int64_t coefficient;
    double deviation;
};

struct LevelCompareReport {
    std::vector<LevelCompareEntry> entries;
    bool all_within = true;
};

/// Match fitted scaled gaps against the exponent offsets of a character
/// series; report-only (never throws on mismatch).
inline LevelCompareReport level_count_compare(const std::vector<double>& gaps,
                                              const QSeries& series, int n_levels,
                                              double tolerance = 0.05) {
    LevelCompareReport rep;
    std::vector<std::pair<double, std::int64_t>> offsets;
    for (int j = 0; j <= series.order(); ++j)
        if (series.coeffs[j] != 0)
            offsets.push_back({series.step.value() * j, series.coeffs[j]});
    int count = 0;
    for (double g : gaps) {
        if (count++ >= n_levels) break;
        LevelCompareEntry e;
        e.lattice_gap = g;
        e.series_offset = offsets.front().first;
        e.coefficient = offsets.front().second;
        for (auto& [off, coef] : offsets)
            if (std::abs(off - g) < std::abs(e.series_offset - g)) {
                e.series_offset = off;
                e.coefficient = coef;
            }
        e.deviation = std::abs(e.lattice_gap - e.series_offset);
        rep.all_within = rep.all_within &&
                         e.deviation <= tolerance * std::max(1.0, std::abs(e.series_offset));
        rep.entries.push_back(e);
    }
    return rep;
}

}  // namespace stagsix
