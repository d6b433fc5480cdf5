#pragma once

#include <array>
#include <map>
#include <random>
#include <set>
#include <unsupported/Eigen/KroneckerProduct>

#include "stagsix/linalg.hpp"

namespace stagsix {

struct StructureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GaugeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// six-vertex layer
// ---------------------------------------------------------------------------

/// Six-vertex R-check matrix on the spin-pair basis {uu, ud, du, dd}.
inline Mat six_vertex_rcheck(const Coupling& c, Cplx u) {
    const double g = c.gamma;
    Mat R = Mat::Zero(4, 4);
    R(0, 0) = R(3, 3) = std::sin(Cplx(g) - u);
    R(1, 1) = std::exp(Cplx(0, -1) * u) * std::sin(g);
    R(2, 2) = std::exp(Cplx(0, 1) * u) * std::sin(g);
    R(1, 2) = R(2, 1) = std::sin(u);
    return R;
}

/// d/du of six_vertex_rcheck.
inline Mat six_vertex_rcheck_deriv(const Coupling& c, Cplx u) {
    const double g = c.gamma;
    Mat R = Mat::Zero(4, 4);
    R(0, 0) = R(3, 3) = -std::cos(Cplx(g) - u);
    R(1, 1) = Cplx(0, -1) * std::exp(Cplx(0, -1) * u) * std::sin(g);
    R(2, 2) = Cplx(0, 1) * std::exp(Cplx(0, 1) * u) * std::sin(g);
    R(1, 2) = R(2, 1) = std::cos(u);
    return R;
}

/// R = P * Rcheck: matrix elements are the vertex weights read west,south -> east,north.
inline Mat six_vertex_R(const Coupling& c, Cplx u) {
    return perm_op(2) * six_vertex_rcheck(c, u);
}

// ---------------------------------------------------------------------------
// staggered block R-matrix
// ---------------------------------------------------------------------------

/// 16x16 block R on pair spaces A=(A1,A2), B=(B1,B2); sub-line 2 of each pair
/// carries the extra pi/2. Composition order fixed by the Yang-Baxter equation:
///   R_AB(u) = R_{A1B2}(u-pi/2) R_{A1B1}(u) R_{A2B2}(u) R_{A2B1}(u+pi/2).
/// Index convention: slot order (A1,A2,B1,B2), pair index = line1*2+line2,
/// full index = Apair*4 + Bpair. `deriv` selects d/du (product rule).
inline Mat block_R_spin(const Coupling& c, Cplx u, bool deriv = false) {
    const std::vector<int> dims{2, 2, 2, 2};
    struct Factor {
        std::vector<int> slots;
        Cplx shift;
    };
    // leftmost factor applied last
    const std::array<Factor, 4> factors{{{{0, 3}, Cplx(-PI / 2)},
                                         {{0, 2}, Cplx(0)},
                                         {{1, 3}, Cplx(0)},
                                         {{1, 2}, Cplx(PI / 2)}}};
    const Mat P2 = perm_op(2);
    auto piece = [&](int i, bool d) {
        const Mat r = d ? six_vertex_rcheck_deriv(c, u + factors[i].shift)
                        : six_vertex_rcheck(c, u + factors[i].shift);
        return embed_dense(P2 * r, factors[i].slots, dims);
    };
    if (!deriv) {
        Mat M = Mat::Identity(16, 16);
        for (int i = 0; i < 4; ++i) M = M * piece(i, false);
        return M;
    }
    Mat out = Mat::Zero(16, 16);
    for (int d = 0; d < 4; ++d) {
        Mat M = Mat::Identity(16, 16);
        for (int i = 0; i < 4; ++i) M = M * piece(i, i == d);
        out += M;
    }
    return out;
}

/// Change of basis per pair of lines: columns are {dd, |0>, |0bar>, uu}
/// expressed in the spin-pair basis {uu, ud, du, dd}. The edge-label order
/// {dd,|0>,|0bar>,uu} matches the four-state labels {1, 2~, 3~, 4}.
inline Mat cbasis_matrix(const Coupling& c) {
    const double g = c.gamma;
    const double n = 1.0 / std::sqrt(2.0 * std::cos(g));
    Mat U = Mat::Zero(4, 4);
    U(3, 0) = 1.0;  // dd
    U(1, 1) = n * std::polar(1.0, g / 2);   // |0>
    U(2, 1) = -n * std::polar(1.0, -g / 2);
    U(1, 2) = n * std::polar(1.0, -g / 2);  // |0bar>
    U(2, 2) = n * std::polar(1.0, g / 2);
    U(0, 3) = 1.0;  // uu
    return U;
}

/// Analytic inverse of cbasis_matrix (the 2x2 core has unit determinant).
inline Mat cbasis_matrix_inv(const Coupling& c) {
    const double g = c.gamma;
    const double n = 1.0 / std::sqrt(2.0 * std::cos(g));
    Mat V = Mat::Zero(4, 4);
    V(0, 3) = 1.0;
    V(1, 1) = n * std::polar(1.0, g / 2);
    V(1, 2) = -n * std::polar(1.0, -g / 2);
    V(2, 1) = n * std::polar(1.0, -g / 2);
    V(2, 2) = n * std::polar(1.0, g / 2);
    V(3, 0) = 1.0;
    return V;
}

enum class Gauge { Staggered, D22 };

/// Edge labels for the four-state space, in basis order.
enum EdgeLabel : int { LBL_DOWN = 0, LBL_THIN = 1, LBL_THICK = 2, LBL_UP = 3 };

/// Vertex dictionary: (east, west, north, south) edge labels for vertices 1..38.
/// 'd'=down/left arrow, 'u'=up/right arrow, '0'=thin line, 'b'=thick line.
inline const std::array<std::array<char, 4>, 38>& vertex_labels() {
    static const std::array<std::array<char, 4>, 38> tbl = {{
        {'u', 'u', 'u', 'u'}, {'d', 'd', 'd', 'd'}, {'u', 'u', 'd', 'd'}, {'d', 'd', 'u', 'u'},
        {'d', 'u', 'u', 'd'}, {'u', 'd', 'd', 'u'}, {'u', '0', '0', 'u'}, {'0', 'd', 'd', '0'},
        {'u', 'b', 'b', 'u'}, {'b', 'd', 'd', 'b'}, {'u', '0', 'd', '0'}, {'0', 'd', '0', 'u'},
        {'u', 'b', 'd', 'b'}, {'b', 'd', 'b', 'u'}, {'0', 'u', 'u', '0'}, {'d', '0', '0', 'd'},
        {'b', 'u', 'b', 'd'}, {'d', 'b', 'u', 'b'}, {'u', 'u', '0', '0'}, {'b', 'b', 'd', 'd'},
        {'0', '0', 'u', 'u'}, {'0', '0', 'd', 'd'}, {'d', 'd', 'b', 'b'}, {'d', 'd', '0', '0'},
        {'u', 'u', 'b', 'b'}, {'b', 'b', 'u', 'u'}, {'0', 'u', '0', 'd'}, {'d', '0', 'u', '0'},
        {'b', 'u', 'u', 'b'}, {'d', 'b', 'b', 'd'}, {'b', '0', 'b', '0'}, {'0', 'b', '0', 'b'},
        {'0', '0', 'b', 'b'}, {'b', 'b', '0', '0'}, {'b', '0', '0', 'b'}, {'0', 'b', 'b', '0'},
        {'0', '0', '0', '0'}, {'b', 'b', 'b', 'b'},
    }};
    return tbl;
}

inline int edge_index(char l) {
    switch (l) {
        case 'd': return LBL_DOWN;
        case '0': return LBL_THIN;
        case 'b': return LBL_THICK;
        case 'u': return LBL_UP;
    }
    throw std::logic_error("edge_index: bad label");
}

/// Matrix position (row, col) of vertex v (1-based) in the 16x16 C-basis R.
inline std::pair<int, int> vertex_position(int v) {
    const auto& lbl = vertex_labels().at(v - 1);
    int east = edge_index(lbl[0]), west = edge_index(lbl[1]);
    int north = edge_index(lbl[2]), south = edge_index(lbl[3]);
    return {east * 4 + north, west * 4 + south};
}

inline const std::set<int>& asterisk_set() {
    static const std::set<int> s{9, 10, 13, 14, 17, 18, 29, 30, 31, 32, 35, 36};
    return s;
}

/// Block R in the C basis. Staggered gauge is the raw block product; D22 gauge
/// flips the sign of the twelve asterisked vertices and carries the overall
/// factor 16 k^2 x^2 so that its entries equal the D2(2) weight table.
inline Mat block_R(const Coupling& c, Cplx u, Gauge gauge = Gauge::Staggered,
                   bool deriv = false) {
    if (gauge == Gauge::D22 && deriv)
        throw std::invalid_argument("block_R: derivative only provided in the staggered gauge");
    Mat W = kron(cbasis_matrix(c), cbasis_matrix(c));
    Mat Winv = kron(cbasis_matrix_inv(c), cbasis_matrix_inv(c));
    Mat RC = Winv * block_R_spin(c, u, deriv) * W;
    if (gauge == Gauge::D22) {
        for (int v : asterisk_set()) {
            auto [r, col] = vertex_position(v);
            RC(r, col) = -RC(r, col);
        }
        Cplx k = c.jimbo_k, x = spectral_point(u).x;
        RC *= 16.0 * k * k * x * x;
    }
    return RC;
}

// ---------------------------------------------------------------------------
// weight tables
// ---------------------------------------------------------------------------

struct WeightTable {
    std::map<int, Cplx> w;  // vertex index 1..38 -> weight
    Gauge gauge = Gauge::Staggered;
};

/// Reference weights from the published tables, staggered six-vertex column.
inline WeightTable table_weights_staggered(const Coupling& c, Cplx u) {
    const double g = c.gamma, g0 = c.gamma0;
    const Cplx u0 = -2.0 * u;
    auto s = [](Cplx z) { return std::sin(z); };
    const Cplx e2u = std::exp(Cplx(0, 2) * u), em2u = std::exp(Cplx(0, -2) * u);
    const Cplx eg = std::polar(1.0, g), emg = std::polar(1.0, -g);
    WeightTable t;
    t.gauge = Gauge::Staggered;
    auto& w = t.w;
    w[1] = w[2] = -0.25 * s(g0 - u0) * s(g0 - u0);
    w[3] = w[4] = -0.25 * s(u0) * s(u0);
    w[5] = 0.25 * em2u * s(Cplx(g0)) * (s(u0) - s(g0 - u0));
    w[6] = 0.25 * e2u * s(Cplx(g0)) * (s(u0) - s(g0 - u0));
    w[7] = w[8] = -0.25 * e2u * s(g0 - u0) * s(Cplx(g0));
    w[9] = w[10] = -0.25 * s(g0 - u0) * s(Cplx(g0));
    w[11] = w[12] = 0.25 * std::exp(Cplx(0, -1) * (Cplx(g) - 2.0 * u)) * s(u0) * s(Cplx(g0));
    w[13] = w[14] = -0.25 * eg * s(u0) * s(Cplx(g0));
    w[15] = w[16] = -0.25 * em2u * s(g0 - u0) * s(Cplx(g0));
    w[17] = w[18] = -0.25 * emg * s(u0) * s(Cplx(g0));
    for (int i = 19; i <= 26; ++i) w[i] = -0.25 * s(g0 - u0) * s(u0);
    w[27] = w[28] = 0.25 * std::exp(Cplx(0, 1) * (Cplx(g) - 2.0 * u)) * s(u0) * s(Cplx(g0));
    w[29] = w[30] = -0.25 * s(g0 - u0) * s(Cplx(g0));
    w[31] = w[32] = -0.25 * s(u0) * s(Cplx(g0));
    w[33] = w[34] = -0.25 * s(g0 - u0) * s(u0);
    w[35] = w[36] = -0.25 * s(g0 - u0) * s(Cplx(g0));
    w[37] = w[38] = -0.25 * (s(Cplx(g0)) * s(Cplx(g0)) + s(g0 - u0) * s(u0));
    return t;
}

/// Reference weights, D2(2) column (includes the 16 k^2 x^2 factor and signs).
inline WeightTable table_weights_d22(const Coupling& c, Cplx u) {
    WeightTable t = table_weights_staggered(c, u);
    t.gauge = Gauge::D22;
    Cplx k = c.jimbo_k, x = spectral_point(u).x;
    Cplx fac = 16.0 * k * k * x * x;
    for (auto& [v, wv] : t.w) wv *= asterisk_set().count(v) ? -fac : fac;
    return t;
}

/// Read the 38 vertex weights out of a C-basis block R. Any nonzero entry
/// outside the 38 allowed positions raises StructureError naming the labels.
inline WeightTable extract_weights(const Mat& rc, Gauge gauge, double rel_threshold = 1e-10) {
    if (rc.rows() != 16 || rc.cols() != 16)
        throw std::invalid_argument("extract_weights: expected a 16x16 C-basis operator");
    WeightTable t;
    t.gauge = gauge;
    std::set<std::pair<int, int>> allowed;
    for (int v = 1; v <= 38; ++v) {
        auto pos = vertex_position(v);
        t.w[v] = rc(pos.first, pos.second);
        allowed.insert(pos);
    }
    const double scale = rc.cwiseAbs().maxCoeff();
    static const char* names = "d0bu";
    for (int r = 0; r < 16; ++r)
        for (int col = 0; col < 16; ++col) {
            if (allowed.count({r, col})) continue;
            if (std::abs(rc(r, col)) > rel_threshold * scale) {
                std::string msg = "extract_weights: unexpected nonzero at (east,west,north,south)=(";
                msg += names[r / 4];
                msg += names[col / 4];
                msg += names[r % 4];
                msg += names[col % 4];
                msg += ")";
                throw StructureError(msg);
            }
        }
    return t;
}

struct GaugeReport {
    std::map<int, Cplx> ratio;     // per-vertex ratio D22 / Staggered
    Cplx global_factor;            // fitted from vertex 1
    std::set<int> flipped;         // vertices whose ratio is -global_factor
    bool thick_parity_even = true; // every vertex has an even number of thick edges
};

/// Compare a weight table against the staggered reference at the same (c,u).
/// Asserts a single global factor g with ratio +g off the asterisk set and -g
/// on it; inconsistency raises GaugeError.
inline GaugeReport compare_gauges(const WeightTable& wt, const Coupling& c, Cplx u,
                                  double tol = 1e-9) {
    WeightTable ref = table_weights_staggered(c, u);
    GaugeReport rep;
    rep.global_factor = wt.w.at(1) / ref.w.at(1);
    for (int v = 1; v <= 38; ++v) {
        Cplx r = wt.w.at(v) / ref.w.at(v);
        rep.ratio[v] = r;
        if (std::abs(r - rep.global_factor) < tol * std::abs(rep.global_factor)) {
            // plain
        } else if (std::abs(r + rep.global_factor) < tol * std::abs(rep.global_factor)) {
            rep.flipped.insert(v);
        } else {
            throw GaugeError("compare_gauges: vertex " + std::to_string(v) +
                             " ratio is not +/- the global factor");
        }
        int thick = 0;
        for (char l : vertex_labels()[v - 1])
            if (l == 'b') ++thick;
        if (thick % 2) rep.thick_parity_even = false;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Yang-Baxter and the periodic transfer matrix
// ---------------------------------------------------------------------------

/// Relative Frobenius residual of R12(u-v) R13(u) R23(v) = R23(v) R13(u) R12(u-v)
/// for the 16x16 block R on (C^4)^3.
inline double ybe_residual(const Coupling& c, Cplx u, Cplx v, Gauge gauge = Gauge::Staggered) {
    const std::vector<int> dims{4, 4, 4};
    auto R = [&](Cplx w, int a, int b) { return embed_dense(block_R(c, w, gauge), {a, b}, dims); };
    Mat lhs = R(u - v, 0, 1) * R(u, 0, 2) * R(v, 1, 2);
    Mat rhs = R(v, 1, 2) * R(u, 0, 2) * R(u - v, 0, 1);
    return (lhs - rhs).norm() / lhs.norm();
}

/// Periodic transfer matrix t(u) = Tr_a R_{a1}(u) ... R_{aL}(u) on (C^4)^{x L}.
inline OperatorMatrix periodic_transfer(const Coupling& c, Cplx u, int L,
                                        Gauge gauge = Gauge::Staggered, int dense_max_L = 6) {
    if (L > dense_max_L)
        throw CapacityError("periodic_transfer: L exceeds the dense limit");
    std::vector<int> dims(L + 1, 4);
    long D = 1;
    for (int i = 0; i <= L; ++i) D *= 4;
    Mat R = block_R(c, u, gauge);
    Mat T = Mat::Identity(D, D);
    for (int i = 1; i <= L; ++i) T = T * embed_dense(R, {0, i}, dims);
    long Dq = D / 4;
    Mat t = Mat::Zero(Dq, Dq);
    for (int a = 0; a < 4; ++a) t += T.block(a * Dq, a * Dq, Dq, Dq);
    return OperatorMatrix(std::move(t), BasisTag{BasisTag::Kind::CBasis, L, ""});
}

/// Total arrow charge per edge: diag(-1, 0, 0, +1) in the {d,0,b,u} basis.
inline Mat edge_charge() {
    Mat q = Mat::Zero(4, 4);
    q(LBL_DOWN, LBL_DOWN) = -1.0;
    q(LBL_UP, LBL_UP) = 1.0;
    return q;
}

}  // namespace stagsix
