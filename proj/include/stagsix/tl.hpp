#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "stagsix/linalg.hpp"

namespace stagsix {

enum class TLKind { Vertex, TildeVertex, Loop, RSOS };

/// Planar link state on N points: partner index per point, -1 for a
/// through-line. Through-lines may not sit under any arc.
struct LinkPattern {
    std::vector<int> partner;
    int sector() const {
        int d = 0;
        for (int p : partner) d += (p < 0);
        return d / 2;
    }
    /// Ballot-sequence encoding: 'U' arc opener, 'D' arc closer, '0' defect.
    std::string ballot() const {
        std::string s;
        for (int i = 0; i < static_cast<int>(partner.size()); ++i)
            s += partner[i] < 0 ? '0' : (partner[i] > i ? 'U' : 'D');
        return s;
    }
};

/// RSOS height path h_1..h_{N+1}; neighbouring heights differ by 1.
/// Heights run over 1..k-1 (the weight of height k vanishes, S_k = 0).
struct RSOSPath {
    std::vector<int> heights;
};

/// A concrete realization of the Temperley-Lieb generators e_1..e_{N-1}.
struct TLRepresentation {
    TLKind kind;
    int n_sites;                      // number of strands / spin-1/2 sites
    Coupling coupling;
    std::vector<OperatorMatrix> gens; // e_1..e_{N-1}
    std::vector<std::string> basis;   // printable basis labels
    int sector_j = -1;                // loop sector
    int h_left = 0, h_right = 0;      // RSOS boundary heights

    long dim() const { return gens.empty() ? 0 : gens.front().rows(); }
    Mat gen(int i) const { return gens.at(i).to_dense(); }
};

// ---------------------------------------------------------------------------
// vertex representations
// ---------------------------------------------------------------------------

/// Middle 4x4 block of e_i on two spin-1/2 sites, basis {uu, ud, du, dd}.
inline Mat tl_vertex_block(const Coupling& c, bool tilde) {
    Mat b = Mat::Zero(4, 4);
    if (!tilde) {
        b(1, 1) = std::polar(1.0, -c.gamma);
        b(2, 2) = std::polar(1.0, c.gamma);
        b(1, 2) = b(2, 1) = 1.0;
    } else {
        b(1, 1) = std::polar(1.0, c.gamma);
        b(2, 2) = std::polar(1.0, -c.gamma);
        b(1, 2) = b(2, 1) = -1.0;
    }
    return b;
}

/// Same block assembled from the Pauli expansion; used to cross-check the
/// explicit block form.
inline Mat tl_vertex_block_pauli(const Coupling& c, bool tilde) {
    Mat sx(2, 2), sy(2, 2), sz(2, 2), id = Mat::Identity(2, 2);
    sx << 0, 1, 1, 0;
    sy << 0, Cplx(0, -1), Cplx(0, 1), 0;
    sz << 1, 0, 0, -1;
    const double g = c.gamma;
    double sgn = tilde ? -1.0 : 1.0;
    Mat b = 0.5 * (sgn * (kron(sx, sx) + kron(sy, sy)) - std::cos(g) * kron(sz, sz) +
                   std::cos(g) * kron(id, id) -
                   sgn * Cplx(0, 1) * std::sin(g) * (kron(sz, id) - kron(id, sz)));
    return b;
}

inline TLRepresentation build_vertex_rep_impl(const Coupling& c, int N, bool tilde,
                                              bool allow_sparse) {
    if (N < 2) throw std::domain_error("build_vertex_rep: N >= 2 required");
    long dim = 1L << N;
    if (dim > kDenseLimit && !allow_sparse)
        throw CapacityError("build_vertex_rep: dimension " + std::to_string(dim) +
                            " exceeds the dense limit; request the sparse path");
    TLRepresentation rep;
    rep.kind = tilde ? TLKind::TildeVertex : TLKind::Vertex;
    rep.n_sites = N;
    rep.coupling = c;
    std::vector<int> dims(N, 2);
    Mat blk = tl_vertex_block(c, tilde);
    for (int i = 0; i < N - 1; ++i) {
        SpMat e = embed(blk, {i, i + 1}, dims);
        if (dim <= kDenseLimit)
            rep.gens.emplace_back(Mat(e), BasisTag{BasisTag::Kind::Spin, N, ""});
        else
            rep.gens.emplace_back(std::move(e), BasisTag{BasisTag::Kind::Spin, N, ""});
    }
    return rep;
}

inline TLRepresentation build_vertex_rep(const Coupling& c, int N, bool allow_sparse = false) {
    return build_vertex_rep_impl(c, N, false, allow_sparse);
}
inline TLRepresentation build_tilde_rep(const Coupling& c, int N, bool allow_sparse = false) {
    return build_vertex_rep_impl(c, N, true, allow_sparse);
}

/// Periodic variant: e_1..e_{N-1} plus the wrap generator e_N on sites (N,1).
inline TLRepresentation build_vertex_rep_periodic(const Coupling& c, int N,
                                                  bool allow_sparse = false) {
    TLRepresentation rep = build_vertex_rep(c, N, allow_sparse);
    std::vector<int> dims(N, 2);
    Mat blk = tl_vertex_block(c, false);
    SpMat e = embed(blk, {N - 1, 0}, dims);
    if ((1L << N) <= kDenseLimit)
        rep.gens.emplace_back(Mat(e), BasisTag{BasisTag::Kind::Spin, N, ""});
    else
        rep.gens.emplace_back(std::move(e), BasisTag{BasisTag::Kind::Spin, N, ""});
    return rep;
}

// ---------------------------------------------------------------------------
// loop representation (standard modules)
// ---------------------------------------------------------------------------

inline void enumerate_links(int N, int two_j, std::vector<LinkPattern>& out) {
    std::vector<int> state(N, -2);
    std::vector<int> stack;
    int ndef = 0;
    std::function<void(int)> rec = [&](int pos) {
        if (pos == N) {
            if (stack.empty() && ndef == two_j) {
                LinkPattern lp;
                lp.partner = state;
                out.push_back(lp);
            }
            return;
        }
        // open an arc
        stack.push_back(pos);
        state[pos] = -2;
        rec(pos + 1);
        stack.pop_back();
        // close the innermost open arc
        if (!stack.empty()) {
            int a = stack.back();
            stack.pop_back();
            state[a] = pos;
            state[pos] = a;
            rec(pos + 1);
            stack.push_back(a);
            state[a] = -2;
        }
        // through-line: only outside all arcs
        if (stack.empty() && ndef < two_j) {
            state[pos] = -1;
            ++ndef;
            rec(pos + 1);
            --ndef;
        }
        state[pos] = -2;
    };
    rec(0);
    std::sort(out.begin(), out.end(),
              [](const LinkPattern& a, const LinkPattern& b) { return a.ballot() < b.ballot(); });
}

/// dim W_j = C(N, N/2 - j) - C(N, N/2 - j - 1).
inline long ballot_dim(int N, int j) {
    auto binom = [](long n, long r) -> long {
        if (r < 0 || r > n) return 0;
        long v = 1;
        for (long i = 0; i < r; ++i) v = v * (n - i) / (i + 1);
        return v;
    };
    return binom(N, N / 2 - j) - binom(N, N / 2 - j - 1);
}

inline TLRepresentation build_loop_rep(const Coupling& c, int N, int j) {
    if (N % 2 != 0) throw std::domain_error("build_loop_rep: N must be even");
    if (j < 0 || j > N / 2) throw std::domain_error("build_loop_rep: require 0 <= j <= N/2");
    std::vector<LinkPattern> basis;
    enumerate_links(N, 2 * j, basis);
    std::map<std::string, int> index;
    for (int i = 0; i < static_cast<int>(basis.size()); ++i) index[basis[i].ballot()] = i;
    const double sq = c.sqrtQ;
    TLRepresentation rep;
    rep.kind = TLKind::Loop;
    rep.n_sites = N;
    rep.coupling = c;
    rep.sector_j = j;
    for (const auto& b : basis) rep.basis.push_back(b.ballot());
    long D = static_cast<long>(basis.size());
    for (int i = 0; i < N - 1; ++i) {
        Mat M = Mat::Zero(D, D);
        for (long col = 0; col < D; ++col) {
            const auto& s = basis[col].partner;
            int a = s[i], b = s[i + 1];
            if (a == -1 && b == -1) continue;  // contracting two through-lines kills the state
            if (a == i + 1) {                  // closed loop
                M(col, col) += sq;
                continue;
            }
            LinkPattern ns = basis[col];
            if (a >= 0 && b >= 0) {
                ns.partner[a] = b;
                ns.partner[b] = a;
            } else if (a == -1) {
                ns.partner[b] = -1;
            } else {
                ns.partner[a] = -1;
            }
            ns.partner[i] = i + 1;
            ns.partner[i + 1] = i;
            M(index.at(ns.ballot()), col) += 1.0;
        }
        rep.gens.emplace_back(std::move(M),
                              BasisTag{BasisTag::Kind::Diagram, N, "loop[" + std::to_string(j) + "]"});
    }
    return rep;
}

// ---------------------------------------------------------------------------
// RSOS representation
// ---------------------------------------------------------------------------

inline double rsos_S(int a, int k) { return std::sin(a * PI / k) / std::sin(PI / k); }

inline std::vector<RSOSPath> rsos_paths(int N, int k, int hl, int hr) {
    std::vector<RSOSPath> out;
    std::vector<int> seq{hl};
    std::function<void()> rec = [&]() {
        if (static_cast<int>(seq.size()) == N + 1) {
            if (seq.back() == hr) out.push_back({seq});
            return;
        }
        for (int nh : {seq.back() - 1, seq.back() + 1}) {
            if (nh < 1 || nh > k - 1) continue;
            seq.push_back(nh);
            rec();
            seq.pop_back();
        }
    };
    rec();
    return out;
}

inline TLRepresentation build_rsos_rep(const Coupling& c, int N, int h_left, int h_right) {
    if (!c.has_k() || !c.k_int_exact)
        throw std::domain_error("build_rsos_rep: requires an exact integer level (use --k)");
    const int k = c.k();
    if (h_left < 1 || h_left > k || h_right < 1 || h_right > k)
        throw std::domain_error("build_rsos_rep: boundary heights out of range");
    if (h_left > k - 1 || h_right > k - 1)
        throw std::domain_error("build_rsos_rep: height k has vanishing weight (S_k = 0)");
    auto basis = rsos_paths(N, k, h_left, h_right);
    if (basis.empty())
        throw std::domain_error("build_rsos_rep: no valid path (parity of |h_right-h_left| vs N)");
    std::map<std::vector<int>, int> index;
    for (int i = 0; i < static_cast<int>(basis.size()); ++i) index[basis[i].heights] = i;
    TLRepresentation rep;
    rep.kind = TLKind::RSOS;
    rep.n_sites = N;
    rep.coupling = c;
    rep.h_left = h_left;
    rep.h_right = h_right;
    for (const auto& p : basis) {
        std::string s;
        for (int h : p.heights) s += std::to_string(h);
        rep.basis.push_back(s);
    }
    long D = static_cast<long>(basis.size());
    for (int i = 1; i <= N - 1; ++i) {  // e_i updates height h_{i+1} (1-based)
        Mat M = Mat::Zero(D, D);
        for (long col = 0; col < D; ++col) {
            const auto& h = basis[col].heights;
            if (h[i - 1] != h[i + 1]) continue;
            for (int hp : {h[i - 1] - 1, h[i - 1] + 1}) {
                if (hp < 1 || hp > k - 1) continue;
                RSOSPath np = basis[col];
                np.heights[i] = hp;
                auto it = index.find(np.heights);
                if (it == index.end()) continue;
                M(it->second, col) += std::sqrt(rsos_S(h[i], k) * rsos_S(hp, k)) / rsos_S(h[i - 1], k);
            }
        }
        rep.gens.emplace_back(std::move(M), BasisTag{BasisTag::Kind::Diagram, N, "rsos"});
    }
    return rep;
}

// ---------------------------------------------------------------------------
// the C symmetry operator
// ---------------------------------------------------------------------------

/// C = C_1 C_3 ... C_{2L-1}, C_i = 1 - e_i / cos(gamma).
inline OperatorMatrix build_C_operator(const TLRepresentation& rep) {
    if (rep.n_sites % 2 != 0)
        throw std::domain_error("build_C_operator: even number of sites required");
    const double cg = std::cos(rep.coupling.gamma);
    long D = rep.dim();
    Mat C = Mat::Identity(D, D);
    for (size_t i = 0; i + 1 <= rep.gens.size(); i += 2)
        C = C * (Mat::Identity(D, D) - rep.gen(static_cast<int>(i)) / cg);
    return OperatorMatrix(std::move(C), rep.gens.front().tag());
}

}  // namespace stagsix
