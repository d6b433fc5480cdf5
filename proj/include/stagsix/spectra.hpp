#pragma once

#include <Eigen/Eigenvalues>
#include <random>

#include "stagsix/boundary.hpp"

namespace stagsix {

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// eigenvalues
// ---------------------------------------------------------------------------

struct DiagOptions {
    int dense_limit = kDenseLimit;
    int n_eigs = 32;            // iterative path: number of lowest levels
    double cluster_rel = 1e-8;  // relative degeneracy threshold
    double imag_tol = 1e-9;     // allowed imaginary residue
    int max_iter = 3000;
};

struct Level {
    double energy;
    int multiplicity;
    std::string sector;
};

struct SpectrumRecord {
    std::vector<Level> levels;
    int L = 0;
    Coupling coupling;
    std::string rep_kind;
    double max_imag = 0.0;  // largest imaginary residue seen
    std::vector<double> raw;  // sorted real parts, multiplicity-expanded
};

inline std::vector<Cplx> dense_eigenvalues(const Mat& h) {
    Eigen::ComplexEigenSolver<Mat> es(h, false);
    if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed");
    std::vector<Cplx> ev(h.rows());
    for (Eigen::Index i = 0; i < h.rows(); ++i) ev[i] = es.eigenvalues()(i);
    return ev;
}

/// Lowest `n_eigs` (by real part) eigenvalues of a sparse operator with real
/// spectrum, via shifted Arnoldi iteration with restarts.
inline std::vector<Cplx> arnoldi_lowest(const SpMat& h, int n_eigs, int max_iter,
                                        double tol = 1e-10) {
    const long n = h.rows();
    // Gershgorin upper bound as the spectral shift: largest of sigma - H.
    double sigma = 0.0;
    for (int k = 0; k < h.outerSize(); ++k)
        for (SpMat::InnerIterator it(h, k); it; ++it)
            sigma = std::max(sigma, std::abs(it.value()) * 2.0 + 1.0);
    auto apply = [&](const Vec& x) { return Vec(sigma * x - h * x); };

    const int m = std::min<long>(std::max(2 * n_eigs + 20, 40), n);
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> nd;
    Vec v0(n);
    for (long i = 0; i < n; ++i) v0(i) = Cplx(nd(rng), nd(rng));
    v0.normalize();

    std::vector<Cplx> ritz;
    Eigen::MatrixXcd V(n, m + 1);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
    double residual = 1.0;
    for (int restart = 0; restart * m < max_iter; ++restart) {
        V.col(0) = v0;
        int j = 0;
        for (; j < m; ++j) {
            Vec w = apply(V.col(j));
            for (int i = 0; i <= j; ++i) {
                Cplx hij = V.col(i).adjoint() * w;
                H(i, j) = hij;
                w -= hij * V.col(i);
            }
            for (int i = 0; i <= j; ++i) {  // re-orthogonalize once
                Cplx hij = V.col(i).adjoint() * w;
                H(i, j) += hij;
                w -= hij * V.col(i);
            }
            double nw = w.norm();
            H(j + 1, j) = nw;
            if (nw < 1e-12) {
                ++j;
                break;
            }
            V.col(j + 1) = w / nw;
        }
        Eigen::ComplexEigenSolver<Mat> es(H.topLeftCorner(j, j));
        std::vector<std::pair<double, int>> order;
        for (int i = 0; i < j; ++i) order.push_back({-es.eigenvalues()(i).real(), i});
        std::sort(order.begin(), order.end());
        ritz.clear();
        residual = 0.0;
        int take = std::min(n_eigs, j);
        for (int i = 0; i < take; ++i) {
            int idx = order[i].second;
            ritz.push_back(sigma - es.eigenvalues()(idx));
            double r = std::abs(H(j, j - 1)) * std::abs(es.eigenvectors()(j - 1, idx));
            residual = std::max(residual, r);
        }
        if (residual < tol) return ritz;
        // restart from the dominant Ritz direction
        int idx = order[0].second;
        v0 = V.leftCols(j) * es.eigenvectors().col(idx);
        v0.normalize();
    }
    throw ConvergenceError("arnoldi_lowest: no convergence, residual " + std::to_string(residual));
}

/// Cluster sorted eigenvalues into degenerate groups (relative gap threshold).
inline std::vector<std::vector<double>> cluster_levels(std::vector<double> ev, double rel) {
    std::sort(ev.begin(), ev.end());
    double scale = std::max(ev.back() - ev.front(), 1.0);
    std::vector<std::vector<double>> groups{{ev.front()}};
    for (size_t i = 1; i < ev.size(); ++i) {
        if (ev[i] - groups.back().back() < rel * scale)
            groups.back().push_back(ev[i]);
        else
            groups.push_back({ev[i]});
    }
    return groups;
}

inline SpectrumRecord diagonalize(const OperatorMatrix& h, const Coupling& c,
                                  DiagOptions opts = {}, const std::string& sector = "") {
    SpectrumRecord rec;
    rec.coupling = c;
    std::vector<Cplx> ev;
    if (h.is_dense() && h.rows() <= opts.dense_limit)
        ev = dense_eigenvalues(h.dense());
    else if (h.is_dense())
        ev = dense_eigenvalues(h.dense());  // caller asked for dense explicitly
    else
        ev = arnoldi_lowest(h.sparse(), opts.n_eigs, opts.max_iter);
    std::vector<double> re;
    for (Cplx z : ev) {
        rec.max_imag = std::max(rec.max_imag, std::abs(z.imag()));
        re.push_back(z.real());
    }
    std::sort(re.begin(), re.end());
    rec.raw = re;
    for (const auto& g : cluster_levels(re, opts.cluster_rel))
        rec.levels.push_back({g.front(), static_cast<int>(g.size()), sector});
    return rec;
}

/// Degeneracy multiset (sorted multiplicities) of a spectrum record.
inline std::vector<int> degeneracy_multiset(const SpectrumRecord& rec) {
    std::vector<int> m;
    for (const auto& l : rec.levels) m.push_back(l.multiplicity);
    std::sort(m.begin(), m.end());
    return m;
}

/// Joint degeneracy pattern of the commuting family: clusters of H refined by
/// the transfer-matrix eigenvalues. Two levels are degenerate only if both the
/// Hamiltonian and t(u*) eigenvalues coincide.
inline std::vector<int> family_degeneracies(const Coupling& c, int L, double u_probe = 0.3,
                                            double rel = 1e-8) {
    TLRepresentation rv = build_vertex_rep(c, 2 * L);
    Mat H = build_h_open(rv);
    // transfer eigenvalues in the C basis, mapped to the spin basis by the
    // per-edge transform; for joint clustering only eigenvalue PAIRS matter,
    // so diagonalize t and H together via simultaneous similarity: use
    // t + mu H for two generic mu and cluster pairwise.
    Mat t = open_transfer(c, Cplx(u_probe), L).to_dense();
    Mat W = cbasis_matrix(c);
    Mat Wfull = Mat::Ones(1, 1);
    for (int i = 0; i < L; ++i) Wfull = kron(Wfull, W);
    Mat Winv = Mat::Ones(1, 1);
    Mat Wi = cbasis_matrix_inv(c);
    for (int i = 0; i < L; ++i) Winv = kron(Winv, Wi);
    Mat Hc = Winv * H * Wfull;  // H in the C basis, same similarity class
    // A generic combination t + mu H separates exactly what the commuting
    // family separates; two different mu values guard against accidental
    // collisions of the combination itself.
    auto multiset_for = [&](double mu) {
        std::vector<Cplx> ev = dense_eigenvalues(Mat(t + mu * Hc));
        std::vector<std::pair<double, double>> pts;
        for (Cplx z : ev) pts.push_back({z.real(), z.imag()});
        std::sort(pts.begin(), pts.end());
        double scale = 0.0;
        for (auto& p : pts) scale = std::max(scale, std::hypot(p.first, p.second));
        std::vector<int> ms;
        int run = 1;
        for (size_t i = 1; i <= pts.size(); ++i) {
            bool close = i < pts.size() && std::hypot(pts[i].first - pts[i - 1].first,
                                                      pts[i].second - pts[i - 1].second) <
                                               rel * scale;
            if (close)
                ++run;
            else {
                ms.push_back(run);
                run = 1;
            }
        }
        std::sort(ms.begin(), ms.end());
        return ms;
    };
    std::vector<int> a = multiset_for(0.377), b = multiset_for(1.113);
    return a.size() >= b.size() ? a : b;
}

// ---------------------------------------------------------------------------
// S_z sectors of the vertex representation
// ---------------------------------------------------------------------------

/// Basis indices of the 2S_z = 2n sector on N spin-1/2 sites (bit 0 = up).
inline std::vector<long> sz_sector_indices(int N, int n) {
    std::vector<long> idx;
    for (long s = 0; s < (1L << N); ++s) {
        int sz2 = 0;
        for (int b = 0; b < N; ++b) sz2 += ((s >> b) & 1) ? -1 : 1;
        if (sz2 == 2 * n) idx.push_back(s);
    }
    return idx;
}

inline Mat submatrix(const Mat& m, const std::vector<long>& idx) {
    Mat out(idx.size(), idx.size());
    for (size_t i = 0; i < idx.size(); ++i)
        for (size_t j = 0; j < idx.size(); ++j) out(i, j) = m(idx[i], idx[j]);
    return out;
}

/// Sorted eigenvalues of H restricted to the S_z = n sector.
inline std::vector<double> sector_spectrum(const Mat& H, int N, int n) {
    auto idx = sz_sector_indices(N, n);
    if (idx.empty()) return {};
    std::vector<Cplx> ev = dense_eigenvalues(submatrix(H, idx));
    std::vector<double> re;
    for (Cplx z : ev) re.push_back(z.real());
    std::sort(re.begin(), re.end());
    return re;
}

/// Highest-weight levels of sector n: the S_z = n spectrum with the S_z = n+1
/// spectrum removed (multiset difference, tolerance-matched).
inline std::vector<double> highest_weight_levels(const Mat& H, int N, int n,
                                                 double match_tol = 1e-6) {
    std::vector<double> low = sector_spectrum(H, N, n);
    std::vector<double> up = sector_spectrum(H, N, n + 1);
    std::vector<double> lev = low;
    for (double x : up) {
        auto it = std::min_element(lev.begin(), lev.end(), [x](double a, double b) {
            return std::abs(a - x) < std::abs(b - x);
        });
        if (it == lev.end() || std::abs(*it - x) > match_tol)
            throw StructureError("highest_weight_levels: descendant level unmatched");
        lev.erase(it);
    }
    std::sort(lev.begin(), lev.end());
    return lev;
}

// ---------------------------------------------------------------------------
// gamma -> 0 decoupling
// ---------------------------------------------------------------------------

struct XXXReport {
    bool pass = false;
    double max_dev = 0.0;
    double shift = 0.0;
    std::vector<int> degeneracies;       // observed multiset
    std::vector<int> expected;           // pairwise-sum multiset
    std::vector<double> unmatched;
};

/// Spectrum of the open XXX chain -1/2 sum sigma.sigma on L sites.
inline std::vector<double> xxx_open_spectrum(int L) {
    Mat sx(2, 2), sy(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sy << 0, Cplx(0, -1), Cplx(0, 1), 0;
    sz << 1, 0, 0, -1;
    std::vector<int> dims(L, 2);
    long D = 1L << L;
    Mat H = Mat::Zero(D, D);
    for (int i = 0; i + 1 < L; ++i)
        H -= 0.5 * (embed_dense(kron(sx, sx), {i, i + 1}, dims) +
                    embed_dense(kron(sy, sy), {i, i + 1}, dims) +
                    embed_dense(kron(sz, sz), {i, i + 1}, dims));
    std::vector<double> ev;
    for (Cplx z : dense_eigenvalues(H)) ev.push_back(z.real());
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// Verifies that the chain at small gamma decouples into two open XXX chains:
/// the spectrum must match all pairwise sums up to one global shift.
inline XXXReport xxx_decoupling_report(const Coupling& c, int L, double tol = 1e-4) {
    if (c.gamma > 1e-5)
        throw std::domain_error("xxx_decoupling_report: requires gamma <= 1e-5");
    TLRepresentation rv = build_vertex_rep(c, 2 * L);
    Mat H = build_h_open(rv);
    std::vector<double> ev;
    for (Cplx z : dense_eigenvalues(H)) ev.push_back(z.real());
    std::sort(ev.begin(), ev.end());
    std::vector<double> xxx = xxx_open_spectrum(L);
    std::vector<double> pairs;
    for (double a : xxx)
        for (double b : xxx) pairs.push_back(a + b);
    std::sort(pairs.begin(), pairs.end());
    XXXReport rep;
    rep.shift = ev.front() - pairs.front();
    for (size_t i = 0; i < ev.size(); ++i) {
        double d = std::abs(ev[i] - (pairs[i] + rep.shift));
        rep.max_dev = std::max(rep.max_dev, d);
        if (d > tol) rep.unmatched.push_back(ev[i]);
    }
    for (const auto& g : cluster_levels(ev, 1e-7)) rep.degeneracies.push_back(g.size());
    std::sort(rep.degeneracies.begin(), rep.degeneracies.end());
    for (const auto& g : cluster_levels(pairs, 1e-12)) rep.expected.push_back(g.size());
    std::sort(rep.expected.begin(), rep.expected.end());
    rep.pass = rep.unmatched.empty() && rep.degeneracies == rep.expected;
    return rep;
}

// ---------------------------------------------------------------------------
// finite-size scaling
// ---------------------------------------------------------------------------

/// Fermi velocity 2 pi sin(pi - 2 gamma) / (pi - 2 gamma).
inline double fermi_velocity(const Coupling& c) {
    return 2.0 * PI * std::sin(PI - 2.0 * c.gamma) / (PI - 2.0 * c.gamma);
}

struct ScalingEstimate {
    std::vector<int> sizes;     // chain lengths N = 2L
    std::vector<double> energies;
    double f0 = 0.0, fs = 0.0;
    double value = 0.0;         // c_eff or h
    double uncertainty = 0.0;
    double v_fermi = 0.0;
    double condition = 0.0;
    std::string observable;
};

/// Fit E(N) = f0 N + fs - pi vF ceff / (24 N) on a sliding 3-point window and
/// Richardson-extrapolate the window results. Sizes are chain lengths N = 2L.
inline ScalingEstimate fit_ceff(const std::vector<int>& N, const std::vector<double>& E,
                                const Coupling& c) {
    if (N.size() < 3 || N.size() != E.size())
        throw std::invalid_argument("fit_ceff: need >= 3 sizes");
    const double vF = fermi_velocity(c);
    auto fit3 = [&](int i) {
        Eigen::Matrix3d A;
        Eigen::Vector3d b;
        for (int r = 0; r < 3; ++r) {
            double n = N[i + r];
            A(r, 0) = n;
            A(r, 1) = 1.0;
            A(r, 2) = -PI * vF / (24.0 * n);
            b(r) = E[i + r];
        }
        Eigen::Vector3d x = A.fullPivLu().solve(b);
        return std::tuple<double, double, double, double>(
            x(0), x(1), x(2), A.fullPivLu().rcond());
    };
    std::vector<double> ce;
    double f0 = 0, fs = 0, rcond = 1;
    for (size_t i = 0; i + 3 <= N.size(); ++i) {
        auto [a, b_, cc, rc] = fit3(static_cast<int>(i));
        ce.push_back(cc);
        f0 = a;
        fs = b_;
        rcond = std::min(rcond, rc);
    }
    ScalingEstimate est;
    est.sizes = N;
    est.energies = E;
    est.f0 = f0;
    est.fs = fs;
    est.v_fermi = vF;
    est.condition = 1.0 / std::max(rcond, 1e-300);
    // Richardson in 1/N over successive window estimates
    std::vector<double> r = ce;
    while (r.size() > 1) {
        std::vector<double> nxt;
        for (size_t i = 0; i + 1 < r.size(); ++i) nxt.push_back(2.0 * r[i + 1] - r[i]);
        r = nxt;
    }
    est.value = r.front();
    est.uncertainty = ce.size() > 1 ? std::abs(ce.back() - r.front()) : 0.0;
    est.observable = "ceff";
    return est;
}

/// Scaled gap h(N) = (E - E0) N / (pi vF), Richardson-extrapolated in 1/N.
inline ScalingEstimate fit_gap_exponent(const std::vector<int>& N,
                                        const std::vector<double>& E0,
                                        const std::vector<double>& E1, const Coupling& c) {
    if (N.size() < 2 || N.size() != E0.size() || N.size() != E1.size())
        throw std::invalid_argument("fit_gap_exponent: need >= 2 sizes");
    const double vF = fermi_velocity(c);
    std::vector<double> g;
    for (size_t i = 0; i < N.size(); ++i)
        g.push_back((E1[i] - E0[i]) * N[i] / (PI * vF));
    // one or two levels of 1/N Richardson: h_i = (N2 g2 - N1 g1)/(N2 - N1)
    std::vector<double> r;
    for (size_t i = 0; i + 1 < N.size(); ++i)
        r.push_back((N[i + 1] * g[i + 1] - N[i] * g[i]) / double(N[i + 1] - N[i]));
    double value = r.back();
    double unc = std::abs(r.back() - g.back());
    if (r.size() > 1) {
        value = 2.0 * r.back() - r[r.size() - 2];
        unc = std::abs(value - r.back());
    }
    ScalingEstimate est;
    est.sizes = N;
    est.energies = g;
    est.v_fermi = vF;
    est.value = value;
    est.uncertainty = unc;
    est.observable = "h";
    return est;
}

}  // namespace stagsix
