#pragma once

#include <Eigen/Eigenvalues>

#include "stagsix/lattice.hpp"
#include "stagsix/tl.hpp"

namespace stagsix {

struct IntegrabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// K-matrices
// ---------------------------------------------------------------------------

struct KEntries {
    Cplx Y1, Y2, Y3, Y4, Y5, Y6;
};

inline KEntries k_entries(Cplx lambda, Cplx k) {
    KEntries y;
    Cplx el = std::exp(lambda), e2l = std::exp(2.0 * lambda), e3l = std::exp(3.0 * lambda);
    y.Y1 = -(e2l + k) / el;
    y.Y4 = -e3l * (e2l + k);
    y.Y2 = y.Y3 = -0.5 * (1.0 + e2l) * el * (1.0 + k);
    y.Y5 = y.Y6 = 0.5 * (e2l - 1.0) * (1.0 - k) * el;
    return y;
}

/// K^-(lambda) in the four-state basis {1,2,3,4}.
inline Mat k_minus(const Coupling& c, Cplx lambda) {
    KEntries y = k_entries(lambda, c.jimbo_k);
    Mat K = Mat::Zero(4, 4);
    K(0, 0) = y.Y1;
    K(1, 1) = y.Y2;
    K(2, 2) = y.Y3;
    K(1, 2) = y.Y5;
    K(2, 1) = y.Y6;
    K(3, 3) = y.Y4;
    return K;
}

/// K^- in the C basis where it is diagonal: diag(Y1, Y2+Y5, Y2-Y6, Y4).
inline Mat k_minus_cbasis(const Coupling& c, Cplx lambda) {
    KEntries y = k_entries(lambda, c.jimbo_k);
    Mat K = Mat::Zero(4, 4);
    K(0, 0) = y.Y1;
    K(1, 1) = y.Y2 + y.Y5;
    K(2, 2) = y.Y2 - y.Y6;
    K(3, 3) = y.Y4;
    return K;
}

inline Cplx k_rho(const Coupling& c) { return -std::log(c.jimbo_k); }  // principal branch

inline Mat k_m_matrix(const Coupling& c) {
    Mat M = Mat::Zero(4, 4);
    M(0, 0) = c.jimbo_k;
    M(1, 1) = M(2, 2) = 1.0;
    M(3, 3) = 1.0 / c.jimbo_k;
    return M;
}

/// K^+(lambda) = K^-(-rho-lambda)^T M, C basis.
inline Mat k_plus_cbasis(const Coupling& c, Cplx lambda) {
    return k_minus_cbasis(c, -k_rho(c) - lambda).transpose() * k_m_matrix(c);
}

/// The spectral argument of the K-matrices for a transfer matrix at u.
inline Cplx k_lambda_of_u(Cplx u) { return Cplx(0, 2) * u; }

/// Left/right boundary matrices bundled with their conventions.
struct BoundaryPair {
    std::function<Mat(Cplx)> k_minus_fn;  // u -> K^-(lambda(u)), C basis
    std::function<Mat(Cplx)> k_plus_fn;   // u -> K^+(lambda(u)), C basis
    Cplx rho;
    Mat m_matrix;
};

inline BoundaryPair make_boundary_pair(const Coupling& c) {
    BoundaryPair bp;
    bp.rho = k_rho(c);
    bp.m_matrix = k_m_matrix(c);
    bp.k_minus_fn = [c](Cplx u) { return k_minus_cbasis(c, k_lambda_of_u(u)); };
    bp.k_plus_fn = [c](Cplx u) { return k_plus_cbasis(c, k_lambda_of_u(u)); };
    return bp;
}

/// Relative residual of the reflection equation
///   R12(u-v) K1(u) R21(u+v) K2(v) = K2(v) R12(u+v) K1(u) R21(u-v).
inline double boundary_ybe_residual(const Coupling& c, Cplx u, Cplx v,
                                    Gauge gauge = Gauge::D22) {
    Mat P = perm_op(4);
    auto R12 = [&](Cplx w) { return block_R(c, w, gauge); };
    auto R21 = [&](Cplx w) { return Mat(P * block_R(c, w, gauge) * P); };
    Mat K1 = kron(k_minus_cbasis(c, k_lambda_of_u(u)), Mat::Identity(4, 4));
    Mat K2 = kron(Mat::Identity(4, 4), k_minus_cbasis(c, k_lambda_of_u(v)));
    Mat lhs = R12(u - v) * K1 * R21(u + v) * K2;
    Mat rhs = K2 * R12(u + v) * K1 * R21(u - v);
    return (lhs - rhs).norm() / lhs.norm();
}

// ---------------------------------------------------------------------------
// double-row transfer matrix
// ---------------------------------------------------------------------------

/// Sklyanin transfer matrix
///   t(u) = Tr_a [ K+_a(u) R_{a1}(u)...R_{aL}(u) K-_a(u) R_{La}(u)...R_{1a}(u) ]
/// on (C^4)^{x L}; the return pass runs through the sites in reverse order.
inline OperatorMatrix open_transfer(const Coupling& c, Cplx u, int L,
                                    Gauge gauge = Gauge::Staggered, int dense_max_L = 5) {
    if (L > dense_max_L) throw CapacityError("open_transfer: L exceeds the dense limit");
    std::vector<int> dims(L + 1, 4);
    long D = 1;
    for (int i = 0; i <= L; ++i) D *= 4;
    Mat R = block_R(c, u, gauge);
    Mat T = embed_dense(k_plus_cbasis(c, k_lambda_of_u(u)), {0}, dims);
    for (int i = 1; i <= L; ++i) T = T * embed_dense(R, {0, i}, dims);
    T = T * embed_dense(k_minus_cbasis(c, k_lambda_of_u(u)), {0}, dims);
    for (int i = L; i >= 1; --i) T = T * embed_dense(R, {i, 0}, dims);
    long Dq = D / 4;
    Mat t = Mat::Zero(Dq, Dq);
    for (int a = 0; a < 4; ++a) t += T.block(a * Dq, a * Dq, Dq, Dq);
    return OperatorMatrix(std::move(t), BasisTag{BasisTag::Kind::CBasis, L, ""});
}

// ---------------------------------------------------------------------------
// Hamiltonian limit
// ---------------------------------------------------------------------------

/// Weight of vertex 1 (normalization making Rhat(0) = P).
inline Cplx block_w1(const Coupling& c, Cplx u) {
    Cplx z = Cplx(c.gamma0) + 2.0 * u;  // gamma0 - u0
    return -0.25 * std::sin(z) * std::sin(z);
}

/// Rhat(u) = block_R(u)/w1(u) in the staggered gauge; Rhat(0) = P.
inline Mat block_R_hat(const Coupling& c, Cplx u) {
    return block_R(c, u, Gauge::Staggered) / block_w1(c, u);
}

/// Analytic d/du of Rhat at u=0 via the product rule.
inline Mat block_R_hat_deriv0(const Coupling& c) {
    Cplx w1 = block_w1(c, 0.0);
    Cplx dw1 = -std::sin(Cplx(c.gamma0)) * std::cos(Cplx(c.gamma0));  // d/du of -1/4 sin^2(g0+2u)
    Mat W = kron(cbasis_matrix(c), cbasis_matrix(c));
    Mat Winv = kron(cbasis_matrix_inv(c), cbasis_matrix_inv(c));
    Mat R0 = Winv * block_R_spin(c, 0.0, false) * W;
    Mat dR = Winv * block_R_spin(c, 0.0, true) * W;
    return dR / w1 - R0 * (dw1 / (w1 * w1));
}

/// Richardson two-level central difference of a matrix-valued function.
inline Mat richardson_deriv(const std::function<Mat(double)>& f, double h = 1e-4) {
    return (8.0 * (f(h) - f(-h)) - (f(2 * h) - f(-2 * h))) / (12.0 * h);
}

/// Normalized K^-: Khat(0) = 1.
inline Mat k_minus_hat(const Coupling& c, Cplx u) {
    return k_minus_cbasis(c, k_lambda_of_u(u)) / (-(1.0 + c.jimbo_k));
}

/// Open integrable Hamiltonian assembled from the transfer-matrix derivative:
///   H = sum_n (Rhat'(0) P)_{n,n+1} + 1/2 Khat^-'(0) at site L
///       + Tr_a[K+_a(0) (Rhat'(0) P)_{a1}] / Tr K+(0) at site 1.
/// `analytic` selects the closed-form R derivative; otherwise Richardson.
inline Mat sklyanin_hamiltonian(const Coupling& c, int L, bool analytic = true) {
    std::vector<int> dims(L, 4);
    Mat P = perm_op(4);
    Mat dR = analytic ? block_R_hat_deriv0(c)
                      : richardson_deriv([&](double h) { return block_R_hat(c, Cplx(h)); });
    Mat dRP = dR * P;
    Mat dKm = richardson_deriv([&](double h) { return k_minus_hat(c, Cplx(h)); }, 1e-4);
    Mat Kp0 = k_plus_cbasis(c, 0.0);
    Cplx trKp = Kp0.trace();
    long D = 1;
    for (int i = 0; i < L; ++i) D *= 4;
    Mat H = Mat::Zero(D, D);
    for (int n = 0; n + 1 < L; ++n) H += embed_dense(dRP, {n, n + 1}, dims);
    H += 0.5 * embed_dense(dKm, {L - 1}, dims);
    Mat bnd = trace_first(Mat(kron(Kp0, Mat::Identity(4, 4)) * dRP), 4, 4) / trKp;
    H += embed_dense(bnd, {0}, dims);
    return H;
}

/// Same Hamiltonian from Richardson differences of the full transfer matrix,
///   t'(0) = 2 H Tr K+(0) + Tr K+'(0).
inline Mat sklyanin_hamiltonian_from_t(const Coupling& c, int L) {
    std::vector<int> dims(L + 1, 4);
    auto t_hat = [&](double u) {
        long D = 1;
        for (int i = 0; i <= L; ++i) D *= 4;
        Mat R = block_R_hat(c, Cplx(u));
        Mat T = embed_dense(k_plus_cbasis(c, k_lambda_of_u(Cplx(u))), {0}, dims);
        for (int i = 1; i <= L; ++i) T = T * embed_dense(R, {0, i}, dims);
        T = T * embed_dense(k_minus_hat(c, Cplx(u)), {0}, dims);
        for (int i = L; i >= 1; --i) T = T * embed_dense(R, {i, 0}, dims);
        long Dq = D / 4;
        Mat t = Mat::Zero(Dq, Dq);
        for (int a = 0; a < 4; ++a) t += T.block(a * Dq, a * Dq, Dq, Dq);
        return t;
    };
    Mat tp = richardson_deriv(t_hat, 1e-4);
    Mat dKp = richardson_deriv(
        [&](double h) { return k_plus_cbasis(c, k_lambda_of_u(Cplx(h))); }, 1e-4);
    Cplx trKp = k_plus_cbasis(c, 0.0).trace();
    long Dq = tp.rows();
    return (tp - dKp.trace() * Mat::Identity(Dq, Dq)) / (2.0 * trKp);
}

// ---------------------------------------------------------------------------
// Temperley-Lieb form of the open Hamiltonian
// ---------------------------------------------------------------------------

/// H = -(1/cos g)(e_1 + e_{N-1}) + 2 cos g sum_m e_m - sum_m (e_m e_{m+1} + e_{m+1} e_m),
/// valid on any representation of the generators.
inline Mat build_h_open(const TLRepresentation& rep) {
    const int n = static_cast<int>(rep.gens.size());  // N-1 generators
    if (n < 1) throw std::domain_error("build_h_open: representation has no generators");
    const double cg = std::cos(rep.coupling.gamma);
    long D = rep.dim();
    Mat H = Mat::Zero(D, D);
    Mat first = rep.gen(0), last = rep.gen(n - 1);
    H -= (first + last) / cg;
    for (int m = 0; m < n; ++m) H += 2.0 * cg * rep.gen(m);
    for (int m = 0; m + 1 < n; ++m) {
        Mat a = rep.gen(m), b = rep.gen(m + 1);
        H -= a * b + b * a;
    }
    return H;
}

/// Periodic Hamiltonian: 2 cos g sum e_m - sum (e_m e_{m+1} + e_{m+1} e_m) with
/// indices mod N. Expects a representation carrying the wrap generator e_N.
inline Mat build_h_periodic(const TLRepresentation& rep) {
    const int n = static_cast<int>(rep.gens.size());
    if (n != rep.n_sites)
        throw std::domain_error("build_h_periodic: periodic wrap generator e_N required");
    const double cg = std::cos(rep.coupling.gamma);
    long D = rep.dim();
    Mat H = Mat::Zero(D, D);
    for (int m = 0; m < n; ++m) {
        Mat a = rep.gen(m), b = rep.gen((m + 1) % n);
        H += 2.0 * cg * a - (a * b + b * a);
    }
    return H;
}

/// Affine map a*x+b between two real spectra (fitted from the extreme levels),
/// plus the max deviation over the sorted multisets.
struct AffineMatch {
    double a = 1.0, b = 0.0;
    double max_dev = 0.0;
};

inline AffineMatch affine_match(std::vector<double> s1, std::vector<double> s2) {
    if (s1.size() != s2.size()) throw std::invalid_argument("affine_match: size mismatch");
    std::sort(s1.begin(), s1.end());
    std::sort(s2.begin(), s2.end());
    AffineMatch m;
    m.a = (s1.back() - s1.front()) / (s2.back() - s2.front());
    m.b = s1.front() - m.a * s2.front();
    for (size_t i = 0; i < s1.size(); ++i)
        m.max_dev = std::max(m.max_dev, std::abs(s1[i] - (m.a * s2[i] + m.b)));
    return m;
}

struct HamiltonianBundle {
    Mat h_sklyanin;   // from the transfer-matrix derivative (constant imaginary offset)
    Mat h_tl;         // TL form, vertex representation on N = 2L sites
    Mat h_tilde;      // TL form over the tilde generators
    AffineMatch normalization;  // spectra: sklyanin ~ a * tl + b
};

inline std::vector<double> real_spectrum(const Mat& H) {
    Eigen::ComplexEigenSolver<Mat> es(H, false);
    std::vector<double> ev(H.rows());
    for (Eigen::Index i = 0; i < H.rows(); ++i) ev[i] = es.eigenvalues()(i).real();
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// Builds both Hamiltonians, cross-checks the two derivative routes, fits the
/// affine normalization on the full spectra and verifies it.
inline HamiltonianBundle hamiltonian_from_transfer(const Coupling& c, int L,
                                                   double route_tol = 1e-8,
                                                   double match_tol = 1e-7) {
    HamiltonianBundle hb;
    hb.h_sklyanin = sklyanin_hamiltonian(c, L, true);
    Mat alt = sklyanin_hamiltonian(c, L, false);
    if ((hb.h_sklyanin - alt).cwiseAbs().maxCoeff() > route_tol)
        throw IntegrabilityError("hamiltonian_from_transfer: analytic and Richardson derivatives disagree");
    TLRepresentation rv = build_vertex_rep(c, 2 * L);
    TLRepresentation rt = build_tilde_rep(c, 2 * L);
    hb.h_tl = build_h_open(rv);
    hb.h_tilde = build_h_open(rt);
    hb.normalization = affine_match(real_spectrum(hb.h_sklyanin), real_spectrum(hb.h_tl));
    if (hb.normalization.max_dev > match_tol)
        throw IntegrabilityError("hamiltonian_from_transfer: affine spectral match failed, dev " +
                                 std::to_string(hb.normalization.max_dev));
    return hb;
}

}  // namespace stagsix
