#pragma once

#include <Eigen/Dense>

#include "stagsix/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stagsix {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// kernels of the logarithmic equations (continuous, odd branches)
// ---------------------------------------------------------------------------

/// k(a) = -i log(cosh(ig+a)/cosh(ig-a)) = 2 atan(tanh(a) tan(g)).
inline double bk(double g, double a) { return 2.0 * std::atan(std::tanh(a) * std::tan(g)); }
inline double bk_d(double g, double a) {
    double t = std::tanh(a), tg = std::tan(g);
    return 2.0 * tg * (1.0 - t * t) / (1.0 + t * t * tg * tg);
}

/// theta^1(x) = -i log(cosh(ig+x/2)/cosh(ig-x/2)).
inline double th1(double g, double x) { return 2.0 * std::atan(std::tanh(x / 2) * std::tan(g)); }
inline double th1_d(double g, double x) {
    double t = std::tanh(x / 2), tg = std::tan(g);
    return tg * (1.0 - t * t) / (1.0 + t * t * tg * tg);
}

/// theta^0(x) = -i log(sinh(ig+x/2)/sinh(ig-x/2)), odd continuous branch.
inline double th0(double g, double x) {
    return 2.0 * std::atan2(std::cosh(x / 2) * std::sin(g), std::sinh(x / 2) * std::cos(g)) - PI;
}
inline double th0_d(double g, double x) {
    double zr = std::sinh(x / 2) * std::cos(g), zi = std::cosh(x / 2) * std::sin(g);
    double wr = 0.5 * std::cosh(x / 2) * std::cos(g), wi = 0.5 * std::sinh(x / 2) * std::sin(g);
    return 2.0 * (wi * zr - wr * zi) / (zr * zr + zi * zi);
}

// ---------------------------------------------------------------------------
// Bethe state
// ---------------------------------------------------------------------------

enum class RootClass {
    XXZSubsetEven,
    XXZSubsetOdd,
    ShiftedDescendant,
    ExoticRealAxis,
    ConjugatePairSea,
    Unclassified
};

inline std::string to_string(RootClass c) {
    switch (c) {
        case RootClass::XXZSubsetEven: return "XXZSubsetEven";
        case RootClass::XXZSubsetOdd: return "XXZSubsetOdd";
        case RootClass::ShiftedDescendant: return "ShiftedDescendant";
        case RootClass::ExoticRealAxis: return "ExoticRealAxis";
        case RootClass::ConjugatePairSea: return "ConjugatePairSea";
        default: return "Unclassified";
    }
}

struct BetheSeed {
    std::vector<double> I0, I1;  // Bethe numbers of the two line families
    int shift0 = 0, shift1 = 0;  // descendant shifts applied
    std::vector<Cplx> roots;     // optional explicit complex seed
    bool complex_seed = false;
};

struct BetheState {
    std::vector<Cplx> roots;
    BetheSeed seed;
    int sector = 0;  // magnetization n; m = L - n roots
    int L = 0;
    double residual = 0.0;  // max multiplicative BAE residual
    double energy = 0.0;
    RootClass classification = RootClass::Unclassified;
    int shift0 = 0, shift1 = 0;
};

/// Per-root relative residual of the product-form equations.
inline std::vector<double> bae_residual(const Coupling& c, int L, const std::vector<Cplx>& lam,
                                        double min_sep = 1e-8) {
    const double g = c.gamma;
    for (size_t i = 0; i < lam.size(); ++i)
        for (size_t j = i + 1; j < lam.size(); ++j)
            if (std::abs(lam[i] - lam[j]) < min_sep)
                throw SolverError("bae_residual: coincident roots");
    std::vector<double> out;
    const Cplx ig(0, g);
    for (size_t j = 0; j < lam.size(); ++j) {
        Cplx lhs = std::pow(std::sinh(lam[j] + ig) / std::sinh(lam[j] - ig), 2.0 * L);
        Cplx rhs = 1.0;
        for (size_t k = 0; k < lam.size(); ++k) {
            if (k == j) continue;
            Cplx d = 0.5 * (lam[j] - lam[k]), s = 0.5 * (lam[j] + lam[k]);
            rhs *= std::sinh(d + ig) / std::sinh(d - ig);
            rhs *= std::sinh(s + ig) / std::sinh(s - ig);
        }
        out.push_back(std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs)));
    }
    return out;
}

inline double max_residual(const Coupling& c, int L, const std::vector<Cplx>& lam) {
    if (lam.empty()) return 0.0;
    auto r = bae_residual(c, L, lam);
    return *std::max_element(r.begin(), r.end());
}

/// E = sum_j 2 sin^2(2g) / (cosh 2 lambda_j - cos 2g).
inline double bethe_energy(const Coupling& c, const std::vector<Cplx>& lam) {
    const double g = c.gamma;
    Cplx E = 0.0;
    for (Cplx l : lam) {
        Cplx den = std::cosh(2.0 * l) - std::cos(2.0 * g);
        if (std::abs(den) < 1e-12) throw SolverError("bethe_energy: root at a pole of the energy");
        E += 2.0 * std::sin(2.0 * g) * std::sin(2.0 * g) / den;
    }
    if (std::abs(E.imag()) > 1e-10)
        throw SolverError("bethe_energy: imaginary residue " + std::to_string(E.imag()));
    return E.real();
}

// ---------------------------------------------------------------------------
// seeds
// ---------------------------------------------------------------------------

/// Ground-state Bethe numbers for sector n (m = L-n roots): half-integers
/// {j-1/2} per family for m even, integers {0..p} / {1..p} for m odd.
inline BetheSeed ground_seed(int L, int n) {
    int m = L - n;
    if (m < 0) throw std::domain_error("ground_seed: sector exceeds L");
    BetheSeed s;
    if (m % 2 == 0) {
        int p = m / 2;
        for (int j = 1; j <= p; ++j) {
            s.I0.push_back(j - 0.5);
            s.I1.push_back(j - 0.5);
        }
    } else {
        int p = (m - 1) / 2;
        for (int j = 0; j <= p; ++j) s.I0.push_back(j);
        for (int j = 1; j <= p; ++j) s.I1.push_back(j);
    }
    return s;
}

/// Shift the largest s0 numbers of I0 and s1 of I1 up by one.
inline BetheSeed shifted_seed(int L, int n, int s0, int s1) {
    BetheSeed s = ground_seed(L, n);
    if (s0 > static_cast<int>(s.I0.size()) || s1 > static_cast<int>(s.I1.size()))
        throw std::domain_error("shifted_seed: shift exceeds family size");
    for (int i = 0; i < s0; ++i) s.I0[s.I0.size() - 1 - i] += 1.0;
    for (int i = 0; i < s1; ++i) s.I1[s.I1.size() - 1 - i] += 1.0;
    s.shift0 = s0;
    s.shift1 = s1;
    return s;
}

/// XXZ-subset seed plus the boundary parameters (Lambda, Lambda') of the
/// reduced equations: even sector (pi/2 - g0/2, 0); odd (pi/2 - g0/2, pi - g0).
struct XXZSubsetSeed {
    BetheSeed seed;
    double Lambda, LambdaPrime;
    bool odd;
};

inline XXZSubsetSeed xxz_subset_seed(const Coupling& c, int L, int n) {
    XXZSubsetSeed s;
    s.seed = ground_seed(L, n);
    s.odd = (L - n) % 2 != 0;
    s.Lambda = PI / 2 - c.gamma0 / 2;
    s.LambdaPrime = s.odd ? PI - c.gamma0 : 0.0;
    return s;
}

// ---------------------------------------------------------------------------
// two-family real solver (states on the lines Im = +-pi/2)
// ---------------------------------------------------------------------------

struct TwoFamilyResult {
    std::vector<double> a0, a1;
    int iterations = 0;
    double log_residual = 0.0;
    bool converged = false;
};

/// Newton iteration with analytic Jacobian and Armijo halving on
///   2L k(a0_j) = 2 pi I0_j + sum_{l != j}[th0(a0_j - a0_l) + th1(a0_j + a0_l)]
///               + sum_l [th1(a0_j - a1_l) + th0(a0_j + a1_l)]
/// and the family-swapped equation for a1.
inline TwoFamilyResult solve_two_family(const Coupling& c, int L, const BetheSeed& seed,
                                        const std::vector<double>* a0_init = nullptr,
                                        const std::vector<double>* a1_init = nullptr,
                                        int max_iter = 200, double tol = 1e-13) {
    const double g = c.gamma;
    const int m0 = static_cast<int>(seed.I0.size()), m1 = static_cast<int>(seed.I1.size());
    const int n = m0 + m1;
    Eigen::VectorXd x(n);
    for (int i = 0; i < m0; ++i)
        x(i) = a0_init ? (*a0_init)[i] : 2.2 * (std::abs(seed.I0[i]) + 0.5) / L - 1.1 / L;
    for (int i = 0; i < m1; ++i)
        x(m0 + i) = a1_init ? (*a1_init)[i] : 2.2 * (std::abs(seed.I1[i]) + 0.5) / L - 1.1 / L;

    auto eval = [&](const Eigen::VectorXd& y, Eigen::VectorXd& F, Eigen::MatrixXd* J) {
        F.setZero(n);
        if (J) J->setZero(n, n);
        auto fam = [&](int joff, int joth, const std::vector<double>& I, int mj, int mo) {
            for (int j = 0; j < mj; ++j) {
                double aj = y(joff + j);
                F(joff + j) = 2.0 * L * bk(g, aj) - 2.0 * PI * I[j];
                if (J) (*J)(joff + j, joff + j) = 2.0 * L * bk_d(g, aj);
                for (int l = 0; l < mj; ++l) {
                    if (l == j) continue;
                    double al = y(joff + l);
                    F(joff + j) -= th0(g, aj - al) + th1(g, aj + al);
                    if (J) {
                        (*J)(joff + j, joff + j) -= th0_d(g, aj - al) + th1_d(g, aj + al);
                        (*J)(joff + j, joff + l) -= -th0_d(g, aj - al) + th1_d(g, aj + al);
                    }
                }
                for (int l = 0; l < mo; ++l) {
                    double al = y(joth + l);
                    F(joff + j) -= th1(g, aj - al) + th0(g, aj + al);
                    if (J) {
                        (*J)(joff + j, joff + j) -= th1_d(g, aj - al) + th0_d(g, aj + al);
                        (*J)(joff + j, joth + l) -= -th1_d(g, aj - al) + th0_d(g, aj + al);
                    }
                }
            }
        };
        fam(0, m0, seed.I0, m0, m1);
        fam(m0, 0, seed.I1, m1, m0);
    };

    TwoFamilyResult res;
    Eigen::VectorXd F(n), Fn(n);
    Eigen::MatrixXd J(n, n);
    for (int it = 0; it < max_iter; ++it) {
        eval(x, F, &J);
        double r = n ? F.cwiseAbs().maxCoeff() : 0.0;
        res.log_residual = r;
        res.iterations = it;
        if (r < tol) {
            res.converged = true;
            break;
        }
        Eigen::VectorXd step = J.fullPivLu().solve(F);
        if (!step.allFinite()) throw SolverError("solve_two_family: singular Jacobian (root collision?)");
        double lam = 1.0;
        for (int h = 0; h < 30; ++h) {
            Eigen::VectorXd xn = x - lam * step;
            eval(xn, Fn, nullptr);
            if (Fn.cwiseAbs().maxCoeff() < r) break;
            lam /= 2;
        }
        x -= lam * step;
    }
    if (!res.converged && n > 0)
        throw SolverError("solve_two_family: no convergence after " + std::to_string(max_iter) +
                          " iterations, residual " + std::to_string(res.log_residual));
    res.a0.assign(x.data(), x.data() + m0);
    res.a1.assign(x.data() + m0, x.data() + n);
    res.converged = true;
    return res;
}

/// Canonical per-root gauge fix: fold Im into (-pi, pi], then flip the sign of
/// roots with negative real part (tie broken toward positive imaginary part).
inline std::vector<Cplx> canonical_roots(std::vector<Cplx> lam) {
    for (Cplx& l : lam) {
        double im = std::remainder(l.imag(), 2.0 * PI);
        l = Cplx(l.real(), im);
        if (l.real() < -1e-12 || (std::abs(l.real()) <= 1e-12 && l.imag() < -1e-12)) {
            l = -l;
            l = Cplx(l.real(), std::remainder(l.imag(), 2.0 * PI));
        }
    }
    std::sort(lam.begin(), lam.end(), [](Cplx a, Cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return lam;
}

// ---------------------------------------------------------------------------
// general complex solver (branch-frozen principal logs)
// ---------------------------------------------------------------------------

inline Cplx log_sinh(Cplx z) {
    if (z.real() < -20.0) return log_sinh(-z) + Cplx(0, PI);  // sinh is odd
    if (z.real() > 20.0) return z - std::log(2.0) + std::log(Cplx(1.0) - std::exp(-2.0 * z));
    return std::log(std::sinh(z));
}

struct ComplexSolveResult {
    std::vector<Cplx> roots;
    bool converged = false;
    int iterations = 0;
    double log_residual = 0.0;
};

/// Newton on the principal-log form of the equations with winding targets
/// frozen from the seed. Convergence is certified afterwards by the
/// multiplicative residual.
inline ComplexSolveResult solve_complex(const Coupling& c, int L, std::vector<Cplx> lam,
                                        int max_iter = 250, double tol = 1e-12) {
    const double g = c.gamma;
    const Cplx ig(0, g);
    const int m = static_cast<int>(lam.size());
    auto G = [&](const std::vector<Cplx>& y) {
        Vec out(m);
        for (int j = 0; j < m; ++j) {
            Cplx v = 2.0 * static_cast<double>(L) * (log_sinh(ig + y[j]) - log_sinh(ig - y[j]));
            for (int k = 0; k < m; ++k) {
                if (k == j) continue;
                Cplx d = 0.5 * (y[j] - y[k]), s = 0.5 * (y[j] + y[k]);
                v -= log_sinh(ig + d) - log_sinh(ig - d);
                v -= log_sinh(ig + s) - log_sinh(ig - s);
            }
            out(j) = v;
        }
        return out;
    };
    auto Jac = [&](const std::vector<Cplx>& y) {
        Mat J = Mat::Zero(m, m);
        auto cth = [](Cplx z) { return 1.0 / std::tanh(z); };
        for (int j = 0; j < m; ++j) {
            J(j, j) = 2.0 * static_cast<double>(L) * (cth(ig + y[j]) + cth(ig - y[j]));
            for (int k = 0; k < m; ++k) {
                if (k == j) continue;
                Cplx d = 0.5 * (y[j] - y[k]), s = 0.5 * (y[j] + y[k]);
                Cplx dd = 0.5 * (cth(ig + d) + cth(ig - d));
                Cplx ds = 0.5 * (cth(ig + s) + cth(ig - s));
                J(j, j) -= dd + ds;
                J(j, k) -= -dd + ds;
            }
        }
        return J;
    };
    ComplexSolveResult res;
    Vec T0 = G(lam);
    if (!T0.allFinite()) return res;
    Vec targ(m);
    for (int j = 0; j < m; ++j)
        targ(j) = Cplx(0.0, 2.0 * PI * std::round(T0(j).imag() / (2.0 * PI)));
    for (int it = 0; it < max_iter; ++it) {
        Vec F = G(lam) - targ;
        if (!F.allFinite()) return res;
        double r = F.cwiseAbs().maxCoeff();
        res.log_residual = r;
        res.iterations = it;
        if (r < tol) {
            res.converged = true;
            res.roots = lam;
            return res;
        }
        Eigen::FullPivLU<Mat> lu(Jac(lam));
        if (!lu.isInvertible()) return res;
        Vec step = lu.solve(F);
        double smax = step.cwiseAbs().maxCoeff();
        if (smax > 5.0) step *= 5.0 / smax;
        double a = 1.0;
        for (int h = 0; h < 40; ++h) {
            std::vector<Cplx> ln(lam);
            for (int j = 0; j < m; ++j) ln[j] -= a * step(j);
            Vec Fn = G(ln) - targ;
            if (Fn.allFinite() && Fn.cwiseAbs().maxCoeff() < r) break;
            a /= 2;
        }
        for (int j = 0; j < m; ++j) lam[j] -= a * step(j);
    }
    return res;
}

// ---------------------------------------------------------------------------
// classification
// ---------------------------------------------------------------------------

/// Taxonomy per root pattern. `band` is the tolerance around Im = pi/2.
inline RootClass classify_roots(const std::vector<Cplx>& roots, int shift0, int shift1,
                                double band = 0.15) {
    if (roots.empty()) return RootClass::XXZSubsetEven;
    auto lines = canonical_roots(roots);
    int on_line = 0, on_real = 0, on_pi = 0, other = 0;
    for (Cplx l : lines) {
        double im = std::abs(l.imag());
        if (std::abs(im - PI / 2) < band)
            ++on_line;
        else if (im < band)
            ++on_real;
        else if (std::abs(im - PI) < band)
            ++on_pi;
        else
            ++other;
    }
    const int m = static_cast<int>(roots.size());
    if (on_line == m) {
        if (shift0 || shift1) return RootClass::ShiftedDescendant;
        return m % 2 ? RootClass::XXZSubsetOdd : RootClass::XXZSubsetEven;
    }
    if (other == 0 && on_real + on_pi > 0) {
        if (on_real + on_pi <= 2) return RootClass::ExoticRealAxis;
        return RootClass::ExoticRealAxis;
    }
    if (other > 0 && on_line + on_real + on_pi + other == m) return RootClass::ConjugatePairSea;
    return RootClass::Unclassified;
}

// ---------------------------------------------------------------------------
// assembled solves
// ---------------------------------------------------------------------------

inline BetheState make_state(const Coupling& c, int L, int n, const BetheSeed& seed,
                             std::vector<Cplx> roots) {
    BetheState st;
    st.L = L;
    st.sector = n;
    st.seed = seed;
    st.shift0 = seed.shift0;
    st.shift1 = seed.shift1;
    st.roots = canonical_roots(std::move(roots));
    st.residual = max_residual(c, L, st.roots);
    st.energy = bethe_energy(c, st.roots);
    st.classification = classify_roots(st.roots, st.shift0, st.shift1);
    return st;
}

/// Solve a two-line seed (ground or shifted descendant) for sector n.
inline BetheState solve_newton(const Coupling& c, int L, int n, const BetheSeed& seed,
                               const std::vector<double>* a0_init = nullptr,
                               const std::vector<double>* a1_init = nullptr) {
    if (static_cast<int>(seed.I0.size() + seed.I1.size()) != L - n)
        throw std::domain_error("solve_newton: root count must be m = L - n");
    if (seed.complex_seed) {
        auto res = solve_complex(c, L, seed.roots);
        if (!res.converged) throw SolverError("solve_newton: complex solve diverged");
        return make_state(c, L, n, seed, res.roots);
    }
    auto r = solve_two_family(c, L, seed, a0_init, a1_init);
    std::vector<Cplx> roots;
    for (double a : r.a0) roots.emplace_back(a, PI / 2);
    for (double a : r.a1) roots.emplace_back(a, -PI / 2);
    return make_state(c, L, n, seed, std::move(roots));
}

/// Continuation sweep over sizes for a fixed sector: each solve reuses the
/// previous roots (outermost root extrapolated) as the next seed.
inline std::vector<BetheState> sweep_sizes(const Coupling& c, const std::vector<int>& sizes,
                                           int n, int s0 = 0, int s1 = 0) {
    std::vector<BetheState> out;
    std::vector<double> prev0, prev1;
    for (int L : sizes) {
        BetheSeed seed = (s0 || s1) ? shifted_seed(L, n, s0, s1) : ground_seed(L, n);
        std::optional<std::vector<double>> i0, i1;
        if (!prev0.empty() && static_cast<int>(seed.I0.size()) >= 1) {
            std::vector<double> g0(seed.I0.size()), g1(seed.I1.size());
            for (size_t i = 0; i < g0.size(); ++i)
                g0[i] = i < prev0.size() ? prev0[i] : prev0.back() * 1.3 + 0.3;
            for (size_t i = 0; i < g1.size(); ++i)
                g1[i] = i < prev1.size() ? prev1[i] : (prev1.empty() ? 0.3 : prev1.back() * 1.3 + 0.3);
            i0 = g0;
            i1 = g1;
        }
        BetheState st = solve_newton(c, L, n, seed, i0 ? &*i0 : nullptr, i1 ? &*i1 : nullptr);
        prev0.clear();
        prev1.clear();
        for (Cplx z : st.roots)
            (z.imag() > 0 ? prev0 : prev1).push_back(z.real());
        std::sort(prev0.begin(), prev0.end());
        std::sort(prev1.begin(), prev1.end());
        out.push_back(std::move(st));
    }
    return out;
}

/// Effective central charge prediction for XXZ-subset states:
/// even 2 - (6/k)(1+4S)^2, odd 2 - (6/k)(4S-1)^2.
inline double predict_ceff(const Coupling& c, double S, bool odd) {
    double k = c.k();
    double f = odd ? (4.0 * S - 1.0) : (1.0 + 4.0 * S);
    return 2.0 - 6.0 / k * f * f;
}

/// h_l = l (l+1) / k.
inline double predict_h(const Coupling& c, int l) {
    return static_cast<double>(l) * (l + 1) / c.k();
}

}  // namespace stagsix
