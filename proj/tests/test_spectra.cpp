#include <catch2/catch_amalgamated.hpp>

#include "stagsix/spectra.hpp"

using namespace stagsix;
using Catch::Approx;

TEST_CASE("degeneracy clustering of the open chain") {
    Coupling c = coupling_from_gamma(PI / 5);
    SECTION("L = 2 multiset {1,1,3,5,6}") {
        TLRepresentation rv = build_vertex_rep(c, 4);
        SpectrumRecord rec = diagonalize(OperatorMatrix(build_h_open(rv)), c);
        CHECK(rec.max_imag < 1e-9);
        CHECK(degeneracy_multiset(rec) == std::vector<int>{1, 1, 3, 5, 6});
    }
    SECTION("L = 3 multiplicities sum to 64") {
        TLRepresentation rv = build_vertex_rep(c, 6);
        SpectrumRecord rec = diagonalize(OperatorMatrix(build_h_open(rv)), c);
        int total = 0;
        for (const auto& l : rec.levels) total += l.multiplicity;
        CHECK(total == 64);
    }
    SECTION("threshold robustness at L = 2") {
        TLRepresentation rv = build_vertex_rep(c, 4);
        OperatorMatrix H(build_h_open(rv));
        for (double rel : {0.5e-8, 2e-8}) {
            DiagOptions o;
            o.cluster_rel = rel;
            CHECK(degeneracy_multiset(diagonalize(H, c, o)) == std::vector<int>{1, 1, 3, 5, 6});
        }
    }
}

TEST_CASE("commuting-family degeneracies at generic gamma reproduce the reference patterns") {
    Coupling c = coupling_from_gamma(0.55);
    CHECK(family_degeneracies(c, 2) == std::vector<int>{1, 1, 3, 5, 6});
    CHECK(family_degeneracies(c, 3) ==
          std::vector<int>{1, 1, 1, 2, 3, 3, 3, 5, 6, 6, 6, 7, 10, 10});
}

TEST_CASE("iterative eigensolver matches dense on a sparse operator") {
    Coupling c = coupling_from_gamma(PI / 5);
    TLRepresentation rv = build_vertex_rep(c, 8);
    Mat H = build_h_open(rv);
    SpMat Hs = H.sparseView(1e-14, 1.0);
    auto dense = real_spectrum(H);
    auto ritz = arnoldi_lowest(Hs, 8, 4000);
    std::sort(ritz.begin(), ritz.end(),
              [](Cplx a, Cplx b) { return a.real() < b.real(); });
    for (int i = 0; i < 8; ++i) CHECK(ritz[i].real() == Approx(dense[i]).margin(1e-8));
}

TEST_CASE("gamma -> 0 decoupling") {
    SECTION("L = 2: eigenvalue pattern {2 l1: 1, l1+l3: 6, 2 l3: 9}") {
        Coupling c = coupling_from_gamma(1e-6);
        XXXReport rep = xxx_decoupling_report(c, 2);
        CHECK(rep.pass);
        CHECK(rep.max_dev < 1e-4);
        CHECK(rep.degeneracies == std::vector<int>{1, 6, 9});
        int total = 0;
        for (int d : rep.degeneracies) total += d;
        CHECK(total == 16);
    }
    SECTION("guard on gamma") {
        Coupling c = coupling_from_gamma(0.3);
        CHECK_THROWS_AS(xxx_decoupling_report(c, 2), std::domain_error);
    }
}

TEST_CASE("highest-weight extraction matches the loop sectors at generic gamma") {
    Coupling c = coupling_from_gamma(0.57);
    for (int N : {4, 6, 8}) {
        TLRepresentation rv = build_vertex_rep(c, N);
        Mat H = build_h_open(rv);
        for (int j = 0; j <= N / 2; ++j) {
            auto hw = highest_weight_levels(H, N, j);
            auto loop = real_spectrum(build_h_open(build_loop_rep(c, N, j)));
            REQUIRE(hw.size() == loop.size());
            for (size_t i = 0; i < hw.size(); ++i)
                CHECK(hw[i] == Approx(loop[i]).margin(1e-9));
        }
    }
}

TEST_CASE("scaling fits") {
    Coupling c = coupling_from_gamma(PI / 5);
    SECTION("Fermi velocity value") {
        CHECK(fermi_velocity(c) == Approx(3.170188387650512).epsilon(1e-12));
    }
    SECTION("c and h formulas at k = 5") {
        Coupling ck = coupling_from_k(5);
        CHECK(2.0 - 6.0 / ck.k() == Approx(0.8));
    }
    SECTION("fit recovers synthetic data") {
        // E(N) = f0 N + fs - pi vF ceff/(24 N) + d/N^2
        double f0 = -1.3, fs = 0.41, ce = 0.8, d = 2.7;
        double vF = fermi_velocity(c);
        std::vector<int> N{16, 32, 64, 128};
        std::vector<double> E;
        for (int n : N) E.push_back(f0 * n + fs - PI * vF * ce / (24.0 * n) + d / (n * n));
        ScalingEstimate est = fit_ceff(N, E, c);
        CHECK(est.value == Approx(ce).margin(2e-3));
        CHECK(est.f0 == Approx(f0).margin(1e-6));
    }
    SECTION("gap exponent fit recovers synthetic data") {
        double vF = fermi_velocity(c);
        std::vector<int> N{16, 32, 64, 128};
        std::vector<double> E0, E1;
        for (int n : N) {
            E0.push_back(-1.3 * n + 0.41 - PI * vF * 0.8 / (24.0 * n));
            E1.push_back(-1.3 * n + 0.41 - PI * vF * 0.8 / (24.0 * n) +
                         PI * vF * 0.4 / n + 1.9 / (n * n));
        }
        ScalingEstimate est = fit_gap_exponent(N, E0, E1, c);
        CHECK(est.value == Approx(0.4).margin(2e-3));
    }
    SECTION("needs at least three sizes") {
        CHECK_THROWS_AS(fit_ceff({8, 16}, {1.0, 2.0}, c), std::invalid_argument);
    }
}
