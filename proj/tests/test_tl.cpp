#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

#include "stagsix/boundary.hpp"
#include "stagsix/tl.hpp"

using namespace stagsix;
using Catch::Approx;

namespace {

double tl_relations_defect(const TLRepresentation& rep) {
    const double sq = rep.coupling.sqrtQ;
    double worst = 0.0;
    const int n = static_cast<int>(rep.gens.size());
    for (int i = 0; i < n; ++i) {
        Mat e = rep.gen(i);
        worst = std::max(worst, (e * e - sq * e).cwiseAbs().maxCoeff());
        if (i + 1 < n) {
            Mat f = rep.gen(i + 1);
            worst = std::max(worst, (e * f * e - e).cwiseAbs().maxCoeff());
            worst = std::max(worst, (f * e * f - f).cwiseAbs().maxCoeff());
        }
        for (int j = i + 2; j < n; ++j) {
            Mat f = rep.gen(j);
            worst = std::max(worst, (e * f - f * e).cwiseAbs().maxCoeff());
        }
    }
    return worst;
}

std::vector<double> sorted_real_eigs(const Mat& m) {
    Eigen::ComplexEigenSolver<Mat> es(m, false);
    std::vector<double> out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(es.eigenvalues()(i).real());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("vertex representation") {
    Coupling c = coupling_from_gamma(PI / 3);
    SECTION("N = 2 block matches the explicit form") {
        TLRepresentation rep = build_vertex_rep(c, 2);
        Mat e = rep.gen(0);
        CHECK(std::abs(e(1, 1) - std::polar(1.0, -PI / 3)) < 1e-15);
        CHECK(std::abs(e(2, 2) - std::polar(1.0, PI / 3)) < 1e-15);
        CHECK(std::abs(e(1, 2) - 1.0) < 1e-15);
        CHECK(std::abs(e(0, 0)) < 1e-15);
        CHECK(std::abs(e.trace() - c.sqrtQ) < 1e-15);
    }
    SECTION("block form equals the Pauli expansion") {
        for (bool tilde : {false, true}) {
            Coupling c5 = coupling_from_gamma(PI / 5);
            CHECK((tl_vertex_block(c5, tilde) - tl_vertex_block_pauli(c5, tilde))
                      .cwiseAbs()
                      .maxCoeff() < 1e-14);
        }
    }
    SECTION("e1 e2 e1 = e1 at N = 4 by direct multiplication") {
        Coupling c5 = coupling_from_gamma(PI / 5);
        TLRepresentation rep = build_vertex_rep(c5, 4);
        Mat e1 = rep.gen(0), e2 = rep.gen(1);
        CHECK((e1 * e2 * e1 - e1).cwiseAbs().maxCoeff() < 1e-13);
    }
    SECTION("TL relations across sizes") {
        for (int N : {2, 4, 6}) {
            TLRepresentation rep = build_vertex_rep(coupling_from_gamma(PI / 5), N);
            CHECK(tl_relations_defect(rep) < 1e-12);
        }
    }
    SECTION("capacity guard and sparse path agreement") {
        Coupling c5 = coupling_from_gamma(PI / 5);
        CHECK_THROWS_AS(build_vertex_rep(c5, 13), CapacityError);
        TLRepresentation sp = build_vertex_rep(c5, 13, true);
        CHECK_FALSE(sp.gens.front().is_dense());
        // identical semantics on a small size
        TLRepresentation d4 = build_vertex_rep(c5, 4);
        std::vector<int> dims(4, 2);
        SpMat s4 = embed(tl_vertex_block(c5, false), {1, 2}, dims);
        CHECK((Mat(s4) - d4.gen(1)).cwiseAbs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("tilde representation") {
    Coupling c = coupling_from_gamma(PI / 5);
    SECTION("block with conjugate phases and -1 off-diagonal") {
        TLRepresentation rep = build_tilde_rep(c, 2);
        Mat e = rep.gen(0);
        CHECK(std::abs(e(1, 1) - std::polar(1.0, c.gamma)) < 1e-15);
        CHECK(std::abs(e(1, 2) + 1.0) < 1e-15);
    }
    SECTION("TL relation forced") {
        TLRepresentation rep = build_tilde_rep(c, 2);
        Mat e = rep.gen(0);
        CHECK((e * e - c.sqrtQ * e).cwiseAbs().maxCoeff() < 1e-14);
    }
    SECTION("spectrum of e1 + e2 matches between the two vertex reps") {
        TLRepresentation re = build_vertex_rep(c, 4);
        TLRepresentation rt = build_tilde_rep(c, 4);
        auto a = sorted_real_eigs(re.gen(0) + re.gen(1));
        auto b = sorted_real_eigs(rt.gen(0) + rt.gen(1));
        for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == Approx(b[i]).margin(1e-12));
    }
}

TEST_CASE("loop representation") {
    Coupling c = coupling_from_gamma(PI / 5);
    SECTION("sector dimensions at N = 4") {
        CHECK(build_loop_rep(c, 4, 0).dim() == 2);
        CHECK(build_loop_rep(c, 4, 1).dim() == 3);
        CHECK(build_loop_rep(c, 4, 2).dim() == 1);
    }
    SECTION("dimension equals the ballot number (independent formula)") {
        for (int N : {4, 6, 8})
            for (int j = 0; j <= N / 2; ++j)
                CHECK(build_loop_rep(c, N, j).dim() == ballot_dim(N, j));
        CHECK(ballot_dim(6, 1) == 9);
    }
    SECTION("generators annihilate the all-through-lines state") {
        TLRepresentation rep = build_loop_rep(c, 4, 2);
        for (const auto& e : rep.gens) CHECK(e.to_dense().cwiseAbs().maxCoeff() < 1e-15);
    }
    SECTION("TL relations") {
        CHECK(tl_relations_defect(build_loop_rep(c, 6, 1)) < 1e-12);
        CHECK(tl_relations_defect(build_loop_rep(c, 8, 2)) < 1e-12);
    }
    SECTION("counting identity at N = 4: 2*1 + 3*3 + 1*5 = 16") {
        long total = 0;
        for (int j = 0; j <= 2; ++j) total += ballot_dim(4, j) * (2 * j + 1);
        CHECK(total == 16);
    }
    SECTION("invalid sector") {
        CHECK_THROWS_AS(build_loop_rep(c, 4, 3), std::domain_error);
        CHECK_THROWS_AS(build_loop_rep(c, 5, 1), std::domain_error);
    }
}

TEST_CASE("RSOS representation") {
    SECTION("S_2 at k = 4 is sqrt(2)") {
        CHECK(rsos_S(2, 4) == Approx(std::sqrt(2.0)).epsilon(1e-14));
    }
    SECTION("k = 3, N = 2: single path (1,2,1), e acts as sqrtQ = 1") {
        Coupling c = coupling_from_k(3);
        TLRepresentation rep = build_rsos_rep(c, 2, 1, 1);
        REQUIRE(rep.dim() == 1);
        CHECK(rep.basis.front() == "121");
        CHECK(std::abs(rep.gen(0)(0, 0) - c.sqrtQ) < 1e-14);
        CHECK(c.sqrtQ == Approx(1.0).margin(1e-14));
    }
    SECTION("TL relations at k = 5") {
        Coupling c = coupling_from_k(5);
        CHECK(tl_relations_defect(build_rsos_rep(c, 6, 1, 1)) < 1e-12);
        CHECK(tl_relations_defect(build_rsos_rep(c, 7, 1, 2)) < 1e-12);
    }
    SECTION("parity mismatch yields an empty-basis error") {
        Coupling c = coupling_from_k(5);
        CHECK_THROWS_AS(build_rsos_rep(c, 6, 1, 2), std::domain_error);
    }
    SECTION("requires an exact integer level") {
        Coupling c = coupling_from_gamma(0.57);
        CHECK_THROWS_AS(build_rsos_rep(c, 4, 1, 1), std::domain_error);
        Coupling almost = coupling_from_gamma(PI / 5);  // detected but not exact
        CHECK_THROWS_AS(build_rsos_rep(almost, 4, 1, 1), std::domain_error);
    }
}

TEST_CASE("C operator") {
    Coupling c = coupling_from_gamma(PI / 5);
    TLRepresentation rep = build_vertex_rep(c, 4);
    Mat C = build_C_operator(rep).to_dense();
    SECTION("involution") {
        CHECK((C * C - Mat::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("eigenvalues are +-1") {
        for (double ev : sorted_real_eigs(C)) CHECK(std::abs(std::abs(ev) - 1.0) < 1e-10);
    }
    SECTION("commutes with the open Hamiltonian") {
        Mat H = build_h_open(rep);
        CHECK((H * C - C * H).cwiseAbs().maxCoeff() < 1e-12);
    }
}
