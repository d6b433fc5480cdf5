#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "stagsix/lattice.hpp"

using namespace stagsix;
using Catch::Approx;

TEST_CASE("six-vertex R-check matrix") {
    Coupling c = coupling_from_gamma(PI / 5);
    SECTION("u = 0 is sin(gamma) * identity") {
        Mat R = six_vertex_rcheck(c, 0.0);
        CHECK((R - std::sin(c.gamma) * Mat::Identity(4, 4)).norm() < 1e-15);
    }
    SECTION("corner entries are sin u") {
        Coupling c3 = coupling_from_gamma(PI / 3);
        Mat R = six_vertex_rcheck(c3, PI / 6);
        CHECK(std::abs(R(1, 2) - 0.5) < 1e-15);
        CHECK(std::abs(R(2, 1) - 0.5) < 1e-15);
    }
    SECTION("entry (ud, du) equals sin u for generic parameters") {
        Mat R = six_vertex_rcheck(c, 0.37);
        CHECK(std::abs(R(1, 2) - std::sin(0.37)) < 1e-15);
    }
}

TEST_CASE("block R-matrix satisfies the Yang-Baxter equation") {
    Coupling c = coupling_from_gamma(PI / 5);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        Cplx u(uni(rng), 0.3 * uni(rng)), v(uni(rng), 0.3 * uni(rng));
        CHECK(ybe_residual(c, u, v, Gauge::Staggered) < 1e-10);
        CHECK(ybe_residual(c, u, v, Gauge::D22) < 1e-10);
    }
}

TEST_CASE("block R conserves the arrow number") {
    Coupling c = coupling_from_gamma(PI / 5);
    Mat R = block_R(c, 0.3);
    Mat q = edge_charge();
    // total charge of (row, col) indices must match on nonzero entries
    for (int r = 0; r < 16; ++r)
        for (int col = 0; col < 16; ++col) {
            if (std::abs(R(r, col)) < 1e-12) continue;
            int qr = static_cast<int>(q(r / 4, r / 4).real() + q(r % 4, r % 4).real());
            int qc = static_cast<int>(q(col / 4, col / 4).real() + q(col % 4, col % 4).real());
            CHECK(qr == qc);
        }
}

TEST_CASE("change of basis") {
    Coupling c = coupling_from_gamma(PI / 5);
    SECTION("explicit inverse") {
        Mat U = cbasis_matrix(c), V = cbasis_matrix_inv(c);
        CHECK((V * U - Mat::Identity(4, 4)).norm() < 1e-13);
        CHECK((U * V - Mat::Identity(4, 4)).norm() < 1e-13);
    }
    SECTION("exactly 38 nonzero entries in the C basis") {
        Mat R = block_R(c, 0.3);
        int nnz = 0;
        double scale = R.cwiseAbs().maxCoeff();
        for (int r = 0; r < 16; ++r)
            for (int col = 0; col < 16; ++col)
                if (std::abs(R(r, col)) > 1e-10 * scale) ++nnz;
        CHECK(nnz == 38);
    }
    SECTION("round trip through the basis change") {
        Mat W = kron(cbasis_matrix(c), cbasis_matrix(c));
        Mat Winv = kron(cbasis_matrix_inv(c), cbasis_matrix_inv(c));
        Mat R = block_R_spin(c, 0.42);
        CHECK((W * (Winv * R * W) * Winv - R).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("weight extraction reproduces the reference tables") {
    Coupling c = coupling_from_gamma(PI / 5);
    Cplx u = 0.3;
    SECTION("staggered gauge, entry for entry") {
        WeightTable t = extract_weights(block_R(c, u, Gauge::Staggered), Gauge::Staggered);
        WeightTable ref = table_weights_staggered(c, u);
        for (int v = 1; v <= 38; ++v)
            CHECK(std::abs(t.w.at(v) - ref.w.at(v)) <= 1e-12 * std::abs(ref.w.at(v)));
    }
    SECTION("D22 gauge matches the D2(2) weight column") {
        WeightTable t = extract_weights(block_R(c, u, Gauge::D22), Gauge::D22);
        WeightTable ref = table_weights_d22(c, u);
        for (int v = 1; v <= 38; ++v)
            CHECK(std::abs(t.w.at(v) - ref.w.at(v)) <= 1e-12 * std::abs(ref.w.at(v)));
    }
    SECTION("vertices 19-26 share one weight") {
        WeightTable t = extract_weights(block_R(c, u), Gauge::Staggered);
        Cplx expect = -0.25 * std::sin(Cplx(c.gamma0) + 2.0 * u) * std::sin(Cplx(-2.0) * u);
        for (int v = 19; v <= 26; ++v) CHECK(std::abs(t.w.at(v) - expect) < 1e-14);
    }
    SECTION("vertex 37") {
        WeightTable t = extract_weights(block_R(c, u), Gauge::Staggered);
        double g0 = c.gamma0;
        Cplx u0 = -2.0 * u;
        Cplx expect = -0.25 * (std::sin(g0) * std::sin(g0) + std::sin(Cplx(g0) - u0) * std::sin(u0));
        CHECK(std::abs(t.w.at(37) - expect) < 1e-14);
    }
    SECTION("u = 0: vertices 3 and 4 vanish") {
        WeightTable t = extract_weights(block_R(c, 0.0), Gauge::Staggered);
        CHECK(std::abs(t.w.at(3)) < 1e-14);
        CHECK(std::abs(t.w.at(4)) < 1e-14);
    }
    SECTION("structure error on an off-pattern entry") {
        Mat R = block_R(c, u);
        R(1, 0) += 1.0;  // not one of the 38 positions
        CHECK_THROWS_AS(extract_weights(R, Gauge::Staggered), StructureError);
    }
}

TEST_CASE("gauge comparison") {
    Coupling c = coupling_from_gamma(PI / 5);
    Cplx u = 0.3;
    WeightTable d22 = extract_weights(block_R(c, u, Gauge::D22), Gauge::D22);
    GaugeReport rep = compare_gauges(d22, c, u);
    SECTION("asterisk set is exactly the twelve sign-flipped vertices") {
        CHECK(rep.flipped == asterisk_set());
    }
    SECTION("global factor equals 16 k^2 x^2") {
        Cplx k = c.jimbo_k, x = spectral_point(u).x;
        CHECK(std::abs(rep.global_factor - 16.0 * k * k * x * x) < 1e-10);
    }
    SECTION("every vertex has an even number of thick lines") {
        CHECK(rep.thick_parity_even);
    }
}

TEST_CASE("block R at u = 0 is proportional to the permutation (staggered gauge)") {
    Coupling c = coupling_from_gamma(PI / 5);
    Mat R0 = block_R(c, 0.0, Gauge::Staggered);
    Mat P = perm_op(4);
    Cplx c0 = -0.25 * std::sin(c.gamma0) * std::sin(c.gamma0);
    CHECK((R0 - c0 * P).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("periodic transfer matrix") {
    Coupling c = coupling_from_gamma(PI / 5);
    SECTION("commutativity at two spectral parameters") {
        Mat t1 = periodic_transfer(c, 0.2, 2).dense();
        Mat t2 = periodic_transfer(c, 0.7, 2).dense();
        CHECK((t1 * t2 - t2 * t1).norm() / (t1 * t2).norm() < 1e-9);
    }
    SECTION("commutes with the total charge") {
        Mat t = periodic_transfer(c, 0.3, 2).dense();
        std::vector<int> dims{4, 4};
        Mat Q = embed_dense(edge_charge(), {0}, dims) + embed_dense(edge_charge(), {1}, dims);
        CHECK((t * Q - Q * t).norm() < 1e-12);
    }
    SECTION("gauge spectra coincide") {
        Mat ts = periodic_transfer(c, 0.3, 2, Gauge::Staggered).dense();
        Mat td = periodic_transfer(c, 0.3, 2, Gauge::D22).dense();
        // same spectrum up to the known global factor per R
        Cplx k = c.jimbo_k, x = spectral_point(Cplx(0.3)).x;
        Cplx fac = std::pow(16.0 * k * k * x * x, 2);
        Eigen::ComplexEigenSolver<Mat> es(ts, false), ed(td, false);
        std::vector<Cplx> a(es.eigenvalues().data(), es.eigenvalues().data() + ts.rows());
        std::vector<Cplx> b(ed.eigenvalues().data(), ed.eigenvalues().data() + td.rows());
        auto key = [](Cplx z1, Cplx z2) {
            return z1.real() != z2.real() ? z1.real() < z2.real() : z1.imag() < z2.imag();
        };
        for (Cplx& z : b) z /= fac;
        std::sort(a.begin(), a.end(), key);
        std::sort(b.begin(), b.end(), key);
        double scale = 0.0, dev = 0.0;
        for (size_t i = 0; i < a.size(); ++i) {
            scale = std::max(scale, std::abs(a[i]));
            dev = std::max(dev, std::abs(a[i] - b[i]));
        }
        CHECK(dev < 1e-10 * scale);
    }
    SECTION("capacity guard") {
        CHECK_THROWS_AS(periodic_transfer(c, 0.3, 7), CapacityError);
    }
}
