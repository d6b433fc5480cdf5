#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <complex>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "stagsix/coupling.hpp"

namespace stagsix {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using SpMat = Eigen::SparseMatrix<Cplx>;

struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dense build limit for operators (dimension, not bytes). Above this the
/// sparse representation is used.
inline constexpr int kDenseLimit = 4096;

struct BasisTag {
    enum class Kind { Spin, CBasis, Diagram };
    Kind kind = Kind::Spin;
    int param = 0;          // N for Spin, L for CBasis
    std::string rep_id;     // identifies the diagram basis
};

/// Complex linear operator, dense or sparse, with basis metadata.
class OperatorMatrix {
  public:
    OperatorMatrix() = default;
    OperatorMatrix(Mat m, BasisTag tag = {}) : store_(std::move(m)), tag_(std::move(tag)) {}
    OperatorMatrix(SpMat m, BasisTag tag = {}) : store_(std::move(m)), tag_(std::move(tag)) {}

    bool is_dense() const { return std::holds_alternative<Mat>(store_); }
    Eigen::Index rows() const {
        return is_dense() ? std::get<Mat>(store_).rows() : std::get<SpMat>(store_).rows();
    }
    Eigen::Index cols() const {
        return is_dense() ? std::get<Mat>(store_).cols() : std::get<SpMat>(store_).cols();
    }
    const BasisTag& tag() const { return tag_; }
    BasisTag& tag() { return tag_; }

    const Mat& dense() const {
        if (!is_dense()) throw CapacityError("OperatorMatrix: dense access on sparse operator");
        return std::get<Mat>(store_);
    }
    const SpMat& sparse() const {
        if (is_dense()) throw CapacityError("OperatorMatrix: sparse access on dense operator");
        return std::get<SpMat>(store_);
    }
    Mat to_dense() const {
        return is_dense() ? std::get<Mat>(store_) : Mat(std::get<SpMat>(store_));
    }

  private:
    std::variant<Mat, SpMat> store_;
    BasisTag tag_;
};

/// Embed `op` (d^k x d^k on the listed tensor slots) into the product space
/// with per-slot dimensions `dims`. Row-major slot convention: the first
/// entry of `slots` is the slowest index of `op`.
inline SpMat embed(const Mat& op, const std::vector<int>& slots, const std::vector<int>& dims) {
    const int n = static_cast<int>(dims.size());
    long total = 1;
    for (int d : dims) total *= d;
    long dop = 1;
    for (int s : slots) dop *= dims[s];
    if (op.rows() != dop || op.cols() != dop)
        throw std::invalid_argument("embed: operator dimension does not match slots");

    std::vector<long> stride(n);
    long acc = 1;
    for (int i = n - 1; i >= 0; --i) {
        stride[i] = acc;
        acc *= dims[i];
    }
    // enumerate states of the complement
    std::vector<int> rest;
    for (int i = 0; i < n; ++i)
        if (std::find(slots.begin(), slots.end(), i) == slots.end()) rest.push_back(i);
    long drest = 1;
    for (int r : rest) drest *= dims[r];

    std::vector<Eigen::Triplet<Cplx>> trips;
    trips.reserve(static_cast<size_t>(drest) * op.nonZeros());
    for (long rs = 0; rs < drest; ++rs) {
        long base = 0;
        long t = rs;
        for (int i = static_cast<int>(rest.size()) - 1; i >= 0; --i) {
            int r = rest[i];
            base += (t % dims[r]) * stride[r];
            t /= dims[r];
        }
        for (long col = 0; col < dop; ++col) {
            // decode col into slot values -> global column offset
            long coff = base;
            long cc = col;
            for (int i = static_cast<int>(slots.size()) - 1; i >= 0; --i) {
                coff += (cc % dims[slots[i]]) * stride[slots[i]];
                cc /= dims[slots[i]];
            }
            for (long row = 0; row < dop; ++row) {
                Cplx v = op(row, col);
                if (v == Cplx(0.0, 0.0)) continue;
                long roff = base;
                long rr = row;
                for (int i = static_cast<int>(slots.size()) - 1; i >= 0; --i) {
                    roff += (rr % dims[slots[i]]) * stride[slots[i]];
                    rr /= dims[slots[i]];
                }
                trips.emplace_back(roff, coff, v);
            }
        }
    }
    SpMat out(total, total);
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

inline Mat embed_dense(const Mat& op, const std::vector<int>& slots, const std::vector<int>& dims) {
    return Mat(embed(op, slots, dims));
}

/// Permutation operator P(a x b) = b x a on C^d (x) C^d.
inline Mat perm_op(int d) {
    Mat P = Mat::Zero(d * d, d * d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) P(b * d + a, a * d + b) = 1.0;
    return P;
}

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Partial trace over the first factor of C^da (x) C^db.
inline Mat trace_first(const Mat& m, int da, int db) {
    Mat out = Mat::Zero(db, db);
    for (int a = 0; a < da; ++a)
        out += m.block(a * db, a * db, db, db);
    return out;
}

inline double rel_frobenius(const Mat& a, const Mat& b) {
    double nb = b.norm();
    return (a - b).norm() / (nb > 0 ? nb : 1.0);
}

}  // namespace stagsix
