// types.hpp: Operator and superoperator value types plus the error type

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace purestat {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr cplx I_unit{0.0, 1.0};

enum class ErrorKind {
    DimensionMismatch,
    NotHermitian,
    InvalidSpec,
    DivisionByZero,
    SvdFailure,
    NonFiniteState,
    InvalidDomain,
    NonPolynomial,
    DegreeTooLow,
    InvalidFamily,
    InvalidConfig,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::SvdFailure: return "SvdFailure";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::InvalidDomain: return "InvalidDomain";
    case ErrorKind::NonPolynomial: return "NonPolynomial";
    case ErrorKind::DegreeTooLow: return "DegreeTooLow";
    case ErrorKind::InvalidFamily: return "InvalidFamily";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    // Config/validation problems map to exit code 1, numerical ones to 2.
    bool is_numerical() const noexcept {
        return kind_ == ErrorKind::SvdFailure || kind_ == ErrorKind::NonFiniteState;
    }

private:
    ErrorKind kind_;
};

/// Hilbert-space operator in the truncated Fock basis.
struct Op {
    Matrix mat;
    std::string label;

    Op() = default;
    explicit Op(Matrix m, std::string l = {}) : mat(std::move(m)), label(std::move(l)) {}

    Eigen::Index dim() const { return mat.rows(); }

    Op adjoint() const { return Op(mat.adjoint(), label.empty() ? label : label + "^dag"); }

    static Op identity(Eigen::Index d) { return Op(Matrix::Identity(d, d), "I"); }
    static Op zero(Eigen::Index d) { return Op(Matrix::Zero(d, d), "0"); }

    /// Projector |n><m| onto Fock levels.
    static Op ket_bra(Eigen::Index d, Eigen::Index n, Eigen::Index m) {
        Matrix out = Matrix::Zero(d, d);
        out(n, m) = 1.0;
        return Op(std::move(out));
    }
};

inline Op operator+(const Op& a, const Op& b) { return Op(a.mat + b.mat); }
inline Op operator-(const Op& a, const Op& b) { return Op(a.mat - b.mat); }
inline Op operator*(const Op& a, const Op& b) { return Op(a.mat * b.mat); }
inline Op operator*(cplx s, const Op& a) { return Op(s * a.mat); }
inline Op operator*(double s, const Op& a) { return Op(s * a.mat); }

/// Vectorized operator |A). Flat index i*d + j holds A(i, j).
struct LVec {
    Vector vec;

    LVec() = default;
    explicit LVec(Vector v) : vec(std::move(v)) {}

    Eigen::Index size() const { return vec.size(); }
};

/// Linear map on Liouville space, a d^2 x d^2 matrix in the LVec flattening.
struct SuperOp {
    Matrix mat;

    SuperOp() = default;
    explicit SuperOp(Matrix m) : mat(std::move(m)) {}

    Eigen::Index size() const { return mat.rows(); }

    static SuperOp identity(Eigen::Index d) { return SuperOp(Matrix::Identity(d * d, d * d)); }
    static SuperOp zero(Eigen::Index d) { return SuperOp(Matrix::Zero(d * d, d * d)); }
};

inline SuperOp operator+(const SuperOp& a, const SuperOp& b) { return SuperOp(a.mat + b.mat); }
inline SuperOp operator-(const SuperOp& a, const SuperOp& b) { return SuperOp(a.mat - b.mat); }
inline SuperOp operator*(const SuperOp& a, const SuperOp& b) { return SuperOp(a.mat * b.mat); }
inline SuperOp operator*(cplx s, const SuperOp& a) { return SuperOp(s * a.mat); }
inline SuperOp operator*(double s, const SuperOp& a) { return SuperOp(s * a.mat); }
inline LVec operator*(const SuperOp& a, const LVec& v) { return LVec(a.mat * v.vec); }

inline void require_same_dim(Eigen::Index a, Eigen::Index b, const char* where) {
    if (a != b) {
        throw Error(ErrorKind::DimensionMismatch,
                    std::string(where) + ": " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

} // namespace purestat
