#include "bsretract/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace bsretract {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidGroup: return "InvalidGroup";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::SingularMatrix: return "SingularMatrix";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::NotARootOfUnity: return "NotARootOfUnity";
        case ErrorCode::NotAUnit: return "NotAUnit";
        case ErrorCode::InvalidOrbit: return "InvalidOrbit";
        case ErrorCode::GroupMismatch: return "GroupMismatch";
        case ErrorCode::NoOrbitFits: return "NoOrbitFits";
        case ErrorCode::NotSpecialLinear: return "NotSpecialLinear";
        case ErrorCode::NotFiniteOrder: return "NotFiniteOrder";
        case ErrorCode::DegenerateGroup: return "DegenerateGroup";
        case ErrorCode::NotNormalizing: return "NotNormalizing";
        case ErrorCode::PolarObstruction: return "PolarObstruction";
        case ErrorCode::InvalidInput: return "InvalidInput";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

namespace {

constexpr double kSingularRatio = 1e-12;
constexpr double kNormalityRatio = 1e-8;

CMatrix hermitian_part(const CMatrix& h) { return (h + h.adjoint()) * 0.5; }

Eigen::SelfAdjointEigenSolver<CMatrix> hermitian_eigen(const CMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(h));
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::NoConvergence, "Hermitian eigensolver did not converge");
    }
    return es;
}

CMatrix reconstruct(const CMatrix& v, const Eigen::VectorXd& diag) {
    return v * diag.cast<Complex>().asDiagonal() * v.adjoint();
}

void check_singular_values(const Eigen::VectorXd& s) {
    const double smax = s.maxCoeff();
    const double smin = s.minCoeff();
    if (!(smax > 0.0) || smin <= kSingularRatio * smax) {
        throw Error(ErrorCode::SingularMatrix,
                    "smallest singular value " + std::to_string(smin) + " vs largest " +
                        std::to_string(smax));
    }
}

// Joint diagonalization of the commuting Hermitian pair (Re A, Im A): the
// eigenvectors of a generic real combination reduce A to (near) block
// diagonal form; the residual blocks belong to clusters of the combination.
std::vector<Complex> normal_eigvals(const CMatrix& a) {
    const Eigen::Index n = a.rows();
    const CMatrix re = (a + a.adjoint()) * 0.5;
    const CMatrix im = (a - a.adjoint()) * Complex(0.0, -0.5);
    const double mix = 0.6180339887498949;
    const auto es = hermitian_eigen(re + mix * im);
    const CMatrix& v = es.eigenvectors();
    const Eigen::VectorXd& w = es.eigenvalues();
    const CMatrix t = v.adjoint() * a * v;
    const double gap = 1e-6 * (w.cwiseAbs().maxCoeff() + 1.0);

    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(n));
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index end = start + 1;
        while (end < n && w(end) - w(end - 1) <= gap) ++end;
        const Eigen::Index len = end - start;
        if (len == 1) {
            out.push_back(t(start, start));
        } else {
            Eigen::ComplexEigenSolver<CMatrix> ces(t.block(start, start, len, len), false);
            if (ces.info() != Eigen::Success) {
                throw Error(ErrorCode::NoConvergence, "cluster eigensolver did not converge");
            }
            for (Eigen::Index i = 0; i < len; ++i) out.push_back(ces.eigenvalues()(i));
        }
        start = end;
    }
    return out;
}

}  // namespace

void require_square_finite(const CMatrix& m, std::string_view what) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
        throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be square and non-empty");
    }
    if (!m.allFinite()) {
        throw Error(ErrorCode::InvalidArgument, std::string(what) + " has non-finite entries");
    }
}

double hs_norm(const CMatrix& x) { return x.norm(); }

PolarFactors polar(const CMatrix& a) {
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    check_singular_values(svd.singularValues());
    const CMatrix& w = svd.matrixU();
    const CMatrix& v = svd.matrixV();
    PolarFactors out;
    out.unitary = w * v.adjoint();
    out.positive = hermitian_part(reconstruct(v, svd.singularValues()));
    return out;
}

CMatrix herm_power(const CMatrix& p, double t) {
    const auto n = p.rows();
    if (t == 0.0) return CMatrix::Identity(n, n);
    const auto es = hermitian_eigen(p);
    const Eigen::VectorXd& w = es.eigenvalues();
    if (w.minCoeff() <= 0.0) {
        throw Error(ErrorCode::NotPositiveDefinite,
                    "eigenvalue " + std::to_string(w.minCoeff()) + " is not positive");
    }
    Eigen::VectorXd powered = w.unaryExpr([t](double x) { return std::pow(x, t); });
    return hermitian_part(reconstruct(es.eigenvectors(), powered));
}

CMatrix exp_herm(const CMatrix& h) {
    const auto es = hermitian_eigen(h);
    Eigen::VectorXd e = es.eigenvalues().unaryExpr([](double x) { return std::exp(x); });
    return hermitian_part(reconstruct(es.eigenvectors(), e));
}

ExpHermIncrements exp_herm_increments(const CMatrix& h) {
    const auto es = hermitian_eigen(h);
    const Eigen::VectorXd& w = es.eigenvalues();
    Eigen::VectorXd fwd = w.unaryExpr([](double x) { return std::expm1(x); });
    Eigen::VectorXd bwd = w.unaryExpr([](double x) { return std::expm1(-x); });
    return {reconstruct(es.eigenvectors(), fwd), reconstruct(es.eigenvectors(), bwd)};
}

std::vector<Complex> eigvals(const CMatrix& a) {
    require_square_finite(a, "eigvals input");
    const double scale = a.squaredNorm();
    if (normality_defect(a) <= kNormalityRatio * scale) return normal_eigvals(a);

    Eigen::ComplexEigenSolver<CMatrix> ces(a, false);
    if (ces.info() != Eigen::Success) {
        throw Error(ErrorCode::NoConvergence, "complex eigensolver did not converge");
    }
    const auto& ev = ces.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

Complex RootOfUnity::value() const {
    return std::polar(1.0, kTwoPi * static_cast<double>(exponent) / static_cast<double>(order));
}

RootOfUnity snap_root_of_unity(Complex lambda, std::int64_t max_order, double tol) {
    if (max_order < 1) throw Error(ErrorCode::InvalidArgument, "max_order must be >= 1");
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag())) {
        throw Error(ErrorCode::NotARootOfUnity, "non-finite eigenvalue");
    }

    // Best rational approximation m/N of the angle (in turns) with N <= max_order,
    // by continued fractions on the exact dyadic value of the angle.
    double turns = std::arg(lambda) / kTwoPi;
    if (turns < 0.0) turns += 1.0;
    constexpr std::int64_t kDen = std::int64_t{1} << 53;
    std::int64_t num = std::llround(turns * static_cast<double>(kDen));
    num = std::clamp<std::int64_t>(num, 0, kDen);

    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    std::int64_t n = num, d = kDen;
    bool exact = false;
    while (true) {
        if (d == 0) {
            exact = true;
            break;
        }
        const std::int64_t a = n / d;
        const __int128 q2 = static_cast<__int128>(q0) + static_cast<__int128>(a) * q1;
        if (q2 > max_order) break;
        const std::int64_t p2 = p0 + a * p1;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = static_cast<std::int64_t>(q2);
        const std::int64_t r = n - a * d;
        n = d;
        d = r;
    }

    auto distance = [&](std::int64_t m, std::int64_t order) {
        return std::abs(lambda - std::polar(1.0, kTwoPi * static_cast<double>(m) /
                                                     static_cast<double>(order)));
    };
    std::int64_t m = p1, order = q1;
    if (!exact) {
        const std::int64_t k = (max_order - q0) / q1;
        const std::int64_t bm = p0 + k * p1, bq = q0 + k * q1;
        const double d1 = distance(bm, bq), d2 = distance(p1, q1);
        if (d1 < d2 || (d1 == d2 && bq < q1)) {
            m = bm;
            order = bq;
        }
    }
    m %= order;
    const std::int64_t g = std::gcd(m, order);
    RootOfUnity out{order / g, m / g};
    const double dist = std::abs(lambda - out.value());
    if (!(dist <= tol)) {
        throw Error(ErrorCode::NotARootOfUnity,
                    "distance " + std::to_string(dist) + " to nearest root of unity exceeds tolerance");
    }
    return out;
}

CMatrix inverse(const CMatrix& a) {
    Eigen::JacobiSVD<CMatrix> svd(a);
    check_singular_values(svd.singularValues());
    return a.partialPivLu().inverse();
}

CMatrix matrix_power(const CMatrix& a, std::int64_t k) {
    CMatrix base = k < 0 ? inverse(a) : a;
    std::uint64_t e = k < 0 ? static_cast<std::uint64_t>(-(k + 1)) + 1 : static_cast<std::uint64_t>(k);
    CMatrix result = CMatrix::Identity(a.rows(), a.cols());
    while (e > 0) {
        if (e & 1U) result = result * base;
        e >>= 1U;
        if (e > 0) base = base * base;
    }
    return result;
}

double unitarity_defect(const CMatrix& u) {
    return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm();
}

double commutator_norm(const CMatrix& x, const CMatrix& y) { return (x * y - y * x).norm(); }

double normality_defect(const CMatrix& x) { return commutator_norm(x, x.adjoint()); }

double eigenvector_condition(const CMatrix& a) {
    Eigen::ComplexEigenSolver<CMatrix> ces(a, true);
    if (ces.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    return condition_number(ces.eigenvectors());
}

double condition_number(const CMatrix& a) {
    Eigen::JacobiSVD<CMatrix> svd(a);
    const auto& s = svd.singularValues();
    const double smin = s.minCoeff();
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return s.maxCoeff() / smin;
}

}  // namespace bsretract
