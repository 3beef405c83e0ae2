#pragma once

// Extended Kalman filter over the state [x, y, vx, vy] with constant-velocity
// dynamics and an RSSI + odometry output map.

#include "swarmap/signal.hpp"
#include "swarmap/types.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <span>

namespace swarmap {

struct EkfState {
    Vec4 mean = Vec4::Zero();
    Mat4 P = Mat4::Zero();
    double time = 0.0;

    Vec2 position() const { return mean.head<2>(); }
    Vec2 velocity() const { return mean.tail<2>(); }
};

// One recorded localization datum: robot id, time, position mean and covariance.
struct DataTuple {
    std::size_t robot = 0;
    double t = 0.0;
    Vec2 mu = Vec2::Zero();
    Mat2 sigma = Mat2::Zero();
};

inline Mat4 motion_matrix(double dt) {
    Mat4 A = Mat4::Identity();
    A(0, 2) = dt;
    A(1, 3) = dt;
    return A;
}

template <typename Derived>
void symmetrize(Eigen::MatrixBase<Derived>& m) {
    m = (0.5 * (m + m.transpose())).eval();
}

// Symmetric and eigmin >= -tol.
inline bool is_valid_covariance(const Mat4& P, double tol = 1e-9) {
    const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
    if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) return false;
    Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (P + P.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol;
}

inline EkfState predict(const EkfState& s, const Mat4& A, const Mat4& Q, double dt = 0.0) {
    EkfState out;
    out.mean = A * s.mean;
    out.P = A * s.P * A.transpose() + Q;
    symmetrize(out.P);
    out.time = s.time + dt;
    return out;
}

// Rows are the gradients of S_i at x, one row per transmitter.
inline Eigen::MatrixXd measurement_jacobian(const Vec2& x, std::span<const Transmitter> txs) {
    Eigen::MatrixXd sx(static_cast<Eigen::Index>(txs.size()), 2);
    for (std::size_t i = 0; i < txs.size(); ++i) {
        sx.row(static_cast<Eigen::Index>(i)) = signal_gradient(txs[i], x).transpose();
    }
    return sx;
}

// h(state) = [S(X); V], H = [[S_X, 0], [0, I]].
struct RssiVelocityModel {
    std::span<const Transmitter> txs;

    Eigen::Index size() const { return static_cast<Eigen::Index>(txs.size()) + 2; }

    Eigen::VectorXd h(const Vec4& x) const {
        Eigen::VectorXd z(size());
        z.head(size() - 2) = signal_vector(txs, x.head<2>());
        z.tail<2>() = x.tail<2>();
        return z;
    }

    Eigen::MatrixXd H(const Vec4& x) const {
        const Eigen::Index l = size() - 2;
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(size(), 4);
        H.topLeftCorner(l, 2) = measurement_jacobian(x.head<2>(), txs);
        H.bottomRightCorner<2, 2>().setIdentity();
        return H;
    }
};

// h(state) = C * state.
struct LinearModel {
    Eigen::MatrixXd C;

    Eigen::Index size() const { return C.rows(); }
    Eigen::VectorXd h(const Vec4& x) const { return C * x; }
    Eigen::MatrixXd H(const Vec4&) const { return C; }
};

enum class UpdateStatus { ok, singular_innovation };

struct UpdateResult {
    EkfState state;
    UpdateStatus status = UpdateStatus::ok;

    bool ok() const { return status == UpdateStatus::ok; }
};

// Standard EKF correction. A singular innovation covariance leaves the state
// untouched and reports UpdateStatus::singular_innovation.
template <typename Model>
UpdateResult update(const EkfState& s, const Eigen::VectorXd& z, const Eigen::MatrixXd& R, const Model& model) {
    if (z.size() != model.size() || R.rows() != model.size() || R.cols() != model.size()) {
        throw dimension_error("measurement size does not match the output model");
    }
    const Eigen::MatrixXd H = model.H(s.mean);
    const Eigen::VectorXd innovation = z - model.h(s.mean);
    Eigen::MatrixXd S = H * s.P * H.transpose() + R;
    symmetrize(S);

    Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
    const double scale = S.cwiseAbs().maxCoeff();
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || !(scale > 0.0) ||
        ldlt.vectorD().minCoeff() <= 1e-14 * scale) {
        return {s, UpdateStatus::singular_innovation};
    }
    // K = P H^T S^-1, computed as (S^-1 H P)^T since S and P are symmetric.
    const Eigen::MatrixXd K = ldlt.solve(H * s.P).transpose();

    EkfState out;
    out.mean = s.mean + K * innovation;
    out.P = (Mat4::Identity() - K * H) * s.P;
    symmetrize(out.P);
    out.time = s.time;
    return {out, UpdateStatus::ok};
}

struct ObservabilityReport {
    int rank = 0;
    double min_singular_value = 0.0;
    double max_singular_value = 0.0;
    bool collinear = false;
};

// Singular values below this fraction of the largest count as zero.
inline constexpr double kRankTolerance = 1e-10;
inline constexpr double kCollinearAngle = 1e-8;

// Rank of the reduced observability matrix [[S_X, 0], [0, I], [0, dt S_X]]
// and whether x lies on the line through the first two transmitters.
inline ObservabilityReport observability_report(const Vec2& x, std::span<const Transmitter> txs, double dt) {
    if (dt == 0.0) throw degenerate_input_error("observability needs a non-zero time step");
    if (txs.size() < 2) throw degenerate_input_error("observability needs at least two transmitters");
    const Eigen::MatrixXd sx = measurement_jacobian(x, txs);
    const Eigen::Index l = sx.rows();

    Eigen::MatrixXd O = Eigen::MatrixXd::Zero(2 * l + 2, 4);
    O.topLeftCorner(l, 2) = sx;
    O.block<2, 2>(l, 2).setIdentity();
    O.bottomRightCorner(l, 2) = dt * sx;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(O);
    const auto& sv = svd.singularValues();
    ObservabilityReport rep;
    rep.max_singular_value = sv.maxCoeff();
    rep.min_singular_value = sv.minCoeff();
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) >= kRankTolerance * rep.max_singular_value) ++rep.rank;
    }

    const Vec2 a = x - txs[0].position;
    const Vec2 b = x - txs[1].position;
    const double sin_angle = std::abs(a.x() * b.y() - a.y() * b.x()) / (a.norm() * b.norm());
    rep.collinear = sin_angle <= std::sin(kCollinearAngle);
    return rep;
}

inline DataTuple record(const EkfState& s, std::size_t robot, double t) {
    DataTuple d;
    d.robot = robot;
    d.t = t;
    d.mu = s.mean.head<2>();
    d.sigma = s.P.topLeftCorner<2, 2>();
    symmetrize(d.sigma);
    return d;
}

}  // namespace swarmap
