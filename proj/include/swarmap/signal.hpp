#pragma once

// RSSI attenuation model S = K * Pow * |p - X_t|^-alpha and its gradient.

#include "swarmap/domain.hpp"

#include <cmath>
#include <span>

namespace swarmap {

inline double signal_strength(const Transmitter& tx, const Vec2& p) {
    const double r2 = (p - tx.position).squaredNorm();
    if (r2 == 0.0) throw singularity_error("signal strength is undefined at the transmitter position");
    return tx.gain * tx.power * std::pow(r2, -0.5 * tx.alpha);
}

// dS/dp = -alpha K Pow (p - X_t) / r^(2 + alpha)
inline Vec2 signal_gradient(const Transmitter& tx, const Vec2& p) {
    const Vec2 d = p - tx.position;
    const double r2 = d.squaredNorm();
    if (r2 == 0.0) throw singularity_error("signal gradient is undefined at the transmitter position");
    return -tx.alpha * tx.gain * tx.power * std::pow(r2, -0.5 * (2.0 + tx.alpha)) * d;
}

inline Eigen::VectorXd signal_vector(std::span<const Transmitter> txs, const Vec2& p) {
    Eigen::VectorXd s(static_cast<Eigen::Index>(txs.size()));
    for (std::size_t i = 0; i < txs.size(); ++i) s(static_cast<Eigen::Index>(i)) = signal_strength(txs[i], p);
    return s;
}

}  // namespace swarmap
