#pragma once

#include "relaylab/channel.hpp"
#include "relaylab/detmax.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace relaylab {
namespace internal {

// Trace bounds of zero leave no interior for the barrier; a tiny positive
// floor keeps programs strictly feasible without moving the optimum beyond
// solver tolerance.
inline constexpr double kPowerFloor = 1e-12;

inline double clamp_power(double p) { return std::max(p, kPowerFloor); }

inline void check_dims(const ChannelRealization& ch) {
    if (ch.h21.cols() != ch.h11.cols() || ch.h12.rows() != ch.h11.rows())
        throw std::invalid_argument("channel blocks disagree on antenna counts");
}

inline detmax::Options make_options(double tol_nats) {
    if (!(tol_nats > 0.0)) throw std::invalid_argument("tolerance must be positive");
    detmax::Options opts;
    opts.tol_nats = tol_nats;
    return opts;
}

// Rethrows solver failures with the scheme name prepended.
inline detmax::Solution solve_tagged(const std::string& scheme, const detmax::Problem& p,
                                     const detmax::Point& start, const detmax::Options& opts) {
    try {
        return detmax::solve(p, start, opts);
    } catch (const detmax::InfeasibleStartError& e) {
        throw detmax::InfeasibleStartError(scheme + ": " + e.what());
    } catch (const detmax::NumericalBreakdownError& e) {
        throw detmax::NumericalBreakdownError(scheme + ": " + e.what());
    }
}

// Identity on one diagonal block of an m x m variable; trace weight for
// block power constraints.
inline CMatrix block_trace_weight(int m, int offset, int dim) {
    CMatrix w = CMatrix::Zero(m, m);
    w.block(offset, offset, dim, dim).setIdentity();
    return w;
}

// Block-diagonal start covariance with uniform per-antenna loads.
inline CMatrix split_diag(int m1, int m2, double per1, double per2) {
    CMatrix q = CMatrix::Zero(m1 + m2, m1 + m2);
    q.topLeftCorner(m1, m1) = Complex(per1, 0.0) * CMatrix::Identity(m1, m1);
    q.bottomRightCorner(m2, m2) = Complex(per2, 0.0) * CMatrix::Identity(m2, m2);
    return q;
}

}  // namespace internal
}  // namespace relaylab
