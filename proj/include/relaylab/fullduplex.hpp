#pragma once

#include "relaylab/channel.hpp"
#include "relaylab/detmax.hpp"
#include "relaylab/linalg.hpp"

#include <optional>
#include <string>

namespace relaylab {

/// Optimizer of a cut-set style program: the joint source+relay transmit
/// covariance Q (M x M) together with the conditional source covariance
/// Q_cond that the relaxed coupling Q - C1 Q_cond C1^T >= 0 pairs with it.
struct JointCovariance {
    CMatrix q;       // M x M
    CMatrix q_cond;  // M1 x M1
    int m1 = 0;

    CMatrix q11() const { return q.topLeftCorner(m1, m1); }
    CMatrix q22() const { return q.bottomRightCorner(q.rows() - m1, q.cols() - m1); }
    CMatrix q12() const { return q.topRightCorner(m1, q.cols() - m1); }
};

/// Result of one rate computation. rate_bits is never negative; the optional
/// optimizer fields are filled only by the schemes that produce them.
struct RateReport {
    std::string scheme;
    double rate_bits = 0.0;
    detmax::Diagnostics diagnostics;
    std::optional<JointCovariance> joint;      // cut-set / decode-and-forward
    std::optional<CMatrix> input_covariance;   // waterfilled single-link schemes
};

/// Most negative eigenvalue of Q11 - Q12 Q22^{-1} Q21 - Q_cond. At a clean
/// optimum the relaxed coupling is tight in the PSD order, so this is
/// >= -1e-7. Requires Q22 positive definite (interior solutions are).
double schur_slack(const JointCovariance& jc);

/// Cut-set upper bound over (R, Q, Q_cond): R is bounded by the broadcast
/// cut logdet(I_N + H1 Q_cond H1^H) with H1 = [H11; H21] and by the
/// multiple-access cut logdet(I_N1 + [H11 H12] Q [H11 H12]^H), under the
/// block trace limits tr Q11 <= P1, tr Q22 <= P2 and the PSD-relaxed
/// conditional covariance coupling. per_antenna adds q_ii <= p_i diagonal
/// rows: explicit vectors from pc when present, else the equal split P_k/M_k.
RateReport cutset_rate(const ChannelRealization& ch, const PowerConstraints& pc,
                       bool per_antenna = false, double tol_nats = 1e-6);

/// Decode-and-forward achievable rate: the same program with the
/// source-relay channel H21 alone replacing the broadcast cut.
RateReport df_rate(const ChannelRealization& ch, const PowerConstraints& pc,
                   bool per_antenna = false, double tol_nats = 1e-6);

/// No-relay baseline: waterfilling over the eigenmodes of H11^H H11 at P1.
RateReport direct_capacity(const ChannelRealization& ch, const PowerConstraints& pc);

/// Relay transmit antennas pooled with the source: maximize
/// logdet(I_N1 + [H11 H12] Q [H11 H12]^H) over Q in H+^M under both block
/// trace limits.
RateReport colocated_source_capacity(const ChannelRealization& ch, const PowerConstraints& pc,
                                     double tol_nats = 1e-6);

/// Relay receive antennas pooled with the destination: waterfilling over the
/// eigenmodes of [H11; H21]^H [H11; H21] at P1.
RateReport colocated_dest_capacity(const ChannelRealization& ch, const PowerConstraints& pc);

}  // namespace relaylab
