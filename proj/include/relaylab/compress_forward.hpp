#pragma once

#include "relaylab/channel.hpp"
#include "relaylab/linalg.hpp"

#include <utility>

namespace relaylab {

enum class CompressionScheme { RD, WZ };

/// Linear-Gaussian compression model y~ = A y + z~: the relay forwards a
/// scaled, noise-corrupted copy of its observation. Both matrices are
/// N2 x N2; Z is the PSD compression-noise covariance.
struct CompressionParams {
    CMatrix a;
    CMatrix z;
    CompressionScheme scheme = CompressionScheme::RD;
};

/// Full compress-and-forward evaluation. Rates in bits; covariances kept for
/// inspection. s2_cond is the conditional relay observation covariance
/// S_{2|1} used by the Wyner-Ziv scheme.
struct CFResult {
    double r11_bits = 0.0;  // source-to-destination rate behind cancellation
    double r12_bits = 0.0;  // relay-to-destination compression rate
    double rate_bits = 0.0;
    CMatrix q11_star;
    CMatrix q22_star;
    CompressionParams params;
    CMatrix s11;
    CMatrix s22;
    CMatrix s21;
    CMatrix s2_cond;
};

/// Source transmit covariance and rate: waterfilling of H11 at P1 (the
/// destination cancels the relay's codeword first, so the source sees an
/// interference-free channel). Returns (Q11*, R11 bits).
std::pair<CMatrix, double> cf_source_covariance(const ChannelRealization& ch,
                                                const PowerConstraints& pc);

/// Relay transmit covariance and rate against source interference:
/// waterfilling of the whitened channel (I + H11 Q11* H11^H)^(-1/2) H12 at
/// P2. Returns (Q22*, R12 bits).
std::pair<CMatrix, double> cf_relay_rate(const ChannelRealization& ch,
                                         const PowerConstraints& pc, const CMatrix& q11_star);

/// Rate-distortion compression of the relay observation with covariance s22
/// at rate r12 bits: D* by reverse waterfilling along the eigenmodes of s22,
/// A = (I - D* s22^{-1})^{1/2}, Z = D*.
CompressionParams rd_params(const CMatrix& s22, double r12_bits);

/// Wyner-Ziv compression: the destination's own observation acts as decoder
/// side information, so the distortion allocation runs on the conditional
/// covariance S_{2|1} = s22 - s21 s11^{-1} s21^H instead of s22. A singular
/// conditional covariance is regularized by 1e-12 tr I before use.
CompressionParams wz_params(const CMatrix& s11, const CMatrix& s22, const CMatrix& s21,
                            double r12_bits);

/// End-to-end compress-and-forward rate: source and relay covariances, the
/// chosen compression scheme, and the equivalent-channel rate
/// logdet(I + H^1 Q11* H^1^H) with H^1 = [H11; (Z + AA^H)^{-1/2} A H21].
CFResult cf_rate(const ChannelRealization& ch, const PowerConstraints& pc,
                 CompressionScheme scheme);

}  // namespace relaylab
