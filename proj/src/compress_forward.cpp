#include "relaylab/compress_forward.hpp"

#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relaylab {
namespace {

using internal::check_dims;

// Waterfilling of one MIMO link; returns the covariance in full matrix form
// and the rate in bits.
std::pair<CMatrix, double> waterfill_link(const CMatrix& channel, double power) {
    const auto ed = eig_hermitian(hermitian_part(channel.adjoint() * channel));
    const auto wf = waterfill(ed.eigenvalues.cwiseMax(0.0), power);
    CMatrix q = hermitian_part(ed.eigenvectors * wf.powers.cast<Complex>().asDiagonal() *
                               ed.eigenvectors.adjoint());
    return {std::move(q), std::max(0.0, nats_to_bits(wf.rate_nats))};
}

// D* diagonal in the eigenbasis of the source covariance; A shares that
// basis, so it is assembled there directly with clamping against rounding.
CompressionParams compress_spectrum(const CMatrix& source_cov, double r12_bits,
                                    CompressionScheme tag) {
    if (!(r12_bits >= 0.0)) throw std::invalid_argument("compression rate must be >= 0");
    const auto ed = eig_hermitian(hermitian_part(source_cov));
    const auto rw = reverse_waterfill(ed.eigenvalues, bits_to_nats(r12_bits));
    const RVector a_sq =
        (1.0 - rw.distortions.array() / ed.eigenvalues.array()).cwiseMax(0.0).matrix();
    CompressionParams p;
    p.scheme = tag;
    p.z = hermitian_part(ed.eigenvectors * rw.distortions.cast<Complex>().asDiagonal() *
                         ed.eigenvectors.adjoint());
    p.a = hermitian_part(ed.eigenvectors * a_sq.cwiseSqrt().cast<Complex>().asDiagonal() *
                         ed.eigenvectors.adjoint());
    return p;
}

}  // namespace

std::pair<CMatrix, double> cf_source_covariance(const ChannelRealization& ch,
                                                const PowerConstraints& pc) {
    check_dims(ch);
    pc.validate();
    return waterfill_link(ch.h11, pc.p1);
}

std::pair<CMatrix, double> cf_relay_rate(const ChannelRealization& ch,
                                         const PowerConstraints& pc, const CMatrix& q11_star) {
    check_dims(ch);
    pc.validate();
    const CMatrix s11 = hermitian_part(CMatrix::Identity(ch.n1(), ch.n1()) +
                                       ch.h11 * q11_star * ch.h11.adjoint());
    return waterfill_link(inv_sqrt_psd(s11) * ch.h12, pc.p2);
}

CompressionParams rd_params(const CMatrix& s22, double r12_bits) {
    return compress_spectrum(s22, r12_bits, CompressionScheme::RD);
}

CompressionParams wz_params(const CMatrix& s11, const CMatrix& s22, const CMatrix& s21,
                            double r12_bits) {
    const Eigen::LLT<CMatrix> llt(s11);
    if (llt.info() != Eigen::Success)
        throw SingularBlockError("destination observation covariance not positive definite");
    CMatrix s_cond = hermitian_part(s22 - s21 * llt.solve(s21.adjoint()));
    const double floor = 1e-12 * s_cond.real().trace();
    if (eig_hermitian(s_cond).eigenvalues.minCoeff() <= floor)
        s_cond += floor * CMatrix::Identity(s_cond.rows(), s_cond.cols());
    return compress_spectrum(s_cond, r12_bits, CompressionScheme::WZ);
}

CFResult cf_rate(const ChannelRealization& ch, const PowerConstraints& pc,
                 CompressionScheme scheme) {
    CFResult res;
    std::tie(res.q11_star, res.r11_bits) = cf_source_covariance(ch, pc);
    std::tie(res.q22_star, res.r12_bits) = cf_relay_rate(ch, pc, res.q11_star);

    const int n1 = ch.n1();
    const int n2 = ch.n2();
    res.s11 = hermitian_part(CMatrix::Identity(n1, n1) +
                             ch.h11 * res.q11_star * ch.h11.adjoint());
    res.s22 = hermitian_part(CMatrix::Identity(n2, n2) +
                             ch.h21 * res.q11_star * ch.h21.adjoint());
    res.s21 = ch.h21 * res.q11_star * ch.h11.adjoint();
    res.s2_cond =
        hermitian_part(res.s22 - res.s21 * Eigen::LLT<CMatrix>(res.s11).solve(res.s21.adjoint()));

    res.params = scheme == CompressionScheme::RD
                     ? rd_params(res.s22, res.r12_bits)
                     : wz_params(res.s11, res.s22, res.s21, res.r12_bits);

    // Equivalent channel: relay rows scaled by A and renormalized to unit
    // noise through (Z + AA^H)^{-1/2}.
    const CMatrix noise = hermitian_part(res.params.z + res.params.a * res.params.a.adjoint());
    CMatrix h_hat(n1 + n2, ch.m1());
    h_hat.topRows(n1) = ch.h11;
    h_hat.bottomRows(n2) = inv_sqrt_psd(noise) * res.params.a * ch.h21;

    const CMatrix gram = hermitian_part(CMatrix::Identity(n1 + n2, n1 + n2) +
                                        h_hat * res.q11_star * h_hat.adjoint());
    res.rate_bits = std::max(0.0, nats_to_bits(logdet_psd(gram)));
    return res;
}

}  // namespace relaylab
