#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "relaylab/compress_forward.hpp"
#include "relaylab/fullduplex.hpp"

#include <cmath>

using namespace relaylab;

namespace {

ChannelRealization random_channel(int m1, int n1, int m2, int n2, std::uint64_t seed) {
    GaussianSource src(seed);
    ChannelRealization ch;
    ch.h11 = src.draw_matrix(n1, m1);
    ch.h21 = src.draw_matrix(n2, m1);
    ch.h12 = src.draw_matrix(n1, m2);
    return ch;
}

ChannelRealization scalar_channel(double h11, double h21, double h12) {
    ChannelRealization ch;
    ch.h11 = CMatrix::Constant(1, 1, Complex(h11));
    ch.h21 = CMatrix::Constant(1, 1, Complex(h21));
    ch.h12 = CMatrix::Constant(1, 1, Complex(h12));
    return ch;
}

}  // namespace

TEST_CASE("source covariance is direct waterfilling") {
    SUBCASE("unit scalar link") {
        const ChannelRealization ch = scalar_channel(1.0, 0.5, 1.0);
        const auto [q, r11] = cf_source_covariance(ch, PowerConstraints{});
        CHECK(std::abs(q(0, 0).real() - 1.0) <= 1e-12);
        CHECK(std::abs(r11 - 1.0) <= 1e-12);
    }
    SUBCASE("zero power") {
        const ChannelRealization ch = random_channel(2, 2, 1, 1, 41);
        PowerConstraints pc;
        pc.p1 = 0.0;
        const auto [q, r11] = cf_source_covariance(ch, pc);
        CHECK(r11 == 0.0);
        CHECK(q.norm() <= 1e-15);
    }
    SUBCASE("random instance equals the direct oracle") {
        const ChannelRealization ch = random_channel(3, 2, 1, 1, 42);
        PowerConstraints pc;
        pc.p1 = 2.2;
        const auto [q, r11] = cf_source_covariance(ch, pc);
        CHECK(std::abs(r11 - direct_capacity(ch, pc).rate_bits) <= 1e-10);
        CHECK(std::abs(q.trace().real() - pc.p1) <= 1e-9);
    }
}

TEST_CASE("relay rate whitens the source interference") {
    SUBCASE("dead relay-destination link") {
        ChannelRealization ch = random_channel(2, 2, 2, 2, 43);
        ch.h12.setZero();
        const auto [q11, r11] = cf_source_covariance(ch, PowerConstraints{});
        const auto [q22, r12] = cf_relay_rate(ch, PowerConstraints{}, q11);
        CHECK(r12 == 0.0);
    }
    SUBCASE("scalar closed form") {
        const ChannelRealization ch = scalar_channel(1.0, 1.0, 10.0);
        const CMatrix q11 = CMatrix::Identity(1, 1);
        const auto [q22, r12] = cf_relay_rate(ch, PowerConstraints{}, q11);
        CHECK(std::abs(r12 - std::log2(51.0)) <= 1e-12);
        CHECK(std::abs(q22(0, 0).real() - 1.0) <= 1e-12);
    }
    SUBCASE("no interference means plain waterfilling") {
        ChannelRealization ch = random_channel(2, 2, 2, 2, 44);
        ch.h11.setZero();
        PowerConstraints pc;
        pc.p2 = 1.4;
        const auto [q11, r11] = cf_source_covariance(ch, pc);
        const auto [q22, r12] = cf_relay_rate(ch, pc, q11);

        const auto ed = eig_hermitian(hermitian_part(ch.h12.adjoint() * ch.h12));
        const auto wf = waterfill(ed.eigenvalues.cwiseMax(0.0), pc.p2);
        CHECK(std::abs(r12 - nats_to_bits(wf.rate_nats)) <= 1e-12);
    }
}

TEST_CASE("rate-distortion compression parameters") {
    SUBCASE("zero rate carries nothing") {
        CMatrix s22(2, 2);
        s22 << Complex(3.0), Complex(0.5, 0.25), Complex(0.5, -0.25), Complex(2.0);
        const CompressionParams p = rd_params(s22, 0.0);
        CHECK((p.z - s22).norm() <= 1e-12);
        CHECK(p.a.norm() <= 1e-12);
    }
    SUBCASE("scalar closed form") {
        const CMatrix s22 = CMatrix::Constant(1, 1, Complex(2.0));
        const CompressionParams p = rd_params(s22, std::log2(51.0));
        CHECK(std::abs(p.z(0, 0).real() - 2.0 / 51.0) <= 1e-12);
        CHECK(std::abs(p.a(0, 0).real() - std::sqrt(50.0 / 51.0)) <= 1e-12);
    }
    SUBCASE("two-mode reverse waterfill hits the unit level") {
        CMatrix s22 = CMatrix::Zero(2, 2);
        s22(0, 0) = 4.0;
        s22(1, 1) = 1.0;
        const CompressionParams p = rd_params(s22, 2.0);
        CHECK((p.z - CMatrix::Identity(2, 2)).norm() <= 1e-9);
    }
}

TEST_CASE("Wyner-Ziv compression parameters") {
    SUBCASE("no side information reduces to rate-distortion") {
        CMatrix s22(2, 2);
        s22 << Complex(3.0), Complex(0.5, 0.25), Complex(0.5, -0.25), Complex(2.0);
        const CMatrix s11 = 2.0 * CMatrix::Identity(2, 2);
        const CMatrix s21 = CMatrix::Zero(2, 2);
        const CompressionParams wz = wz_params(s11, s22, s21, 1.3);
        const CompressionParams rd = rd_params(s22, 1.3);
        CHECK((wz.z - rd.z).norm() <= 1e-12);
        CHECK((wz.a - rd.a).norm() <= 1e-12);
        CHECK(wz.scheme == CompressionScheme::WZ);
    }
    SUBCASE("scalar closed form") {
        const CMatrix s11 = CMatrix::Constant(1, 1, Complex(2.0));
        const CMatrix s22 = CMatrix::Constant(1, 1, Complex(2.0));
        const CMatrix s21 = CMatrix::Constant(1, 1, Complex(1.0));
        const CompressionParams p = wz_params(s11, s22, s21, std::log2(51.0));
        CHECK(std::abs(p.z(0, 0).real() - 1.5 / 51.0) <= 1e-12);
        CHECK(std::abs(p.a(0, 0).real() - std::sqrt(50.0 / 51.0)) <= 1e-12);
    }
    SUBCASE("side information never increases the distortion") {
        const ChannelRealization ch = random_channel(2, 2, 2, 2, 45);
        const auto [q11, r11] = cf_source_covariance(ch, PowerConstraints{});
        const CMatrix s11 = hermitian_part(CMatrix::Identity(2, 2) +
                                           ch.h11 * q11 * ch.h11.adjoint());
        const CMatrix s22 = hermitian_part(CMatrix::Identity(2, 2) +
                                           ch.h21 * q11 * ch.h21.adjoint());
        const CMatrix s21 = ch.h21 * q11 * ch.h11.adjoint();
        const double r12 = 1.7;
        const CompressionParams rd = rd_params(s22, r12);
        const CompressionParams wz = wz_params(s11, s22, s21, r12);
        CHECK(wz.z.real().trace() <= rd.z.real().trace() + 1e-12);
    }
}

TEST_CASE("scalar compress-and-forward chains match the closed forms") {
    const ChannelRealization ch = scalar_channel(1.0, 1.0, 10.0);
    PowerConstraints pc;

    const CFResult rd = cf_rate(ch, pc, CompressionScheme::RD);
    CHECK(std::abs(rd.r11_bits - 1.0) <= 1e-12);
    CHECK(std::abs(rd.r12_bits - std::log2(51.0)) <= 1e-12);
    CHECK(std::abs(rd.rate_bits - std::log2(2.0 + 50.0 / 52.0)) <= 1e-9);

    const CFResult wz = cf_rate(ch, pc, CompressionScheme::WZ);
    CHECK(std::abs(wz.rate_bits - std::log2(2.0 + 50.0 / 51.5)) <= 1e-9);
    CHECK(wz.rate_bits >= rd.rate_bits);
    CHECK(std::abs(wz.s2_cond(0, 0).real() - 1.5) <= 1e-12);
}

TEST_CASE("mute relay collapses compress-and-forward to the direct rate") {
    SUBCASE("dead relay-destination channel") {
        ChannelRealization ch = random_channel(2, 2, 2, 2, 46);
        ch.h12.setZero();
        for (const auto scheme : {CompressionScheme::RD, CompressionScheme::WZ}) {
            const CFResult res = cf_rate(ch, PowerConstraints{}, scheme);
            CHECK(res.r12_bits == 0.0);
            CHECK(std::abs(res.rate_bits - res.r11_bits) <= 1e-12);
        }
    }
    SUBCASE("zero relay power") {
        const ChannelRealization ch = random_channel(2, 2, 2, 2, 47);
        PowerConstraints pc;
        pc.p2 = 0.0;
        const CFResult res = cf_rate(ch, pc, CompressionScheme::WZ);
        CHECK(res.r12_bits == 0.0);
        CHECK(std::abs(res.rate_bits - res.r11_bits) <= 1e-12);
    }
}

TEST_CASE("compress-and-forward orderings on random instances") {
    for (const std::uint64_t seed : {48u, 49u, 50u}) {
        const ChannelRealization ch = random_channel(2, 2, 2, 2, seed);
        PowerConstraints pc;
        const CFResult rd = cf_rate(ch, pc, CompressionScheme::RD);
        const CFResult wz = cf_rate(ch, pc, CompressionScheme::WZ);

        CHECK(rd.rate_bits >= rd.r11_bits - 1e-9);
        CHECK(wz.rate_bits >= wz.r11_bits - 1e-9);
        CHECK(rd.q11_star.trace().real() <= pc.p1 + 1e-9);
        CHECK(rd.q22_star.trace().real() <= pc.p2 + 1e-9);

        const double cs = cutset_rate(ch, pc).rate_bits;
        CHECK(rd.rate_bits <= cs + 5e-6);
        CHECK(wz.rate_bits <= cs + 5e-6);
    }
}

TEST_CASE("side information wins across the relaying geometry") {
    AntennaConfig cfg;
    cfg.m1 = cfg.n1 = cfg.m2 = cfg.n2 = 2;
    PowerConstraints pc;
    for (const double dx : {0.2, 1.0 / 3.0, 0.6, 0.9}) {
        Topology topo;
        topo.dx = dx;
        for (std::uint64_t trial = 0; trial < 5; ++trial) {
            const ChannelRealization ch = generate_realization(cfg, topo, 1, trial);
            const CFResult rd = cf_rate(ch, pc, CompressionScheme::RD);
            const CFResult wz = cf_rate(ch, pc, CompressionScheme::WZ);
            CHECK(wz.rate_bits >= rd.rate_bits - 1e-9);
        }
    }
}

TEST_CASE("trace-optimal compression is not always end-rate optimal") {
    // Known boundary instance: the relay observation is barely above the
    // noise floor, and the basis that minimizes trace distortion is poorly
    // aligned with the forward channel. Trace dominance still holds; the
    // end-rate ordering flips by under 2e-3 bits.
    const ChannelRealization ch = random_channel(2, 2, 2, 2, 49);
    PowerConstraints pc;
    const CFResult rd = cf_rate(ch, pc, CompressionScheme::RD);
    const CFResult wz = cf_rate(ch, pc, CompressionScheme::WZ);
    CHECK(wz.params.z.real().trace() <= rd.params.z.real().trace() + 1e-12);
    CHECK(rd.rate_bits > wz.rate_bits);
    CHECK(rd.rate_bits - wz.rate_bits < 1e-2);
}

TEST_CASE("strong relay link drives the rate to the uncompressed limit") {
    const ChannelRealization base = random_channel(2, 2, 2, 2, 51);
    PowerConstraints pc;
    const auto [q11, r11] = cf_source_covariance(base, pc);

    CMatrix h1(4, 2);
    h1 << base.h11, base.h21;
    const double limit = nats_to_bits(logdet_psd(
        hermitian_part(CMatrix::Identity(4, 4) + h1 * q11 * h1.adjoint())));

    double prev = 0.0;
    double prev_gap = limit;
    for (const double g : {10.0, 100.0, 1000.0}) {
        ChannelRealization ch = base;
        ch.h12 *= g;
        const CFResult res = cf_rate(ch, pc, CompressionScheme::WZ);
        CHECK(res.rate_bits >= prev - 1e-9);
        CHECK(res.rate_bits <= limit + 1e-9);
        const double gap = limit - res.rate_bits;
        CHECK(gap <= prev_gap + 1e-9);
        prev = res.rate_bits;
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-2);
}
