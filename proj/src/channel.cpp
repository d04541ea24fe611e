#include "relaylab/channel.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace relaylab {

void AntennaConfig::validate() const {
    if (m1 < 1 || n1 < 1 || m2 < 1 || n2 < 1) {
        throw std::invalid_argument("AntennaConfig: all antenna counts must be >= 1");
    }
}

double Topology::source_relay_dist() const { return std::hypot(dx, dy); }
double Topology::relay_dest_dist() const { return std::hypot(1.0 - dx, dy); }

void Topology::validate() const {
    if (!(eta >= 0.0) || !std::isfinite(eta) || !std::isfinite(dx) || !std::isfinite(dy)) {
        throw std::invalid_argument("Topology: non-finite or negative parameters");
    }
    if (eta > 0.0 &&
        (source_relay_dist() < kMinNodeDistance || relay_dest_dist() < kMinNodeDistance)) {
        std::ostringstream msg;
        msg << "Topology: relay at (" << dx << ", " << dy
            << ") is within " << kMinNodeDistance << " of the source or destination";
        throw TopologyDegenerateError(msg.str());
    }
}

void PowerConstraints::validate() const {
    if (!(p1 >= 0.0) || !(p2 >= 0.0) || !std::isfinite(p1) || !std::isfinite(p2)) {
        throw std::invalid_argument("PowerConstraints: powers must be finite and >= 0");
    }
    for (const auto& v : {per_antenna_source, per_antenna_relay}) {
        if (v && (!v->allFinite() || (v->size() > 0 && v->minCoeff() < 0.0))) {
            throw std::invalid_argument("PowerConstraints: per-antenna bounds must be >= 0");
        }
    }
}

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
    return mix64(mix64(seed) ^ (trial + 1));
}

double GaussianSource::next_uniform() {
    // 53-bit mantissa, shifted into (0, 1] so log() below is always defined.
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1p-53;
}

Complex GaussianSource::next_complex() {
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    // Unit variance per complex entry: each real part has variance 1/2.
    return Complex(radius * std::cos(angle), radius * std::sin(angle)) * M_SQRT1_2;
}

CMatrix GaussianSource::draw_matrix(Eigen::Index rows, Eigen::Index cols) {
    CMatrix out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            out(r, c) = next_complex();
        }
    }
    return out;
}

ChannelRealization generate_realization(const AntennaConfig& cfg, const Topology& topo,
                                        std::uint64_t seed, std::uint64_t trial) {
    cfg.validate();
    topo.validate();
    GaussianSource rng(trial_seed(seed, trial));
    ChannelRealization ch;
    ch.h11 = rng.draw_matrix(cfg.n1, cfg.m1);
    ch.h21 = rng.draw_matrix(cfg.n2, cfg.m1);
    ch.h12 = rng.draw_matrix(cfg.n1, cfg.m2);
    // Amplitude scale (d^2)^(-eta/4), i.e. power attenuation d^(-eta).
    const double sr2 = topo.dx * topo.dx + topo.dy * topo.dy;
    const double rd2 = (1.0 - topo.dx) * (1.0 - topo.dx) + topo.dy * topo.dy;
    ch.h21 *= std::pow(sr2, -topo.eta / 4.0);
    ch.h12 *= std::pow(rd2, -topo.eta / 4.0);
    return ch;
}

std::vector<ChannelRealization> generate_realizations(const AntennaConfig& cfg,
                                                      const Topology& topo,
                                                      std::uint64_t seed, int count) {
    if (count < 1) throw std::invalid_argument("generate_realizations: count must be >= 1");
    std::vector<ChannelRealization> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t) {
        out.push_back(generate_realization(cfg, topo, seed, static_cast<std::uint64_t>(t)));
    }
    return out;
}

std::pair<CMatrix, CMatrix> equivalent_blocks(const ChannelRealization& ch) {
    CMatrix h1(ch.n1() + ch.n2(), ch.m1());
    h1.topRows(ch.n1()) = ch.h11;
    h1.bottomRows(ch.n2()) = ch.h21;
    CMatrix h1t(ch.n1(), ch.m1() + ch.m2());
    h1t.leftCols(ch.m1()) = ch.h11;
    h1t.rightCols(ch.m2()) = ch.h12;
    return {std::move(h1), std::move(h1t)};
}

namespace {

void checksum_bytes(std::uint64_t& h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ull;
    }
}

void checksum_matrix(std::uint64_t& h, const CMatrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const double re = m(r, c).real();
            const double im = m(r, c).imag();
            checksum_bytes(h, &re, sizeof re);
            checksum_bytes(h, &im, sizeof im);
        }
    }
}

void print_matrix(std::ostream& os, const char* name, const CMatrix& m) {
    os << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    char buf[64];
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g %.17g", m(r, c).real(), m(r, c).imag());
            os << buf << (c + 1 < m.cols() ? " " : "");
        }
        os << '\n';
    }
}

}  // namespace

std::uint64_t realization_checksum(const ChannelRealization& ch) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    checksum_matrix(h, ch.h11);
    checksum_matrix(h, ch.h21);
    checksum_matrix(h, ch.h12);
    return h;
}

void write_channel_dump(std::ostream& os, const AntennaConfig& cfg, const Topology& topo,
                        std::uint64_t seed, const std::vector<ChannelRealization>& chs) {
    char buf[128];
    os << "# relaylab channel dump v1\n";
    os << "# m1=" << cfg.m1 << " n1=" << cfg.n1 << " m2=" << cfg.m2 << " n2=" << cfg.n2 << "\n";
    std::snprintf(buf, sizeof buf, "# dx=%.17g dy=%.17g eta=%.17g", topo.dx, topo.dy, topo.eta);
    os << buf << "\n";
    os << "# seed=" << seed << " trials=" << chs.size() << "\n";
    os << "# entries: decimal re/im pairs, row-major; matrices per trial: H11 H21 H12\n";
    for (std::size_t t = 0; t < chs.size(); ++t) {
        os << "trial " << t << "\n";
        print_matrix(os, "H11", chs[t].h11);
        print_matrix(os, "H21", chs[t].h21);
        print_matrix(os, "H12", chs[t].h12);
    }
}

}  // namespace relaylab
