#pragma once

#include "relaylab/linalg.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace relaylab {

struct TopologyDegenerateError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Antenna counts: source transmits with m1, destination receives with n1,
/// the relay transmits with m2 and receives with n2.
struct AntennaConfig {
    int m1 = 1;
    int n1 = 1;
    int m2 = 1;
    int n2 = 1;

    int m() const { return m1 + m2; }
    int n() const { return n1 + n2; }
    bool scalar() const { return m1 == 1 && n1 == 1 && m2 == 1 && n2 == 1; }
    void validate() const;
};

/// Node geometry on the unit segment: source at (0,0), destination at (1,0),
/// relay at (dx,dy). eta is the distance-based path-loss power exponent.
struct Topology {
    double dx = 1.0 / 3.0;
    double dy = 0.5;
    double eta = 4.0;

    double source_relay_dist() const;
    double relay_dest_dist() const;
    void validate() const;
};

/// Minimum relay separation from source/destination; below it the path gain
/// blows up and generation is refused.
inline constexpr double kMinNodeDistance = 1e-3;

struct PowerConstraints {
    double p1 = 1.0;
    double p2 = 1.0;
    std::optional<RVector> per_antenna_source;  // length m1 when present
    std::optional<RVector> per_antenna_relay;   // length m2 when present
    void validate() const;
};

/// One flat-fading draw of the three channel matrices: source->destination
/// h11 (n1 x m1), source->relay h21 (n2 x m1), relay->destination h12 (n1 x m2).
struct ChannelRealization {
    CMatrix h11;
    CMatrix h21;
    CMatrix h12;

    int m1() const { return static_cast<int>(h11.cols()); }
    int n1() const { return static_cast<int>(h11.rows()); }
    int m2() const { return static_cast<int>(h12.cols()); }
    int n2() const { return static_cast<int>(h21.rows()); }
};

/// splitmix64 finalizer; the documented integer hash used to derive
/// independent per-trial seeds from (seed, trial).
std::uint64_t mix64(std::uint64_t z);
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

/// Deterministic stream of unit-variance circularly symmetric complex
/// Gaussians. Uniforms come from a seeded mt19937_64 (u = (x >> 11 + 1) *
/// 2^-53, so u is in (0, 1]); a Box-Muller transform turns consecutive
/// uniform pairs (u1, u2) into g_re = sqrt(-2 ln u1) cos(2 pi u2) and
/// g_im = sqrt(-2 ln u1) sin(2 pi u2); the entry is (g_re + i g_im)/sqrt(2).
class GaussianSource {
  public:
    explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

    Complex next_complex();
    CMatrix draw_matrix(Eigen::Index rows, Eigen::Index cols);

  private:
    double next_uniform();  // in (0, 1]
    std::mt19937_64 engine_;
};

/// Fading draw for one trial. The raw unit-variance matrices depend only on
/// (cfg, seed, trial); the topology contributes deterministic amplitude
/// scales (d^2)^(-eta/4), so sweeping the relay position reuses the same
/// fading across positions.
ChannelRealization generate_realization(const AntennaConfig& cfg, const Topology& topo,
                                        std::uint64_t seed, std::uint64_t trial);

std::vector<ChannelRealization> generate_realizations(const AntennaConfig& cfg,
                                                      const Topology& topo,
                                                      std::uint64_t seed, int count);

/// H1 = [H11; H21] (n x m1) and H1_tilde = [H11 H12] (n1 x m), the first
/// block column and block row of the composite channel.
std::pair<CMatrix, CMatrix> equivalent_blocks(const ChannelRealization& ch);

/// FNV-1a over the raw little-endian bytes of all entries; used to log that
/// every scheme in a trial saw the same realization.
std::uint64_t realization_checksum(const ChannelRealization& ch);

/// Text dump, one record per trial: decimal "re im" entry pairs in row-major
/// order, matrices in the order H11 H21 H12, '#' header carrying cfg,
/// topology, seed and format version.
void write_channel_dump(std::ostream& os, const AntennaConfig& cfg, const Topology& topo,
                        std::uint64_t seed, const std::vector<ChannelRealization>& chs);

}  // namespace relaylab
