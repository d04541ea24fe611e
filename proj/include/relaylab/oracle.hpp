#pragma once

#include "relaylab/channel.hpp"
#include "relaylab/compress_forward.hpp"

#include <string>

namespace relaylab {

/// Brute-force and closed-form references for all-scalar instances (every
/// antenna count 1). They share nothing with the solver path except the
/// channel container, so agreement is evidence, not tautology. Every scalar
/// program is phase-invariant at its optimum (the transmitters align their
/// phases), so the searches run over magnitudes and a real correlation
/// coefficient in [0, 1].
///
/// Grids:
///  - cut-set / decode-forward: 2-D over correlation rho and conditional
///    power fraction, step 1e-3 on [0,1]^2.
///  - two-hop: 1-D over w1, step 1e-4.
///  - half-duplex cut-set / decode-forward: 3-D over (w1, band-1 power
///    share, band-2 correlation), 101^3 coarse pass plus two 41^3 local
///    refinements around the incumbent.
///  - co-located source: 3-D over both power fractions and the relative
///    transmit phase; the optimum sits on grid corners, which the grid hits
///    exactly.
///  - direct, co-located destination, compress-forward: closed forms.
///
/// All rates in bits. Throws std::invalid_argument when the realization is
/// not all-scalar or the scheme name is unknown.

double scalar_cutset_oracle_bits(const ChannelRealization& ch, const PowerConstraints& pc);
double scalar_df_oracle_bits(const ChannelRealization& ch, const PowerConstraints& pc);
double scalar_direct_oracle_bits(const ChannelRealization& ch, const PowerConstraints& pc);
double scalar_coloc_src_oracle_bits(const ChannelRealization& ch, const PowerConstraints& pc);
double scalar_coloc_dst_oracle_bits(const ChannelRealization& ch, const PowerConstraints& pc);
double scalar_hcs_oracle_bits(const ChannelRealization& ch, const PowerConstraints& pc);
double scalar_hdf_oracle_bits(const ChannelRealization& ch, const PowerConstraints& pc);
double scalar_twohop_oracle_bits(const ChannelRealization& ch, const PowerConstraints& pc);
double scalar_cf_oracle_bits(const ChannelRealization& ch, const PowerConstraints& pc,
                             CompressionScheme scheme);

/// Dispatch by scheme tag ("cs", "df", "direct", "coloc-src", "coloc-dst",
/// "hcs", "hdf", "twohop", "cf-rd", "cf-wz").
double scalar_oracle_bits(const std::string& scheme, const ChannelRealization& ch,
                          const PowerConstraints& pc);

}  // namespace relaylab
