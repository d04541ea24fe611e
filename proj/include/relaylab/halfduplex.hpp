#pragma once

#include "relaylab/fullduplex.hpp"

#include <string>
#include <utility>
#include <vector>

namespace relaylab {

/// Fractions of the total bandwidth assigned to Band 1 (relay listens) and
/// Band 2 (relay transmits). w1, w2 >= 0 and w1 + w2 <= 1; at any optimum
/// the full bandwidth is used, w1 + w2 = 1 up to solver tolerance.
struct BandAllocation {
    double w1 = 0.0;
    double w2 = 0.0;
};

/// Joint bandwidth / covariance optimum of one half-duplex scheme.
/// q_band1 is the Band-1 source covariance (M1 x M1). q_band2 is the Band-2
/// joint source+relay covariance (M x M) for hcs/hdf and the relay-only
/// covariance (M2 x M2) for the two-hop scheme. components holds the
/// attainable per-band rates at the returned operating point, in bits
/// (R1, R2, Rd, Rc for hcs; Rr, Rd, Rc for hdf; Rsr, Rrd for two-hop).
struct HalfDuplexSolution {
    RateReport report;
    BandAllocation band;
    CMatrix q_band1;
    CMatrix q_band2;
    std::vector<std::pair<std::string, double>> components;
};

/// Half-duplex cut-set bound: maximize R subject to R <= R1 + R2,
/// R <= Rd + Rc, the four perspective log-det bounds on R1, R2, Rd, Rc,
/// the summed source power across bands, the relay power in Band 2, and
/// w1 + w2 <= 1. The barrier needs w > 0, so the interior solve keeps
/// w >= 1e-9 and the two bandwidth endpoints are evaluated in closed form
/// (w1=1: full-band direct waterfilling; w2=1: a Band-2-only program);
/// the best of the three is returned.
HalfDuplexSolution hcs_rate(const ChannelRealization& ch, const PowerConstraints& pc,
                            double tol_nats = 1e-6);

/// Half-duplex decode-and-forward: R <= min(Rr, Rd + Rc) with Rr the Band-1
/// source-to-relay rate. Endpoint w1=1 solves max min(Rr, Rd) over the
/// Band-1 covariance; w2=1 forces Rr = 0 and is never better than zero.
HalfDuplexSolution hdf_rate(const ChannelRealization& ch, const PowerConstraints& pc,
                            double tol_nats = 1e-6);

/// Two-hop relaying: R <= min(Rsr, Rrd) with the source-to-relay hop in
/// Band 1 and the relay-to-destination hop in Band 2; independent per-band
/// covariances and per-node powers. Both bandwidth endpoints kill one hop,
/// so only the interior program is solved.
HalfDuplexSolution twohop_rate(const ChannelRealization& ch, const PowerConstraints& pc,
                               double tol_nats = 1e-6);

}  // namespace relaylab
