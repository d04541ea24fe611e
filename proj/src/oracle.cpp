#include "relaylab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace relaylab {

namespace {

void require_scalar(const ChannelRealization& ch) {
    if (ch.m1() != 1 || ch.n1() != 1 || ch.m2() != 1 || ch.n2() != 1) {
        throw std::invalid_argument("scalar oracle: all antenna counts must be 1");
    }
}

struct Gains {
    double g11;  // |h11|^2
    double g21;
    double g12;
    double p1;
    double p2;
};

Gains gains_of(const ChannelRealization& ch, const PowerConstraints& pc) {
    require_scalar(ch);
    pc.validate();
    return {std::norm(ch.h11(0, 0)), std::norm(ch.h21(0, 0)), std::norm(ch.h12(0, 0)),
            pc.p1, pc.p2};
}

// w * log(1 + x / w), continuously extended by 0 at w = 0
double perspective(double w, double x) {
    return w > 0.0 ? w * std::log1p(x / w) : 0.0;
}

// max over rho, c in [0,1]^2 (step 1e-3) of
//   min( log(1 + cut1_gain * c * (1 - rho^2) * p1),
//        log(1 + g11 p1 + 2 rho sqrt(g11 g12 p1 p2) + g12 p2) )
// cut1 sees the conditional source power, cut2 the fully correlated inputs.
double cut_pair_oracle_nats(double cut1_gain, const Gains& g) {
    constexpr int kSteps = 1000;
    const double cross = 2.0 * std::sqrt(g.g11 * g.g12 * g.p1 * g.p2);
    double best = 0.0;
    for (int i = 0; i <= kSteps; ++i) {
        const double rho = static_cast<double>(i) / kSteps;
        const double cut2 = std::log1p(g.g11 * g.p1 + rho * cross + g.g12 * g.p2);
        if (cut2 <= best) continue;  // min cannot beat the incumbent
        const double qc_max = cut1_gain * (1.0 - rho * rho) * g.p1;
        for (int j = 0; j <= kSteps; ++j) {
            const double c = static_cast<double>(j) / kSteps;
            const double v = std::min(std::log1p(c * qc_max), cut2);
            if (v > best) best = v;
        }
    }
    return best;
}

struct GridPoint {
    double x[3];
    double value;
};

// Coarse pass over [0,1]^3, then two shrinking local refinements around each
// of the best few coarse basins. The min-of-chains surface has ridges, so a
// single-basin refinement can lock onto the wrong branch.
template <typename F>
double grid3_refine_max(const F& f) {
    constexpr int kCoarse = 100;  // 101 points per axis
    constexpr int kBasins = 6;
    constexpr int kSeparation = 4;  // basin spacing, in coarse steps
    constexpr int kFine = 40;

    const int side = kCoarse + 1;
    std::vector<double> values(static_cast<std::size_t>(side) * side * side);
    for (int i = 0; i <= kCoarse; ++i) {
        for (int j = 0; j <= kCoarse; ++j) {
            for (int k = 0; k <= kCoarse; ++k) {
                values[(static_cast<std::size_t>(i) * side + j) * side + k] =
                    f(static_cast<double>(i) / kCoarse, static_cast<double>(j) / kCoarse,
                      static_cast<double>(k) / kCoarse);
            }
        }
    }

    const auto scan = [&](const double lo[3], const double hi[3], GridPoint& best) {
        for (int i = 0; i <= kFine; ++i) {
            const double x0 = lo[0] + (hi[0] - lo[0]) * i / kFine;
            for (int j = 0; j <= kFine; ++j) {
                const double x1 = lo[1] + (hi[1] - lo[1]) * j / kFine;
                for (int k = 0; k <= kFine; ++k) {
                    const double x2 = lo[2] + (hi[2] - lo[2]) * k / kFine;
                    const double v = f(x0, x1, x2);
                    if (v > best.value) best = {{x0, x1, x2}, v};
                }
            }
        }
    };

    double overall = -1.0;
    for (int basin = 0; basin < kBasins; ++basin) {
        std::size_t arg = 0;
        double top = -1.0;
        for (std::size_t idx = 0; idx < values.size(); ++idx) {
            if (values[idx] > top) {
                top = values[idx];
                arg = idx;
            }
        }
        if (top < 0.0) break;
        const int ci = static_cast<int>(arg / (static_cast<std::size_t>(side) * side));
        const int cj = static_cast<int>(arg / side % side);
        const int ck = static_cast<int>(arg % side);
        for (int i = std::max(0, ci - kSeparation); i <= std::min(kCoarse, ci + kSeparation); ++i) {
            for (int j = std::max(0, cj - kSeparation); j <= std::min(kCoarse, cj + kSeparation); ++j) {
                for (int k = std::max(0, ck - kSeparation); k <= std::min(kCoarse, ck + kSeparation); ++k) {
                    values[(static_cast<std::size_t>(i) * side + j) * side + k] = -1.0;
                }
            }
        }

        GridPoint best{{static_cast<double>(ci) / kCoarse, static_cast<double>(cj) / kCoarse,
                        static_cast<double>(ck) / kCoarse},
                       top};
        // first refinement box covers the whole suppressed ball
        double radius = (kSeparation + 0.5) / kCoarse;
        double lo[3];
        double hi[3];
        for (int stage = 0; stage < 3; ++stage) {
            for (int d = 0; d < 3; ++d) {
                lo[d] = std::max(0.0, best.x[d] - radius);
                hi[d] = std::min(1.0, best.x[d] + radius);
            }
            scan(lo, hi, best);
            radius *= 1.5 * 2.0 / kFine;
        }
        overall = std::max(overall, best.value);
    }
    return overall;
}

// min over the source-chain and destination-chain sums; relay_gain is the
// band-1 decoding gain (full receiver for hcs, relay antenna for hdf)
template <bool kFoldRelayCut>
double half_duplex_oracle_nats(double relay_gain, const Gains& g) {
    const double cross_coeff = 2.0 * std::sqrt(g.g11 * g.g12);
    return grid3_refine_max([&](double w1, double s, double rho) {
        const double w2 = 1.0 - w1;
        const double q1 = s * g.p1;        // band-1 source power
        const double qb = (1.0 - s) * g.p1;  // band-2 source power
        const double relay_chain = perspective(w1, relay_gain * q1);
        const double rd = perspective(w1, g.g11 * q1);
        const double rc = perspective(
            w2, g.g11 * qb + rho * cross_coeff * std::sqrt(qb * g.p2) + g.g12 * g.p2);
        if (kFoldRelayCut) {
            return std::min(relay_chain, rd + rc);
        }
        // the source-cut Band-2 term takes the marginal source block of the
        // joint covariance, so correlating with the relay costs it nothing
        const double r2 = perspective(w2, g.g11 * qb);
        return std::min(relay_chain + r2, rd + rc);
    });
}

}  // namespace

double scalar_cutset_oracle_bits(const ChannelRealization& ch, const PowerConstraints& pc) {
    const Gains g = gains_of(ch, pc);
    return nats_to_bits(cut_pair_oracle_nats(g.g11 + g.g21, g));
}

double scalar_df_oracle_bits(const ChannelRealization& ch, const PowerConstraints& pc) {
    const Gains g = gains_of(ch, pc);
    return nats_to_bits(cut_pair_oracle_nats(g.g21, g));
}

double scalar_direct_oracle_bits(const ChannelRealization& ch, const PowerConstraints& pc) {
    const Gains g = gains_of(ch, pc);
    return nats_to_bits(std::log1p(g.g11 * g.p1));
}

double scalar_coloc_src_oracle_bits(const ChannelRealization& ch,
                                    const PowerConstraints& pc) {
    const Gains g = gains_of(ch, pc);
    constexpr int kPowerSteps = 100;
    constexpr int kPhaseSteps = 180;
    const double cross = 2.0 * std::sqrt(g.g11 * g.g12);
    double best = 0.0;
    for (int i = 0; i <= kPowerSteps; ++i) {
        const double q1 = g.p1 * i / kPowerSteps;
        for (int j = 0; j <= kPowerSteps; ++j) {
            const double q2 = g.p2 * j / kPowerSteps;
            const double amp = cross * std::sqrt(q1 * q2);
            for (int k = 0; k <= kPhaseSteps; ++k) {
                const double cosang = std::cos(M_PI * k / kPhaseSteps);
                const double v = std::log1p(g.g11 * q1 + cosang * amp + g.g12 * q2);
                if (v > best) best = v;
            }
        }
    }
    return nats_to_bits(best);
}

double scalar_coloc_dst_oracle_bits(const ChannelRealization& ch,
                                    const PowerConstraints& pc) {
    const Gains g = gains_of(ch, pc);
    return nats_to_bits(std::log1p((g.g11 + g.g21) * g.p1));
}

double scalar_hcs_oracle_bits(const ChannelRealization& ch, const PowerConstraints& pc) {
    const Gains g = gains_of(ch, pc);
    return nats_to_bits(half_duplex_oracle_nats<false>(g.g11 + g.g21, g));
}

double scalar_hdf_oracle_bits(const ChannelRealization& ch, const PowerConstraints& pc) {
    const Gains g = gains_of(ch, pc);
    return nats_to_bits(half_duplex_oracle_nats<true>(g.g21, g));
}

double scalar_twohop_oracle_bits(const ChannelRealization& ch, const PowerConstraints& pc) {
    const Gains g = gains_of(ch, pc);
    constexpr int kSteps = 10000;
    double best = 0.0;
    for (int i = 0; i <= kSteps; ++i) {
        const double w1 = static_cast<double>(i) / kSteps;
        const double v = std::min(perspective(w1, g.g21 * g.p1),
                                  perspective(1.0 - w1, g.g12 * g.p2));
        if (v > best) best = v;
    }
    return nats_to_bits(best);
}

double scalar_cf_oracle_bits(const ChannelRealization& ch, const PowerConstraints& pc,
                             CompressionScheme scheme) {
    const Gains g = gains_of(ch, pc);
    const double s11 = 1.0 + g.g11 * g.p1;
    const double s22 = 1.0 + g.g21 * g.p1;
    const double r12_nats = std::log1p(g.g12 * g.p2 / s11);
    // |s21|^2 = g21 g11 p1^2
    const double s2c = s22 - g.g21 * g.g11 * g.p1 * g.p1 / s11;
    const double src = scheme == CompressionScheme::RD ? s22 : s2c;
    const double d = src * std::exp(-r12_nats);
    const double a2 = 1.0 - d / src;
    const double relay_row_gain = a2 + d > 0.0 ? a2 * g.g21 / (a2 + d) : 0.0;
    return nats_to_bits(std::log1p((g.g11 + relay_row_gain) * g.p1));
}

double scalar_oracle_bits(const std::string& scheme, const ChannelRealization& ch,
                          const PowerConstraints& pc) {
    if (scheme == "cs") return scalar_cutset_oracle_bits(ch, pc);
    if (scheme == "df") return scalar_df_oracle_bits(ch, pc);
    if (scheme == "direct") return scalar_direct_oracle_bits(ch, pc);
    if (scheme == "coloc-src") return scalar_coloc_src_oracle_bits(ch, pc);
    if (scheme == "coloc-dst") return scalar_coloc_dst_oracle_bits(ch, pc);
    if (scheme == "hcs") return scalar_hcs_oracle_bits(ch, pc);
    if (scheme == "hdf") return scalar_hdf_oracle_bits(ch, pc);
    if (scheme == "twohop") return scalar_twohop_oracle_bits(ch, pc);
    if (scheme == "cf-rd") return scalar_cf_oracle_bits(ch, pc, CompressionScheme::RD);
    if (scheme == "cf-wz") return scalar_cf_oracle_bits(ch, pc, CompressionScheme::WZ);
    throw std::invalid_argument("scalar oracle: unknown scheme: " + scheme);
}

}  // namespace relaylab
