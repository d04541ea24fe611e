#include "relaylab/halfduplex.hpp"

#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace relaylab {
namespace {

using internal::block_trace_weight;
using internal::check_dims;
using internal::clamp_power;
using internal::make_options;
using internal::solve_tagged;
using internal::split_diag;

// The perspective terms need w > 0; the interior solve keeps both fractions
// above this floor and the exact endpoints are handled separately.
constexpr double kBandFloor = 1e-9;

HalfDuplexSolution zero_solution(std::string scheme, int q1_dim, int q2_dim,
                                 const std::vector<std::string>& names) {
    HalfDuplexSolution s;
    s.report.scheme = std::move(scheme);
    s.report.diagnostics.converged = true;
    s.band = {0.5, 0.5};
    s.q_band1 = CMatrix::Zero(q1_dim, q1_dim);
    s.q_band2 = CMatrix::Zero(q2_dim, q2_dim);
    for (const auto& n : names) s.components.emplace_back(n, 0.0);
    return s;
}

void add_band_constraints(detmax::Problem& p, int w1, int w2) {
    p.linears.push_back({{}, {{w1, 1.0}, {w2, 1.0}}, 1.0, "band"});
    p.linears.push_back({{}, {{w1, -1.0}}, -kBandFloor, "w1_floor"});
    p.linears.push_back({{}, {{w2, -1.0}}, -kBandFloor, "w2_floor"});
}

// Best of max min_k logdet(I + G_k X G_k^H) over one PSD variable with block
// trace bounds; shared by the fixed-bandwidth endpoint programs.
struct EndpointResult {
    double rate_nats = 0.0;
    CMatrix q;
    detmax::Diagnostics diagnostics;
    std::vector<double> cut_nats;
};

EndpointResult solve_endpoint(const std::string& scheme, const std::vector<CMatrix>& factors,
                              const std::vector<std::pair<CMatrix, double>>& trace_bounds,
                              const CMatrix& start_q, double tol_nats) {
    detmax::Problem prob;
    const int dim = static_cast<int>(start_q.rows());
    const int q = prob.add_matrix_var("Q", dim);
    const int t = prob.add_scalar_var("R", false);
    prob.objective_scalar = t;
    for (std::size_t k = 0; k < factors.size(); ++k) {
        prob.hypographs.push_back(
            {{{t, 1.0}}, {{q, factors[k], -1}}, "cut" + std::to_string(k)});
    }
    for (std::size_t k = 0; k < trace_bounds.size(); ++k) {
        prob.linears.push_back(
            {{{q, trace_bounds[k].first}}, {}, trace_bounds[k].second, "p" + std::to_string(k)});
    }

    detmax::Point start;
    start.matrices = {start_q};
    start.scalars = {0.0};
    double lo = detmax::hypograph_rhs(prob, start, 0);
    for (std::size_t k = 1; k < factors.size(); ++k)
        lo = std::min(lo, detmax::hypograph_rhs(prob, start, k));
    start.scalars[0] = lo - 1.0;

    const detmax::Solution sol = solve_tagged(scheme, prob, start, make_options(tol_nats));
    EndpointResult res;
    res.rate_nats = sol.objective_value;
    res.q = sol.point.matrices[0];
    res.diagnostics = sol.diagnostics;
    for (std::size_t k = 0; k < factors.size(); ++k)
        res.cut_nats.push_back(detmax::hypograph_rhs(prob, sol.point, k));
    return res;
}

}  // namespace

HalfDuplexSolution hcs_rate(const ChannelRealization& ch, const PowerConstraints& pc,
                            double tol_nats) {
    check_dims(ch);
    pc.validate();
    const int m1 = ch.m1();
    const int m2 = ch.m2();
    const int m = m1 + m2;
    if (pc.p1 == 0.0) return zero_solution("hcs", m1, m, {"R1", "R2", "Rd", "Rc"});
    const double p1 = clamp_power(pc.p1);
    const double p2 = clamp_power(pc.p2);

    CMatrix h1(ch.n1() + ch.n2(), m1);
    h1 << ch.h11, ch.h21;
    CMatrix h1t(ch.n1(), m);
    h1t << ch.h11, ch.h12;
    // Band-2 direct link: the destination decodes the source block of the
    // joint covariance through H11, so the factor is H11 C1^T.
    CMatrix h11_joint = CMatrix::Zero(ch.n1(), m);
    h11_joint.leftCols(m1) = ch.h11;

    detmax::Problem prob;
    const int q1 = prob.add_matrix_var("Q1", m1);
    const int q2 = prob.add_matrix_var("Q2", m);
    const int r = prob.add_scalar_var("R", false);
    const int r1 = prob.add_scalar_var("R1", false);
    const int r2 = prob.add_scalar_var("R2", false);
    const int rd = prob.add_scalar_var("Rd", false);
    const int rc = prob.add_scalar_var("Rc", false);
    const int w1 = prob.add_scalar_var("w1", true);
    const int w2 = prob.add_scalar_var("w2", true);
    prob.objective_scalar = r;

    prob.hypographs.push_back({{{r1, 1.0}}, {{q1, h1, w1}}, "egress"});
    prob.hypographs.push_back({{{r2, 1.0}}, {{q2, h11_joint, w2}}, "band2_direct"});
    prob.hypographs.push_back({{{rd, 1.0}}, {{q1, ch.h11, w1}}, "band1_direct"});
    prob.hypographs.push_back({{{rc, 1.0}}, {{q2, h1t, w2}}, "ingress"});

    prob.linears.push_back({{}, {{r, 1.0}, {r1, -1.0}, {r2, -1.0}}, 0.0, "source_chain"});
    prob.linears.push_back({{}, {{r, 1.0}, {rd, -1.0}, {rc, -1.0}}, 0.0, "dest_chain"});
    prob.linears.push_back(
        {{{q1, CMatrix::Identity(m1, m1)}, {q2, block_trace_weight(m, 0, m1)}}, {}, p1, "p1"});
    prob.linears.push_back({{{q2, block_trace_weight(m, m1, m2)}}, {}, p2, "p2"});
    add_band_constraints(prob, w1, w2);

    detmax::Point start;
    start.matrices = {Complex(0.25 * p1 / m1, 0.0) * CMatrix::Identity(m1, m1),
                      split_diag(m1, m2, 0.25 * p1 / m1, 0.5 * p2 / m2)};
    start.scalars.assign(7, 0.0);
    start.scalars[w1] = 0.45;
    start.scalars[w2] = 0.45;
    start.scalars[r1] = detmax::hypograph_rhs(prob, start, 0) - 1.0;
    start.scalars[r2] = detmax::hypograph_rhs(prob, start, 1) - 1.0;
    start.scalars[rd] = detmax::hypograph_rhs(prob, start, 2) - 1.0;
    start.scalars[rc] = detmax::hypograph_rhs(prob, start, 3) - 1.0;
    start.scalars[r] = std::min(start.scalars[r1] + start.scalars[r2],
                                start.scalars[rd] + start.scalars[rc]) -
                       1.0;

    const detmax::Solution sol = solve_tagged("hcs", prob, start, make_options(tol_nats));

    HalfDuplexSolution best;
    best.report.scheme = "hcs";
    best.report.rate_bits = std::max(0.0, nats_to_bits(sol.objective_value));
    best.report.diagnostics = sol.diagnostics;
    best.band = {sol.point.scalars[w1], sol.point.scalars[w2]};
    best.q_band1 = sol.point.matrices[0];
    best.q_band2 = sol.point.matrices[1];
    best.components = {{"R1", nats_to_bits(detmax::hypograph_rhs(prob, sol.point, 0))},
                       {"R2", nats_to_bits(detmax::hypograph_rhs(prob, sol.point, 1))},
                       {"Rd", nats_to_bits(detmax::hypograph_rhs(prob, sol.point, 2))},
                       {"Rc", nats_to_bits(detmax::hypograph_rhs(prob, sol.point, 3))}};

    // w1 = 1 endpoint: Band 2 vanishes; the destination cut reduces to the
    // direct channel, which dominates, so the value is direct waterfilling.
    const RateReport direct = direct_capacity(ch, pc);
    if (direct.rate_bits > best.report.rate_bits) {
        const CMatrix& qwf = *direct.input_covariance;
        best.report.rate_bits = direct.rate_bits;
        best.report.diagnostics = direct.diagnostics;
        best.band = {1.0, 0.0};
        best.q_band1 = qwf;
        best.q_band2 = CMatrix::Zero(m, m);
        const double r1v = logdet_psd(
            hermitian_part(CMatrix::Identity(h1.rows(), h1.rows()) + h1 * qwf * h1.adjoint()));
        best.components = {{"R1", nats_to_bits(r1v)},
                           {"R2", 0.0},
                           {"Rd", direct.rate_bits},
                           {"Rc", 0.0}};
    }

    // w2 = 1 endpoint: Band 1 vanishes; R <= min(R2, Rc) over the joint
    // Band-2 covariance alone.
    const EndpointResult band2 =
        solve_endpoint("hcs", {h11_joint, h1t},
                       {{block_trace_weight(m, 0, m1), p1}, {block_trace_weight(m, m1, m2), p2}},
                       split_diag(m1, m2, 0.5 * p1 / m1, 0.5 * p2 / m2), tol_nats);
    if (nats_to_bits(band2.rate_nats) > best.report.rate_bits) {
        best.report.rate_bits = std::max(0.0, nats_to_bits(band2.rate_nats));
        best.report.diagnostics = band2.diagnostics;
        best.band = {0.0, 1.0};
        best.q_band1 = CMatrix::Zero(m1, m1);
        best.q_band2 = band2.q;
        best.components = {{"R1", 0.0},
                           {"R2", nats_to_bits(band2.cut_nats[0])},
                           {"Rd", 0.0},
                           {"Rc", nats_to_bits(band2.cut_nats[1])}};
    }
    return best;
}

HalfDuplexSolution hdf_rate(const ChannelRealization& ch, const PowerConstraints& pc,
                            double tol_nats) {
    check_dims(ch);
    pc.validate();
    const int m1 = ch.m1();
    const int m2 = ch.m2();
    const int m = m1 + m2;
    if (pc.p1 == 0.0) return zero_solution("hdf", m1, m, {"Rr", "Rd", "Rc"});
    const double p1 = clamp_power(pc.p1);
    const double p2 = clamp_power(pc.p2);

    CMatrix h1t(ch.n1(), m);
    h1t << ch.h11, ch.h12;

    detmax::Problem prob;
    const int q1 = prob.add_matrix_var("Q1", m1);
    const int q2 = prob.add_matrix_var("Q2", m);
    const int r = prob.add_scalar_var("R", false);
    const int rd = prob.add_scalar_var("Rd", false);
    const int rc = prob.add_scalar_var("Rc", false);
    const int w1 = prob.add_scalar_var("w1", true);
    const int w2 = prob.add_scalar_var("w2", true);
    prob.objective_scalar = r;

    // R <= Rr is folded into the hypograph on R directly.
    prob.hypographs.push_back({{{r, 1.0}}, {{q1, ch.h21, w1}}, "relay_cut"});
    prob.hypographs.push_back({{{rd, 1.0}}, {{q1, ch.h11, w1}}, "band1_direct"});
    prob.hypographs.push_back({{{rc, 1.0}}, {{q2, h1t, w2}}, "ingress"});

    prob.linears.push_back({{}, {{r, 1.0}, {rd, -1.0}, {rc, -1.0}}, 0.0, "dest_chain"});
    prob.linears.push_back(
        {{{q1, CMatrix::Identity(m1, m1)}, {q2, block_trace_weight(m, 0, m1)}}, {}, p1, "p1"});
    prob.linears.push_back({{{q2, block_trace_weight(m, m1, m2)}}, {}, p2, "p2"});
    add_band_constraints(prob, w1, w2);

    detmax::Point start;
    start.matrices = {Complex(0.25 * p1 / m1, 0.0) * CMatrix::Identity(m1, m1),
                      split_diag(m1, m2, 0.25 * p1 / m1, 0.5 * p2 / m2)};
    start.scalars.assign(5, 0.0);
    start.scalars[w1] = 0.45;
    start.scalars[w2] = 0.45;
    start.scalars[rd] = detmax::hypograph_rhs(prob, start, 1) - 1.0;
    start.scalars[rc] = detmax::hypograph_rhs(prob, start, 2) - 1.0;
    start.scalars[r] = std::min(detmax::hypograph_rhs(prob, start, 0),
                                start.scalars[rd] + start.scalars[rc]) -
                       1.0;

    const detmax::Solution sol = solve_tagged("hdf", prob, start, make_options(tol_nats));

    HalfDuplexSolution best;
    best.report.scheme = "hdf";
    best.report.rate_bits = std::max(0.0, nats_to_bits(sol.objective_value));
    best.report.diagnostics = sol.diagnostics;
    best.band = {sol.point.scalars[w1], sol.point.scalars[w2]};
    best.q_band1 = sol.point.matrices[0];
    best.q_band2 = sol.point.matrices[1];
    best.components = {{"Rr", nats_to_bits(detmax::hypograph_rhs(prob, sol.point, 0))},
                       {"Rd", nats_to_bits(detmax::hypograph_rhs(prob, sol.point, 1))},
                       {"Rc", nats_to_bits(detmax::hypograph_rhs(prob, sol.point, 2))}};

    // w1 = 1 endpoint: max min(Rr, Rd) over the Band-1 covariance. The
    // w2 = 1 endpoint forces Rr = 0 and can never win.
    const EndpointResult band1 = solve_endpoint(
        "hdf", {ch.h21, ch.h11}, {{CMatrix::Identity(m1, m1), p1}},
        CMatrix(Complex(0.5 * p1 / m1, 0.0) * CMatrix::Identity(m1, m1)), tol_nats);
    if (nats_to_bits(band1.rate_nats) > best.report.rate_bits) {
        best.report.rate_bits = std::max(0.0, nats_to_bits(band1.rate_nats));
        best.report.diagnostics = band1.diagnostics;
        best.band = {1.0, 0.0};
        best.q_band1 = band1.q;
        best.q_band2 = CMatrix::Zero(m, m);
        best.components = {{"Rr", nats_to_bits(band1.cut_nats[0])},
                           {"Rd", nats_to_bits(band1.cut_nats[1])},
                           {"Rc", 0.0}};
    }
    return best;
}

HalfDuplexSolution twohop_rate(const ChannelRealization& ch, const PowerConstraints& pc,
                               double tol_nats) {
    check_dims(ch);
    pc.validate();
    const int m1 = ch.m1();
    const int m2 = ch.m2();
    if (pc.p1 == 0.0 || pc.p2 == 0.0)
        return zero_solution("twohop", m1, m2, {"Rsr", "Rrd"});
    const double p1 = clamp_power(pc.p1);
    const double p2 = clamp_power(pc.p2);

    detmax::Problem prob;
    const int q1 = prob.add_matrix_var("Q1", m1);
    const int q2 = prob.add_matrix_var("Q2", m2);
    const int r = prob.add_scalar_var("R", false);
    const int w1 = prob.add_scalar_var("w1", true);
    const int w2 = prob.add_scalar_var("w2", true);
    prob.objective_scalar = r;

    prob.hypographs.push_back({{{r, 1.0}}, {{q1, ch.h21, w1}}, "hop_sr"});
    prob.hypographs.push_back({{{r, 1.0}}, {{q2, ch.h12, w2}}, "hop_rd"});
    prob.linears.push_back({{{q1, CMatrix::Identity(m1, m1)}}, {}, p1, "p1"});
    prob.linears.push_back({{{q2, CMatrix::Identity(m2, m2)}}, {}, p2, "p2"});
    add_band_constraints(prob, w1, w2);

    detmax::Point start;
    start.matrices = {Complex(0.5 * p1 / m1, 0.0) * CMatrix::Identity(m1, m1),
                      Complex(0.5 * p2 / m2, 0.0) * CMatrix::Identity(m2, m2)};
    start.scalars.assign(3, 0.0);
    start.scalars[w1] = 0.45;
    start.scalars[w2] = 0.45;
    start.scalars[r] = std::min(detmax::hypograph_rhs(prob, start, 0),
                                detmax::hypograph_rhs(prob, start, 1)) -
                       1.0;

    const detmax::Solution sol = solve_tagged("twohop", prob, start, make_options(tol_nats));

    HalfDuplexSolution best;
    best.report.scheme = "twohop";
    best.report.rate_bits = std::max(0.0, nats_to_bits(sol.objective_value));
    best.report.diagnostics = sol.diagnostics;
    best.band = {sol.point.scalars[w1], sol.point.scalars[w2]};
    best.q_band1 = sol.point.matrices[0];
    best.q_band2 = sol.point.matrices[1];
    best.components = {{"Rsr", nats_to_bits(detmax::hypograph_rhs(prob, sol.point, 0))},
                       {"Rrd", nats_to_bits(detmax::hypograph_rhs(prob, sol.point, 1))}};
    return best;
}

}  // namespace relaylab
