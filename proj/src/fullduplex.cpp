#include "relaylab/fullduplex.hpp"

#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace relaylab {
namespace {

using internal::block_trace_weight;
using internal::check_dims;
using internal::clamp_power;
using internal::kPowerFloor;
using internal::make_options;
using internal::solve_tagged;
using internal::split_diag;

RVector antenna_bounds(const std::optional<RVector>& explicit_bounds, double total, int m,
                       const char* which) {
    if (explicit_bounds) {
        if (explicit_bounds->size() != m)
            throw std::invalid_argument(std::string("per-antenna bound length mismatch for ") +
                                        which);
        return explicit_bounds->cwiseMax(kPowerFloor);
    }
    return RVector::Constant(m, clamp_power(total) / m);
}

void add_diagonal_rows(detmax::Problem& p, int var, int m, int offset, const RVector& bounds,
                       const std::string& prefix) {
    for (int i = 0; i < bounds.size(); ++i) {
        CMatrix w = CMatrix::Zero(m, m);
        w(offset + i, offset + i) = 1.0;
        detmax::LinearConstraint row;
        row.traces.push_back({var, w});
        row.bound = bounds[i];
        row.label = prefix + std::to_string(i);
        p.linears.push_back(std::move(row));
    }
}

RateReport zero_report(std::string scheme) {
    RateReport r;
    r.scheme = std::move(scheme);
    r.rate_bits = 0.0;
    r.diagnostics.converged = true;
    return r;
}

// Shared cut-set / decode-and-forward assembly. first_cut multiplies the
// conditional covariance Q_cond; it is [H11; H21] for the cut-set bound and
// H21 for decode-and-forward.
RateReport solve_cut_program(const std::string& scheme, const std::string& first_cut_label,
                             const CMatrix& first_cut, const ChannelRealization& ch,
                             const PowerConstraints& pc, bool per_antenna, double tol_nats) {
    const int m1 = ch.m1();
    const int m2 = ch.m2();
    const int m = m1 + m2;
    const double p1 = clamp_power(pc.p1);
    const double p2 = clamp_power(pc.p2);

    CMatrix h1t(ch.n1(), m);
    h1t << ch.h11, ch.h12;

    detmax::Problem prob;
    const int q = prob.add_matrix_var("Q", m);
    const int qc = prob.add_matrix_var("Qc", m1);
    const int t = prob.add_scalar_var("R", false);
    prob.objective_scalar = t;

    detmax::HypographConstraint cut1;
    cut1.lhs = {{t, 1.0}};
    cut1.terms.push_back({qc, first_cut, -1});
    cut1.label = first_cut_label;
    prob.hypographs.push_back(std::move(cut1));

    detmax::HypographConstraint cut2;
    cut2.lhs = {{t, 1.0}};
    cut2.terms.push_back({q, h1t, -1});
    cut2.label = "cut_dest";
    prob.hypographs.push_back(std::move(cut2));

    detmax::LinearConstraint pow1;
    pow1.traces.push_back({q, block_trace_weight(m, 0, m1)});
    pow1.bound = p1;
    pow1.label = "p1";
    prob.linears.push_back(std::move(pow1));

    detmax::LinearConstraint pow2;
    pow2.traces.push_back({q, block_trace_weight(m, m1, m2)});
    pow2.bound = p2;
    pow2.label = "p2";
    prob.linears.push_back(std::move(pow2));

    RVector diag1 = RVector::Constant(m1, p1 / m1);
    RVector diag2 = RVector::Constant(m2, p2 / m2);
    if (per_antenna) {
        const RVector b1 = antenna_bounds(pc.per_antenna_source, pc.p1, m1, "source");
        const RVector b2 = antenna_bounds(pc.per_antenna_relay, pc.p2, m2, "relay");
        add_diagonal_rows(prob, q, m, 0, b1, "p1_ant");
        add_diagonal_rows(prob, q, m, m1, b2, "p2_ant");
        diag1 = diag1.cwiseMin(b1);
        diag2 = diag2.cwiseMin(b2);
    }

    detmax::PsdConstraint couple;
    couple.constant = CMatrix::Zero(m, m);
    couple.terms.push_back({q, 1.0, CMatrix::Identity(m, m)});
    CMatrix c1 = CMatrix::Zero(m, m1);
    c1.topLeftCorner(m1, m1).setIdentity();
    couple.terms.push_back({qc, -1.0, c1});
    couple.label = "cond_cov";
    prob.psd_constraints.push_back(std::move(couple));

    detmax::Point start;
    CMatrix q0 = CMatrix::Zero(m, m);
    q0.topLeftCorner(m1, m1) = (0.5 * diag1).cast<Complex>().asDiagonal();
    q0.bottomRightCorner(m2, m2) = (0.5 * diag2).cast<Complex>().asDiagonal();
    start.matrices = {q0, CMatrix(0.5 * q0.topLeftCorner(m1, m1))};
    start.scalars = {0.0};
    start.scalars[0] = std::min(detmax::hypograph_rhs(prob, start, 0),
                                detmax::hypograph_rhs(prob, start, 1)) -
                       1.0;

    detmax::Solution sol = solve_tagged(scheme, prob, start, make_options(tol_nats));

    RateReport report;
    report.scheme = scheme;
    report.rate_bits = std::max(0.0, nats_to_bits(sol.objective_value));
    report.diagnostics = sol.diagnostics;
    report.joint = JointCovariance{sol.point.matrices[0], sol.point.matrices[1], m1};
    return report;
}

RateReport waterfill_report(std::string scheme, const CMatrix& channel, double power) {
    const auto ed = eig_hermitian(hermitian_part(channel.adjoint() * channel));
    // Gram spectra are nonnegative; rounding can leave -1e-16 stragglers.
    const auto wf = waterfill(ed.eigenvalues.cwiseMax(0.0), power);
    RateReport report;
    report.scheme = std::move(scheme);
    report.rate_bits = std::max(0.0, nats_to_bits(wf.rate_nats));
    report.diagnostics.converged = true;
    report.input_covariance = hermitian_part(
        ed.eigenvectors * wf.powers.cast<Complex>().asDiagonal() * ed.eigenvectors.adjoint());
    return report;
}

}  // namespace

double schur_slack(const JointCovariance& jc) {
    const CMatrix gap = hermitian_part(schur_complement(jc.q, jc.m1) - jc.q_cond);
    return eig_hermitian(gap).eigenvalues.minCoeff();
}

RateReport cutset_rate(const ChannelRealization& ch, const PowerConstraints& pc,
                       bool per_antenna, double tol_nats) {
    check_dims(ch);
    pc.validate();
    if (pc.p1 == 0.0) return zero_report("cs");  // silent source: both cuts vanish
    CMatrix h1(ch.n1() + ch.n2(), ch.m1());
    h1 << ch.h11, ch.h21;
    return solve_cut_program("cs", "cut_source", h1, ch, pc, per_antenna, tol_nats);
}

RateReport df_rate(const ChannelRealization& ch, const PowerConstraints& pc, bool per_antenna,
                   double tol_nats) {
    check_dims(ch);
    pc.validate();
    if (pc.p1 == 0.0) return zero_report("df");
    return solve_cut_program("df", "cut_relay", ch.h21, ch, pc, per_antenna, tol_nats);
}

RateReport direct_capacity(const ChannelRealization& ch, const PowerConstraints& pc) {
    check_dims(ch);
    pc.validate();
    return waterfill_report("direct", ch.h11, pc.p1);
}

RateReport colocated_source_capacity(const ChannelRealization& ch, const PowerConstraints& pc,
                                     double tol_nats) {
    check_dims(ch);
    pc.validate();
    const int m1 = ch.m1();
    const int m2 = ch.m2();
    const int m = m1 + m2;
    const double p1 = clamp_power(pc.p1);
    const double p2 = clamp_power(pc.p2);

    CMatrix h1t(ch.n1(), m);
    h1t << ch.h11, ch.h12;

    detmax::Problem prob;
    const int q = prob.add_matrix_var("Q", m);
    const int t = prob.add_scalar_var("R", false);
    prob.objective_scalar = t;

    detmax::HypographConstraint rate;
    rate.lhs = {{t, 1.0}};
    rate.terms.push_back({q, h1t, -1});
    rate.label = "rate";
    prob.hypographs.push_back(std::move(rate));

    detmax::LinearConstraint pow1;
    pow1.traces.push_back({q, block_trace_weight(m, 0, m1)});
    pow1.bound = p1;
    pow1.label = "p1";
    prob.linears.push_back(std::move(pow1));

    detmax::LinearConstraint pow2;
    pow2.traces.push_back({q, block_trace_weight(m, m1, m2)});
    pow2.bound = p2;
    pow2.label = "p2";
    prob.linears.push_back(std::move(pow2));

    detmax::Point start;
    start.matrices = {split_diag(m1, m2, 0.5 * p1 / m1, 0.5 * p2 / m2)};
    start.scalars = {0.0};
    start.scalars[0] = detmax::hypograph_rhs(prob, start, 0) - 1.0;

    detmax::Solution sol = solve_tagged("coloc-src", prob, start, make_options(tol_nats));

    RateReport report;
    report.scheme = "coloc-src";
    report.rate_bits = std::max(0.0, nats_to_bits(sol.objective_value));
    report.diagnostics = sol.diagnostics;
    report.input_covariance = sol.point.matrices[0];
    return report;
}

RateReport colocated_dest_capacity(const ChannelRealization& ch, const PowerConstraints& pc) {
    check_dims(ch);
    pc.validate();
    CMatrix h1(ch.n1() + ch.n2(), ch.m1());
    h1 << ch.h11, ch.h21;
    return waterfill_report("coloc-dst", h1, pc.p1);
}

}  // namespace relaylab
