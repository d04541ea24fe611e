#pragma once

#include "relaylab/linalg.hpp"

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace relaylab {
namespace detmax {

/// Hermitian PSD matrix variable; the solver keeps it in the cone with a
/// -logdet barrier, so values at returned points are strictly PD.
struct MatrixVar {
    std::string name;
    int dim = 0;
};

/// Real scalar variable. nonneg scalars carry a -log(s) barrier (bandwidths);
/// free scalars carry none (rate variables, which the hypographs bound).
struct ScalarVar {
    std::string name;
    bool nonneg = false;
};

/// One log-det summand on a hypograph right-hand side:
///   w * logdet(I_n + (1/w) * G X G^H)        when bandwidth_scalar >= 0
///   logdet(I_n + G X G^H)                    otherwise.
/// Block selection of a variable is folded into G by the caller
/// (G_eff = G * C^H for a block selected by the embedding C).
struct LogDetTerm {
    int matrix_var = -1;
    CMatrix factor;             // G, n x dim(matrix_var)
    int bandwidth_scalar = -1;  // index of a nonneg scalar, or -1
};

/// sum_j coeff_j * s_j  <=  sum_k term_k.
struct HypographConstraint {
    std::vector<std::pair<int, double>> lhs;  // (scalar index, coefficient)
    std::vector<LogDetTerm> terms;
    std::string label;
};

struct TraceTerm {
    int matrix_var = -1;
    CMatrix weight;  // Hermitian, dim x dim; contributes Re tr(W X)
};

/// sum_k Re tr(W_k X_k) + sum_j c_j s_j <= bound.
struct LinearConstraint {
    std::vector<TraceTerm> traces;
    std::vector<std::pair<int, double>> scalars;
    double bound = 0.0;
    std::string label;
};

struct PsdTerm {
    int matrix_var = -1;
    double coeff = 1.0;
    CMatrix embed;  // C, dimE x dim(matrix_var); contributes coeff * C X C^H
};

/// constant + sum_k coeff_k C_k X_k C_k^H  >=  0.
struct PsdConstraint {
    CMatrix constant;  // dimE x dimE Hermitian; zero matrix when absent
    std::vector<PsdTerm> terms;
    std::string label;
};

struct Problem {
    std::vector<MatrixVar> matrix_vars;
    std::vector<ScalarVar> scalar_vars;
    std::vector<HypographConstraint> hypographs;
    std::vector<LinearConstraint> linears;
    std::vector<PsdConstraint> psd_constraints;
    int objective_scalar = -1;  // scalar to maximize

    int add_matrix_var(std::string name, int dim);
    int add_scalar_var(std::string name, bool nonneg);

    /// Checks variable references and factor dimensions; every bandwidth
    /// scalar must be nonneg. Throws std::invalid_argument on violation.
    void validate() const;

    /// Number of real parameters: dim^2 per matrix variable plus one per
    /// scalar, in declaration order (matrices first).
    std::size_t parameter_count() const;
};

/// Raw variable values; matrices must be Hermitian (PD for interior points).
struct Point {
    std::vector<CMatrix> matrices;
    std::vector<double> scalars;
};

struct Diagnostics {
    int outer_iterations = 0;
    int newton_iterations = 0;
    double final_mu = 0.0;
    double surrogate_gap = 0.0;  // nu / mu bound on optimality gap, nats
    std::vector<double> stage_objectives;
    bool converged = false;
};

struct Solution {
    double objective_value = 0.0;  // nats
    Point point;
    Diagnostics diagnostics;
};

struct Options {
    double tol_nats = 1e-6;      // stop when nu / mu < tol_nats
    double mu0 = 1.0;
    double mu_factor = 10.0;
    int max_newton_per_stage = 80;
    int max_outer_stages = 40;
    double newton_tol = 1e-11;   // stage centered when decrement^2 / 2 below
    double alpha = 0.01;         // backtracking sufficient-decrease fraction
    double beta = 0.5;           // backtracking shrink factor
};

struct InfeasibleStartError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalBreakdownError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Barrier interior-point solve. The caller supplies a strictly feasible
/// start (all slacks positive, cones PD); the barrier parameter follows
/// mu0, 10*mu0, ... until nu/mu < tol_nats where nu is the total barrier
/// degree (1 per scalar constraint, cone dimension per logdet barrier).
/// Deterministic given identical inputs. Throws InfeasibleStartError when
/// the start is not strictly feasible and NumericalBreakdownError when a
/// Newton system stays unsolvable through the regularization ladder
/// (1e-12 * I escalating tenfold to 1e-6). Hitting the iteration caps
/// returns the best iterate with diagnostics.converged = false.
Solution solve(const Problem& p, const Point& start, const Options& opts = {});

/// Value of hypograph k's right-hand side at a point, in nats. Exposed so
/// assemblers can place rate scalars strictly below their bounds.
double hypograph_rhs(const Problem& p, const Point& pt, std::size_t k);

struct Violation {
    std::string label;
    double amount;  // positive = violated, relative to max(1, |scale|)
};

struct CheckReport {
    bool feasible = false;
    double objective_value = 0.0;
    double max_violation = 0.0;
    std::vector<Violation> violations;  // entries exceeding 1e-8 relative
};

/// Independent re-evaluation of every constraint and the objective from the
/// raw variable values; flags violations above 1e-8 relative.
CheckReport check_solution(const Problem& p, const Point& pt);

/// Textual dump, one declaration or constraint per line. Grammar:
///   matrix_var <name> dim <d>
///   scalar_var <name> free|nonneg
///   objective maximize <name>
///   hypograph <label>: <c>*<s> [+ ...] <= [w=<name>] logdet(I_<n> + G{<n>x<d>, fro=<v>} @ <var>) [+ ...]
///   linear <label>: tr(W{fro=<v>} @ <var>) [+ ...] [+ <c>*<s> ...] <= <bound>
///   psd <label>: [const{fro=<v>} +] <coeff>*C{<n>x<d>} @ <var> [+ ...] >= 0
std::string describe(const Problem& p);

/// Barrier objective psi_mu = -mu * objective + phi(point) where phi sums
/// -log slacks, -logdet cones and -log nonneg scalars. Infinite outside the
/// domain. Exposed with its analytic gradient for finite-difference checks.
double barrier_value(const Problem& p, const Point& pt, double mu);
RVector barrier_gradient(const Problem& p, const Point& pt, double mu);

/// Flat real parameterization used by the Newton system: per matrix variable
/// the d diagonal entries then (re, im) per upper-triangle entry in row-major
/// order; scalars follow in declaration order.
RVector pack_point(const Problem& p, const Point& pt);
Point unpack_point(const Problem& p, const RVector& z);

}  // namespace detmax
}  // namespace relaylab
