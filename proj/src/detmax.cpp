#include "relaylab/detmax.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <sstream>

namespace relaylab {
namespace detmax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using RMatrix = Eigen::MatrixXd;

std::size_t var_param_count(int dim) { return static_cast<std::size_t>(dim) * dim; }

/// Real components of the pairing theta_p -> Re tr(M B_p) for a Hermitian M,
/// in parameter order: diagonal entries, then (2 Re, 2 Im) per upper-triangle
/// entry row-major. This is both the gradient extraction (df = tr(M dX)) and
/// the sparse trace pairing used in Hessian assembly.
void extract_pairing(const CMatrix& m, double scale, RVector& out, std::size_t offset) {
    const int d = static_cast<int>(m.rows());
    std::size_t idx = offset;
    for (int a = 0; a < d; ++a) out(idx++) += scale * m(a, a).real();
    for (int a = 0; a < d; ++a) {
        for (int b = a + 1; b < d; ++b) {
            out(idx++) += scale * 2.0 * m(a, b).real();
            out(idx++) += scale * 2.0 * m(a, b).imag();
        }
    }
}

/// One Hessian row block: out(row, offset + q) += scale * Re tr(M B_q).
void extract_pairing_row(const CMatrix& m, double scale, RMatrix& h, std::size_t row,
                         std::size_t offset) {
    const int d = static_cast<int>(m.rows());
    std::size_t idx = offset;
    for (int a = 0; a < d; ++a) h(row, idx++) += scale * m(a, a).real();
    for (int a = 0; a < d; ++a) {
        for (int b = a + 1; b < d; ++b) {
            h(row, idx++) += scale * 2.0 * m(a, b).real();
            h(row, idx++) += scale * 2.0 * m(a, b).imag();
        }
    }
}

/// Visits the Hermitian basis matrices B_p in parameter order. The callback
/// receives (local param index, a, b, kind) with kind 0 = E_aa,
/// 1 = E_ab + E_ba, 2 = i(E_ab - E_ba).
template <typename F>
void for_each_basis(int d, F&& f) {
    std::size_t p = 0;
    for (int a = 0; a < d; ++a) f(p++, a, a, 0);
    for (int a = 0; a < d; ++a) {
        for (int b = a + 1; b < d; ++b) {
            f(p++, a, b, 1);
            f(p++, a, b, 2);
        }
    }
}

/// M = F B F^H for sparse basis B, assembled from outer products of columns.
CMatrix basis_congruence(const CMatrix& f, int a, int b, int kind) {
    switch (kind) {
        case 0:
            return f.col(a) * f.col(a).adjoint();
        case 1:
            return f.col(a) * f.col(b).adjoint() + f.col(b) * f.col(a).adjoint();
        default: {
            CMatrix m = f.col(a) * f.col(b).adjoint();
            m -= f.col(b) * f.col(a).adjoint();
            return Complex(0.0, 1.0) * m;
        }
    }
}

/// M = T B T for sparse basis B (T Hermitian), via column/row outer products.
CMatrix basis_sandwich(const CMatrix& t, int a, int b, int kind) {
    switch (kind) {
        case 0:
            return t.col(a) * t.row(a);
        case 1:
            return t.col(a) * t.row(b) + t.col(b) * t.row(a);
        default: {
            CMatrix m = t.col(a) * t.row(b);
            m -= t.col(b) * t.row(a);
            return Complex(0.0, 1.0) * m;
        }
    }
}

struct Layout {
    std::vector<std::size_t> matrix_offset;
    std::size_t scalar_offset = 0;
    std::size_t total = 0;

    explicit Layout(const Problem& p) {
        matrix_offset.reserve(p.matrix_vars.size());
        std::size_t off = 0;
        for (const auto& v : p.matrix_vars) {
            matrix_offset.push_back(off);
            off += var_param_count(v.dim);
        }
        scalar_offset = off;
        total = off + p.scalar_vars.size();
    }
};

struct TermEval {
    double w = 1.0;       // bandwidth value (1 when the term has none)
    double value = 0.0;   // w * logdet(Y)
    double logdet_y = 0.0;
    double dw = 0.0;      // d value / d w
    double tr_im_s_sq = 0.0;  // tr((I - S)^2)
    CMatrix t;            // G^H Y^{-1} G
    int n = 0;
};

struct HypographEval {
    double slack = 0.0;
    std::vector<TermEval> terms;
};

struct Eval {
    bool feasible = false;
    std::string blocker;        // label of the first violated piece
    double phi = kInf;          // barrier value without the objective part
    std::vector<HypographEval> hyps;
    std::vector<double> linear_slacks;
    std::vector<CMatrix> psd_inverses;
    std::vector<double> psd_logdets;
    std::vector<CMatrix> cone_inverses;  // per matrix variable
    std::vector<double> cone_logdets;
};

/// LLT-based PD check; on success fills logdet and the inverse.
bool pd_inverse(const CMatrix& x, double& logdet, CMatrix& inv) {
    Eigen::LLT<CMatrix> llt(x);
    if (llt.info() != Eigen::Success) return false;
    logdet = 0.0;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double d = l(i, i).real();
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        logdet += std::log(d);
    }
    logdet *= 2.0;
    inv = llt.solve(CMatrix::Identity(x.rows(), x.cols()));
    return true;
}

CMatrix psd_expression(const Problem& p, const PsdConstraint& pc, const Point& pt) {
    Eigen::Index dim =
        pc.constant.size() > 0 ? pc.constant.rows() : pc.terms.front().embed.rows();
    CMatrix e = pc.constant.size() > 0 ? pc.constant : CMatrix::Zero(dim, dim).eval();
    for (const auto& term : pc.terms) {
        e += term.coeff * (term.embed * pt.matrices[term.matrix_var] * term.embed.adjoint());
    }
    return e;
}

double linear_value(const LinearConstraint& lc, const Point& pt) {
    double v = 0.0;
    for (const auto& tt : lc.traces) {
        v += (tt.weight * pt.matrices[tt.matrix_var]).trace().real();
    }
    for (const auto& [j, c] : lc.scalars) v += c * pt.scalars[j];
    return v;
}

TermEval eval_term(const LogDetTerm& term, const Point& pt) {
    TermEval te;
    te.n = static_cast<int>(term.factor.rows());
    te.w = term.bandwidth_scalar >= 0 ? pt.scalars[term.bandwidth_scalar] : 1.0;
    const CMatrix& x = pt.matrices[term.matrix_var];
    CMatrix y = CMatrix::Identity(te.n, te.n) + term.factor * x * term.factor.adjoint() / te.w;
    Eigen::LLT<CMatrix> llt(y);
    CMatrix s = llt.solve(CMatrix::Identity(te.n, te.n));
    te.logdet_y = 0.0;
    for (int i = 0; i < te.n; ++i) te.logdet_y += 2.0 * std::log(llt.matrixLLT()(i, i).real());
    te.value = te.w * te.logdet_y;
    const double tr_s = s.trace().real();
    te.dw = te.logdet_y - (te.n - tr_s);
    CMatrix im_s = CMatrix::Identity(te.n, te.n) - s;
    te.tr_im_s_sq = (im_s * im_s).trace().real();
    te.t = term.factor.adjoint() * s * term.factor;
    return te;
}

Eval evaluate(const Problem& p, const Point& pt) {
    Eval ev;
    double phi = 0.0;

    for (std::size_t j = 0; j < p.scalar_vars.size(); ++j) {
        if (!std::isfinite(pt.scalars[j])) {
            ev.blocker = "scalar " + p.scalar_vars[j].name;
            return ev;
        }
        if (p.scalar_vars[j].nonneg) {
            if (pt.scalars[j] <= 0.0) {
                ev.blocker = "scalar " + p.scalar_vars[j].name;
                return ev;
            }
            phi -= std::log(pt.scalars[j]);
        }
    }

    ev.cone_inverses.resize(p.matrix_vars.size());
    ev.cone_logdets.resize(p.matrix_vars.size());
    for (std::size_t v = 0; v < p.matrix_vars.size(); ++v) {
        if (!pt.matrices[v].allFinite() ||
            !pd_inverse(pt.matrices[v], ev.cone_logdets[v], ev.cone_inverses[v])) {
            ev.blocker = "cone " + p.matrix_vars[v].name;
            return ev;
        }
        phi -= ev.cone_logdets[v];
    }

    ev.linear_slacks.reserve(p.linears.size());
    for (const auto& lc : p.linears) {
        const double slack = lc.bound - linear_value(lc, pt);
        if (!(slack > 0.0)) {
            ev.blocker = "linear " + lc.label;
            return ev;
        }
        ev.linear_slacks.push_back(slack);
        phi -= std::log(slack);
    }

    ev.psd_inverses.resize(p.psd_constraints.size());
    ev.psd_logdets.resize(p.psd_constraints.size());
    for (std::size_t k = 0; k < p.psd_constraints.size(); ++k) {
        CMatrix e = psd_expression(p, p.psd_constraints[k], pt);
        if (!pd_inverse(e, ev.psd_logdets[k], ev.psd_inverses[k])) {
            ev.blocker = "psd " + p.psd_constraints[k].label;
            return ev;
        }
        phi -= ev.psd_logdets[k];
    }

    ev.hyps.resize(p.hypographs.size());
    for (std::size_t k = 0; k < p.hypographs.size(); ++k) {
        const auto& hc = p.hypographs[k];
        double rhs = 0.0;
        auto& he = ev.hyps[k];
        he.terms.reserve(hc.terms.size());
        for (const auto& term : hc.terms) {
            he.terms.push_back(eval_term(term, pt));
            rhs += he.terms.back().value;
        }
        double lhs = 0.0;
        for (const auto& [j, c] : hc.lhs) lhs += c * pt.scalars[j];
        he.slack = rhs - lhs;
        if (!(he.slack > 0.0)) {
            ev.blocker = "hypograph " + hc.label;
            return ev;
        }
        phi -= std::log(he.slack);
    }

    ev.feasible = true;
    ev.phi = phi;
    return ev;
}

/// Total barrier degree nu: 1 per scalar constraint / nonneg scalar, cone
/// dimension per -logdet barrier. nu/mu bounds the optimality gap.
double barrier_degree(const Problem& p) {
    double nu = 0.0;
    for (const auto& v : p.matrix_vars) nu += v.dim;
    for (const auto& s : p.scalar_vars) nu += s.nonneg ? 1.0 : 0.0;
    nu += static_cast<double>(p.hypographs.size());
    nu += static_cast<double>(p.linears.size());
    for (const auto& pc : p.psd_constraints) {
        nu += static_cast<double>(pc.constant.size() > 0 ? pc.constant.rows()
                                                         : pc.terms.front().embed.rows());
    }
    return nu;
}

struct Derivatives {
    RVector grad;
    RMatrix hess;
};

Derivatives derivatives(const Problem& p, const Point& pt, const Eval& ev, double mu,
                        const Layout& lay) {
    Derivatives d;
    d.grad = RVector::Zero(static_cast<Eigen::Index>(lay.total));
    d.hess = RMatrix::Zero(static_cast<Eigen::Index>(lay.total),
                           static_cast<Eigen::Index>(lay.total));

    d.grad(static_cast<Eigen::Index>(lay.scalar_offset + p.objective_scalar)) -= mu;

    for (std::size_t j = 0; j < p.scalar_vars.size(); ++j) {
        if (!p.scalar_vars[j].nonneg) continue;
        const double s = pt.scalars[j];
        const auto idx = static_cast<Eigen::Index>(lay.scalar_offset + j);
        d.grad(idx) -= 1.0 / s;
        d.hess(idx, idx) += 1.0 / (s * s);
    }

    // Matrix-variable cone barriers -logdet X.
    for (std::size_t v = 0; v < p.matrix_vars.size(); ++v) {
        const CMatrix& xinv = ev.cone_inverses[v];
        const std::size_t off = lay.matrix_offset[v];
        extract_pairing(xinv, -1.0, d.grad, off);
        for_each_basis(p.matrix_vars[v].dim, [&](std::size_t q, int a, int b, int kind) {
            CMatrix m = basis_sandwich(xinv, a, b, kind);
            extract_pairing_row(m, 1.0, d.hess, off + q, off);
        });
    }

    // Linear constraints: -log(bound - affine).
    for (std::size_t k = 0; k < p.linears.size(); ++k) {
        const auto& lc = p.linears[k];
        const double slack = ev.linear_slacks[k];
        RVector u = RVector::Zero(static_cast<Eigen::Index>(lay.total));
        for (const auto& tt : lc.traces) {
            extract_pairing(tt.weight, 1.0, u, lay.matrix_offset[tt.matrix_var]);
        }
        for (const auto& [j, c] : lc.scalars) {
            u(static_cast<Eigen::Index>(lay.scalar_offset + j)) += c;
        }
        d.grad += u / slack;
        d.hess += (u / slack) * (u / slack).transpose();
    }

    // PSD constraints: -logdet(E), E affine in the matrix variables.
    for (std::size_t k = 0; k < p.psd_constraints.size(); ++k) {
        const auto& pc = p.psd_constraints[k];
        const CMatrix& einv = ev.psd_inverses[k];
        for (const auto& tk : pc.terms) {
            CMatrix fkk = tk.embed.adjoint() * einv * tk.embed;
            extract_pairing(fkk, -tk.coeff, d.grad, lay.matrix_offset[tk.matrix_var]);
        }
        for (const auto& tk : pc.terms) {
            for (const auto& tj : pc.terms) {
                CMatrix fkj = tk.embed.adjoint() * einv * tj.embed;
                const std::size_t offk = lay.matrix_offset[tk.matrix_var];
                const std::size_t offj = lay.matrix_offset[tj.matrix_var];
                const double scale = tk.coeff * tj.coeff;
                for_each_basis(p.matrix_vars[tj.matrix_var].dim,
                               [&](std::size_t q, int a, int b, int kind) {
                                   CMatrix m = basis_congruence(fkj, a, b, kind);
                                   extract_pairing_row(m, scale, d.hess, offj + q, offk);
                               });
            }
        }
    }

    // Hypographs: -log(sum_k f_k - lhs).
    for (std::size_t k = 0; k < p.hypographs.size(); ++k) {
        const auto& hc = p.hypographs[k];
        const auto& he = ev.hyps[k];
        const double slack = he.slack;

        RVector u = RVector::Zero(static_cast<Eigen::Index>(lay.total));
        for (std::size_t t = 0; t < hc.terms.size(); ++t) {
            const auto& term = hc.terms[t];
            const auto& te = he.terms[t];
            extract_pairing(te.t, 1.0, u, lay.matrix_offset[term.matrix_var]);
            if (term.bandwidth_scalar >= 0) {
                u(static_cast<Eigen::Index>(lay.scalar_offset + term.bandwidth_scalar)) +=
                    te.dw;
            }
        }
        for (const auto& [j, c] : hc.lhs) {
            u(static_cast<Eigen::Index>(lay.scalar_offset + j)) -= c;
        }
        d.grad -= u / slack;
        d.hess += (u / slack) * (u / slack).transpose();

        // -(1/slack) * Hess(rhs); each term is concave so this is PSD.
        for (std::size_t t = 0; t < hc.terms.size(); ++t) {
            const auto& term = hc.terms[t];
            const auto& te = he.terms[t];
            const std::size_t off = lay.matrix_offset[term.matrix_var];
            const double inv_sw = 1.0 / (slack * te.w);
            for_each_basis(p.matrix_vars[term.matrix_var].dim,
                           [&](std::size_t q, int a, int b, int kind) {
                               CMatrix m = basis_sandwich(te.t, a, b, kind);
                               extract_pairing_row(m, inv_sw, d.hess, off + q, off);
                           });
            if (term.bandwidth_scalar >= 0) {
                const auto widx =
                    static_cast<Eigen::Index>(lay.scalar_offset + term.bandwidth_scalar);
                CMatrix txt = te.t * pt.matrices[term.matrix_var] * te.t;
                RVector cross = RVector::Zero(static_cast<Eigen::Index>(lay.total));
                extract_pairing(txt, -1.0 / (slack * te.w * te.w), cross, off);
                d.hess.col(widx) += cross;
                d.hess.row(widx) += cross.transpose();
                d.hess(widx, widx) += te.tr_im_s_sq / (slack * te.w);
            }
        }
    }

    d.hess = ((d.hess + d.hess.transpose()) * 0.5).eval();
    return d;
}

}  // namespace

int Problem::add_matrix_var(std::string name, int dim) {
    matrix_vars.push_back({std::move(name), dim});
    return static_cast<int>(matrix_vars.size()) - 1;
}

int Problem::add_scalar_var(std::string name, bool nonneg) {
    scalar_vars.push_back({std::move(name), nonneg});
    return static_cast<int>(scalar_vars.size()) - 1;
}

std::size_t Problem::parameter_count() const {
    std::size_t n = 0;
    for (const auto& v : matrix_vars) n += var_param_count(v.dim);
    return n + scalar_vars.size();
}

void Problem::validate() const {
    auto check_mvar = [&](int v, const std::string& where) {
        if (v < 0 || v >= static_cast<int>(matrix_vars.size())) {
            throw std::invalid_argument("detmax: bad matrix var reference in " + where);
        }
    };
    auto check_svar = [&](int j, const std::string& where) {
        if (j < 0 || j >= static_cast<int>(scalar_vars.size())) {
            throw std::invalid_argument("detmax: bad scalar var reference in " + where);
        }
    };
    for (const auto& v : matrix_vars) {
        if (v.dim < 1) throw std::invalid_argument("detmax: matrix var dim must be >= 1");
    }
    check_svar(objective_scalar, "objective");
    for (const auto& hc : hypographs) {
        if (hc.terms.empty() && hc.lhs.empty()) {
            throw std::invalid_argument("detmax: empty hypograph " + hc.label);
        }
        for (const auto& [j, c] : hc.lhs) {
            check_svar(j, "hypograph " + hc.label);
            (void)c;
        }
        for (const auto& term : hc.terms) {
            check_mvar(term.matrix_var, "hypograph " + hc.label);
            if (term.factor.cols() != matrix_vars[term.matrix_var].dim) {
                throw std::invalid_argument("detmax: factor shape mismatch in hypograph " +
                                            hc.label);
            }
            if (term.bandwidth_scalar >= 0) {
                check_svar(term.bandwidth_scalar, "hypograph " + hc.label);
                if (!scalar_vars[term.bandwidth_scalar].nonneg) {
                    throw std::invalid_argument(
                        "detmax: bandwidth scalar must be nonneg in hypograph " + hc.label);
                }
            }
        }
    }
    for (const auto& lc : linears) {
        for (const auto& tt : lc.traces) {
            check_mvar(tt.matrix_var, "linear " + lc.label);
            if (tt.weight.rows() != matrix_vars[tt.matrix_var].dim ||
                tt.weight.cols() != matrix_vars[tt.matrix_var].dim) {
                throw std::invalid_argument("detmax: weight shape mismatch in linear " +
                                            lc.label);
            }
        }
        for (const auto& [j, c] : lc.scalars) {
            check_svar(j, "linear " + lc.label);
            (void)c;
        }
    }
    for (const auto& pc : psd_constraints) {
        if (pc.terms.empty()) {
            throw std::invalid_argument("detmax: psd constraint without terms " + pc.label);
        }
        const Eigen::Index dim =
            pc.constant.size() > 0 ? pc.constant.rows() : pc.terms.front().embed.rows();
        for (const auto& term : pc.terms) {
            check_mvar(term.matrix_var, "psd " + pc.label);
            if (term.embed.rows() != dim ||
                term.embed.cols() != matrix_vars[term.matrix_var].dim) {
                throw std::invalid_argument("detmax: embed shape mismatch in psd " + pc.label);
            }
        }
    }
}

RVector pack_point(const Problem& p, const Point& pt) {
    Layout lay(p);
    RVector z = RVector::Zero(static_cast<Eigen::Index>(lay.total));
    for (std::size_t v = 0; v < p.matrix_vars.size(); ++v) {
        const CMatrix& x = pt.matrices[v];
        std::size_t idx = lay.matrix_offset[v];
        const int d = p.matrix_vars[v].dim;
        for (int a = 0; a < d; ++a) z(static_cast<Eigen::Index>(idx++)) = x(a, a).real();
        for (int a = 0; a < d; ++a) {
            for (int b = a + 1; b < d; ++b) {
                z(static_cast<Eigen::Index>(idx++)) = x(a, b).real();
                z(static_cast<Eigen::Index>(idx++)) = x(a, b).imag();
            }
        }
    }
    for (std::size_t j = 0; j < p.scalar_vars.size(); ++j) {
        z(static_cast<Eigen::Index>(lay.scalar_offset + j)) = pt.scalars[j];
    }
    return z;
}

Point unpack_point(const Problem& p, const RVector& z) {
    Layout lay(p);
    Point pt;
    pt.matrices.resize(p.matrix_vars.size());
    pt.scalars.resize(p.scalar_vars.size());
    for (std::size_t v = 0; v < p.matrix_vars.size(); ++v) {
        const int d = p.matrix_vars[v].dim;
        CMatrix x = CMatrix::Zero(d, d);
        std::size_t idx = lay.matrix_offset[v];
        for (int a = 0; a < d; ++a) x(a, a) = z(static_cast<Eigen::Index>(idx++));
        for (int a = 0; a < d; ++a) {
            for (int b = a + 1; b < d; ++b) {
                const double re = z(static_cast<Eigen::Index>(idx++));
                const double im = z(static_cast<Eigen::Index>(idx++));
                x(a, b) = Complex(re, im);
                x(b, a) = Complex(re, -im);
            }
        }
        pt.matrices[v] = std::move(x);
    }
    for (std::size_t j = 0; j < p.scalar_vars.size(); ++j) {
        pt.scalars[j] = z(static_cast<Eigen::Index>(lay.scalar_offset + j));
    }
    return pt;
}

double hypograph_rhs(const Problem& p, const Point& pt, std::size_t k) {
    double rhs = 0.0;
    for (const auto& term : p.hypographs[k].terms) rhs += eval_term(term, pt).value;
    return rhs;
}

double barrier_value(const Problem& p, const Point& pt, double mu) {
    Eval ev = evaluate(p, pt);
    if (!ev.feasible) return kInf;
    return -mu * pt.scalars[p.objective_scalar] + ev.phi;
}

RVector barrier_gradient(const Problem& p, const Point& pt, double mu) {
    Layout lay(p);
    Eval ev = evaluate(p, pt);
    if (!ev.feasible) {
        throw InfeasibleStartError("barrier_gradient: point outside the domain (" +
                                   ev.blocker + ")");
    }
    return derivatives(p, pt, ev, mu, lay).grad;
}

Solution solve(const Problem& p, const Point& start, const Options& opts) {
    p.validate();
    const Layout lay(p);
    const double nu = barrier_degree(p);

    Point pt = start;
    for (auto& x : pt.matrices) x = hermitian_part(x);
    Eval ev = evaluate(p, pt);
    if (!ev.feasible) {
        throw InfeasibleStartError("detmax::solve: start point not strictly feasible (" +
                                   ev.blocker + ")");
    }

    RVector z = pack_point(p, pt);
    Solution sol;
    double mu = opts.mu0;

    for (int stage = 0; stage < opts.max_outer_stages; ++stage) {
        sol.diagnostics.outer_iterations = stage + 1;
        for (int it = 0; it < opts.max_newton_per_stage; ++it) {
            Derivatives der = derivatives(p, pt, ev, mu, lay);

            RVector step;
            double reg = 0.0;
            while (true) {
                RMatrix h = der.hess;
                if (reg > 0.0) {
                    h.diagonal().array() += reg;
                }
                Eigen::LLT<RMatrix> llt(h);
                if (llt.info() == Eigen::Success) {
                    step = llt.solve(-der.grad);
                    if (step.allFinite()) break;
                }
                reg = reg == 0.0 ? 1e-12 : reg * 10.0;
                if (reg > 1e-6) {
                    throw NumericalBreakdownError(
                        "detmax::solve: Newton system unsolvable after regularization");
                }
            }

            const double gtd = der.grad.dot(step);
            const double decrement_sq = -gtd;
            if (!(decrement_sq > 0.0) || 0.5 * decrement_sq < opts.newton_tol) break;

            const double phi0 = -mu * pt.scalars[p.objective_scalar] + ev.phi;
            double s = 1.0;
            bool moved = false;
            while (s > 1e-18) {
                RVector zc = z + s * step;
                Point cand = unpack_point(p, zc);
                Eval evc = evaluate(p, cand);
                if (evc.feasible) {
                    const double phic = -mu * cand.scalars[p.objective_scalar] + evc.phi;
                    if (phic <= phi0 + opts.alpha * s * gtd) {
                        z = std::move(zc);
                        pt = std::move(cand);
                        ev = std::move(evc);
                        moved = true;
                        break;
                    }
                }
                s *= opts.beta;
            }
            ++sol.diagnostics.newton_iterations;
            if (!moved) break;
        }

        sol.diagnostics.stage_objectives.push_back(pt.scalars[p.objective_scalar]);
        sol.diagnostics.final_mu = mu;
        sol.diagnostics.surrogate_gap = nu / mu;
        if (nu / mu < opts.tol_nats) {
            sol.diagnostics.converged = true;
            break;
        }
        mu *= opts.mu_factor;
    }

    sol.objective_value = pt.scalars[p.objective_scalar];
    sol.point = std::move(pt);
    return sol;
}

CheckReport check_solution(const Problem& p, const Point& pt) {
    CheckReport rep;
    rep.objective_value = pt.scalars[p.objective_scalar];
    auto flag = [&](const std::string& label, double amount) {
        rep.max_violation = std::max(rep.max_violation, amount);
        if (amount > 1e-8) rep.violations.push_back({label, amount});
    };

    for (std::size_t v = 0; v < p.matrix_vars.size(); ++v) {
        const CMatrix& x = pt.matrices[v];
        auto d = eig_hermitian(hermitian_part(x));
        const double scale = std::max(1.0, x.norm());
        flag("cone " + p.matrix_vars[v].name, -d.eigenvalues.minCoeff() / scale);
    }
    for (std::size_t j = 0; j < p.scalar_vars.size(); ++j) {
        if (p.scalar_vars[j].nonneg) {
            flag("nonneg " + p.scalar_vars[j].name, -pt.scalars[j]);
        }
    }
    for (const auto& lc : p.linears) {
        const double v = linear_value(lc, pt);
        flag("linear " + lc.label, (v - lc.bound) / std::max(1.0, std::abs(lc.bound)));
    }
    for (const auto& pc : p.psd_constraints) {
        CMatrix e = psd_expression(p, pc, pt);
        auto d = eig_hermitian(hermitian_part(e));
        flag("psd " + pc.label, -d.eigenvalues.minCoeff() / std::max(1.0, e.norm()));
    }
    for (std::size_t k = 0; k < p.hypographs.size(); ++k) {
        const auto& hc = p.hypographs[k];
        double lhs = 0.0;
        for (const auto& [j, c] : hc.lhs) lhs += c * pt.scalars[j];
        const double rhs = hypograph_rhs(p, pt, k);
        flag("hypograph " + hc.label, (lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
    rep.feasible = rep.violations.empty();
    return rep;
}

std::string describe(const Problem& p) {
    std::ostringstream os;
    os << "detmax problem: " << p.matrix_vars.size() << " matrix vars, "
       << p.scalar_vars.size() << " scalars, " << p.hypographs.size() << " hypographs, "
       << p.linears.size() << " linear, " << p.psd_constraints.size() << " psd\n";
    for (const auto& v : p.matrix_vars) os << "matrix_var " << v.name << " dim " << v.dim << "\n";
    for (const auto& s : p.scalar_vars) {
        os << "scalar_var " << s.name << (s.nonneg ? " nonneg" : " free") << "\n";
    }
    os << "objective maximize " << p.scalar_vars[p.objective_scalar].name << "\n";
    for (const auto& hc : p.hypographs) {
        os << "hypograph " << hc.label << ":";
        bool first = true;
        for (const auto& [j, c] : hc.lhs) {
            os << (first ? " " : " + ") << c << "*" << p.scalar_vars[j].name;
            first = false;
        }
        os << " <=";
        first = true;
        for (const auto& term : hc.terms) {
            os << (first ? " " : " + ");
            first = false;
            if (term.bandwidth_scalar >= 0) {
                os << "[w=" << p.scalar_vars[term.bandwidth_scalar].name << "] ";
            }
            os << "logdet(I_" << term.factor.rows() << " + G{" << term.factor.rows() << "x"
               << term.factor.cols() << ", fro=" << term.factor.norm() << "} @ "
               << p.matrix_vars[term.matrix_var].name << ")";
        }
        os << "\n";
    }
    for (const auto& lc : p.linears) {
        os << "linear " << lc.label << ":";
        bool first = true;
        for (const auto& tt : lc.traces) {
            os << (first ? " " : " + ") << "tr(W{fro=" << tt.weight.norm() << "} @ "
               << p.matrix_vars[tt.matrix_var].name << ")";
            first = false;
        }
        for (const auto& [j, c] : lc.scalars) {
            os << (first ? " " : " + ") << c << "*" << p.scalar_vars[j].name;
            first = false;
        }
        os << " <= " << lc.bound << "\n";
    }
    for (const auto& pc : p.psd_constraints) {
        os << "psd " << pc.label << ":";
        bool first = true;
        if (pc.constant.size() > 0 && pc.constant.norm() > 0.0) {
            os << " const{fro=" << pc.constant.norm() << "}";
            first = false;
        }
        for (const auto& term : pc.terms) {
            os << (first ? " " : " + ") << term.coeff << "*C{" << term.embed.rows() << "x"
               << term.embed.cols() << "} @ " << p.matrix_vars[term.matrix_var].name;
            first = false;
        }
        os << " >= 0\n";
    }
    return os.str();
}

}  // namespace detmax
}  // namespace relaylab
