#include "relaylab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace relaylab {

namespace {

void require_square(const CMatrix& x, const char* who) {
    if (x.rows() < 1 || x.rows() != x.cols()) {
        std::ostringstream msg;
        msg << who << ": expected a square matrix, got " << x.rows() << "x" << x.cols();
        throw std::invalid_argument(msg.str());
    }
}

void require_finite(const CMatrix& x, const char* who) {
    if (!x.allFinite()) {
        throw std::domain_error(std::string(who) + ": non-finite entries in input");
    }
}

void require_hermitian(const CMatrix& x, const char* who) {
    require_square(x, who);
    require_finite(x, who);
    if (hermitian_defect(x) > 1e-9) {
        throw std::domain_error(std::string(who) + ": input is not Hermitian");
    }
}

}  // namespace

CMatrix hermitian_part(const CMatrix& x) { return 0.5 * (x + x.adjoint()); }

double hermitian_defect(const CMatrix& x) {
    if (x.rows() != x.cols()) return std::numeric_limits<double>::infinity();
    return (x - CMatrix(x.adjoint())).norm() / std::max(1.0, x.norm());
}

EigenDecomposition eig_hermitian(const CMatrix& x) {
    require_hermitian(x, "eig_hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(x));
    if (solver.info() != Eigen::Success) {
        throw std::domain_error("eig_hermitian: eigensolver did not converge");
    }
    const Eigen::Index n = x.rows();
    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    // Eigen returns ascending order; the contract here is descending.
    for (Eigen::Index i = 0; i < n; ++i) {
        out.eigenvalues(i) = solver.eigenvalues()(n - 1 - i);
        out.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
    }
    return out;
}

double logdet_psd(const CMatrix& x) {
    require_hermitian(x, "logdet_psd");
    Eigen::LLT<CMatrix> llt(hermitian_part(x));
    if (llt.info() != Eigen::Success) {
        const auto ed = eig_hermitian(x);
        std::ostringstream msg;
        msg << "logdet_psd: matrix is not positive definite (smallest eigenvalue "
            << ed.eigenvalues(x.rows() - 1) << ")";
        throw std::domain_error(msg.str());
    }
    double acc = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        acc += std::log(llt.matrixLLT()(i, i).real());
    }
    return 2.0 * acc;
}

CMatrix schur_complement(const CMatrix& q, Eigen::Index m1) {
    require_hermitian(q, "schur_complement");
    if (m1 < 1 || m1 >= q.rows()) {
        throw std::invalid_argument("schur_complement: block split out of range");
    }
    const Eigen::Index m2 = q.rows() - m1;
    const CMatrix q11 = q.topLeftCorner(m1, m1);
    const CMatrix q12 = q.topRightCorner(m1, m2);
    const CMatrix q22 = hermitian_part(q.bottomRightCorner(m2, m2));

    Eigen::SelfAdjointEigenSolver<CMatrix> es(q22);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig <= 1e-10 * q22.trace().real()) {
        std::ostringstream msg;
        msg << "schur_complement: Q22 block is numerically singular (smallest eigenvalue "
            << min_eig << ", trace " << q22.trace().real() << ")";
        throw SingularBlockError(msg.str());
    }
    const CMatrix sc = q11 - q12 * q22.llt().solve(q12.adjoint());
    return hermitian_part(sc);
}

CMatrix sqrt_psd(const CMatrix& x) {
    const auto ed = eig_hermitian(x);
    const double floor = -1e-12 * std::max(1.0, x.norm());
    RVector clamped = ed.eigenvalues;
    for (Eigen::Index i = 0; i < clamped.size(); ++i) {
        if (clamped(i) < floor) {
            std::ostringstream msg;
            msg << "sqrt_psd: eigenvalue " << clamped(i) << " below clamping tolerance";
            throw std::domain_error(msg.str());
        }
        clamped(i) = std::sqrt(std::max(0.0, clamped(i)));
    }
    return hermitian_part(ed.eigenvectors * clamped.asDiagonal() * ed.eigenvectors.adjoint());
}

CMatrix inv_sqrt_psd(const CMatrix& x) {
    const auto ed = eig_hermitian(x);
    const double threshold = static_cast<double>(x.rows()) * 1e-12 * std::max(1.0, x.norm());
    RVector inv = ed.eigenvalues;
    for (Eigen::Index i = 0; i < inv.size(); ++i) {
        if (inv(i) <= threshold) {
            std::ostringstream msg;
            msg << "inv_sqrt_psd: matrix not positive definite (eigenvalue " << inv(i) << ")";
            throw std::domain_error(msg.str());
        }
        inv(i) = 1.0 / std::sqrt(inv(i));
    }
    return hermitian_part(ed.eigenvectors * inv.asDiagonal() * ed.eigenvectors.adjoint());
}

WaterfillResult waterfill(const RVector& eigvals, double total_power) {
    const Eigen::Index n = eigvals.size();
    if (n < 1) throw std::invalid_argument("waterfill: empty eigenvalue vector");
    if (!eigvals.allFinite() || !std::isfinite(total_power)) {
        throw std::domain_error("waterfill: non-finite input");
    }
    if (eigvals.minCoeff() < 0.0 || total_power < 0.0) {
        throw std::domain_error("waterfill: negative eigenvalue or power");
    }

    WaterfillResult out;
    out.powers = RVector::Zero(n);
    out.rate_nats = 0.0;
    const double lam_max = eigvals.maxCoeff();
    if (total_power == 0.0) {
        out.water_level = lam_max > 0.0 ? 1.0 / lam_max : 0.0;
        return out;
    }
    if (lam_max <= 0.0) {
        // No usable mode: rate is zero, spread the power uniformly.
        out.powers.setConstant(total_power / static_cast<double>(n));
        out.water_level = 0.0;
        return out;
    }

    const auto allocated = [&](double mu) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (eigvals(i) > 0.0) s += std::max(0.0, mu - 1.0 / eigvals(i));
        }
        return s;
    };

    double lo = 1.0 / lam_max;          // allocated(lo) == 0
    double hi = lo + total_power;       // allocated(hi) >= total_power
    for (int iter = 0; iter < 200 && (hi - lo) > 1e-12 * std::max(1.0, hi); ++iter) {
        const double mid = 0.5 * (lo + hi);
        (allocated(mid) < total_power ? lo : hi) = mid;
    }
    double mu = 0.5 * (lo + hi);

    // Polish: with the active set fixed, the water level is closed-form.
    double inv_sum = 0.0;
    int active = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (eigvals(i) > 0.0 && mu - 1.0 / eigvals(i) > 0.0) {
            inv_sum += 1.0 / eigvals(i);
            ++active;
        }
    }
    if (active > 0) {
        const double polished = (total_power + inv_sum) / static_cast<double>(active);
        // Accept only if it keeps the same active set.
        bool consistent = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            const bool was = eigvals(i) > 0.0 && mu - 1.0 / eigvals(i) > 0.0;
            const bool now = eigvals(i) > 0.0 && polished - 1.0 / eigvals(i) > 0.0;
            if (was != now) { consistent = false; break; }
        }
        if (consistent) mu = polished;
    }

    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (eigvals(i) > 0.0) out.powers(i) = std::max(0.0, mu - 1.0 / eigvals(i));
        sum += out.powers(i);
    }
    if (sum > 0.0) out.powers *= total_power / sum;
    for (Eigen::Index i = 0; i < n; ++i) {
        out.rate_nats += std::log1p(eigvals(i) * out.powers(i));
    }
    out.water_level = mu;
    return out;
}

ReverseWaterfillResult reverse_waterfill(const RVector& eigvals, double rate_nats) {
    const Eigen::Index n = eigvals.size();
    if (n < 1) throw std::invalid_argument("reverse_waterfill: empty eigenvalue vector");
    if (!eigvals.allFinite() || !std::isfinite(rate_nats)) {
        throw std::domain_error("reverse_waterfill: non-finite input");
    }
    if (eigvals.minCoeff() <= 0.0) {
        throw std::domain_error("reverse_waterfill: eigenvalues must be strictly positive");
    }
    if (rate_nats < 0.0) throw std::domain_error("reverse_waterfill: negative rate");

    const double lam_max = eigvals.maxCoeff();
    ReverseWaterfillResult out;
    out.distortions.resize(n);
    if (rate_nats == 0.0) {
        out.distortions = eigvals;
        out.water_level = lam_max;
        return out;
    }

    const auto rate_at = [&](double mu) {
        double r = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (eigvals(i) > mu) r += std::log(eigvals(i) / mu);
        }
        return r;
    };

    // rate_at is decreasing in mu; the largest mode alone already reaches the
    // target at mu = lam_max * exp(-rate), so the root is bracketed.
    double lo = lam_max * std::exp(-rate_nats);
    double hi = lam_max;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (rate_at(mid) > rate_nats ? lo : hi) = mid;
    }
    double mu = 0.5 * (lo + hi);

    // Exact water level for the bracketed active set.
    double log_sum = 0.0;
    int active = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (eigvals(i) > mu) {
            log_sum += std::log(eigvals(i));
            ++active;
        }
    }
    if (active > 0) {
        const double polished = std::exp((log_sum - rate_nats) / static_cast<double>(active));
        bool consistent = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            if ((eigvals(i) > mu) != (eigvals(i) > polished)) { consistent = false; break; }
        }
        if (consistent) mu = polished;
    }

    for (Eigen::Index i = 0; i < n; ++i) {
        out.distortions(i) = std::min(mu, eigvals(i));
    }
    out.water_level = mu;
    return out;
}

}  // namespace relaylab
