#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>

namespace relaylab {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Complex = std::complex<double>;

inline constexpr double kLn2 = 0.6931471805599453;

/// Convert an internal rate in nats to the reported unit (bits).
inline double nats_to_bits(double nats) { return nats / kLn2; }
inline double bits_to_nats(double bits) { return bits * kLn2; }

/// Thrown when a covariance block that must be inverted is numerically singular.
struct SingularBlockError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
/// Satisfies U diag(w) U^H = X and U^H U = I to 1e-10 relative.
struct EigenDecomposition {
    RVector eigenvalues;
    CMatrix eigenvectors;
};

/// (X + X^H)/2. Cheap way to strip rounding-level asymmetry.
CMatrix hermitian_part(const CMatrix& x);

/// Relative deviation from conjugate symmetry, ||X - X^H||_F / max(1, ||X||_F).
double hermitian_defect(const CMatrix& x);

EigenDecomposition eig_hermitian(const CMatrix& x);

/// log det X in nats for Hermitian positive definite X.
/// Throws std::domain_error (with the smallest eigenvalue in the message)
/// when X is not positive definite.
double logdet_psd(const CMatrix& x);

/// Schur complement of the trailing block: Q11 - Q12 Q22^{-1} Q21, where Q11
/// is the leading m1 x m1 block. Throws SingularBlockError when the smallest
/// eigenvalue of Q22 is <= 1e-10 * tr(Q22).
CMatrix schur_complement(const CMatrix& q, Eigen::Index m1);

/// Hermitian square root with eigenvalues clamped at zero. Eigenvalues below
/// -1e-12 * ||X||_F are a domain error; small rounding negatives are clamped.
CMatrix sqrt_psd(const CMatrix& x);

/// X^{-1/2} for Hermitian positive definite X.
CMatrix inv_sqrt_psd(const CMatrix& x);

struct WaterfillResult {
    RVector powers;      // nonnegative, sums to the power budget
    double rate_nats;    // sum_i log(1 + eig_i * p_i)
    double water_level;  // mu: active modes satisfy 1/eig_i + p_i = mu
};

/// Capacity-achieving power allocation over channel eigenmodes: maximize
/// sum_i log(1 + eig_i p_i) subject to p >= 0, sum p = total_power. Water
/// level found by bisection and polished against the closed-form active set.
/// All eigenvalues zero with positive power yields rate 0 and a uniform split.
WaterfillResult waterfill(const RVector& eigvals, double total_power);

struct ReverseWaterfillResult {
    RVector distortions;  // d_i = min(mu, eig_i), so 0 < d_i <= eig_i
    double water_level;
};

/// Distortion allocation over source eigenmodes: minimize sum_i d_i subject
/// to sum_i log(eig_i / d_i) = rate_nats with d diagonal in the eigenbasis.
/// Requires strictly positive eigenvalues and rate_nats >= 0. At rate 0 the
/// distortion equals the source spectrum.
ReverseWaterfillResult reverse_waterfill(const RVector& eigvals, double rate_nats);

}  // namespace relaylab
