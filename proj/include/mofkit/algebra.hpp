#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "mofkit/errors.hpp"

namespace mofkit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

struct ToleranceConfig {
    double tau_psd = 1e-9;    // relative eigenvalue floor for positivity
    double tau_inv = 1e-9;    // relative eigenvalue threshold for invertibility
    double tau_eq = 1e-8;     // comparison tolerance for equalities/inequalities
    double tau_struct = 1e-9; // relative off-block mass allowed at construction

    void validate() const; // throws StructureViolation unless positive and tau_inv >= tau_psd
};

// Block sizes of one finite-dimensional C*-algebra, represented as
// block-diagonal matrices inside M_N with N = sum of block sizes.
class AlgebraSignature {
public:
    explicit AlgebraSignature(std::vector<int> blocks);

    int total_dim() const { return dim_; }
    const std::vector<int>& blocks() const { return blocks_; }
    int block_count() const { return static_cast<int>(blocks_.size()); }
    int block_of(int index) const { return block_of_[index]; }
    int block_offset(int b) const { return offsets_[b]; }
    bool commutative() const;

    friend bool operator==(const AlgebraSignature& a, const AlgebraSignature& b) {
        return a.blocks_ == b.blocks_;
    }
    friend bool operator!=(const AlgebraSignature& a, const AlgebraSignature& b) {
        return !(a == b);
    }

private:
    std::vector<int> blocks_;
    std::vector<int> offsets_;
    std::vector<int> block_of_;
    int dim_ = 0;
};

// Ordered tensor product of algebra factors. A plain algebra is the
// single-factor case. The representation of a tensor product is the
// Kronecker product, so the membership mask is the Kronecker product of
// the factor masks; indices with equal per-factor block tuples form the
// support groups, and any supported matrix is block diagonal with respect
// to that grouping (after no basis change at all).
class TensorSignature {
public:
    TensorSignature() = default; // empty, invalid until assigned
    explicit TensorSignature(AlgebraSignature factor);
    explicit TensorSignature(std::vector<AlgebraSignature> factors);

    int dim() const { return dim_; }
    int factor_count() const { return static_cast<int>(factors_.size()); }
    const AlgebraSignature& factor(int i) const { return factors_[i]; }
    const std::vector<AlgebraSignature>& factors() const { return factors_; }
    bool commutative() const;

    static TensorSignature tensor(const TensorSignature& a, const TensorSignature& b);
    TensorSignature slice(int begin, int end) const; // factors [begin, end)

    int group_count() const { return static_cast<int>(groups_.size()); }
    int group_of(int index) const { return group_of_[index]; }
    const std::vector<std::vector<int>>& groups() const { return groups_; }

    friend bool operator==(const TensorSignature& a, const TensorSignature& b) {
        return a.factors_ == b.factors_;
    }
    friend bool operator!=(const TensorSignature& a, const TensorSignature& b) {
        return !(a == b);
    }

private:
    std::vector<AlgebraSignature> factors_;
    std::vector<int> group_of_;
    std::vector<std::vector<int>> groups_;
    int dim_ = 0;

    void build_groups();
};

// Immutable element of a represented algebra. Off-support entries are
// validated against tau_struct at construction and then zeroed, so the
// block support of a stored matrix is exact.
class AlgebraElement {
public:
    AlgebraElement(TensorSignature sig, Matrix m, const ToleranceConfig& tol = {});

    static AlgebraElement unit(const TensorSignature& sig);
    static AlgebraElement zero(const TensorSignature& sig);
    static AlgebraElement scalar(const TensorSignature& sig, Complex c);
    // Internal fast path: caller guarantees m is exactly supported.
    static AlgebraElement trusted(TensorSignature sig, Matrix m);

    const TensorSignature& sig() const { return sig_; }
    const Matrix& matrix() const { return mat_; }
    int dim() const { return sig_.dim(); }

    AlgebraElement adjoint() const;

    friend AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b);
    friend AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b);
    friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b);
    friend AlgebraElement operator*(Complex c, const AlgebraElement& a);
    friend AlgebraElement operator*(double c, const AlgebraElement& a);

private:
    TensorSignature sig_;
    Matrix mat_;

    AlgebraElement() = default;
};

// Density-matrix state on a represented algebra.
class State {
public:
    State(TensorSignature sig, Matrix density, const ToleranceConfig& tol = {});

    static State maximally_mixed(const TensorSignature& sig);
    static State point_mass(const TensorSignature& sig, int diag_index);

    const TensorSignature& sig() const { return sig_; }
    const Matrix& density() const { return density_; }

private:
    TensorSignature sig_;
    Matrix density_;
};

// Norms, spectra and functional calculus. All spectral routines work per
// support group, which agrees with the whole-matrix computation because
// supported matrices are exactly block diagonal over the groups.
double operator_norm(const AlgebraElement& a);
std::vector<Complex> spectrum(const AlgebraElement& a); // sorted by (re, im)
double hermitian_defect(const AlgebraElement& a);       // ||a - a*||_F
double min_eigenvalue(const AlgebraElement& a);         // Hermitian part assumed
double max_eigenvalue(const AlgebraElement& a);

bool is_hermitian(const AlgebraElement& a, const ToleranceConfig& tol = {});
bool is_positive(const AlgebraElement& a, const ToleranceConfig& tol = {});
bool is_positive_invertible(const AlgebraElement& a, const ToleranceConfig& tol = {});

// Hermitian p-th power through the eigendecomposition; eigenvalues below 0
// are clamped to 0. Throws NotPositive unless positive within tau_psd, and
// NotInvertible for p < 0 unless invertible within tau_inv.
AlgebraElement psd_power(const AlgebraElement& a, double p, const ToleranceConfig& tol = {});
AlgebraElement abs_element(const AlgebraElement& a, const ToleranceConfig& tol = {});

// Tensor structure.
AlgebraElement tensor(const AlgebraElement& a, const AlgebraElement& b);
// Reorders factors: new factor p is old factor perm[p]. Index reshuffle,
// identical to conjugation by the corresponding commutation matrix.
AlgebraElement permute_factors(const AlgebraElement& w, const std::vector<int>& perm);
// Swap of the two factors of A (x) B. Throws NotTwoFactor otherwise.
AlgebraElement flip(const AlgebraElement& w);
// Swap of the factor groups [0, left) and [left, count).
AlgebraElement flip_groups(const AlgebraElement& w, int left_factors);
// A (x) C -> A (x) B (x) C with the unit of B in the middle; the two-factor
// form of the grouped version below. Throws NotTwoFactor.
AlgebraElement insert_unit_middle(const AlgebraElement& w, const TensorSignature& middle);
AlgebraElement insert_unit_group(const AlgebraElement& w, int left_factors,
                                 const TensorSignature& middle);

// States.
Complex apply_state(const State& mu, const AlgebraElement& a);
// (mu (x) id): mu's factors must equal the leading factors of w's signature.
AlgebraElement partial_apply_left(const State& mu, const AlgebraElement& w);
State tensor_state(const State& mu, const State& nu);

// Distance from the tensor product of the factor centers; is_central tests
// it against tau_eq * (1 + ||w||).
double central_defect(const AlgebraElement& w);
bool is_central(const AlgebraElement& w, const ToleranceConfig& tol = {});

// Distance from the span of the unit. Exact (spectral midrange) for
// Hermitian input; otherwise the trace-projection upper bound.
double scalar_distance(const AlgebraElement& a, const ToleranceConfig& tol = {});

} // namespace mofkit
