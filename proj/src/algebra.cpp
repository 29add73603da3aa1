#include "mofkit/algebra.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include <unsupported/Eigen/KroneckerProduct>

namespace mofkit {

namespace {

double frob(const Matrix& m) { return m.norm(); }

Matrix group_submatrix(const Matrix& m, const std::vector<int>& idx) {
    const int n = static_cast<int>(idx.size());
    Matrix sub(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) sub(r, c) = m(idx[r], idx[c]);
    return sub;
}

void scatter_group(Matrix& out, const std::vector<int>& idx, const Matrix& sub) {
    const int n = static_cast<int>(idx.size());
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) out(idx[r], idx[c]) = sub(r, c);
}

Eigen::SelfAdjointEigenSolver<Matrix> herm_eig(const Matrix& sub, bool vectors) {
    Matrix h = 0.5 * (sub + sub.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver;
    solver.compute(h, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    return solver;
}

} // namespace

void ToleranceConfig::validate() const {
    if (!(tau_psd > 0 && tau_inv > 0 && tau_eq > 0 && tau_struct > 0))
        throw StructureViolation("tolerances must be positive");
    if (tau_inv < tau_psd)
        throw StructureViolation("tau_inv must be at least tau_psd");
}

AlgebraSignature::AlgebraSignature(std::vector<int> blocks) : blocks_(std::move(blocks)) {
    if (blocks_.empty()) throw StructureViolation("algebra needs at least one block");
    offsets_.reserve(blocks_.size());
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        if (blocks_[b] < 1) throw StructureViolation("block sizes must be positive");
        offsets_.push_back(dim_);
        dim_ += blocks_[b];
        block_of_.insert(block_of_.end(), blocks_[b], static_cast<int>(b));
    }
}

bool AlgebraSignature::commutative() const {
    return std::all_of(blocks_.begin(), blocks_.end(), [](int n) { return n == 1; });
}

TensorSignature::TensorSignature(AlgebraSignature factor) {
    factors_.push_back(std::move(factor));
    build_groups();
}

TensorSignature::TensorSignature(std::vector<AlgebraSignature> factors)
    : factors_(std::move(factors)) {
    if (factors_.empty()) throw StructureViolation("tensor signature needs a factor");
    build_groups();
}

bool TensorSignature::commutative() const {
    return std::all_of(factors_.begin(), factors_.end(),
                       [](const AlgebraSignature& f) { return f.commutative(); });
}

TensorSignature TensorSignature::tensor(const TensorSignature& a, const TensorSignature& b) {
    std::vector<AlgebraSignature> fs = a.factors_;
    fs.insert(fs.end(), b.factors_.begin(), b.factors_.end());
    return TensorSignature(std::move(fs));
}

TensorSignature TensorSignature::slice(int begin, int end) const {
    if (begin < 0 || end > factor_count() || begin >= end)
        throw StructureViolation("bad factor slice");
    return TensorSignature(
        std::vector<AlgebraSignature>(factors_.begin() + begin, factors_.begin() + end));
}

void TensorSignature::build_groups() {
    dim_ = 1;
    for (const auto& f : factors_) dim_ *= f.total_dim();
    group_of_.assign(dim_, -1);
    groups_.clear();
    std::map<std::vector<int>, int> ids;
    const int k = factor_count();
    std::vector<int> key(k);
    for (int i = 0; i < dim_; ++i) {
        int rest = i;
        for (int f = k - 1; f >= 0; --f) {
            const int d = factors_[f].total_dim();
            key[f] = factors_[f].block_of(rest % d);
            rest /= d;
        }
        auto [it, fresh] = ids.try_emplace(key, static_cast<int>(groups_.size()));
        if (fresh) groups_.emplace_back();
        group_of_[i] = it->second;
        groups_[it->second].push_back(i);
    }
}

AlgebraElement::AlgebraElement(TensorSignature sig, Matrix m, const ToleranceConfig& tol)
    : sig_(std::move(sig)), mat_(std::move(m)) {
    const int n = sig_.dim();
    if (mat_.rows() != n || mat_.cols() != n)
        throw DimensionMismatch("matrix does not match signature dimension");
    double off = 0.0;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if (sig_.group_of(r) != sig_.group_of(c)) off += std::norm(mat_(r, c));
    off = std::sqrt(off);
    if (off > tol.tau_struct * (1.0 + frob(mat_)))
        throw StructureViolation("matrix has mass outside the block support");
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if (sig_.group_of(r) != sig_.group_of(c)) mat_(r, c) = Complex(0, 0);
}

AlgebraElement AlgebraElement::trusted(TensorSignature sig, Matrix m) {
    AlgebraElement e;
    e.sig_ = std::move(sig);
    e.mat_ = std::move(m);
    return e;
}

AlgebraElement AlgebraElement::unit(const TensorSignature& sig) {
    return trusted(sig, Matrix::Identity(sig.dim(), sig.dim()));
}

AlgebraElement AlgebraElement::zero(const TensorSignature& sig) {
    return trusted(sig, Matrix::Zero(sig.dim(), sig.dim()));
}

AlgebraElement AlgebraElement::scalar(const TensorSignature& sig, Complex c) {
    return trusted(sig, c * Matrix::Identity(sig.dim(), sig.dim()));
}

AlgebraElement AlgebraElement::adjoint() const { return trusted(sig_, mat_.adjoint()); }

static void require_same_sig(const AlgebraElement& a, const AlgebraElement& b) {
    if (a.sig() != b.sig()) throw DimensionMismatch("operands live on different signatures");
}

AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
    require_same_sig(a, b);
    return AlgebraElement::trusted(a.sig_, a.mat_ + b.mat_);
}

AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
    require_same_sig(a, b);
    return AlgebraElement::trusted(a.sig_, a.mat_ - b.mat_);
}

AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
    require_same_sig(a, b);
    return AlgebraElement::trusted(a.sig_, a.mat_ * b.mat_);
}

AlgebraElement operator*(Complex c, const AlgebraElement& a) {
    return AlgebraElement::trusted(a.sig_, c * a.mat_);
}

AlgebraElement operator*(double c, const AlgebraElement& a) {
    return Complex(c, 0.0) * a;
}

State::State(TensorSignature sig, Matrix density, const ToleranceConfig& tol)
    : sig_(std::move(sig)), density_(std::move(density)) {
    AlgebraElement body(sig_, density_, tol); // support + dimension checks
    density_ = body.matrix();
    const double scale = 1.0 + frob(density_);
    if (hermitian_defect(body) > tol.tau_psd * scale)
        throw NotPositive("density is not Hermitian");
    if (min_eigenvalue(body) < -tol.tau_psd * scale)
        throw NotPositive("density has a negative eigenvalue");
    if (std::abs(density_.trace() - Complex(1, 0)) > tol.tau_psd * scale)
        throw StructureViolation("density trace is not 1");
}

State State::maximally_mixed(const TensorSignature& sig) {
    const int n = sig.dim();
    return State(sig, Matrix::Identity(n, n) / static_cast<double>(n));
}

State State::point_mass(const TensorSignature& sig, int diag_index) {
    if (diag_index < 0 || diag_index >= sig.dim())
        throw DimensionMismatch("point mass index out of range");
    Matrix d = Matrix::Zero(sig.dim(), sig.dim());
    d(diag_index, diag_index) = Complex(1, 0);
    return State(sig, std::move(d));
}

double operator_norm(const AlgebraElement& a) {
    double best = 0.0;
    for (const auto& idx : a.sig().groups()) {
        if (idx.size() == 1) {
            best = std::max(best, std::abs(a.matrix()(idx[0], idx[0])));
            continue;
        }
        Matrix sub = group_submatrix(a.matrix(), idx);
        Matrix gram = sub.adjoint() * sub;
        Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
        const double top = solver.eigenvalues().maxCoeff();
        best = std::max(best, std::sqrt(std::max(0.0, top)));
    }
    return best;
}

std::vector<Complex> spectrum(const AlgebraElement& a) {
    std::vector<Complex> out;
    out.reserve(a.dim());
    for (const auto& idx : a.sig().groups()) {
        if (idx.size() == 1) {
            out.push_back(a.matrix()(idx[0], idx[0]));
            continue;
        }
        Eigen::ComplexEigenSolver<Matrix> solver(group_submatrix(a.matrix(), idx), false);
        for (int i = 0; i < solver.eigenvalues().size(); ++i)
            out.push_back(solver.eigenvalues()(i));
    }
    std::sort(out.begin(), out.end(), [](Complex x, Complex y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return out;
}

double hermitian_defect(const AlgebraElement& a) {
    return (a.matrix() - a.matrix().adjoint()).norm();
}

static std::vector<double> hermitian_eigenvalues(const AlgebraElement& a) {
    std::vector<double> out;
    out.reserve(a.dim());
    for (const auto& idx : a.sig().groups()) {
        if (idx.size() == 1) {
            out.push_back(a.matrix()(idx[0], idx[0]).real());
            continue;
        }
        auto solver = herm_eig(group_submatrix(a.matrix(), idx), false);
        for (int i = 0; i < solver.eigenvalues().size(); ++i)
            out.push_back(solver.eigenvalues()(i));
    }
    return out;
}

double min_eigenvalue(const AlgebraElement& a) {
    const auto ev = hermitian_eigenvalues(a);
    return *std::min_element(ev.begin(), ev.end());
}

double max_eigenvalue(const AlgebraElement& a) {
    const auto ev = hermitian_eigenvalues(a);
    return *std::max_element(ev.begin(), ev.end());
}

bool is_hermitian(const AlgebraElement& a, const ToleranceConfig& tol) {
    return hermitian_defect(a) <= tol.tau_eq * (1.0 + frob(a.matrix()));
}

bool is_positive(const AlgebraElement& a, const ToleranceConfig& tol) {
    const double scale = 1.0 + frob(a.matrix());
    if (hermitian_defect(a) > tol.tau_psd * scale) return false;
    return min_eigenvalue(a) >= -tol.tau_psd * scale;
}

bool is_positive_invertible(const AlgebraElement& a, const ToleranceConfig& tol) {
    const double scale = 1.0 + frob(a.matrix());
    if (hermitian_defect(a) > tol.tau_psd * scale) return false;
    const double lo = min_eigenvalue(a);
    return lo > 0.0 && lo >= tol.tau_inv * scale;
}

AlgebraElement psd_power(const AlgebraElement& a, double p, const ToleranceConfig& tol) {
    const double scale = 1.0 + frob(a.matrix());
    if (hermitian_defect(a) > tol.tau_psd * scale)
        throw NotPositive("psd_power needs a Hermitian element");
    const double lo = min_eigenvalue(a);
    if (lo < -tol.tau_psd * scale)
        throw NotPositive("psd_power needs a positive element");
    if (p < 0 && !(lo > 0.0 && lo >= tol.tau_inv * scale))
        throw NotInvertible("negative power of a non-invertible element");
    Matrix out = Matrix::Zero(a.dim(), a.dim());
    for (const auto& idx : a.sig().groups()) {
        if (idx.size() == 1) {
            const double v = std::max(0.0, a.matrix()(idx[0], idx[0]).real());
            out(idx[0], idx[0]) = Complex(std::pow(v, p), 0.0);
            continue;
        }
        auto solver = herm_eig(group_submatrix(a.matrix(), idx), true);
        Eigen::VectorXd vals = solver.eigenvalues().cwiseMax(0.0);
        Eigen::VectorXd powered(vals.size());
        for (int i = 0; i < vals.size(); ++i) powered(i) = std::pow(vals(i), p);
        Matrix sub = solver.eigenvectors() * powered.asDiagonal() *
                     solver.eigenvectors().adjoint();
        scatter_group(out, idx, 0.5 * (sub + sub.adjoint()).eval());
    }
    return AlgebraElement::trusted(a.sig(), std::move(out));
}

AlgebraElement abs_element(const AlgebraElement& a, const ToleranceConfig& tol) {
    return psd_power(a.adjoint() * a, 0.5, tol);
}

AlgebraElement tensor(const AlgebraElement& a, const AlgebraElement& b) {
    TensorSignature sig = TensorSignature::tensor(a.sig(), b.sig());
    Matrix m = Eigen::kroneckerProduct(a.matrix(), b.matrix());
    return AlgebraElement::trusted(std::move(sig), std::move(m));
}

AlgebraElement permute_factors(const AlgebraElement& w, const std::vector<int>& perm) {
    const int k = w.sig().factor_count();
    if (static_cast<int>(perm.size()) != k)
        throw DimensionMismatch("permutation length does not match factor count");
    std::vector<bool> seen(k, false);
    for (int p : perm) {
        if (p < 0 || p >= k || seen[p]) throw DimensionMismatch("not a permutation");
        seen[p] = true;
    }
    std::vector<int> old_dim(k), old_stride(k, 1);
    for (int f = 0; f < k; ++f) old_dim[f] = w.sig().factor(f).total_dim();
    for (int f = k - 2; f >= 0; --f) old_stride[f] = old_stride[f + 1] * old_dim[f + 1];

    std::vector<AlgebraSignature> new_factors;
    new_factors.reserve(k);
    for (int p = 0; p < k; ++p) new_factors.push_back(w.sig().factor(perm[p]));
    TensorSignature new_sig(std::move(new_factors));

    const int n = w.dim();
    std::vector<int> to_old(n);
    for (int i = 0; i < n; ++i) {
        int rest = i, old = 0;
        for (int p = k - 1; p >= 0; --p) {
            const int d = old_dim[perm[p]];
            old += (rest % d) * old_stride[perm[p]];
            rest /= d;
        }
        to_old[i] = old;
    }
    Matrix out(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) out(r, c) = w.matrix()(to_old[r], to_old[c]);
    return AlgebraElement::trusted(std::move(new_sig), std::move(out));
}

AlgebraElement flip(const AlgebraElement& w) {
    if (w.sig().factor_count() != 2)
        throw NotTwoFactor("flip needs a two-factor element");
    return permute_factors(w, {1, 0});
}

AlgebraElement flip_groups(const AlgebraElement& w, int left_factors) {
    const int k = w.sig().factor_count();
    if (left_factors <= 0 || left_factors >= k)
        throw NotTwoFactor("flip needs a proper two-group split");
    std::vector<int> perm;
    perm.reserve(k);
    for (int f = left_factors; f < k; ++f) perm.push_back(f);
    for (int f = 0; f < left_factors; ++f) perm.push_back(f);
    return permute_factors(w, perm);
}

AlgebraElement insert_unit_group(const AlgebraElement& w, int left_factors,
                                 const TensorSignature& middle) {
    const int k = w.sig().factor_count();
    if (left_factors <= 0 || left_factors >= k)
        throw NotTwoFactor("unit insertion needs a proper two-group split");
    AlgebraElement wide = tensor(w, AlgebraElement::unit(middle));
    const int m = middle.factor_count();
    std::vector<int> perm;
    perm.reserve(k + m);
    for (int f = 0; f < left_factors; ++f) perm.push_back(f);
    for (int f = 0; f < m; ++f) perm.push_back(k + f);
    for (int f = left_factors; f < k; ++f) perm.push_back(f);
    return permute_factors(wide, perm);
}

AlgebraElement insert_unit_middle(const AlgebraElement& w, const TensorSignature& middle) {
    if (w.sig().factor_count() != 2)
        throw NotTwoFactor("unit insertion needs a two-factor element");
    return insert_unit_group(w, 1, middle);
}

Complex apply_state(const State& mu, const AlgebraElement& a) {
    if (mu.sig() != a.sig())
        throw DimensionMismatch("state and element live on different signatures");
    return (mu.density() * a.matrix()).trace();
}

AlgebraElement partial_apply_left(const State& mu, const AlgebraElement& w) {
    const int lk = mu.sig().factor_count();
    if (lk >= w.sig().factor_count())
        throw DimensionMismatch("element has no factors left of the state");
    for (int f = 0; f < lk; ++f)
        if (!(mu.sig().factor(f) == w.sig().factor(f)))
            throw DimensionMismatch("state does not match the leading factors");
    const int dl = mu.sig().dim();
    const int dr = w.dim() / dl;
    Matrix out = Matrix::Zero(dr, dr);
    for (int i = 0; i < dl; ++i)
        for (int j = 0; j < dl; ++j) {
            const Complex rho = mu.density()(j, i);
            if (rho == Complex(0, 0)) continue;
            out.noalias() += rho * w.matrix().block(i * dr, j * dr, dr, dr);
        }
    return AlgebraElement::trusted(w.sig().slice(lk, w.sig().factor_count()), std::move(out));
}

State tensor_state(const State& mu, const State& nu) {
    TensorSignature sig = TensorSignature::tensor(mu.sig(), nu.sig());
    Matrix d = Eigen::kroneckerProduct(mu.density(), nu.density());
    return State(std::move(sig), std::move(d));
}

double central_defect(const AlgebraElement& w) {
    double worst = 0.0;
    for (const auto& idx : w.sig().groups()) {
        const int n = static_cast<int>(idx.size());
        Matrix sub = group_submatrix(w.matrix(), idx);
        const Complex c = sub.trace() / static_cast<double>(n);
        sub -= c * Matrix::Identity(n, n);
        if (n == 1) continue; // 1x1 groups are always central
        Matrix gram = sub.adjoint() * sub;
        Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
        worst = std::max(worst, std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff())));
    }
    return worst;
}

bool is_central(const AlgebraElement& w, const ToleranceConfig& tol) {
    return central_defect(w) <= tol.tau_eq * (1.0 + operator_norm(w));
}

double scalar_distance(const AlgebraElement& a, const ToleranceConfig& tol) {
    if (is_hermitian(a, tol)) {
        const auto ev = hermitian_eigenvalues(a);
        const auto [lo, hi] = std::minmax_element(ev.begin(), ev.end());
        return 0.5 * (*hi - *lo);
    }
    const Complex c = a.matrix().trace() / static_cast<double>(a.dim());
    return operator_norm(a - AlgebraElement::scalar(a.sig(), c));
}

} // namespace mofkit
