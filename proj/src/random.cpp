#include "mofkit/random.hpp"

namespace mofkit {

namespace {

Complex gauss(Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    return Complex(n(rng), n(rng));
}

} // namespace

AlgebraElement random_element(const TensorSignature& sig, Rng& rng) {
    Matrix m = Matrix::Zero(sig.dim(), sig.dim());
    for (const auto& idx : sig.groups())
        for (int r : idx)
            for (int c : idx) m(r, c) = gauss(rng);
    return AlgebraElement::trusted(sig, std::move(m));
}

AlgebraElement random_hermitian(const TensorSignature& sig, Rng& rng) {
    const AlgebraElement a = random_element(sig, rng);
    return AlgebraElement::trusted(sig, (a.matrix() + a.matrix().adjoint()) / 2.0);
}

AlgebraElement random_normal_element(const TensorSignature& sig, Rng& rng) {
    Matrix m = Matrix::Zero(sig.dim(), sig.dim());
    for (const auto& idx : sig.groups()) {
        const int k = static_cast<int>(idx.size());
        Matrix g(k, k);
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < k; ++c) g(r, c) = gauss(rng);
        const Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ();
        Matrix d = Matrix::Zero(k, k);
        for (int r = 0; r < k; ++r) d(r, r) = gauss(rng);
        const Matrix sub = q * d * q.adjoint();
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < k; ++c) m(idx[r], idx[c]) = sub(r, c);
    }
    return AlgebraElement::trusted(sig, std::move(m));
}

AlgebraElement random_central_element(const TensorSignature& sig, Rng& rng) {
    Matrix m = Matrix::Zero(sig.dim(), sig.dim());
    for (const auto& idx : sig.groups()) {
        const Complex c = gauss(rng);
        for (int r : idx) m(r, r) = c;
    }
    return AlgebraElement::trusted(sig, std::move(m));
}

AlgebraElement random_diagonal_element(const TensorSignature& sig, Rng& rng) {
    Matrix m = Matrix::Zero(sig.dim(), sig.dim());
    for (int r = 0; r < sig.dim(); ++r) m(r, r) = gauss(rng);
    return AlgebraElement::trusted(sig, std::move(m));
}

State random_state(const TensorSignature& sig, Rng& rng) {
    const AlgebraElement a = random_element(sig, rng);
    Matrix rho = a.matrix().adjoint() * a.matrix();
    const double tr = rho.trace().real();
    if (tr < 1e-12) return State::maximally_mixed(sig);
    return State(sig, rho / tr);
}

std::vector<Complex> random_scalar_values(int n, Rng& rng) {
    std::vector<Complex> out(n);
    for (auto& c : out) c = gauss(rng);
    return out;
}

std::vector<double> random_real_values(int n, Rng& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> out(n);
    for (auto& v : out) v = dist(rng);
    return out;
}

namespace {

template <typename Gen>
OperatorField make_field(const MofPtr& m, Rng& rng, Gen gen) {
    std::vector<AlgebraElement> vals;
    vals.reserve(m->size());
    for (int x = 0; x < m->size(); ++x) vals.push_back(gen(m->fiber(x), rng));
    return OperatorField(m, std::move(vals));
}

} // namespace

OperatorField random_field(const MofPtr& m, Rng& rng) {
    return make_field(m, rng, random_element);
}

OperatorField random_commuting_field(const MofPtr& m, Rng& rng) {
    return make_field(m, rng, m->central() ? random_element : random_central_element);
}

OperatorField random_normal_field(const MofPtr& m, Rng& rng) {
    return make_field(m, rng, random_normal_element);
}

OperatorField random_diagonal_field(const MofPtr& m, Rng& rng) {
    return make_field(m, rng, random_diagonal_element);
}

Eigen::MatrixXd random_metric(int n, Rng& rng) {
    std::uniform_real_distribution<double> dist(0.5, 2.0);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) d(i, j) = d(j, i) = dist(rng);
    // shortest-path closure restores the triangle inequality
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
    return d;
}

} // namespace mofkit
