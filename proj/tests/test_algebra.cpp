#include "doctest.h"

#include "helpers.hpp"

using namespace mofkit;
using testutil::kron_oracle;

namespace {

TensorSignature sig1(std::vector<int> blocks) {
    return TensorSignature(AlgebraSignature(std::move(blocks)));
}

// Signatures exercised by most random sweeps: commutative, full matrix,
// mixed, and a two-factor product.
std::vector<TensorSignature> sample_sigs() {
    return {sig1({1, 1}), sig1({2}), sig1({2, 1}),
            TensorSignature({AlgebraSignature({1, 1}), AlgebraSignature({2})})};
}

} // namespace

TEST_CASE("signature bookkeeping") {
    AlgebraSignature a({2, 1});
    CHECK(a.total_dim() == 3);
    CHECK(a.block_count() == 2);
    CHECK(a.block_of(0) == 0);
    CHECK(a.block_of(1) == 0);
    CHECK(a.block_of(2) == 1);
    CHECK(a.block_offset(1) == 2);
    CHECK(!a.commutative());
    CHECK(AlgebraSignature({1, 1, 1}).commutative());
    CHECK_THROWS_AS(AlgebraSignature({2, 0}), StructureViolation);
    CHECK_THROWS_AS(AlgebraSignature({}), StructureViolation);

    TensorSignature t = TensorSignature::tensor(sig1({1, 1}), sig1({2}));
    CHECK(t.dim() == 4);
    CHECK(t.factor_count() == 2);
    CHECK(t.slice(0, 1) == sig1({1, 1}));
    CHECK(t.slice(1, 2) == sig1({2}));
    // index (p, q) with p a C^2 coordinate and q an M2 coordinate: groups
    // split by p only
    CHECK(t.group_count() == 2);
    CHECK(t.group_of(0) == t.group_of(1));
    CHECK(t.group_of(2) == t.group_of(3));
    CHECK(t.group_of(0) != t.group_of(2));
}

TEST_CASE("element construction enforces block support") {
    TensorSignature s = sig1({1, 1});
    Matrix off = Matrix::Zero(2, 2);
    off(0, 1) = 1.0;
    CHECK_THROWS_AS(AlgebraElement(s, off), StructureViolation);
    CHECK_THROWS_AS(AlgebraElement(s, Matrix::Zero(3, 3)), DimensionMismatch);

    // tiny off-support noise is cleaned up, not rejected
    Matrix noisy = Matrix::Identity(2, 2);
    noisy(1, 0) = 1e-13;
    AlgebraElement e(s, noisy);
    CHECK(e.matrix()(1, 0) == Complex(0.0, 0.0));

    AlgebraElement u = AlgebraElement::unit(sig1({2}));
    CHECK(u.matrix() == Matrix::Identity(2, 2));
    CHECK(operator_norm(AlgebraElement::zero(s)) == 0.0);
}

TEST_CASE("operator norm matches a whole-matrix oracle") {
    CHECK(operator_norm(testutil::diag_el(sig1({1, 1}), {2.0, 1.0})) == doctest::Approx(2.0));
    Rng rng(11);
    for (const auto& s : sample_sigs()) {
        for (int k = 0; k < 25; ++k) {
            AlgebraElement a = random_element(s, rng);
            Eigen::JacobiSVD<Matrix> svd(a.matrix());
            CHECK(operator_norm(a) == doctest::Approx(svd.singularValues()(0)).epsilon(1e-10));
        }
    }
}

TEST_CASE("hermitian norm equals the largest absolute eigenvalue") {
    Rng rng(12);
    for (const auto& s : sample_sigs()) {
        AlgebraElement h = random_hermitian(s, rng);
        Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
        double want = std::max(std::abs(es.eigenvalues().minCoeff()),
                               std::abs(es.eigenvalues().maxCoeff()));
        CHECK(operator_norm(h) == doctest::Approx(want).epsilon(1e-10));
        CHECK(min_eigenvalue(h) == doctest::Approx(es.eigenvalues().minCoeff()).epsilon(1e-10));
        CHECK(max_eigenvalue(h) == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-10));
    }
}

TEST_CASE("cstar identity") {
    Rng rng(13);
    for (const auto& s : sample_sigs()) {
        for (int k = 0; k < 25; ++k) {
            AlgebraElement a = random_element(s, rng);
            double n = operator_norm(a);
            CHECK(operator_norm(a.adjoint() * a) == doctest::Approx(n * n).epsilon(1e-9));
        }
    }
}

TEST_CASE("spectrum is computed per block and agrees with the dense solver") {
    AlgebraElement d = testutil::diag_el(sig1({1, 1, 1, 1}), {0, 1, 1, 0});
    auto sp = spectrum(d);
    REQUIRE(sp.size() == 4);
    CHECK(sp[0] == Complex(0, 0));
    CHECK(sp[1] == Complex(0, 0));
    CHECK(sp[2] == Complex(1, 0));
    CHECK(sp[3] == Complex(1, 0));

    // nilpotent upper corner of M2: spectrum {0, 0}
    Matrix nil = Matrix::Zero(2, 2);
    nil(0, 1) = 1.0;
    auto nsp = spectrum(AlgebraElement(sig1({2}), nil));
    CHECK(std::abs(nsp[0]) < 1e-12);
    CHECK(std::abs(nsp[1]) < 1e-12);

    Rng rng(14);
    for (const auto& s : sample_sigs()) {
        AlgebraElement a = random_element(s, rng);
        auto got = spectrum(a);
        Eigen::ComplexEigenSolver<Matrix> es(a.matrix());
        std::vector<Complex> want(es.eigenvalues().data(),
                                  es.eigenvalues().data() + es.eigenvalues().size());
        std::sort(want.begin(), want.end(), [](Complex u, Complex v) {
            return u.real() != v.real() ? u.real() < v.real() : u.imag() < v.imag();
        });
        REQUIRE(got.size() == want.size());
        for (size_t i = 0; i < got.size(); ++i)
            CHECK(std::abs(got[i] - want[i]) < 1e-8 * (1.0 + std::abs(want[i])));
    }
}

TEST_CASE("positivity predicates") {
    TensorSignature s = sig1({1, 1});
    CHECK(is_positive(testutil::diag_el(s, {0.0, 1.0})));
    CHECK(!is_positive_invertible(testutil::diag_el(s, {0.0, 1.0})));
    CHECK(is_positive_invertible(testutil::diag_el(s, {2.0, 1.0})));
    CHECK(!is_positive(testutil::diag_el(s, {-0.5, 1.0})));
    // slack scales with the norm
    CHECK(is_positive(testutil::diag_el(s, {-1e-12, 1.0})));

    Matrix h = Matrix::Zero(2, 2);
    h(0, 1) = Complex(0, 1);
    h(1, 0) = Complex(0, -1);
    AlgebraElement e(sig1({2}), h);
    CHECK(is_hermitian(e));
    CHECK(!is_positive(e));
    CHECK(hermitian_defect(e) == doctest::Approx(0.0));
}

TEST_CASE("psd_power round trips and the known inverse square root") {
    AlgebraElement a = testutil::diag_el(sig1({1, 1}), {4.0, 1.0});
    AlgebraElement r = psd_power(a, -0.5);
    CHECK(std::abs(r.matrix()(0, 0) - Complex(0.5, 0)) < 1e-12);
    CHECK(std::abs(r.matrix()(1, 1) - Complex(1.0, 0)) < 1e-12);

    Rng rng(15);
    for (const auto& s : sample_sigs()) {
        for (int k = 0; k < 10; ++k) {
            AlgebraElement g = random_element(s, rng);
            AlgebraElement psd = g.adjoint() * g;
            AlgebraElement back = psd_power(psd_power(psd, 0.5), 2.0);
            // squaring the square root recovers the element
            CHECK(operator_norm(back - psd) < 1e-10 * (1.0 + operator_norm(psd)));

            AlgebraElement inv_ok = psd + AlgebraElement::unit(s);
            AlgebraElement sandwich =
                psd_power(inv_ok, -0.5) * inv_ok * psd_power(inv_ok, -0.5);
            CHECK(operator_norm(sandwich - AlgebraElement::unit(s)) < 1e-10);
        }
    }

    CHECK_THROWS_AS(psd_power(testutil::diag_el(sig1({1, 1}), {-1.0, 1.0}), 0.5), NotPositive);
    CHECK_THROWS_AS(psd_power(testutil::diag_el(sig1({1, 1}), {0.0, 1.0}), -1.0), NotInvertible);
}

TEST_CASE("abs_element against the eigen-oracle") {
    AlgebraElement d = testutil::diag_el(sig1({1, 1}), {-3.0, 2.0});
    AlgebraElement ad = abs_element(d);
    CHECK(std::abs(ad.matrix()(0, 0) - Complex(3, 0)) < 1e-12);
    CHECK(std::abs(ad.matrix()(1, 1) - Complex(2, 0)) < 1e-12);

    Rng rng(16);
    for (const auto& s : sample_sigs()) {
        AlgebraElement h = random_hermitian(s, rng);
        Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
        Matrix want = es.eigenvectors() *
                      es.eigenvalues().cwiseAbs().asDiagonal().toDenseMatrix().cast<Complex>() *
                      es.eigenvectors().adjoint();
        CHECK(operator_norm(abs_element(h) - AlgebraElement(s, want)) < 1e-9 * (1.0 + operator_norm(h)));
    }
}

TEST_CASE("tensor is the kronecker product and the norm is multiplicative") {
    Rng rng(17);
    TensorSignature sa = sig1({2, 1});
    TensorSignature sb = sig1({1, 1});
    for (int k = 0; k < 20; ++k) {
        AlgebraElement a = random_element(sa, rng);
        AlgebraElement b = random_element(sb, rng);
        AlgebraElement ab = tensor(a, b);
        CHECK(ab.sig().factor_count() == 2);
        CHECK((ab.matrix() - kron_oracle(a.matrix(), b.matrix())).norm() == doctest::Approx(0.0));
        CHECK(operator_norm(ab) ==
              doctest::Approx(operator_norm(a) * operator_norm(b)).epsilon(1e-9));
    }
    AlgebraElement uu = tensor(AlgebraElement::unit(sa), AlgebraElement::unit(sb));
    CHECK(uu.matrix() == Matrix::Identity(6, 6));
}

TEST_CASE("flip swaps tensor factors") {
    Rng rng(18);
    TensorSignature sa = sig1({2});
    TensorSignature sb = sig1({1, 1, 1});
    for (int k = 0; k < 20; ++k) {
        AlgebraElement a = random_element(sa, rng);
        AlgebraElement b = random_element(sb, rng);
        AlgebraElement f = flip(tensor(a, b));
        CHECK((f.matrix() - kron_oracle(b.matrix(), a.matrix())).norm() < 1e-14);
        // involution
        CHECK((flip(f).matrix() - tensor(a, b).matrix()).norm() == doctest::Approx(0.0));
    }

    // star homomorphism on sums of product elements
    AlgebraElement w = tensor(random_element(sa, rng), random_element(sb, rng)) +
                       tensor(random_element(sa, rng), random_element(sb, rng));
    AlgebraElement v = tensor(random_element(sa, rng), random_element(sb, rng));
    CHECK(operator_norm(flip(w * v) - flip(w) * flip(v)) < 1e-10 * (1 + operator_norm(w * v)));
    CHECK(operator_norm(flip(w.adjoint()) - flip(w).adjoint()) < 1e-12);
    CHECK(operator_norm(flip(w)) == doctest::Approx(operator_norm(w)).epsilon(1e-10));

    CHECK_THROWS_AS(flip(AlgebraElement::unit(sa)), NotTwoFactor);
}

TEST_CASE("permute_factors and flip_groups reorder product elements") {
    Rng rng(19);
    TensorSignature sa = sig1({1, 1});
    TensorSignature sb = sig1({2});
    TensorSignature sc = sig1({1, 1, 1});
    AlgebraElement a = random_element(sa, rng);
    AlgebraElement b = random_element(sb, rng);
    AlgebraElement c = random_element(sc, rng);
    AlgebraElement abc = tensor(tensor(a, b), c);

    AlgebraElement p = permute_factors(abc, {2, 0, 1});
    CHECK((p.matrix() - kron_oracle(c.matrix(), kron_oracle(a.matrix(), b.matrix()))).norm() <
          1e-14);

    // (a (x) b) (x) c -> c (x) (a (x) b)
    AlgebraElement g = flip_groups(abc, 2);
    CHECK((g.matrix() - p.matrix()).norm() == doctest::Approx(0.0));
    CHECK((flip_groups(g, 1).matrix() - abc.matrix()).norm() == doctest::Approx(0.0));
}

TEST_CASE("insert_unit_middle puts a unit between the two factors") {
    Rng rng(20);
    TensorSignature sa = sig1({1, 1});
    TensorSignature sc = sig1({2});
    TensorSignature mid = sig1({1, 1, 1});
    for (int k = 0; k < 10; ++k) {
        AlgebraElement a = random_element(sa, rng);
        AlgebraElement c = random_element(sc, rng);
        AlgebraElement got = insert_unit_middle(tensor(a, c), mid);
        Matrix want = kron_oracle(
            kron_oracle(a.matrix(), Matrix::Identity(3, 3)), c.matrix());
        CHECK((got.matrix() - want).norm() < 1e-14);
        CHECK(got.sig().factor_count() == 3);
    }

    // positivity survives
    AlgebraElement g = random_element(TensorSignature::tensor(sa, sc), rng);
    AlgebraElement psd = g.adjoint() * g;
    CHECK(min_eigenvalue(insert_unit_middle(psd, mid)) > -1e-10);

    // multiplicative and star preserving
    AlgebraElement w = random_element(TensorSignature::tensor(sa, sc), rng);
    AlgebraElement v = random_element(TensorSignature::tensor(sa, sc), rng);
    CHECK(operator_norm(insert_unit_middle(w * v, mid) -
                        insert_unit_middle(w, mid) * insert_unit_middle(v, mid)) <
          1e-10 * (1 + operator_norm(w * v)));
    CHECK(operator_norm(insert_unit_middle(w.adjoint(), mid) -
                        insert_unit_middle(w, mid).adjoint()) < 1e-12);
    CHECK(operator_norm(insert_unit_middle(w, mid)) ==
          doctest::Approx(operator_norm(w)).epsilon(1e-10));

    CHECK_THROWS_AS(insert_unit_middle(AlgebraElement::unit(sa), mid), NotTwoFactor);
}

TEST_CASE("insert_unit_group handles multi-factor sides") {
    Rng rng(21);
    TensorSignature sa = TensorSignature({AlgebraSignature({1, 1}), AlgebraSignature({2})});
    TensorSignature sc = sig1({1, 1});
    TensorSignature mid = sig1({2});
    AlgebraElement a = random_element(sa, rng);
    AlgebraElement c = random_element(sc, rng);
    AlgebraElement got = insert_unit_group(tensor(a, c), 2, mid);
    Matrix want = kron_oracle(kron_oracle(a.matrix(), Matrix::Identity(2, 2)), c.matrix());
    CHECK((got.matrix() - want).norm() < 1e-14);
    CHECK(got.sig().factor_count() == 4);
}

TEST_CASE("states pair with elements") {
    TensorSignature s = sig1({1, 1});
    State uniform = State::maximally_mixed(s);
    AlgebraElement a = testutil::diag_el(s, {2.0, 1.0});
    CHECK(apply_state(uniform, a).real() == doctest::Approx(1.5));
    CHECK(apply_state(uniform, AlgebraElement::unit(s)).real() == doctest::Approx(1.0));
    CHECK(apply_state(State::point_mass(s, 0), a).real() == doctest::Approx(2.0));

    // positivity of the pairing
    Rng rng(22);
    for (const auto& sig : sample_sigs()) {
        State mu = random_state(sig, rng);
        for (int k = 0; k < 20; ++k) {
            AlgebraElement g = random_element(sig, rng);
            CHECK(apply_state(mu, g.adjoint() * g).real() > -1e-10);
        }
    }

    Matrix bad = Matrix::Identity(2, 2); // trace 2
    CHECK_THROWS_AS(State(s, bad), StructureViolation);
    Matrix neg = Matrix::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    CHECK_THROWS_AS(State(s, neg), NotPositive);
}

TEST_CASE("partial_apply_left is the slice through the state") {
    Rng rng(23);
    TensorSignature sa = sig1({2});
    TensorSignature sb = sig1({1, 1});
    State mu = random_state(sa, rng);
    for (int k = 0; k < 15; ++k) {
        AlgebraElement a = random_element(sa, rng);
        AlgebraElement b = random_element(sb, rng);
        AlgebraElement got = partial_apply_left(mu, tensor(a, b));
        AlgebraElement want = apply_state(mu, a) * b;
        CHECK(operator_norm(got - want) < 1e-12 * (1 + operator_norm(want)));
        CHECK(got.sig() == sb);
    }

    // point state on C^2 (x) C picks the matching row of a diagonal tensor
    TensorSignature pair = TensorSignature::tensor(sb, sig1({1}));
    AlgebraElement d = testutil::diag_el(pair, {2.0, 1.0});
    AlgebraElement row = partial_apply_left(State::point_mass(sb, 0), d);
    CHECK(std::abs(row.matrix()(0, 0) - Complex(2, 0)) < 1e-14);
}

TEST_CASE("tensor_state multiplies on product elements") {
    Rng rng(24);
    TensorSignature sa = sig1({1, 1});
    TensorSignature sb = sig1({2});
    State mu = random_state(sa, rng);
    State nu = random_state(sb, rng);
    State both = tensor_state(mu, nu);
    CHECK(std::abs(both.density().trace() - Complex(1, 0)) < 1e-12);
    for (int k = 0; k < 15; ++k) {
        AlgebraElement a = random_element(sa, rng);
        AlgebraElement b = random_element(sb, rng);
        Complex got = apply_state(both, tensor(a, b));
        Complex want = apply_state(mu, a) * apply_state(nu, b);
        CHECK(std::abs(got - want) < 1e-12 * (1.0 + std::abs(want)));
    }
}

TEST_CASE("central elements are recognized") {
    TensorSignature comm = TensorSignature({AlgebraSignature({1, 1}), AlgebraSignature({1, 1, 1})});
    Rng rng(25);
    CHECK(is_central(random_element(comm, rng)));

    TensorSignature m2c = TensorSignature({AlgebraSignature({2}), AlgebraSignature({1})});
    CHECK(is_central(AlgebraElement::unit(m2c)));
    Matrix sw = Matrix::Zero(2, 2);
    sw(0, 1) = 1.0;
    sw(1, 0) = 1.0;
    CHECK(!is_central(AlgebraElement(m2c, sw)));
    CHECK(central_defect(AlgebraElement(m2c, sw)) > 0.5);
    // diagonal but unequal entries on an M2 leg is still non-central
    CHECK(!is_central(testutil::diag_el(m2c, {2.0, 1.0})));
}

TEST_CASE("scalar_distance spectral midrange") {
    TensorSignature s = sig1({1, 1});
    CHECK(scalar_distance(testutil::diag_el(s, {2.0, 1.0})) == doctest::Approx(0.5));
    CHECK(scalar_distance(AlgebraElement::scalar(s, Complex(3.0, 0))) == doctest::Approx(0.0));
    CHECK(scalar_distance(testutil::diag_el(sig1({1, 1, 1}), {0.0, 1.0, 4.0})) ==
          doctest::Approx(2.0));
}
