#pragma once

#include <cmath>
#include <memory>

#include "mofkit/random.hpp"

// Shared fixtures. The running example is the three-point line {0,1,2} with
// rho = |y - y'| glued into two classes {0,1} and {2}.
namespace testutil {

using namespace mofkit;

inline Matrix kron_oracle(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            for (int k = 0; k < b.rows(); ++k)
                for (int l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return out;
}

inline Eigen::MatrixXd line_metric() {
    Eigen::MatrixXd rho(3, 3);
    rho << 0, 1, 2,
           1, 0, 1,
           2, 1, 0;
    return rho;
}

inline MofPtr two_class_line() {
    return std::make_shared<const MofSpace>(
        build_quotient_example(MetricTable(line_metric()), {{0, 1}, {2}}));
}

// Same quotient but the two-member class carried on full M2 instead of
// C^2; the distances become diagonal matrices that are not central.
inline MofPtr two_class_line_m2() {
    ClassEmbedding emb{AlgebraSignature({2}), {0, 1}};
    return std::make_shared<const MofSpace>(
        build_quotient_example(MetricTable(line_metric()), {{0, 1}, {2}},
                               {emb, std::nullopt}));
}

inline AlgebraElement diag_el(const TensorSignature& sig, std::vector<double> v) {
    Matrix m = Matrix::Zero(sig.dim(), sig.dim());
    for (int i = 0; i < static_cast<int>(v.size()); ++i) m(i, i) = v[i];
    return AlgebraElement(sig, std::move(m));
}

// The function y -> y on the base set, pushed through the classes.
inline OperatorField identity_function_field(const MofPtr& m) {
    return OperatorField(m, {diag_el(m->fiber(0), {0.0, 1.0}),
                             diag_el(m->fiber(1), {2.0})});
}

inline double rel_gap(double a, double b) {
    return std::abs(a - b) / (1.0 + std::max(std::abs(a), std::abs(b)));
}

} // namespace testutil
