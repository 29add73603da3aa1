#pragma once

#include <random>

#include "mofkit/lipschitz.hpp"

namespace mofkit {

using Rng = std::mt19937_64;

// Complex Gaussian entries on the block support.
AlgebraElement random_element(const TensorSignature& sig, Rng& rng);
AlgebraElement random_hermitian(const TensorSignature& sig, Rng& rng);
AlgebraElement random_normal_element(const TensorSignature& sig, Rng& rng);
// Random element of the tensor product of the factor centers.
AlgebraElement random_central_element(const TensorSignature& sig, Rng& rng);
AlgebraElement random_diagonal_element(const TensorSignature& sig, Rng& rng);
State random_state(const TensorSignature& sig, Rng& rng);

std::vector<Complex> random_scalar_values(int n, Rng& rng);
std::vector<double> random_real_values(int n, Rng& rng);

OperatorField random_field(const MofPtr& m, Rng& rng);
// Commutes with D: arbitrary values over a central mof, central values
// otherwise.
OperatorField random_commuting_field(const MofPtr& m, Rng& rng);
OperatorField random_normal_field(const MofPtr& m, Rng& rng);
OperatorField random_diagonal_field(const MofPtr& m, Rng& rng);

// Random finite metric: symmetric positive weights closed under shortest
// paths.
Eigen::MatrixXd random_metric(int n, Rng& rng);

} // namespace mofkit
