#pragma once

#include <cstdint>
#include <optional>

#include "mofkit/mof.hpp"

namespace mofkit {

// Section of the bundle: one algebra element over each point.
class OperatorField {
public:
    OperatorField(MofPtr m, std::vector<AlgebraElement> values);

    const MofSpace& mof() const { return *mof_; }
    const MofPtr& mof_ptr() const { return mof_; }
    int size() const { return static_cast<int>(values_.size()); }
    const AlgebraElement& at(int x) const { return values_[x]; }
    double sup_norm() const;

    OperatorField adjoint() const;
    friend OperatorField operator+(const OperatorField& f, const OperatorField& g);
    friend OperatorField operator-(const OperatorField& f, const OperatorField& g);
    friend OperatorField operator*(const OperatorField& f, const OperatorField& g);
    friend OperatorField operator*(Complex c, const OperatorField& f);

private:
    MofPtr mof_;
    std::vector<AlgebraElement> values_;
};

// Section over ordered off-diagonal pairs, the carrier of the de Leeuw map.
class BiField {
public:
    BiField(MofPtr m, std::vector<AlgebraElement> values);

    static int opair_index(int i, int j, int n); // i != j
    const MofSpace& mof() const { return *mof_; }
    const MofPtr& mof_ptr() const { return mof_; }
    const AlgebraElement& at(int i, int j) const;
    double sup_norm() const;

    friend BiField operator+(const BiField& a, const BiField& b);
    friend BiField operator-(const BiField& a, const BiField& b);

private:
    MofPtr mof_;
    std::vector<AlgebraElement> values_;
};

struct LipReport {
    double seminorm = 0.0;
    double sup_norm = 0.0;
    double lip = 0.0;       // sup + seminorm
    double lip_prime = 0.0; // max(sup, seminorm)
    bool commutes = true;
    double worst_commutator = 0.0; // relative
    int arg_x = -1, arg_y = -1;    // unordered pair attaining the seminorm
};

// Inverse square roots and inverses of the off-diagonal distances, shared
// across repeated seminorm evaluations over the same space.
class PairCache {
public:
    explicit PairCache(MofPtr m);

    const MofPtr& mof_ptr() const { return mof_; }
    const AlgebraElement& d(int i, int j) const;
    const AlgebraElement& d_inv(int i, int j) const;
    const AlgebraElement& d_inv_sqrt(int i, int j) const;
    double d_norm(int i, int j) const;

private:
    MofPtr mof_;
    std::vector<AlgebraElement> d_, inv_, inv_sqrt_;
    std::vector<double> norm_;
    int slot(int i, int j) const; // i < j
};

// f(x) (x) 1 - 1 (x) f(x'). Throws SamePoint when x == x'.
AlgebraElement delta(const OperatorField& f, int x, int y);

LipReport lip_seminorm(const OperatorField& f);
LipReport lip_seminorm(const OperatorField& f, const PairCache& cache);

// Least r with |delta| <= r D per pair, for fields commuting with D.
// Throws NotCommuting otherwise.
double lip_seminorm_ordered(const OperatorField& f);
double lip_seminorm_ordered(const OperatorField& f, const PairCache& cache);

struct Membership {
    bool in_l = false;
    bool in_lip = false;
    std::optional<bool> in_l0;   // set only when the space has a base point
    std::optional<bool> in_lip0;
    LipReport report;
};
Membership membership(const OperatorField& f);

OperatorField scalar_field(const MofPtr& m, const std::vector<Complex>& values);

// x |-> (mu (x) id) D(x0, x) for a state mu on the fiber at x0.
OperatorField distance_field(const MofPtr& m, int x0, const State& mu);

struct NonscalarWitness {
    int point;
    State state;
    OperatorField field;
};
// Central point evaluation whose distance field has a non-scalar value.
// Throws AllScalar when D is scalar valued, NotCentral when D is not central.
NonscalarWitness find_nonscalar_witness(const MofPtr& m);

struct ProductFieldReport {
    MofPtr product;
    OperatorField field; // (x, y) |-> D(x, y) over the product space
    LipReport report;
};
ProductFieldReport field_D_on_product(const MofPtr& m);

// Lipschitz seminorm of a normal field over a scalar-valued mof through
// spectral pairs: max |lambda - lambda'| / d(x, x').
double normal_spectral_seminorm(const OperatorField& f);

// De Leeuw map: (x, x') |-> D^{-1/2} (f(x) (x) 1 - 1 (x) f(x')) D^{-1/2}.
BiField de_leeuw(const OperatorField& f);
BiField de_leeuw(const OperatorField& f, const PairCache& cache);

enum class Side { left, right };
BiField bimodule_act(const OperatorField& f, const BiField& big, Side side);

// sup norm of Phi(fg) - f.Phi(g) - Phi(f).g.
double derivation_residual(const OperatorField& f, const OperatorField& g,
                           const PairCache& cache);

struct WitnessCheck {
    double max_residual = 0.0;
    int field_count = 0;
};
// Phi(f) = f.F - F.f with F = D^{-1} over a suite of commuting fields.
WitnessCheck inner_witness_check(const MofPtr& m, int field_count, std::uint64_t seed);

struct IsometryCheck {
    double max_residual = 0.0;
    int field_count = 0;
};
// Extends commuting fields by zero past the one-point extension and compares
// the extended seminorm with max(seminorm, sup norm) downstairs.
IsometryCheck restriction_isometry_check(const MofPtr& m,
                                         const TensorSignature& fiber_at_infinity,
                                         int field_count, std::uint64_t seed);

} // namespace mofkit
