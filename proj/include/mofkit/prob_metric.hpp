#pragma once

#include "mofkit/mof.hpp"

namespace mofkit {

// Weight below which an atom is treated as numerical dust.
inline constexpr double kWeightTol = 1e-10;

// Finitely supported probability measure on [0, inf).
class DiscreteMeasure {
public:
    struct Atom {
        double value = 0.0;
        double weight = 0.0;
    };

    // Sorts, merges atoms whose values agree within value_tol, clamps small
    // negative values and weights, drops atoms at or below weight_tol.
    DiscreteMeasure(std::vector<Atom> raw, double value_tol,
                    double weight_tol = kWeightTol, double mass_tol = 1e-8);

    static DiscreteMeasure point(double value);

    const std::vector<Atom>& atoms() const { return atoms_; }
    double value_tol() const { return value_tol_; }
    double weight_tol() const { return weight_tol_; }

    double total_mass() const;
    double mean() const;
    // Largest value carrying weight above weight_tol; the least r with mass 1
    // on [0, r].
    double ess_sup() const;

    // Clusters the union of both supports, then returns the largest
    // per-cluster weight difference.
    double discrepancy(const DiscreteMeasure& other) const;

private:
    std::vector<Atom> atoms_;
    double value_tol_;
    double weight_tol_;
};

// Table of measures over all ordered pairs, diagonal included.
class ProbMetric {
public:
    ProbMetric(std::vector<std::string> point_ids, std::vector<DiscreteMeasure> table);

    int size() const { return static_cast<int>(points_.size()); }
    const std::vector<std::string>& point_ids() const { return points_; }
    const DiscreteMeasure& at(int i, int j) const { return table_[i * size() + j]; }

private:
    std::vector<std::string> points_;
    std::vector<DiscreteMeasure> table_;
};

// mu(E_a(.)) through the eigenprojections of a PSD element a. Atom values
// are clustered within tau_eq * (1 + ||a||).
DiscreteMeasure spectral_measure(const AlgebraElement& a, const State& mu,
                                 const ToleranceConfig& tol = {});

// P(i, j) = spectral measure of D(i, j) under mu_i (x) mu_j.
ProbMetric prob_metric(const MofSpace& m);

struct PmReport {
    AxiomCheck diagonal_delta_zero; // P(x, x) is the point mass at 0
    AxiomCheck offdiagonal_spread;  // P(x, x') has positive essential sup
    AxiomCheck swap_symmetry;       // P(x, x') equals P(x', x) atomwise
    AxiomCheck sup_triangle;        // ess_sup is a triangle-respecting table

    bool pass() const;
    double worst_violation() const;
};

PmReport verify_pm(const ProbMetric& p, const ToleranceConfig& tol = {});

} // namespace mofkit
