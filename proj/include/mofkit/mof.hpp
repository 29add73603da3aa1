#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mofkit/algebra.hpp"

namespace mofkit {

// Symmetric nonnegative table with zero diagonal; the carrier for ordinary
// metrics (inputs of the scalar/quotient builders, outputs of the induced
// metrics).
class MetricTable {
public:
    explicit MetricTable(Eigen::MatrixXd values, double tol = 1e-12);

    int size() const { return static_cast<int>(values_.rows()); }
    double operator()(int i, int j) const { return values_(i, j); }
    const Eigen::MatrixXd& values() const { return values_; }

    // Worst triangle-inequality violation, 0 when the table is a metric.
    double triangle_violation() const;
    // Smallest off-diagonal entry (positivity of distances).
    double min_offdiagonal() const;
    bool is_metric(double tol) const;
    void require_metric(double tol) const; // throws MetricAxiomViolation

private:
    Eigen::MatrixXd values_;
};

struct AxiomCheck {
    bool pass = true;
    double violation = 0.0;           // relative magnitude of the worst defect
    std::array<int, 3> where = {-1, -1, -1};
    std::string detail;
};

struct AxiomReport {
    AxiomCheck diagonal_state_zero;        // states annihilate the diagonal, PSD, non-invertible
    AxiomCheck offdiagonal_positive;       // positive invertible off the diagonal
    AxiomCheck flip_symmetry;              // D(x,x') equals the flip of D(x',x)
    AxiomCheck tensor_triangle;            // middle-unit triangle inequality

    bool pass() const;
    double worst_violation() const;
};

// Metric operator field over a finite point set. D is stored one-sided
// (index(x) <= index(x'), diagonal included); the other orientation is the
// flip, synthesized on demand. Values are immutable after construction.
class MofSpace {
public:
    MofSpace(std::vector<std::string> point_ids,
             std::vector<TensorSignature> bundle,
             std::vector<AlgebraElement> d_upper, // pair-major over i <= j
             std::vector<State> states,
             std::optional<int> base_point = {},
             ToleranceConfig tol = {});

    int size() const { return static_cast<int>(points_.size()); }
    const std::vector<std::string>& point_ids() const { return points_; }
    int index_of(const std::string& id) const; // -1 when absent
    const TensorSignature& fiber(int i) const { return bundle_[i]; }
    const State& metric_state(int i) const { return states_[i]; }
    std::optional<int> base_point() const { return base_; }
    const ToleranceConfig& tol() const { return tol_; }

    // D(i, j) in either orientation.
    AlgebraElement d(int i, int j) const;
    const AlgebraElement& d_stored(int i, int j) const; // requires i <= j
    // Signature of A_i (x) A_j.
    TensorSignature pair_sig(int i, int j) const;

    bool central() const { return central_; }
    bool scalar_valued() const { return scalar_; }
    double sup_norm() const { return sup_norm_; } // max ||D(x,x')|| over stored pairs

    static int upper_index(int i, int j, int n); // storage slot for i <= j

private:
    std::vector<std::string> points_;
    std::vector<TensorSignature> bundle_;
    std::vector<AlgebraElement> d_;
    std::vector<State> states_;
    std::optional<int> base_;
    ToleranceConfig tol_;
    bool central_ = false;
    bool scalar_ = false;
    double sup_norm_ = 0.0;
};

using MofPtr = std::shared_ptr<const MofSpace>;

// Axiom verification; the triple loop may be split across jobs threads.
AxiomReport verify_mof(const MofSpace& m, int jobs = 1);

// Induced ordinary metrics.
MetricTable induced_metric_states(const MofSpace& m); // pairings under the stored states
MetricTable induced_metric_norm(const MofSpace& m);   // operator norms off the diagonal

// Builders.
MofSpace scalar_mof(std::vector<std::string> point_ids,
                    std::vector<TensorSignature> bundle,
                    const MetricTable& distances,
                    std::vector<State> states,
                    ToleranceConfig tol = {});

MofSpace combine_linear(const MofSpace& a, const MofSpace& b, double r);
MofSpace combine_p(const MofSpace& a, const MofSpace& b, double p);
MofSpace product_mof(const MofSpace& a, const MofSpace& b);
MofSpace rescale(const MofSpace& m, double c);

// One-point extension: a new point at infinity with unit distance to every
// original point. Requires sup_norm() <= 2; the new point carries the
// maximally mixed state and becomes the base point.
MofSpace pointed_extension(const MofSpace& m, const TensorSignature& fiber_at_infinity);

// Quotient-style instance: a finite base set with a metric, partitioned
// into classes; the fiber over a class represents functions on the class
// through a diagonal projection for each member. With no embedding given,
// the class of size k gets the commutative fiber C^k. Metric states are
// point evaluations at the first member of each class.
struct ClassEmbedding {
    AlgebraSignature fiber;                 // total_dim >= class size
    std::vector<int> positions_per_member;  // diagonal positions owned by each member
};

MofSpace build_quotient_example(const MetricTable& base_metric,
                                const std::vector<std::vector<int>>& classes,
                                const std::vector<std::optional<ClassEmbedding>>& embeddings = {},
                                std::vector<std::string> class_ids = {},
                                ToleranceConfig tol = {});

// Staircase instance: class n samples the segment {1/n} x [0, 1/n] with
// mesh+1 evenly spaced points, plus the singleton class at the origin;
// distances are Euclidean in the plane.
MofSpace build_staircase_example(int n_max, int mesh, ToleranceConfig tol = {});

} // namespace mofkit
