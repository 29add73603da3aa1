#pragma once

#include "mofkit/lipschitz.hpp"

namespace mofkit {

// Partition of unity subordinate to explicit point subsets. bumps is a
// set_count x point_count matrix; column sums must be 1 and every bump must
// vanish outside its set.
class Cover {
public:
    Cover(MofPtr m, std::vector<std::vector<int>> sets, Eigen::MatrixXd bumps);

    const MofPtr& mof_ptr() const { return mof_; }
    int set_count() const { return static_cast<int>(sets_.size()); }
    const std::vector<int>& members(int i) const { return sets_[i]; }
    double bump(int i, int x) const { return bumps_(i, x); }

private:
    MofPtr mof_;
    std::vector<std::vector<int>> sets_;
    Eigen::MatrixXd bumps_;
};

// Balls of the given radius around the centers in (X, D^norm), with
// normalized tent bumps max(0, 1 - dist/radius). Throws PartitionInvalid
// when some point is not covered.
Cover ball_cover(const MofPtr& m, const std::vector<int>& centers, double radius);
// Balls around every point with radius half the diameter (1 when the
// diameter vanishes).
Cover default_ball_cover(const MofPtr& m);

// Membership in the uniform closure of the Lipschitz algebra. Over a finite
// point set the closure is the set of bounded fields commuting with D, so
// this is the commutation flag.
bool cstar_closure_membership(const OperatorField& g);

struct ContinuityCheck {
    double seminorm = 0.0;
    double worst_excess = 0.0; // relative overshoot of the modulus bound
    int arg_x = -1, arg_y = -1;
    bool pass = true;
};

// Quantitative continuity of x -> ||f(x)||: the difference over a pair is
// bounded by seminorm * ||D||. Throws NotCommuting for fields outside the
// commutant, where the bound is not guaranteed.
ContinuityCheck norm_continuity_check(const OperatorField& f);
ContinuityCheck norm_continuity_check(const OperatorField& f, const PairCache& cache);

// f(x) = sum_i bump(i, x) local[i](x).
OperatorField glue(const Cover& cover, const std::vector<OperatorField>& local);

struct GlueCheck {
    OperatorField field;
    double defect = 0.0;      // sup norm of target - glued field
    double local_bound = 0.0; // worst in-set defect of the local data
    bool bound_ok = true;     // defect <= local_bound + tau_eq
    bool commutes = true;
};

GlueCheck glue_against(const Cover& cover, const std::vector<OperatorField>& local,
                       const OperatorField& target);

struct ProbeOutcome {
    bool approximable = false;   // local defect within eps over every set
    bool member = false;         // probe commutes with D
    bool consistent = true;      // approximable implies member
    double local_defect = 0.0;   // worst best-word defect over the sets
    double glue_defect = 0.0;    // distance from the probe to the glued approximant
    bool defect_bound_ok = true; // glue_defect <= local_defect + tau_eq
    bool glued_member = true;    // glued approximant commutes with D
};

struct FieldAlgebraProbe {
    double eps = 0.0;
    int words_checked = 0;
    bool unit_member = false;   // the unit field belongs to the algebra
    bool norm_continuity = true; // every generated word passes the modulus bound
    double worst_continuity_excess = 0.0;
    bool local_to_global = true; // every probe outcome is consistent
    std::vector<ProbeOutcome> probes;

    bool pass() const { return unit_member && norm_continuity && local_to_global; }
};

// Finite surrogate of the continuous-field axioms: the unit is a member,
// words of the generators up to max_word_len have continuous norms, and
// probes that are locally approximable by words glue back into members.
FieldAlgebraProbe dixmier_probe(const MofPtr& m,
                                const std::vector<OperatorField>& generators, double eps,
                                const std::vector<OperatorField>& probes, const Cover& cover,
                                int max_word_len = 3);
// Default cover and the generators themselves as probes.
FieldAlgebraProbe dixmier_probe(const MofPtr& m,
                                const std::vector<OperatorField>& generators, double eps,
                                int max_word_len = 3);

struct NontrivialityCertificate {
    NonscalarWitness witness;
    bool member = false;   // the witness field lies in the closure
    double distance = 0.0; // worst pointwise distance from the scalars
};

// Certifies that the closure contains a non-scalar field: a distance field
// from a central point evaluation, checked for membership. Throws
// NotCentral or AllScalar.
NontrivialityCertificate nontriviality_certificate(const MofPtr& m);

} // namespace mofkit
