#include "mofkit/continuous_field.hpp"

#include <algorithm>
#include <cmath>

namespace mofkit {

Cover::Cover(MofPtr m, std::vector<std::vector<int>> sets, Eigen::MatrixXd bumps)
    : mof_(std::move(m)), sets_(std::move(sets)), bumps_(std::move(bumps)) {
    if (!mof_) throw StructureViolation("cover needs a mof space");
    const int n = mof_->size();
    const int k = static_cast<int>(sets_.size());
    if (k == 0) throw PartitionInvalid("cover needs at least one set");
    if (bumps_.rows() != k || bumps_.cols() != n)
        throw DimensionMismatch("bump table shape does not match the cover");
    const double tau = mof_->tol().tau_eq;
    std::vector<char> inside(n);
    for (int i = 0; i < k; ++i) {
        std::fill(inside.begin(), inside.end(), 0);
        for (int x : sets_[i]) {
            if (x < 0 || x >= n) throw PartitionInvalid("cover set index out of range");
            inside[x] = 1;
        }
        for (int x = 0; x < n; ++x) {
            double& h = bumps_(i, x);
            if (h < -tau) throw PartitionInvalid("negative partition function");
            if (!inside[x] && h > tau)
                throw PartitionInvalid("partition function leaks outside its set");
            if (h < 0.0 || !inside[x]) h = 0.0;
        }
    }
    for (int x = 0; x < n; ++x) {
        const double s = bumps_.col(x).sum();
        if (std::abs(s - 1.0) > tau)
            throw PartitionInvalid("partition functions do not sum to 1");
    }
}

Cover ball_cover(const MofPtr& m, const std::vector<int>& centers, double radius) {
    if (radius <= 0.0) throw PartitionInvalid("ball cover needs a positive radius");
    if (centers.empty()) throw PartitionInvalid("ball cover needs at least one center");
    const Eigen::MatrixXd dist = induced_metric_norm(*m).values();
    const int n = m->size();
    const int k = static_cast<int>(centers.size());
    Eigen::MatrixXd bumps = Eigen::MatrixXd::Zero(k, n);
    std::vector<std::vector<int>> sets(k);
    for (int i = 0; i < k; ++i) {
        const int c = centers[i];
        if (c < 0 || c >= n) throw PartitionInvalid("ball center out of range");
        for (int x = 0; x < n; ++x) {
            const double h = 1.0 - dist(c, x) / radius;
            if (h > 0.0) {
                bumps(i, x) = h;
                sets[i].push_back(x);
            }
        }
    }
    for (int x = 0; x < n; ++x) {
        const double s = bumps.col(x).sum();
        if (s <= 0.0) throw PartitionInvalid("a point is not covered by any ball");
        bumps.col(x) /= s;
    }
    return Cover(m, std::move(sets), std::move(bumps));
}

Cover default_ball_cover(const MofPtr& m) {
    const Eigen::MatrixXd dist = induced_metric_norm(*m).values();
    const double diam = dist.maxCoeff();
    std::vector<int> centers(m->size());
    for (int x = 0; x < m->size(); ++x) centers[x] = x;
    return ball_cover(m, centers, diam > 0.0 ? diam / 2.0 : 1.0);
}

bool cstar_closure_membership(const OperatorField& g) {
    return lip_seminorm(g).commutes;
}

ContinuityCheck norm_continuity_check(const OperatorField& f, const PairCache& cache) {
    const MofSpace& m = f.mof();
    const LipReport rep = lip_seminorm(f, cache);
    if (!rep.commutes) throw NotCommuting("the modulus bound needs a commuting field");
    ContinuityCheck out;
    out.seminorm = rep.seminorm;
    std::vector<double> norms(f.size());
    for (int x = 0; x < f.size(); ++x) norms[x] = operator_norm(f.at(x));
    for (int i = 0; i < f.size(); ++i)
        for (int j = i + 1; j < f.size(); ++j) {
            const double bound = rep.seminorm * cache.d_norm(i, j);
            const double excess =
                (std::abs(norms[i] - norms[j]) - bound) / (1.0 + bound);
            if (excess > out.worst_excess) {
                out.worst_excess = excess;
                out.arg_x = i;
                out.arg_y = j;
            }
        }
    out.pass = out.worst_excess <= m.tol().tau_eq;
    return out;
}

ContinuityCheck norm_continuity_check(const OperatorField& f) {
    return norm_continuity_check(f, PairCache(f.mof_ptr()));
}

OperatorField glue(const Cover& cover, const std::vector<OperatorField>& local) {
    const MofPtr& m = cover.mof_ptr();
    if (static_cast<int>(local.size()) != cover.set_count())
        throw DimensionMismatch("one local field per cover set expected");
    for (const auto& f : local)
        if (f.mof_ptr().get() != m.get())
            throw BundleMismatch("local field lives over a different space");
    std::vector<AlgebraElement> vals;
    vals.reserve(m->size());
    for (int x = 0; x < m->size(); ++x) {
        AlgebraElement v = AlgebraElement::zero(m->fiber(x));
        for (int i = 0; i < cover.set_count(); ++i) {
            const double h = cover.bump(i, x);
            if (h > 0.0) v = v + h * local[i].at(x);
        }
        vals.push_back(std::move(v));
    }
    return OperatorField(m, std::move(vals));
}

GlueCheck glue_against(const Cover& cover, const std::vector<OperatorField>& local,
                       const OperatorField& target) {
    const MofPtr& m = cover.mof_ptr();
    if (target.mof_ptr().get() != m.get())
        throw BundleMismatch("target lives over a different space");
    GlueCheck out{glue(cover, local)};
    for (int i = 0; i < cover.set_count(); ++i)
        for (int x : cover.members(i))
            out.local_bound =
                std::max(out.local_bound, operator_norm(target.at(x) - local[i].at(x)));
    out.defect = (target - out.field).sup_norm();
    out.bound_ok = out.defect <= out.local_bound + m->tol().tau_eq;
    out.commutes = cstar_closure_membership(out.field);
    return out;
}

namespace {

OperatorField unit_field(const MofPtr& m) {
    std::vector<AlgebraElement> vals;
    vals.reserve(m->size());
    for (int x = 0; x < m->size(); ++x) vals.push_back(AlgebraElement::unit(m->fiber(x)));
    return OperatorField(m, std::move(vals));
}

// Products of generators and their adjoints, lengths 1..max_len, plus the
// unit. Grows as (2k)^max_len; callers keep the generator list small.
std::vector<OperatorField> word_set(const MofPtr& m,
                                    const std::vector<OperatorField>& generators,
                                    int max_len) {
    std::vector<OperatorField> alphabet;
    for (const auto& g : generators) {
        alphabet.push_back(g);
        alphabet.push_back(g.adjoint());
    }
    std::vector<OperatorField> words;
    words.push_back(unit_field(m));
    std::size_t level_begin = 0, level_end = words.size();
    for (int len = 1; len <= max_len; ++len) {
        for (const auto& a : alphabet)
            for (std::size_t t = level_begin; t < level_end; ++t)
                words.push_back(a * words[t]);
        level_begin = level_end;
        level_end = words.size();
    }
    return words;
}

} // namespace

FieldAlgebraProbe dixmier_probe(const MofPtr& m,
                                const std::vector<OperatorField>& generators, double eps,
                                const std::vector<OperatorField>& probes, const Cover& cover,
                                int max_word_len) {
    PairCache cache(m);
    FieldAlgebraProbe out;
    out.eps = eps;
    out.unit_member = cstar_closure_membership(unit_field(m));

    const std::vector<OperatorField> words = word_set(m, generators, max_word_len);
    out.words_checked = static_cast<int>(words.size());
    for (const auto& w : words) {
        try {
            const ContinuityCheck c = norm_continuity_check(w, cache);
            out.worst_continuity_excess = std::max(out.worst_continuity_excess, c.worst_excess);
            if (!c.pass) out.norm_continuity = false;
        } catch (const NotCommuting&) {
            // the word leaves the commutant, so the modulus bound is void
            out.norm_continuity = false;
        }
    }

    for (const auto& g : probes) {
        ProbeOutcome po;
        std::vector<OperatorField> local;
        for (int i = 0; i < cover.set_count(); ++i) {
            double best = -1.0;
            std::size_t best_w = 0;
            for (std::size_t t = 0; t < words.size(); ++t) {
                double d = 0.0;
                for (int x : cover.members(i))
                    d = std::max(d, operator_norm(g.at(x) - words[t].at(x)));
                if (best < 0.0 || d < best) {
                    best = d;
                    best_w = t;
                }
            }
            po.local_defect = std::max(po.local_defect, best);
            local.push_back(words[best_w]);
        }
        const GlueCheck gc = glue_against(cover, local, g);
        po.glue_defect = gc.defect;
        po.defect_bound_ok = gc.bound_ok;
        po.glued_member = gc.commutes;
        po.approximable = po.local_defect <= eps;
        po.member = cstar_closure_membership(g);
        po.consistent = !po.approximable || po.member;
        if (!po.consistent || !po.defect_bound_ok) out.local_to_global = false;
        out.probes.push_back(std::move(po));
    }
    return out;
}

FieldAlgebraProbe dixmier_probe(const MofPtr& m,
                                const std::vector<OperatorField>& generators, double eps,
                                int max_word_len) {
    return dixmier_probe(m, generators, eps, generators, default_ball_cover(m), max_word_len);
}

NontrivialityCertificate nontriviality_certificate(const MofPtr& m) {
    NontrivialityCertificate out{find_nonscalar_witness(m)};
    out.member = cstar_closure_membership(out.witness.field);
    for (int x = 0; x < m->size(); ++x)
        out.distance =
            std::max(out.distance, scalar_distance(out.witness.field.at(x), m->tol()));
    return out;
}

} // namespace mofkit
