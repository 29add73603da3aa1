#include "mofkit/mof.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>

namespace mofkit {

MetricTable::MetricTable(Eigen::MatrixXd values, double tol) : values_(std::move(values)) {
    const int n = static_cast<int>(values_.rows());
    if (values_.cols() != n) throw DimensionMismatch("metric table must be square");
    const double scale = 1.0 + values_.cwiseAbs().maxCoeff();
    for (int i = 0; i < n; ++i) {
        if (std::abs(values_(i, i)) > tol * scale)
            throw MetricAxiomViolation("metric table has a nonzero diagonal entry");
        values_(i, i) = 0.0;
        for (int j = 0; j < n; ++j) {
            if (std::abs(values_(i, j) - values_(j, i)) > tol * scale)
                throw MetricAxiomViolation("metric table is not symmetric");
            if (values_(i, j) < -tol * scale)
                throw MetricAxiomViolation("metric table has a negative entry");
        }
    }
    values_ = (0.5 * (values_ + values_.transpose())).cwiseMax(0.0).eval();
    for (int i = 0; i < n; ++i) values_(i, i) = 0.0;
}

double MetricTable::triangle_violation() const {
    const int n = size();
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                worst = std::max(worst, values_(i, k) - values_(i, j) - values_(j, k));
    return std::max(0.0, worst);
}

double MetricTable::min_offdiagonal() const {
    const int n = size();
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) lo = std::min(lo, values_(i, j));
    return n > 1 ? lo : 0.0;
}

bool MetricTable::is_metric(double tol) const {
    if (size() > 1 && min_offdiagonal() <= tol) return false;
    return triangle_violation() <= tol;
}

void MetricTable::require_metric(double tol) const {
    if (size() > 1 && min_offdiagonal() <= tol)
        throw MetricAxiomViolation("distinct points at distance zero");
    if (triangle_violation() > tol)
        throw MetricAxiomViolation("triangle inequality fails in metric table");
}

bool AxiomReport::pass() const {
    return diagonal_state_zero.pass && offdiagonal_positive.pass && flip_symmetry.pass &&
           tensor_triangle.pass;
}

double AxiomReport::worst_violation() const {
    return std::max({diagonal_state_zero.violation, offdiagonal_positive.violation,
                     flip_symmetry.violation, tensor_triangle.violation});
}

int MofSpace::upper_index(int i, int j, int n) {
    return i * n - i * (i - 1) / 2 + (j - i);
}

MofSpace::MofSpace(std::vector<std::string> point_ids, std::vector<TensorSignature> bundle,
                   std::vector<AlgebraElement> d_upper, std::vector<State> states,
                   std::optional<int> base_point, ToleranceConfig tol)
    : points_(std::move(point_ids)),
      bundle_(std::move(bundle)),
      d_(std::move(d_upper)),
      states_(std::move(states)),
      base_(base_point),
      tol_(tol) {
    tol_.validate();
    const int n = size();
    if (n == 0) throw TooFewPoints("a mof space needs at least one point");
    if (std::set<std::string>(points_.begin(), points_.end()).size() != points_.size())
        throw StructureViolation("duplicate point ids");
    if (static_cast<int>(bundle_.size()) != n || static_cast<int>(states_.size()) != n)
        throw DimensionMismatch("bundle/state family size does not match the point set");
    if (static_cast<int>(d_.size()) != n * (n + 1) / 2)
        throw DimensionMismatch("one-sided distance table has the wrong size");
    if (base_ && (*base_ < 0 || *base_ >= n))
        throw NoBasePoint("base point index out of range");
    for (int i = 0; i < n; ++i)
        if (!(states_[i].sig() == bundle_[i]))
            throw BundleMismatch("metric state does not live on its fiber");
    central_ = true;
    scalar_ = true;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const AlgebraElement& w = d_[upper_index(i, j, n)];
            if (!(w.sig() == pair_sig(i, j)))
                throw BundleMismatch("distance value does not live on its pair algebra");
            const double nrm = operator_norm(w);
            sup_norm_ = std::max(sup_norm_, nrm);
            if (central_ && central_defect(w) > tol_.tau_eq * (1.0 + nrm)) central_ = false;
            if (scalar_) {
                const Complex c = w.matrix().trace() / static_cast<double>(w.dim());
                if (operator_norm(w - AlgebraElement::scalar(w.sig(), c)) >
                    tol_.tau_eq * (1.0 + nrm))
                    scalar_ = false;
            }
        }
}

int MofSpace::index_of(const std::string& id) const {
    const auto it = std::find(points_.begin(), points_.end(), id);
    return it == points_.end() ? -1 : static_cast<int>(it - points_.begin());
}

const AlgebraElement& MofSpace::d_stored(int i, int j) const {
    return d_[upper_index(i, j, size())];
}

AlgebraElement MofSpace::d(int i, int j) const {
    if (i <= j) return d_stored(i, j);
    return flip_groups(d_stored(j, i), bundle_[j].factor_count());
}

TensorSignature MofSpace::pair_sig(int i, int j) const {
    return TensorSignature::tensor(bundle_[i], bundle_[j]);
}

namespace {

struct Worst {
    double violation = 0.0;
    bool pass = true;
    std::array<int, 3> where = {-1, -1, -1};
    std::string detail;

    void record(double v, bool ok, std::array<int, 3> at, const char* what) {
        if (v > violation || (!ok && pass)) {
            violation = std::max(violation, v);
            where = at;
            detail = what;
        }
        if (!ok) pass = false;
    }

    void merge(const Worst& o) {
        if (o.violation > violation) {
            violation = o.violation;
            where = o.where;
            detail = o.detail;
        }
        pass = pass && o.pass;
    }

    AxiomCheck check() const { return AxiomCheck{pass, violation, where, detail}; }
};

} // namespace

AxiomReport verify_mof(const MofSpace& m, int jobs) {
    const int n = m.size();
    const ToleranceConfig& tol = m.tol();
    AxiomReport report;

    Worst diag;
    for (int x = 0; x < n; ++x) {
        const AlgebraElement& dxx = m.d_stored(x, x);
        const double scale = 1.0 + operator_norm(dxx);
        const double herm = hermitian_defect(dxx);
        diag.record(herm / scale, herm <= tol.tau_psd * scale, {x, x, -1},
                    "diagonal not Hermitian");
        if (herm <= tol.tau_psd * scale) {
            const double lo = min_eigenvalue(dxx);
            diag.record(std::max(0.0, -lo) / scale, lo >= -tol.tau_psd * scale, {x, x, -1},
                        "diagonal not positive");
            const double t_inv = tol.tau_inv * scale;
            diag.record(std::max(0.0, lo - t_inv) / scale, lo < t_inv, {x, x, -1},
                        "diagonal is invertible");
        }
        const State pair = tensor_state(m.metric_state(x), m.metric_state(x));
        const double pairing = std::abs(apply_state(pair, dxx));
        diag.record(pairing / scale, pairing <= tol.tau_eq * scale, {x, x, -1},
                    "state does not annihilate the diagonal");
    }
    report.diagonal_state_zero = diag.check();

    Worst off;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const AlgebraElement& dij = m.d_stored(i, j);
            const double scale = 1.0 + operator_norm(dij);
            const double herm = hermitian_defect(dij);
            off.record(herm / scale, herm <= tol.tau_psd * scale, {i, j, -1},
                       "off-diagonal not Hermitian");
            if (herm <= tol.tau_psd * scale) {
                const double lo = min_eigenvalue(dij);
                const double t_inv = tol.tau_inv * scale;
                off.record(std::max(0.0, t_inv - lo) / scale, lo > 0.0 && lo >= t_inv,
                           {i, j, -1}, "off-diagonal not positive invertible");
            }
        }
    report.offdiagonal_positive = off.check();

    Worst sym;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const AlgebraElement w = m.d(i, j);
            const AlgebraElement back = flip_groups(m.d(j, i), m.fiber(j).factor_count());
            const double scale = 1.0 + operator_norm(w);
            const double gap = operator_norm(w - back);
            sym.record(gap / scale, gap <= tol.tau_eq * scale, {i, j, -1},
                       "flip symmetry fails");
        }
    report.flip_symmetry = sym.check();

    Worst tri;
    auto check_triple = [&](int t, Worst& acc) {
        const int i = t / (n * n), j = (t / n) % n, k = t % n;
        const AlgebraElement lhs =
            insert_unit_group(m.d(i, k), m.fiber(i).factor_count(), m.fiber(j));
        const AlgebraElement rhs = tensor(m.d(i, j), AlgebraElement::unit(m.fiber(k))) +
                                   tensor(AlgebraElement::unit(m.fiber(i)), m.d(j, k));
        const AlgebraElement slack = rhs - lhs;
        const double scale = 1.0 + operator_norm(rhs);
        const double lo = min_eigenvalue(slack);
        acc.record(std::max(0.0, -lo) / scale, lo >= -tol.tau_psd * scale, {i, j, k},
                   "tensor triangle inequality fails");
    };
    const int triples = n * n * n;
    if (jobs <= 1) {
        for (int t = 0; t < triples; ++t) check_triple(t, tri);
    } else {
        const int workers = std::min(jobs, triples);
        std::vector<Worst> parts(workers);
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (int t = w; t < triples; t += workers) check_triple(t, parts[w]);
            });
        for (auto& th : pool) th.join();
        for (const auto& p : parts) tri.merge(p);
    }
    report.tensor_triangle = tri.check();
    return report;
}

MetricTable induced_metric_states(const MofSpace& m) {
    const int n = m.size();
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const State pair = tensor_state(m.metric_state(i), m.metric_state(j));
            const Complex v = apply_state(pair, m.d_stored(i, j));
            if (std::abs(v.imag()) > m.tol().tau_eq * (1.0 + std::abs(v)))
                throw MetricAxiomViolation("state pairing is not real");
            if (i == j) {
                if (std::abs(v) > m.tol().tau_eq)
                    throw MetricAxiomViolation("diagonal pairing is nonzero");
                continue;
            }
            t(i, j) = t(j, i) = v.real();
        }
    MetricTable table(std::move(t), m.tol().tau_eq);
    table.require_metric(m.tol().tau_eq);
    return table;
}

MetricTable induced_metric_norm(const MofSpace& m) {
    const int n = m.size();
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) t(i, j) = t(j, i) = operator_norm(m.d_stored(i, j));
    MetricTable table(std::move(t), m.tol().tau_eq);
    table.require_metric(m.tol().tau_eq);
    return table;
}

MofSpace scalar_mof(std::vector<std::string> point_ids, std::vector<TensorSignature> bundle,
                    const MetricTable& distances, std::vector<State> states,
                    ToleranceConfig tol) {
    const int n = static_cast<int>(point_ids.size());
    if (distances.size() != n || static_cast<int>(bundle.size()) != n)
        throw DimensionMismatch("metric table does not match the point set");
    distances.require_metric(tol.tau_eq);
    std::vector<AlgebraElement> d;
    d.reserve(n * (n + 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            TensorSignature pair = TensorSignature::tensor(bundle[i], bundle[j]);
            d.push_back(distances(i, j) * AlgebraElement::unit(pair));
        }
    return MofSpace(std::move(point_ids), std::move(bundle), std::move(d), std::move(states),
                    {}, tol);
}

namespace {

void require_same_layout(const MofSpace& a, const MofSpace& b) {
    if (a.point_ids() != b.point_ids())
        throw BundleMismatch("operand mofs have different point sets");
    for (int i = 0; i < a.size(); ++i)
        if (!(a.fiber(i) == b.fiber(i)))
            throw BundleMismatch("operand mofs have different bundles");
}

// States are reused from the first operand, so the new diagonal must still
// be annihilated by them.
void require_diagonal_annihilated(const MofSpace& m) {
    for (int x = 0; x < m.size(); ++x) {
        const State pair = tensor_state(m.metric_state(x), m.metric_state(x));
        const AlgebraElement& dxx = m.d_stored(x, x);
        if (std::abs(apply_state(pair, dxx)) >
            m.tol().tau_eq * (1.0 + operator_norm(dxx)))
            throw MetricAxiomViolation("reused states do not annihilate the new diagonal");
    }
}

std::vector<State> copy_states(const MofSpace& m) {
    std::vector<State> s;
    s.reserve(m.size());
    for (int i = 0; i < m.size(); ++i) s.push_back(m.metric_state(i));
    return s;
}

} // namespace

MofSpace combine_linear(const MofSpace& a, const MofSpace& b, double r) {
    if (!(r > 0)) throw StructureViolation("combine_linear needs r > 0");
    require_same_layout(a, b);
    const int n = a.size();
    std::vector<AlgebraElement> d;
    d.reserve(n * (n + 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) d.push_back(r * a.d_stored(i, j) + b.d_stored(i, j));
    std::vector<TensorSignature> bundle;
    for (int i = 0; i < n; ++i) bundle.push_back(a.fiber(i));
    MofSpace out(a.point_ids(), std::move(bundle), std::move(d), copy_states(a),
                 a.base_point(), a.tol());
    require_diagonal_annihilated(out);
    return out;
}

MofSpace combine_p(const MofSpace& a, const MofSpace& b, double p) {
    if (!(p >= 1.0)) throw StructureViolation("combine_p needs p >= 1");
    require_same_layout(a, b);
    if (!a.central() || !b.central())
        throw NotCentral("combine_p needs central operands");
    const int n = a.size();
    std::vector<AlgebraElement> d;
    d.reserve(n * (n + 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            AlgebraElement sum = psd_power(a.d_stored(i, j), p, a.tol()) +
                                 psd_power(b.d_stored(i, j), p, a.tol());
            d.push_back(psd_power(sum, 1.0 / p, a.tol()));
        }
    std::vector<TensorSignature> bundle;
    for (int i = 0; i < n; ++i) bundle.push_back(a.fiber(i));
    MofSpace out(a.point_ids(), std::move(bundle), std::move(d), copy_states(a),
                 a.base_point(), a.tol());
    require_diagonal_annihilated(out);
    return out;
}

MofSpace product_mof(const MofSpace& a, const MofSpace& b) {
    const int na = a.size(), nb = b.size();
    std::vector<std::string> ids;
    std::vector<TensorSignature> bundle;
    std::vector<State> states;
    ids.reserve(na * nb);
    for (int x = 0; x < na; ++x)
        for (int y = 0; y < nb; ++y) {
            ids.push_back(a.point_ids()[x] + "|" + b.point_ids()[y]);
            bundle.push_back(TensorSignature::tensor(a.fiber(x), b.fiber(y)));
            states.push_back(tensor_state(a.metric_state(x), b.metric_state(y)));
        }
    const int n = na * nb;
    std::vector<AlgebraElement> d;
    d.reserve(n * (n + 1) / 2);
    for (int u = 0; u < n; ++u) {
        const int x = u / nb, y = u % nb;
        for (int v = u; v < n; ++v) {
            const int x2 = v / nb, y2 = v % nb;
            const AlgebraElement da = a.d(x, x2);
            const AlgebraElement db = b.d(y, y2);
            const AlgebraElement t1 =
                tensor(da, AlgebraElement::unit(TensorSignature::tensor(b.fiber(y), b.fiber(y2))));
            const AlgebraElement t2 =
                tensor(AlgebraElement::unit(TensorSignature::tensor(a.fiber(x), a.fiber(x2))), db);
            const int ka = a.fiber(x).factor_count(), ka2 = a.fiber(x2).factor_count();
            const int kb = b.fiber(y).factor_count(), kb2 = b.fiber(y2).factor_count();
            std::vector<int> perm;
            for (int f = 0; f < ka; ++f) perm.push_back(f);
            for (int f = 0; f < kb; ++f) perm.push_back(ka + ka2 + f);
            for (int f = 0; f < ka2; ++f) perm.push_back(ka + f);
            for (int f = 0; f < kb2; ++f) perm.push_back(ka + ka2 + kb + f);
            d.push_back(permute_factors(t1 + t2, perm));
        }
    }
    return MofSpace(std::move(ids), std::move(bundle), std::move(d), std::move(states), {},
                    a.tol());
}

MofSpace rescale(const MofSpace& m, double c) {
    if (!(c > 0)) throw StructureViolation("rescale needs c > 0");
    const int n = m.size();
    std::vector<AlgebraElement> d;
    d.reserve(n * (n + 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) d.push_back(c * m.d_stored(i, j));
    std::vector<TensorSignature> bundle;
    for (int i = 0; i < n; ++i) bundle.push_back(m.fiber(i));
    return MofSpace(m.point_ids(), std::move(bundle), std::move(d), copy_states(m),
                    m.base_point(), m.tol());
}

MofSpace pointed_extension(const MofSpace& m, const TensorSignature& fiber_at_infinity) {
    if (m.sup_norm() > 2.0 * (1.0 + m.tol().tau_eq))
        throw NormBoundExceeded("one-point extension needs sup ||D|| <= 2");
    const int n = m.size();
    std::string inf_id = "inf";
    while (m.index_of(inf_id) >= 0) inf_id += "'";
    std::vector<std::string> ids = m.point_ids();
    ids.push_back(inf_id);
    std::vector<TensorSignature> bundle;
    for (int i = 0; i < n; ++i) bundle.push_back(m.fiber(i));
    bundle.push_back(fiber_at_infinity);
    std::vector<State> states = copy_states(m);
    states.push_back(State::maximally_mixed(fiber_at_infinity));
    std::vector<AlgebraElement> d;
    d.reserve((n + 1) * (n + 2) / 2);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) d.push_back(m.d_stored(i, j));
        d.push_back(AlgebraElement::unit(TensorSignature::tensor(m.fiber(i), fiber_at_infinity)));
    }
    d.push_back(AlgebraElement::zero(TensorSignature::tensor(fiber_at_infinity, fiber_at_infinity)));
    return MofSpace(std::move(ids), std::move(bundle), std::move(d), std::move(states), n,
                    m.tol());
}

MofSpace build_quotient_example(const MetricTable& base_metric,
                                const std::vector<std::vector<int>>& classes,
                                const std::vector<std::optional<ClassEmbedding>>& embeddings,
                                std::vector<std::string> class_ids, ToleranceConfig tol) {
    const int m = base_metric.size();
    const int n = static_cast<int>(classes.size());
    if (n == 0) throw TooFewPoints("quotient needs at least one class");
    base_metric.require_metric(tol.tau_eq);
    std::vector<int> seen(m, 0);
    for (const auto& cls : classes) {
        if (cls.empty()) throw InvalidPartition("empty class");
        for (int y : cls) {
            if (y < 0 || y >= m || seen[y]++) throw InvalidPartition("classes must partition the base set");
        }
    }
    if (std::count(seen.begin(), seen.end(), 1) != m)
        throw InvalidPartition("classes must cover the base set");
    if (!embeddings.empty() && static_cast<int>(embeddings.size()) != n)
        throw InvalidPartition("one embedding per class expected");
    if (class_ids.empty()) {
        for (int i = 0; i < n; ++i) class_ids.push_back("q" + std::to_string(i));
    } else if (static_cast<int>(class_ids.size()) != n) {
        throw DimensionMismatch("one id per class expected");
    }

    // Per class: fiber signature and the base-set member owning each
    // diagonal position.
    std::vector<TensorSignature> bundle;
    std::vector<std::vector<int>> member_at; // position -> member (index into the class)
    std::vector<State> states;
    for (int c = 0; c < n; ++c) {
        const int k = static_cast<int>(classes[c].size());
        AlgebraSignature fiber = AlgebraSignature(std::vector<int>(k, 1));
        std::vector<int> owner(k);
        for (int p = 0; p < k; ++p) owner[p] = p;
        if (!embeddings.empty() && embeddings[c]) {
            const ClassEmbedding& emb = *embeddings[c];
            fiber = emb.fiber;
            const int dim = fiber.total_dim();
            if (static_cast<int>(emb.positions_per_member.size()) != dim)
                throw InvalidPartition("embedding must assign every diagonal position");
            std::vector<int> counts(k, 0);
            for (int p = 0; p < dim; ++p) {
                if (emb.positions_per_member[p] < 0 || emb.positions_per_member[p] >= k)
                    throw InvalidPartition("embedding position owner out of range");
                ++counts[emb.positions_per_member[p]];
            }
            if (std::count(counts.begin(), counts.end(), 0) != 0)
                throw InvalidPartition("every class member needs a diagonal position");
            owner = emb.positions_per_member;
        }
        member_at.push_back(owner);
        TensorSignature sig{fiber};
        bundle.push_back(sig);
        const auto first = std::find(owner.begin(), owner.end(), 0);
        states.push_back(State::point_mass(sig, static_cast<int>(first - owner.begin())));
    }

    std::vector<AlgebraElement> d;
    d.reserve(n * (n + 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const int di = bundle[i].dim(), dj = bundle[j].dim();
            Matrix w = Matrix::Zero(di * dj, di * dj);
            for (int p = 0; p < di; ++p)
                for (int q = 0; q < dj; ++q) {
                    const int y = classes[i][member_at[i][p]];
                    const int y2 = classes[j][member_at[j][q]];
                    w(p * dj + q, p * dj + q) = Complex(base_metric(y, y2), 0.0);
                }
            d.emplace_back(TensorSignature::tensor(bundle[i], bundle[j]), std::move(w), tol);
        }
    return MofSpace(std::move(class_ids), std::move(bundle), std::move(d), std::move(states),
                    {}, tol);
}

MofSpace build_staircase_example(int n_max, int mesh, ToleranceConfig tol) {
    if (n_max < 1 || mesh < 1)
        throw StructureViolation("staircase needs n_max >= 1 and mesh >= 1");
    std::vector<double> xs, ys;
    std::vector<std::vector<int>> classes;
    std::vector<std::string> ids;
    for (int s = 1; s <= n_max; ++s) {
        std::vector<int> cls;
        for (int t = 0; t <= mesh; ++t) {
            cls.push_back(static_cast<int>(xs.size()));
            xs.push_back(1.0 / s);
            ys.push_back(static_cast<double>(t) / (static_cast<double>(mesh) * s));
        }
        classes.push_back(std::move(cls));
        ids.push_back(std::to_string(s));
    }
    classes.push_back({static_cast<int>(xs.size())});
    xs.push_back(0.0);
    ys.push_back(0.0);
    ids.push_back("inf");
    const int m = static_cast<int>(xs.size());
    Eigen::MatrixXd rho(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            rho(i, j) = std::hypot(xs[i] - xs[j], ys[i] - ys[j]);
    return build_quotient_example(MetricTable(std::move(rho)), classes, {}, std::move(ids), tol);
}

} // namespace mofkit
