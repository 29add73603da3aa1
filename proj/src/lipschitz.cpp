#include "mofkit/lipschitz.hpp"

#include <algorithm>
#include <cmath>

#include "mofkit/random.hpp"

namespace mofkit {

OperatorField::OperatorField(MofPtr m, std::vector<AlgebraElement> values)
    : mof_(std::move(m)), values_(std::move(values)) {
    if (!mof_) throw StructureViolation("field needs a mof space");
    if (static_cast<int>(values_.size()) != mof_->size())
        throw DimensionMismatch("field needs one value per point");
    for (int x = 0; x < mof_->size(); ++x)
        if (!(values_[x].sig() == mof_->fiber(x)))
            throw BundleMismatch("field value does not live on its fiber");
}

double OperatorField::sup_norm() const {
    double best = 0.0;
    for (const auto& v : values_) best = std::max(best, operator_norm(v));
    return best;
}

OperatorField OperatorField::adjoint() const {
    std::vector<AlgebraElement> vals;
    vals.reserve(values_.size());
    for (const auto& v : values_) vals.push_back(v.adjoint());
    return OperatorField(mof_, std::move(vals));
}

static void require_same_space(const OperatorField& f, const OperatorField& g) {
    if (f.mof_ptr().get() != g.mof_ptr().get())
        throw BundleMismatch("fields live over different spaces");
}

OperatorField operator+(const OperatorField& f, const OperatorField& g) {
    require_same_space(f, g);
    std::vector<AlgebraElement> vals;
    for (int x = 0; x < f.size(); ++x) vals.push_back(f.at(x) + g.at(x));
    return OperatorField(f.mof_ptr(), std::move(vals));
}

OperatorField operator-(const OperatorField& f, const OperatorField& g) {
    require_same_space(f, g);
    std::vector<AlgebraElement> vals;
    for (int x = 0; x < f.size(); ++x) vals.push_back(f.at(x) - g.at(x));
    return OperatorField(f.mof_ptr(), std::move(vals));
}

OperatorField operator*(const OperatorField& f, const OperatorField& g) {
    require_same_space(f, g);
    std::vector<AlgebraElement> vals;
    for (int x = 0; x < f.size(); ++x) vals.push_back(f.at(x) * g.at(x));
    return OperatorField(f.mof_ptr(), std::move(vals));
}

OperatorField operator*(Complex c, const OperatorField& f) {
    std::vector<AlgebraElement> vals;
    for (int x = 0; x < f.size(); ++x) vals.push_back(c * f.at(x));
    return OperatorField(f.mof_ptr(), std::move(vals));
}

int BiField::opair_index(int i, int j, int n) {
    return i * (n - 1) + (j > i ? j - 1 : j);
}

BiField::BiField(MofPtr m, std::vector<AlgebraElement> values)
    : mof_(std::move(m)), values_(std::move(values)) {
    if (!mof_) throw StructureViolation("bifield needs a mof space");
    const int n = mof_->size();
    if (static_cast<int>(values_.size()) != n * (n - 1))
        throw DimensionMismatch("bifield needs one value per ordered pair");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (!(values_[opair_index(i, j, n)].sig() == mof_->pair_sig(i, j)))
                throw BundleMismatch("bifield value does not live on its pair algebra");
        }
}

const AlgebraElement& BiField::at(int i, int j) const {
    if (i == j) throw SamePoint("bifields have no diagonal values");
    return values_[opair_index(i, j, mof_->size())];
}

double BiField::sup_norm() const {
    double best = 0.0;
    for (const auto& v : values_) best = std::max(best, operator_norm(v));
    return best;
}

BiField operator+(const BiField& a, const BiField& b) {
    if (a.mof_ptr().get() != b.mof_ptr().get())
        throw BundleMismatch("bifields live over different spaces");
    std::vector<AlgebraElement> vals;
    for (std::size_t t = 0; t < a.values_.size(); ++t)
        vals.push_back(a.values_[t] + b.values_[t]);
    return BiField(a.mof_ptr(), std::move(vals));
}

BiField operator-(const BiField& a, const BiField& b) {
    if (a.mof_ptr().get() != b.mof_ptr().get())
        throw BundleMismatch("bifields live over different spaces");
    std::vector<AlgebraElement> vals;
    for (std::size_t t = 0; t < a.values_.size(); ++t)
        vals.push_back(a.values_[t] - b.values_[t]);
    return BiField(a.mof_ptr(), std::move(vals));
}

int PairCache::slot(int i, int j) const {
    const int n = mof_->size();
    // unordered pairs i < j, row-major
    return i * n - i * (i + 1) / 2 + (j - i - 1);
}

PairCache::PairCache(MofPtr m) : mof_(std::move(m)) {
    const int n = mof_->size();
    d_.reserve(n * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            d_.push_back(mof_->d_stored(i, j));
            norm_.push_back(operator_norm(d_.back()));
            inv_.push_back(psd_power(d_.back(), -1.0, mof_->tol()));
            inv_sqrt_.push_back(psd_power(d_.back(), -0.5, mof_->tol()));
        }
}

const AlgebraElement& PairCache::d(int i, int j) const { return d_[slot(i, j)]; }
const AlgebraElement& PairCache::d_inv(int i, int j) const { return inv_[slot(i, j)]; }
const AlgebraElement& PairCache::d_inv_sqrt(int i, int j) const { return inv_sqrt_[slot(i, j)]; }
double PairCache::d_norm(int i, int j) const { return norm_[slot(i, j)]; }

AlgebraElement delta(const OperatorField& f, int x, int y) {
    if (x == y) throw SamePoint("delta needs two distinct points");
    const MofSpace& m = f.mof();
    return tensor(f.at(x), AlgebraElement::unit(m.fiber(y))) -
           tensor(AlgebraElement::unit(m.fiber(x)), f.at(y));
}

namespace {

// Commutation of f with D over one unordered pair, relative to
// tau_eq * (1 + ||D|| * ||f||).
double pair_commutator(const OperatorField& f, const PairCache& cache, int i, int j) {
    const MofSpace& m = f.mof();
    const AlgebraElement& dij = cache.d(i, j);
    const AlgebraElement left = tensor(f.at(i), AlgebraElement::unit(m.fiber(j)));
    const AlgebraElement right = tensor(AlgebraElement::unit(m.fiber(i)), f.at(j));
    double worst = 0.0;
    for (const AlgebraElement* a : {&left, &right}) {
        const double comm = operator_norm(dij * *a - *a * dij);
        const double scale = 1.0 + cache.d_norm(i, j) * operator_norm(*a);
        worst = std::max(worst, comm / scale);
    }
    return worst;
}

} // namespace

LipReport lip_seminorm(const OperatorField& f, const PairCache& cache) {
    const MofSpace& m = f.mof();
    const int n = m.size();
    LipReport r;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const AlgebraElement& s = cache.d_inv_sqrt(i, j);
            const double v = operator_norm(s * delta(f, i, j) * s);
            if (v > r.seminorm) {
                r.seminorm = v;
                r.arg_x = i;
                r.arg_y = j;
            }
            r.worst_commutator = std::max(r.worst_commutator, pair_commutator(f, cache, i, j));
        }
    r.commutes = r.worst_commutator <= m.tol().tau_eq;
    r.sup_norm = f.sup_norm();
    r.lip = r.seminorm + r.sup_norm;
    r.lip_prime = std::max(r.seminorm, r.sup_norm);
    return r;
}

LipReport lip_seminorm(const OperatorField& f) {
    return lip_seminorm(f, PairCache(f.mof_ptr()));
}

double lip_seminorm_ordered(const OperatorField& f, const PairCache& cache) {
    const MofSpace& m = f.mof();
    const int n = m.size();
    double best = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (pair_commutator(f, cache, i, j) > m.tol().tau_eq)
                throw NotCommuting("ordered seminorm needs a field commuting with D");
            const AlgebraElement& s = cache.d_inv_sqrt(i, j);
            best = std::max(best,
                            operator_norm(s * abs_element(delta(f, i, j), m.tol()) * s));
        }
    return best;
}

double lip_seminorm_ordered(const OperatorField& f) {
    return lip_seminorm_ordered(f, PairCache(f.mof_ptr()));
}

Membership membership(const OperatorField& f) {
    Membership out;
    out.report = lip_seminorm(f);
    out.in_l = std::isfinite(out.report.seminorm);
    out.in_lip = out.in_l && out.report.commutes;
    if (const auto base = f.mof().base_point()) {
        const bool vanishes =
            operator_norm(f.at(*base)) <= f.mof().tol().tau_eq;
        out.in_l0 = out.in_l && vanishes;
        out.in_lip0 = out.in_lip && vanishes;
    }
    return out;
}

OperatorField scalar_field(const MofPtr& m, const std::vector<Complex>& values) {
    if (static_cast<int>(values.size()) != m->size())
        throw DimensionMismatch("one scalar per point expected");
    std::vector<AlgebraElement> vals;
    vals.reserve(values.size());
    for (int x = 0; x < m->size(); ++x)
        vals.push_back(AlgebraElement::scalar(m->fiber(x), values[x]));
    return OperatorField(m, std::move(vals));
}

OperatorField distance_field(const MofPtr& m, int x0, const State& mu) {
    if (x0 < 0 || x0 >= m->size()) throw DimensionMismatch("base index out of range");
    if (!(mu.sig() == m->fiber(x0)))
        throw DimensionMismatch("state does not live on the fiber at the base");
    std::vector<AlgebraElement> vals;
    vals.reserve(m->size());
    for (int x = 0; x < m->size(); ++x) vals.push_back(partial_apply_left(mu, m->d(x0, x)));
    return OperatorField(m, std::move(vals));
}

namespace {

// Normalized trace over one support group: the point evaluations of the
// center of a fiber.
State group_trace_state(const TensorSignature& sig, int group) {
    const auto& idx = sig.groups()[group];
    Matrix rho = Matrix::Zero(sig.dim(), sig.dim());
    for (int p : idx) rho(p, p) = Complex(1.0 / static_cast<double>(idx.size()), 0.0);
    return State(sig, std::move(rho));
}

bool has_nonscalar_value(const OperatorField& f) {
    const ToleranceConfig& tol = f.mof().tol();
    for (int x = 0; x < f.size(); ++x)
        if (scalar_distance(f.at(x), tol) > tol.tau_eq * (1.0 + operator_norm(f.at(x))))
            return true;
    return false;
}

} // namespace

NonscalarWitness find_nonscalar_witness(const MofPtr& m) {
    if (!m->central()) throw NotCentral("witness search needs a central mof");
    if (m->scalar_valued()) throw AllScalar("every distance value is scalar");
    const int n = m->size();
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const AlgebraElement& w = m->d_stored(i, j);
            if (scalar_distance(w, m->tol()) <=
                m->tol().tau_eq * (1.0 + operator_norm(w)))
                continue;
            for (int side : {i, j}) {
                const TensorSignature& sig = m->fiber(side);
                for (int g = 0; g < sig.group_count(); ++g) {
                    State mu = group_trace_state(sig, g);
                    OperatorField f = distance_field(m, side, mu);
                    if (has_nonscalar_value(f))
                        return NonscalarWitness{side, std::move(mu), std::move(f)};
                }
            }
        }
    throw AllScalar("no central point evaluation separates the values");
}

ProductFieldReport field_D_on_product(const MofPtr& m) {
    if (m->size() < 2) throw TooFewPoints("the product construction needs two points");
    if (!m->central()) throw NotCentral("D over the product needs a central mof");
    MofPtr pm = std::make_shared<const MofSpace>(product_mof(*m, *m));
    const int n = m->size();
    std::vector<AlgebraElement> vals;
    vals.reserve(n * n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) vals.push_back(m->d(x, y));
    OperatorField f(pm, std::move(vals));
    LipReport report = lip_seminorm(f);
    return ProductFieldReport{std::move(pm), std::move(f), report};
}

double normal_spectral_seminorm(const OperatorField& f) {
    const MofSpace& m = f.mof();
    if (!m.scalar_valued())
        throw NotScalarMof("spectral seminorm needs a scalar-valued mof");
    const ToleranceConfig& tol = m.tol();
    std::vector<std::vector<Complex>> spectra;
    spectra.reserve(f.size());
    for (int x = 0; x < f.size(); ++x) {
        const AlgebraElement& v = f.at(x);
        const double nrm = operator_norm(v);
        if (operator_norm(v * v.adjoint() - v.adjoint() * v) >
            tol.tau_eq * (1.0 + nrm * nrm))
            throw NotNormal("spectral seminorm needs normal values");
        spectra.push_back(spectrum(v));
    }
    double best = 0.0;
    for (int i = 0; i < f.size(); ++i)
        for (int j = i + 1; j < f.size(); ++j) {
            const double dist = operator_norm(m.d_stored(i, j));
            for (const Complex a : spectra[i])
                for (const Complex b : spectra[j])
                    best = std::max(best, std::abs(a - b) / dist);
        }
    return best;
}

namespace {

AlgebraElement oriented_inv_sqrt(const PairCache& cache, int i, int j) {
    if (i < j) return cache.d_inv_sqrt(i, j);
    return flip_groups(cache.d_inv_sqrt(j, i),
                       cache.mof_ptr()->fiber(j).factor_count());
}

AlgebraElement oriented_inv(const PairCache& cache, int i, int j) {
    if (i < j) return cache.d_inv(i, j);
    return flip_groups(cache.d_inv(j, i), cache.mof_ptr()->fiber(j).factor_count());
}

} // namespace

BiField de_leeuw(const OperatorField& f, const PairCache& cache) {
    const int n = f.size();
    std::vector<AlgebraElement> vals;
    vals.reserve(n * (n - 1));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const AlgebraElement s = oriented_inv_sqrt(cache, i, j);
            vals.push_back(s * delta(f, i, j) * s);
        }
    return BiField(f.mof_ptr(), std::move(vals));
}

BiField de_leeuw(const OperatorField& f) { return de_leeuw(f, PairCache(f.mof_ptr())); }

BiField bimodule_act(const OperatorField& f, const BiField& big, Side side) {
    if (f.mof_ptr().get() != big.mof_ptr().get())
        throw BundleMismatch("field and bifield live over different spaces");
    const MofSpace& m = f.mof();
    const int n = m.size();
    std::vector<AlgebraElement> vals;
    vals.reserve(n * (n - 1));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (side == Side::left)
                vals.push_back(tensor(f.at(i), AlgebraElement::unit(m.fiber(j))) * big.at(i, j));
            else
                vals.push_back(big.at(i, j) * tensor(AlgebraElement::unit(m.fiber(i)), f.at(j)));
        }
    return BiField(f.mof_ptr(), std::move(vals));
}

double derivation_residual(const OperatorField& f, const OperatorField& g,
                           const PairCache& cache) {
    const BiField lhs = de_leeuw(f * g, cache);
    const BiField rhs = bimodule_act(f, de_leeuw(g, cache), Side::left) +
                        bimodule_act(g, de_leeuw(f, cache), Side::right);
    return (lhs - rhs).sup_norm();
}

WitnessCheck inner_witness_check(const MofPtr& m, int field_count, std::uint64_t seed) {
    PairCache cache(m);
    const int n = m->size();
    std::vector<AlgebraElement> inv_vals;
    inv_vals.reserve(n * (n - 1));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            inv_vals.push_back(oriented_inv(cache, i, j));
        }
    const BiField witness(m, std::move(inv_vals));
    Rng rng(seed);
    WitnessCheck out;
    out.field_count = field_count;
    for (int t = 0; t < field_count; ++t) {
        const OperatorField f = random_commuting_field(m, rng);
        const BiField lhs = de_leeuw(f, cache);
        const BiField rhs = bimodule_act(f, witness, Side::left) -
                            bimodule_act(f, witness, Side::right);
        out.max_residual = std::max(out.max_residual, (lhs - rhs).sup_norm());
    }
    return out;
}

IsometryCheck restriction_isometry_check(const MofPtr& m,
                                         const TensorSignature& fiber_at_infinity,
                                         int field_count, std::uint64_t seed) {
    MofPtr ext = std::make_shared<const MofSpace>(pointed_extension(*m, fiber_at_infinity));
    PairCache cache_up(ext), cache_down(m);
    Rng rng(seed);
    IsometryCheck out;
    out.field_count = field_count;
    for (int t = 0; t < field_count; ++t) {
        const OperatorField f = random_commuting_field(m, rng);
        std::vector<AlgebraElement> vals;
        for (int x = 0; x < m->size(); ++x) vals.push_back(f.at(x));
        vals.push_back(AlgebraElement::zero(fiber_at_infinity));
        const OperatorField g(ext, std::move(vals));
        const double upstairs = lip_seminorm(g, cache_up).seminorm;
        const LipReport down = lip_seminorm(f, cache_down);
        const double target = std::max(down.seminorm, down.sup_norm);
        out.max_residual = std::max(out.max_residual, std::abs(upstairs - target));
    }
    return out;
}

} // namespace mofkit
