#include "mofkit/prob_metric.hpp"

#include <algorithm>
#include <cmath>

namespace mofkit {

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> raw, double value_tol,
                                 double weight_tol, double mass_tol)
    : value_tol_(value_tol), weight_tol_(weight_tol) {
    if (value_tol <= 0.0 || weight_tol <= 0.0)
        throw StructureViolation("measure tolerances must be positive");
    double total = 0.0;
    for (auto& a : raw) {
        if (a.weight < -mass_tol)
            throw StructureViolation("measure atom with negative weight");
        a.weight = std::max(a.weight, 0.0);
        if (a.value < -value_tol)
            throw NotPositive("measure atom with negative value");
        a.value = std::max(a.value, 0.0);
        total += a.weight;
    }
    if (std::abs(total - 1.0) > mass_tol)
        throw StructureViolation("measure mass is not 1");

    std::sort(raw.begin(), raw.end(),
              [](const Atom& a, const Atom& b) { return a.value < b.value; });
    // greedy clustering against the cluster start, no chaining
    std::size_t t = 0;
    while (t < raw.size()) {
        std::size_t u = t;
        double w = 0.0, wv = 0.0;
        while (u < raw.size() && raw[u].value - raw[t].value <= value_tol) {
            w += raw[u].weight;
            wv += raw[u].weight * raw[u].value;
            ++u;
        }
        double v = w > 0.0 ? wv / w : raw[t].value;
        if (w > weight_tol) atoms_.push_back({v, w});
        t = u;
    }
}

DiscreteMeasure DiscreteMeasure::point(double value) {
    return DiscreteMeasure({{value, 1.0}}, 1e-8 * (1.0 + std::abs(value)));
}

double DiscreteMeasure::total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight;
    return s;
}

double DiscreteMeasure::mean() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight * a.value;
    return s;
}

double DiscreteMeasure::ess_sup() const {
    return atoms_.empty() ? 0.0 : atoms_.back().value;
}

double DiscreteMeasure::discrepancy(const DiscreteMeasure& other) const {
    const double vtol = std::max(value_tol_, other.value_tol_);
    struct Tagged {
        double value, weight;
        int side;
    };
    std::vector<Tagged> all;
    for (const auto& a : atoms_) all.push_back({a.value, a.weight, 0});
    for (const auto& a : other.atoms_) all.push_back({a.value, a.weight, 1});
    std::sort(all.begin(), all.end(),
              [](const Tagged& a, const Tagged& b) { return a.value < b.value; });
    double worst = 0.0;
    std::size_t t = 0;
    while (t < all.size()) {
        std::size_t u = t;
        double w[2] = {0.0, 0.0};
        while (u < all.size() && all[u].value - all[t].value <= vtol) {
            w[all[u].side] += all[u].weight;
            ++u;
        }
        worst = std::max(worst, std::abs(w[0] - w[1]));
        t = u;
    }
    return worst;
}

ProbMetric::ProbMetric(std::vector<std::string> point_ids, std::vector<DiscreteMeasure> table)
    : points_(std::move(point_ids)), table_(std::move(table)) {
    const std::size_t n = points_.size();
    if (n == 0) throw TooFewPoints("a measure table needs at least one point");
    if (table_.size() != n * n)
        throw DimensionMismatch("measure table needs one entry per ordered pair");
}

DiscreteMeasure spectral_measure(const AlgebraElement& a, const State& mu,
                                 const ToleranceConfig& tol) {
    if (!(a.sig() == mu.sig()))
        throw DimensionMismatch("state and element live on different algebras");
    if (!is_positive(a, tol))
        throw NotPositive("spectral measures are defined for PSD elements");
    const double value_tol = tol.tau_eq * (1.0 + operator_norm(a));

    std::vector<DiscreteMeasure::Atom> raw;
    raw.reserve(a.dim());
    for (const auto& idx : a.sig().groups()) {
        const int k = static_cast<int>(idx.size());
        Matrix sub(k, k), rho(k, k);
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < k; ++c) {
                sub(r, c) = a.matrix()(idx[r], idx[c]);
                rho(r, c) = mu.density()(idx[r], idx[c]);
            }
        sub = ((sub + sub.adjoint()) / 2.0).eval();
        Eigen::SelfAdjointEigenSolver<Matrix> es(sub);
        for (int i = 0; i < k; ++i) {
            const auto v = es.eigenvectors().col(i);
            raw.push_back({es.eigenvalues()(i), (v.adjoint() * rho * v)(0, 0).real()});
        }
    }
    return DiscreteMeasure(std::move(raw), value_tol, kWeightTol,
                           std::max(tol.tau_eq, 1e-8));
}

ProbMetric prob_metric(const MofSpace& m) {
    const int n = m.size();
    std::vector<DiscreteMeasure> table;
    table.reserve(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            table.push_back(spectral_measure(
                m.d(i, j), tensor_state(m.metric_state(i), m.metric_state(j)), m.tol()));
    return ProbMetric(m.point_ids(), std::move(table));
}

bool PmReport::pass() const {
    return diagonal_delta_zero.pass && offdiagonal_spread.pass && swap_symmetry.pass &&
           sup_triangle.pass;
}

double PmReport::worst_violation() const {
    return std::max(
        std::max(diagonal_delta_zero.violation, offdiagonal_spread.violation),
        std::max(swap_symmetry.violation, sup_triangle.violation));
}

PmReport verify_pm(const ProbMetric& p, const ToleranceConfig& tol) {
    const int n = p.size();
    PmReport out;

    out.diagonal_delta_zero.detail = "diagonal measures are point masses at 0";
    for (int x = 0; x < n; ++x) {
        const DiscreteMeasure& mx = p.at(x, x);
        double off = 0.0;
        for (const auto& a : mx.atoms())
            if (a.weight > mx.weight_tol()) off = std::max(off, a.value);
        if (off > out.diagonal_delta_zero.violation) {
            out.diagonal_delta_zero.violation = off;
            out.diagonal_delta_zero.where = {x, x, -1};
        }
        if (off > mx.value_tol()) out.diagonal_delta_zero.pass = false;
    }

    out.offdiagonal_spread.detail = "off-diagonal measures put weight above 0";
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const DiscreteMeasure& mij = p.at(i, j);
            const double slack = mij.value_tol() - mij.ess_sup();
            if (slack > 0.0) {
                out.offdiagonal_spread.pass = false;
                if (slack > out.offdiagonal_spread.violation) {
                    out.offdiagonal_spread.violation = slack;
                    out.offdiagonal_spread.where = {i, j, -1};
                }
            }
        }

    out.swap_symmetry.detail = "measures agree under pair swap";
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double disc = p.at(i, j).discrepancy(p.at(j, i));
            if (disc > out.swap_symmetry.violation) {
                out.swap_symmetry.violation = disc;
                out.swap_symmetry.where = {i, j, -1};
            }
            if (disc > tol.tau_eq) out.swap_symmetry.pass = false;
        }

    out.sup_triangle.detail = "essential suprema satisfy the triangle inequality";
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const double lhs = p.at(i, k).ess_sup();
                const double gap =
                    (lhs - p.at(i, j).ess_sup() - p.at(j, k).ess_sup()) / (1.0 + lhs);
                if (gap > out.sup_triangle.violation) {
                    out.sup_triangle.violation = gap;
                    out.sup_triangle.where = {i, j, k};
                }
                if (gap > tol.tau_eq) out.sup_triangle.pass = false;
            }

    return out;
}

} // namespace mofkit
