#include "dicke/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace dicke {

double half_trace_norm(const DenseOperator& delta) {
    Eigen::SelfAdjointEigenSolver<DenseOperator> es(delta, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const DenseOperator& rho1, const DenseOperator& rho2) {
    if (rho1.rows() != rho2.rows() || rho1.cols() != rho2.cols())
        throw InvalidArgument("trace_distance: dimension mismatch");
    if (!is_hermitian(rho1, 1e-10) || !is_hermitian(rho2, 1e-10))
        throw InvalidArgument("trace_distance: inputs must be Hermitian");
    return half_trace_norm(rho1 - rho2);
}

std::string to_string(PairKind kind) {
    switch (kind) {
        case PairKind::canonical: return "canonical";
        case PairKind::random_pure: return "random";
        case PairKind::random_product: return "random_product";
    }
    return "unknown";
}

namespace {

Eigen::VectorXcd kron(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    Eigen::VectorXcd out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

Eigen::VectorXcd haar_vector(Eigen::Index dim, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        v(i) = {re, im};
    }
    return v / v.norm();
}

DenseOperator projector(const Eigen::VectorXcd& v) { return v * v.adjoint(); }

}  // namespace

StatePair canonical_pair(int n_emitters) {
    if (n_emitters < 1) throw InvalidArgument("canonical_pair: n_emitters must be >= 1");
    const double r = 1.0 / std::numbers::sqrt2;
    // single-emitter basis (|g>, |e>)
    Eigen::VectorXcd plus(2), minus(2);
    plus << r, r;
    minus << -r, r;
    Eigen::VectorXcd a = plus, b = minus;
    for (int j = 1; j < n_emitters; ++j) {
        a = kron(a, plus);
        b = kron(b, minus);
    }
    StatePair pair{projector(a), projector(b), PairKind::canonical, 0, n_emitters > 2};
    return pair;
}

StatePair random_pure_pair(int n_emitters, std::uint64_t seed) {
    if (n_emitters < 1) throw InvalidArgument("random_pure_pair: n_emitters must be >= 1");
    std::mt19937_64 rng(seed);
    const Eigen::Index dim = Eigen::Index{1} << n_emitters;
    const Eigen::VectorXcd a = haar_vector(dim, rng);
    const Eigen::VectorXcd b = haar_vector(dim, rng);
    return {projector(a), projector(b), PairKind::random_pure, seed, false};
}

StatePair random_product_pair(int n_emitters, std::uint64_t seed) {
    if (n_emitters < 1) throw InvalidArgument("random_product_pair: n_emitters must be >= 1");
    std::mt19937_64 rng(seed);
    Eigen::VectorXcd a = haar_vector(2, rng);
    for (int j = 1; j < n_emitters; ++j) a = kron(a, haar_vector(2, rng));
    Eigen::VectorXcd b = haar_vector(2, rng);
    for (int j = 1; j < n_emitters; ++j) b = kron(b, haar_vector(2, rng));
    return {projector(a), projector(b), PairKind::random_product, seed, false};
}

double positive_increment_sum(const std::vector<double>& distances, std::size_t stride) {
    double sum = 0.0;
    for (std::size_t i = stride; i < distances.size(); i += stride) {
        const double inc = distances[i] - distances[i - stride];
        if (inc > 0) sum += inc;
    }
    return sum;
}

double NonMarkovEvaluator::grid_dt(const FloquetBasis& basis, const GridSpec& grid, double omega0) {
    if (grid.steps_per_period < 1) throw InvalidArgument("steps_per_period must be >= 1");
    const double period = basis.driven ? basis.period() : 2.0 * std::numbers::pi / omega0;
    return period / grid.steps_per_period;
}

NonMarkovEvaluator::NonMarkovEvaluator(const FloquetBasis& basis, const SpaceConfig& space,
                                       const DissipatorData& dissipator, const GridSpec& grid, double omega0)
    : space_(space),
      dynamics_(basis, space, dissipator.rates, dissipator.coherence, grid_dt(basis, grid, omega0),
                grid.steps_per_period) {
    const double period = dynamics_.dt() * grid.steps_per_period;
    const double gap = relaxation_gap(dissipator.rates);
    const double cap = grid.max_periods * period;
    const double t_max = gap > 0 ? std::min(grid.horizon_factor / gap, cap) : cap;
    count_ = static_cast<std::size_t>(std::ceil(t_max / dynamics_.dt())) + 1;
}

NonMarkovResult NonMarkovEvaluator::evaluate(const StatePair& pair) const {
    const Eigen::Index e = space_.emitter_dim();
    if (pair.rho1.rows() != e || pair.rho2.rows() != e)
        throw InvalidArgument("NonMarkovEvaluator: pair dimension does not match the emitter space");
    DenseOperator vacuum = DenseOperator::Zero(space_.cavity_dim(), space_.cavity_dim());
    vacuum(0, 0) = 1.0;
    // The map is linear, so the difference of the two states is propagated once.
    const DenseOperator delta = embed_product(vacuum, pair.rho1 - pair.rho2);

    NonMarkovResult res;
    res.dt = dynamics_.dt();
    res.distances.resize(count_);
    dynamics_.run(delta, count_,
                  [&](std::size_t i, const DenseOperator& rho_x) { res.distances[i] = half_trace_norm(rho_x); });
    res.value = positive_increment_sum(res.distances);
    res.coarse_value = positive_increment_sum(res.distances, 2);
    res.grid_delta = std::abs(res.value - res.coarse_value);

    const std::size_t tail_start = count_ - count_ / 10;
    double tail = 0.0;
    for (std::size_t i = std::max<std::size_t>(tail_start, 1); i < count_; ++i)
        tail += std::max(0.0, res.distances[i] - res.distances[i - 1]);
    res.tail_fraction = res.value > 0 ? tail / res.value : 0.0;
    res.converged = res.value <= 1e-10 || res.tail_fraction <= 0.01;
    return res;
}

MaximizationResult maximize_nonmarkovianity(const NonMarkovEvaluator& evaluator, int n_samples, std::uint64_t seed,
                                            PairKind random_kind) {
    if (n_samples < 0) throw InvalidArgument("n_samples must be >= 0");
    MaximizationResult out;
    out.best_pair = canonical_pair(evaluator.n_emitters());
    const NonMarkovResult canonical = evaluator.evaluate(out.best_pair);
    out.best = canonical.value;
    out.samples.push_back({PairKind::canonical, 0, canonical.value, canonical.converged});
    for (int i = 0; i < n_samples; ++i) {
        const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
        StatePair pair = random_kind == PairKind::random_product ? random_product_pair(evaluator.n_emitters(), s)
                                                                 : random_pure_pair(evaluator.n_emitters(), s);
        const NonMarkovResult r = evaluator.evaluate(pair);
        out.samples.push_back({pair.kind, s, r.value, r.converged});
        if (r.value > out.best) {
            out.best = r.value;
            out.best_pair = std::move(pair);
        }
    }
    return out;
}

double delta_n(const MaximizationResult& driven, const MaximizationResult& undriven) {
    return std::abs(driven.best - undriven.best);
}

Eigen::VectorXcd coherent_vector(cplx alpha, int photon_cutoff) {
    Eigen::VectorXcd c(photon_cutoff + 1);
    c(0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n <= photon_cutoff; ++n) c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    return c;
}

double husimi_at(const DenseOperator& rho_cavity, cplx alpha) {
    const Eigen::VectorXcd c = coherent_vector(alpha, static_cast<int>(rho_cavity.rows()) - 1);
    return (c.adjoint() * rho_cavity * c)(0, 0).real();
}

HusimiField husimi(const DenseOperator& rho_cavity, const HusimiGrid& grid) {
    if (grid.n_re < 1 || grid.n_im < 1) throw InvalidArgument("husimi: grid must have at least one point");
    const int cutoff = static_cast<int>(rho_cavity.rows()) - 1;
    HusimiField field{grid, Eigen::MatrixXd(grid.n_re, grid.n_im),
                      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>(grid.n_re, grid.n_im)};
    for (int i = 0; i < grid.n_re; ++i)
        for (int j = 0; j < grid.n_im; ++j) {
            const cplx alpha{grid.re_at(i), grid.im_at(j)};
            field.q(i, j) = husimi_at(rho_cavity, alpha);
            field.trunc_ok(i, j) = std::norm(alpha) <= 0.5 * cutoff;
        }
    return field;
}

double HusimiField::normalization() const {
    const double dre = grid.n_re > 1 ? (grid.re_max - grid.re_min) / (grid.n_re - 1) : 0.0;
    const double dim = grid.n_im > 1 ? (grid.im_max - grid.im_min) / (grid.n_im - 1) : 0.0;
    return q.sum() * dre * dim / std::numbers::pi;
}

std::vector<Mode> detect_modes(const HusimiField& field) {
    const Eigen::MatrixXd& q = field.q;
    const double threshold = 0.05 * q.maxCoeff();
    struct Candidate {
        int i, j;
        double v;
    };
    std::vector<Candidate> cands;
    for (int i = 0; i < q.rows(); ++i)
        for (int j = 0; j < q.cols(); ++j) {
            const double v = q(i, j);
            if (v <= threshold) continue;
            bool is_max = true;
            for (int di = -1; di <= 1 && is_max; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    const int ii = i + di, jj = j + dj;
                    if (ii < 0 || jj < 0 || ii >= q.rows() || jj >= q.cols()) continue;
                    if (q(ii, jj) > v) {
                        is_max = false;
                        break;
                    }
                }
            if (is_max) cands.push_back({i, j, v});
        }
    // Plateaus produce adjacent candidates; keep the largest of each group.
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.v > b.v; });
    std::vector<Candidate> kept;
    for (const auto& c : cands) {
        const bool near = std::any_of(kept.begin(), kept.end(), [&](const Candidate& k) {
            return std::abs(k.i - c.i) <= 1 && std::abs(k.j - c.j) <= 1;
        });
        if (!near) kept.push_back(c);
    }
    std::vector<Mode> modes;
    for (const auto& k : kept) modes.push_back({field.grid.re_at(k.i), field.grid.im_at(k.j), k.v});
    return modes;
}

}  // namespace dicke
