#include "innerlab/composition.hpp"

#include <cmath>
#include <memory>
#include <sstream>

namespace innerlab {

CompositionState CompositionState::initial(std::complex<double> z0) {
    if (std::abs(z0) >= 1.0)
        throw DomainError("CompositionState: base point must lie inside the disk");
    CompositionState s;
    s.base_point = z0;
    s.orbit = {z0};
    s.one_minus_abs = {1.0 - std::abs(z0)};
    return s;
}

CompositionState advance(const CompositionState& state, const InnerMapSequence& seq,
                         std::int64_t steps) {
    if (steps < 1) throw DomainError("advance: steps must be >= 1");
    CompositionState next = state;
    if (next.orbit.empty()) next = CompositionState::initial(state.base_point);
    next.orbit.reserve(next.orbit.size() + static_cast<std::size_t>(steps));
    next.lambdas.reserve(next.lambdas.size() + static_cast<std::size_t>(steps));

    for (std::int64_t i = 0; i < steps; ++i) {
        std::int64_t n = next.n() + 1;
        MapChain f = seq.at(n);
        std::complex<double> z_prev = next.orbit.back();
        std::complex<double> z = f.eval(z_prev);
        double abs_z = std::abs(z);
        if (abs_z >= 1.0 - kOrbitGuard) {
            std::ostringstream msg;
            msg << "advance: orbit within " << kOrbitGuard << " of the circle at step " << n;
            throw PrecisionExhausted(n, msg.str());
        }
        double lambda = (1.0 - std::norm(z_prev)) * std::abs(f.derivative(z_prev)) /
                        (1.0 - abs_z * abs_z);
        next.orbit.push_back(z);
        next.one_minus_abs.push_back(1.0 - abs_z);
        next.lambdas.push_back(lambda);
        next.mu_sum += 1.0 - lambda;
        next.lambda_product *= lambda;
    }
    return next;
}

ContractionReport contraction_report(const CompositionState& state) {
    ContractionReport r;
    r.lambda_product = state.lambda_product;
    r.mu_sum = state.mu_sum;
    std::ostringstream v;
    v.precision(6);
    v << "at N=" << state.n() << ": lambda product " << r.lambda_product << ", mu sum "
      << r.mu_sum;
    if (r.lambda_product < 1e-6)
        v << "; contracting trend";
    else if (r.mu_sum < 1e-9)
        v << "; no contraction observed (automorphism-like)";
    else
        v << "; contraction undecided at this horizon";
    r.verdict = v.str();
    return r;
}

Normalization normalize(const InnerMapSequence& seq, const CompositionState& state) {
    auto orbit = std::make_shared<std::vector<std::complex<double>>>(state.orbit);
    auto lambdas = std::make_shared<std::vector<double>>(state.lambdas);

    std::vector<MobiusAutomorphism> mobius;
    mobius.reserve(orbit->size());
    for (const auto& z : *orbit) mobius.push_back(MobiusAutomorphism::translation_to(z));

    auto ms = std::make_shared<std::vector<MobiusAutomorphism>>(mobius);
    InnerMapSequence normalized(
        [seq, orbit, lambdas, ms](std::int64_t n) -> MapChain {
            if (n > static_cast<std::int64_t>(lambdas->size()))
                throw DomainError("normalize: state not advanced far enough for this index");
            const MobiusAutomorphism& m_prev = (*ms)[static_cast<std::size_t>(n - 1)];
            const MobiusAutomorphism& m_cur = (*ms)[static_cast<std::size_t>(n)];
            MapChain g = MapChain(to_blaschke(m_prev))
                             .then(seq.at(n))
                             .then(MapChain(to_blaschke(m_cur.inverse())));
            std::complex<double> at0 = g.eval(0.0);
            if (std::abs(at0) > 1e-12)
                throw ContractViolation("normalize: g_n(0) differs from 0 beyond 1e-12");
            double d0 = std::abs(g.derivative(0.0));
            if (std::fabs(d0 - (*lambdas)[static_cast<std::size_t>(n - 1)]) > 1e-10)
                throw ContractViolation(
                    "normalize: |g_n'(0)| differs from lambda_n beyond 1e-10");
            return g;
        },
        seq.name().empty() ? "normalized" : seq.name() + ":normalized");

    return {std::move(normalized), std::move(mobius)};
}

BlockPartition block_partition(std::span<const double> mu, std::span<const double> lengths,
                               BlockVariant variant, std::int64_t blocks) {
    if (blocks < 1) throw DomainError("block_partition: need at least one block");
    if (!lengths.empty() && lengths.size() < mu.size())
        throw ConstructionError("block_partition: lengths prefix shorter than mu prefix");
    if (variant == BlockVariant::kMinMu) {
        if (lengths.empty())
            throw ConstructionError("block_partition: kMinMu needs target lengths");
        for (double l : lengths)
            if (l >= 1.0)
                throw ConstructionError("block_partition: kMinMu requires |I_n| <= c < 1");
    }

    BlockPartition part;
    part.variant = variant;

    // Cut positions: least n with the cumulative sum reaching k. Increments
    // are at most 1 (mu <= 1; lengths < 1 by the kMinMu precondition), so
    // the sum at n_k automatically lands in [k, k+1).
    std::span<const double> cut_by = (variant == BlockVariant::kMaxLength) ? mu : lengths;
    double sum = 0.0;
    std::int64_t k = 1;
    for (std::size_t i = 0; i < cut_by.size() && k <= blocks; ++i) {
        sum += cut_by[i];
        if (sum >= static_cast<double>(k)) {
            part.ns.push_back(static_cast<std::int64_t>(i) + 1);
            ++k;
        }
    }
    if (static_cast<std::int64_t>(part.ns.size()) < blocks) {
        std::ostringstream msg;
        msg << "block_partition: horizon " << mu.size() << " realizes only "
            << part.ns.size() << " of " << blocks << " blocks";
        throw HorizonError(static_cast<std::int64_t>(part.ns.size()), msg.str());
    }

    // Representatives m_k in [n_k, n_{k+1}) (kMaxLength) or
    // [n_k, n_{k+1}-1) (kMinMu); ties to the smallest index.
    for (std::size_t j = 0; j + 1 < part.ns.size(); ++j) {
        std::int64_t lo = part.ns[j];
        std::int64_t hi = (variant == BlockVariant::kMaxLength) ? part.ns[j + 1]
                                                                : part.ns[j + 1] - 1;
        if (lo >= hi)
            throw ConstructionError("block_partition: empty representative range");
        std::int64_t best = lo;
        for (std::int64_t n = lo + 1; n < hi; ++n) {
            std::size_t idx = static_cast<std::size_t>(n - 1);
            if (variant == BlockVariant::kMaxLength) {
                if (!lengths.empty() && lengths[idx] > lengths[static_cast<std::size_t>(best - 1)])
                    best = n;
            } else {
                if (mu[idx] < mu[static_cast<std::size_t>(best - 1)]) best = n;
            }
        }
        part.ms.push_back(best);
    }

    // Double blocks (m_{2k-2}, m_{2k}], with m_0 = 0.
    for (std::size_t j = 1; 2 * j <= part.ms.size(); ++j) {
        std::int64_t lo = (j == 1) ? 0 : part.ms[2 * (j - 1) - 1];
        std::int64_t hi = part.ms[2 * j - 1];
        double msum = 0.0, prod = 1.0;
        for (std::int64_t n = lo + 1; n <= hi; ++n) {
            msum += mu[static_cast<std::size_t>(n - 1)];
            prod *= 1.0 - mu[static_cast<std::size_t>(n - 1)];
        }
        part.block_mu_sums.push_back(msum);
        part.block_products.push_back(prod);
    }
    return part;
}

InnerMapSequence block_compose(const InnerMapSequence& seq, const BlockPartition& part) {
    std::int64_t nblocks = static_cast<std::int64_t>(part.ms.size()) / 2;
    if (nblocks < 1)
        throw ConstructionError("block_compose: partition has no complete double block");
    auto ms = std::make_shared<std::vector<std::int64_t>>(part.ms);
    auto products = std::make_shared<std::vector<double>>(part.block_products);
    auto mu_sums = std::make_shared<std::vector<double>>(part.block_mu_sums);

    return InnerMapSequence(
        [seq, ms, products, mu_sums, nblocks](std::int64_t k) -> MapChain {
            if (k < 1 || k > nblocks)
                throw DomainError("block_compose: block index out of range");
            std::int64_t lo = (k == 1) ? 0 : (*ms)[static_cast<std::size_t>(2 * k - 3)];
            std::int64_t hi = (*ms)[static_cast<std::size_t>(2 * k - 1)];
            MapChain g;
            for (std::int64_t n = lo + 1; n <= hi; ++n) {
                MapChain f = seq.at(n);
                if (!f.all_factors_centered())
                    throw ContractViolation("block_compose: map does not fix 0");
                g = g.then(f);
            }
            double d0 = std::abs(g.derivative(0.0));
            double expected = (*products)[static_cast<std::size_t>(k - 1)];
            if (std::fabs(d0 - expected) > 1e-10)
                throw ContractViolation("block_compose: |g_k'(0)| differs from block product");
            if ((*mu_sums)[static_cast<std::size_t>(k - 1)] >= 1.0 &&
                d0 > std::exp(-1.0) + 1e-10)
                throw ContractViolation("block_compose: block product above e^{-1}");
            return g;
        },
        "blocks");
}

}  // namespace innerlab
