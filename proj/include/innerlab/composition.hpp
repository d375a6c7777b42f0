#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "innerlab/mobius.hpp"
#include "innerlab/sequence.hpp"

namespace innerlab {

/// Immutable snapshot of a forward composition F_n = f_n o ... o f_1 driven
/// from an interior base point: the orbit F_k(z0), the hyperbolic
/// distortions lambda_k of f_k along it, and their running sum/product.
/// advance() returns a new snapshot; a state is never mutated in place.
struct CompositionState {
    std::complex<double> base_point{0.0, 0.0};
    std::vector<std::complex<double>> orbit;  // F_0(z0) = z0, ..., F_n(z0)
    std::vector<double> lambdas;              // lambda_1 .. lambda_n
    std::vector<double> one_minus_abs;        // 1 - |F_k(z0)|, k = 0..n
    double mu_sum = 0.0;                      // sum of mu_k = 1 - lambda_k
    double lambda_product = 1.0;              // prod of lambda_k

    static CompositionState initial(std::complex<double> z0 = 0.0);

    std::int64_t n() const { return static_cast<std::int64_t>(lambdas.size()); }
    std::complex<double> position() const { return orbit.back(); }
};

/// Extends the state by `steps` maps of the sequence. lambda_n is computed
/// from the distortion formula
///   lambda_n = (1 - |F_{n-1}|^2) |f_n'(F_{n-1})| / (1 - |F_n|^2),
/// never from finite differences. Throws PrecisionExhausted (reporting the
/// step) once the orbit is closer to the circle than doubles can resolve.
CompositionState advance(const CompositionState& state, const InnerMapSequence& seq,
                         std::int64_t steps);

struct ContractionReport {
    double lambda_product;
    double mu_sum;
    std::string verdict;  // finite-N trend only, never the limit property
};
ContractionReport contraction_report(const CompositionState& state);

/// Recentring of a sequence along its orbit: M_k(z) = (z + F_k(z0)) /
/// (1 + conj(F_k(z0)) z), and g_n = M_n^{-1} o f_n o M_{n-1} kept as a
/// composition chain. Each g_n fixes 0 and satisfies |g_n'(0)| = lambda_n.
struct Normalization {
    InnerMapSequence normalized;             // defined for n <= state.n()
    std::vector<MobiusAutomorphism> mobius;  // M_0 (identity) .. M_n
};
Normalization normalize(const InnerMapSequence& seq, const CompositionState& state);

enum class BlockVariant {
    kMaxLength,  // cut by partial sums of mu, pick the longest target arc
    kMinMu,      // cut by partial sums of |I_n|, pick the smallest mu
};

/// Cut points n_k and representatives m_k for the block-composition
/// argument. For kMaxLength, n_k is the least index with
/// mu_1 + ... + mu_{n_k} in [k, k+1) and m_k maximizes |I_n| on
/// [n_k, n_{k+1}); for kMinMu the cuts use partial sums of |I_n| (which must
/// stay below some c < 1) and m_k minimizes mu on [n_k, n_{k+1}-1). Ties go
/// to the smallest index.
struct BlockPartition {
    BlockVariant variant = BlockVariant::kMaxLength;
    std::vector<std::int64_t> ns;  // n_1 < n_2 < ...
    std::vector<std::int64_t> ms;  // m_1 .. m_{K-1} (m_k needs n_{k+1})
    // Per double block (m_{2k-2}, m_{2k}], with m_0 = 0:
    std::vector<double> block_mu_sums;
    std::vector<double> block_products;  // prod of lambda over the double block
};

/// Computes `blocks` cut points from the finite prefix of mu (and lengths,
/// required for kMinMu and for the m_k of kMaxLength; with no lengths given
/// every index ties and m_k = n_k). Throws HorizonError, carrying the number
/// realized, if the prefix is too short.
BlockPartition block_partition(std::span<const double> mu, std::span<const double> lengths,
                               BlockVariant variant, std::int64_t blocks);

/// The double-block maps g_k = f_{m_{2k}} o ... o f_{m_{2k-2}+1} as chains.
/// Every factor must fix 0 (ContractViolation otherwise). Verifies
/// |g_k'(0)| = prod lambda over the block and, when the block mu-sum is at
/// least 1, that the product is at most e^{-1}.
InnerMapSequence block_compose(const InnerMapSequence& seq, const BlockPartition& part);

}  // namespace innerlab
