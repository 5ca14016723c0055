#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "vlc/channel.hpp"
#include "vlc/model.hpp"

namespace vlc {

// Gaussian tail probability P(Z > x).
double q_function(double x);

// Pairs whose distance is within d_min*(1+tol) count as nearest neighbours.
inline constexpr double kNeighborTol = 1e-3;

// labels[i] is the Nb-bit word carried by point i.
struct BitMapping {
    int Nb = 0;
    std::vector<std::uint32_t> labels;
    double lambda = 0.0;   // mean Hamming distance over nearest-neighbour pairs
    double cost = 0.0;     // switching cost at the N0 used to build it
    int swaps = 0;
};

// Index -> binary word, the starting point for tests and decoupled links.
BitMapping natural_mapping(const Constellation& c);

// sum over ordered pairs p != q of Q(d_pq / sqrt(2 N0)) * hamming(b_p, b_q).
double switching_cost(const Constellation& c, std::span<const std::uint32_t> labels, double N0);

// Mean Hamming distance between the labels of nearest-neighbour pairs.
double neighbor_lambda(const Constellation& c, std::span<const std::uint32_t> labels,
                       double neighbor_tol = kNeighborTol);

// Greedy binary switching from a random bijection: each round applies the
// single label swap with the largest cost decrease, stopping at a local
// minimum.
BitMapping bsa_optimize(const Constellation& c, double N0, std::mt19937_64& rng,
                        double neighbor_tol = kNeighborTol);

// Unordered pairs at (near) minimum distance.
std::size_t neighbor_pairs(const Constellation& c, double neighbor_tol = kNeighborTol);

// (2 N_n / Nc) Q(sqrt(d_min^2 / (2 N0))). Not clamped to 1.
double union_bound_ser(const Constellation& c, double N0, double neighbor_tol = kNeighborTol);

// lambda / Nb * P_es.
double union_bound_ber(double ser, double lambda, int Nb);

// The bound above written for additive noise of variance sigma2 per
// dimension, i.e. evaluated at N0 = 2 sigma2, which makes each pairwise term
// the exact binary error probability Q(d / (2 sigma)).
double union_bound_ser_variance(const Constellation& c, double sigma2,
                                double neighbor_tol = kNeighborTol);

// Full pairwise BER bound (1/(Nc Nb)) sum_{p != q} Q(d_pq/(2 sigma)) hamming,
// for noise variance sigma2.
double pairwise_ber_bound(const Constellation& c, std::span<const std::uint32_t> labels,
                          double sigma2);

// Full pairwise SER bound (1/Nc) sum_{p != q} Q(d_pq/(2 sigma)), for noise
// variance sigma2.
double pairwise_ser_bound(const Constellation& c, double sigma2);

// 10 log10(s.s / (Nc N0)).
double snr_db(const Constellation& c, double N0);
// N0 giving the requested SNR.
double n0_for_snr(const Constellation& c, double snr);

// Mean symbol energy of three independent per-color links.
double decoupled_energy(std::span<const Constellation, 3> colors);

struct LinkStats {
    std::uint64_t symbols_sent = 0;
    std::uint64_t symbol_errors = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t bits_sent = 0;
    double ser = 0.0;
    double ber = 0.0;
    double ser_halfwidth = 0.0;  // 95% Wilson half-width
    double ber_halfwidth = 0.0;
    double N0 = 0.0;             // noise variance per dimension
    double snr_db = 0.0;
};

// Half-width of the Wilson score interval for k successes in n trials.
double wilson_halfwidth(std::uint64_t k, std::uint64_t n, double z = 1.959963984540054);

// Monte Carlo link with noise N(0, N0 I) added in coefficient space and
// nearest-point detection. With a channel the transmitter precodes, the
// channel mixes colors and the receiver post-equalizes before detection;
// without one the link is the identity. Trials are split into fixed chunks,
// each with its own stream derived from (seed, chunk), so results do not
// depend on the worker count.
LinkStats simulate_link(const Constellation& c, const BitMapping& mapping,
                        const CrosstalkChannel* channel, double N0, std::uint64_t n_symbols,
                        std::uint64_t seed);

// Three single-color links sharing one noise level; a symbol is in error if
// any color is, bits are concatenated.
LinkStats simulate_decoupled(std::span<const Constellation, 3> colors,
                             std::span<const BitMapping, 3> mappings, double N0,
                             std::uint64_t n_symbols, std::uint64_t seed);

}  // namespace vlc
