#include "vlc/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "vlc/constraints.hpp"
#include "vlc/simd.hpp"

namespace vlc {

namespace {

constexpr std::uint64_t kChunk = 1u << 15;

int hamming(std::uint32_t a, std::uint32_t b) { return std::popcount(a ^ b); }

std::vector<double> distance_table(const Constellation& c) {
    const int Nc = c.size();
    const auto D = static_cast<std::size_t>(c.dimension());
    const auto& k = simd::kernels();
    std::vector<double> d(static_cast<std::size_t>(Nc) * Nc, 0.0);
    for (int p = 0; p < Nc; ++p) {
        for (int q = p + 1; q < Nc; ++q) {
            const double v = std::sqrt(k.squared_distance(c.point(p).data(), c.point(q).data(), D));
            d[static_cast<std::size_t>(p) * Nc + q] = v;
            d[static_cast<std::size_t>(q) * Nc + p] = v;
        }
    }
    return d;
}

double min_of(const std::vector<double>& table, int Nc) {
    double best = std::numeric_limits<double>::infinity();
    for (int p = 0; p < Nc; ++p)
        for (int q = p + 1; q < Nc; ++q) best = std::min(best, table[static_cast<std::size_t>(p) * Nc + q]);
    return best;
}

int bits_for(int Nc) {
    if (Nc < 1 || !is_power_of_two(Nc)) throw std::invalid_argument("constellation size must be a power of two");
    return std::countr_zero(static_cast<unsigned>(Nc));
}

template <class Fn>
void parallel_chunks(std::uint64_t chunks, Fn&& fn) {
    const auto hw = std::max(1u, std::thread::hardware_concurrency());
    const auto workers = static_cast<unsigned>(std::min<std::uint64_t>(chunks, hw));
    if (workers <= 1) {
        for (std::uint64_t i = 0; i < chunks; ++i) fn(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::uint64_t i = next++; i < chunks; i = next++) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

std::mt19937_64 chunk_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t chunk) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(chunk),
                      static_cast<std::uint32_t>(chunk >> 32)};
    return std::mt19937_64(seq);
}

struct Counts {
    std::uint64_t symbols = 0;
    std::uint64_t symbol_errors = 0;
    std::uint64_t bit_errors = 0;
};

LinkStats finish(const Counts& total, int Nb, double N0, double energy) {
    LinkStats s;
    s.symbols_sent = total.symbols;
    s.symbol_errors = total.symbol_errors;
    s.bit_errors = total.bit_errors;
    s.bits_sent = total.symbols * static_cast<std::uint64_t>(Nb);
    s.ser = static_cast<double>(s.symbol_errors) / static_cast<double>(s.symbols_sent);
    s.ber = s.bits_sent == 0 ? 0.0 : static_cast<double>(s.bit_errors) / static_cast<double>(s.bits_sent);
    s.ser_halfwidth = wilson_halfwidth(s.symbol_errors, s.symbols_sent);
    s.ber_halfwidth = wilson_halfwidth(s.bit_errors, s.bits_sent);
    s.N0 = N0;
    s.snr_db = 10.0 * std::log10(energy / N0);
    return s;
}

double mean_energy(const Constellation& c) {
    const auto s = c.stacked();
    return std::inner_product(s.begin(), s.end(), s.begin(), 0.0) / c.size();
}

}  // namespace

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

BitMapping natural_mapping(const Constellation& c) {
    BitMapping m;
    m.Nb = bits_for(c.size());
    m.labels.resize(static_cast<std::size_t>(c.size()));
    std::iota(m.labels.begin(), m.labels.end(), 0u);
    m.lambda = c.size() >= 2 ? neighbor_lambda(c, m.labels) : 0.0;
    return m;
}

double switching_cost(const Constellation& c, std::span<const std::uint32_t> labels, double N0) {
    const int Nc = c.size();
    const auto d = distance_table(c);
    const double scale = 1.0 / std::sqrt(2.0 * N0);
    double cost = 0.0;
    for (int p = 0; p < Nc; ++p)
        for (int q = 0; q < Nc; ++q)
            if (p != q)
                cost += q_function(d[static_cast<std::size_t>(p) * Nc + q] * scale) * hamming(labels[p], labels[q]);
    return cost;
}

double neighbor_lambda(const Constellation& c, std::span<const std::uint32_t> labels, double neighbor_tol) {
    const int Nc = c.size();
    const auto d = distance_table(c);
    const double limit = min_of(d, Nc) * (1.0 + neighbor_tol);
    double sum = 0.0;
    std::size_t count = 0;
    for (int p = 0; p < Nc; ++p) {
        for (int q = p + 1; q < Nc; ++q) {
            if (d[static_cast<std::size_t>(p) * Nc + q] <= limit) {
                sum += hamming(labels[p], labels[q]);
                ++count;
            }
        }
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

BitMapping bsa_optimize(const Constellation& c, double N0, std::mt19937_64& rng, double neighbor_tol) {
    if (c.size() < 2) throw std::invalid_argument("bsa_optimize: need at least two points");
    if (!(N0 > 0.0)) throw std::invalid_argument("bsa_optimize: N0 must be positive");
    const int Nc = c.size();
    BitMapping m;
    m.Nb = bits_for(Nc);
    m.labels.resize(static_cast<std::size_t>(Nc));
    std::iota(m.labels.begin(), m.labels.end(), 0u);
    std::shuffle(m.labels.begin(), m.labels.end(), rng);

    const auto d = distance_table(c);
    const double scale = 1.0 / std::sqrt(2.0 * N0);
    std::vector<double> w(d.size(), 0.0);
    for (std::size_t k = 0; k < d.size(); ++k) w[k] = q_function(d[k] * scale);
    for (int p = 0; p < Nc; ++p) w[static_cast<std::size_t>(p) * Nc + p] = 0.0;

    auto& L = m.labels;
    double cost = 0.0;
    for (int p = 0; p < Nc; ++p)
        for (int q = 0; q < Nc; ++q) cost += w[static_cast<std::size_t>(p) * Nc + q] * hamming(L[p], L[q]);

    for (;;) {
        double best_delta = 0.0;
        int best_a = -1;
        int best_b = -1;
        for (int a = 0; a < Nc; ++a) {
            const double* wa = w.data() + static_cast<std::size_t>(a) * Nc;
            for (int b = a + 1; b < Nc; ++b) {
                const double* wb = w.data() + static_cast<std::size_t>(b) * Nc;
                double delta = 0.0;
                for (int q = 0; q < Nc; ++q) {
                    if (q == a || q == b) continue;
                    const int ha = hamming(L[a], L[q]);
                    const int hb = hamming(L[b], L[q]);
                    delta += (wa[q] - wb[q]) * (hb - ha);
                }
                delta *= 2.0;  // symmetric terms
                if (delta < best_delta) {
                    best_delta = delta;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        if (best_a < 0 || best_delta >= -1e-12 * std::max(cost, 1e-300)) break;
        std::swap(L[best_a], L[best_b]);
        cost += best_delta;
        ++m.swaps;
    }
    m.cost = switching_cost(c, L, N0);
    m.lambda = neighbor_lambda(c, L, neighbor_tol);
    return m;
}

std::size_t neighbor_pairs(const Constellation& c, double neighbor_tol) {
    const int Nc = c.size();
    const auto d = distance_table(c);
    const double limit = min_of(d, Nc) * (1.0 + neighbor_tol);
    std::size_t count = 0;
    for (int p = 0; p < Nc; ++p)
        for (int q = p + 1; q < Nc; ++q)
            if (d[static_cast<std::size_t>(p) * Nc + q] <= limit) ++count;
    return count;
}

double union_bound_ser(const Constellation& c, double N0, double neighbor_tol) {
    if (!(N0 > 0.0)) throw std::invalid_argument("union_bound_ser: N0 must be positive");
    const double d = min_distance(c);
    const double nn = static_cast<double>(neighbor_pairs(c, neighbor_tol));
    return 2.0 * nn / c.size() * q_function(std::sqrt(d * d / (2.0 * N0)));
}

double union_bound_ber(double ser, double lambda, int Nb) { return lambda / Nb * ser; }

double union_bound_ser_variance(const Constellation& c, double sigma2, double neighbor_tol) {
    return union_bound_ser(c, 2.0 * sigma2, neighbor_tol);
}

double pairwise_ber_bound(const Constellation& c, std::span<const std::uint32_t> labels, double sigma2) {
    const int Nb = bits_for(c.size());
    return switching_cost(c, labels, 2.0 * sigma2) / (c.size() * static_cast<double>(Nb));
}

double pairwise_ser_bound(const Constellation& c, double sigma2) {
    const int Nc = c.size();
    const int D = c.dimension();
    const auto s = c.stacked();
    const double scale = 1.0 / (2.0 * std::sqrt(sigma2));
    double sum = 0.0;
    for (int p = 0; p < Nc; ++p)
        for (int q = p + 1; q < Nc; ++q) sum += q_function(std::sqrt(pair_distance_sq(s, D, p, q)) * scale);
    return 2.0 * sum / Nc;
}

double snr_db(const Constellation& c, double N0) {
    if (!(N0 > 0.0)) throw std::invalid_argument("snr_db: N0 must be positive");
    return 10.0 * std::log10(mean_energy(c) / N0);
}

double n0_for_snr(const Constellation& c, double snr) { return mean_energy(c) / std::pow(10.0, snr / 10.0); }

double decoupled_energy(std::span<const Constellation, 3> colors) {
    double e = 0.0;
    for (const auto& c : colors) e += mean_energy(c);
    return e;
}

double wilson_halfwidth(std::uint64_t k, std::uint64_t n, double z) {
    if (n == 0) return 0.0;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    return z / (1.0 + z2 / nn) * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
}

LinkStats simulate_link(const Constellation& c, const BitMapping& mapping, const CrosstalkChannel* channel,
                        double N0, std::uint64_t n_symbols, std::uint64_t seed) {
    if (n_symbols == 0) throw std::invalid_argument("simulate_link: symbol budget must be positive");
    if (!(N0 >= 0.0)) throw std::invalid_argument("simulate_link: N0 must be nonnegative");
    if (mapping.labels.size() != static_cast<std::size_t>(c.size()))
        throw std::invalid_argument("simulate_link: mapping size does not match constellation");
    if (channel != nullptr && c.mode() != ConstellationMode::joint)
        throw std::invalid_argument("simulate_link: a channel requires a joint constellation");

    const int Nc = c.size();
    const int D = c.dimension();
    const int B = 2 * c.K() + 1;
    const double sigma = std::sqrt(N0);
    // Transmitted points P s_i and the end-to-end mixing for the noise.
    std::vector<double> tx(c.stacked().begin(), c.stacked().end());
    if (channel != nullptr) tx = apply_precoder(*channel, c.stacked());
    const auto& kern = simd::kernels();

    const std::uint64_t chunks = (n_symbols + kChunk - 1) / kChunk;
    std::vector<Counts> partial(chunks);
    parallel_chunks(chunks, [&](std::uint64_t chunk) {
        auto rng = chunk_rng(seed, 0, chunk);
        std::uniform_int_distribution<int> pick(0, Nc - 1);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const std::uint64_t count = std::min(kChunk, n_symbols - chunk * kChunk);
        std::vector<double> y(static_cast<std::size_t>(D));
        std::vector<double> noise(static_cast<std::size_t>(D));
        Counts local;
        for (std::uint64_t t = 0; t < count; ++t) {
            const int sent = pick(rng);
            const double* x = tx.data() + static_cast<std::size_t>(sent) * D;
            for (int k = 0; k < D; ++k) noise[k] = sigma * gauss(rng);
            if (channel == nullptr) {
                for (int k = 0; k < D; ++k) y[k] = x[k] + noise[k];
            } else {
                // y = U^T (H x + n), color mixing per basis coefficient.
                for (int j = 0; j < B; ++j) {
                    double hx[3];
                    for (int a = 0; a < 3; ++a) {
                        hx[a] = noise[a * B + j];
                        for (int b = 0; b < 3; ++b) hx[a] += channel->color_matrix[a][b] * x[b * B + j];
                    }
                    for (int a = 0; a < 3; ++a) {
                        double v = 0.0;
                        for (int b = 0; b < 3; ++b) v += channel->post[a][b] * hx[b];
                        y[a * B + j] = v;
                    }
                }
            }
            const std::size_t got = kern.nearest_row(c.stacked().data(), static_cast<std::size_t>(Nc),
                                                     static_cast<std::size_t>(D), y.data(), nullptr);
            ++local.symbols;
            if (static_cast<int>(got) != sent) {
                ++local.symbol_errors;
                local.bit_errors += static_cast<std::uint64_t>(hamming(mapping.labels[got], mapping.labels[sent]));
            }
        }
        partial[chunk] = local;
    });

    Counts total;
    for (const auto& p : partial) {
        total.symbols += p.symbols;
        total.symbol_errors += p.symbol_errors;
        total.bit_errors += p.bit_errors;
    }
    return finish(total, mapping.Nb, N0, mean_energy(c));
}

LinkStats simulate_decoupled(std::span<const Constellation, 3> colors, std::span<const BitMapping, 3> mappings,
                             double N0, std::uint64_t n_symbols, std::uint64_t seed) {
    if (n_symbols == 0) throw std::invalid_argument("simulate_decoupled: symbol budget must be positive");
    const double sigma = std::sqrt(N0);
    const auto& kern = simd::kernels();
    int Nb = 0;
    for (int x = 0; x < 3; ++x) {
        if (mappings[x].labels.size() != static_cast<std::size_t>(colors[x].size()))
            throw std::invalid_argument("simulate_decoupled: mapping size does not match constellation");
        Nb += mappings[x].Nb;
    }

    const std::uint64_t chunks = (n_symbols + kChunk - 1) / kChunk;
    std::vector<Counts> partial(chunks);
    parallel_chunks(chunks, [&](std::uint64_t chunk) {
        auto rng = chunk_rng(seed, 1, chunk);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const std::uint64_t count = std::min(kChunk, n_symbols - chunk * kChunk);
        std::vector<double> y;
        Counts local;
        for (std::uint64_t t = 0; t < count; ++t) {
            bool wrong = false;
            for (int x = 0; x < 3; ++x) {
                const Constellation& c = colors[x];
                const int D = c.dimension();
                std::uniform_int_distribution<int> pick(0, c.size() - 1);
                const int sent = pick(rng);
                y.assign(c.point(sent).begin(), c.point(sent).end());
                for (int k = 0; k < D; ++k) y[k] += sigma * gauss(rng);
                const std::size_t got = kern.nearest_row(c.stacked().data(), static_cast<std::size_t>(c.size()),
                                                         static_cast<std::size_t>(D), y.data(), nullptr);
                if (static_cast<int>(got) != sent) {
                    wrong = true;
                    local.bit_errors +=
                        static_cast<std::uint64_t>(hamming(mappings[x].labels[got], mappings[x].labels[sent]));
                }
            }
            ++local.symbols;
            if (wrong) ++local.symbol_errors;
        }
        partial[chunk] = local;
    });

    Counts total;
    for (const auto& p : partial) {
        total.symbols += p.symbols;
        total.symbol_errors += p.symbol_errors;
        total.bit_errors += p.bit_errors;
    }
    return finish(total, Nb, N0, decoupled_energy(colors));
}

}  // namespace vlc
