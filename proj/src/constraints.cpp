#include "vlc/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vlc/simd.hpp"

namespace vlc {

Geometry joint_geometry(const DesignSpec& spec, const Mat3& precoder) {
    Geometry g;
    g.colors = 3;
    g.K = spec.K;
    g.Nc = spec.Nc;
    g.Ts = spec.Ts;
    g.I_U = spec.I_U;
    for (int x = 0; x < 3; ++x) g.power[x] = spec.Po * spec.s_avg[x];
    g.precoder = precoder;
    return g;
}

Geometry color_geometry(const DesignSpec& spec, Color color, int Nc) {
    Geometry g;
    g.colors = 1;
    g.K = spec.K;
    g.Nc = Nc;
    g.Ts = spec.Ts;
    g.I_U = spec.I_U;
    g.power = {spec.Po * spec.s_avg[static_cast<int>(color)], 0.0, 0.0};
    return g;
}

std::size_t pair_index(int p, int q, int Nc) {
    if (!(1 <= p && p < q && q <= Nc)) throw std::invalid_argument("pair_index: need 1 <= p < q <= Nc");
    const long long pl = p;
    return static_cast<std::size_t>((pl - 1) * Nc - pl * (pl + 1) / 2 + q);
}

std::pair<int, int> pair_from_index(std::size_t l, int Nc) {
    const std::size_t total = static_cast<std::size_t>(Nc) * static_cast<std::size_t>(Nc - 1) / 2;
    if (l < 1 || l > total) throw std::invalid_argument("pair_from_index: index out of range");
    for (int p = 1; p < Nc; ++p) {
        const std::size_t last = pair_index(p, Nc, Nc);
        if (l <= last) return {p, static_cast<int>(l - pair_index(p, p + 1, Nc)) + p + 1};
    }
    return {Nc - 1, Nc};
}

double pair_distance_sq(std::span<const double> stacked, int D, int p, int q) {
    const auto d = static_cast<std::size_t>(D);
    return simd::kernels().squared_distance(stacked.data() + static_cast<std::size_t>(p) * d,
                                            stacked.data() + static_cast<std::size_t>(q) * d, d);
}

AffineRow linearize_distance(std::span<const double> s0, int D, int p, int q,
                             std::uint32_t t_index) {
    AffineRow row;
    row.sense = Sense::greater_equal;
    row.index.reserve(2 * static_cast<std::size_t>(D) + 1);
    row.value.reserve(2 * static_cast<std::size_t>(D) + 1);
    const std::size_t bp = static_cast<std::size_t>(p) * D;
    const std::size_t bq = static_cast<std::size_t>(q) * D;
    double gg = 0.0;
    for (int j = 0; j < D; ++j) {
        const double g = s0[bp + j] - s0[bq + j];
        gg += g * g;
        row.add(static_cast<std::uint32_t>(bp + j), 2.0 * g);
        row.add(static_cast<std::uint32_t>(bq + j), -2.0 * g);
    }
    row.add(t_index, -1.0);
    row.rhs = gg;
    return row;
}

namespace {

// Adds scale * u . (P s_i)_x to the row.
void add_transmit_terms(AffineRow& row, const Geometry& geom, int i, int x, const double* u,
                        double scale) {
    const int B = geom.block();
    const std::size_t base = static_cast<std::size_t>(i) * geom.dimension();
    for (int c2 = 0; c2 < geom.colors; ++c2) {
        const double f = geom.mix(x, c2);
        if (f == 0.0) continue;
        for (int j = 0; j < B; ++j) {
            const double v = scale * f * u[j];
            if (v != 0.0) row.add(static_cast<std::uint32_t>(base + c2 * B + j), v);
        }
    }
}

double norm(std::span<const double> v) {
    return std::sqrt(simd::kernels().dot(v.data(), v.data(), v.size()));
}

}  // namespace

std::vector<AffineRow> power_color_rows(const Geometry& geom) {
    std::vector<AffineRow> rows;
    std::vector<double> dc_only(static_cast<std::size_t>(geom.block()), 0.0);
    dc_only[0] = std::sqrt(1.0 / geom.Ts) / geom.Nc;
    for (int x = 0; x < geom.colors; ++x) {
        AffineRow row;
        row.sense = Sense::equal;
        row.rhs = geom.power[x];
        for (int i = 0; i < geom.Nc; ++i) add_transmit_terms(row, geom, i, x, dc_only.data(), 1.0);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<AffineRow> dynamic_range_rows(const Geometry& geom, const SampleGrid& grid,
                                          bool include_upper) {
    if (static_cast<int>(grid.block()) != geom.block())
        throw std::invalid_argument("dynamic_range_rows: grid does not match K");
    std::vector<AffineRow> rows;
    rows.reserve((include_upper ? 2 : 1) * geom.colors * geom.Nc * grid.samples());
    for (int i = 0; i < geom.Nc; ++i) {
        for (int x = 0; x < geom.colors; ++x) {
            for (std::size_t n = 0; n < grid.samples(); ++n) {
                AffineRow lower;
                lower.sense = Sense::greater_equal;
                lower.rhs = 0.0;
                add_transmit_terms(lower, geom, i, x, grid.row(n), 1.0);
                if (include_upper) {
                    AffineRow upper = lower;
                    upper.sense = Sense::less_equal;
                    upper.rhs = geom.I_U;
                    rows.push_back(std::move(lower));
                    rows.push_back(std::move(upper));
                } else {
                    rows.push_back(std::move(lower));
                }
            }
        }
    }
    return rows;
}

std::vector<AffineRow> lpapr_rows(const Geometry& geom, const SampleGrid& grid,
                                  std::span<const double> s0, const Vec3& beta,
                                  std::uint32_t aux_index) {
    if (s0.size() != geom.num_coeffs()) throw std::invalid_argument("lpapr_rows: s0 has wrong length");
    const double s0_norm = norm(s0);
    if (!(s0_norm > 0.0)) throw std::invalid_argument("lpapr_rows: zero linearization point");
    std::vector<AffineRow> rows;
    AffineRow anchor;
    anchor.sense = Sense::equal;
    anchor.rhs = 0.0;
    anchor.add(aux_index, 1.0);
    for (std::size_t k = 0; k < s0.size(); ++k) {
        if (s0[k] != 0.0) anchor.add(static_cast<std::uint32_t>(k), -s0[k] / s0_norm);
    }
    rows.push_back(std::move(anchor));
    for (int i = 0; i < geom.Nc; ++i) {
        for (int x = 0; x < geom.colors; ++x) {
            const double coef = std::sqrt(beta[x] / geom.Nc);
            for (std::size_t n = 0; n < grid.samples(); ++n) {
                AffineRow row;
                row.sense = Sense::less_equal;
                row.rhs = 0.0;
                add_transmit_terms(row, geom, i, x, grid.row(n), 1.0);
                row.add(aux_index, -coef);
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

std::vector<AffineRow> ipapr_rows(const Geometry& geom, const SampleGrid& grid,
                                  std::span<const double> s0, std::span<const Vec3> beta) {
    if (s0.size() != geom.num_coeffs()) throw std::invalid_argument("ipapr_rows: s0 has wrong length");
    if (beta.size() != 1 && beta.size() != static_cast<std::size_t>(geom.Nc))
        throw std::invalid_argument("ipapr_rows: beta must have 1 or Nc entries");
    const int D = geom.dimension();
    std::vector<AffineRow> rows;
    for (int i = 0; i < geom.Nc; ++i) {
        const auto point = s0.subspan(static_cast<std::size_t>(i) * D, D);
        const double pn = norm(point);
        if (!(pn > 0.0)) throw std::invalid_argument("ipapr_rows: zero point block in s0");
        const Vec3& b = beta.size() == 1 ? beta[0] : beta[i];
        for (int x = 0; x < geom.colors; ++x) {
            const double coef = std::sqrt(b[x]) / pn;
            for (std::size_t n = 0; n < grid.samples(); ++n) {
                AffineRow row;
                row.sense = Sense::less_equal;
                row.rhs = 0.0;
                add_transmit_terms(row, geom, i, x, grid.row(n), 1.0);
                // merge the tangent term into the same coefficients
                std::vector<double> dense(static_cast<std::size_t>(D), 0.0);
                const std::size_t base = static_cast<std::size_t>(i) * D;
                for (std::size_t k = 0; k < row.index.size(); ++k) dense[row.index[k] - base] += row.value[k];
                for (int j = 0; j < D; ++j) dense[j] -= coef * point[j];
                row.index.clear();
                row.value.clear();
                for (int j = 0; j < D; ++j)
                    if (dense[j] != 0.0) row.add(static_cast<std::uint32_t>(base + j), dense[j]);
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

std::vector<double> transmit_waveform(const Geometry& geom, const SampleGrid& grid,
                                      std::span<const double> stacked, int i, int x) {
    const int B = geom.block();
    const std::size_t base = static_cast<std::size_t>(i) * geom.dimension();
    std::vector<double> block(static_cast<std::size_t>(B), 0.0);
    for (int c2 = 0; c2 < geom.colors; ++c2) {
        const double f = geom.mix(x, c2);
        if (f == 0.0) continue;
        for (int j = 0; j < B; ++j) block[j] += f * stacked[base + c2 * B + j];
    }
    std::vector<double> out(grid.samples());
    simd::kernels().gemv(grid.eval.row(0), grid.samples(), static_cast<std::size_t>(B), block.data(),
                         out.data());
    return out;
}

PaprReport measure_papr(const Geometry& geom, const SampleGrid& grid,
                        std::span<const double> stacked) {
    const double energy = simd::kernels().dot(stacked.data(), stacked.data(), stacked.size());
    if (!(energy > 0.0)) throw std::invalid_argument("measure_papr: zero-energy constellation");
    const int D = geom.dimension();
    PaprReport report;
    report.individual.assign(static_cast<std::size_t>(geom.Nc), {0.0, 0.0, 0.0});
    Vec3 peak{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
              -std::numeric_limits<double>::infinity()};
    for (int i = 0; i < geom.Nc; ++i) {
        const double point_energy = std::pow(norm(stacked.subspan(static_cast<std::size_t>(i) * D, D)), 2);
        for (int x = 0; x < geom.colors; ++x) {
            const auto wave = transmit_waveform(geom, grid, stacked, i, x);
            const double pk = *std::max_element(wave.begin(), wave.end());
            peak[x] = std::max(peak[x], pk);
            report.individual[i][x] =
                point_energy > 0.0 ? pk * pk / point_energy : std::numeric_limits<double>::infinity();
        }
    }
    for (int x = 0; x < geom.colors; ++x) report.long_term[x] = geom.Nc * peak[x] * peak[x] / energy;
    return report;
}

}  // namespace vlc
