#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "vlc/basis.hpp"
#include "vlc/channel.hpp"
#include "vlc/lp.hpp"
#include "vlc/model.hpp"

namespace vlc {

// Shape of one design program. Joint programs have three color slots and may
// carry a precoder; per-color programs have one slot and no precoder. All row
// builders address the stacked constellation at variable indices [0, D*Nc).
struct Geometry {
    int colors = 3;
    int K = 0;
    int Nc = 0;
    double Ts = 1.0;
    double I_U = 0.0;
    Vec3 power{0.0, 0.0, 0.0};  // required mean intensity per color slot
    Mat3 precoder = identity3();

    int block() const { return 2 * K + 1; }
    int dimension() const { return colors * block(); }
    std::size_t num_coeffs() const {
        return static_cast<std::size_t>(dimension()) * static_cast<std::size_t>(Nc);
    }
    // Weight of design-space color c2 in transmitted color slot x.
    double mix(int x, int c2) const { return colors == 1 ? 1.0 : precoder[x][c2]; }
};

Geometry joint_geometry(const DesignSpec& spec, const Mat3& precoder);
Geometry color_geometry(const DesignSpec& spec, Color color, int Nc);

// Pair index l = (p-1)Nc - p(p+1)/2 + q for 1-based 1 <= p < q <= Nc.
std::size_t pair_index(int p, int q, int Nc);
// Inverse of pair_index, 1-based.
std::pair<int, int> pair_from_index(std::size_t l, int Nc);

// |s_p - s_q|^2 for 0-based point indices.
double pair_distance_sq(std::span<const double> stacked, int D, int p, int q);

// Tangent of |s_p - s_q|^2 at s0 as the row 2 g.(s_p - s_q) - t >= g.g with
// g = s0_p - s0_q, where t is the variable at t_index.
AffineRow linearize_distance(std::span<const double> s0, int D, int p, int q,
                             std::uint32_t t_index);

// (1/Nc) sum_i sqrt(1/Ts) dc_x(P s_i) = power[x] for every color slot.
std::vector<AffineRow> power_color_rows(const Geometry& geom);

// 0 <= u_n . (P s_i)_x <= I_U for every (i, x, n), lower row then upper row.
// With include_upper false only the nonnegativity rows are produced.
std::vector<AffineRow> dynamic_range_rows(const Geometry& geom, const SampleGrid& grid,
                                          bool include_upper = true);

// Linearized long-term PAPR rows. The first row is the equality
// r - s0.s/|s0| = 0 defining the auxiliary variable r at aux_index (the
// tangent of |s| at s0); the remaining rows are
// u_n . (P s_i)_x - sqrt(beta_x/Nc) r <= 0 for every (i, x, n).
std::vector<AffineRow> lpapr_rows(const Geometry& geom, const SampleGrid& grid,
                                  std::span<const double> s0, const Vec3& beta,
                                  std::uint32_t aux_index);

// Linearized individual PAPR rows
// u_n . (P s_i)_x - sqrt(beta_{x,i}) s0_i.s_i/|s0_i| <= 0 for every (i, x, n).
// beta holds one Vec3 per point, or a single Vec3 applied to all points.
std::vector<AffineRow> ipapr_rows(const Geometry& geom, const SampleGrid& grid,
                                  std::span<const double> s0, std::span<const Vec3> beta);

// Transmitted waveform of color slot x of point i at the grid samples.
std::vector<double> transmit_waveform(const Geometry& geom, const SampleGrid& grid,
                                      std::span<const double> stacked, int i, int x);

// L-PAPR Nc*peak_x^2/(s.s) per color and I-PAPR peak_{x,i}^2/|s_i|^2.
PaprReport measure_papr(const Geometry& geom, const SampleGrid& grid,
                        std::span<const double> stacked);

}  // namespace vlc
