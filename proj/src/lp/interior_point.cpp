// Mehrotra predictor-corrector interior point method for
//   maximize c'x  s.t.  G x <= h,  E x = f
// with free x. The Newton system is reduced to the normal matrix G'DG
// (num_vars square) plus a small Schur complement for the equality rows,
// which suits programs with few variables and many inequality rows.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "solvers.hpp"
#include "vlc/dense.hpp"
#include "vlc/simd.hpp"

namespace vlc::detail {
namespace {

// Dual residual tolerance, as a multiple of opt_tol.
constexpr double kDualSlack = 100.0;
constexpr int kRefinePasses = 3;

struct SparseRows {
    std::vector<std::size_t> start{0};
    std::vector<std::uint32_t> col;
    std::vector<double> val;
    std::vector<double> rhs;
    std::vector<double> scale;  // original row = scaled row * scale

    std::size_t size() const { return rhs.size(); }

    void push(std::vector<std::pair<std::uint32_t, double>> entries, double b) {
        std::sort(entries.begin(), entries.end());
        std::size_t out = 0;
        for (std::size_t k = 0; k < entries.size(); ++k) {
            if (out > 0 && entries[out - 1].first == entries[k].first) {
                entries[out - 1].second += entries[k].second;
            } else {
                entries[out++] = entries[k];
            }
        }
        entries.resize(out);
        double norm = 0.0;
        for (const auto& e : entries) norm = std::max(norm, std::abs(e.second));
        if (norm == 0.0) norm = 1.0;
        for (const auto& e : entries) {
            if (e.second == 0.0) continue;
            col.push_back(e.first);
            val.push_back(e.second / norm);
        }
        start.push_back(col.size());
        rhs.push_back(b / norm);
        scale.push_back(norm);
    }

    void multiply(std::span<const double> x, std::span<double> out) const {
        for (std::size_t r = 0; r < size(); ++r) {
            double acc = 0.0;
            for (std::size_t k = start[r]; k < start[r + 1]; ++k) acc += val[k] * x[col[k]];
            out[r] = acc;
        }
    }

    // out += A' y
    void multiply_transpose_add(std::span<const double> y, std::span<double> out) const {
        for (std::size_t r = 0; r < size(); ++r) {
            const double yr = y[r];
            if (yr == 0.0) continue;
            for (std::size_t k = start[r]; k < start[r + 1]; ++k) out[col[k]] += val[k] * yr;
        }
    }
};

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    return simd::kernels().dot(a.data(), b.data(), a.size());
}

double max_step(std::span<const double> v, std::span<const double> dv) {
    double alpha = 1.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (dv[i] < 0.0) alpha = std::min(alpha, -v[i] / dv[i]);
    }
    return alpha;
}

class NewtonSystem {
public:
    NewtonSystem(const SparseRows& g, const SparseRows& e, std::size_t n)
        : g_(g), e_(e), n_(n), normal_(n, n), schur_(e.size(), e.size()),
          minv_et_(e.size(), std::vector<double>(n)) {}

    // Factorizes G' diag(d) G (+ regularization) and the equality Schur complement.
    bool factor(std::span<const double> d) {
        double reg = 0.0;
        for (int attempt = 0; attempt < 8; ++attempt) {
            assemble(d, reg);
            if (cholesky_factor(normal_)) {
                return factor_schur();
            }
            reg = reg == 0.0 ? 1e-12 * std::max(1.0, last_max_diag_) : reg * 100.0;
        }
        return false;
    }

    // Solves the reduced system, then refines once against the unreduced
    // dual and equality residuals.
    void solve(std::span<const double> d, std::span<const double> w, std::span<const double> rd,
               std::span<const double> rp, std::span<const double> re,
               std::span<const double> rc, std::vector<double>& dx, std::vector<double>& dw,
               std::vector<double>& dy, std::vector<double>& dz) const {
        solve_once(d, w, rd, rp, re, rc, dx, dw, dy, dz);
        for (int pass = 0; pass < kRefinePasses; ++pass) refine(d, w, rd, re, dx, dw, dy, dz);
    }

    void refine(std::span<const double> d, std::span<const double> w, std::span<const double> rd,
                std::span<const double> re, std::vector<double>& dx, std::vector<double>& dw,
                std::vector<double>& dy, std::vector<double>& dz) const {
        const std::size_t m = g_.size();
        const std::size_t me = e_.size();
        std::vector<double> r1(rd.begin(), rd.end());
        std::vector<double> neg_dy(m), neg_dz(me);
        for (std::size_t i = 0; i < m; ++i) neg_dy[i] = -dy[i];
        for (std::size_t k = 0; k < me; ++k) neg_dz[k] = -dz[k];
        g_.multiply_transpose_add(neg_dy, r1);
        e_.multiply_transpose_add(neg_dz, r1);
        std::vector<double> r3(me);
        e_.multiply(dx, r3);
        for (std::size_t k = 0; k < me; ++k) r3[k] = re[k] - r3[k];
        const std::vector<double> zero_m(m, 0.0);
        std::vector<double> cx, cw, cy, cz;
        solve_once(d, w, r1, zero_m, r3, zero_m, cx, cw, cy, cz);
        for (std::size_t j = 0; j < n_; ++j) dx[j] += cx[j];
        for (std::size_t i = 0; i < m; ++i) {
            dw[i] += cw[i];
            dy[i] += cy[i];
        }
        for (std::size_t k = 0; k < me; ++k) dz[k] += cz[k];
    }

private:
    void solve_once(std::span<const double> d, std::span<const double> w, std::span<const double> rd,
               std::span<const double> rp, std::span<const double> re,
               std::span<const double> rc, std::vector<double>& dx, std::vector<double>& dw,
               std::vector<double>& dy, std::vector<double>& dz) const {
        const std::size_t m = g_.size();
        const std::size_t me = e_.size();
        std::vector<double> tmp(m);
        for (std::size_t i = 0; i < m; ++i) tmp[i] = rc[i] / w[i] - d[i] * rp[i];
        std::vector<double> rhs(rd.begin(), rd.end());
        std::vector<double> neg(m);
        for (std::size_t i = 0; i < m; ++i) neg[i] = -tmp[i];
        g_.multiply_transpose_add(neg, rhs);
        cholesky_solve(normal_, rhs);

        dz.assign(me, 0.0);
        if (me > 0) {
            std::vector<double> eu(me);
            e_.multiply(rhs, eu);
            for (std::size_t k = 0; k < me; ++k) dz[k] = eu[k] - re[k];
            cholesky_solve(schur_, dz);
        }
        dx = rhs;
        for (std::size_t k = 0; k < me; ++k) {
            simd::kernels().axpy(-dz[k], minv_et_[k].data(), dx.data(), n_);
        }
        std::vector<double> gdx(m);
        g_.multiply(dx, gdx);
        dw.resize(m);
        dy.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            dw[i] = rp[i] - gdx[i];
            dy[i] = tmp[i] + d[i] * gdx[i];
        }
    }

    void assemble(std::span<const double> d, double reg) {
        normal_.fill(0.0);
        for (std::size_t r = 0; r < g_.size(); ++r) {
            const double dr = d[r];
            const std::size_t b = g_.start[r];
            const std::size_t e = g_.start[r + 1];
            for (std::size_t a = b; a < e; ++a) {
                const double va = dr * g_.val[a];
                double* row = normal_.row(g_.col[a]);
                // columns are sorted, so col[k] <= col[a] for k <= a
                for (std::size_t k = b; k <= a; ++k) row[g_.col[k]] += va * g_.val[k];
            }
        }
        last_max_diag_ = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
            last_max_diag_ = std::max(last_max_diag_, normal_(j, j));
            normal_(j, j) += reg;
        }
    }

    bool factor_schur() {
        const std::size_t me = e_.size();
        if (me == 0) return true;
        for (std::size_t k = 0; k < me; ++k) {
            auto& col = minv_et_[k];
            std::fill(col.begin(), col.end(), 0.0);
            for (std::size_t p = e_.start[k]; p < e_.start[k + 1]; ++p) col[e_.col[p]] = e_.val[p];
            cholesky_solve(normal_, col);
        }
        std::vector<double> tmp(me);
        for (std::size_t k = 0; k < me; ++k) {
            e_.multiply(minv_et_[k], tmp);
            for (std::size_t i = 0; i < me; ++i) schur_(i, k) = tmp[i];
        }
        double diag = 0.0;
        for (std::size_t i = 0; i < me; ++i) diag = std::max(diag, schur_(i, i));
        for (std::size_t i = 0; i < me; ++i) schur_(i, i) += 1e-14 * std::max(diag, 1e-300);
        return cholesky_factor(schur_);
    }

    const SparseRows& g_;
    const SparseRows& e_;
    std::size_t n_;
    DenseMatrix normal_;
    DenseMatrix schur_;
    std::vector<std::vector<double>> minv_et_;
    double last_max_diag_ = 0.0;
};

}  // namespace

LpSolution solve_interior_point(const LpProblem& problem, const LpOptions& options) {
    const std::size_t n = problem.num_vars;
    const std::size_t max_iter = options.max_iterations > 0 ? options.max_iterations : 150;

    SparseRows g;
    SparseRows e;
    for (const auto& row : problem.rows) {
        std::vector<std::pair<std::uint32_t, double>> entries;
        entries.reserve(row.index.size());
        const double sign = row.sense == Sense::greater_equal ? -1.0 : 1.0;
        for (std::size_t k = 0; k < row.index.size(); ++k)
            entries.emplace_back(row.index[k], sign * row.value[k]);
        if (row.sense == Sense::equal) {
            e.push(std::move(entries), row.rhs);
        } else {
            g.push(std::move(entries), sign * row.rhs);
        }
    }
    for (std::size_t j = 0; j < problem.bounds.size(); ++j) {
        const auto& b = problem.bounds[j];
        const auto col = static_cast<std::uint32_t>(j);
        if (std::isfinite(b.upper)) g.push({{col, 1.0}}, b.upper);
        if (std::isfinite(b.lower)) g.push({{col, -1.0}}, -b.lower);
    }

    const std::size_t m = g.size();
    const std::size_t me = e.size();
    const std::vector<double>& c = problem.objective;
    const double c_norm = inf_norm(c);
    const double h_norm = inf_norm(g.rhs);
    const double f_norm = inf_norm(e.rhs);

    LpSolution sol;
    if (m == 0) {
        // Without inequality rows a nonzero objective is unbounded unless it lies
        // in the row space of E; the IPM machinery needs a positive-definite
        // normal matrix, so defer to the simplex code for this corner case.
        return solve_simplex(problem, options);
    }

    NewtonSystem system(g, e, n);
    std::vector<double> x(n, 0.0), w(m, 1.0), y(m, 1.0), z(me, 0.0);
    std::vector<double> d(m, 1.0);
    std::vector<double> dx, dw, dy, dz;
    std::vector<double> rd(n), rp(m), re(me), rc(m), gx(m), ex(me);

    // Least-squares starting point.
    if (!system.factor(d)) return sol;
    {
        std::vector<double> zero_m(m, 0.0);
        std::vector<double> rhs_p(g.rhs);
        std::vector<double> rd0(n, 0.0);
        // Solving with rd=0, rp=h, rc=0, w=1 gives x = argmin |Gx - h| subject to Ex = f.
        system.solve(d, w, rd0, rhs_p, e.rhs, zero_m, dx, dw, dy, dz);
        x = dx;
        // Dual least squares: y = G (G'G)^-1 c.
        std::vector<double> rdc(c);
        std::vector<double> zero_e(me, 0.0);
        system.solve(d, w, rdc, zero_m, zero_e, zero_m, dx, dw, dy, dz);
        y = dy;
        z.assign(dz.begin(), dz.end());
    }
    g.multiply(x, gx);
    for (std::size_t i = 0; i < m; ++i) w[i] = g.rhs[i] - gx[i];
    {
        double dw_shift = 0.0, dy_shift = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            dw_shift = std::max(dw_shift, -1.5 * w[i]);
            dy_shift = std::max(dy_shift, -1.5 * y[i]);
        }
        for (std::size_t i = 0; i < m; ++i) {
            w[i] += dw_shift;
            y[i] += dy_shift;
        }
        const double wy = dot(w, y);
        const double sw = std::accumulate(w.begin(), w.end(), 0.0);
        const double sy = std::accumulate(y.begin(), y.end(), 0.0);
        const double add_w = 0.5 * wy / std::max(sy, 1e-300) + 1e-8 * (1.0 + h_norm);
        const double add_y = 0.5 * wy / std::max(sw, 1e-300) + 1e-8 * (1.0 + c_norm);
        for (std::size_t i = 0; i < m; ++i) {
            w[i] += add_w;
            y[i] += add_y;
        }
    }

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        g.multiply(x, gx);
        e.multiply(x, ex);
        std::copy(c.begin(), c.end(), rd.begin());
        std::vector<double> neg_y(m);
        for (std::size_t i = 0; i < m; ++i) neg_y[i] = -y[i];
        g.multiply_transpose_add(neg_y, rd);
        std::vector<double> neg_z(me);
        for (std::size_t k = 0; k < me; ++k) neg_z[k] = -z[k];
        e.multiply_transpose_add(neg_z, rd);

        double pres = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            rp[i] = g.rhs[i] - gx[i] - w[i];
            pres = std::max(pres, std::abs(rp[i]) * g.scale[i]);
        }
        for (std::size_t k = 0; k < me; ++k) {
            re[k] = e.rhs[k] - ex[k];
            pres = std::max(pres, std::abs(re[k]) * e.scale[k]);
        }
        const double dres = inf_norm(rd);
        const double pobj = dot(c, x);
        const double dobj = dot(g.rhs, y) + dot(e.rhs, z);
        const double mu = dot(w, y) / static_cast<double>(m);
        sol.iterations = iter;

        const bool primal_ok = pres <= 0.5 * options.feas_tol;
        const double dual_scale = std::max({c_norm, inf_norm(y), inf_norm(z)});
        const bool dual_ok = dres <= kDualSlack * options.opt_tol * (1.0 + dual_scale);
        const bool gap_ok = mu * static_cast<double>(m) <= options.opt_tol * (1.0 + std::abs(pobj));
        if (primal_ok && dual_ok && gap_ok) {
            sol.status = LpStatus::optimal;
            sol.x = x;
            sol.objective_value = pobj;
            return sol;
        }

        // Farkas-type certificates from diverging iterates.
        if (dobj < 0.0) {
            std::vector<double> gty(n, 0.0);
            g.multiply_transpose_add(y, gty);
            e.multiply_transpose_add(z, gty);
            if (inf_norm(gty) <= 1e-9 * -dobj && -dobj > 1e6 * (1.0 + c_norm)) {
                sol.status = LpStatus::infeasible;
                return sol;
            }
        }
        if (pobj > 1e6 * (1.0 + h_norm + f_norm)) {
            double viol = 0.0;
            for (std::size_t i = 0; i < m; ++i) viol = std::max(viol, gx[i] - g.rhs[i]);
            for (std::size_t k = 0; k < me; ++k) viol = std::max(viol, std::abs(ex[k] - e.rhs[k]));
            if (viol <= 1e-6 * pobj) {
                sol.status = LpStatus::unbounded;
                return sol;
            }
        }

        for (std::size_t i = 0; i < m; ++i) d[i] = y[i] / w[i];
        if (!system.factor(d)) return sol;

        // Predictor.
        for (std::size_t i = 0; i < m; ++i) rc[i] = -w[i] * y[i];
        system.solve(d, w, rd, rp, re, rc, dx, dw, dy, dz);
        const double ap_aff = max_step(w, dw);
        const double ad_aff = max_step(y, dy);
        double mu_aff = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            mu_aff += (w[i] + ap_aff * dw[i]) * (y[i] + ad_aff * dy[i]);
        mu_aff /= static_cast<double>(m);
        const double sigma = std::pow(std::max(0.0, mu_aff) / mu, 3.0);

        // Corrector.
        for (std::size_t i = 0; i < m; ++i) rc[i] = sigma * mu - w[i] * y[i] - dw[i] * dy[i];
        system.solve(d, w, rd, rp, re, rc, dx, dw, dy, dz);
        const double ap = std::min(1.0, 0.99 * max_step(w, dw));
        const double ad = std::min(1.0, 0.99 * max_step(y, dy));
        for (std::size_t j = 0; j < n; ++j) x[j] += ap * dx[j];
        for (std::size_t i = 0; i < m; ++i) {
            w[i] += ap * dw[i];
            y[i] += ad * dy[i];
        }
        for (std::size_t k = 0; k < me; ++k) z[k] += ad * dz[k];
        if (!std::isfinite(dot(x, x)) || !std::isfinite(dot(y, y))) return sol;
    }
    sol.iterations = max_iter;
    return sol;
}

}  // namespace vlc::detail
