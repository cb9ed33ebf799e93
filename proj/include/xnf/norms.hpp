#ifndef XNF_NORMS_HPP
#define XNF_NORMS_HPP

#include <cmath>

#include "xnf/series.hpp"

namespace xnf {

struct Interval {
    double lo = 0, hi = 0;
    double length() const { return hi - lo; }
};

/// Analyticity widths (r, rho, xi, s, delta) of the complex neighborhood
/// R_r x I_rho x Xi_xi x T^n_s x B^{2m}_delta.
struct Widths {
    double r = 1, rho = 1, xi = 1, s = 1, delta = 1;

    bool positive() const { return r > 0 && rho > 0 && xi > 0 && s > 0 && delta > 0; }
    Widths scaled(double f) const { return {f * r, f * rho, f * xi, f * s, f * delta}; }
};

/// Real domain boxes plus analyticity widths.  Xi = (-x_max, x_max) always
/// contains 0, which anchors the solver's integral.
struct DomainSpec {
    Interval R;
    std::vector<Interval> I_box;
    double x_max = 1;
    Widths w;

    void validate() const {
        if (!w.positive()) throw Error("DomainSpec: widths must be strictly positive");
        if (x_max <= 0) throw Error("DomainSpec: x_max must be positive (0 must lie in Xi)");
        if (R.length() < 0) throw Error("DomainSpec: empty r interval");
        for (const auto& iv : I_box)
            if (iv.length() < 0) throw Error("DomainSpec: empty I interval");
    }

    /// X := sup{|x| : x in Xi_xi} for the disk-shaped complexification.
    double X() const { return x_max + w.xi; }

    DomainSpec with_widths(const Widths& nw) const {
        DomainSpec d = *this;
        d.w = nw;
        return d;
    }
};

/// The derived quantities entering every smallness condition.
struct NormParams {
    double dfrak = 0;        // min{rho*s, r*xi, delta^2} of the base widths
    double d = 0;            // same combination for the primed widths
    double X = 0;            // sup |x| over Xi_xi
    bool schedule_ok = true; // d >= dfrak / (81 N^2) when a schedule is checked
    double schedule_rhs = 0;
};

inline double dfrak_of(const Widths& w) {
    return std::min({w.rho * w.s, w.r * w.xi, w.delta * w.delta});
}

/// The paper's "rho sigma" is read as rho * s (sigma appears nowhere else);
/// this interpretation is echoed in every report.
inline NormParams norm_params(const DomainSpec& dom, const Widths& primed, int N = 0) {
    dom.validate();
    if (!primed.positive()) throw Error("norm_params: primed widths must be positive");
    NormParams np;
    np.dfrak = dfrak_of(dom.w);
    np.d = dfrak_of(primed);
    np.X = dom.X();
    if (N > 0) {
        np.schedule_rhs = np.dfrak / (81.0 * N * N);
        np.schedule_ok = np.d >= np.schedule_rhs;
    }
    return np;
}

namespace detail {
/// Max distance from the basepoint to the complexified interval closure.
inline double reach(const Interval& iv, double base, double width) {
    return std::max(iv.hi - base, base - iv.lo) + width;
}
}  // namespace detail

/// Certified upper bound for sup |q| over R_r x I_rho x Xi_xi via term-wise
/// majorization:  sum |c| W_r^a W_I^b X^e e^{|alpha| X}.  Monotone in all
/// widths; an upper bound of the exact sup, so the paper's inequalities are
/// checked in the conservative direction.
template <class Real>
Real coefficient_norm(const QuasiPoly<Real>& q, const SeriesContext<Real>& ctx,
                      const DomainSpec& dom) {
    if (ctx.base.r0 < dom.R.lo || ctx.base.r0 > dom.R.hi)
        throw Error("coefficient_norm: basepoint r0 outside domain");
    for (std::size_t i = 0; i < ctx.base.I0.size(); ++i)
        if (ctx.base.I0[i] < dom.I_box[i].lo || ctx.base.I0[i] > dom.I_box[i].hi)
            throw Error("coefficient_norm: basepoint I0 outside domain");

    const Real Wr = Real(detail::reach(dom.R, static_cast<double>(ctx.base.r0), dom.w.r));
    std::vector<Real> WI(ctx.base.I0.size());
    for (std::size_t i = 0; i < WI.size(); ++i)
        WI[i] = Real(detail::reach(dom.I_box[i], static_cast<double>(ctx.base.I0[i]), dom.w.rho));
    const Real X = Real(dom.X());

    Real acc = 0;
    for (const auto& t : q.terms()) {
        Real v = std::abs(t.c) * pow_int(Wr, t.a) * pow_int(X, t.e);
        for (std::size_t i = 0; i < t.b.size(); ++i) v *= pow_int(WI[i], t.b[i]);
        v *= std::exp(std::abs(ctx.lattice.value(t.alpha)) * X);
        acc += v;
    }
    return acc;
}

/// Weight e^{s|k|_1} delta^{|h|_1+|j|_1} of one Taylor-Fourier key.
template <class Real>
Real key_weight(const TermKey& key, const DomainSpec& dom) {
    return std::exp(Real(dom.w.s) * Real(abs_sum(key.k))) *
           pow_int(Real(dom.w.delta), abs_sum(key.h) + abs_sum(key.j));
}

/// || f || = sum_{k,h,j} ||f_khj||_{r,rho,xi} e^{s|k|} delta^{h+j}
/// (certified upper bound of the analytic norm of the stored series; the
/// tail_bound field is *not* included -- callers add it when they want the
/// conservative total).
template <class Real>
Real weighted_norm(const TFSeries<Real>& f, const DomainSpec& dom) {
    Real acc = 0;
    for (const auto& [key, q] : f.terms())
        acc += coefficient_norm(q, f.ctx(), dom) * key_weight<Real>(key, dom);
    return acc;
}

template <class Real>
Real weighted_norm_with_tail(const TFSeries<Real>& f, const DomainSpec& dom) {
    return weighted_norm(f, dom) + f.tail_bound();
}

/// Scalar norms of the constant frequency ratios.  With constant omega_r the
/// paper's ||1/omega_r||_{r,rho} is exactly |1/omega_r| (stated in reports).
template <class Real>
struct FreqNorms {
    Real inv_omega_r;  // ||1/omega_r||
    Real ratio_I;      // ||omega_I/omega_r|| = sum_i |omega_I_i| / |omega_r|
    Real ratio_J;      // ||omega_J/omega_r||

    explicit FreqNorms(const FrequencyData<Real>& f) {
        f.validate();
        inv_omega_r = Real(1) / std::abs(f.omega_r);
        ratio_I = 0;
        for (Real w : f.omega_I) ratio_I += std::abs(w);
        ratio_I *= inv_omega_r;
        ratio_J = 0;
        for (Real w : f.omega_J) ratio_J += std::abs(w);
        ratio_J *= inv_omega_r;
    }
};

/// DropSink accumulating the certified weighted-norm mass of discarded
/// terms on a fixed domain.
template <class Real>
struct MassSink {
    const SeriesContext<Real>* ctx;
    const DomainSpec* dom;
    Real mass = 0;

    DropSink<Real> sink() {
        return [this](const TermKey& key, const QuasiPoly<Real>& q) {
            mass += coefficient_norm(q, *ctx, *dom) * key_weight<Real>(key, *dom);
        };
    }
};

/// Product with full dropped-mass accounting: fresh truncation mass plus the
/// propagated input tails  ||a|| tb_b + tb_a ||b|| + tb_a tb_b.
template <class Real>
TFSeries<Real> truncated_multiply(const TFSeries<Real>& a, const TFSeries<Real>& b,
                                  TruncationOrders trunc, const DomainSpec& dom) {
    MassSink<Real> ms{&a.ctx(), &dom};
    TFSeries<Real> out = multiply(a, b, trunc, ms.sink());
    Real prop = weighted_norm(a, dom) * b.tail_bound() + a.tail_bound() * weighted_norm(b, dom) +
                a.tail_bound() * b.tail_bound();
    out.set_tail_bound(ms.mass + prop);
    return out;
}

/// Bracket with fresh dropped-mass accounting.  Input tail bounds do not
/// survive differentiation; the Lie layer propagates them with its own
/// contraction estimates.
template <class Real>
TFSeries<Real> truncated_bracket(const TFSeries<Real>& a, const TFSeries<Real>& b,
                                 TruncationOrders trunc, const DomainSpec& dom) {
    MassSink<Real> ms{&a.ctx(), &dom};
    TFSeries<Real> out = poisson_bracket(a, b, trunc, ms.sink());
    out.set_tail_bound(ms.mass);
    return out;
}

}  // namespace xnf

#endif
