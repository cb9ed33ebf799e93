#ifndef XNF_CORPUS_HPP
#define XNF_CORPUS_HPP

#include <random>

#include "xnf/homological.hpp"

namespace xnf {

/// Knobs for the random instances used by calibration and the randomized
/// checks.  Ranges are deliberately desk-scale: moderate Fourier orders,
/// small frequency ratios (the regime the normal form targets) and widths
/// of order one.
struct CorpusOptions {
    int n = 1, m = 1;
    int max_k = 4;
    int max_pq = 3;
    int max_e = 3;        // x-degree of generated coefficients
    int max_ab = 2;       // (r, I)-degree of generated coefficients
    int alpha_range = 1;  // |weights| of generated exponents
    int keys = 4;         // Fourier-Taylor keys per series
    double coeff_scale = 1.0;
    double ratio_max = 0.2;  // |omega_I/omega_r|, |omega_J/omega_r| per component
    bool zero_average = false;
    bool trig_only = false;  // coefficients e^{i ell x} only (Fourier-solver compatible)
    bool realness = false;
    bool allow_zero_freq = false;  // with probability ~1/4 zero out a component
};

template <class Real>
class InstanceGen {
  public:
    explicit InstanceGen(std::uint64_t seed) : rng_(seed) {}

    std::mt19937_64& rng() { return rng_; }

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng_);
    }
    int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    FrequencyData<Real> frequencies(const CorpusOptions& o) {
        FrequencyData<Real> f;
        f.omega_r = Real(uniform(0.5, 2.0) * (uniform_int(0, 1) ? 1 : -1));
        for (int i = 0; i < o.n; ++i) {
            double v = uniform(-o.ratio_max, o.ratio_max) * std::abs(double(f.omega_r));
            if (o.allow_zero_freq && uniform_int(0, 3) == 0) v = 0;
            f.omega_I.push_back(Real(v));
        }
        for (int i = 0; i < o.m; ++i) {
            double v = uniform(-o.ratio_max, o.ratio_max) * std::abs(double(f.omega_r));
            if (o.allow_zero_freq && uniform_int(0, 3) == 0) v = 0;
            f.omega_J.push_back(Real(v));
        }
        return f;
    }

    ContextPtr<Real> context(const CorpusOptions& o) {
        Basepoint<Real> base;
        base.r0 = Real(uniform(-0.2, 0.2));
        for (int i = 0; i < o.n; ++i) base.I0.push_back(Real(uniform(-0.2, 0.2)));
        return make_context(o.n, o.m, frequencies(o), std::move(base));
    }

    DomainSpec domain(const CorpusOptions& o, const ContextPtr<Real>& ctx) {
        DomainSpec d;
        double r0 = static_cast<double>(ctx->base.r0);
        d.R = {r0 - uniform(0.2, 0.6), r0 + uniform(0.2, 0.6)};
        for (int i = 0; i < o.n; ++i) {
            double c = static_cast<double>(ctx->base.I0[i]);
            d.I_box.push_back({c - uniform(0.2, 0.6), c + uniform(0.2, 0.6)});
        }
        d.x_max = uniform(0.5, 1.2);
        d.w = {uniform(0.3, 1.0), uniform(0.3, 1.0), uniform(0.3, 0.8), uniform(0.3, 1.0),
               uniform(0.3, 1.0)};
        return d;
    }

    TermKey random_key(const CorpusOptions& o) {
        TermKey key;
        key.k.resize(o.n);
        key.h.resize(o.m);
        key.j.resize(o.m);
        for (int tries = 0; tries < 64; ++tries) {
            for (int& v : key.k) v = uniform_int(-o.max_k, o.max_k);
            for (int& v : key.h) v = uniform_int(0, o.max_pq);
            for (int& v : key.j) v = uniform_int(0, o.max_pq);
            if (abs_sum(key.k) > o.max_k || abs_sum(key.h) + abs_sum(key.j) > o.max_pq) continue;
            if (o.zero_average && key.is_average()) continue;
            return key;
        }
        // fall back to a guaranteed off-average key
        for (int& v : key.k) v = 0;
        for (int& v : key.h) v = 0;
        for (int& v : key.j) v = 0;
        if (o.n > 0)
            key.k[0] = 1;
        else
            key.h[0] = 1;
        return key;
    }

    QuasiPoly<Real> random_coeff(const CorpusOptions& o, const ContextPtr<Real>& ctx) {
        QuasiPoly<Real> q;
        int terms = uniform_int(1, 3);
        for (int t = 0; t < terms; ++t) {
            QpTerm<Real> term;
            term.c = Cx<Real>(Real(uniform(-1, 1) * o.coeff_scale),
                              Real(uniform(-1, 1) * o.coeff_scale));
            term.a = uniform_int(0, o.max_ab);
            term.b.resize(o.n);
            for (int& v : term.b) v = uniform_int(0, std::max(0, o.max_ab - term.a));
            term.e = o.trig_only ? 0 : uniform_int(0, o.max_e);
            term.alpha = ctx->lattice.zero_key();
            if (o.trig_only) {
                term.alpha.ell = uniform_int(-2, 2);
            } else if (o.alpha_range > 0 && uniform_int(0, 1)) {
                for (int& w : term.alpha.wJ) w = uniform_int(-o.alpha_range, o.alpha_range);
                for (int& w : term.alpha.wI) w = uniform_int(-o.alpha_range, o.alpha_range);
            }
            q.add_term(std::move(term));
        }
        return q;
    }

    /// Random series honoring `o`; realness doubles keys into conjugate pairs.
    TFSeries<Real> series(const CorpusOptions& o, const ContextPtr<Real>& ctx,
                          const TruncationOrders& trunc) {
        std::vector<std::pair<TermKey, QuasiPoly<Real>>> entries;
        for (int i = 0; i < o.keys; ++i) {
            TermKey key = random_key(o);
            QuasiPoly<Real> q = random_coeff(o, ctx);
            if (o.realness) {
                TermKey neg = key;
                for (int& v : neg.k) v = -v;
                entries.emplace_back(neg, q.conjugated());
            }
            entries.emplace_back(std::move(key), std::move(q));
        }
        return build_series(ctx, entries, trunc);
    }

  private:
    std::mt19937_64 rng_;
};

}  // namespace xnf

#endif
