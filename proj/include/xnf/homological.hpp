#ifndef XNF_HOMOLOGICAL_HPP
#define XNF_HOMOLOGICAL_HPP

#include "xnf/norms.hpp"

namespace xnf {

/// Eigenvalue of D_omega on the monomial e^{i k.phi} p^h q^j:
/// lambda_khj = (h-j).omega_J + i k.omega_I,  mu = lambda / omega_r.
template <class Real>
struct Eigenvalue {
    TermKey key;
    Cx<Real> lambda{};
    Cx<Real> mu{};
    bool resonant = false;  // lambda = 0 with (k, h-j) != (0, 0)
};

/// Lattice point of mu = lambda/omega_r for a key: weights (h-j) on the
/// omega_J generators and k on the i*omega_I generators.
template <class Real>
ExpKey mu_key(const TermKey& key, const SeriesContext<Real>& ctx) {
    ExpKey mk = ctx.lattice.zero_key();
    for (std::size_t i = 0; i < key.h.size(); ++i) mk.wJ[i] = key.h[i] - key.j[i];
    for (std::size_t i = 0; i < key.k.size(); ++i) mk.wI[i] = key.k[i];
    ctx.lattice.canonicalize(mk);
    return mk;
}

template <class Real>
Eigenvalue<Real> eigenvalue(const TermKey& key, const SeriesContext<Real>& ctx) {
    Eigenvalue<Real> ev;
    ev.key = key;
    ev.mu = ctx.lattice.value(mu_key(key, ctx));
    ev.lambda = ev.mu * Cx<Real>(ctx.freq.omega_r);
    ev.resonant = (ev.lambda == Cx<Real>(0)) && !key.is_average();
    return ev;
}

/// D_omega f, acting key-wise as omega_r d/dx + lambda_khj.  Preserves the
/// classes Z and N (the key set is unchanged).
template <class Real>
TFSeries<Real> apply_D_omega(const TFSeries<Real>& s) {
    TFSeries<Real> out(s.context(), s.trunc());
    const auto& ctx = s.ctx();
    for (const auto& [key, q] : s.terms()) {
        QuasiPoly<Real> r = q.derivative_x(ctx.lattice).scaled(Cx<Real>(ctx.freq.omega_r));
        Cx<Real> lambda = eigenvalue(key, ctx).lambda;
        if (lambda != Cx<Real>(0)) r += q.scaled(lambda);
        out.add_to(key, std::move(r));
    }
    out.set_realness(s.realness());
    return out;
}

struct KernelOptions {
    double tail_rel = 1e-14;  // target for the ascending-branch remainder,
                              // relative to X * (input term majorant)
    int max_terms = 48;       // hard cap on the ascending-series length
};

template <class Real>
struct KernelResult {
    QuasiPoly<Real> value;
    Real tail = 0;  // certified majorant of the discarded remainder
};

namespace detail {

/// Majorant of the descending-by-parts (closed form) representation of
/// e^{-mu x} Int_0^x tau^e e^{beta tau} dtau on |x| <= X.
template <class Real>
Real closed_form_majorant(Real absc, int e, Real ab, Real abs_alpha, Real abs_neg_mu, Real X) {
    Real poly = 0;
    Real g = 1;                      // e!/l!, starting at l = e
    Real binv = Real(1) / ab;        // ab^{-(e-l+1)}, starting at l = e
    for (int l = e; l >= 0; --l) {
        poly += g * pow_int(X, l) * binv;
        if (l > 0) {
            g *= Real(l);
            binv /= ab;
        }
    }
    // now g = e!, binv = ab^{-(e+1)}
    return absc * (poly * std::exp(abs_alpha * X) + g * binv * std::exp(abs_neg_mu * X));
}

}  // namespace detail

/// Closed-form primitive  Int_0^x q(tau) e^{mu (tau - x)} dtau  for a
/// quasi-polynomial q (the 1/omega_r factor is the caller's).
///
/// Per input monomial c x^e e^{alpha x} the combined exponent is
/// beta = alpha + mu, held exactly on the lattice.  Three representations:
///
///  * beta = 0 (resonant): the polynomial antiderivative
///    c x^{e+1}/(e+1) e^{alpha x}.  No division.  Overflowing the x-degree
///    cap is a hard error, never a silent drop.
///  * ascending integration by parts, expanding in powers of beta and
///    keeping the input exponent:
///      F_e = e^{beta x} sum_u (-beta)^u x^{e+1+u} / [(e+1)...(e+1+u)] + rem,
///    with a certified remainder majorant reported to the caller;
///  * descending integration by parts (exact closed form, beta in
///    denominators).
///
/// Whichever valid representation has the smaller certified majorant wins.
/// The ascending branch's full majorant is at most
/// X e^{|beta| X} e^{|mu| X} times the input term's majorant, so the winner
/// inherits that bound too; this is what keeps the Iterative Lemma's
/// generator estimate sound, and it means small combined exponents never
/// reach a denominator.
template <class Real>
KernelResult<Real> integrate_kernel(const QuasiPoly<Real>& q, const ExpKey& mu_k,
                                    const SeriesContext<Real>& ctx, int max_deg_x,
                                    Real x_scale = Real(1), const KernelOptions& opts = {},
                                    const DomainSpec* dom = nullptr) {
    const auto& lat = ctx.lattice;
    if (!lat.compatible(mu_k)) throw DimensionError("integrate_kernel: mu key has wrong shape");
    const Cx<Real> mu = lat.value(mu_k);
    const Real X = x_scale;
    KernelResult<Real> out;

    Real Wr = 1;
    std::vector<Real> WI;
    if (dom) {
        Wr = Real(detail::reach(dom->R, static_cast<double>(ctx.base.r0), dom->w.r));
        WI.resize(ctx.base.I0.size());
        for (std::size_t i = 0; i < WI.size(); ++i)
            WI[i] = Real(
                detail::reach(dom->I_box[i], static_cast<double>(ctx.base.I0[i]), dom->w.rho));
    }

    for (const auto& t : q.terms()) {
        ExpKey beta_k = t.alpha + mu_k;
        lat.canonicalize(beta_k);
        const Cx<Real> beta = lat.value(beta_k);

        if (beta == Cx<Real>(0)) {
            // Resonant: pure polynomial growth, e -> e+1.
            if (t.e + 1 > max_deg_x)
                throw TruncationError(
                    "integrate_kernel: resonant antiderivative exceeds the x-degree cap (deg " +
                    std::to_string(t.e + 1) + " > " + std::to_string(max_deg_x) + ")");
            QpTerm<Real> r = t;
            r.c = t.c / Real(t.e + 1);
            r.e = t.e + 1;
            out.value.add_term(std::move(r));
            continue;
        }

        const Real ab = std::abs(beta);
        const Real abs_alpha = std::abs(lat.value(t.alpha));
        const Real abs_mu = std::abs(mu);
        const Real scale = std::abs(t.c) * pow_int(X, t.e) * std::exp(abs_alpha * X) * X;
        Real wab = 1;  // (r,I)-part of the term's majorant, common to all branches
        if (dom) {
            wab = pow_int(Wr, t.a);
            for (std::size_t i = 0; i < t.b.size(); ++i) wab *= pow_int(WI[i], t.b[i]);
        }

        // Ascending branch: remainder after u head terms is bounded by
        // |c| (|beta| X)^u X^{e+1} e^{(|beta|+|mu|) X} / [(e+1)...(e+1+u)].
        const int max_head = std::min(opts.max_terms, max_deg_x - t.e);
        Real series_maj = -1, series_tail = 0;
        int head_count = 0;
        if (max_head > 0) {
            int u = 0;
            Real pi_inv = Real(1) / Real(t.e + 1);  // 1/[(e+1)...(e+1+u)]
            Real pw = 1;                            // (|beta| X)^u
            const Real efac = std::exp((ab + abs_mu) * X) * pow_int(X, t.e + 1) * std::abs(t.c);
            while (true) {
                series_tail = pw * pi_inv * efac;
                if (series_tail <= Real(opts.tail_rel) * scale || u >= max_head) break;
                ++u;
                pw *= ab * X;
                pi_inv /= Real(t.e + 1 + u);
            }
            head_count = u;
            series_maj = 0;
            Real coef = Real(1) / Real(t.e + 1);
            Real abu = 1;
            for (int v = 0; v < head_count; ++v) {
                series_maj += std::abs(t.c) * coef * abu * pow_int(X, t.e + 1 + v);
                abu *= ab;
                coef /= Real(t.e + 1 + v + 1);
            }
            series_maj = series_maj * std::exp(abs_alpha * X) + series_tail;
        }

        ExpKey out_neg_mu = t.alpha + (-beta_k);  // value alpha - beta = -mu
        lat.canonicalize(out_neg_mu);
        const Real abs_out = std::abs(lat.value(out_neg_mu));
        const Real closed_maj =
            detail::closed_form_majorant(std::abs(t.c), t.e, ab, abs_alpha, abs_out, X);

        if (series_maj >= Real(0) && series_maj <= closed_maj) {
            Real coef = Real(1) / Real(t.e + 1);
            Cx<Real> pw{1};
            for (int v = 0; v < head_count; ++v) {
                QpTerm<Real> r = t;
                r.c = t.c * coef * pw;
                r.e = t.e + 1 + v;
                out.value.add_term(std::move(r));
                pw *= -beta;
                coef /= Real(t.e + 1 + v + 1);
            }
            out.tail += series_tail * wab;
        } else {
            // Descending by parts: e^{beta x} P(x) - P(0), times e^{-mu x};
            // exact, with P(x) = sum_l (-1)^{e-l} (e!/l!) x^l beta^{l-e-1}.
            Real g = 1;
            Cx<Real> binv = Cx<Real>(1) / beta;
            Real sign = 1;
            Cx<Real> p0{};
            for (int l = t.e; l >= 0; --l) {
                QpTerm<Real> r = t;
                r.c = t.c * (sign * g) * binv;
                r.e = l;
                if (l == 0) p0 = r.c;
                out.value.add_term(std::move(r));
                g *= Real(l > 0 ? l : 1);
                binv /= beta;
                sign = -sign;
            }
            QpTerm<Real> r;
            r.c = -p0;
            r.a = t.a;
            r.b = t.b;
            r.e = 0;
            r.alpha = out_neg_mu;
            out.value.add_term(std::move(r));
        }
    }
    out.value.canonicalize_exponents(lat);
    return out;
}

/// Per-key record written into the solver's JSON ledger.
template <class Real>
struct SolveLedgerEntry {
    TermKey key;
    Cx<Real> lambda{}, mu{};
    bool resonant = false;
    Real norm_before = 0, norm_after = 0;
};

template <class Real>
struct SolveResult {
    TFSeries<Real> phi;
    std::vector<SolveLedgerEntry<Real>> ledger;
};

/// Solve  omega_r d_x phi_khj + lambda_khj phi_khj = f_khj  for every key of
/// ftilde (which must lie in the zero-average class Z) by the integral
/// primitive anchored at x = 0.  Resonant keys take the polynomial branch;
/// no eigenvalue is ever divided by.  phi(x=0) = 0 key-wise.
template <class Real>
SolveResult<Real> solve_homological(const TFSeries<Real>& ftilde, const DomainSpec& dom,
                                    const KernelOptions& opts = {}) {
    const auto& ctx = ftilde.ctx();
    SolveResult<Real> res;
    res.phi = TFSeries<Real>(ftilde.context(), ftilde.trunc());
    const Real inv_wr = Real(1) / Real(ctx.freq.omega_r);
    const Real X = Real(dom.X());
    // Pre-existing error mass in ftilde maps to generator error of size at
    // most X ||1/omega_r|| times it (on the shrunk domain the lemma uses).
    res.phi.set_tail_bound(ftilde.tail_bound() * X * std::abs(inv_wr));

    for (const auto& [key, q] : ftilde.terms()) {
        if (key.is_average())
            throw ConditionError(
                "zero-average",
                "solve_homological: input has a normal-class key " + to_string(key));
        KernelResult<Real> kr =
            integrate_kernel(q, mu_key(key, ctx), ctx, ftilde.trunc().max_deg_x, X, opts, &dom);
        SolveLedgerEntry<Real> led;
        led.key = key;
        Eigenvalue<Real> ev = eigenvalue(key, ctx);
        led.lambda = ev.lambda;
        led.mu = ev.mu;
        led.resonant = ev.resonant;
        led.norm_before = coefficient_norm(q, ctx, dom);
        QuasiPoly<Real> phi_q = kr.value.scaled(Cx<Real>(inv_wr));
        led.norm_after = coefficient_norm(phi_q, ctx, dom);
        res.ledger.push_back(std::move(led));
        res.phi.add_tail_bound(std::abs(inv_wr) * kr.tail * key_weight<Real>(key, dom));
        res.phi.add_to(key, std::move(phi_q));
    }
    res.phi.set_realness(ftilde.realness() && res.phi.is_real_symmetric());
    return res;
}

/// Classical Fourier-mode solution phi_khjl = f_khjl / mu_khjl with the
/// usual denominators mu_khjl = lambda_khj + i l omega_r.  Requires
/// x-trigonometric coefficients; raises SmallDivisorError on vanishing
/// denominators.  Cross-check oracle only -- the integral solver above
/// succeeds precisely where this one gives up.
template <class Real>
TFSeries<Real> solve_homological_fourier(const TFSeries<Real>& ftilde) {
    const auto& ctx = ftilde.ctx();
    TFSeries<Real> phi(ftilde.context(), ftilde.trunc());
    for (const auto& [key, q] : ftilde.terms()) {
        if (key.is_average())
            throw ConditionError(
                "zero-average",
                "solve_homological_fourier: input has a normal-class key " + to_string(key));
        const Cx<Real> lambda = eigenvalue(key, ctx).lambda;
        QuasiPoly<Real> out;
        for (const auto& t : q.terms()) {
            const Cx<Real> alpha = ctx.lattice.value(t.alpha);
            if (t.e != 0 || alpha.real() != Real(0))
                throw Error("solve_homological_fourier: coefficient at " + to_string(key) +
                            " is not an x-trigonometric polynomial");
            const Cx<Real> divisor = lambda + Cx<Real>(0, alpha.imag() * ctx.freq.omega_r);
            if (divisor == Cx<Real>(0))
                throw SmallDivisorError("vanishing denominator mu_khjl at " + to_string(key));
            QpTerm<Real> r = t;
            r.c = t.c / divisor;
            out.add_term(std::move(r));
        }
        phi.add_to(key, std::move(out));
    }
    phi.set_realness(ftilde.realness() && phi.is_real_symmetric());
    return phi;
}

}  // namespace xnf

#endif
