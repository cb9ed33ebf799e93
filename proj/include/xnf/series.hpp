#ifndef XNF_SERIES_HPP
#define XNF_SERIES_HPP

#include <functional>
#include <map>
#include <memory>
#include <sstream>

#include "xnf/quasipoly.hpp"

namespace xnf {

/// Taylor-Fourier index of the monomial e^{i k.phi} p^h q^j.
struct TermKey {
    std::vector<int> k;  // Fourier multi-index, length n
    std::vector<int> h;  // powers of p, length m, nonnegative
    std::vector<int> j;  // powers of q, length m, nonnegative

    friend auto operator<=>(const TermKey& a, const TermKey& b) = default;

    /// k = 0 and h = j: the key belongs to the normal class N; everything
    /// else is the zero-average class Z.
    bool is_average() const {
        for (int v : k)
            if (v != 0) return false;
        return h == j;
    }
};

inline std::string to_string(const TermKey& key) {
    std::ostringstream os;
    auto vec = [&os](const char* name, const std::vector<int>& v) {
        os << name << "=[";
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
        os << "]";
    };
    vec("k", key.k);
    os << " ";
    vec("h", key.h);
    os << " ";
    vec("j", key.j);
    return os.str();
}

struct TruncationOrders {
    int max_k = 8;        // |k|_1
    int max_deg_pq = 6;   // |h|_1 + |j|_1
    int max_deg_x = 12;   // x-degree of coefficients
    int max_deg_ri = 8;   // total (r, I)-degree of coefficients

    bool admits_key(const TermKey& key) const {
        return abs_sum(key.k) <= max_k && abs_sum(key.h) + abs_sum(key.j) <= max_deg_pq;
    }
    CoeffCaps coeff_caps() const { return CoeffCaps{max_deg_x, max_deg_ri}; }

    static TruncationOrders max_of(const TruncationOrders& a, const TruncationOrders& b) {
        return {std::max(a.max_k, b.max_k), std::max(a.max_deg_pq, b.max_deg_pq),
                std::max(a.max_deg_x, b.max_deg_x), std::max(a.max_deg_ri, b.max_deg_ri)};
    }
};

/// Shared immutable context of one computation: dimensions, the common
/// basepoint and the frequency lattice.  Mixing contexts is an error.
template <class Real>
struct SeriesContext {
    int n = 0;
    int m = 0;
    Basepoint<Real> base;
    FrequencyData<Real> freq;
    ExpLattice<Real> lattice;

    bool same(const SeriesContext& o) const {
        return n == o.n && m == o.m && base == o.base && freq.omega_r == o.freq.omega_r &&
               freq.omega_I == o.freq.omega_I && freq.omega_J == o.freq.omega_J;
    }
};

template <class Real>
using ContextPtr = std::shared_ptr<const SeriesContext<Real>>;

template <class Real>
ContextPtr<Real> make_context(int n, int m, FrequencyData<Real> freq, Basepoint<Real> base) {
    if (static_cast<int>(freq.omega_I.size()) != n || static_cast<int>(freq.omega_J.size()) != m)
        throw DimensionError("make_context: frequency vectors do not match (n, m)");
    if (static_cast<int>(base.I0.size()) != n)
        throw DimensionError("make_context: basepoint I0 does not match n");
    freq.validate();
    SeriesContext<Real> ctx;
    ctx.n = n;
    ctx.m = m;
    ctx.base = std::move(base);
    ctx.lattice = ExpLattice<Real>(freq);
    ctx.freq = std::move(freq);
    return std::make_shared<const SeriesContext<Real>>(std::move(ctx));
}

/// Complex evaluation point (r, I, x, phi, p, q).
template <class Real>
struct PhasePointC {
    Cx<Real> r{};
    std::vector<Cx<Real>> I;
    Cx<Real> x{};
    std::vector<Cx<Real>> phi;
    std::vector<Cx<Real>> p, q;
};

/// Sparse truncated Taylor-Fourier series: TermKey -> QuasiPoly.
///
/// Values are immutable in spirit: operations return new series.  The
/// `tail_bound` field carries a certified weighted-norm bound on whatever
/// mass truncating operations have discarded from the mathematically exact
/// result; it is maintained by the norm-aware wrappers in norms.hpp and by
/// the solver, and is 0 for exact constructions.
template <class Real>
class TFSeries {
  public:
    using Coeff = QuasiPoly<Real>;

    TFSeries() = default;
    TFSeries(ContextPtr<Real> ctx, TruncationOrders trunc)
        : ctx_(std::move(ctx)), trunc_(trunc) {}

    const ContextPtr<Real>& context() const { return ctx_; }
    const SeriesContext<Real>& ctx() const { return *ctx_; }
    const TruncationOrders& trunc() const { return trunc_; }
    const std::map<TermKey, Coeff>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool realness() const { return realness_; }
    void set_realness(bool r) { realness_ = r; }
    Real tail_bound() const { return tail_; }
    void set_tail_bound(Real t) { tail_ = t; }
    void add_tail_bound(Real t) { tail_ += t; }

    void check_key(const TermKey& key) const {
        if (static_cast<int>(key.k.size()) != ctx_->n ||
            static_cast<int>(key.h.size()) != ctx_->m ||
            static_cast<int>(key.j.size()) != ctx_->m)
            throw DimensionError("key dimensions do not match series: " + to_string(key));
        for (int v : key.h)
            if (v < 0) throw DimensionError("negative p-power in key " + to_string(key));
        for (int v : key.j)
            if (v < 0) throw DimensionError("negative q-power in key " + to_string(key));
    }

    /// Merge a coefficient into `key` (exact addition, canonical exponents).
    /// Rejects keys outside the truncation orders.
    void add_to(const TermKey& key, Coeff q) {
        check_key(key);
        if (!trunc_.admits_key(key))
            throw TruncationError("key exceeds truncation orders: " + to_string(key));
        q.canonicalize_exponents(ctx_->lattice);
        if (q.is_zero()) return;
        auto it = terms_.find(key);
        if (it == terms_.end()) {
            terms_.emplace(key, std::move(q));
        } else {
            it->second += q;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    const Coeff* coeff(const TermKey& key) const {
        auto it = terms_.find(key);
        return it == terms_.end() ? nullptr : &it->second;
    }

    /// True when the coefficient of (-k, h, j) is the conjugate of the
    /// coefficient of (k, h, j), i.e. the series is real on real points.
    bool is_real_symmetric() const {
        for (const auto& [key, q] : terms_) {
            TermKey neg = key;
            for (int& v : neg.k) v = -v;
            const Coeff* other = coeff(neg);
            if (!other) return false;
            if (!(other->conjugated() == q)) return false;
        }
        return true;
    }

  private:
    ContextPtr<Real> ctx_;
    TruncationOrders trunc_;
    std::map<TermKey, Coeff> terms_;
    bool realness_ = false;
    Real tail_ = Real(0);
};

/// Sink receiving terms discarded by a truncating operation, so callers can
/// account their certified mass on the domain of their choice.
template <class Real>
using DropSink = std::function<void(const TermKey&, const QuasiPoly<Real>&)>;

namespace detail {
template <class Real>
void require_same_context(const TFSeries<Real>& a, const TFSeries<Real>& b, const char* op) {
    if (!a.context() || !b.context() || !a.ctx().same(b.ctx()))
        throw DimensionError(std::string(op) + ": operands have different context/basepoint");
}
}  // namespace detail

template <class Real>
TFSeries<Real> build_series(ContextPtr<Real> ctx,
                            const std::vector<std::pair<TermKey, QuasiPoly<Real>>>& entries,
                            TruncationOrders trunc) {
    TFSeries<Real> s(std::move(ctx), trunc);
    for (const auto& [key, q] : entries) {
        if (q.max_deg_x() > trunc.max_deg_x || q.max_deg_ri() > trunc.max_deg_ri)
            throw TruncationError("coefficient degree exceeds truncation orders at key " +
                                  to_string(key));
        s.add_to(key, q);
    }
    s.set_realness(s.is_real_symmetric());
    return s;
}

template <class Real>
TFSeries<Real> linear_combine(const std::vector<Cx<Real>>& coeffs,
                              const std::vector<TFSeries<Real>>& series) {
    if (coeffs.size() != series.size() || series.empty())
        throw DimensionError("linear_combine: need matching, nonempty coefficient/series lists");
    TruncationOrders trunc = series.front().trunc();
    for (const auto& s : series) {
        detail::require_same_context(series.front(), s, "linear_combine");
        trunc = TruncationOrders::max_of(trunc, s.trunc());
    }
    TFSeries<Real> out(series.front().context(), trunc);
    Real tail = 0;
    bool real = true;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (coeffs[i] == Cx<Real>(0)) continue;
        for (const auto& [key, q] : series[i].terms()) out.add_to(key, q.scaled(coeffs[i]));
        tail += std::abs(coeffs[i]) * series[i].tail_bound();
        real = real && series[i].realness() && coeffs[i].imag() == Real(0);
    }
    out.set_tail_bound(tail);
    out.set_realness(real && out.is_real_symmetric());
    return out;
}

template <class Real>
TFSeries<Real> add(const TFSeries<Real>& a, const TFSeries<Real>& b) {
    return linear_combine<Real>({Cx<Real>(1), Cx<Real>(1)}, {a, b});
}

template <class Real>
TFSeries<Real> subtract(const TFSeries<Real>& a, const TFSeries<Real>& b) {
    return linear_combine<Real>({Cx<Real>(1), Cx<Real>(-1)}, {a, b});
}

template <class Real>
TFSeries<Real> scale(const TFSeries<Real>& a, Cx<Real> c) {
    return linear_combine<Real>({c}, {a});
}

/// Cauchy product.  Keys and coefficient degrees beyond `trunc` are dropped
/// and handed to `drop`; the result's tail_bound is NOT updated here (see
/// norms.hpp for the mass-accounting wrapper).
template <class Real>
TFSeries<Real> multiply(const TFSeries<Real>& a, const TFSeries<Real>& b, TruncationOrders trunc,
                        const DropSink<Real>& drop = {}) {
    detail::require_same_context(a, b, "multiply");
    TFSeries<Real> out(a.context(), trunc);
    const CoeffCaps caps = trunc.coeff_caps();
    for (const auto& [ka, qa] : a.terms()) {
        for (const auto& [kb, qb] : b.terms()) {
            TermKey key;
            key.k = ka.k;
            for (std::size_t i = 0; i < key.k.size(); ++i) key.k[i] += kb.k[i];
            key.h = ka.h;
            for (std::size_t i = 0; i < key.h.size(); ++i) key.h[i] += kb.h[i];
            key.j = ka.j;
            for (std::size_t i = 0; i < key.j.size(); ++i) key.j[i] += kb.j[i];
            if (!trunc.admits_key(key)) {
                if (drop) drop(key, qa.multiply(qb));
                continue;
            }
            QuasiPoly<Real> dropped;
            QuasiPoly<Real> prod = qa.multiply(qb, caps, drop ? &dropped : nullptr);
            if (drop && !dropped.is_zero()) drop(key, dropped);
            if (!prod.is_zero()) out.add_to(key, std::move(prod));
        }
    }
    out.set_realness(a.realness() && b.realness());
    return out;
}

struct Coord {
    enum Kind { r, I, x, phi, p, q } kind;
    int index = 0;  // which component for I, phi, p, q
};

template <class Real>
TFSeries<Real> partial_derivative(const TFSeries<Real>& s, Coord c) {
    const int n = s.ctx().n, m = s.ctx().m;
    if ((c.kind == Coord::I || c.kind == Coord::phi) && (c.index < 0 || c.index >= n))
        throw DimensionError("partial_derivative: I/phi index out of range");
    if ((c.kind == Coord::p || c.kind == Coord::q) && (c.index < 0 || c.index >= m))
        throw DimensionError("partial_derivative: p/q index out of range");

    TFSeries<Real> out(s.context(), s.trunc());
    for (const auto& [key, q] : s.terms()) {
        switch (c.kind) {
            case Coord::r:
                out.add_to(key, q.derivative_r());
                break;
            case Coord::I:
                out.add_to(key, q.derivative_I(static_cast<std::size_t>(c.index)));
                break;
            case Coord::x:
                out.add_to(key, q.derivative_x(s.ctx().lattice));
                break;
            case Coord::phi:
                if (key.k[c.index] != 0)
                    out.add_to(key, q.scaled(Cx<Real>(0, Real(key.k[c.index]))));
                break;
            case Coord::p:
                if (key.h[c.index] != 0) {
                    TermKey lowered = key;
                    lowered.h[c.index] -= 1;
                    out.add_to(lowered, q.scaled(Cx<Real>(Real(key.h[c.index]))));
                }
                break;
            case Coord::q:
                if (key.j[c.index] != 0) {
                    TermKey lowered = key;
                    lowered.j[c.index] -= 1;
                    out.add_to(lowered, q.scaled(Cx<Real>(Real(key.j[c.index]))));
                }
                break;
        }
    }
    out.set_realness(s.realness());
    return out;
}

/// Poisson bracket for the two-form dr^dx + dI^dphi + dp^dq, with the sign
/// convention pinned by {phi_series, H0} = -D_omega phi (the (p,q) block
/// enters with the opposite sign to the (r,x) and (I,phi) blocks; the
/// residual choices are echoed in every report).
template <class Real>
TFSeries<Real> poisson_bracket(const TFSeries<Real>& a, const TFSeries<Real>& b,
                               TruncationOrders trunc, const DropSink<Real>& drop = {}) {
    detail::require_same_context(a, b, "poisson_bracket");
    auto mul = [&](const TFSeries<Real>& u, const TFSeries<Real>& v) {
        return multiply(u, v, trunc, drop);
    };
    TFSeries<Real> acc =
        subtract(mul(partial_derivative(a, {Coord::r, 0}), partial_derivative(b, {Coord::x, 0})),
                 mul(partial_derivative(a, {Coord::x, 0}), partial_derivative(b, {Coord::r, 0})));
    for (int i = 0; i < a.ctx().n; ++i) {
        acc = add(acc, subtract(mul(partial_derivative(a, {Coord::I, i}),
                                    partial_derivative(b, {Coord::phi, i})),
                                mul(partial_derivative(a, {Coord::phi, i}),
                                    partial_derivative(b, {Coord::I, i}))));
    }
    for (int i = 0; i < a.ctx().m; ++i) {
        acc = add(acc, subtract(mul(partial_derivative(a, {Coord::q, i}),
                                    partial_derivative(b, {Coord::p, i})),
                                mul(partial_derivative(a, {Coord::p, i}),
                                    partial_derivative(b, {Coord::q, i}))));
    }
    acc.set_tail_bound(Real(0));
    acc.set_realness(a.realness() && b.realness());
    return acc;
}

/// Split into the normal-class part (k = 0, h = j) and the zero-average
/// part (everything else).  avg + osc = s key-exactly.
template <class Real>
std::pair<TFSeries<Real>, TFSeries<Real>> project_average(const TFSeries<Real>& s) {
    TFSeries<Real> avg(s.context(), s.trunc()), osc(s.context(), s.trunc());
    for (const auto& [key, q] : s.terms()) {
        (key.is_average() ? avg : osc).add_to(key, q);
    }
    avg.set_tail_bound(s.tail_bound());
    osc.set_tail_bound(s.tail_bound());
    avg.set_realness(s.realness());
    osc.set_realness(s.realness());
    return {std::move(avg), std::move(osc)};
}

template <class Real>
Cx<Real> evaluate(const TFSeries<Real>& s, const PhasePointC<Real>& pt) {
    const auto& ctx = s.ctx();
    Cx<Real> acc{};
    for (const auto& [key, q] : s.terms()) {
        Cx<Real> kphi{};
        for (int i = 0; i < ctx.n; ++i) kphi += Real(key.k[i]) * pt.phi[i];
        Cx<Real> v = q.eval(pt.r, pt.I, pt.x, ctx.base, ctx.lattice);
        v *= std::exp(Cx<Real>(0, 1) * kphi);
        for (int i = 0; i < ctx.m; ++i)
            v *= pow_int(pt.p[i], key.h[i]) * pow_int(pt.q[i], key.j[i]);
        acc += v;
    }
    return acc;
}

/// Canonical sorted textual form (keys lexicographic, terms by shape) used
/// by golden-file tests.
template <class Real>
std::string canonical_text(const TFSeries<Real>& s) {
    std::ostringstream os;
    char buf[64];
    auto num = [&](Real v) {
        std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(v));
        os << buf;
    };
    for (const auto& [key, q] : s.terms()) {
        os << to_string(key) << " :: ";
        bool first = true;
        for (const auto& t : q.terms()) {
            if (!first) os << " + ";
            first = false;
            os << "(";
            num(t.c.real());
            os << ",";
            num(t.c.imag());
            os << ") a=" << t.a << " b=[";
            for (std::size_t i = 0; i < t.b.size(); ++i) os << (i ? "," : "") << t.b[i];
            os << "] e=" << t.e << " wJ=[";
            for (std::size_t i = 0; i < t.alpha.wJ.size(); ++i)
                os << (i ? "," : "") << t.alpha.wJ[i];
            os << "] wI=[";
            for (std::size_t i = 0; i < t.alpha.wI.size(); ++i)
                os << (i ? "," : "") << t.alpha.wI[i];
            os << "] ell=" << t.alpha.ell;
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace xnf

#endif
