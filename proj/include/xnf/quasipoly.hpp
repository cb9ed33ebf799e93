#ifndef XNF_QUASIPOLY_HPP
#define XNF_QUASIPOLY_HPP

#include <algorithm>
#include <compare>
#include <map>
#include <tuple>

#include "xnf/common.hpp"

namespace xnf {

/// Constant frequencies of the integrable part
/// H0 = omega_r * r + omega_I . I + omega_J . J,  J_i = p_i q_i.
template <class Real>
struct FrequencyData {
    Real omega_r = Real(1);
    std::vector<Real> omega_I;  // length n
    std::vector<Real> omega_J;  // length m

    void validate() const {
        if (omega_r == Real(0)) throw Error("FrequencyData: omega_r must be nonzero");
    }
};

/// Exponent of e^{alpha x} stored as an exact integer point of the lattice
///
///   alpha = (wJ . omega_J + i wI . omega_I) / omega_r + i * ell .
///
/// Storing integer weights instead of a floating value keeps term merging
/// deterministic and makes the vanishing of combined exponents an exact
/// test: these are precisely the "resonances" the solver must not divide by.
struct ExpKey {
    std::vector<int> wJ;  // weights on omega_J_i / omega_r
    std::vector<int> wI;  // weights on i * omega_I_i / omega_r
    long long ell = 0;    // weight on the pure imaginary unit i

    bool is_zero_key() const {
        if (ell != 0) return false;
        for (int w : wJ)
            if (w != 0) return false;
        for (int w : wI)
            if (w != 0) return false;
        return true;
    }

    friend ExpKey operator+(const ExpKey& a, const ExpKey& b) {
        ExpKey r = a;
        for (std::size_t i = 0; i < r.wJ.size(); ++i) r.wJ[i] += b.wJ[i];
        for (std::size_t i = 0; i < r.wI.size(); ++i) r.wI[i] += b.wI[i];
        r.ell += b.ell;
        return r;
    }
    friend ExpKey operator-(const ExpKey& a) {
        ExpKey r = a;
        for (int& w : r.wJ) w = -w;
        for (int& w : r.wI) w = -w;
        r.ell = -r.ell;
        return r;
    }
    friend auto operator<=>(const ExpKey& a, const ExpKey& b) = default;
};

/// Numeric realization of the exponent lattice for fixed frequencies.
template <class Real>
struct ExpLattice {
    std::vector<Real> genJ;  // omega_J_i / omega_r
    std::vector<Real> genI;  // omega_I_i / omega_r

    ExpLattice() = default;
    explicit ExpLattice(const FrequencyData<Real>& f) {
        f.validate();
        genJ.reserve(f.omega_J.size());
        for (Real w : f.omega_J) genJ.push_back(w / f.omega_r);
        genI.reserve(f.omega_I.size());
        for (Real w : f.omega_I) genI.push_back(w / f.omega_r);
    }

    ExpKey zero_key() const {
        ExpKey k;
        k.wJ.assign(genJ.size(), 0);
        k.wI.assign(genI.size(), 0);
        return k;
    }

    /// Weights on exactly-zero generators contribute nothing; zeroing them
    /// makes key equality coincide with value equality on such components.
    void canonicalize(ExpKey& k) const {
        for (std::size_t i = 0; i < genJ.size(); ++i)
            if (genJ[i] == Real(0)) k.wJ[i] = 0;
        for (std::size_t i = 0; i < genI.size(); ++i)
            if (genI[i] == Real(0)) k.wI[i] = 0;
    }

    Cx<Real> value(const ExpKey& k) const {
        Real re = 0, im = 0;
        for (std::size_t i = 0; i < genJ.size(); ++i) re += Real(k.wJ[i]) * genJ[i];
        for (std::size_t i = 0; i < genI.size(); ++i) im += Real(k.wI[i]) * genI[i];
        im += Real(k.ell);
        return {re, im};
    }

    bool compatible(const ExpKey& k) const {
        return k.wJ.size() == genJ.size() && k.wI.size() == genI.size();
    }
};

template <class Real>
struct Basepoint {
    Real r0 = Real(0);
    std::vector<Real> I0;

    friend bool operator==(const Basepoint& a, const Basepoint& b) {
        return a.r0 == b.r0 && a.I0 == b.I0;
    }
};

/// One monomial  c * (r-r0)^a * (I-I0)^b * x^e * e^{alpha x}.
template <class Real>
struct QpTerm {
    Cx<Real> c{};
    int a = 0;
    std::vector<int> b;  // length n
    int e = 0;
    ExpKey alpha;

    std::tuple<int, const std::vector<int>&, int, const ExpKey&> shape() const {
        return {a, b, e, alpha};
    }
};

/// Per-term degree caps enforced during products and the solver.  Negative
/// means unlimited.
struct CoeffCaps {
    int max_deg_x = -1;   // cap on e
    int max_deg_ri = -1;  // cap on a + |b|_1

    bool admits(int a, const std::vector<int>& b, int e) const {
        if (max_deg_x >= 0 && e > max_deg_x) return false;
        if (max_deg_ri >= 0 && a + abs_sum(b) > max_deg_ri) return false;
        return true;
    }
};

/// Finite sum of quasi-polynomial monomials in (r, I, x); the smallest
/// coefficient class closed under products, derivatives and the solver's
/// kernel integral.  Terms are kept sorted by shape and merged exactly.
template <class Real>
class QuasiPoly {
  public:
    using Term = QpTerm<Real>;

    QuasiPoly() = default;

    static QuasiPoly zero() { return {}; }

    static QuasiPoly constant(Cx<Real> c, int n_dims, const ExpKey& zero_key) {
        QuasiPoly q;
        if (c != Cx<Real>(0)) {
            Term t;
            t.c = c;
            t.b.assign(static_cast<std::size_t>(n_dims), 0);
            t.alpha = zero_key;
            q.terms_.push_back(std::move(t));
        }
        return q;
    }

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(Term t) {
        if (t.c == Cx<Real>(0)) return;
        auto pos = std::lower_bound(terms_.begin(), terms_.end(), t, shape_less);
        if (pos != terms_.end() && pos->shape() == t.shape()) {
            pos->c += t.c;
            if (pos->c == Cx<Real>(0)) terms_.erase(pos);
        } else {
            terms_.insert(pos, std::move(t));
        }
    }

    QuasiPoly& operator+=(const QuasiPoly& o) {
        for (const Term& t : o.terms_) add_term(t);
        return *this;
    }

    friend QuasiPoly operator+(QuasiPoly a, const QuasiPoly& b) {
        a += b;
        return a;
    }

    QuasiPoly scaled(Cx<Real> s) const {
        QuasiPoly q;
        if (s == Cx<Real>(0)) return q;
        q.terms_ = terms_;
        for (Term& t : q.terms_) t.c *= s;
        return q;
    }

    /// Product; terms violating `caps` are diverted into `*dropped` (when
    /// given) so the caller can account their certified mass.
    QuasiPoly multiply(const QuasiPoly& o, const CoeffCaps& caps = {},
                       QuasiPoly* dropped = nullptr) const {
        QuasiPoly out;
        for (const Term& s : terms_) {
            for (const Term& t : o.terms_) {
                Term r;
                r.c = s.c * t.c;
                r.a = s.a + t.a;
                r.b = s.b;
                for (std::size_t i = 0; i < r.b.size(); ++i) r.b[i] += t.b[i];
                r.e = s.e + t.e;
                r.alpha = s.alpha + t.alpha;
                if (!caps.admits(r.a, r.b, r.e)) {
                    if (dropped) dropped->add_term(std::move(r));
                    continue;
                }
                out.add_term(std::move(r));
            }
        }
        return out;
    }

    QuasiPoly derivative_r() const {
        QuasiPoly q;
        for (const Term& t : terms_) {
            if (t.a == 0) continue;
            Term d = t;
            d.c *= Real(t.a);
            d.a -= 1;
            q.add_term(std::move(d));
        }
        return q;
    }

    QuasiPoly derivative_I(std::size_t i) const {
        QuasiPoly q;
        for (const Term& t : terms_) {
            if (t.b[i] == 0) continue;
            Term d = t;
            d.c *= Real(t.b[i]);
            d.b[i] -= 1;
            q.add_term(std::move(d));
        }
        return q;
    }

    /// d/dx (x^e e^{alpha x}) = e x^{e-1} e^{alpha x} + alpha x^e e^{alpha x}.
    QuasiPoly derivative_x(const ExpLattice<Real>& lat) const {
        QuasiPoly q;
        for (const Term& t : terms_) {
            if (t.e > 0) {
                Term d = t;
                d.c *= Real(t.e);
                d.e -= 1;
                q.add_term(std::move(d));
            }
            Cx<Real> alpha = lat.value(t.alpha);
            if (alpha != Cx<Real>(0)) {
                Term d = t;
                d.c *= alpha;
                q.add_term(std::move(d));
            }
        }
        return q;
    }

    Cx<Real> eval(Cx<Real> r, const std::vector<Cx<Real>>& I, Cx<Real> x,
                  const Basepoint<Real>& base, const ExpLattice<Real>& lat) const {
        Cx<Real> acc{};
        const Cx<Real> dr = r - Cx<Real>(base.r0);
        for (const Term& t : terms_) {
            Cx<Real> v = t.c * pow_int(dr, t.a) * pow_int(x, t.e);
            for (std::size_t i = 0; i < t.b.size(); ++i)
                v *= pow_int(I[i] - Cx<Real>(base.I0[i]), t.b[i]);
            Cx<Real> alpha = lat.value(t.alpha);
            if (alpha != Cx<Real>(0)) v *= std::exp(alpha * x);
            acc += v;
        }
        return acc;
    }

    /// Complex conjugate on the real phase space: conjugate coefficients and
    /// exponents (alpha -> conj(alpha) negates the imaginary weights).
    QuasiPoly conjugated() const {
        QuasiPoly q;
        for (const Term& t : terms_) {
            Term r = t;
            r.c = std::conj(r.c);
            for (int& w : r.alpha.wI) w = -w;
            r.alpha.ell = -r.alpha.ell;
            q.add_term(std::move(r));
        }
        return q;
    }

    int max_deg_x() const {
        int d = 0;
        for (const Term& t : terms_) d = std::max(d, t.e);
        return d;
    }
    int max_deg_ri() const {
        int d = 0;
        for (const Term& t : terms_) d = std::max(d, t.a + abs_sum(t.b));
        return d;
    }

    void canonicalize_exponents(const ExpLattice<Real>& lat) {
        std::vector<Term> old;
        old.swap(terms_);
        for (Term& t : old) {
            lat.canonicalize(t.alpha);
            add_term(std::move(t));
        }
    }

    friend bool operator==(const QuasiPoly& a, const QuasiPoly& b) {
        if (a.terms_.size() != b.terms_.size()) return false;
        for (std::size_t i = 0; i < a.terms_.size(); ++i) {
            const Term &s = a.terms_[i], &t = b.terms_[i];
            if (s.shape() != t.shape() || s.c != t.c) return false;
        }
        return true;
    }

  private:
    static bool shape_less(const Term& s, const Term& t) { return s.shape() < t.shape(); }

    std::vector<Term> terms_;
};

}  // namespace xnf

#endif
