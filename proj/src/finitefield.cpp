#include "heckelab/finitefield.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <utility>

#include "heckelab/errors.hpp"
#include "heckelab/intmath.hpp"

namespace heckelab {

FiniteField::FiniteField(mpz_class p, unsigned f, modp::Poly g)
    : p_(std::move(p)), f_(f), g_(std::move(g)) {
    mpz_pow_ui(q_.get_mpz_t(), p_.get_mpz_t(), f_);
}

FFPtr FiniteField::get(const mpz_class& p, unsigned f) {
    if (f == 0 || !is_prime(p)) throw UsageError("FiniteField: need prime p and f >= 1");
    static std::mutex mtx;
    static std::map<std::pair<mpz_class, unsigned>, FFPtr> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(p, f);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    // scan for the canonical modulus
    modp::Poly g;
    mpz_class total;
    mpz_pow_ui(total.get_mpz_t(), p.get_mpz_t(), f);
    for (mpz_class n = 0; n < total; ++n) {
        g.assign(f + 1, 0);
        g[f] = 1;
        mpz_class rest = n;
        for (unsigned i = 0; i < f && rest != 0; ++i) {
            g[i] = rest % p;
            rest /= p;
        }
        if (modp::is_irreducible(g, p)) break;
    }
    FFPtr field(new FiniteField(p, f, g));
    cache.emplace(std::move(key), field);
    return field;
}

FFElem FiniteField::gen() const {
    if (f_ == 1) return modp::rem({0, 1}, g_, p_);
    return {0, 1};
}

FFElem FiniteField::from_int(const mpz_class& n) const {
    return modp::reduce({n}, p_);
}

mpz_class FiniteField::index(const FFElem& a) const {
    mpz_class n = 0;
    for (size_t i = a.size(); i-- > 0;) n = n * p_ + a[i];
    return n;
}

FFElem FiniteField::from_index(mpz_class n) const {
    FFElem a;
    while (n != 0) {
        a.push_back(n % p_);
        n /= p_;
    }
    if (a.size() > f_) throw UsageError("FiniteField::from_index: rank out of range");
    return a;
}

FFElem FiniteField::add(const FFElem& a, const FFElem& b) const { return modp::add(a, b, p_); }
FFElem FiniteField::sub(const FFElem& a, const FFElem& b) const { return modp::sub(a, b, p_); }
FFElem FiniteField::neg(const FFElem& a) const { return modp::sub({}, a, p_); }

FFElem FiniteField::mul(const FFElem& a, const FFElem& b) const {
    return modp::rem(modp::mul(a, b, p_), g_, p_);
}

FFElem FiniteField::inv(const FFElem& a) const {
    if (a.empty()) throw UsageError("FiniteField::inv: zero element");
    return modp::powmod(a, q_ - 2, g_, p_);
}

FFElem FiniteField::pow(const FFElem& a, mpz_class e) const {
    if (e < 0) return modp::powmod(inv(a), -e, g_, p_);
    return modp::powmod(a, e, g_, p_);
}

// ---- polynomials with coefficients in a finite field (file-local) ----

namespace {

using FFP = std::vector<FFElem>;  // position i = coefficient of x^i

void ffp_norm(FFP& a) {
    while (!a.empty() && a.back().empty()) a.pop_back();
}

int ffp_deg(const FFP& a) { return static_cast<int>(a.size()) - 1; }

FFP ffp_sub(const FiniteField& K, const FFP& a, const FFP& b) {
    FFP out(std::max(a.size(), b.size()));
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = K.sub(i < a.size() ? a[i] : FFElem{}, i < b.size() ? b[i] : FFElem{});
    ffp_norm(out);
    return out;
}

FFP ffp_mul(const FiniteField& K, const FFP& a, const FFP& b) {
    if (a.empty() || b.empty()) return {};
    FFP out(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            out[i + j] = K.add(out[i + j], K.mul(a[i], b[j]));
    ffp_norm(out);
    return out;
}

std::pair<FFP, FFP> ffp_divmod(const FiniteField& K, FFP a, const FFP& b) {
    if (b.empty()) throw UsageError("ffp_divmod: division by zero");
    FFP q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0);
    FFElem lcinv = K.inv(b.back());
    while (ffp_deg(a) >= ffp_deg(b)) {
        FFElem c = K.mul(a.back(), lcinv);
        size_t shift = a.size() - b.size();
        q[shift] = c;
        for (size_t i = 0; i < b.size(); ++i)
            a[shift + i] = K.sub(a[shift + i], K.mul(c, b[i]));
        ffp_norm(a);
    }
    ffp_norm(q);
    return {std::move(q), std::move(a)};
}

FFP ffp_rem(const FiniteField& K, FFP a, const FFP& b) {
    return ffp_divmod(K, std::move(a), b).second;
}

FFP ffp_monic(const FiniteField& K, FFP a) {
    if (a.empty()) return a;
    FFElem lcinv = K.inv(a.back());
    for (auto& c : a) c = K.mul(c, lcinv);
    return a;
}

FFP ffp_gcd(const FiniteField& K, FFP a, FFP b) {
    while (!b.empty()) {
        FFP r = ffp_rem(K, a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return ffp_monic(K, std::move(a));
}

FFP ffp_powmod(const FiniteField& K, FFP base, const mpz_class& e, const FFP& mod) {
    FFP out = {K.one()};
    base = ffp_rem(K, std::move(base), mod);
    for (size_t bit = mpz_sizeinbase(e.get_mpz_t(), 2); bit-- > 0;) {
        out = ffp_rem(K, ffp_mul(K, out, out), mod);
        if (mpz_tstbit(e.get_mpz_t(), static_cast<mp_bitcnt_t>(bit)))
            out = ffp_rem(K, ffp_mul(K, out, base), mod);
    }
    return out;
}

// r = monic product of distinct linear factors; peel roots off by
// character-sum (odd p) / trace (p = 2) splitting with a deterministic
// sweep of shifts.
void ffp_split_linear(const FiniteField& K, const FFP& r, std::vector<FFElem>& roots) {
    int d = ffp_deg(r);
    if (d <= 0) return;
    if (d == 1) {
        roots.push_back(K.neg(r[0]));
        return;
    }
    const mpz_class& q = K.order();
    for (mpz_class n = K.p() == 2 ? 1 : 0; n < q; ++n) {
        FFElem delta = K.from_index(n);
        FFP w;
        if (K.p() == 2) {
            FFP term = ffp_rem(K, FFP{{}, delta}, r);  // delta * x
            w = term;
            for (unsigned j = 1; j < K.f(); ++j) {
                term = ffp_rem(K, ffp_mul(K, term, term), r);
                w = ffp_sub(K, w, term);  // char 2: add == sub
            }
        } else {
            w = ffp_powmod(K, FFP{delta, K.one()}, (q - 1) / 2, r);
            w = ffp_sub(K, w, FFP{K.one()});
        }
        FFP g = ffp_gcd(K, r, w);
        if (ffp_deg(g) > 0 && ffp_deg(g) < d) {
            ffp_split_linear(K, g, roots);
            ffp_split_linear(K, ffp_divmod(K, r, g).first, roots);
            return;
        }
    }
    throw UsageError("find_roots: splitting sweep exhausted");
}

}  // namespace

std::vector<FFElem> find_roots(const std::vector<FFElem>& h, const FFPtr& K) {
    FFP a = h;
    ffp_norm(a);
    if (a.empty()) throw UsageError("find_roots: zero polynomial");
    std::vector<FFElem> roots;
    if (ffp_deg(a) == 0) return roots;
    a = ffp_monic(*K, std::move(a));
    // gcd with x^q - x isolates the distinct roots in K
    FFP x = {{}, K->one()};
    FFP xq = ffp_powmod(*K, x, K->order(), a);
    FFP r = ffp_gcd(*K, a, ffp_sub(*K, xq, x));
    ffp_split_linear(*K, r, roots);
    std::sort(roots.begin(), roots.end(), [&](const FFElem& u, const FFElem& v) {
        return K->index(u) < K->index(v);
    });
    return roots;
}

FFElem FFEmbedding::apply(const FFElem& a) const {
    FFElem acc;
    for (size_t i = a.size(); i-- > 0;)
        acc = dst->add(dst->mul(acc, gen_image), dst->from_int(a[i]));
    return acc;
}

std::vector<FFEmbedding> embeddings(const FFPtr& src, const FFPtr& dst) {
    if (src->p() != dst->p() || dst->f() % src->f() != 0)
        throw NotASubfield("no embedding F_" + src->order().get_str() + " -> F_" +
                           dst->order().get_str());
    FFP g(src->modulus().size());
    for (size_t i = 0; i < g.size(); ++i) g[i] = dst->from_int(src->modulus()[i]);
    std::vector<FFEmbedding> out;
    for (auto& root : find_roots(g, dst)) out.push_back({src, dst, std::move(root)});
    return out;
}

}  // namespace heckelab
